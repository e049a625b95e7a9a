#include "eqppo/harness/ablation.hpp"

#include <ostream>

#include "eqppo/common/errors.hpp"

namespace eqppo::harness {

std::string to_string(AblationAxis a) {
  switch (a) {
    case AblationAxis::kEpsRev: return "eps_rev";
    case AblationAxis::kSigmaScaling: return "sigma_scaling";
    case AblationAxis::kMaskMode: return "mask_mode";
    case AblationAxis::kIdct: return "idct";
  }
  return "?";
}

AblationAxis parse_ablation_axis(const std::string& s) {
  for (auto a : {AblationAxis::kEpsRev, AblationAxis::kSigmaScaling, AblationAxis::kMaskMode, AblationAxis::kIdct})
    if (to_string(a) == s) return a;
  throw ConfigError("unknown ablation axis '" + s + "' (expected eps_rev, sigma_scaling, mask_mode or idct)");
}

std::vector<AblationArm> ablation_arms(const TrainerConfig& base, AblationAxis axis) {
  std::vector<AblationArm> arms;
  auto add = [&](std::string label, auto&& edit) {
    AblationArm arm{std::move(label), base, {}};
    edit(arm.config);
    arm.config.validate();
    arms.push_back(std::move(arm));
  };
  switch (axis) {
    case AblationAxis::kEpsRev:
      for (double e : {0.3, 0.7, 1.0}) {
        std::string label = "eps_rev=" + std::to_string(e).substr(0, 3);
        add(label, [e](TrainerConfig& c) { c.clip.epsilon_rev = e; });
      }
      break;
    case AblationAxis::kSigmaScaling:
      add("inv_sigma", [](TrainerConfig& c) { c.clip.sigma_scaling = rl::SigmaScaling::kInvSigma; });
      add("inv_sigma_sq", [](TrainerConfig& c) { c.clip.sigma_scaling = rl::SigmaScaling::kInvSigmaSq; });
      break;
    case AblationAxis::kMaskMode:
      add("dynamic", [](TrainerConfig& c) { c.clip.mask_mode = rl::MaskMode::kDynamic; });
      add("static", [](TrainerConfig& c) { c.clip.mask_mode = rl::MaskMode::kStatic; });
      break;
    case AblationAxis::kIdct:
      add("idct", [](TrainerConfig& c) { c.use_idct = true; });
      add("raw", [](TrainerConfig& c) { c.use_idct = false; });
      break;
  }
  return arms;
}

std::vector<AblationArm> run_ablation(const TrainerConfig& base, AblationAxis axis,
                                      const std::vector<std::uint64_t>& seeds,
                                      const AblationProgress& progress) {
  auto arms = ablation_arms(base, axis);
  for (auto& arm : arms) {
    for (auto seed : seeds) {
      TrainerConfig cfg = arm.config;
      cfg.seed = seed;
      Trainer trainer(cfg);
      arm.runs.push_back(trainer.train([&](const UpdateMetrics& m) {
        if (progress) progress(arm, seed, m);
      }));
    }
  }
  return arms;
}

void write_ablation_csv(std::ostream& out, const std::vector<AblationArm>& arms,
                        const std::vector<std::uint64_t>& seeds) {
  out << "arm,seed,update,samples,mean_reward,value_mse,kl,lr_policy,rolled_back,steps_mean,pct_converged,"
         "probe_steps_mean,probe_pct_converged\n";
  for (const auto& arm : arms) {
    for (std::size_t s = 0; s < arm.runs.size(); ++s) {
      for (const auto& m : arm.runs[s]) {
        out << arm.label << ',' << (s < seeds.size() ? seeds[s] : s) << ',' << m.update << ',' << m.samples << ','
            << m.mean_reward << ',' << m.value_mse << ',' << m.kl << ',' << m.lr_policy << ',' << int(m.rolled_back)
            << ',' << m.steps_mean << ',' << m.pct_converged << ',' << m.probe_steps_mean << ','
            << m.probe_pct_converged << '\n';
      }
    }
  }
}

}  // namespace eqppo::harness
