#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>

#include "acceptance.hpp"
#include "eqppo/harness/agent.hpp"
#include "eqppo/harness/config.hpp"
#include "eqppo/harness/diagnostics.hpp"
#include "eqppo/harness/trainer.hpp"
#include "eqppo/rl/clip.hpp"

namespace eqppo::acceptance {

namespace {

// Diagonal Gaussian log-density, written out term by term.
double log_density(const MatrixD& a, const MatrixD& mean, const RowVectorD& log_sigma) {
  double s = 0.0;
  for (Eigen::Index d = 0; d < a.cols(); ++d) {
    const double z = (a(0, d) - mean(0, d)) / std::exp(log_sigma[d]);
    s += -0.5 * z * z - log_sigma[d] - 0.5 * std::log(2.0 * std::numbers::pi);
  }
  return s;
}

constexpr double kAdvantageTop = 4.0;

}  // namespace

bool criterion_4(const Options& o) {
  Criterion c(4, "two-sided clip zeroes the nudge force outside its window and bounds ratio drift", 300.0);
  rl::ClipConfig clip;
  clip.epsilon = 0.2;
  clip.epsilon_rev = 0.7;

  std::mt19937_64 rng(404);
  std::normal_distribution<double> n01(0.0, 1.0);
  std::uniform_real_distribution<double> spread(0.05, 1.5), ls(-1.5, 0.5);
  std::uniform_int_distribution<int> dims(1, 12);
  int outside_pos = 0, outside_neg = 0, inside = 0, bad_zero = 0, bad_open = 0;
  for (int k = 0; k < 10000; ++k) {
    const int d = dims(rng);
    MatrixD a(1, d), mu(1, d), xi(1, d);
    RowVectorD log_sigma(d);
    const double s = spread(rng);
    for (int i = 0; i < d; ++i) {
      log_sigma[i] = ls(rng);
      mu(0, i) = n01(rng);
      a(0, i) = mu(0, i) + std::exp(log_sigma[i]) * n01(rng);
      xi(0, i) = mu(0, i) + s * std::exp(log_sigma[i]) * n01(rng);
    }
    const VectorD lp = VectorD::Constant(1, log_density(a, mu, log_sigma));
    const double adv = 2.0 * n01(rng);
    const double r = std::exp(log_density(a, xi, log_sigma) - lp[0]);
    const bool open = adv > 0.0 ? (r > 0.3 && r < 1.2) : (r > 0.8 && r < 1.7);
    const MatrixD f = rl::policy_nudge_force(xi, a, VectorD::Constant(1, adv), log_sigma, lp, clip, 1.0, 1.0);
    if (open) {
      ++inside;
      if (f.isZero(0.0)) ++bad_open;
    } else {
      ++(adv > 0.0 ? outside_pos : outside_neg);
      if (!f.isZero(0.0)) ++bad_zero;
    }
  }
  c.check(bad_zero == 0, str(outside_pos + outside_neg, " states outside the window (A>0: ", outside_pos,
                             ", A<0: ", outside_neg, "), nonzero force in ", bad_zero));
  c.check(bad_open == 0 && inside > 1000, str(inside, " states inside the window, zero force in ", bad_open));

  // Ratio excursions on a policy trained briefly on the desk task.
  harness::TrainerConfig cfg = harness::desk_profile();
  cfg.max_training_samples = 20LL * cfg.num_envs * cfg.horizon;
  harness::Trainer tr(cfg);
  tr.train();
  const auto& ep = dynamic_cast<const harness::EpAgent&>(tr.agent());
  const harness::RolloutData& data = tr.last_data();
  // Stress: the nudge scale beta * A of the top advantage bin (A = 4) at the
  // training beta, reached with the largest positive advantage in this rollout.
  const double max_adv = data.advantages.maxCoeff();
  const double beta_stress = cfg.clip.beta_ep * kAdvantageTop / max_adv;
  auto run = [&](double beta) {
    harness::DiagnosticsConfig dc;
    dc.eps_rev = {0.7, 1.0};
    dc.beta = beta;
    dc.seed = 4;
    dc.phases = {cfg.policy_steps_free, cfg.policy_steps_pos, cfg.policy_steps_neg, beta, cfg.eps_ep,
                 cfg.conv_tol, false};
    return harness::nudge_diagnostics(ep.policy_net(), data, tr.state().log_sigma, data.size(), cfg.clip, dc);
  };
  const auto nominal = run(cfg.clip.beta_ep);
  const auto stressed = run(beta_stress);
  std::filesystem::create_directories(o.out_dir);
  std::ofstream out(o.out_dir / "nudge_diagnostics.csv");
  harness::write_nudge_csv(out, nominal);
  harness::write_nudge_csv(out, stressed);
  for (const auto* rep : {&nominal, &stressed}) {
    for (const auto& r : *rep) {
      c.note(str("beta ", r.beta, ", eps_rev ", r.eps_rev, ": min log10 r (A>0) ", r.min_log10_r_pos_adv,
                 ", max one-step change ", r.max_step_change));
    }
  }
  c.note(str("largest advantage ", max_adv, ", stress beta ", beta_stress));
  // Bin means of the extreme ratio, in the highest populated positive-advantage bin.
  auto top_bin = [](const harness::NudgeReport& r) -> const harness::NudgeBin& {
    const harness::NudgeBin* best = &r.bins.back();
    for (const auto& b : r.bins) {
      if (b.lo >= 0.0 && b.free.count > 0) best = &b;
    }
    return *best;
  };
  const auto& tight = top_bin(stressed[0]);
  const auto& loose = top_bin(stressed[1]);
  c.note(str("stressed, advantage bin [", tight.lo, ", ", tight.hi, ") with ", tight.free.count,
             " samples: mean extreme log10 r eps_rev 0.7 ", tight.extreme_pos.mean, ", eps_rev 1.0 ",
             loose.extreme_pos.mean));
  const auto& t = stressed[0];
  const auto& l = stressed[1];
  c.check(l.min_log10_r_pos_adv < -1.0, str("stressed, eps_rev 1.0: excursion ", l.min_log10_r_pos_adv, " below -1"));
  c.check(t.min_log10_r_pos_adv > l.min_log10_r_pos_adv, "stressed: eps_rev 0.7 excursion smaller than eps_rev 1.0");
  // The mask is tested once per Euler step, so the last step may overshoot the boundary.
  const double floor = std::log10(0.3) - t.max_step_change;
  c.check(t.min_log10_r_pos_adv >= floor,
          str("stressed, eps_rev 0.7: excursion within one nudge step of log10(0.3) (>= ", floor, ")"));
  return c.report();
}

}  // namespace eqppo::acceptance
