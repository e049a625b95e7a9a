// eqppo: train, evaluate, diagnose, ablate, grad-check.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include "eqppo/common/errors.hpp"
#include "eqppo/harness/ablation.hpp"
#include "eqppo/harness/checkpoint.hpp"
#include "eqppo/harness/diagnostics.hpp"
#include "eqppo/harness/evaluate.hpp"
#include "eqppo/harness/grad_check.hpp"
#include "eqppo/harness/stats.hpp"
#include "eqppo/harness/trainer.hpp"

namespace fs = std::filesystem;
using namespace eqppo;
using namespace eqppo::harness;

namespace {

enum ExitCode : int {
  kOk = 0,
  kFailure = 1,
  kConfig = 2,
  kNumerical = 3,
  kFormat = 4,
  kContract = 5,
  kWorkspace = 6,
};

struct CommonOptions {
  std::string profile = "desk";
  std::string config;
  int stage = 0;  // 0: from profile/config
  std::optional<std::uint64_t> seed;
  std::string cpg_checkpoint;
  std::string out_dir = "runs/latest";
  std::optional<long long> samples;
  std::string algorithm;
};

void add_common(CLI::App* app, CommonOptions& o) {
  app->add_option("--profile", o.profile, "Base hyperparameters")->check(CLI::IsMember({"desk", "full"}));
  app->add_option("--config", o.config, "INI file overlaid on the profile")->check(CLI::ExistingFile);
  app->add_option("--stage", o.stage, "Training stage")->check(CLI::IsMember({1, 2}));
  app->add_option("--seed", o.seed, "Global seed");
  app->add_option("--cpg-checkpoint", o.cpg_checkpoint, "Stage-1 bundle driving the CPG in stage 2");
  app->add_option("--out-dir", o.out_dir, "Output directory");
  app->add_option("--samples", o.samples, "Override MaxTrainingSamples");
  app->add_option("--algorithm", o.algorithm, "ep or bp")->check(CLI::IsMember({"ep", "bp"}));
}

TrainerConfig resolve(const CommonOptions& o) {
  TrainerConfig cfg = profile(o.profile, o.stage == 0 ? 1 : o.stage);
  if (!o.config.empty()) cfg = load_config(o.config, cfg);
  if (o.stage != 0) {
    cfg.stage = o.stage;
    if (o.stage == 2) cfg.task = TaskKind::kLocomotion;
  }
  if (o.seed) cfg.seed = *o.seed;
  if (!o.cpg_checkpoint.empty()) cfg.cpg_checkpoint = o.cpg_checkpoint;
  if (o.samples) cfg.max_training_samples = *o.samples;
  if (!o.algorithm.empty()) cfg.algorithm = parse_algorithm(o.algorithm);
  cfg.validate();
  return cfg;
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write " + path.string());
  return out;
}

int run_train(const CommonOptions& o, const std::string& resume, int checkpoint_every) {
  const fs::path dir = o.out_dir;
  fs::create_directories(dir);
  std::unique_ptr<Trainer> trainer;
  if (!resume.empty()) {
    TrainingState state = load_bundle(resume);
    if (o.samples) state.config.max_training_samples = *o.samples;
    trainer = std::make_unique<Trainer>(std::move(state));
  } else {
    trainer = std::make_unique<Trainer>(resolve(o));
  }
  trainer->set_dump_dir(dir);
  save_config(trainer->config(), dir / "config.ini");
  const bool append = !resume.empty() && fs::exists(dir / "metrics.csv");
  std::ofstream metrics(dir / "metrics.csv", append ? std::ios::app : std::ios::trunc);
  if (!metrics) throw FormatError("cannot write " + (dir / "metrics.csv").string());
  if (!append) write_metrics_header(metrics);

  const auto& cfg = trainer->config();
  std::cout << "training " << to_string(cfg.algorithm) << " on " << to_string(cfg.task) << " stage " << cfg.stage
            << ", " << cfg.max_training_samples << " samples, seed " << cfg.seed << "\n";
  trainer->train([&](const UpdateMetrics& m) {
    write_metrics_row(metrics, m);
    metrics.flush();
    std::cout << "update " << m.update << "  samples " << m.samples << "  reward " << m.mean_reward << "  kl " << m.kl
              << "  lr " << m.lr_policy << (m.rolled_back ? "  rollback" : "") << "\n";
    if (checkpoint_every > 0 && m.update % checkpoint_every == 0)
      save_bundle(dir / "checkpoint.eqpb", trainer->state());
  });
  save_bundle(dir / "checkpoint.eqpb", trainer->state());
  std::cout << "wrote " << (dir / "checkpoint.eqpb").string() << "\n";
  return kOk;
}

int run_evaluate(const std::vector<std::string>& checkpoints, const std::string& out_dir, int episodes,
                 const std::vector<double>& speeds, const std::vector<double>& heights, std::uint64_t seed) {
  EvalConfig ec;
  ec.episodes = episodes;
  if (!speeds.empty()) ec.speeds = speeds;
  if (!heights.empty()) ec.heights = heights;
  ec.walking.seed = seed;
  std::vector<ControllerVersion> versions;
  if (episodes > 0)
    for (const auto& c : checkpoints) versions.push_back(load_controller(c));
  const auto cells = evaluate(versions, ec);
  fs::create_directories(out_dir);
  auto out = open_out(fs::path(out_dir) / "walking_test.csv");
  write_eval_csv(out, cells);
  write_eval_csv(std::cout, cells);
  return kOk;
}

int run_diagnose(const std::string& checkpoint, const std::string& out_dir, int samples,
                 const std::vector<double>& eps_rev, double beta, std::uint64_t seed) {
  TrainingState state = load_bundle(checkpoint);
  auto* ep = dynamic_cast<const EpAgent*>(state.agent.get());
  if (!ep) throw ConfigError("nudge diagnostics need an EP checkpoint");
  const auto policy = ep->policy_net();
  const RowVectorD log_sigma = state.log_sigma;
  const auto clip = state.config.clip;
  const auto steps = state.config;
  Trainer trainer(std::move(state));
  UpdateMetrics m;
  const RolloutData data = trainer.collect(m);
  DiagnosticsConfig dc;
  dc.eps_rev = eps_rev;
  dc.beta = beta;
  dc.seed = seed;
  dc.phases = {steps.policy_steps_free, steps.policy_steps_pos, steps.policy_steps_neg, beta, steps.eps_ep,
               steps.conv_tol, false};
  const auto reports = nudge_diagnostics(policy, data, log_sigma, std::min(samples, data.size()), clip, dc);
  fs::create_directories(out_dir);
  auto out = open_out(fs::path(out_dir) / "nudge_diagnostics.csv");
  write_nudge_csv(out, reports);
  for (const auto& r : reports) {
    std::cout << "eps_rev " << r.eps_rev << ": min log10 r (A>0) " << r.min_log10_r_pos_adv << ", max log10 r (A<0) "
              << r.max_log10_r_neg_adv << ", max step change " << r.max_step_change << "\n";
  }
  return kOk;
}

int run_ablate(const CommonOptions& o, const std::string& axis_name, const std::vector<std::uint64_t>& seeds) {
  const TrainerConfig base = resolve(o);
  const AblationAxis axis = parse_ablation_axis(axis_name);
  auto arms = run_ablation(base, axis, seeds, [](const AblationArm& arm, std::uint64_t seed, const UpdateMetrics& m) {
    std::cout << arm.label << " seed " << seed << " update " << m.update << " reward " << m.mean_reward << "\n";
  });
  fs::create_directories(o.out_dir);
  auto out = open_out(fs::path(o.out_dir) / ("ablation_" + axis_name + ".csv"));
  write_ablation_csv(out, arms, seeds);
  for (const auto& arm : arms) {
    std::vector<std::vector<double>> curves;
    double steps = 0.0, pct = 0.0;
    int n = 0;
    for (const auto& run : arm.runs) {
      std::vector<double> c;
      for (const auto& m : run) {
        c.push_back(m.mean_reward);
        steps += m.probe_steps_mean;
        pct += m.probe_pct_converged;
        ++n;
      }
      curves.push_back(std::move(c));
    }
    const auto curve = mean_curve(curves);
    const auto mk = mann_kendall(curve);
    std::cout << arm.label << ": final reward " << (curve.empty() ? 0.0 : curve.back()) << ", trend S " << mk.s
              << " p(up) " << mk.p_increasing << ", probe steps " << (n ? steps / n : 0.0) << ", converged "
              << (n ? pct / n : 0.0) << "%\n";
  }
  return kOk;
}

int run_grad_check(int nets, std::uint64_t seed, const std::string& out_dir) {
  GradCheckConfig gc;
  gc.nets = nets;
  gc.seed = seed;
  const auto cases = grad_check(gc);
  write_grad_check_csv(std::cout, cases);
  if (!out_dir.empty()) {
    fs::create_directories(out_dir);
    auto out = open_out(fs::path(out_dir) / "grad_check.csv");
    write_grad_check_csv(out, cases);
  }
  bool ok = true;
  for (const auto& c : cases) ok = ok && c.cos_fd > 0.99 && c.rel_fd < 0.05 && c.cos_bptt > 0.98;
  std::cout << (ok ? "all nets within tolerance\n" : "some nets out of tolerance\n");
  return ok ? kOk : kFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Equilibrium-propagation PPO for CPG-driven quadruped locomotion"};
  app.require_subcommand(1);

  CommonOptions train_opts;
  std::string resume;
  int checkpoint_every = 10;
  auto* train = app.add_subcommand("train", "Train a policy");
  add_common(train, train_opts);
  train->add_option("--resume", resume, "Continue from a bundle")->check(CLI::ExistingFile);
  train->add_option("--checkpoint-every", checkpoint_every, "Updates between checkpoints (0: only at the end)");

  std::vector<std::string> eval_ckpts;
  std::string eval_out = "runs/eval";
  int eval_episodes = 100;
  std::vector<double> eval_speeds, eval_heights;
  std::uint64_t eval_seed = 1;
  auto* eval = app.add_subcommand("evaluate", "Walking test over the speed x H_max grid");
  eval->add_option("--checkpoint", eval_ckpts, "Bundle(s), one per trained version")->check(CLI::ExistingFile);
  eval->add_option("--episodes", eval_episodes, "Episodes per cell and version");
  eval->add_option("--speeds", eval_speeds, "Target speeds (m/s)");
  eval->add_option("--heights", eval_heights, "H_max values (m)");
  eval->add_option("--seed", eval_seed, "Walking-test seed");
  eval->add_option("--out-dir", eval_out, "Output directory");

  std::string diag_ckpt, diag_out = "runs/diagnose";
  int diag_samples = 1024;
  std::vector<double> diag_eps{0.3, 0.7, 1.0};
  double diag_beta = 0.1;
  std::uint64_t diag_seed = 1;
  auto* diag = app.add_subcommand("diagnose", "Record log10 r_nudging during the nudge phases");
  diag->add_option("--checkpoint", diag_ckpt, "EP bundle")->required()->check(CLI::ExistingFile);
  diag->add_option("--samples", diag_samples, "Transitions to sample from one rollout");
  diag->add_option("--eps-rev", diag_eps, "Reverse clip values");
  diag->add_option("--beta", diag_beta, "Nudge strength");
  diag->add_option("--seed", diag_seed, "Sampling seed");
  diag->add_option("--out-dir", diag_out, "Output directory");

  CommonOptions ablate_opts;
  std::string axis;
  std::vector<std::uint64_t> ablate_seeds{1, 2, 3};
  auto* ablate = app.add_subcommand("ablate", "Matched-seed trainings along one axis");
  add_common(ablate, ablate_opts);
  ablate->add_option("--axis", axis, "eps_rev, sigma_scaling, mask_mode or idct")->required();
  ablate->add_option("--seeds", ablate_seeds, "Seeds shared by every arm");

  int gc_nets = 20;
  std::uint64_t gc_seed = 1;
  std::string gc_out;
  auto* gc = app.add_subcommand("grad-check", "EP gradients vs finite differences and BPTT");
  gc->add_option("--nets", gc_nets, "Random nets to check");
  gc->add_option("--seed", gc_seed, "Seed");
  gc->add_option("--out-dir", gc_out, "Also write grad_check.csv here");

  CommonOptions config_opts;
  auto* show = app.add_subcommand("config", "Print the resolved hyperparameters as INI");
  add_common(show, config_opts);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kConfig;
  }

  try {
    if (*train) return run_train(train_opts, resume, checkpoint_every);
    if (*eval) return run_evaluate(eval_ckpts, eval_out, eval_episodes, eval_speeds, eval_heights, eval_seed);
    if (*diag) return run_diagnose(diag_ckpt, diag_out, diag_samples, diag_eps, diag_beta, diag_seed);
    if (*ablate) return run_ablate(ablate_opts, axis, ablate_seeds);
    if (*gc) return run_grad_check(gc_nets, gc_seed, gc_out);
    if (*show) {
      std::cout << to_ini(resolve(config_opts));
      return kOk;
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfig;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error (" << e.where() << "): " << e.what() << "\n";
    return kNumerical;
  } catch (const FormatError& e) {
    std::cerr << "format error: " << e.what() << "\n";
    return kFormat;
  } catch (const ContractError& e) {
    std::cerr << "contract violation: " << e.what() << "\n";
    return kContract;
  } catch (const WorkspaceError& e) {
    std::cerr << "workspace error: " << e.what() << "\n";
    return kWorkspace;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFailure;
  }
  return kFailure;
}
