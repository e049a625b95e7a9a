#include <cmath>
#include <fstream>
#include <iostream>
#include <numbers>

#include "acceptance.hpp"
#include "eqppo/harness/checkpoint.hpp"
#include "eqppo/harness/config.hpp"
#include "eqppo/harness/evaluate.hpp"
#include "eqppo/harness/trainer.hpp"

namespace eqppo::acceptance {

harness::TrainerConfig locomotion_desk_config() {
  harness::TrainerConfig cfg = harness::desk_profile();
  cfg.task = harness::TaskKind::kLocomotion;
  cfg.stage = 1;
  cfg.idct_dim = 96;
  cfg.max_training_samples = 204800;
  const double per_dim = 0.5 * std::log(2.0 * std::numbers::pi * std::numbers::e);
  cfg.entropy_initial = cfg.entropy_final = 12.0 * per_dim;
  return cfg;
}

bool criterion_8(const Options& o) {
  Criterion c(8, "walking test: success non-increasing in H_max; velocity-scaled distances", 600.0);
  const double expect[] = {1.667, 5.0, 8.333};
  const double speeds[] = {0.1, 0.3, 0.5};
  for (int i = 0; i < 3; ++i) {
    const double d = envsim::required_distance(speeds[i]);
    const bool ok = std::round(d * 1000.0) / 1000.0 == expect[i] && std::abs(d - 5.0 * speeds[i] / 0.3) < 1e-12;
    c.check(ok, str("required distance at ", speeds[i], " m/s: ", d, " m (", expect[i], ")"));
  }

  const harness::TrainerConfig cfg = locomotion_desk_config();
  harness::Trainer tr(cfg);
  tr.train([&](const harness::UpdateMetrics& m) {
    if (o.verbose) std::cout << "walking policy update " << m.update << " reward " << m.mean_reward << "\n";
  });
  std::filesystem::create_directories(o.out_dir);
  const auto bundle = o.out_dir / "walking_policy.eqpb";
  harness::save_bundle(bundle, tr.state());

  harness::EvalConfig ec;
  ec.episodes = 100;
  const auto cells = harness::evaluate({harness::load_controller(bundle)}, ec);
  std::ofstream out(o.out_dir / "walking_test.csv");
  harness::write_eval_csv(out, cells);

  int violations = 0;
  double best = 0.0;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    best = std::max(best, cells[i].success_mean);
    if (i > 0 && cells[i].v_target == cells[i - 1].v_target && cells[i].success_mean > cells[i - 1].success_mean) {
      ++violations;
    }
  }
  for (double v : ec.speeds) {
    std::string row = str("v* ", v, " success (mean speed) by H_max:");
    for (const auto& cell : cells) {
      if (cell.v_target == v) row += str(" ", cell.success_mean, " (", cell.speed_mean, ")");
    }
    c.note(row);
  }
  c.check(cells.size() == ec.speeds.size() * ec.heights.size() && cells.front().episodes == 100,
          str(cells.size(), " cells of ", cells.front().episodes, " episodes"));
  c.check(violations == 0, str(violations, " increases of success with H_max"));
  c.check(best > 0.0, str("best cell success ", best, " > 0 (the policy walks)"));
  return c.report();
}

}  // namespace eqppo::acceptance
