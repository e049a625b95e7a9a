#include "eqppo/harness/evaluate.hpp"

#include <ostream>

#include "eqppo/common/errors.hpp"
#include "eqppo/harness/checkpoint.hpp"
#include "eqppo/harness/stats.hpp"

namespace eqppo::harness {

ControllerVersion load_controller(const std::filesystem::path& bundle) {
  TrainingState s = load_bundle(bundle);
  if (s.config.task != TaskKind::kLocomotion) throw ConfigError(bundle.string() + " is not a locomotion checkpoint");
  if (s.config.stage == 1) return {make_policy_fn(s), {}};
  TrainingState cpg = load_bundle(s.config.cpg_checkpoint);
  if (cpg.agent->policy_hash() != s.cpg_hash)
    throw ConfigError("CPG checkpoint " + s.config.cpg_checkpoint + " does not match the one used in training");
  return {make_policy_fn(cpg), make_policy_fn(s)};
}

std::vector<EvalCell> evaluate(const std::vector<ControllerVersion>& versions, const EvalConfig& cfg) {
  std::vector<EvalCell> cells;
  if (cfg.episodes <= 0 || versions.empty()) return cells;
  for (double v : cfg.speeds) {
    for (double h : cfg.heights) {
      std::vector<double> success, speed, power, roll, pitch, roll_rate, pitch_rate;
      for (const auto& ver : versions) {
        const auto m = envsim::walking_test(ver.cpg, ver.res, v, h, cfg.episodes, cfg.walking);
        success.push_back(m.success_rate);
        speed.push_back(m.speed);
        power.push_back(m.power);
        roll.push_back(m.abs_roll);
        pitch.push_back(m.abs_pitch);
        roll_rate.push_back(m.abs_roll_rate);
        pitch_rate.push_back(m.abs_pitch_rate);
      }
      EvalCell c;
      c.v_target = v;
      c.h_max = h;
      c.required_distance = envsim::required_distance(v);
      c.versions = static_cast<int>(versions.size());
      c.episodes = cfg.episodes;
      c.success_mean = mean(success), c.success_std = stddev(success);
      c.speed_mean = mean(speed), c.speed_std = stddev(speed);
      c.power_mean = mean(power), c.power_std = stddev(power);
      c.roll_mean = mean(roll), c.roll_std = stddev(roll);
      c.pitch_mean = mean(pitch), c.pitch_std = stddev(pitch);
      c.roll_rate_mean = mean(roll_rate), c.roll_rate_std = stddev(roll_rate);
      c.pitch_rate_mean = mean(pitch_rate), c.pitch_rate_std = stddev(pitch_rate);
      cells.push_back(c);
    }
  }
  return cells;
}

void write_eval_csv(std::ostream& out, const std::vector<EvalCell>& c) {
  out << "v_target,h_max,required_distance,versions,episodes,success_mean,success_std,speed_mean,speed_std,"
         "power_mean,power_std,roll_mean,roll_std,pitch_mean,pitch_std,roll_rate_mean,roll_rate_std,"
         "pitch_rate_mean,pitch_rate_std\n";
  for (const auto& e : c) {
    out << e.v_target << ',' << e.h_max << ',' << e.required_distance << ',' << e.versions << ',' << e.episodes << ','
        << e.success_mean << ',' << e.success_std << ',' << e.speed_mean << ',' << e.speed_std << ',' << e.power_mean
        << ',' << e.power_std << ',' << e.roll_mean << ',' << e.roll_std << ',' << e.pitch_mean << ',' << e.pitch_std
        << ',' << e.roll_rate_mean << ',' << e.roll_rate_std << ',' << e.pitch_rate_mean << ',' << e.pitch_rate_std
        << '\n';
  }
}

}  // namespace eqppo::harness
