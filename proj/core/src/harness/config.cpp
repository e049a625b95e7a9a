#include "eqppo/harness/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "eqppo/common/binary_io.hpp"
#include "eqppo/common/errors.hpp"

namespace eqppo::harness {

namespace pt = boost::property_tree;

std::string to_string(Algorithm a) { return a == Algorithm::kEP ? "ep" : "bp"; }
std::string to_string(TaskKind t) { return t == TaskKind::kVelocityTracking ? "velocity" : "locomotion"; }

Algorithm parse_algorithm(const std::string& s) {
  if (s == "ep") return Algorithm::kEP;
  if (s == "bp") return Algorithm::kBP;
  throw ConfigError("unknown algorithm '" + s + "' (expected ep or bp)");
}

TaskKind parse_task(const std::string& s) {
  if (s == "velocity") return TaskKind::kVelocityTracking;
  if (s == "locomotion") return TaskKind::kLocomotion;
  throw ConfigError("unknown task '" + s + "' (expected velocity or locomotion)");
}

double TrainerConfig::entropy_target(double fraction) const {
  fraction = std::clamp(fraction, 0.0, 1.0);
  return entropy_initial + fraction * (entropy_final - entropy_initial);
}

void TrainerConfig::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw ConfigError(what);
  };
  require(num_envs > 0, "num_envs must be positive");
  require(horizon > 0, "horizon must be positive");
  require(gamma > 0 && gamma <= 1, "gamma must be in (0, 1]");
  require(lambda >= 0 && lambda <= 1, "lambda must be in [0, 1]");
  require(max_training_samples >= 0, "max_training_samples must be non-negative");
  require(epochs > 0, "epochs must be positive");
  require(minibatches > 0 && minibatches <= num_envs * horizon, "minibatches must be in [1, N*T]");
  require(kl_target > 0 && kl_stop > 0 && kl_rollback > 0, "KL thresholds must be positive");
  require(kappa > 1, "kappa must exceed 1");
  require(lr_policy_lower > 0 && lr_policy_upper >= lr_policy_lower, "invalid policy LR bounds");
  require(lr_policy >= lr_policy_lower && lr_policy <= lr_policy_upper, "policy LR outside its bounds");
  require(lr_value > 0 && lr_logstd > 0, "learning rates must be positive");
  require(momentum >= 0 && momentum < 1, "momentum must be in [0, 1)");
  require(k_entropy >= 0, "k_entropy must be non-negative");
  require(policy_steps_free > 0 && policy_steps_pos > 0 && policy_steps_neg > 0,
          "policy relaxation steps must be positive");
  require(value_steps_free > 0 && value_steps_pos > 0 && value_steps_neg > 0,
          "value relaxation steps must be positive");
  require(eps_ep > 0 && eps_ep <= 1, "eps_ep must be in (0, 1]");
  require(alpha_w > 0, "alpha_w must be positive");
  require(conv_probe_steps > 0 && conv_probe_samples >= 0, "invalid convergence probe settings");
  require(!use_idct || idct_dim > 0, "idct_dim must be positive");
  require(!hidden.empty() && !bp_hidden.empty(), "networks need at least one hidden layer");
  for (int h : hidden) require(h > 0, "hidden sizes must be positive");
  for (int h : bp_hidden) require(h > 0, "hidden sizes must be positive");
  require(bp_lr_policy > 0 && bp_lr_value > 0, "BP learning rates must be positive");
  require(stage == 1 || stage == 2, "stage must be 1 or 2");
  require(h_max >= 1e-4, "h_max must be at least 1e-4");
  require(!(stage == 2 && task == TaskKind::kVelocityTracking), "stage 2 needs the locomotion task");
  clip.validate();
}

TrainerConfig full_profile(int stage) {
  TrainerConfig c;
  c.task = TaskKind::kLocomotion;
  c.stage = stage;
  c.num_envs = stage == 1 ? 1024 : 2048;
  c.horizon = stage == 1 ? 256 : 128;
  c.max_training_samples = 100000000;
  c.idct_dim = 1024;
  c.hidden = {768, 768};
  return c;
}

TrainerConfig desk_profile() {
  TrainerConfig c;
  c.task = TaskKind::kVelocityTracking;
  c.num_envs = 16;
  c.horizon = 128;
  c.max_training_samples = 200000;
  c.idct_dim = 32;
  c.hidden = {32, 32};
  c.bp_hidden = {32, 32};
  c.lr_value = 0.05;
  // Same per-dimension entropy as 17.03 over 12 dimensions.
  c.entropy_initial = c.entropy_final = 17.03 / 12.0;
  return c;
}

TrainerConfig profile(const std::string& name, int stage) {
  if (name == "full") return full_profile(stage);
  if (name == "desk") {
    auto c = desk_profile();
    if (stage == 2) {
      c.task = TaskKind::kLocomotion;
      c.stage = 2;
      c.entropy_initial = c.entropy_final = 17.03;
    }
    return c;
  }
  throw ConfigError("unknown profile '" + name + "' (expected desk or full)");
}

namespace {

// Shortest of 15 or 17 significant digits that reads back to the same double.
std::string fmt(double v) {
  for (int digits : {15, std::numeric_limits<double>::max_digits10}) {
    std::ostringstream os;
    os << std::setprecision(digits) << v;
    if (std::stod(os.str()) == v || !std::isfinite(v)) return os.str();
  }
  return "";
}

std::string fmt_list(const std::vector<int>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
  return s;
}

double parse_double(const std::string& key, const std::string& s) {
  if (s == "inf" || s == "+inf") return std::numeric_limits<double>::infinity();
  try {
    std::size_t pos = 0;
    double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("key '" + key + "' expects a number, got '" + s + "'");
  }
}

long long parse_int(const std::string& key, const std::string& s) {
  double v = parse_double(key, s);
  if (v != std::floor(v) || std::abs(v) > 9.0e18)
    throw ConfigError("key '" + key + "' expects an integer, got '" + s + "'");
  return static_cast<long long>(v);
}

bool parse_bool(const std::string& key, const std::string& s) {
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  throw ConfigError("key '" + key + "' expects true/false, got '" + s + "'");
}

std::vector<int> parse_list(const std::string& key, const std::string& s) {
  std::vector<int> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item.erase(0, item.find_first_not_of(" \t"));
    item.erase(item.find_last_not_of(" \t") + 1);
    if (!item.empty()) out.push_back(static_cast<int>(parse_int(key, item)));
  }
  return out;
}

// One visitor call per serialized field: (section, key, to_text, from_text).
template <typename Visitor>
void visit_fields(TrainerConfig& c, Visitor&& v) {
  auto num = [&](const char* sec, const char* key, double& x) {
    v(sec, key, fmt(x), [&x, key](const std::string& s) { x = parse_double(key, s); });
  };
  auto integer = [&](const char* sec, const char* key, auto& x) {
    v(sec, key, std::to_string(x), [&x, key](const std::string& s) {
      x = static_cast<std::decay_t<decltype(x)>>(parse_int(key, s));
    });
  };
  auto flag = [&](const char* sec, const char* key, bool& x) {
    v(sec, key, std::string(x ? "true" : "false"), [&x, key](const std::string& s) { x = parse_bool(key, s); });
  };
  auto list = [&](const char* sec, const char* key, std::vector<int>& x) {
    v(sec, key, fmt_list(x), [&x, key](const std::string& s) { x = parse_list(key, s); });
  };

  integer("rollout", "N", c.num_envs);
  integer("rollout", "T", c.horizon);
  num("rollout", "gamma", c.gamma);
  num("rollout", "lambda", c.lambda);
  integer("rollout", "MaxTrainingSamples", c.max_training_samples);

  integer("update", "K_epoch", c.epochs);
  integer("update", "minibatches", c.minibatches);
  num("update", "KL_target", c.kl_target);
  num("update", "KL_stop", c.kl_stop);
  num("update", "KL_rb", c.kl_rollback);
  num("update", "lr_decrease_ratio", c.lr_decrease_ratio);
  num("update", "lr_increase_ratio", c.lr_increase_ratio);
  num("update", "kappa", c.kappa);
  num("update", "eta_policy_initial", c.lr_policy);
  num("update", "eta_policy_lower", c.lr_policy_lower);
  num("update", "eta_policy_upper", c.lr_policy_upper);
  num("update", "eta_value", c.lr_value);
  num("update", "momentum", c.momentum);

  num("logstd", "eta_logstd", c.lr_logstd);
  num("logstd", "entropy_initial", c.entropy_initial);
  num("logstd", "entropy_final", c.entropy_final);
  num("logstd", "k_entropy", c.k_entropy);
  num("logstd", "init_log_std", c.init_log_std);

  num("clip", "epsilon", c.clip.epsilon);
  num("clip", "epsilon_rev", c.clip.epsilon_rev);
  v("clip", "sigma_scaling", rl::to_string(c.clip.sigma_scaling),
    [&c](const std::string& s) { c.clip.sigma_scaling = rl::parse_sigma_scaling(s); });
  v("clip", "mask_mode", rl::to_string(c.clip.mask_mode),
    [&c](const std::string& s) { c.clip.mask_mode = rl::parse_mask_mode(s); });

  num("ep", "beta_ep", c.clip.beta_ep);
  num("ep", "eps_ep", c.eps_ep);
  num("ep", "alpha_w", c.alpha_w);
  num("ep", "conv_tol", c.conv_tol);
  integer("ep", "T_policy_free", c.policy_steps_free);
  integer("ep", "T_policy_pos", c.policy_steps_pos);
  integer("ep", "T_policy_neg", c.policy_steps_neg);
  integer("ep", "T_value_free", c.value_steps_free);
  integer("ep", "T_value_pos", c.value_steps_pos);
  integer("ep", "T_value_neg", c.value_steps_neg);
  integer("ep", "conv_probe_steps", c.conv_probe_steps);
  integer("ep", "conv_probe_samples", c.conv_probe_samples);

  flag("network", "use_idct", c.use_idct);
  integer("network", "idct_dim", c.idct_dim);
  list("network", "hidden", c.hidden);
  list("network", "bp_hidden", c.bp_hidden);
  num("network", "bp_lr_policy", c.bp_lr_policy);
  num("network", "bp_lr_value", c.bp_lr_value);

  v("run", "algorithm", to_string(c.algorithm), [&c](const std::string& s) { c.algorithm = parse_algorithm(s); });
  v("run", "task", to_string(c.task), [&c](const std::string& s) { c.task = parse_task(s); });
  integer("run", "stage", c.stage);
  num("run", "H_max", c.h_max);
  integer("run", "seed", c.seed);
  v("run", "cpg_checkpoint", c.cpg_checkpoint, [&c](const std::string& s) { c.cpg_checkpoint = s; });
}

}  // namespace

std::string to_ini(const TrainerConfig& cfg) {
  TrainerConfig c = cfg;
  std::ostringstream os;
  std::string section;
  visit_fields(c, [&](const char* sec, const char* key, const std::string& text, auto&&) {
    if (section != sec) {
      if (!section.empty()) os << "\n";
      os << "[" << sec << "]\n";
      section = sec;
    }
    os << key << " = " << text << "\n";
  });
  return os.str();
}

TrainerConfig from_ini(const std::string& text, const TrainerConfig& base) {
  pt::ptree tree;
  std::istringstream in(text);
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
  TrainerConfig c = base;
  std::set<std::string> known;
  visit_fields(c, [&](const char* sec, const char* key, const std::string&, auto&& assign) {
    std::string path = std::string(sec) + "." + key;
    known.insert(path);
    if (auto node = tree.get_child_optional(pt::ptree::path_type(path, '.'))) assign(node->data());
  });
  for (const auto& [sec, child] : tree) {
    if (child.empty()) throw ConfigError("config key '" + sec + "' must be inside a section");
    for (const auto& [key, value] : child) {
      if (!known.count(sec + "." + key)) throw ConfigError("unknown config key '" + sec + "." + key + "'");
    }
  }
  return c;
}

TrainerConfig load_config(const std::filesystem::path& path, const TrainerConfig& base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return from_ini(ss.str(), base);
}

void save_config(const TrainerConfig& cfg, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write config file " + path.string());
  out << to_ini(cfg);
}

std::uint64_t config_hash(const TrainerConfig& cfg) {
  const std::string s = to_ini(cfg);
  return io::fnv1a(s.data(), s.size());
}

}  // namespace eqppo::harness
