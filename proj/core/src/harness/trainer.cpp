#include "eqppo/harness/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <numeric>
#include <ostream>
#include <sstream>

#include "eqppo/common/errors.hpp"
#include "eqppo/envsim/locomotion.hpp"
#include "eqppo/envsim/velocity_tracking.hpp"
#include "eqppo/rl/gaussian.hpp"
#include "eqppo/rl/logstd.hpp"

namespace eqppo::harness {

void write_metrics_header(std::ostream& out) {
  out << "update,samples,mean_reward,episode_return,episodes,faults,value_mse,kl,epochs_run,lr_policy,entropy,"
         "entropy_target,rolled_back,rollback_verified,rollbacks,steps_mean,pct_converged,probe_steps_mean,"
         "probe_pct_converged,seconds\n";
}

void write_metrics_row(std::ostream& out, const UpdateMetrics& m) {
  std::ostringstream os;
  os.precision(10);
  os << m.update << ',' << m.samples << ',' << m.mean_reward << ',' << m.episode_return << ',' << m.episodes << ','
     << m.faults << ',' << m.value_mse << ',' << m.kl << ',' << m.epochs_run << ',' << m.lr_policy << ','
     << m.entropy << ',' << m.entropy_target << ',' << int(m.rolled_back) << ',' << int(m.rollback_verified) << ','
     << m.rollbacks << ',' << m.steps_mean << ',' << m.pct_converged << ',' << m.probe_steps_mean << ','
     << m.probe_pct_converged << ',' << m.seconds << '\n';
  out << os.str();
}

SafeguardDecision kl_safeguard(double kl, double lr, const TrainerConfig& cfg) {
  SafeguardDecision d{false, lr};
  if (kl > cfg.kl_rollback) {
    d.rollback = true;
    d.lr = lr / (cfg.kappa * cfg.kappa);
  } else if (kl > cfg.lr_decrease_ratio * cfg.kl_target) {
    d.lr = lr / cfg.kappa;
  } else if (kl < cfg.lr_increase_ratio * cfg.kl_target) {
    d.lr = lr * cfg.kappa;
  }
  d.lr = std::clamp(d.lr, cfg.lr_policy_lower, cfg.lr_policy_upper);
  return d;
}

envsim::EnvFactory make_env_factory(const TrainerConfig& cfg, envsim::PolicyFn cpg) {
  if (cfg.task == TaskKind::kVelocityTracking) {
    return [](int, std::uint64_t seed) -> std::unique_ptr<envsim::Env> {
      return std::make_unique<envsim::VelocityTrackingEnv>(envsim::VelocityTrackingParams{}, seed);
    };
  }
  envsim::LocomotionConfig lc;
  lc.stage = cfg.stage;
  lc.h_max = cfg.stage == 2 ? cfg.h_max : envsim::kMinBoxHeight;
  lc.randomization = cfg.stage == 2 ? envsim::DomainRandomization::stage2() : envsim::DomainRandomization::stage1();
  lc.validate();
  return [lc, cpg](int, std::uint64_t seed) -> std::unique_ptr<envsim::Env> {
    auto env = std::make_unique<envsim::LocomotionEnv>(lc, seed);
    if (cpg) env->set_cpg_driver(cpg);
    return env;
  };
}

namespace {

std::string rng_to_string(const std::mt19937_64& rng) {
  std::ostringstream os;
  os << rng;
  return os.str();
}

MatrixD to_rows(const Eigen::MatrixXd& m) { return MatrixD(m); }

double mean_of(const std::vector<int>& steps, double* pct) {
  double sum = 0.0;
  int n = 0;
  for (int s : steps) {
    if (s >= 0) {
      sum += s;
      ++n;
    }
  }
  if (pct) *pct = steps.empty() ? 0.0 : 100.0 * n / static_cast<double>(steps.size());
  return n ? sum / n : 0.0;
}

}  // namespace

Trainer::Trainer(TrainerConfig cfg) : Trainer(cfg, envsim::EnvFactory{}) {}

Trainer::Trainer(TrainerConfig cfg, envsim::EnvFactory factory) {
  cfg.validate();
  state_.config = cfg;
  rng_.seed(cfg.seed);
  envsim::PolicyFn cpg;
  if (cfg.task == TaskKind::kLocomotion && cfg.stage == 2 && !factory) {
    if (cfg.cpg_checkpoint.empty()) throw ConfigError("stage 2 needs a stage-1 CPG checkpoint (--cpg-checkpoint)");
    if (!std::filesystem::exists(cfg.cpg_checkpoint))
      throw ConfigError("stage-1 CPG checkpoint not found: " + cfg.cpg_checkpoint);
    TrainingState cpg_state = load_bundle(cfg.cpg_checkpoint);
    if (cpg_state.config.stage != 1 || cpg_state.preprocessor.obs_dim() != envsim::kCpgObsDim)
      throw ConfigError("checkpoint " + cfg.cpg_checkpoint + " is not a stage-1 locomotion policy");
    cpg_agent_ = cpg_state.agent->clone();
    state_.cpg_hash = cpg_agent_->policy_hash();
    cpg = make_policy_fn(cpg_state);
  }
  if (!factory) factory = make_env_factory(cfg, cpg);
  init_envs(std::move(factory));

  const int obs_dim = envs_->obs_dim();
  const int act_dim = envs_->action_dim();
  state_.preprocessor = Preprocessor(obs_dim, cfg.use_idct, cfg.idct_dim);
  state_.agent = make_agent(cfg, state_.preprocessor.output_dim(), act_dim, cfg.seed * 7919 + 17);
  state_.log_sigma = RowVectorD::Constant(act_dim, cfg.init_log_std);
  state_.logstd_opt.lr = cfg.lr_logstd;
  state_.rng_state = rng_to_string(rng_);
}

Trainer::Trainer(TrainingState state) : state_(std::move(state)) {
  const auto& cfg = state_.config;
  std::istringstream is(state_.rng_state);
  is >> rng_;
  if (!is) rng_.seed(cfg.seed);
  envsim::PolicyFn cpg;
  if (cfg.task == TaskKind::kLocomotion && cfg.stage == 2) {
    TrainingState cpg_state = load_bundle(cfg.cpg_checkpoint);
    cpg_agent_ = cpg_state.agent->clone();
    if (cpg_agent_->policy_hash() != state_.cpg_hash)
      throw ConfigError("CPG checkpoint changed since training started");
    cpg = make_policy_fn(cpg_state);
  }
  init_envs(make_env_factory(cfg, cpg));
}

void Trainer::init_envs(envsim::EnvFactory factory) {
  const auto& cfg = state_.config;
  // Environments resume from fresh episodes; the seed advances with the update count.
  const std::uint64_t env_seed = cfg.seed * 1000003ull + static_cast<std::uint64_t>(state_.updates) * 65537ull;
  envs_ = std::make_unique<envsim::VecEnv>(factory, cfg.num_envs, env_seed);
  envs_->reset();
  buffer_ = rl::RolloutBuffer(cfg.num_envs, cfg.horizon);
  running_return_.assign(static_cast<std::size_t>(cfg.num_envs), 0.0);
}

std::uint64_t Trainer::current_cpg_hash() const { return cpg_agent_ ? cpg_agent_->policy_hash() : 0; }

void Trainer::numerical_failure(const std::string& what, const std::string& where) {
  throw NumericalError(what, where);
}

void Trainer::dump_state(const std::string& what, const std::string& where) {
  std::string msg = what + " during update " + std::to_string(state_.updates + 1);
  if (!dump_dir_.empty()) {
    std::filesystem::create_directories(dump_dir_);
    try {
      save_bundle(dump_dir_ / "nan_dump.eqpb", state_);
    } catch (const std::exception&) {
      // Parameters may be unusable; the rollout dump below still helps.
    }
    std::ofstream csv(dump_dir_ / "nan_dump_rollout.csv");
    buffer_.write_csv(csv);
    msg += "; state dumped to " + dump_dir_.string();
  }
  throw NumericalError(msg, where);
}

void Trainer::collect_rollout(UpdateMetrics& m) {
  const auto& cfg = state_.config;
  const int n = cfg.num_envs;
  const int act_dim = envs_->action_dim();
  Agent& agent = *state_.agent;
  buffer_.clear();
  rollout_means_.assign(static_cast<std::size_t>(n), {});
  std::normal_distribution<double> normal(0.0, 1.0);
  const RowVectorD sigma = state_.log_sigma.array().exp().matrix();

  MatrixD obs = to_rows(envs_->observations());
  VectorD values = agent.value(state_.preprocessor.transform(obs));
  double reward_sum = 0.0, return_sum = 0.0;

  for (int t = 0; t < cfg.horizon; ++t) {
    const MatrixD x = state_.preprocessor.transform(obs);
    const MatrixD mu = agent.policy_mean(x);
    if (!mu.allFinite()) numerical_failure("non-finite policy output", "policy");
    MatrixD actions(n, act_dim);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < act_dim; ++j) actions(i, j) = mu(i, j) + sigma(j) * normal(rng_);
    const VectorD logp = rl::gaussian_log_prob(actions, mu, state_.log_sigma);

    envsim::VecStep vs = envs_->step(Eigen::MatrixXd(actions));
    const MatrixD next_obs = to_rows(vs.next_obs);
    const VectorD next_values = agent.value(state_.preprocessor.transform(next_obs));
    if (!next_values.allFinite()) numerical_failure("non-finite value output", "value");

    for (int i = 0; i < n; ++i) {
      rl::Transition tr;
      tr.obs = obs.row(i).transpose();
      tr.action = actions.row(i).transpose();
      tr.reward = vs.reward[i];
      tr.log_prob_rollout = logp(i);
      tr.done = vs.done[i];
      tr.fall = vs.fall[i];
      tr.value = values(i);
      tr.next_value = next_values(i);
      buffer_.add(i, std::move(tr));
      rollout_means_[i].push_back(mu.row(i).transpose());
      if (!std::isfinite(vs.reward[i]))
        numerical_failure("non-finite reward from environment " + std::to_string(i), "environment");
      reward_sum += vs.reward[i];
      running_return_[i] += vs.reward[i];
      if (vs.fault[i]) ++m.faults;
      if (vs.done[i]) {
        return_sum += running_return_[i];
        running_return_[i] = 0.0;
        ++m.episodes;
      }
    }

    // Values for the next step: reuse V(s') except where an episode reset.
    obs = to_rows(vs.obs);
    values = next_values;
    std::vector<int> reset_rows;
    for (int i = 0; i < n; ++i)
      if (vs.done[i]) reset_rows.push_back(i);
    if (!reset_rows.empty()) {
      MatrixD r(static_cast<Eigen::Index>(reset_rows.size()), obs.cols());
      for (std::size_t k = 0; k < reset_rows.size(); ++k) r.row(k) = obs.row(reset_rows[k]);
      const VectorD rv = agent.value(state_.preprocessor.transform(r));
      for (std::size_t k = 0; k < reset_rows.size(); ++k) values(reset_rows[k]) = rv(k);
    }
  }
  state_.samples += static_cast<long long>(n) * cfg.horizon;
  m.mean_reward = reward_sum / (static_cast<double>(n) * cfg.horizon);
  m.episode_return = m.episodes ? return_sum / m.episodes : 0.0;
}

MatrixD RolloutData::input_rows(const std::vector<int>& rows) const {
  MatrixD out(static_cast<Eigen::Index>(rows.size()), inputs.cols());
  for (std::size_t k = 0; k < rows.size(); ++k) out.row(k) = inputs.row(rows[k]);
  return out;
}

rl::PolicyBatch RolloutData::policy_batch(const std::vector<int>& rows, const RowVectorD& log_sigma) const {
  rl::PolicyBatch b;
  const auto n = static_cast<Eigen::Index>(rows.size());
  b.actions.resize(n, actions.cols());
  b.advantages.resize(n);
  b.log_prob_rollout.resize(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    b.actions.row(k) = actions.row(rows[k]);
    b.advantages(k) = advantages(rows[k]);
    b.log_prob_rollout(k) = log_prob_rollout(rows[k]);
  }
  b.log_sigma = log_sigma;
  return b;
}

RolloutData Trainer::collect(UpdateMetrics& m) {
  const auto& cfg = state_.config;
  collect_rollout(m);

  // Flatten env-major, matching RolloutBuffer::compute_gae.
  const rl::GaeResult g = buffer_.compute_gae(cfg.gamma, cfg.lambda);
  const int total = static_cast<int>(buffer_.size());
  RolloutData d;
  d.raw_obs.resize(total, envs_->obs_dim());
  d.actions.resize(total, envs_->action_dim());
  d.rollout_means.resize(total, envs_->action_dim());
  d.log_prob_rollout.resize(total);
  d.returns.resize(total);
  int row = 0;
  for (int e = 0; e < cfg.num_envs; ++e) {
    const auto& trs = buffer_.env(e);
    for (std::size_t t = 0; t < trs.size(); ++t, ++row) {
      d.raw_obs.row(row) = trs[t].obs.transpose();
      d.actions.row(row) = trs[t].action.transpose();
      d.rollout_means.row(row) = rollout_means_[e][t].transpose();
      d.log_prob_rollout(row) = trs[t].log_prob_rollout;
      d.returns(row) = g.returns[row];
    }
  }
  d.inputs = state_.preprocessor.transform(d.raw_obs);
  const std::vector<double> adv = rl::normalize_advantages(g.advantages);
  d.advantages = Eigen::Map<const VectorD>(adv.data(), total);
  return d;
}

UpdateMetrics Trainer::update() {
  try {
    return update_impl();
  } catch (const NumericalError& e) {
    dump_state(e.what(), e.where());
  }
}

UpdateMetrics Trainer::update_impl() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto& cfg = state_.config;
  Agent& agent = *state_.agent;
  UpdateMetrics m;
  RolloutData data = collect(m);
  state_.preprocessor.update(data.raw_obs);
  const MatrixD& x = data.inputs;
  const int total = data.size();

  const auto snapshot = agent.snapshot_policy();
  const std::uint64_t snap_hash = agent.policy_hash();
  const RowVectorD log_sigma_snap = state_.log_sigma;
  const rl::Adam logstd_opt_snap = state_.logstd_opt;

  const double fraction =
      cfg.max_training_samples > 0 ? static_cast<double>(state_.samples) / cfg.max_training_samples : 1.0;
  m.entropy_target = cfg.entropy_target(fraction);

  std::vector<int> perm(static_cast<std::size_t>(total));
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<int> conv_steps;
  const int mb_size = total / cfg.minibatches;
  auto minibatch_indices = [&](int k) {
    const int begin = k * mb_size;
    const int end = k + 1 == cfg.minibatches ? total : begin + mb_size;
    return std::vector<int>(perm.begin() + begin, perm.begin() + end);
  };

  double kl = 0.0;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::shuffle(perm.begin(), perm.end(), rng_);
    for (int k = 0; k < cfg.minibatches; ++k) {
      const auto rows = minibatch_indices(k);
      const rl::PolicyBatch batch = data.policy_batch(rows, state_.log_sigma);
      PolicyStepResult res = agent.policy_step(data.input_rows(rows), batch, cfg.clip);
      conv_steps.insert(conv_steps.end(), res.steps_to_convergence.begin(), res.steps_to_convergence.end());
      const RowVectorD grad =
          rl::logstd_update(res.mu_free, batch, cfg.clip.epsilon, cfg.k_entropy, m.entropy_target);
      VectorD ls = state_.log_sigma.transpose();
      state_.logstd_opt.step(ls, grad.transpose());
      state_.log_sigma = ls.transpose();
    }
    ++m.epochs_run;
    kl = rl::analytic_kl(agent.policy_mean(x), data.rollout_means, state_.log_sigma);
    if (!std::isfinite(kl) || !state_.log_sigma.allFinite()) numerical_failure("non-finite KL or log-std", "policy");
    if (kl > cfg.kl_stop) break;
  }
  m.kl = kl;

  double mse_sum = 0.0;
  int mse_count = 0;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::shuffle(perm.begin(), perm.end(), rng_);
    for (int k = 0; k < cfg.minibatches; ++k) {
      const auto rows = minibatch_indices(k);
      VectorD rb(static_cast<Eigen::Index>(rows.size()));
      for (std::size_t i = 0; i < rows.size(); ++i) rb(i) = data.returns(rows[i]);
      const double mse = agent.value_step(data.input_rows(rows), rb);
      if (!std::isfinite(mse)) numerical_failure("non-finite value loss", "value");
      if (epoch == 0) {
        mse_sum += mse;
        ++mse_count;
      }
    }
  }
  m.value_mse = mse_count ? mse_sum / mse_count : 0.0;

  const SafeguardDecision d = kl_safeguard(kl, agent.policy_lr(), cfg);
  if (d.rollback) {
    agent.restore_policy(snapshot);
    state_.log_sigma = log_sigma_snap;
    state_.logstd_opt = logstd_opt_snap;
    ++state_.rollbacks;
    m.rolled_back = true;
    m.rollback_verified = agent.policy_hash() == snap_hash && state_.log_sigma == log_sigma_snap;
  }
  agent.set_policy_lr(d.lr);
  if (!agent.finite()) numerical_failure("non-finite network parameters", "parameters");

  m.steps_mean = mean_of(conv_steps, &m.pct_converged);
  if (auto* ep = dynamic_cast<const EpAgent*>(&agent); ep && cfg.conv_probe_samples > 0) {
    const int n = std::min(cfg.conv_probe_samples, total);
    MatrixD probe_x(n, x.cols());
    for (int i = 0; i < n; ++i) probe_x.row(i) = x.row(static_cast<Eigen::Index>(i) * total / n);
    const auto probe = ep->probe_convergence(probe_x, cfg.conv_probe_steps);
    m.probe_steps_mean = mean_of(probe, &m.probe_pct_converged);
  }

  last_data_ = std::move(data);
  ++state_.updates;
  state_.rng_state = rng_to_string(rng_);
  m.update = state_.updates;
  m.samples = state_.samples;
  m.lr_policy = agent.policy_lr();
  m.entropy = rl::gaussian_entropy(state_.log_sigma);
  m.rollbacks = state_.rollbacks;
  m.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return m;
}

std::vector<UpdateMetrics> Trainer::train(const std::function<void(const UpdateMetrics&)>& on_update) {
  std::vector<UpdateMetrics> rows;
  while (!finished()) {
    rows.push_back(update());
    if (on_update) on_update(rows.back());
  }
  return rows;
}

}  // namespace eqppo::harness
