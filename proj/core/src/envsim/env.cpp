#include "eqppo/envsim/env.hpp"

#include "eqppo/common/errors.hpp"

namespace eqppo::envsim {

std::uint64_t env_seed(std::uint64_t global_seed, int index) {
  return global_seed + static_cast<std::uint64_t>(index);
}

VecEnv::VecEnv(const EnvFactory& factory, int num_envs, std::uint64_t global_seed) {
  if (num_envs <= 0) throw ConfigError("number of environments must be positive");
  for (int i = 0; i < num_envs; ++i) envs_.push_back(factory(i, env_seed(global_seed, i)));
  for (const auto& e : envs_)
    if (e->obs_dim() != envs_.front()->obs_dim() || e->action_dim() != envs_.front()->action_dim())
      throw ConfigError("environments in a VecEnv must share dimensions");
  obs_ = Eigen::MatrixXd::Zero(num_envs, obs_dim());
}

const Eigen::MatrixXd& VecEnv::reset() {
  for (int i = 0; i < size(); ++i) {
    auto o = envs_[i]->reset();
    obs_.row(i) = Eigen::Map<const Eigen::RowVectorXd>(o.data(), static_cast<Eigen::Index>(o.size()));
  }
  return obs_;
}

VecStep VecEnv::step(const Eigen::MatrixXd& actions) {
  const int n = size();
  if (actions.rows() != n || actions.cols() != action_dim()) throw ContractError("action batch has the wrong shape");
  VecStep out;
  out.next_obs.resize(n, obs_dim());
  out.reward.resize(n);
  out.done.resize(n);
  out.fall.resize(n);
  out.fault.resize(n);
  std::vector<double> a(static_cast<std::size_t>(action_dim()));
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < action_dim(); ++k) a[k] = actions(i, k);
    StepResult r = envs_[i]->step(a);
    out.next_obs.row(i) = Eigen::Map<const Eigen::RowVectorXd>(r.obs.data(), static_cast<Eigen::Index>(r.obs.size()));
    out.reward[i] = r.reward;
    out.done[i] = r.done;
    out.fall[i] = r.fall;
    out.fault[i] = r.fault;
    if (r.done) {
      auto o = envs_[i]->reset();
      obs_.row(i) = Eigen::Map<const Eigen::RowVectorXd>(o.data(), static_cast<Eigen::Index>(o.size()));
    } else {
      obs_.row(i) = out.next_obs.row(i);
    }
  }
  out.obs = obs_;
  return out;
}

}  // namespace eqppo::envsim
