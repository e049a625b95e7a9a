#include "eqppo/rl/gae.hpp"

#include <ostream>

#include "eqppo/common/errors.hpp"

namespace eqppo::rl {

GaeResult gae(std::span<const Transition> tr, double gamma, double lambda) {
  if (tr.empty()) throw ContractError("gae over an empty sequence");
  const std::size_t n = tr.size();
  GaeResult res;
  res.advantages.assign(n, 0.0);
  res.returns.assign(n, 0.0);
  double next_adv = 0.0;
  for (std::size_t i = n; i-- > 0;) {
    const Transition& t = tr[i];
    const double bootstrap = t.fall ? 0.0 : gamma * t.next_value;
    const double delta = t.reward + bootstrap - t.value;
    const double carry = t.done ? 0.0 : gamma * lambda * next_adv;
    res.advantages[i] = delta + carry;
    res.returns[i] = res.advantages[i] + t.value;
    next_adv = res.advantages[i];
  }
  return res;
}

RolloutBuffer::RolloutBuffer(int num_envs, int horizon)
    : num_envs_(num_envs), horizon_(horizon), data_(static_cast<std::size_t>(num_envs)) {
  if (num_envs <= 0 || horizon <= 0) throw ConfigError("rollout buffer needs positive env count and horizon");
  for (auto& d : data_) d.reserve(static_cast<std::size_t>(horizon));
}

void RolloutBuffer::clear() {
  for (auto& d : data_) d.clear();
}

void RolloutBuffer::add(int env, Transition tr) {
  auto& d = data_.at(static_cast<std::size_t>(env));
  if (static_cast<int>(d.size()) >= horizon_) throw ContractError("rollout buffer overflow");
  d.push_back(std::move(tr));
}

std::size_t RolloutBuffer::size() const {
  std::size_t n = 0;
  for (const auto& d : data_) n += d.size();
  return n;
}

bool RolloutBuffer::full() const { return size() == static_cast<std::size_t>(num_envs_) * horizon_; }

GaeResult RolloutBuffer::compute_gae(double gamma, double lambda) const {
  GaeResult all;
  for (const auto& d : data_) {
    GaeResult r = gae(d, gamma, lambda);
    all.advantages.insert(all.advantages.end(), r.advantages.begin(), r.advantages.end());
    all.returns.insert(all.returns.end(), r.returns.begin(), r.returns.end());
  }
  return all;
}

void RolloutBuffer::write_csv(std::ostream& out) const {
  if (size() == 0) return;
  const auto& first = data_.front().empty() ? data_.back().front() : data_.front().front();
  out << "env,t,reward,log_prob_rollout,done,fall,value,next_value";
  for (Eigen::Index i = 0; i < first.obs.size(); ++i) out << ",obs_" << i;
  for (Eigen::Index i = 0; i < first.action.size(); ++i) out << ",action_" << i;
  out << '\n';
  for (std::size_t e = 0; e < data_.size(); ++e) {
    for (std::size_t t = 0; t < data_[e].size(); ++t) {
      const auto& tr = data_[e][t];
      out << e << ',' << t << ',' << tr.reward << ',' << tr.log_prob_rollout << ',' << tr.done << ',' << tr.fall << ','
          << tr.value << ',' << tr.next_value;
      for (Eigen::Index i = 0; i < tr.obs.size(); ++i) out << ',' << tr.obs[i];
      for (Eigen::Index i = 0; i < tr.action.size(); ++i) out << ',' << tr.action[i];
      out << '\n';
    }
  }
}

}  // namespace eqppo::rl
