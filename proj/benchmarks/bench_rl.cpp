#include <benchmark/benchmark.h>

#include <random>

#include "eqppo/envsim/env.hpp"
#include "eqppo/envsim/locomotion.hpp"
#include "eqppo/envsim/velocity_tracking.hpp"
#include "eqppo/rl/gae.hpp"
#include "eqppo/rl/preprocess.hpp"

using namespace eqppo;

namespace {

void BM_Gae(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::bernoulli_distribution done(0.01);
  std::vector<rl::Transition> ep(static_cast<std::size_t>(n));
  for (auto& t : ep) {
    t.reward = u(rng);
    t.value = u(rng);
    t.next_value = u(rng);
    t.done = done(rng);
  }
  for (auto _ : state) {
    auto r = rl::gae(ep, 0.99, 0.95);
    benchmark::DoNotOptimize(r.advantages.data());
  }
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_Gae)->Arg(128)->Arg(4096);

void BM_LocomotionVecStep(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  envsim::LocomotionConfig cfg;
  envsim::EnvFactory factory = [cfg](int, std::uint64_t seed) {
    return std::make_unique<envsim::LocomotionEnv>(cfg, seed);
  };
  envsim::VecEnv envs(factory, n, 7);
  envs.reset();
  const Eigen::MatrixXd actions = Eigen::MatrixXd::Zero(n, envs.action_dim());
  for (auto _ : state) {
    auto s = envs.step(actions);
    benchmark::DoNotOptimize(s.reward.data());
  }
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_LocomotionVecStep)->Arg(1)->Arg(16);

void BM_VelocityVecStep(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  envsim::EnvFactory factory = [](int, std::uint64_t seed) {
    return std::make_unique<envsim::VelocityTrackingEnv>(envsim::VelocityTrackingParams{}, seed);
  };
  envsim::VecEnv envs(factory, n, 7);
  envs.reset();
  const Eigen::MatrixXd actions = Eigen::MatrixXd::Zero(n, envs.action_dim());
  for (auto _ : state) {
    auto s = envs.step(actions);
    benchmark::DoNotOptimize(s.reward.data());
  }
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_VelocityVecStep)->Arg(16);

void BM_IdctExpand(benchmark::State& state) {
  const int out = static_cast<int>(state.range(0));
  rl::IdctExpander idct(envsim::kCpgObsDim, out);
  std::mt19937_64 rng(3);
  std::normal_distribution<double> n01(0.0, 1.0);
  MatrixD x(256, envsim::kCpgObsDim);
  for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = n01(rng);
  for (auto _ : state) {
    MatrixD y = idct.expand(x);
    benchmark::DoNotOptimize(y.data());
  }
  state.SetItemsProcessed(state.iterations() * 256);
}
BENCHMARK(BM_IdctExpand)->Arg(96)->Arg(1024);

}  // namespace
