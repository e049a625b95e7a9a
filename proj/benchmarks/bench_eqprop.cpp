#include <benchmark/benchmark.h>

#include <random>

#include "eqppo/eqprop/energy_net.hpp"
#include "eqppo/eqprop/relaxation.hpp"
#include "eqppo/eqprop/three_phase.hpp"
#include "eqppo/oracle/bptt.hpp"

using namespace eqppo;

namespace {

MatrixF random_input(int rows, int cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<float> n01(0.0f, 1.0f);
  MatrixF x(rows, cols);
  for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = n01(rng);
  return x;
}

// args: input width (iDCT size), hidden width, batch
void BM_FreeRelaxation(benchmark::State& state) {
  const int in = static_cast<int>(state.range(0)), hid = static_cast<int>(state.range(1));
  const int batch = static_cast<int>(state.range(2));
  const std::vector<int> sizes{in, hid, hid, 12};
  const auto net = eqprop::init_net<float>(sizes, 0.5, 1);
  const MatrixF x = random_input(batch, in, 2);
  eqprop::RelaxConfig rc;
  rc.max_steps = 30;
  for (auto _ : state) {
    auto st = eqprop::relax(net, x, eqprop::NudgeForce<float>::none(), rc);
    benchmark::DoNotOptimize(st.output().data());
  }
  state.SetItemsProcessed(state.iterations() * batch);
}
BENCHMARK(BM_FreeRelaxation)->Args({32, 32, 512})->Args({96, 64, 512})->Args({1024, 768, 64});

void BM_ThreePhase(benchmark::State& state) {
  const int in = static_cast<int>(state.range(0)), hid = static_cast<int>(state.range(1));
  const int batch = static_cast<int>(state.range(2));
  const std::vector<int> sizes{in, hid, hid, 12};
  const auto net = eqprop::init_net<float>(sizes, 0.5, 1);
  const MatrixF x = random_input(batch, in, 2);
  const MatrixF y = random_input(batch, 12, 3);
  const auto loss = eqprop::quadratic_loss<float>(y);
  const eqprop::ThreePhaseConfig cfg;
  for (auto _ : state) {
    auto r = eqprop::three_phase(net, x, loss, cfg);
    benchmark::DoNotOptimize(r.grads.weights.front().data());
  }
  state.SetItemsProcessed(state.iterations() * batch);
}
BENCHMARK(BM_ThreePhase)->Args({32, 32, 512})->Args({96, 64, 512})->Args({1024, 768, 64});

// Reference cost of the same gradient by reverse mode through 30 stored steps.
void BM_Bptt(benchmark::State& state) {
  const int in = static_cast<int>(state.range(0)), hid = static_cast<int>(state.range(1));
  const int batch = static_cast<int>(state.range(2));
  const std::vector<int> sizes{in, hid, hid, 12};
  const auto net = eqprop::init_net<double>(sizes, 0.5, 1);
  const MatrixD x = random_input(batch, in, 2).cast<double>();
  const MatrixD y = random_input(batch, 12, 3).cast<double>();
  const oracle::OutputLossGrad grad = [&](const MatrixD& out) -> MatrixD { return out - y; };
  for (auto _ : state) {
    auto g = oracle::bptt_equilibrium_grad(net, x, grad, 30);
    benchmark::DoNotOptimize(g.weights.front().data());
  }
  state.SetItemsProcessed(state.iterations() * batch);
}
BENCHMARK(BM_Bptt)->Args({32, 32, 512})->Args({96, 64, 512});

}  // namespace
