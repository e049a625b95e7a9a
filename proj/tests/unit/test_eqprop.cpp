#include <doctest.h>

#include <sstream>

#include "eqppo/common/errors.hpp"
#include "eqppo/eqprop/checkpoint.hpp"
#include "eqppo/eqprop/three_phase.hpp"
#include "test_nets.hpp"

using namespace eqppo;
using namespace eqppo::eqprop;

namespace {

LayeredEnergyNet<double> hand_net_241() {
  LayeredEnergyNet<double> net;
  net.layer_sizes = {2, 4, 1};
  MatrixD w0(2, 4);
  w0 << 0.4, -0.2, 0.3, 0.6, 0.25, 0.45, -0.35, 0.1;
  MatrixD w1(4, 1);
  w1 << 0.3, -0.25, 0.45, 0.2;
  net.weights = {w0, w1};
  RowVectorD b1(4);
  b1 << 0.2, 0.5, 0.4, -0.1;
  RowVectorD b2(1);
  b2 << 0.05;
  net.biases = {b1, b2};
  return net;
}

}  // namespace

TEST_SUITE("eqprop") {
  TEST_CASE("init_net respects the fan-in bound") {
    const std::vector<int> sizes{1024, 8, 2};
    auto net = init_net<float>(sizes, 0.5, 7);
    CHECK(net.weights[0].rows() == 1024);
    CHECK(net.weights[0].cols() == 8);
    CHECK(net.weights[0].cwiseAbs().maxCoeff() <= 0.015625f);
    CHECK(net.weights[1].cwiseAbs().maxCoeff() <= 0.5f / std::sqrt(8.0f));
    for (const auto& b : net.biases) CHECK(b.isZero());
  }

  TEST_CASE("init_net degenerate scale and determinism") {
    const std::vector<int> sizes{3, 5, 2};
    auto zero = init_net<float>(sizes, 0.0, 1);
    for (const auto& w : zero.weights) CHECK(w.isZero());
    auto a = init_net<float>(sizes, 0.5, 42);
    auto b = init_net<float>(sizes, 0.5, 42);
    CHECK(parameter_hash(a) == parameter_hash(b));
    auto c = init_net<float>(sizes, 0.5, 43);
    CHECK(parameter_hash(a) != parameter_hash(c));
  }

  TEST_CASE("init_net rejects bad layer sizes") {
    const std::vector<int> bad{3, 0, 2};
    CHECK_THROWS_AS(init_net<float>(bad, 0.5, 1), ConfigError);
    const std::vector<int> one{3};
    CHECK_THROWS_AS(init_net<float>(one, 0.5, 1), ConfigError);
  }

  TEST_CASE("single output neuron settles at its bias") {
    const std::vector<int> sizes{1, 1};
    auto net = init_net<double>(sizes, 0.0, 0);
    net.bias(1)[0] = 0.37;
    RelaxConfig rc;
    rc.max_steps = 60;
    rc.eps_ep = 0.5;
    auto s = relax(net, MatrixD(MatrixD::Constant(1, 1, 2.0)), NudgeForce<double>::none(), rc);
    CHECK(s.output()(0, 0) == doctest::Approx(0.37).epsilon(1e-12));
    CHECK(s.steps_to_convergence[0] > 0);
  }

  TEST_CASE("zero beta reproduces the free trajectory") {
    auto net = testing::random_smooth_net({4, 6, 3}, 5);
    MatrixD x = testing::random_batch(7, 4, 6);
    RelaxConfig rc;
    rc.max_steps = 25;
    NudgeForce<double> zero{0.0, [](const MatrixD& xi, int) { return MatrixD(MatrixD::Ones(xi.rows(), xi.cols())); }};
    auto a = relax(net, x, NudgeForce<double>::none(), rc);
    auto b = relax(net, x, zero, rc);
    for (std::size_t l = 0; l < a.states.size(); ++l) CHECK(a.states[l] == b.states[l]);
  }

  TEST_CASE("2-4-1 free equilibrium matches the fixed-point oracle") {
    // Oracle: damped Gauss-Seidel iteration to |dxi| < 1e-12, confirmed by the
    // exact linear solve of the interior fixed point.
    const double hidden[4] = {0.528305785123967, 0.09557851239669421, 0.9599586776859504, 0.3055371900826447};
    const double out = 0.6776859504132232;
    auto net = hand_net_241();
    MatrixD x(1, 2);
    x << 0.5, -0.3;
    RelaxConfig rc;
    rc.max_steps = 200;
    auto s = relax(net, x, NudgeForce<double>::none(), rc);
    for (int i = 0; i < 4; ++i) CHECK(s.states[1](0, i) == doctest::Approx(hidden[i]).epsilon(1e-10));
    CHECK(s.output()(0, 0) == doctest::Approx(out).epsilon(1e-10));
    CHECK(s.steps_to_convergence[0] > 0);
    CHECK(s.step_count[0] == 200);
  }

  TEST_CASE("free equilibrium is a fixed point of one more step") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      auto net = testing::random_smooth_net({5, 8, 8, 3}, seed);
      MatrixD x = testing::random_batch(4, 5, seed + 100);
      RelaxConfig rc;
      rc.max_steps = 100;
      auto s = relax(net, x, NudgeForce<double>::none(), rc);
      auto next = dynamics_step(net, s.states, NudgeForce<double>::none(), rc.eps_ep);
      for (std::size_t l = 1; l < next.size(); ++l) {
        CHECK((next[l] - s.states[l]).cwiseAbs().maxCoeff() < rc.conv_tol);
      }
    }
  }

  TEST_CASE("hidden activations stay in the unit interval at every step") {
    auto net = init_net<double>(std::vector<int>{6, 10, 10, 2}, 3.0, 11);
    MatrixD x = testing::random_batch(8, 6, 12, 3.0);
    std::vector<Matrix<double>> states = initial_state(net, x).states;
    NudgeForce<double> push{0.5, [](const MatrixD& xi, int) { return MatrixD(xi.array() + 1.0); }};
    for (int t = 0; t < 40; ++t) {
      states = dynamics_step(net, states, push, 1.0, t);
      for (int l = 1; l + 1 < net.num_layers(); ++l) {
        MatrixD r = activate(net, l, states[l]);
        CHECK(r.minCoeff() >= 0.0);
        CHECK(r.maxCoeff() <= 1.0);
      }
    }
  }

  TEST_CASE("non-finite states name the offending layer") {
    auto net = init_net<double>(std::vector<int>{2, 3, 1}, 0.5, 1);
    MatrixD x(1, 2);
    x << 1.0, std::numeric_limits<double>::quiet_NaN();
    RelaxConfig rc;
    try {
      relax(net, x, NudgeForce<double>::none(), rc);
      FAIL("expected NumericalError");
    } catch (const NumericalError& e) {
      CHECK(e.where() == "layer 1");
    }
  }

  TEST_CASE("early exit freezes converged samples and records step counts") {
    auto net = testing::random_smooth_net({3, 5, 2}, 21);
    MatrixD x = testing::random_batch(6, 3, 22);
    RelaxConfig rc;
    rc.max_steps = 200;
    rc.early_exit = true;
    auto s = relax(net, x, NudgeForce<double>::none(), rc);
    for (int i = 0; i < 6; ++i) {
      CHECK(s.steps_to_convergence[i] > 0);
      CHECK(s.step_count[i] == s.steps_to_convergence[i]);
      CHECK(s.step_count[i] <= rc.max_steps);
    }
    rc.early_exit = false;
    auto full = relax(net, x, NudgeForce<double>::none(), rc);
    CHECK((full.output() - s.output()).cwiseAbs().maxCoeff() < 1e-3);
  }

  TEST_CASE("estimate_grads hand example") {
    LayeredEnergyNet<double> net;
    net.layer_sizes = {1, 1, 1};
    net.weights = {MatrixD::Zero(1, 1), MatrixD::Zero(1, 1)};
    net.biases = {RowVectorD::Zero(1), RowVectorD::Zero(1)};
    RelaxationState<double> plus = initial_state(net, MatrixD(MatrixD::Zero(1, 1)));
    RelaxationState<double> minus = plus;
    plus.states[1](0, 0) = 0.6;
    plus.states[2](0, 0) = 0.5;
    minus.states[1](0, 0) = 0.4;
    minus.states[2](0, 0) = 0.5;
    auto g = estimate_grads(net, plus, minus, 0.1);
    CHECK(g.weights[1](0, 0) == doctest::Approx(0.5));
    CHECK(g.biases[0][0] == doctest::Approx(1.0));
    CHECK(g.biases[1][0] == doctest::Approx(0.0));
    auto same = estimate_grads(net, plus, plus, 0.1);
    CHECK(same.flatten().isZero());
  }

  TEST_CASE("estimate_grads rejects mismatched states") {
    auto net = init_net<double>(std::vector<int>{2, 3, 1}, 0.5, 1);
    auto a = initial_state(net, MatrixD(MatrixD::Zero(2, 2)));
    auto b = initial_state(net, MatrixD(MatrixD::Zero(3, 2)));
    CHECK_THROWS_AS(estimate_grads(net, a, b, 0.1), ContractError);
    CHECK_THROWS_AS(estimate_grads(net, a, a, 0.0), ContractError);
  }

  TEST_CASE("EP gradients agree with finite differences of the equilibrium loss") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      auto net = testing::random_smooth_net({3, 6, 2}, seed);
      MatrixD x = testing::random_batch(4, 3, seed + 50);
      MatrixD y = testing::random_batch(4, 2, seed + 51);
      VectorD fd = testing::fd_equilibrium_grad(net, x, y, 150);
      VectorD ep = testing::ep_quadratic_grad(net, x, y, 0.1, 150);
      CHECK(oracle::cosine_similarity(ep, fd) > 0.99);
    }
  }

  TEST_CASE("symmetric estimate bias shrinks quadratically in beta") {
    int checked = 0;
    for (std::uint64_t seed = 0; seed < 8; ++seed) {
      auto net = testing::random_smooth_net({3, 5, 2}, seed + 300, 0.6);
      MatrixD x = testing::random_batch(3, 3, seed + 400);
      MatrixD y = testing::random_batch(3, 2, seed + 401);
      VectorD fd = testing::fd_equilibrium_grad(net, x, y, 300);
      const double d1 = (testing::ep_quadratic_grad(net, x, y, 0.2, 300) - fd).norm();
      const double d2 = (testing::ep_quadratic_grad(net, x, y, 0.1, 300) - fd).norm();
      if (d2 < 1e-7) continue;  // bias below the finite-difference noise floor
      const double ratio = d1 / d2;
      CHECK(ratio > 2.0);
      CHECK(ratio < 6.0);
      ++checked;
    }
    CHECK(checked >= 4);
  }

  TEST_CASE("gradients are bit-identical for fixed seed and inputs") {
    auto net = init_net<float>(std::vector<int>{4, 8, 2}, 0.5, 9);
    MatrixF x = testing::random_batch(5, 4, 10).cast<float>();
    MatrixF y = testing::random_batch(5, 2, 11).cast<float>();
    ThreePhaseConfig cfg;
    auto a = three_phase(net, x, quadratic_loss(y), cfg).grads.flatten();
    auto b = three_phase(net, x, quadratic_loss(y), cfg).grads.flatten();
    CHECK(a == b);
  }

  TEST_CASE("zero nudge leaves the equilibrium and yields zero grads") {
    auto net = init_net<float>(std::vector<int>{4, 8, 2}, 0.5, 9);
    MatrixF x = testing::random_batch(5, 4, 10).cast<float>();
    LossGradientFactory<float> none = [](const MatrixF&, double) -> LossGradient<float> {
      return [](const MatrixF& xi, int) { return MatrixF(MatrixF::Zero(xi.rows(), xi.cols())); };
    };
    ThreePhaseConfig cfg;
    auto r = three_phase(net, x, none, cfg);
    CHECK(r.grads.flatten().isZero());
    for (std::size_t l = 0; l < r.free_state.states.size(); ++l) {
      CHECK(r.plus_state.states[l].isApprox(r.free_state.states[l], 1e-5f));
    }
  }

  TEST_CASE("regression by three-phase SGD lowers the training error") {
    auto net = init_net<float>(std::vector<int>{2, 16, 1}, 0.5, 3);
    MatrixF x = testing::random_batch(32, 2, 4).cast<float>();
    MatrixF y(32, 1);
    for (int i = 0; i < 32; ++i) y(i, 0) = 0.5f * x(i, 0) - 0.3f * x(i, 1) + 0.2f;
    ThreePhaseConfig cfg;
    RelaxConfig rc;
    auto mse = [&] { return (infer(net, x, rc) - y).squaredNorm() / 32.0f; };
    std::vector<float> curve;
    for (int it = 0; it < 200; ++it) {
      auto r = three_phase(net, x, quadratic_loss(y), cfg);
      for (std::size_t l = 0; l < net.weights.size(); ++l) net.weights[l] -= 0.2f * r.grads.weights[l];
      for (std::size_t l = 0; l < net.biases.size(); ++l) net.biases[l] -= 0.2f * r.grads.biases[l];
      if (it % 20 == 0) curve.push_back(mse());
    }
    curve.push_back(mse());
    CHECK(curve.back() < 0.25f * curve.front());
    int decreases = 0;
    for (std::size_t i = 1; i < curve.size(); ++i) decreases += curve[i] < curve[i - 1];
    CHECK(decreases >= static_cast<int>(curve.size()) - 2);
  }

  TEST_CASE("checkpoint round trip is exact") {
    auto net = init_net<float>(std::vector<int>{6, 9, 3}, 0.5, 77);
    net.bias(1)[2] = 0.125f;
    std::stringstream buf;
    write_net(buf, net);
    auto back = read_net(buf);
    CHECK(back.layer_sizes == net.layer_sizes);
    CHECK(back.seed == 77);
    CHECK(parameter_hash(back) == parameter_hash(net));

    std::stringstream bad("XXXX");
    CHECK_THROWS_AS(read_net(bad), FormatError);
  }
}
