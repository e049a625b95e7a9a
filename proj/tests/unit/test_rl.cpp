#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "eqppo/common/errors.hpp"
#include "eqppo/eqprop/three_phase.hpp"
#include "eqppo/rl/clip.hpp"
#include "eqppo/rl/gae.hpp"
#include "eqppo/rl/gaussian.hpp"
#include "eqppo/rl/logstd.hpp"
#include "eqppo/rl/optim.hpp"
#include "eqppo/rl/preprocess.hpp"
#include "test_nets.hpp"

using namespace eqppo;
using namespace eqppo::rl;

namespace {

std::vector<Transition> random_episode(int n, std::mt19937_64& rng, double p_done, double p_fall) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::bernoulli_distribution done(p_done), fall(p_fall);
  std::vector<Transition> ep(static_cast<std::size_t>(n));
  for (auto& t : ep) {
    t.reward = u(rng);
    t.value = u(rng);
    t.next_value = u(rng);
    t.done = done(rng);
    t.fall = t.done && fall(rng);
  }
  return ep;
}

// Direct double sum: A_t = sum_k (gamma lambda)^k [no done in t..t+k-1] delta_{t+k}.
std::vector<double> brute_force_gae(const std::vector<Transition>& ep, double gamma, double lambda) {
  const std::size_t n = ep.size();
  std::vector<double> adv(n, 0.0);
  for (std::size_t t = 0; t < n; ++t) {
    double weight = 1.0;
    for (std::size_t k = t; k < n; ++k) {
      const double delta = ep[k].reward + (ep[k].fall ? 0.0 : gamma * ep[k].next_value) - ep[k].value;
      adv[t] += weight * delta;
      if (ep[k].done) break;
      weight *= gamma * lambda;
    }
  }
  return adv;
}

// Forward orthonormal DCT-II evaluated term by term.
VectorD dct2(const VectorD& x) {
  const int n = static_cast<int>(x.size());
  VectorD out(n);
  for (int k = 0; k < n; ++k) {
    double s = 0.0;
    for (int j = 0; j < n; ++j) s += x[j] * std::cos(std::numbers::pi * (j + 0.5) * k / n);
    out[k] = s * (k == 0 ? std::sqrt(1.0 / n) : std::sqrt(2.0 / n));
  }
  return out;
}

PolicyBatch one_sample(double a, double adv, double log_sigma, double log_prob_rollout) {
  PolicyBatch b;
  b.actions = MatrixD::Constant(1, 1, a);
  b.advantages = VectorD::Constant(1, adv);
  b.log_prob_rollout = VectorD::Constant(1, log_prob_rollout);
  b.log_sigma = RowVectorD::Constant(1, log_sigma);
  return b;
}

}  // namespace

TEST_SUITE("rl") {
  TEST_CASE("gae single falling step") {
    std::vector<Transition> ep(1);
    ep[0].reward = 1.0;
    ep[0].done = ep[0].fall = true;
    auto r = gae(ep, 0.99, 0.95);
    CHECK(r.advantages[0] == doctest::Approx(1.0));
    CHECK(r.returns[0] == doctest::Approx(1.0));
    CHECK_THROWS_AS(gae(std::span<const Transition>{}, 0.99, 0.95), ContractError);
  }

  TEST_CASE("gae timeout keeps the bootstrap") {
    std::vector<Transition> ep(1);
    ep[0].reward = 1.0;
    ep[0].next_value = 2.0;
    ep[0].done = true;
    CHECK(gae(ep, 0.5, 0.95).advantages[0] == doctest::Approx(2.0));
  }

  TEST_CASE("gae lambda=1 telescopes to discounted return") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const int n = 12;
    const double gamma = 0.97;
    std::vector<Transition> ep(n);
    std::vector<double> v(n + 1);
    for (auto& x : v) x = u(rng);
    for (int t = 0; t < n; ++t) {
      ep[t].reward = u(rng);
      ep[t].value = v[t];
      ep[t].next_value = v[t + 1];
    }
    auto r = gae(ep, gamma, 1.0);
    for (int t = 0; t < n; ++t) {
      double expect = -v[t];
      for (int k = 0; t + k < n; ++k) expect += std::pow(gamma, k) * ep[t + k].reward;
      expect += std::pow(gamma, n - t) * v[n];
      CHECK(r.advantages[t] == doctest::Approx(expect).epsilon(1e-12));
    }
  }

  TEST_CASE("gae lambda=0 is the one-step TD error") {
    std::mt19937_64 rng(4);
    auto ep = random_episode(20, rng, 0.2, 0.5);
    auto r = gae(ep, 0.99, 0.0);
    for (std::size_t t = 0; t < ep.size(); ++t) {
      const double delta = ep[t].reward + (ep[t].fall ? 0.0 : 0.99 * ep[t].next_value) - ep[t].value;
      CHECK(r.advantages[t] == delta);
    }
  }

  TEST_CASE("gae matches the brute-force double sum") {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 200; ++trial) {
      auto ep = random_episode(10, rng, 0.15, 0.5);
      auto r = gae(ep, 0.99, 0.95);
      auto ref = brute_force_gae(ep, 0.99, 0.95);
      for (std::size_t t = 0; t < ep.size(); ++t) CHECK(std::abs(r.advantages[t] - ref[t]) < 1e-10);
    }
  }

  TEST_CASE("rollout buffer flattens env-major and dumps csv") {
    RolloutBuffer buf(2, 3);
    for (int e = 0; e < 2; ++e) {
      for (int t = 0; t < 3; ++t) {
        Transition tr;
        tr.obs = VectorD::Constant(2, e);
        tr.action = VectorD::Constant(1, t);
        tr.reward = 1.0;
        buf.add(e, tr);
      }
    }
    CHECK(buf.full());
    CHECK_THROWS_AS(buf.add(0, Transition{}), ContractError);
    auto r = buf.compute_gae(1.0, 1.0);
    REQUIRE(r.advantages.size() == 6);
    CHECK(r.advantages[0] == doctest::Approx(3.0));
    CHECK(r.advantages[3] == doctest::Approx(3.0));
    std::ostringstream csv;
    buf.write_csv(csv);
    CHECK(csv.str().rfind("env,t,reward,log_prob_rollout,done,fall,value,next_value,obs_0,obs_1,action_0\n", 0) == 0);
  }

  TEST_CASE("nudging ratio hand values") {
    const double lp0 = -0.5 * std::log(2.0 * std::numbers::pi);
    CHECK(lp0 == doctest::Approx(-0.9189).epsilon(1e-4));
    auto r = nudging_ratio(MatrixD::Constant(1, 1, 1.0), MatrixD::Zero(1, 1), RowVectorD::Zero(1),
                           VectorD::Constant(1, lp0));
    CHECK(r[0] == doctest::Approx(std::exp(-0.5)).epsilon(1e-12));
    auto same = nudging_ratio(MatrixD::Constant(1, 1, 0.3), MatrixD::Constant(1, 1, -0.2), RowVectorD::Zero(1),
                              gaussian_log_prob(MatrixD::Constant(1, 1, -0.2), MatrixD::Constant(1, 1, 0.3),
                                                RowVectorD::Zero(1)));
    CHECK(same[0] == doctest::Approx(1.0));
    double last = 2.0;
    for (double xi = 0.0; xi < 5.0; xi += 0.25) {
      auto v = nudging_ratio(MatrixD::Constant(1, 1, xi), MatrixD::Zero(1, 1), RowVectorD::Zero(1),
                             VectorD::Constant(1, lp0));
      CHECK(v[0] < last);
      last = v[0];
    }
  }

  TEST_CASE("ratio reporting clamp does not affect the mask") {
    VectorD lr = log_nudging_ratio(MatrixD::Constant(1, 1, 40.0), MatrixD::Zero(1, 1), RowVectorD::Zero(1),
                                   VectorD::Zero(1));
    CHECK(lr[0] < std::log(1e-30));
    CHECK(nudging_ratio(MatrixD::Constant(1, 1, 40.0), MatrixD::Zero(1, 1), RowVectorD::Zero(1), VectorD::Zero(1))[0] ==
          doctest::Approx(1e-30));
  }

  TEST_CASE("two-sided mask membership") {
    ClipConfig cfg;  // eps 0.2, eps_rev 0.7
    CHECK(two_sided_mask(std::log(1.0), 1.0, cfg));
    CHECK_FALSE(two_sided_mask(std::log(1.5), 1.0, cfg));
    CHECK_FALSE(two_sided_mask(std::log(0.25), 1.0, cfg));
    CHECK(two_sided_mask(std::log(0.35), 1.0, cfg));
    CHECK(two_sided_mask(std::log(1.6), -1.0, cfg));
    CHECK_FALSE(two_sided_mask(std::log(0.75), -1.0, cfg));
    CHECK_FALSE(two_sided_mask(std::log(1.75), -1.0, cfg));
    ClipConfig legacy = cfg;
    legacy.epsilon_rev = std::numeric_limits<double>::infinity();
    CHECK(two_sided_mask(-200.0, 1.0, legacy));
  }

  TEST_CASE("policy force zero outside the two-sided window") {
    ClipConfig cfg;
    std::mt19937_64 rng(8);
    std::normal_distribution<double> n01(0.0, 1.0);
    std::uniform_real_distribution<double> ls(-1.0, 0.5);
    int open = 0, closed = 0;
    for (int trial = 0; trial < 10000; ++trial) {
      const int d = 3;
      MatrixD a(1, d), mu(1, d), xi(1, d);
      RowVectorD log_sigma(d);
      for (int i = 0; i < d; ++i) {
        log_sigma[i] = ls(rng);
        mu(0, i) = n01(rng);
        a(0, i) = mu(0, i) + std::exp(log_sigma[i]) * n01(rng);
        xi(0, i) = mu(0, i) + 0.8 * n01(rng);
      }
      VectorD lp = gaussian_log_prob(a, mu, log_sigma);
      VectorD adv = VectorD::Constant(1, 2.0 * n01(rng));
      const double r = std::exp(log_nudging_ratio(xi, a, log_sigma, lp)[0]);
      const bool inside = adv[0] >= 0.0 ? (r > 0.3 && r < 1.2) : (r > 0.8 && r < 1.7);
      MatrixD f = policy_nudge_force(xi, a, adv, log_sigma, lp, cfg, 1.0, 1.0);
      if (!inside) {
        CHECK(f.isZero(0.0));
        ++closed;
      } else {
        const MatrixD expect = (-cfg.beta_ep * adv[0]) * ((a - xi).array().rowwise() * (-log_sigma.array()).exp()).matrix();
        CHECK((f - expect).cwiseAbs().maxCoeff() < 1e-12);
        ++open;
      }
      if (adv[0] > 0.0 && r <= 0.3) CHECK(f.isZero(0.0));
    }
    CHECK(open > 100);
    CHECK(closed > 100);
  }

  TEST_CASE("policy force basics") {
    ClipConfig cfg;
    auto b = one_sample(0.5, 0.0, 0.0, gaussian_log_prob(MatrixD::Constant(1, 1, 0.5), MatrixD::Zero(1, 1),
                                                          RowVectorD::Zero(1))[0]);
    CHECK(policy_nudge_force(MatrixD::Zero(1, 1), b.actions, b.advantages, b.log_sigma, b.log_prob_rollout, cfg, 1.0,
                             1.0)
              .isZero(0.0));
    // A > 0, r = 1: positive nudge points away from the action, sigma scaling selectable.
    b.advantages[0] = 1.0;
    b.log_sigma[0] = std::log(0.5);
    b.log_prob_rollout = gaussian_log_prob(b.actions, MatrixD::Zero(1, 1), b.log_sigma);
    MatrixD f1 = policy_nudge_force(MatrixD::Zero(1, 1), b.actions, b.advantages, b.log_sigma, b.log_prob_rollout,
                                    cfg, 1.0, 1.0);
    CHECK(f1(0, 0) == doctest::Approx(-0.1 * 0.5 / 0.5));
    cfg.sigma_scaling = SigmaScaling::kInvSigmaSq;
    MatrixD f2 = policy_nudge_force(MatrixD::Zero(1, 1), b.actions, b.advantages, b.log_sigma, b.log_prob_rollout,
                                    cfg, 4.0, -1.0);
    CHECK(f2(0, 0) == doctest::Approx(0.1 * 0.5 / 0.25 / 4.0));
  }

  TEST_CASE("static mask stays constant through the nudge phases") {
    auto net = eqprop::init_net<float>(std::vector<int>{4, 12, 2}, 1.0, 31);
    const int B = 64;
    MatrixF x = testing::random_batch(B, 4, 32).cast<float>();
    eqprop::RelaxConfig rc;
    MatrixD mu = eqprop::infer(net, x, rc).cast<double>();
    std::mt19937_64 rng(33);
    std::normal_distribution<double> n01(0.0, 1.0);
    PolicyBatch b;
    b.log_sigma = RowVectorD::Constant(2, std::log(0.3));
    b.actions = mu + 0.3 * testing::random_batch(B, 2, 34);
    b.advantages.resize(B);
    for (int i = 0; i < B; ++i) b.advantages[i] = 2.0 * n01(rng);
    b.log_prob_rollout = gaussian_log_prob(b.actions, mu, b.log_sigma);

    for (MaskMode mode : {MaskMode::kStatic, MaskMode::kDynamic}) {
      ClipConfig cfg;
      cfg.mask_mode = mode;
      cfg.beta_ep = 1.0;
      std::vector<std::vector<std::uint8_t>> masks;
      auto obs = [&](double beta, int, const VectorD&, const std::vector<std::uint8_t>& m) {
        if (beta > 0) masks.push_back(m);
      };
      eqprop::ThreePhaseConfig tc;
      tc.beta_ep = cfg.beta_ep;
      eqprop::three_phase(net, x, policy_loss(b, cfg, 1.0, obs), tc);
      REQUIRE(masks.size() == static_cast<std::size_t>(tc.steps_pos));
      int flips = 0;
      for (std::size_t s = 1; s < masks.size(); ++s) {
        for (int i = 0; i < B; ++i) flips += masks[s][i] != masks[s - 1][i];
      }
      if (mode == MaskMode::kStatic) CHECK(flips == 0);
      else CHECK(flips > 0);
    }
  }

  TEST_CASE("value force hand values") {
    CHECK(value_nudge_force(MatrixD::Constant(1, 1, 2.0), VectorD::Constant(1, 2.0), 1.0, 0.1).isZero(0.0));
    MatrixD f = value_nudge_force(MatrixD::Constant(1, 1, 1.0), VectorD::Zero(1), 1.0, 0.1);
    CHECK(std::abs(f(0, 0)) == doctest::Approx(0.2));
  }

  TEST_CASE("three-phase value regression reduces error") {
    auto net = eqprop::init_net<float>(std::vector<int>{3, 24, 1}, 0.5, 40);
    const int B = 64;
    MatrixF x = testing::random_batch(B, 3, 41).cast<float>();
    VectorD y(B);
    for (int i = 0; i < B; ++i) y[i] = std::sin(1.5 * x(i, 0)) + 0.5 * x(i, 1) * x(i, 2);
    eqprop::ThreePhaseConfig tc;
    tc.steps_free = 25;
    tc.steps_pos = 15;
    tc.steps_neg = 10;
    eqprop::RelaxConfig rc;
    rc.max_steps = 25;
    auto mse = [&] { return (eqprop::infer(net, x, rc).cast<double>().col(0) - y).squaredNorm() / B; };
    MomentumSgd opt{0.05, 0.9, {}};
    const double before = mse();
    for (int it = 0; it < 100; ++it) {
      auto r = eqprop::three_phase(net, x, value_loss(y, 1.0), tc);
      VectorD p = eqprop::flatten_parameters(net);
      opt.step(p, r.grads.flatten());
      eqprop::assign_parameters(net, p);
    }
    CHECK(mse() < 0.5 * before);
  }

  TEST_CASE("log-std objective and entropy") {
    PolicyBatch b;
    b.log_sigma = RowVectorD::Constant(2, std::log(0.5));
    MatrixD mu = MatrixD::Zero(3, 2);
    b.actions = MatrixD::Constant(3, 2, 0.5);
    b.actions.row(1) *= -1.0;
    b.advantages = VectorD::Constant(3, 1.3);
    b.log_prob_rollout = gaussian_log_prob(b.actions, mu, b.log_sigma);
    CHECK(logstd_objective_grad(mu, b, 0.2).isZero(1e-14));

    RowVectorD ones = RowVectorD::Zero(12);
    CHECK(gaussian_entropy(ones) == doctest::Approx(6.0 * std::log(2.0 * std::numbers::pi * std::numbers::e)));
    CHECK(gaussian_entropy(ones) == doctest::Approx(17.0273).epsilon(1e-5));
    RowVectorD g = entropy_loss_grad(ones, 0.01, 17.03);
    for (int i = 0; i < 12; ++i) CHECK(g[i] == doctest::Approx(2.0 * 0.01 * (gaussian_entropy(ones) - 17.03)));
  }

  TEST_CASE("log-std objective gradient matches finite differences of the surrogate") {
    std::mt19937_64 rng(50);
    std::normal_distribution<double> n01(0.0, 1.0);
    const int B = 16, D = 3;
    PolicyBatch b;
    b.log_sigma = RowVectorD::Constant(D, std::log(0.4));
    MatrixD mu = testing::random_batch(B, D, 51);
    b.actions = mu + 0.4 * testing::random_batch(B, D, 52);
    b.advantages.resize(B);
    for (int i = 0; i < B; ++i) b.advantages[i] = n01(rng);
    b.log_prob_rollout = gaussian_log_prob(b.actions, mu, b.log_sigma);
    // Slightly perturbed sigma so the ratios are away from 1 but inside the masks.
    PolicyBatch cur = b;
    cur.log_sigma.array() += 0.02;
    auto surrogate = [&](const VectorD& ls) {
      PolicyBatch p = cur;
      p.log_sigma = ls.transpose();
      VectorD lr = log_nudging_ratio(mu, p.actions, p.log_sigma, p.log_prob_rollout);
      double j = 0.0;
      for (int t = 0; t < B; ++t) j += std::exp(lr[t]) * p.advantages[t];
      return j / B;
    };
    VectorD fd = oracle::finite_diff_grad(surrogate, cur.log_sigma.transpose(), 1e-6);
    RowVectorD g = logstd_objective_grad(mu, cur, 10.0);  // masks wide open
    CHECK((g.transpose() - fd).norm() < 1e-6 * (1.0 + fd.norm()));
  }

  TEST_CASE("clipped surrogate gradient matches finite differences") {
    const int B = 32, D = 2;
    const double eps = 0.2;
    std::mt19937_64 rng(60);
    std::normal_distribution<double> n01(0.0, 1.0);
    PolicyBatch b;
    b.log_sigma = RowVectorD::Constant(D, std::log(0.5));
    const MatrixD mu_old = testing::random_batch(B, D, 61);
    b.actions = mu_old + 0.5 * testing::random_batch(B, D, 62);
    b.advantages.resize(B);
    for (int i = 0; i < B; ++i) b.advantages[i] = n01(rng);
    b.log_prob_rollout = gaussian_log_prob(b.actions, mu_old, b.log_sigma);
    const MatrixD mu = mu_old + 0.3 * testing::random_batch(B, D, 63);
    auto surrogate = [&](const VectorD& flat) {
      MatrixD m = Eigen::Map<const MatrixD>(flat.data(), B, D);
      VectorD lr = log_nudging_ratio(m, b.actions, b.log_sigma, b.log_prob_rollout);
      double j = 0.0;
      for (int t = 0; t < B; ++t) {
        const double r = std::exp(lr[t]), a = b.advantages[t];
        j += std::min(r * a, std::clamp(r, 1.0 - eps, 1.0 + eps) * a);
      }
      return j / B;
    };
    const VectorD flat = Eigen::Map<const VectorD>(mu.data(), mu.size());
    const VectorD fd = oracle::finite_diff_grad(surrogate, flat, 1e-6);
    const MatrixD g = ppo_surrogate_grad(mu, b, eps, B);
    const VectorD gv = Eigen::Map<const VectorD>(g.data(), g.size());
    // Skip samples sitting within the FD stencil of a clip kink.
    const VectorD lr = log_nudging_ratio(mu, b.actions, b.log_sigma, b.log_prob_rollout);
    int compared = 0, clipped = 0;
    for (int i = 0; i < B; ++i) {
      const double r = std::exp(lr[i]);
      if (std::abs(r - 1.0 - eps) < 1e-3 || std::abs(r - 1.0 + eps) < 1e-3) continue;
      if (gv.segment(i * D, D).isZero(0.0)) ++clipped;
      for (int k = 0; k < D; ++k) CHECK(gv[i * D + k] == doctest::Approx(fd[i * D + k]).epsilon(1e-5));
      ++compared;
    }
    CHECK(compared > B / 2);
    CHECK(clipped > 0);
  }

  TEST_CASE("idct basis, round trip, energy and linearity") {
    VectorD e0 = VectorD::Zero(5);
    e0[0] = 1.0;
    VectorD c = idct_expand(e0, 64);
    for (int i = 0; i < 64; ++i) CHECK(c[i] == doctest::Approx(1.0 / 8.0).epsilon(1e-12));

    std::mt19937_64 rng(60);
    std::normal_distribution<double> n01(0.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
      VectorD x(7), y(7);
      for (int i = 0; i < 7; ++i) {
        x[i] = n01(rng);
        y[i] = n01(rng);
      }
      VectorD fx = idct_expand(x, 40);
      CHECK((dct2(fx).head(7) - x).cwiseAbs().maxCoeff() < 1e-6);
      CHECK(dct2(fx).tail(33).cwiseAbs().maxCoeff() < 1e-6);
      CHECK(std::abs(fx.norm() - x.norm()) < 1e-6);
      VectorD lin = idct_expand(2.5 * x - 0.7 * y, 40);
      CHECK((lin - (2.5 * fx - 0.7 * idct_expand(y, 40))).cwiseAbs().maxCoeff() < 1e-6);
    }
    CHECK_THROWS_AS(idct_expand(VectorD::Zero(9), 8), ConfigError);
  }

  TEST_CASE("running normalizer") {
    RunningNormalizer n(3);
    MatrixD first(1, 3);
    first << 1.0, -2.0, 7.0;
    CHECK(running_normalize(first, n).isZero(0.0));
    RunningNormalizer c(2);
    MatrixD out;
    for (int i = 0; i < 100; ++i) out = running_normalize(MatrixD::Constant(1, 2, 3.0), c);
    CHECK(out.isZero(0.0));

    RunningNormalizer s(1);
    std::mt19937_64 rng(70);
    std::normal_distribution<double> g(5.0, 2.0);
    for (int i = 0; i < 10000; ++i) s.update(MatrixD::Constant(1, 1, g(rng)));
    MatrixD batch(1000, 1);
    for (int i = 0; i < 1000; ++i) batch(i, 0) = g(rng);
    MatrixD z = s.normalize(batch);
    const double mean = z.mean();
    const double sd = std::sqrt((z.array() - mean).square().mean());
    CHECK(std::abs(mean) < 0.05);
    CHECK(sd > 0.9);
    CHECK(sd < 1.1);

    // Batched merge equals one pass.
    RunningNormalizer a(2), b2(2);
    MatrixD data = testing::random_batch(50, 2, 71, 3.0);
    a.update(data);
    b2.update(data.topRows(17));
    b2.update(data.bottomRows(33));
    CHECK((a.mean() - b2.mean()).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((a.var() - b2.var()).cwiseAbs().maxCoeff() < 1e-12);
  }

  TEST_CASE("analytic kl") {
    MatrixD m = testing::random_batch(4, 3, 80);
    CHECK(analytic_kl(m, m, RowVectorD::Zero(3)) == 0.0);
    CHECK(analytic_kl(MatrixD::Constant(1, 1, 0.2), MatrixD::Zero(1, 1), RowVectorD::Zero(1)) ==
          doctest::Approx(0.02));
    MatrixD m2 = testing::random_batch(4, 3, 81);
    const double k1 = analytic_kl(m, m2, RowVectorD::Constant(3, 0.1));
    const double k2 = analytic_kl(m, m2, RowVectorD::Constant(3, 0.1 + std::log(2.0)));
    CHECK(k2 == doctest::Approx(k1 / 4.0));
  }

  TEST_CASE("advantage normalization") {
    std::mt19937_64 rng(90);
    std::normal_distribution<double> g(3.0, 7.0);
    std::vector<double> a(2048);
    for (auto& x : a) x = g(rng);
    auto n = normalize_advantages(a);
    Eigen::Map<VectorD> v(n.data(), static_cast<Eigen::Index>(n.size()));
    const double mean = v.mean();
    const double sd = std::sqrt((v.array() - mean).square().mean());
    CHECK(std::abs(mean) < 1e-6);
    CHECK(sd > 1.0 - 1e-4);
    CHECK(sd < 1.0 + 1e-4);
  }

  TEST_CASE("optimizers") {
    VectorD p = VectorD::Zero(2);
    VectorD g(2);
    g << 1.0, -2.0;
    MomentumSgd sgd{0.1, 0.9, {}};
    sgd.step(p, g);
    sgd.step(p, g);
    CHECK(p[0] == doctest::Approx(-0.1 - 0.19));
    VectorD q = VectorD::Zero(2);
    Adam adam;
    adam.lr = 0.01;
    adam.step(q, g);
    CHECK(q[0] == doctest::Approx(-0.01).epsilon(1e-6));
    CHECK(q[1] == doctest::Approx(0.01).epsilon(1e-6));
  }
}
