#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>

#include "acceptance.hpp"
#include "eqppo/cpg/kinematics.hpp"
#include "eqppo/cpg/oscillator.hpp"
#include "eqppo/cpg/trajectory.hpp"
#include "eqppo/harness/grad_check.hpp"
#include "eqppo/rl/gae.hpp"

namespace eqppo::acceptance {

namespace {

std::vector<harness::GradCheckCase> run_grad_check(const Options& o) {
  harness::GradCheckConfig cfg;  // sizes up to (8, 16, 16, 4), beta 0.1, T_free 30 for storage
  cfg.nets = 24;
  cfg.seed = 2024;
  auto cases = harness::grad_check(cfg);
  std::filesystem::create_directories(o.out_dir);
  std::ofstream out(o.out_dir / "grad_check.csv");
  harness::write_grad_check_csv(out, cases);
  return cases;
}

// A_t as the explicit double sum over future TD errors, cut at the first episode end.
std::vector<double> double_sum_gae(const std::vector<rl::Transition>& ep, double gamma, double lambda) {
  std::vector<double> adv(ep.size(), 0.0);
  for (std::size_t t = 0; t < ep.size(); ++t) {
    for (std::size_t k = t; k < ep.size(); ++k) {
      const double boot = ep[k].fall ? 0.0 : gamma * ep[k].next_value;
      adv[t] += std::pow(gamma * lambda, static_cast<double>(k - t)) * (ep[k].reward + boot - ep[k].value);
      if (ep[k].done) break;
    }
  }
  return adv;
}

// Amplitude equation as a first-order system, integrated with classical RK4.
double rk4_amplitude(double r, double mu, double a, double horizon, double h) {
  double v = 0.0;
  auto acc = [&](double rr, double vv) { return a * (a / 4.0 * (mu - rr) - vv); };
  for (int k = 0; k < static_cast<int>(std::lround(horizon / h)); ++k) {
    const double k1r = v, k1v = acc(r, v);
    const double k2r = v + h / 2 * k1v, k2v = acc(r + h / 2 * k1r, v + h / 2 * k1v);
    const double k3r = v + h / 2 * k2v, k3v = acc(r + h / 2 * k2r, v + h / 2 * k2v);
    const double k4r = v + h * k3v, k4v = acc(r + h * k3r, v + h * k3v);
    r += h / 6 * (k1r + 2 * k2r + 2 * k3r + k4r);
    v += h / 6 * (k1v + 2 * k2v + 2 * k3v + k4v);
  }
  return r;
}

}  // namespace

bool criterion_1(const Options& o) {
  Criterion c(1, "EP gradients agree with finite differences of the relaxed loss", 60.0);
  const auto cases = run_grad_check(o);
  double min_cos = 1.0, max_rel = 0.0;
  for (const auto& k : cases) {
    min_cos = std::min(min_cos, k.cos_fd);
    max_rel = std::max(max_rel, k.rel_fd);
  }
  c.check(cases.size() >= 20, str(cases.size(), " random nets"));
  c.check(min_cos > 0.99, str("min cosine ", min_cos, " > 0.99"));
  c.check(max_rel < 0.05, str("max relative L2 error ", max_rel, " < 0.05"));
  return c.report();
}

bool criterion_2(const Options& o) {
  Criterion c(2, "EP agrees with BPTT; BPTT stores at least 4x the activations", 60.0);
  const auto cases = run_grad_check(o);
  double min_cos = 1.0, min_ratio = 1e300;
  for (const auto& k : cases) {
    min_cos = std::min(min_cos, k.cos_bptt);
    min_ratio = std::min(min_ratio, static_cast<double>(k.bptt_scalars) / static_cast<double>(k.ep_scalars));
  }
  c.check(cases.size() >= 20, str(cases.size(), " random nets"));
  c.check(min_cos > 0.98, str("min cosine vs BPTT ", min_cos, " > 0.98"));
  c.check(min_ratio >= 4.0, str("min BPTT/EP stored-scalar ratio at T_free=30: ", min_ratio, " >= 4"));
  return c.report();
}

bool criterion_3(const Options&) {
  Criterion c(3, "recursive GAE equals the double-sum definition", 30.0);
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  std::uniform_int_distribution<int> len(1, 64);
  std::bernoulli_distribution done(0.05), fall(0.5), gl(0.5);
  double worst = 0.0;
  for (int e = 0; e < 1000; ++e) {
    std::vector<rl::Transition> ep(static_cast<std::size_t>(len(rng)));
    for (auto& t : ep) {
      t.reward = u(rng);
      t.value = u(rng);
      t.next_value = u(rng);
      t.done = done(rng);
      t.fall = t.done && fall(rng);
    }
    const double gamma = gl(rng) ? 0.99 : 0.9, lambda = gl(rng) ? 0.95 : 0.8;
    const auto got = rl::gae(ep, gamma, lambda);
    const auto ref = double_sum_gae(ep, gamma, lambda);
    for (std::size_t t = 0; t < ep.size(); ++t) {
      worst = std::max(worst, std::abs(got.advantages[t] - ref[t]));
      worst = std::max(worst, std::abs(got.returns[t] - (ref[t] + ep[t].value)));
    }
  }
  c.check(worst <= 1e-10, str("max |difference| over 1000 episodes ", worst, " <= 1e-10"));
  return c.report();
}

bool criterion_5(const Options&) {
  Criterion c(5, "CPG oscillator, foot trajectory and leg kinematics", 30.0);
  double worst_hopf = 0.0, worst_rk4 = 0.0;
  for (double mu : {1.0, 1.5, 2.0}) {
    for (double r0 : {0.0, 1.0, 1.5, 2.0, 3.0}) {
      cpg::OscillatorBank b;
      for (auto& l : b.limbs) l.r = r0;
      for (auto& p : b.params) p = {mu, 2.0, 0.5};
      for (int k = 0; k < 500; ++k) b = cpg::hopf_step(b, 0.001);
      for (const auto& l : b.limbs) worst_hopf = std::max(worst_hopf, std::abs(l.r - mu));
      worst_rk4 = std::max(worst_rk4, std::abs(rk4_amplitude(r0, mu, b.a, 0.5, 1e-5) - mu));
    }
  }
  c.check(worst_hopf < 1e-3, str("max |r - mu| after 0.5 s (dt 1 ms) ", worst_hopf, " < 1e-3"));
  c.check(worst_rk4 < 1e-3, str("RK4 reference |r - mu| after 0.5 s ", worst_rk4, " < 1e-3"));

  cpg::TrajectoryParams tp;
  tp.h = 0.25;
  tp.g_c = 0.1;
  const double pi = std::numbers::pi;
  const double z_swing = cpg::foot_target(1.5, pi / 2, 0.0, tp)[2];
  const double z_stance = cpg::foot_target(1.5, -pi / 2, 0.0, tp)[2];
  const auto mid = cpg::foot_target(2.0, 0.0, 0.0, tp);
  c.check(std::abs(z_swing - (-0.15)) < 1e-12, str("z(theta = pi/2) = ", z_swing, ", expected -0.15"));
  c.check(std::abs(z_stance - (-0.25 - tp.g_p)) < 1e-12, str("z(theta = -pi/2) = ", z_stance, ", expected -0.27"));
  c.check(std::abs(mid[0] + tp.d_step) < 1e-12 && std::abs(mid[2] + 0.25) < 1e-12,
          str("x(r = 2, theta = 0) = ", mid[0], ", expected -d_step"));

  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> q0(-0.8, 0.8), q1(-1.0, 2.5), q2(-2.6, -0.95);
  double worst_ik = 0.0;
  int solved = 0;
  for (int k = 0; k < 1000; ++k) {
    const auto g = cpg::leg_geometry(k % cpg::kNumLimbs);
    const cpg::Vec3 p = cpg::leg_fk({q0(rng), q1(rng), q2(rng)}, g);
    const cpg::Vec3 back = cpg::leg_fk(cpg::leg_ik(p, g), g);
    worst_ik = std::max(worst_ik, std::hypot(back[0] - p[0], back[1] - p[1], back[2] - p[2]));
    ++solved;
  }
  c.check(solved == 1000 && worst_ik < 1e-9, str("FK(IK(p)) error over ", solved, " targets ", worst_ik, " m < 1e-9"));
  return c.report();
}

}  // namespace eqppo::acceptance
