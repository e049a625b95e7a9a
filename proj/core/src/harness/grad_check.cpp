#include "eqppo/harness/grad_check.hpp"

#include <ostream>
#include <random>

#include "eqppo/eqprop/relaxation.hpp"
#include "eqppo/eqprop/three_phase.hpp"
#include "eqppo/oracle/bptt.hpp"
#include "eqppo/oracle/finite_diff.hpp"
#include "eqppo/oracle/storage.hpp"

namespace eqppo::harness {

std::vector<GradCheckCase> grad_check(const GradCheckConfig& cfg) {
  std::vector<GradCheckCase> out;
  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0), bias(0.3, 0.7);
  for (int k = 0; k < cfg.nets; ++k) {
    std::vector<int> sizes;
    for (int m : cfg.max_sizes) sizes.push_back(std::uniform_int_distribution<int>(std::max(1, m / 2), m)(rng));
    auto net = eqprop::init_net<double>(sizes, cfg.alpha_w, rng());
    // Hidden biases inside (0, 1) keep equilibria off the clamp corners.
    for (int l = 1; l + 1 < net.num_layers(); ++l)
      for (auto& b : net.bias(l)) b = bias(rng);
    MatrixD x(cfg.batch, sizes.front()), y(cfg.batch, sizes.back());
    for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = unit(rng);
    for (Eigen::Index i = 0; i < y.size(); ++i) y.data()[i] = unit(rng);

    eqprop::ThreePhaseConfig tc{cfg.steps, cfg.steps, cfg.steps, cfg.beta, 1.0, 1e-4, false};
    const VectorD ep = eqprop::three_phase(net, x, eqprop::quadratic_loss(y), tc).grads.flatten();

    auto work = net;
    eqprop::RelaxConfig rc;
    rc.max_steps = cfg.steps;
    auto loss = [&](const VectorD& p) {
      eqprop::assign_parameters(work, p);
      return 0.5 * (eqprop::infer(work, x, rc) - y).squaredNorm() / static_cast<double>(cfg.batch);
    };
    const VectorD fd = oracle::finite_diff_grad(loss, eqprop::flatten_parameters(net), cfg.fd_step);
    const VectorD bptt =
        oracle::bptt_equilibrium_grad(net, x, [&](const MatrixD& o) { return MatrixD(o - y); }, cfg.steps).flatten();

    oracle::StorageLedger ledger(oracle::StorageMethod::kBPTT, cfg.storage_steps);
    oracle::bptt_equilibrium_grad(
        net, x, [&](const MatrixD& o) { return MatrixD(o - y); }, cfg.storage_steps, 1.0, &ledger);

    GradCheckCase c;
    c.sizes = sizes;
    c.cos_fd = oracle::cosine_similarity(ep, fd);
    c.rel_fd = oracle::relative_l2_error(ep, fd);
    c.cos_bptt = oracle::cosine_similarity(ep, bptt);
    c.bptt_scalars = ledger.peak_stored_scalars();
    c.ep_scalars = oracle::ep_storage(net, cfg.batch, cfg.storage_steps).peak_stored_scalars();
    out.push_back(std::move(c));
  }
  return out;
}

void write_grad_check_csv(std::ostream& out, const std::vector<GradCheckCase>& cases) {
  out << "net,sizes,cos_fd,rel_fd,cos_bptt,bptt_scalars,ep_scalars\n";
  for (std::size_t i = 0; i < cases.size(); ++i) {
    const auto& c = cases[i];
    out << i << ',';
    for (std::size_t l = 0; l < c.sizes.size(); ++l) out << (l ? "-" : "") << c.sizes[l];
    out << ',' << c.cos_fd << ',' << c.rel_fd << ',' << c.cos_bptt << ',' << c.bptt_scalars << ',' << c.ep_scalars
        << '\n';
  }
}

}  // namespace eqppo::harness
