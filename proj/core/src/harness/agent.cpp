#include "eqppo/harness/agent.hpp"

#include <istream>
#include <ostream>

#include "eqppo/common/binary_io.hpp"
#include "eqppo/common/errors.hpp"
#include "eqppo/eqprop/checkpoint.hpp"
#include "eqppo/eqprop/relaxation.hpp"
#include "eqppo/eqprop/three_phase.hpp"

namespace eqppo::harness {

namespace {

constexpr std::uint32_t kTagEp = 1;
constexpr std::uint32_t kTagBp = 2;

std::vector<int> layer_sizes(int in, const std::vector<int>& hidden, int out) {
  std::vector<int> sizes{in};
  sizes.insert(sizes.end(), hidden.begin(), hidden.end());
  sizes.push_back(out);
  return sizes;
}

void put_vector(io::BinaryWriter& w, const VectorD& v) {
  w.put<std::uint64_t>(static_cast<std::uint64_t>(v.size()));
  w.put_array(v.data(), static_cast<std::size_t>(v.size()));
}

VectorD get_vector(io::BinaryReader& r) {
  const auto n = r.get<std::uint64_t>();
  if (n > (1ull << 32)) throw FormatError("vector length out of range");
  VectorD v(static_cast<Eigen::Index>(n));
  r.get_array(v.data(), n);
  return v;
}

std::uint64_t hash_vector(const VectorD& v) {
  return io::fnv1a(v.data(), static_cast<std::size_t>(v.size()) * sizeof(double));
}

}  // namespace

// ---------------------------------------------------------------- EP

EpAgent::EpAgent(const TrainerConfig& cfg, int input_dim, int action_dim, std::uint64_t seed)
    : EpAgent(cfg, eqprop::init_net<float>(layer_sizes(input_dim, cfg.hidden, action_dim), cfg.alpha_w, seed),
              eqprop::init_net<float>(layer_sizes(input_dim, cfg.hidden, 1), cfg.alpha_w,
                                      seed ^ 0x9e3779b97f4a7c15ull)) {}

EpAgent::EpAgent(const TrainerConfig& cfg, eqprop::LayeredEnergyNet<float> policy,
                 eqprop::LayeredEnergyNet<float> value)
    : policy_(std::move(policy)), value_(std::move(value)) {
  policy_opt_.lr = cfg.lr_policy;
  policy_opt_.momentum = cfg.momentum;
  value_opt_.lr = cfg.lr_value;
  value_opt_.momentum = cfg.momentum;
  set_steps(cfg);
}

void EpAgent::set_steps(const TrainerConfig& cfg) {
  p_free_ = cfg.policy_steps_free;
  p_pos_ = cfg.policy_steps_pos;
  p_neg_ = cfg.policy_steps_neg;
  v_free_ = cfg.value_steps_free;
  v_pos_ = cfg.value_steps_pos;
  v_neg_ = cfg.value_steps_neg;
  eps_ep_ = cfg.eps_ep;
  conv_tol_ = cfg.conv_tol;
  value_beta_ = cfg.clip.beta_ep;
}

MatrixD EpAgent::policy_mean(const MatrixD& input) const {
  eqprop::RelaxConfig rc{.max_steps = p_free_, .eps_ep = eps_ep_, .conv_tol = conv_tol_};
  return eqprop::infer(policy_, MatrixF(input.cast<float>()), rc).cast<double>();
}

VectorD EpAgent::value(const MatrixD& input) const {
  eqprop::RelaxConfig rc{.max_steps = v_free_, .eps_ep = eps_ep_, .conv_tol = conv_tol_};
  return eqprop::infer(value_, MatrixF(input.cast<float>()), rc).cast<double>().col(0);
}

PolicyStepResult EpAgent::policy_step(const MatrixD& input, const rl::PolicyBatch& batch,
                                      const rl::ClipConfig& clip) {
  eqprop::ThreePhaseConfig tc{p_free_, p_pos_, p_neg_, clip.beta_ep, eps_ep_, conv_tol_, false};
  auto res = eqprop::three_phase(policy_, MatrixF(input.cast<float>()), rl::policy_loss(batch, clip, 1.0), tc);
  VectorD params = eqprop::flatten_parameters(policy_);
  policy_opt_.step(params, res.grads.flatten());
  eqprop::assign_parameters(policy_, params);
  return {res.free_state.output().cast<double>(), std::move(res.free_state.steps_to_convergence)};
}

double EpAgent::value_step(const MatrixD& input, const VectorD& returns) {
  eqprop::ThreePhaseConfig tc{v_free_, v_pos_, v_neg_, value_beta_, eps_ep_, conv_tol_, false};
  auto res = eqprop::three_phase(value_, MatrixF(input.cast<float>()), rl::value_loss(returns, 1.0), tc);
  const double mse = (res.free_state.output().col(0).cast<double>() - returns).squaredNorm() /
                     static_cast<double>(returns.size());
  VectorD params = eqprop::flatten_parameters(value_);
  value_opt_.step(params, res.grads.flatten());
  eqprop::assign_parameters(value_, params);
  return mse;
}

Agent::PolicySnapshot EpAgent::snapshot_policy() const {
  return {eqprop::flatten_parameters(policy_), policy_opt_.velocity, {}, 0};
}

void EpAgent::restore_policy(const PolicySnapshot& snap) {
  eqprop::assign_parameters(policy_, snap.params);
  policy_opt_.velocity = snap.opt_a;
}

std::uint64_t EpAgent::policy_hash() const { return eqprop::parameter_hash(policy_); }
std::uint64_t EpAgent::value_hash() const { return eqprop::parameter_hash(value_); }

bool EpAgent::finite() const {
  return eqprop::flatten_parameters(policy_).allFinite() && eqprop::flatten_parameters(value_).allFinite();
}

std::vector<int> EpAgent::probe_convergence(const MatrixD& input, int max_steps) const {
  eqprop::RelaxConfig rc{.max_steps = max_steps, .eps_ep = eps_ep_, .conv_tol = conv_tol_};
  auto st = eqprop::relax(policy_, MatrixF(input.cast<float>()), eqprop::NudgeForce<float>::none(), rc);
  return st.steps_to_convergence;
}

void EpAgent::write(std::ostream& out) const {
  io::BinaryWriter w(out);
  w.put<std::uint32_t>(kTagEp);
  eqprop::write_net(out, policy_);
  eqprop::write_net(out, value_);
  w.put<double>(policy_opt_.lr);
  put_vector(w, policy_opt_.velocity);
  w.put<double>(value_opt_.lr);
  put_vector(w, value_opt_.velocity);
}

std::unique_ptr<EpAgent> EpAgent::read(std::istream& in, const TrainerConfig& cfg) {
  io::BinaryReader r(in);
  auto policy = eqprop::read_net(in);
  auto value = eqprop::read_net(in);
  auto agent = std::make_unique<EpAgent>(cfg, std::move(policy), std::move(value));
  agent->policy_opt_.lr = r.get<double>();
  agent->policy_opt_.velocity = get_vector(r);
  agent->value_opt_.lr = r.get<double>();
  agent->value_opt_.velocity = get_vector(r);
  return agent;
}

// ---------------------------------------------------------------- BP

BpAgent::BpAgent(const TrainerConfig& cfg, int input_dim, int action_dim, std::uint64_t seed) {
  policy_ = oracle::init_mlp(layer_sizes(input_dim, cfg.bp_hidden, action_dim), seed);
  value_ = oracle::init_mlp(layer_sizes(input_dim, cfg.bp_hidden, 1), seed ^ 0x9e3779b97f4a7c15ull);
  // Small output layer so the initial mean sits near zero.
  policy_.weights.back() *= 0.01;
  policy_opt_.lr = cfg.bp_lr_policy;
  value_opt_.lr = cfg.bp_lr_value;
}

MatrixD BpAgent::policy_mean(const MatrixD& input) const { return oracle::mlp_forward(policy_, input); }

VectorD BpAgent::value(const MatrixD& input) const { return oracle::mlp_forward(value_, input).col(0); }

PolicyStepResult BpAgent::policy_step(const MatrixD& input, const rl::PolicyBatch& batch,
                                      const rl::ClipConfig& clip) {
  const MatrixD mu = oracle::mlp_forward(policy_, input);
  // Descend L = -J, averaged over the mini-batch.
  const MatrixD out_grad = -rl::ppo_surrogate_grad(mu, batch, clip.epsilon, static_cast<double>(batch.size()));
  auto fb = oracle::mlp_forward_backward(policy_, input, out_grad);
  VectorD params = oracle::flatten_parameters(policy_);
  policy_opt_.step(params, fb.grads.flatten());
  oracle::assign_parameters(policy_, params);
  return {mu, std::vector<int>(static_cast<std::size_t>(batch.size()), 0)};
}

double BpAgent::value_step(const MatrixD& input, const VectorD& returns) {
  const VectorD v = oracle::mlp_forward(value_, input).col(0);
  const double n = static_cast<double>(returns.size());
  MatrixD out_grad = (2.0 / n) * (v - returns);
  auto fb = oracle::mlp_forward_backward(value_, input, out_grad);
  VectorD params = oracle::flatten_parameters(value_);
  value_opt_.step(params, fb.grads.flatten());
  oracle::assign_parameters(value_, params);
  return (v - returns).squaredNorm() / n;
}

Agent::PolicySnapshot BpAgent::snapshot_policy() const {
  return {oracle::flatten_parameters(policy_), policy_opt_.m, policy_opt_.v, policy_opt_.t};
}

void BpAgent::restore_policy(const PolicySnapshot& snap) {
  oracle::assign_parameters(policy_, snap.params);
  policy_opt_.m = snap.opt_a;
  policy_opt_.v = snap.opt_b;
  policy_opt_.t = snap.opt_t;
}

std::uint64_t BpAgent::policy_hash() const { return hash_vector(oracle::flatten_parameters(policy_)); }
std::uint64_t BpAgent::value_hash() const { return hash_vector(oracle::flatten_parameters(value_)); }

bool BpAgent::finite() const {
  return oracle::flatten_parameters(policy_).allFinite() && oracle::flatten_parameters(value_).allFinite();
}

namespace {

void write_mlp(io::BinaryWriter& w, const oracle::MlpNet& net) {
  w.put<std::uint32_t>(static_cast<std::uint32_t>(net.layer_sizes.size()));
  for (int s : net.layer_sizes) w.put<std::uint32_t>(static_cast<std::uint32_t>(s));
  put_vector(w, oracle::flatten_parameters(net));
}

oracle::MlpNet read_mlp(io::BinaryReader& r) {
  const auto L = r.get<std::uint32_t>();
  if (L < 2 || L > 64) throw FormatError("layer count out of range");
  std::vector<int> sizes;
  for (std::uint32_t l = 0; l < L; ++l) {
    const auto s = r.get<std::uint32_t>();
    if (s == 0 || s > (1u << 20)) throw FormatError("layer size out of range");
    sizes.push_back(static_cast<int>(s));
  }
  auto net = oracle::init_mlp(sizes, 0);
  const VectorD flat = get_vector(r);
  if (flat.size() != static_cast<Eigen::Index>(net.num_parameters())) throw FormatError("MLP parameter count mismatch");
  oracle::assign_parameters(net, flat);
  return net;
}

void write_adam(io::BinaryWriter& w, const rl::Adam& a) {
  w.put<double>(a.lr);
  w.put<std::int64_t>(a.t);
  put_vector(w, a.m);
  put_vector(w, a.v);
}

void read_adam(io::BinaryReader& r, rl::Adam& a) {
  a.lr = r.get<double>();
  a.t = r.get<std::int64_t>();
  a.m = get_vector(r);
  a.v = get_vector(r);
}

}  // namespace

void BpAgent::write(std::ostream& out) const {
  io::BinaryWriter w(out);
  w.put<std::uint32_t>(kTagBp);
  write_mlp(w, policy_);
  write_mlp(w, value_);
  write_adam(w, policy_opt_);
  write_adam(w, value_opt_);
}

std::unique_ptr<BpAgent> BpAgent::read(std::istream& in, const TrainerConfig&) {
  io::BinaryReader r(in);
  std::unique_ptr<BpAgent> agent(new BpAgent());
  agent->policy_ = read_mlp(r);
  agent->value_ = read_mlp(r);
  read_adam(r, agent->policy_opt_);
  read_adam(r, agent->value_opt_);
  return agent;
}

// ---------------------------------------------------------------- factory

std::unique_ptr<Agent> make_agent(const TrainerConfig& cfg, int input_dim, int action_dim, std::uint64_t seed) {
  if (cfg.algorithm == Algorithm::kEP) return std::make_unique<EpAgent>(cfg, input_dim, action_dim, seed);
  return std::make_unique<BpAgent>(cfg, input_dim, action_dim, seed);
}

std::unique_ptr<Agent> read_agent(std::istream& in, const TrainerConfig& cfg) {
  io::BinaryReader r(in);
  const auto tag = r.get<std::uint32_t>();
  if (tag == kTagEp) return EpAgent::read(in, cfg);
  if (tag == kTagBp) return BpAgent::read(in, cfg);
  throw FormatError("unknown agent tag " + std::to_string(tag));
}

}  // namespace eqppo::harness
