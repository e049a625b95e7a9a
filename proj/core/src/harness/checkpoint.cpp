#include "eqppo/harness/checkpoint.hpp"

#include <fstream>
#include <sstream>

#include "eqppo/common/binary_io.hpp"
#include "eqppo/common/errors.hpp"

namespace eqppo::harness {

TrainingState TrainingState::clone() const {
  TrainingState s;
  s.config = config;
  s.agent = agent ? agent->clone() : nullptr;
  s.log_sigma = log_sigma;
  s.logstd_opt = logstd_opt;
  s.preprocessor = preprocessor;
  s.samples = samples;
  s.updates = updates;
  s.rollbacks = rollbacks;
  s.cpg_hash = cpg_hash;
  s.rng_state = rng_state;
  return s;
}

namespace {

void put_doubles(io::BinaryWriter& w, const double* p, std::size_t n) {
  w.put<std::uint64_t>(n);
  w.put_array(p, n);
}

std::vector<double> get_doubles(io::BinaryReader& r) {
  const auto n = r.get<std::uint64_t>();
  if (n > (1ull << 32)) throw FormatError("array length out of range");
  std::vector<double> v(n);
  r.get_array(v.data(), n);
  return v;
}

}  // namespace

void write_bundle(std::ostream& out, const TrainingState& s) {
  if (!s.agent) throw ContractError("bundle without an agent");
  io::BinaryWriter w(out);
  w.put_magic("EQPB");
  w.put<std::uint32_t>(kBundleFormatVersion);
  w.put_string(to_ini(s.config));
  w.put<std::uint64_t>(config_hash(s.config));
  s.agent->write(out);
  put_doubles(w, s.log_sigma.data(), static_cast<std::size_t>(s.log_sigma.size()));
  w.put<double>(s.logstd_opt.lr);
  w.put<std::int64_t>(s.logstd_opt.t);
  put_doubles(w, s.logstd_opt.m.data(), static_cast<std::size_t>(s.logstd_opt.m.size()));
  put_doubles(w, s.logstd_opt.v.data(), static_cast<std::size_t>(s.logstd_opt.v.size()));
  s.preprocessor.write(out);
  w.put<std::int64_t>(s.samples);
  w.put<std::int64_t>(s.updates);
  w.put<std::int64_t>(s.rollbacks);
  w.put<std::uint64_t>(s.cpg_hash);
  w.put_string(s.rng_state);
  if (!w.ok()) throw FormatError("failed writing checkpoint bundle");
}

TrainingState read_bundle(std::istream& in) {
  io::BinaryReader r(in);
  r.expect_magic("EQPB");
  const auto version = r.get<std::uint32_t>();
  if (version != kBundleFormatVersion)
    throw FormatError("unsupported bundle format version " + std::to_string(version));
  TrainingState s;
  s.config = from_ini(r.get_string(), TrainerConfig{});
  if (r.get<std::uint64_t>() != config_hash(s.config)) throw FormatError("bundle config hash mismatch");
  s.agent = read_agent(in, s.config);
  auto ls = get_doubles(r);
  s.log_sigma = Eigen::Map<RowVectorD>(ls.data(), static_cast<Eigen::Index>(ls.size()));
  if (s.log_sigma.size() != s.agent->action_dim()) throw FormatError("log-std size does not match the policy");
  s.logstd_opt.lr = r.get<double>();
  s.logstd_opt.t = r.get<std::int64_t>();
  auto m = get_doubles(r);
  auto v = get_doubles(r);
  s.logstd_opt.m = Eigen::Map<VectorD>(m.data(), static_cast<Eigen::Index>(m.size()));
  s.logstd_opt.v = Eigen::Map<VectorD>(v.data(), static_cast<Eigen::Index>(v.size()));
  s.preprocessor = Preprocessor::read(in);
  if (s.preprocessor.output_dim() != s.agent->input_dim())
    throw FormatError("preprocessor width does not match the policy");
  s.samples = r.get<std::int64_t>();
  s.updates = r.get<std::int64_t>();
  s.rollbacks = r.get<std::int64_t>();
  s.cpg_hash = r.get<std::uint64_t>();
  s.rng_state = r.get_string();
  return s;
}

void save_bundle(const std::filesystem::path& path, const TrainingState& state) {
  // Write to a sibling file first so a crash never leaves a truncated bundle.
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw FormatError("cannot open " + tmp.string() + " for writing");
    write_bundle(out, state);
  }
  std::filesystem::rename(tmp, path);
}

TrainingState load_bundle(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open checkpoint " + path.string());
  return read_bundle(in);
}

envsim::PolicyFn make_policy_fn(const TrainingState& state) {
  std::shared_ptr<const Agent> agent = state.agent->clone();
  auto pre = std::make_shared<const Preprocessor>(state.preprocessor);
  return [agent, pre](std::span<const double> obs) {
    MatrixD raw = Eigen::Map<const RowVectorD>(obs.data(), static_cast<Eigen::Index>(obs.size()));
    const MatrixD mu = agent->policy_mean(pre->transform(raw));
    return std::vector<double>(mu.data(), mu.data() + mu.size());
  };
}

}  // namespace eqppo::harness
