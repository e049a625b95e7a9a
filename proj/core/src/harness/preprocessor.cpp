#include "eqppo/harness/preprocessor.hpp"

#include <istream>
#include <ostream>

#include "eqppo/common/binary_io.hpp"

namespace eqppo::harness {

Preprocessor::Preprocessor(int obs_dim, bool use_idct, int idct_dim) : raw_(obs_dim) {
  if (use_idct) {
    idct_.emplace(obs_dim, idct_dim);
    expanded_ = rl::RunningNormalizer(idct_dim);
  }
}

MatrixD Preprocessor::transform(const MatrixD& raw) const {
  MatrixD z = raw_.normalize(raw);
  if (!idct_) return z;
  return expanded_.normalize(idct_->expand(z));
}

void Preprocessor::update(const MatrixD& raw) {
  const MatrixD z = raw_.normalize(raw);
  raw_.update(raw);
  if (idct_) expanded_.update(idct_->expand(z));
}

namespace {

void write_norm(io::BinaryWriter& w, const rl::RunningNormalizer& n) {
  w.put<std::uint32_t>(static_cast<std::uint32_t>(n.dim()));
  w.put<double>(n.count());
  w.put_array(n.mean().data(), static_cast<std::size_t>(n.dim()));
  w.put_array(n.var().data(), static_cast<std::size_t>(n.dim()));
}

rl::RunningNormalizer read_norm(io::BinaryReader& r) {
  const auto dim = r.get<std::uint32_t>();
  if (dim == 0 || dim > (1u << 20)) throw FormatError("normalizer dimension out of range");
  const double count = r.get<double>();
  RowVectorD mean(dim), var(dim);
  r.get_array(mean.data(), dim);
  r.get_array(var.data(), dim);
  rl::RunningNormalizer n(static_cast<int>(dim));
  n.set_state(count, std::move(mean), std::move(var));
  return n;
}

}  // namespace

void Preprocessor::write(std::ostream& out) const {
  io::BinaryWriter w(out);
  w.put<std::uint8_t>(idct_ ? 1 : 0);
  write_norm(w, raw_);
  if (idct_) write_norm(w, expanded_);
}

Preprocessor Preprocessor::read(std::istream& in) {
  io::BinaryReader r(in);
  const bool use_idct = r.get<std::uint8_t>() != 0;
  Preprocessor p;
  p.raw_ = read_norm(r);
  if (use_idct) {
    p.expanded_ = read_norm(r);
    p.idct_.emplace(p.raw_.dim(), p.expanded_.dim());
  }
  return p;
}

}  // namespace eqppo::harness
