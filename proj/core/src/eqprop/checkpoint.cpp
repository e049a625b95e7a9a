#include "eqppo/eqprop/checkpoint.hpp"

#include <fstream>

#include "eqppo/common/binary_io.hpp"

namespace eqppo::eqprop {

void write_net(std::ostream& out, const LayeredEnergyNet<float>& net) {
  io::BinaryWriter w(out);
  w.put_magic("EQPN");
  w.put<std::uint32_t>(kNetFormatVersion);
  w.put<std::uint64_t>(net.seed);
  w.put<std::uint32_t>(static_cast<std::uint32_t>(net.activation));
  w.put<std::uint32_t>(static_cast<std::uint32_t>(net.layer_sizes.size()));
  for (int s : net.layer_sizes) w.put<std::uint32_t>(static_cast<std::uint32_t>(s));
  for (const auto& m : net.weights) w.put_array(m.data(), static_cast<std::size_t>(m.size()));
  for (const auto& b : net.biases) w.put_array(b.data(), static_cast<std::size_t>(b.size()));
  if (!w.ok()) throw FormatError("failed writing network checkpoint");
}

LayeredEnergyNet<float> read_net(std::istream& in) {
  io::BinaryReader r(in);
  r.expect_magic("EQPN");
  const auto version = r.get<std::uint32_t>();
  if (version != kNetFormatVersion) throw FormatError("unsupported network format version " + std::to_string(version));
  LayeredEnergyNet<float> net;
  net.seed = r.get<std::uint64_t>();
  const auto act = r.get<std::uint32_t>();
  if (act != 0) throw FormatError("unknown activation id " + std::to_string(act));
  const auto L = r.get<std::uint32_t>();
  if (L < 2 || L > 64) throw FormatError("layer count out of range");
  for (std::uint32_t l = 0; l < L; ++l) {
    const auto s = r.get<std::uint32_t>();
    if (s == 0 || s > (1u << 20)) throw FormatError("layer size out of range");
    net.layer_sizes.push_back(static_cast<int>(s));
  }
  for (std::uint32_t l = 0; l + 1 < L; ++l) {
    Matrix<float> m(net.layer_sizes[l], net.layer_sizes[l + 1]);
    r.get_array(m.data(), static_cast<std::size_t>(m.size()));
    net.weights.push_back(std::move(m));
  }
  for (std::uint32_t l = 1; l < L; ++l) {
    RowVector<float> b(net.layer_sizes[l]);
    r.get_array(b.data(), static_cast<std::size_t>(b.size()));
    net.biases.push_back(std::move(b));
  }
  return net;
}

void save_net(const std::filesystem::path& path, const LayeredEnergyNet<float>& net) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot open " + path.string() + " for writing");
  write_net(out, net);
}

LayeredEnergyNet<float> load_net(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  return read_net(in);
}

}  // namespace eqppo::eqprop
