#pragma once

#include <filesystem>
#include <iosfwd>

#include "eqppo/eqprop/energy_net.hpp"

namespace eqppo::eqprop {

/// Network checkpoint, format version 1 (little-endian):
///   char[4]  magic "EQPN"
///   u32      format version
///   u64      seed
///   u32      activation id (0 = hard sigmoid)
///   u32      number of layers L
///   u32[L]   layer sizes
///   for l in 0..L-2: f32[sizes[l] * sizes[l+1]] weights, row-major
///   for l in 1..L-1: f32[sizes[l]] biases
inline constexpr std::uint32_t kNetFormatVersion = 1;

void write_net(std::ostream& out, const LayeredEnergyNet<float>& net);
LayeredEnergyNet<float> read_net(std::istream& in);

void save_net(const std::filesystem::path& path, const LayeredEnergyNet<float>& net);
LayeredEnergyNet<float> load_net(const std::filesystem::path& path);

}  // namespace eqppo::eqprop
