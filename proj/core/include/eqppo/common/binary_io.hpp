#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <string>
#include <type_traits>
#include <vector>

#include "eqppo/common/errors.hpp"

namespace eqppo::io {

// Little-endian fixed-width encoding. All supported hosts are little-endian;
// the static_assert keeps a big-endian port from silently writing garbage.
static_assert(std::endian::native == std::endian::little, "little-endian host required");

class BinaryWriter {
 public:
  explicit BinaryWriter(std::ostream& out) : out_(out) {}

  template <typename T>
    requires std::is_arithmetic_v<T>
  void put(T value) {
    out_.write(reinterpret_cast<const char*>(&value), sizeof(T));
  }

  template <typename T>
    requires std::is_arithmetic_v<T>
  void put_array(const T* data, std::size_t count) {
    out_.write(reinterpret_cast<const char*>(data), static_cast<std::streamsize>(count * sizeof(T)));
  }

  void put_string(const std::string& s) {
    put<std::uint32_t>(static_cast<std::uint32_t>(s.size()));
    out_.write(s.data(), static_cast<std::streamsize>(s.size()));
  }

  void put_magic(const char (&magic)[5]) { out_.write(magic, 4); }

  bool ok() const { return static_cast<bool>(out_); }

 private:
  std::ostream& out_;
};

class BinaryReader {
 public:
  explicit BinaryReader(std::istream& in) : in_(in) {}

  template <typename T>
    requires std::is_arithmetic_v<T>
  T get() {
    T value{};
    in_.read(reinterpret_cast<char*>(&value), sizeof(T));
    if (!in_) throw FormatError("unexpected end of binary stream");
    return value;
  }

  template <typename T>
    requires std::is_arithmetic_v<T>
  void get_array(T* data, std::size_t count) {
    in_.read(reinterpret_cast<char*>(data), static_cast<std::streamsize>(count * sizeof(T)));
    if (!in_) throw FormatError("unexpected end of binary stream");
  }

  std::string get_string() {
    const auto n = get<std::uint32_t>();
    if (n > (1u << 24)) throw FormatError("string length out of range");
    std::string s(n, '\0');
    in_.read(s.data(), n);
    if (!in_) throw FormatError("unexpected end of binary stream");
    return s;
  }

  void expect_magic(const char (&magic)[5]) {
    char buf[4];
    in_.read(buf, 4);
    if (!in_ || std::memcmp(buf, magic, 4) != 0) {
      throw FormatError(std::string("bad magic, expected ") + magic);
    }
  }

 private:
  std::istream& in_;
};

/// FNV-1a over raw bytes; used for parameter fingerprints and config hashes.
inline std::uint64_t fnv1a(const void* data, std::size_t n, std::uint64_t h = 1469598103934665603ull) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace eqppo::io
