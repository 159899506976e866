#pragma once

// Binary snapshot of a GridState for resuming long sweeps.
//
// Layout (all integers and doubles little-endian):
//   8 bytes   magic "TSCKPT\0\0"
//   u32       format version (1)
//   u32       reserved (0)
//   u64       n
//   f64       x_min, x_max, t
//   n x (f64 re, f64 im)

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>

#include "transient/errors.hpp"
#include "transient/split_operator.hpp"

namespace transient::checkpoint {

inline constexpr std::array<char, 8> kMagic{'T', 'S', 'C', 'K', 'P', 'T', '\0', '\0'};
inline constexpr std::uint32_t kVersion = 1;

namespace detail {

inline void put_u64(std::ostream& os, std::uint64_t v) {
  std::array<char, 8> b{};
  for (int i = 0; i < 8; ++i) b[static_cast<std::size_t>(i)] = static_cast<char>((v >> (8 * i)) & 0xffu);
  os.write(b.data(), 8);
}

inline void put_u32(std::ostream& os, std::uint32_t v) {
  std::array<char, 4> b{};
  for (int i = 0; i < 4; ++i) b[static_cast<std::size_t>(i)] = static_cast<char>((v >> (8 * i)) & 0xffu);
  os.write(b.data(), 4);
}

inline void put_f64(std::ostream& os, double v) { put_u64(os, std::bit_cast<std::uint64_t>(v)); }

inline std::uint64_t get_u64(std::istream& is) {
  std::array<unsigned char, 8> b{};
  if (!is.read(reinterpret_cast<char*>(b.data()), 8)) throw InputError("checkpoint: truncated file");
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | b[static_cast<std::size_t>(i)];
  return v;
}

inline std::uint32_t get_u32(std::istream& is) {
  std::array<unsigned char, 4> b{};
  if (!is.read(reinterpret_cast<char*>(b.data()), 4)) throw InputError("checkpoint: truncated file");
  std::uint32_t v = 0;
  for (int i = 3; i >= 0; --i) v = (v << 8) | b[static_cast<std::size_t>(i)];
  return v;
}

inline double get_f64(std::istream& is) { return std::bit_cast<double>(get_u64(is)); }

}  // namespace detail

inline void write(std::ostream& os, const GridState& st) {
  os.write(kMagic.data(), kMagic.size());
  detail::put_u32(os, kVersion);
  detail::put_u32(os, 0);
  detail::put_u64(os, st.samples.size());
  detail::put_f64(os, st.grid.x_min);
  detail::put_f64(os, st.grid.x_max);
  detail::put_f64(os, st.t);
  for (const auto& v : st.samples) {
    detail::put_f64(os, v.real());
    detail::put_f64(os, v.imag());
  }
}

inline GridState read(std::istream& is) {
  std::array<char, 8> magic{};
  if (!is.read(magic.data(), magic.size()) || magic != kMagic) {
    throw InputError("checkpoint: bad magic");
  }
  const auto version = detail::get_u32(is);
  if (version != kVersion) throw InputError("checkpoint: unsupported version " + std::to_string(version));
  (void)detail::get_u32(is);
  GridState st;
  st.grid.n = detail::get_u64(is);
  st.grid.x_min = detail::get_f64(is);
  st.grid.x_max = detail::get_f64(is);
  st.t = detail::get_f64(is);
  st.grid.validate();
  st.samples.resize(st.grid.n);
  for (auto& v : st.samples) {
    const double re = detail::get_f64(is);
    const double im = detail::get_f64(is);
    v = {re, im};
  }
  return st;
}

inline void save(const std::filesystem::path& path, const GridState& st) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw InputError("checkpoint: cannot open " + path.string());
  write(os, st);
}

inline GridState load(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw InputError("checkpoint: cannot open " + path.string());
  return read(is);
}

}  // namespace transient::checkpoint
