#pragma once

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>
#include <vector>

#include "hydrolim/error.hpp"
#include "hydrolim/spectral.hpp"
#include "hydrolim/state.hpp"

namespace hydrolim {

/// Binary checkpoint of a CF state.
///
///   offset  size  content
///   0       4     magic "HLIM"
///   4       4     u32 version (= 1)
///   8       12    u32 nx, ny, nz
///   20      8     f64 epsilon
///   28      8     f64 time
///   36      ...   f64 physical values of sigma, v1, v2, w, x fastest
///
/// All integers and floats are little-endian.
struct CheckpointData {
  static constexpr std::array<char, 4> magic{'H', 'L', 'I', 'M'};
  static constexpr std::uint32_t version = 1;
  static constexpr std::size_t header_size = 36;

  std::uint32_t nx = 0, ny = 0, nz = 0;
  double epsilon = 0.0;
  double time = 0.0;
  std::array<std::vector<double>, 4> fields;  // sigma, v1, v2, w

  static CheckpointData from_state(const CfState& s) {
    const Grid& g = s.grid();
    CheckpointData d;
    d.nx = std::uint32_t(g.nx());
    d.ny = std::uint32_t(g.ny());
    d.nz = std::uint32_t(g.nz());
    d.epsilon = s.epsilon;
    d.time = s.time;
    const std::array<const SpectralField*, 4> f{&s.sigma, &s.v1, &s.v2, &s.w};
    for (int i = 0; i < 4; ++i) {
      const PhysicalField p = to_physical(*f[i]);
      d.fields[i].assign(p.values().begin(), p.values().end());
    }
    return d;
  }

  CfState to_state() const {
    const Grid g{int(nx), int(ny), int(nz)};
    auto spec = [&](int i, Parity p) { return project_parity(to_spectral(g, fields[i], p), p); };
    return {spec(0, Parity::even), spec(1, Parity::even), spec(2, Parity::even), spec(3, Parity::odd), epsilon, time};
  }

  std::vector<unsigned char> encode() const {
    std::vector<unsigned char> out;
    out.reserve(header_size + 4 * 8 * fields[0].size());
    out.insert(out.end(), magic.begin(), magic.end());
    put_u32(out, version);
    put_u32(out, nx);
    put_u32(out, ny);
    put_u32(out, nz);
    put_f64(out, epsilon);
    put_f64(out, time);
    for (const auto& f : fields)
      for (double v : f) put_f64(out, v);
    return out;
  }

  static CheckpointData decode(const std::vector<unsigned char>& bytes) {
    std::size_t pos = 0;
    auto need = [&](std::size_t n, const char* what) {
      if (bytes.size() < pos + n) {
        throw LoadError(std::string("truncated checkpoint while reading ") + what, bytes.size());
      }
    };
    need(4, "magic");
    if (!std::equal(magic.begin(), magic.end(), bytes.begin())) throw LoadError("bad checkpoint magic", 0);
    pos = 4;
    need(4, "version");
    const std::uint32_t ver = get_u32(bytes, pos);
    if (ver != version) throw LoadError("unsupported checkpoint version " + std::to_string(ver), 4);
    CheckpointData d;
    need(12, "grid dimensions");
    d.nx = get_u32(bytes, pos);
    d.ny = get_u32(bytes, pos);
    d.nz = get_u32(bytes, pos);
    for (std::uint32_t n : {d.nx, d.ny, d.nz}) {
      if (n < 4 || n % 2 != 0 || n > 4096) throw LoadError("invalid grid dimension " + std::to_string(n), 8);
    }
    need(16, "epsilon/time");
    d.epsilon = get_f64(bytes, pos);
    d.time = get_f64(bytes, pos);
    const std::size_t count = std::size_t(d.nx) * d.ny * d.nz;
    for (auto& f : d.fields) {
      need(count * 8, "field data");
      f.resize(count);
      for (auto& v : f) v = get_f64(bytes, pos);
    }
    if (pos != bytes.size()) throw LoadError("trailing bytes after checkpoint payload", pos);
    return d;
  }

 private:
  static void put_u32(std::vector<unsigned char>& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back((v >> (8 * i)) & 0xffu);
  }
  static void put_f64(std::vector<unsigned char>& out, double v) {
    const auto bits = std::bit_cast<std::uint64_t>(v);
    for (int i = 0; i < 8; ++i) out.push_back((bits >> (8 * i)) & 0xffu);
  }
  static std::uint32_t get_u32(const std::vector<unsigned char>& in, std::size_t& pos) {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= std::uint32_t(in[pos + i]) << (8 * i);
    pos += 4;
    return v;
  }
  static double get_f64(const std::vector<unsigned char>& in, std::size_t& pos) {
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= std::uint64_t(in[pos + i]) << (8 * i);
    pos += 8;
    return std::bit_cast<double>(v);
  }
};

inline void checkpoint_write(const CfState& state, const std::filesystem::path& path) {
  const auto bytes = CheckpointData::from_state(state).encode();
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw InvalidInput("cannot open checkpoint for writing: " + path.string());
  os.write(reinterpret_cast<const char*>(bytes.data()), std::streamsize(bytes.size()));
  if (!os) throw InvalidInput("failed writing checkpoint: " + path.string());
}

inline CheckpointData checkpoint_read_data(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw LoadError("cannot open checkpoint " + path.string(), 0);
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
  return CheckpointData::decode(bytes);
}

inline CfState checkpoint_read(const std::filesystem::path& path) { return checkpoint_read_data(path).to_state(); }

}  // namespace hydrolim
