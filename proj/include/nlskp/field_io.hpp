#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "nlskp/grid.hpp"

namespace nlskp {

// Write `content` next to `path` and rename over it.
inline void atomic_write(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw IoError("cannot open " + tmp.string() + " for writing");
    os.write(content.data(), std::streamsize(content.size()));
    if (!os) throw IoError("short write to " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError("rename " + tmp.string() + " -> " + path.string() + ": " + ec.message());
}

namespace detail {

template <class T>
void put_le(std::string& out, T v) {
  auto bytes = std::bit_cast<std::array<unsigned char, sizeof(T)>>(v);
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
  out.append(reinterpret_cast<const char*>(bytes.data()), bytes.size());
}

template <class T>
T get_le(const std::string& in, std::size_t& pos) {
  if (pos + sizeof(T) > in.size()) throw FormatError("NLSKP1: truncated file");
  std::array<unsigned char, sizeof(T)> bytes;
  std::memcpy(bytes.data(), in.data() + pos, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
  pos += sizeof(T);
  return std::bit_cast<T>(bytes);
}

inline std::string header(const PeriodicGrid& g, bool is_complex) {
  std::string out = "NLSKP1";
  out.push_back(char(g.dim));
  out.push_back(char(is_complex ? 1 : 0));
  for (int a = 0; a < g.dim; ++a) put_le<std::uint32_t>(out, std::uint32_t(g.n[a]));
  for (int a = 0; a < g.dim; ++a) put_le<double>(out, g.L[a]);
  return out;
}

}  // namespace detail

inline std::string encode_field(const ScalarField& f) {
  std::string out = detail::header(f.grid, false);
  for (double v : f.data) detail::put_le<double>(out, v);
  return out;
}

inline std::string encode_field(const ComplexField& f) {
  std::string out = detail::header(f.grid, true);
  for (const cplx& v : f.data) {
    detail::put_le<double>(out, v.real());
    detail::put_le<double>(out, v.imag());
  }
  return out;
}

using AnyField = std::variant<ScalarField, ComplexField>;

inline AnyField decode_field(const std::string& in) {
  if (in.size() < 8 || in.compare(0, 6, "NLSKP1") != 0) throw FormatError("NLSKP1: bad magic");
  std::size_t pos = 6;
  const int dim = static_cast<unsigned char>(in[pos++]);
  const int cflag = static_cast<unsigned char>(in[pos++]);
  if (dim != 1 && dim != 2) throw FormatError("NLSKP1: unsupported dimension");
  if (cflag > 1) throw FormatError("NLSKP1: bad complex flag");
  std::array<std::size_t, 2> n{1, 1};
  std::array<double, 2> L{1.0, 1.0};
  for (int a = 0; a < dim; ++a) n[a] = detail::get_le<std::uint32_t>(in, pos);
  for (int a = 0; a < dim; ++a) L[a] = detail::get_le<double>(in, pos);
  PeriodicGrid g;
  try {
    g = dim == 1 ? PeriodicGrid(n[0], L[0]) : PeriodicGrid(n[0], n[1], L[0], L[1]);
  } catch (const ConfigError& e) {
    throw FormatError(std::string("NLSKP1: ") + e.what());
  }
  const std::size_t expect = g.size() * (cflag ? 16 : 8);
  if (in.size() - pos != expect) throw FormatError("NLSKP1: payload size mismatch");
  if (cflag) {
    ComplexField f(g);
    for (auto& v : f.data) {
      const double re = detail::get_le<double>(in, pos);
      v = cplx(re, detail::get_le<double>(in, pos));
    }
    return f;
  }
  ScalarField f(g);
  for (auto& v : f.data) v = detail::get_le<double>(in, pos);
  return f;
}

template <class T>
void write_field(const std::filesystem::path& path, const Field<T>& f) {
  atomic_write(path, encode_field(f));
}

inline AnyField read_field(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << is.rdbuf();
  return decode_field(ss.str());
}

inline ComplexField read_complex_field(const std::filesystem::path& path) {
  auto f = read_field(path);
  if (auto* c = std::get_if<ComplexField>(&f)) return *c;
  return complexify(std::get<ScalarField>(f));
}

inline ScalarField read_scalar_field(const std::filesystem::path& path) {
  auto f = read_field(path);
  if (auto* r = std::get_if<ScalarField>(&f)) return *r;
  throw FormatError("NLSKP1: expected a real field in " + path.string());
}

}  // namespace nlskp
