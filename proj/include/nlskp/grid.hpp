#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <string>
#include <vector>

#include "nlskp/errors.hpp"

namespace nlskp {

using cplx = std::complex<double>;

enum class Axis { x = 0, perp = 1 };

// Uniform periodic grid, cell-centred on the origin: x_j = -L/2 + j L/N.
// Storage is row-major with x fastest.
struct PeriodicGrid {
  int dim = 1;
  std::array<std::size_t, 2> n{1, 1};
  std::array<double, 2> L{1.0, 1.0};

  PeriodicGrid() = default;

  PeriodicGrid(std::size_t nx, double lx) : dim(1), n{nx, 1}, L{lx, 1.0} { validate(); }

  PeriodicGrid(std::size_t nx, std::size_t ny, double lx, double ly)
      : dim(2), n{nx, ny}, L{lx, ly} {
    validate();
  }

  std::size_t size() const { return n[0] * n[1]; }
  std::size_t nx() const { return n[0]; }
  std::size_t ny() const { return n[1]; }
  double dx(int axis = 0) const { return L[axis] / double(n[axis]); }
  double cell_volume() const { return dim == 1 ? dx(0) : dx(0) * dx(1); }
  double volume() const { return dim == 1 ? L[0] : L[0] * L[1]; }
  std::size_t index(std::size_t i, std::size_t j = 0) const { return i + n[0] * j; }

  double coord(int axis, std::size_t i) const {
    return -0.5 * L[axis] + double(i) * L[axis] / double(n[axis]);
  }

  // signed mode number for storage index i
  long mode(int axis, std::size_t i) const {
    const long N = long(n[axis]);
    return long(i) < N / 2 ? long(i) : long(i) - N;
  }

  double wavenumber(int axis, std::size_t i) const {
    return 2.0 * std::numbers::pi * double(mode(axis, i)) / L[axis];
  }

  bool nyquist(int axis, std::size_t i) const { return n[axis] > 1 && i == n[axis] / 2; }

  bool operator==(const PeriodicGrid& o) const { return dim == o.dim && n == o.n && L == o.L; }

 private:
  static bool pow2(std::size_t v) { return v >= 8 && (v & (v - 1)) == 0; }

  void validate() const {
    for (int a = 0; a < dim; ++a) {
      if (!pow2(n[a]))
        throw ConfigError("grid: resolution must be a power of two >= 8, got " +
                          std::to_string(n[a]));
      if (!(L[a] > 0.0) || !std::isfinite(L[a])) throw ConfigError("grid: box length must be positive");
    }
  }
};

template <class T>
struct Field {
  PeriodicGrid grid;
  std::vector<T> data;

  Field() = default;
  explicit Field(const PeriodicGrid& g, T v = T{}) : grid(g), data(g.size(), v) {}
  Field(const PeriodicGrid& g, std::vector<T> d) : grid(g), data(std::move(d)) {
    if (data.size() != grid.size()) throw PreconditionViolation("field: size does not match grid");
  }

  std::size_t size() const { return data.size(); }
  T& operator[](std::size_t i) { return data[i]; }
  const T& operator[](std::size_t i) const { return data[i]; }
  T& operator()(std::size_t i, std::size_t j = 0) { return data[grid.index(i, j)]; }
  const T& operator()(std::size_t i, std::size_t j = 0) const { return data[grid.index(i, j)]; }

  template <class Fn>
  static Field sample(const PeriodicGrid& g, Fn&& fn) {
    Field out(g);
    for (std::size_t j = 0; j < g.n[1]; ++j)
      for (std::size_t i = 0; i < g.n[0]; ++i)
        out(i, j) = fn(g.coord(0, i), g.dim == 2 ? g.coord(1, j) : 0.0);
    return out;
  }

  Field& operator+=(const Field& o) {
    for (std::size_t i = 0; i < data.size(); ++i) data[i] += o.data[i];
    return *this;
  }
  Field& operator-=(const Field& o) {
    for (std::size_t i = 0; i < data.size(); ++i) data[i] -= o.data[i];
    return *this;
  }
  Field& operator*=(double a) {
    for (auto& v : data) v *= a;
    return *this;
  }
  friend Field operator+(Field a, const Field& b) { return a += b; }
  friend Field operator-(Field a, const Field& b) { return a -= b; }
  friend Field operator*(double s, Field a) { return a *= s; }

  bool all_finite() const {
    for (const auto& v : data)
      if (!std::isfinite(std::abs(v))) return false;
    return true;
  }
};

using ScalarField = Field<double>;
using ComplexField = Field<cplx>;

inline ScalarField real_part(const ComplexField& f) {
  ScalarField r(f.grid);
  for (std::size_t i = 0; i < f.size(); ++i) r[i] = f[i].real();
  return r;
}

inline ComplexField complexify(const ScalarField& f) {
  ComplexField r(f.grid);
  for (std::size_t i = 0; i < f.size(); ++i) r[i] = f[i];
  return r;
}

}  // namespace nlskp
