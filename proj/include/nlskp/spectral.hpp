#pragma once

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <type_traits>
#include <utility>
#include <vector>

#include "nlskp/grid.hpp"

namespace nlskp {

// In-place FFTW plans for one grid shape. Planning is serialized through a
// process-wide mutex; execution on fresh arrays is thread-safe.
class FftPlan {
 public:
  FftPlan(std::size_t nx, std::size_t ny) : n_(nx * ny) {
    fftw_complex* buf = fftw_alloc_complex(n_);
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    if (ny == 1) {
      fwd_ = fftw_plan_dft_1d(int(nx), buf, buf, FFTW_FORWARD, flags);
      bwd_ = fftw_plan_dft_1d(int(nx), buf, buf, FFTW_BACKWARD, flags);
    } else {
      fwd_ = fftw_plan_dft_2d(int(ny), int(nx), buf, buf, FFTW_FORWARD, flags);
      bwd_ = fftw_plan_dft_2d(int(ny), int(nx), buf, buf, FFTW_BACKWARD, flags);
    }
    fftw_free(buf);
  }
  ~FftPlan() {
    std::lock_guard<std::mutex> lock(mutex());
    fftw_destroy_plan(fwd_);
    fftw_destroy_plan(bwd_);
  }
  FftPlan(const FftPlan&) = delete;
  FftPlan& operator=(const FftPlan&) = delete;

  void forward(cplx* data) const {
    fftw_execute_dft(fwd_, reinterpret_cast<fftw_complex*>(data),
                     reinterpret_cast<fftw_complex*>(data));
  }

  // normalized: backward(forward(v)) == v
  void backward(cplx* data) const {
    fftw_execute_dft(bwd_, reinterpret_cast<fftw_complex*>(data),
                     reinterpret_cast<fftw_complex*>(data));
    const double s = 1.0 / double(n_);
    for (std::size_t i = 0; i < n_; ++i) data[i] *= s;
  }

  static std::shared_ptr<const FftPlan> get(const PeriodicGrid& g) {
    std::mutex& m = mutex();  // constructed before, destroyed after, the cache
    static std::map<std::pair<std::size_t, std::size_t>, std::shared_ptr<const FftPlan>> cache;
    std::lock_guard<std::mutex> lock(m);
    auto& slot = cache[{g.n[0], g.n[1]}];
    if (!slot) slot = std::make_shared<const FftPlan>(g.n[0], g.n[1]);
    return slot;
  }

  static std::mutex& mutex() {
    static std::mutex m;
    return m;
  }

 private:
  std::size_t n_;
  fftw_plan fwd_{}, bwd_{};
};

// Fourier coefficients (unnormalized forward transform) on a grid.
struct Spectrum {
  PeriodicGrid grid;
  std::vector<cplx> coeffs;
};

inline Spectrum fft(const ComplexField& f) {
  Spectrum s{f.grid, f.data};
  FftPlan::get(f.grid)->forward(s.coeffs.data());
  return s;
}

inline Spectrum fft(const ScalarField& f) { return fft(complexify(f)); }

inline ComplexField ifft(const Spectrum& s) {
  ComplexField f(s.grid, s.coeffs);
  FftPlan::get(s.grid)->backward(f.data.data());
  return f;
}

inline ScalarField ifft_real(const Spectrum& s) { return real_part(ifft(s)); }

// Loop over modes with (storage index, kx, ky, nyquist in any direction).
template <class Fn>
void for_each_mode(const PeriodicGrid& g, Fn&& fn) {
  for (std::size_t j = 0; j < g.n[1]; ++j) {
    const double ky = g.dim == 2 ? g.wavenumber(1, j) : 0.0;
    for (std::size_t i = 0; i < g.n[0]; ++i)
      fn(g.index(i, j), g.wavenumber(0, i), ky, i, j);
  }
}

// Multiply every mode by (i k_axis)^order; odd orders drop the Nyquist mode.
inline void apply_derivative(Spectrum& s, Axis axis, int order) {
  const int a = int(axis);
  if (a >= s.grid.dim) throw PreconditionViolation("derivative: axis not present on grid");
  for_each_mode(s.grid, [&](std::size_t idx, double kx, double ky, std::size_t i, std::size_t j) {
    const double k = a == 0 ? kx : ky;
    const std::size_t ia = a == 0 ? i : j;
    if ((order % 2) && s.grid.nyquist(a, ia)) {
      s.coeffs[idx] = 0.0;
      return;
    }
    cplx m = 1.0;
    for (int o = 0; o < order; ++o) m *= cplx(0.0, k);
    s.coeffs[idx] *= m;
  });
}

inline ComplexField derivative(const ComplexField& f, Axis axis, int order = 1) {
  if (order < 1) throw PreconditionViolation("derivative: order must be >= 1");
  Spectrum s = fft(f);
  apply_derivative(s, axis, order);
  return ifft(s);
}

inline ScalarField derivative(const ScalarField& f, Axis axis, int order = 1) {
  return real_part(derivative(complexify(f), axis, order));
}

// d_x^2 + eps^2 Laplacian across the transverse direction
inline void apply_laplacian_eps(Spectrum& s, double eps) {
  for_each_mode(s.grid, [&](std::size_t idx, double kx, double ky, std::size_t, std::size_t) {
    s.coeffs[idx] *= -(kx * kx + eps * eps * ky * ky);
  });
}

inline ScalarField laplacian_eps(const ScalarField& f, double eps) {
  Spectrum s = fft(f);
  apply_laplacian_eps(s, eps);
  return ifft_real(s);
}

inline ComplexField laplacian_eps(const ComplexField& f, double eps) {
  Spectrum s = fft(f);
  apply_laplacian_eps(s, eps);
  return ifft(s);
}

inline double l2_norm(const ScalarField& f) {
  double s = 0.0;
  for (double v : f.data) s += v * v;
  return std::sqrt(s * f.grid.cell_volume());
}

inline double l2_norm(const ComplexField& f) {
  double s = 0.0;
  for (const cplx& v : f.data) s += std::norm(v);
  return std::sqrt(s * f.grid.cell_volume());
}

template <class T>
double linf_norm(const Field<T>& f) {
  double m = 0.0;
  for (const T& v : f.data) m = std::max(m, double(std::abs(v)));
  return m;
}

// (int (1 + |k|^2)^s |f^|^2)^{1/2}
template <class T>
double hs_norm(const Field<T>& f, double s) {
  const Spectrum sp = fft(f);
  double acc = 0.0;
  for_each_mode(sp.grid, [&](std::size_t idx, double kx, double ky, std::size_t, std::size_t) {
    acc += std::pow(1.0 + kx * kx + ky * ky, s) * std::norm(sp.coeffs[idx]);
  });
  const double N = double(f.grid.size());
  return std::sqrt(acc * f.grid.cell_volume() / N);
}

enum class NormKind { L2, Linf, Hs };

template <class T>
double norm(const Field<T>& f, NormKind kind, double s = 1.0) {
  switch (kind) {
    case NormKind::L2: return l2_norm(f);
    case NormKind::Linf: return linf_norm(f);
    case NormKind::Hs: return hs_norm(f, s);
  }
  return 0.0;
}

template <class T>
double integral(const Field<T>& f) {
  double s = 0.0;
  for (const T& v : f.data) s += std::real(v);
  return s * f.grid.cell_volume();
}

// Per-line x-average; one entry per transverse index.
inline std::vector<double> line_means(const ScalarField& f) {
  const auto& g = f.grid;
  std::vector<double> m(g.n[1], 0.0);
  for (std::size_t j = 0; j < g.n[1]; ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < g.n[0]; ++i) s += f(i, j);
    m[j] = s / double(g.n[0]);
  }
  return m;
}

inline ScalarField remove_line_means(const ScalarField& f) {
  ScalarField out = f;
  const auto m = line_means(f);
  for (std::size_t j = 0; j < f.grid.n[1]; ++j)
    for (std::size_t i = 0; i < f.grid.n[0]; ++i) out(i, j) -= m[j];
  return out;
}

inline void check_zero_line_means(const ScalarField& f, const char* who) {
  const double tol = 1e-10 * std::max(l2_norm(f), 1e-300);
  for (double m : line_means(f))
    if (std::abs(m) > tol)
      throw ZeroMeanViolation(std::string(who) + ": x-mean " + std::to_string(m) +
                              " exceeds tolerance");
}

// Zero-mean antiderivative in x of a field with zero x-mean on every line.
inline ScalarField x_antiderivative(const ScalarField& f) {
  check_zero_line_means(f, "x_antiderivative");
  Spectrum s = fft(f);
  for_each_mode(s.grid, [&](std::size_t idx, double kx, double, std::size_t i, std::size_t) {
    if (kx == 0.0 || s.grid.nyquist(0, i))
      s.coeffs[idx] = 0.0;
    else
      s.coeffs[idx] /= cplx(0.0, kx);
  });
  return ifft_real(s);
}

inline bool dealias_keep(const PeriodicGrid& g, std::size_t i, std::size_t j) {
  auto keep = [&](int a, std::size_t ia) {
    return 3 * std::abs(g.mode(a, ia)) <= long(g.n[a]);
  };
  return keep(0, i) && (g.dim == 1 || keep(1, j));
}

inline void dealias(Spectrum& s) {
  for_each_mode(s.grid, [&](std::size_t idx, double, double, std::size_t i, std::size_t j) {
    if (!dealias_keep(s.grid, i, j)) s.coeffs[idx] = 0.0;
  });
}

template <class T>
Field<T> dealias(const Field<T>& f) {
  Spectrum s = fft(f);
  dealias(s);
  if constexpr (std::is_same_v<T, double>)
    return ifft_real(s);
  else
    return ifft(s);
}

// g(x) = f(x + shift); whole cells by index roll, remainder by phase factors.
template <class T>
Field<T> translate_x(const Field<T>& f, double shift) {
  const auto& g = f.grid;
  const double dx = g.dx(0);
  double r = std::fmod(shift, g.L[0]);
  if (r < 0.0) r += g.L[0];
  long cells = long(std::floor(r / dx));
  double sub = r - double(cells) * dx;
  if (sub > 0.5 * dx) {
    ++cells;
    sub -= dx;
  }
  const std::size_t nx = g.n[0];
  Field<T> out(g);
  for (std::size_t j = 0; j < g.n[1]; ++j)
    for (std::size_t i = 0; i < nx; ++i) out(i, j) = f((i + std::size_t(cells)) % nx, j);
  if (sub == 0.0) return out;
  Spectrum s = fft(out);
  for_each_mode(g, [&](std::size_t idx, double kx, double, std::size_t i, std::size_t) {
    if (g.nyquist(0, i))
      s.coeffs[idx] *= std::cos(kx * sub);
    else
      s.coeffs[idx] *= std::polar(1.0, kx * sub);
  });
  if constexpr (std::is_same_v<T, double>)
    return ifft_real(s);
  else
    return ifft(s);
}

}  // namespace nlskp
