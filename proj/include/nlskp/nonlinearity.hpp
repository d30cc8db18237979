#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <complex>
#include <cstddef>
#include <sstream>
#include <string>
#include <vector>

#include "nlskp/errors.hpp"

namespace nlskp {

// Dense polynomial, coefficient i multiplies x^i.
class Polynomial {
 public:
  Polynomial() = default;
  explicit Polynomial(std::vector<double> c) : c_(std::move(c)) { trim(); }

  const std::vector<double>& coeffs() const { return c_; }
  std::size_t degree() const { return c_.empty() ? 0 : c_.size() - 1; }
  double coeff(std::size_t i) const { return i < c_.size() ? c_[i] : 0.0; }

  double operator()(double x) const {
    double s = 0.0;
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) s = s * x + *it;
    return s;
  }

  Polynomial derivative() const {
    std::vector<double> d;
    for (std::size_t i = 1; i < c_.size(); ++i) d.push_back(double(i) * c_[i]);
    return Polynomial(d);
  }

  // zero constant term
  Polynomial antiderivative() const {
    std::vector<double> a(c_.size() + 1, 0.0);
    for (std::size_t i = 0; i < c_.size(); ++i) a[i + 1] = c_[i] / double(i + 1);
    return Polynomial(a);
  }

  // p(x0 + s) as a polynomial in s
  Polynomial shifted(double x0) const {
    std::vector<double> b = c_;
    const std::size_t n = b.size();
    for (std::size_t k = 0; k + 1 < n; ++k)
      for (std::size_t j = n - 1; j > k; --j) b[j - 1] += x0 * b[j];
    return Polynomial(b);
  }

  Polynomial operator*(const Polynomial& o) const {
    if (c_.empty() || o.c_.empty()) return {};
    std::vector<double> r(c_.size() + o.c_.size() - 1, 0.0);
    for (std::size_t i = 0; i < c_.size(); ++i)
      for (std::size_t j = 0; j < o.c_.size(); ++j) r[i + j] += c_[i] * o.c_[j];
    return Polynomial(r);
  }

  Polynomial operator+(const Polynomial& o) const {
    std::vector<double> r(std::max(c_.size(), o.c_.size()), 0.0);
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = coeff(i) + o.coeff(i);
    return Polynomial(r);
  }

  Polynomial scaled(double a) const {
    std::vector<double> r = c_;
    for (auto& x : r) x *= a;
    return Polynomial(r);
  }

  // p(q(x))
  Polynomial compose(const Polynomial& q) const {
    Polynomial r;
    for (auto it = c_.rbegin(); it != c_.rend(); ++it)
      r = r * q + Polynomial({*it});
    return r;
  }

  // drop monomials of degree < k
  Polynomial tail(std::size_t k) const {
    std::vector<double> r = c_;
    for (std::size_t i = 0; i < std::min(k, r.size()); ++i) r[i] = 0.0;
    return Polynomial(r);
  }

 private:
  void trim() {
    while (!c_.empty() && c_.back() == 0.0) c_.pop_back();
  }
  std::vector<double> c_;
};

enum class NonlinearityKind { gross_pitaevskii, cubic_quintic, user_polynomial };

enum class Remainder { F3, F4, Q, tildeF, g };

struct DeltaBounds {
  double delta;
  double C_above;
};

class NonlinearityModel {
 public:
  static NonlinearityModel gross_pitaevskii() {
    return NonlinearityModel(NonlinearityKind::gross_pitaevskii, Polynomial({-1.0, 1.0}));
  }

  // f(R) = a1 (R - 1) + a2 (R^2 - 1)
  static NonlinearityModel cubic_quintic(double a1, double a2) {
    return NonlinearityModel(NonlinearityKind::cubic_quintic,
                             Polynomial({-a1 - a2, a1, a2}));
  }

  static NonlinearityModel user_polynomial(std::vector<double> coeffs) {
    return NonlinearityModel(NonlinearityKind::user_polynomial, Polynomial(std::move(coeffs)));
  }

  // "gp" | "poly:c0,c1,..." | "cq:a1,a2"
  static NonlinearityModel parse(const std::string& spec) {
    auto numbers = [&](const std::string& s) {
      std::vector<double> v;
      std::stringstream ss(s);
      std::string tok;
      while (std::getline(ss, tok, ',')) {
        try {
          std::size_t pos = 0;
          v.push_back(std::stod(tok, &pos));
          while (pos < tok.size() && std::isspace((unsigned char)tok[pos])) ++pos;
          if (pos != tok.size()) throw std::invalid_argument(tok);
        } catch (const std::exception&) {
          throw ConfigError("nonlinearity: bad coefficient '" + tok + "'");
        }
      }
      return v;
    };
    if (spec == "gp") return gross_pitaevskii();
    if (spec.rfind("poly:", 0) == 0) return user_polynomial(numbers(spec.substr(5)));
    if (spec.rfind("cq:", 0) == 0) {
      auto v = numbers(spec.substr(3));
      if (v.size() != 2) throw ConfigError("nonlinearity: cq needs two coefficients");
      return cubic_quintic(v[0], v[1]);
    }
    throw ConfigError("nonlinearity: unknown model '" + spec + "'");
  }

  NonlinearityKind kind() const { return kind_; }
  const Polynomial& f_poly() const { return f_; }

  double f(double R) const { return f_(R); }
  double fprime(double R) const { return fp_(R); }
  double fsecond(double R) const { return fpp_(R); }
  double F(double R) const { return F_dev_(R - 1.0); }
  // F(1 + s), evaluated in powers of s
  double F_dev(double s) const { return F_dev_(s); }
  // f(1 + s), evaluated in powers of s
  double f_dev(double s) const { return f_dev_(s); }
  // f(1 + s) - c^2 s
  double f_dev_quadratic(double s) const { return f_dev_tail2_(s); }

  double c() const { return c_; }
  double k() const { return k_; }

  double remainder(Remainder which, double r) const {
    if (1.0 + r < 0.0) throw DomainError("remainder: 1 + r < 0");
    switch (which) {
      case Remainder::F3: return F3_(r);
      case Remainder::F4: return F4_(r);
      case Remainder::Q: return Q_(r);
      case Remainder::tildeF: return tildeF_(r);
      case Remainder::g:
        if (std::abs(r) > 1.0) throw DomainError("g: |r| > 1");
        return g_(r);
    }
    return 0.0;
  }

  double g(double r) const { return remainder(Remainder::g, r); }

  // f'(|1 + a|^2)/c^2 - 1 for complex a
  double g(std::complex<double> a) const {
    const double s = 2.0 * a.real() + std::norm(a);
    return fp_dev_(s) / (c_ * c_) - 1.0;
  }

  // f'((1+r)^2)(1+r)/c^2 - 1
  double g_real_amplitude(double r) const { return gr_(r); }

  // Largest delta <= 1/2 with F(R) >= (c^2/2)(R-1)^2 on |R-1| <= delta.
  DeltaBounds delta_bounds(int samples = 10000) const {
    auto ok = [&](double d) {
      for (int i = 0; i <= samples; ++i) {
        const double s = -d + 2.0 * d * i / samples;
        if (F_dev_(s) < 0.5 * c_ * c_ * s * s) return false;
      }
      return true;
    };
    double lo = 0.0, hi = 0.5;
    if (ok(hi)) {
      lo = hi;
    } else {
      for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (lo + hi);
        (ok(mid) ? lo : hi) = mid;
      }
    }
    double C = 0.0;
    for (int i = 0; i <= samples; ++i) {
      const double s = -lo + 2.0 * lo * i / samples;
      if (s != 0.0) C = std::max(C, F_dev_(s) / (s * s));
    }
    if (lo == 0.0) C = c_ * c_;
    return {lo, C};
  }

 private:
  NonlinearityModel(NonlinearityKind kind, Polynomial f) : kind_(kind), f_(std::move(f)) {
    double scale = 0.0;
    for (double x : f_.coeffs()) scale += std::abs(x);
    if (f_.coeffs().empty() || std::abs(f_(1.0)) > 1e-12 * scale)
      throw ConfigError("nonlinearity: f(1) must vanish");
    fp_ = f_.derivative();
    fpp_ = fp_.derivative();
    if (!(fp_(1.0) > 0.0)) throw ConfigError("nonlinearity: f'(1) must be positive");
    c_ = std::sqrt(fp_(1.0));
    k_ = 6.0 + 2.0 * fpp_(1.0) / (c_ * c_);

    const Polynomial b = f_.shifted(1.0).tail(1);  // f(1+s); f(1) = 0 exactly
    f_dev_ = b;
    F_dev_ = b.antiderivative().scaled(2.0);
    f_dev_tail2_ = b.tail(2);
    fp_dev_ = fp_.shifted(1.0);

    const double c2 = c_ * c_;
    F3_ = F_dev_.tail(3);
    F4_ = F_dev_.tail(4);
    const Polynomial sq({0.0, 2.0, 1.0});       // (1+r)^2 - 1
    const Polynomial fq = b.compose(sq);        // f((1+r)^2)
    tildeF_ = fq.tail(2).scaled(1.0 / c2);
    Q_ = fq.tail(3).scaled(1.0 / c2);
    g_ = fp_dev_.compose(sq).tail(1).scaled(1.0 / c2);
    gr_ = (fp_dev_.compose(sq) * Polynomial({1.0, 1.0})).tail(1).scaled(1.0 / c2);
  }

  NonlinearityKind kind_;
  Polynomial f_, fp_, fpp_;
  Polynomial f_dev_, F_dev_, f_dev_tail2_, fp_dev_;
  Polynomial F3_, F4_, tildeF_, Q_, g_, gr_;
  double c_ = 1.0, k_ = 6.0;
};

}  // namespace nlskp
