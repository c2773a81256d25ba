#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <stdexcept>

namespace holocheck {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.141592653589793238462643383279502884;

// One-sided limit selector for derivative evaluation at breakpoints.
enum class Side { left, right };

// Derivative jet of a complex-valued function of a real parameter: the value
// and derivatives up to `order` (at most 3). Arithmetic propagates
// derivatives through the Leibniz and chain rules, so evaluating a formula on
// jets yields the exact derivatives of that formula. Mixing jets of different
// order yields the smaller order.
struct Jet {
  std::array<cplx, 4> d{};  // d[k] = k-th derivative
  int order = 3;

  Jet() = default;
  explicit Jet(cplx value, int ord = 3) : order(ord) {
    if (ord < 0 || ord > 3) throw std::invalid_argument("Jet: order must be in [0,3]");
    d[0] = value;
  }

  static Jet variable(double t, int ord = 3) {
    Jet j(cplx(t, 0.0), ord);
    if (ord >= 1) j.d[1] = 1.0;
    return j;
  }

  cplx value() const { return d[0]; }

  cplx deriv(int k) const {
    if (k < 0 || k > order) throw std::out_of_range("Jet: derivative order exceeded");
    return d[k];
  }

  // Jet of the derivative as a function of t, one order lower.
  Jet differentiate() const {
    if (order < 1) throw std::out_of_range("Jet: cannot differentiate an order-0 jet");
    Jet r(d[1], order - 1);
    for (int k = 1; k <= r.order; ++k) r.d[k] = d[k + 1];
    return r;
  }
};

inline Jet operator+(const Jet& f, const Jet& g) {
  Jet r(f.d[0] + g.d[0], std::min(f.order, g.order));
  for (int k = 1; k <= r.order; ++k) r.d[k] = f.d[k] + g.d[k];
  return r;
}

inline Jet operator-(const Jet& f, const Jet& g) {
  Jet r(f.d[0] - g.d[0], std::min(f.order, g.order));
  for (int k = 1; k <= r.order; ++k) r.d[k] = f.d[k] - g.d[k];
  return r;
}

inline Jet operator-(const Jet& f) {
  Jet r(-f.d[0], f.order);
  for (int k = 1; k <= r.order; ++k) r.d[k] = -f.d[k];
  return r;
}

inline Jet operator*(const Jet& f, const Jet& g) {
  static constexpr double binom[4][4] = {
      {1, 0, 0, 0}, {1, 1, 0, 0}, {1, 2, 1, 0}, {1, 3, 3, 1}};
  Jet r(cplx(0.0), std::min(f.order, g.order));
  for (int k = 0; k <= r.order; ++k) {
    cplx s = 0.0;
    for (int j = 0; j <= k; ++j) s += binom[k][j] * f.d[j] * g.d[k - j];
    r.d[k] = s;
  }
  return r;
}

// Solves f = q*g for the derivatives of q by the Leibniz rule.
inline Jet operator/(const Jet& f, const Jet& g) {
  if (g.d[0] == cplx(0.0)) throw std::domain_error("Jet: division by a zero value");
  Jet q(f.d[0] / g.d[0], std::min(f.order, g.order));
  if (q.order >= 1) q.d[1] = (f.d[1] - q.d[0] * g.d[1]) / g.d[0];
  if (q.order >= 2) q.d[2] = (f.d[2] - q.d[0] * g.d[2] - 2.0 * q.d[1] * g.d[1]) / g.d[0];
  if (q.order >= 3)
    q.d[3] = (f.d[3] - q.d[0] * g.d[3] - 3.0 * q.d[1] * g.d[2] - 3.0 * q.d[2] * g.d[1]) / g.d[0];
  return q;
}

inline Jet operator+(const Jet& f, cplx c) { Jet r = f; r.d[0] += c; return r; }
inline Jet operator+(cplx c, const Jet& f) { return f + c; }
inline Jet operator-(const Jet& f, cplx c) { Jet r = f; r.d[0] -= c; return r; }
inline Jet operator-(cplx c, const Jet& f) { return -(f - c); }
inline Jet operator*(const Jet& f, cplx c) {
  Jet r(f.d[0] * c, f.order);
  for (int k = 1; k <= r.order; ++k) r.d[k] = f.d[k] * c;
  return r;
}
inline Jet operator*(cplx c, const Jet& f) { return f * c; }
inline Jet operator/(const Jet& f, cplx c) { return f * (cplx(1.0) / c); }
inline Jet operator/(cplx c, const Jet& f) { return Jet(c, f.order) / f; }
inline Jet operator+(const Jet& f, double c) { return f + cplx(c); }
inline Jet operator+(double c, const Jet& f) { return f + cplx(c); }
inline Jet operator-(const Jet& f, double c) { return f - cplx(c); }
inline Jet operator-(double c, const Jet& f) { return cplx(c) - f; }
inline Jet operator*(const Jet& f, double c) { return f * cplx(c); }
inline Jet operator*(double c, const Jet& f) { return f * cplx(c); }
inline Jet operator/(const Jet& f, double c) { return f / cplx(c); }
inline Jet operator/(double c, const Jet& f) { return cplx(c) / f; }

// Valid because the parameter is real: conjugation commutes with d/dt.
inline Jet conj(const Jet& f) {
  Jet r(std::conj(f.d[0]), f.order);
  for (int k = 1; k <= r.order; ++k) r.d[k] = std::conj(f.d[k]);
  return r;
}

inline Jet real_part(const Jet& f) { return (f + conj(f)) * 0.5; }
inline Jet imag_part(const Jet& f) { return (f - conj(f)) * cplx(0.0, -0.5); }

// |f|^2 as a real-valued jet.
inline Jet abs2(const Jet& f) { return f * conj(f); }

inline Jet exp(const Jet& u) {
  Jet r(std::exp(u.d[0]), u.order);
  const cplx e = r.d[0];
  if (r.order >= 1) r.d[1] = e * u.d[1];
  if (r.order >= 2) r.d[2] = e * (u.d[2] + u.d[1] * u.d[1]);
  if (r.order >= 3)
    r.d[3] = e * (u.d[3] + 3.0 * u.d[1] * u.d[2] + u.d[1] * u.d[1] * u.d[1]);
  return r;
}

inline Jet sin(const Jet& u) {
  Jet r(std::sin(u.d[0]), u.order);
  const cplx s = r.d[0], c = std::cos(u.d[0]);
  const cplx u1 = u.d[1], u2 = u.d[2], u3 = u.d[3];
  if (r.order >= 1) r.d[1] = c * u1;
  if (r.order >= 2) r.d[2] = c * u2 - s * u1 * u1;
  if (r.order >= 3) r.d[3] = c * u3 - 3.0 * s * u1 * u2 - c * u1 * u1 * u1;
  return r;
}

inline Jet cos(const Jet& u) {
  Jet r(std::cos(u.d[0]), u.order);
  const cplx c = r.d[0], s = std::sin(u.d[0]);
  const cplx u1 = u.d[1], u2 = u.d[2], u3 = u.d[3];
  if (r.order >= 1) r.d[1] = -s * u1;
  if (r.order >= 2) r.d[2] = -s * u2 - c * u1 * u1;
  if (r.order >= 3) r.d[3] = -s * u3 - 3.0 * c * u1 * u2 + s * u1 * u1 * u1;
  return r;
}

// Principal branch; requires a nonzero base value.
inline Jet sqrt(const Jet& u) {
  if (u.d[0] == cplx(0.0)) throw std::domain_error("Jet: sqrt at a branch point");
  Jet r(std::sqrt(u.d[0]), u.order);
  const cplx s0 = r.d[0];
  if (r.order >= 1) r.d[1] = u.d[1] / (2.0 * s0);
  if (r.order >= 2) r.d[2] = (u.d[2] - 2.0 * r.d[1] * r.d[1]) / (2.0 * s0);
  if (r.order >= 3) r.d[3] = (u.d[3] - 6.0 * r.d[1] * r.d[2]) / (2.0 * s0);
  return r;
}

inline Jet pow_int(const Jet& f, int n) {
  if (n < 0) return Jet(cplx(1.0), f.order) / pow_int(f, -n);
  Jet r(cplx(1.0), f.order);
  Jet base = f;
  int e = n;
  while (e > 0) {
    if (e & 1) r = r * base;
    e >>= 1;
    if (e) base = base * base;
  }
  return r;
}

}  // namespace holocheck
