#pragma once

#include <algorithm>
#include <vector>

#include "holocheck/jet.hpp"

namespace holocheck {

// Quintic Hermite spline through samples of a complex function of a real
// parameter. Knot derivatives are estimated from local interpolating
// polynomial fits over up to five neighboring samples, which reproduces
// polynomial data of degree <= 4 exactly. The spline is C^2 at knots and
// smooth inside segments; third derivatives are one-sided at interior knots.
class QuinticSpline {
 public:
  QuinticSpline(std::vector<double> knots, std::vector<cplx> values)
      : knots_(std::move(knots)) {
    const std::size_t m = knots_.size();
    if (m < 2) throw std::invalid_argument("spline: need at least two samples");
    if (values.size() != m) throw std::invalid_argument("spline: knot/value count mismatch");
    for (std::size_t i = 0; i + 1 < m; ++i)
      if (!(knots_[i] < knots_[i + 1]))
        throw std::invalid_argument("spline: knots must be strictly increasing");

    std::vector<cplx> d1(m), d2(m);
    for (std::size_t i = 0; i < m; ++i) estimate_derivatives(values, i, &d1[i], &d2[i]);

    segments_.resize(m - 1);
    for (std::size_t i = 0; i + 1 < m; ++i) {
      const double u = knots_[i + 1] - knots_[i];
      const cplx A = values[i + 1] - values[i] - d1[i] * u - d2[i] * (u * u / 2.0);
      const cplx B = d1[i + 1] - d1[i] - d2[i] * u;
      const cplx C = d2[i + 1] - d2[i];
      Segment& s = segments_[i];
      s.t0 = knots_[i];
      s.a[0] = values[i];
      s.a[1] = d1[i];
      s.a[2] = d2[i] / 2.0;
      const double u2 = u * u, u3 = u2 * u;
      s.a[3] = (10.0 * A - 4.0 * B * u + C * (u2 / 2.0)) / u3;
      s.a[4] = (-15.0 * A + 7.0 * B * u - C * u2) / (u3 * u);
      s.a[5] = (6.0 * A - 3.0 * B * u + C * (u2 / 2.0)) / (u3 * u2);
    }
  }

  double t_min() const { return knots_.front(); }
  double t_max() const { return knots_.back(); }
  const std::vector<double>& knots() const { return knots_; }

  Jet eval(double t, int order = 3, Side side = Side::right) const {
    std::size_t idx = segment_index(t, side);
    const Segment& s = segments_[idx];
    const double x = t - s.t0;
    Jet r(cplx(0.0), order);
    // Horner for the value and each requested derivative of the quintic.
    cplx v = 0.0;
    for (int k = 5; k >= 0; --k) v = v * x + s.a[k];
    r.d[0] = v;
    if (order >= 1) {
      cplx v1 = 0.0;
      for (int k = 5; k >= 1; --k) v1 = v1 * x + double(k) * s.a[k];
      r.d[1] = v1;
    }
    if (order >= 2) {
      cplx v2 = 0.0;
      for (int k = 5; k >= 2; --k) v2 = v2 * x + double(k * (k - 1)) * s.a[k];
      r.d[2] = v2;
    }
    if (order >= 3) {
      cplx v3 = 0.0;
      for (int k = 5; k >= 3; --k) v3 = v3 * x + double(k * (k - 1) * (k - 2)) * s.a[k];
      r.d[3] = v3;
    }
    return r;
  }

 private:
  struct Segment {
    double t0 = 0;
    std::array<cplx, 6> a{};  // monomial coefficients in (t - t0)
  };

  std::size_t segment_index(double t, Side side) const {
    if (t < knots_.front() || t > knots_.back())
      throw std::domain_error("spline: parameter outside range");
    auto it = std::upper_bound(knots_.begin(), knots_.end(), t);
    std::size_t idx = (it == knots_.begin()) ? 0 : static_cast<std::size_t>(it - knots_.begin()) - 1;
    idx = std::min(idx, segments_.size() - 1);
    if (side == Side::left && idx > 0 && t == knots_[idx]) --idx;
    return idx;
  }

  // Interpolating fit of degree w-1 through up to five samples around knot i,
  // solved in the shifted coordinate x = t - t_i for conditioning.
  void estimate_derivatives(const std::vector<cplx>& y, std::size_t i, cplx* d1, cplx* d2) const {
    const std::size_t m = knots_.size();
    const std::size_t w = std::min<std::size_t>(5, m);
    std::size_t lo = (i >= 2) ? i - 2 : 0;
    lo = std::min(lo, m - w);
    std::array<std::array<cplx, 6>, 5> mat{};
    std::array<cplx, 5> rhs{};
    for (std::size_t r = 0; r < w; ++r) {
      const double x = knots_[lo + r] - knots_[i];
      double p = 1.0;
      for (std::size_t c = 0; c < w; ++c) {
        mat[r][c] = p;
        p *= x;
      }
      rhs[r] = y[lo + r];
    }
    // Gaussian elimination with partial pivoting on the w x w system.
    for (std::size_t col = 0; col < w; ++col) {
      std::size_t piv = col;
      for (std::size_t r = col + 1; r < w; ++r)
        if (std::abs(mat[r][col]) > std::abs(mat[piv][col])) piv = r;
      if (piv != col) { std::swap(mat[piv], mat[col]); std::swap(rhs[piv], rhs[col]); }
      if (mat[col][col] == cplx(0.0))
        throw std::runtime_error("spline: singular derivative-estimation system");
      for (std::size_t r = col + 1; r < w; ++r) {
        const cplx f = mat[r][col] / mat[col][col];
        for (std::size_t c = col; c < w; ++c) mat[r][c] -= f * mat[col][c];
        rhs[r] -= f * rhs[col];
      }
    }
    std::array<cplx, 5> coef{};
    for (std::size_t r = w; r-- > 0;) {
      cplx s = rhs[r];
      for (std::size_t c = r + 1; c < w; ++c) s -= mat[r][c] * coef[c];
      coef[r] = s / mat[r][r];
    }
    *d1 = (w >= 2) ? coef[1] : cplx(0.0);
    *d2 = (w >= 3) ? 2.0 * coef[2] : cplx(0.0);
  }

  std::vector<double> knots_;
  std::vector<Segment> segments_;
};

}  // namespace holocheck
