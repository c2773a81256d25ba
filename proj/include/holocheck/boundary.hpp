#pragma once

#include <numeric>

#include "holocheck/family.hpp"
#include "holocheck/fft.hpp"
#include "holocheck/function_spec.hpp"

namespace holocheck {

// Samples of f on one circle of the family together with the Fourier/Laurent
// coefficients of the restriction: f(c + r e^{i theta}) = sum a_n e^{i n theta},
// -N/2 <= n < N/2. Vanishing negative coefficients mean the trace extends
// holomorphically into the disc.
struct BoundaryTrace {
  double t = 0;
  cplx center{};
  double radius = 0;
  int n = 0;
  std::vector<cplx> values;        // f at theta_j = 2 pi j / N
  std::vector<cplx> coefficients;  // FFT order: index k holds a_n, n = k < N/2 ? k : k - N

  cplx coeff(int mode) const {
    const int half = n / 2;
    if (mode < -half || mode >= half) throw std::out_of_range("trace: mode outside [-N/2, N/2)");
    return coefficients[static_cast<std::size_t>(mode >= 0 ? mode : mode + n)];
  }
};

inline BoundaryTrace sample_trace(const FunctionSpec& f, const CircleFamily& family, double t,
                                  int N) {
  if (N < 16 || !is_power_of_two(static_cast<std::size_t>(N)))
    throw std::invalid_argument("sample_trace: N must be a power of two >= 16");
  const FamilyJet j = family.jet(t, 0);
  BoundaryTrace tr;
  tr.t = t;
  tr.center = j.c0;
  tr.radius = j.r0;
  tr.n = N;
  tr.values.resize(N);
  for (int k = 0; k < N; ++k)
    tr.values[k] = f(j.c0 + j.r0 * std::polar(1.0, 2.0 * kPi * k / N));
  tr.coefficients = tr.values;
  fft_inplace(tr.coefficients, false);
  for (cplx& a : tr.coefficients) a /= double(N);
  return tr;
}

// max |a_n| over n < 0: zero (up to truncation) iff the trace is the boundary
// value of a function holomorphic in the disc.
inline double extendibility_defect(const BoundaryTrace& tr) {
  if (tr.coefficients.empty()) throw std::invalid_argument("trace: coefficients not populated");
  double defect = 0.0;
  for (int k = tr.n / 2; k < tr.n; ++k)
    defect = std::max(defect, std::abs(tr.coefficients[static_cast<std::size_t>(k)]));
  return defect;
}

// Truncated power series sum_{n>=0} a_n ((z-c)/r)^n; spectrally accurate for
// strictly interior z.
inline cplx evaluate_extension(const BoundaryTrace& tr, cplx z) {
  const cplx zeta = (z - tr.center) / tr.radius;
  if (std::abs(zeta) >= 1.0)
    throw std::domain_error("evaluate_extension: point on or outside the circle");
  cplx acc = 0.0;
  for (int k = tr.n / 2 - 1; k >= 0; --k)
    acc = acc * zeta + tr.coefficients[static_cast<std::size_t>(k)];
  return acc;
}

namespace detail {

// g(t) = |z - c(t)|^2 - r(t)^2; negative inside the closed disc.
inline double incidence_residual(const CircleFamily& f, double t, cplx z) {
  const FamilyJet j = f.jet(t, 0);
  const cplx q = z - j.c0;
  return q.real() * q.real() + q.imag() * q.imag() - j.r0 * j.r0;
}

}  // namespace detail

// Max disagreement |f_t(z) - f_s(z)| over circles whose open disc contains z,
// sampled over the incidence set with an endpoint margin. Needs z interior to
// at least two sampled discs.
inline double consistency_defect(const FunctionSpec& f, const CircleFamily& family, cplx z,
                                 int n_t, int N) {
  if (n_t < 2) throw std::invalid_argument("consistency_defect: n_t must be >= 2");
  const double a = family.t_min(), b = family.t_max();
  const int scan = std::max(512, 4 * n_t);
  // locate incidence intervals by a sign scan of g
  std::vector<std::pair<double, double>> intervals;
  double prev_t = a;
  if (detail::incidence_residual(family, a, z) <= 0.0)
    throw std::domain_error("consistency_defect: z inside the closed disc at t_min");
  double open_at = 0.0;
  bool inside = false;
  for (int i = 1; i < scan; ++i) {
    const double t = a + (b - a) * double(i) / double(scan - 1);
    const double g = detail::incidence_residual(family, t, z);
    if (!inside && g < 0.0) {
      double lo = prev_t, hi = t;
      for (int k = 0; k < 80 && hi - lo > 1e-14 * std::max(1.0, b - a); ++k) {
        const double mid = 0.5 * (lo + hi);
        (detail::incidence_residual(family, mid, z) < 0.0 ? hi : lo) = mid;
      }
      open_at = 0.5 * (lo + hi);
      inside = true;
    } else if (inside && g > 0.0) {
      double lo = prev_t, hi = t;
      for (int k = 0; k < 80 && hi - lo > 1e-14 * std::max(1.0, b - a); ++k) {
        const double mid = 0.5 * (lo + hi);
        (detail::incidence_residual(family, mid, z) < 0.0 ? lo : hi) = mid;
      }
      intervals.emplace_back(open_at, 0.5 * (lo + hi));
      inside = false;
    }
    prev_t = t;
  }
  if (inside) throw std::domain_error("consistency_defect: z inside the closed disc at t_max");

  std::vector<cplx> vals;
  for (const auto& [lo, hi] : intervals) {
    const double band = 1e-3 * (hi - lo);
    const double u0 = lo + band, u1 = hi - band;
    if (!(u1 > u0)) continue;
    for (int i = 0; i < n_t; ++i) {
      const double t = (n_t == 1) ? 0.5 * (u0 + u1) : u0 + (u1 - u0) * double(i) / double(n_t - 1);
      const BoundaryTrace tr = sample_trace(f, family, t, N);
      if (std::abs((z - tr.center) / tr.radius) >= 1.0 - 1e-9) continue;
      vals.push_back(evaluate_extension(tr, z));
    }
  }
  if (vals.size() < 2)
    throw std::domain_error("consistency_defect: z covered by fewer than two discs");
  double defect = 0.0;
  for (std::size_t i = 0; i < vals.size(); ++i)
    for (std::size_t j = i + 1; j < vals.size(); ++j)
      defect = std::max(defect, std::abs(vals[i] - vals[j]));
  return defect;
}

}  // namespace holocheck
