#pragma once

#include <limits>
#include <optional>

#include "holocheck/family.hpp"

namespace holocheck {

// Critical values of Z(t,theta) = c(t) + r(t) e^{i theta}: points of the
// circle whose velocity under t is tangent to the circle. Each circle carries
// exactly two of them,
//   p(t) = c(t) - r(t) (r'(t) +- i sqrt(|c'(t)|^2 - r'(t)^2)) / conj(c'(t)),
// and the discriminant is positive wherever |c'| > |r'|.
inline std::pair<cplx, cplx> sliding_points(const CircleFamily& f, double t) {
  if (f.is_breakpoint(t))
    throw std::invalid_argument("sliding_points: t is a breakpoint of the family");
  const FamilyJet j = f.jet(t, 1);
  const double disc = std::norm(j.c1) - j.r1 * j.r1;
  if (!(disc > 0.0))
    throw std::domain_error("sliding_points: discriminant |c'|^2 - r'^2 is not positive");
  const double s = std::sqrt(disc);
  const cplx denom = std::conj(j.c1);
  const cplx p_plus = j.c0 - j.r0 * (cplx(j.r1, s) / denom);
  const cplx p_minus = j.c0 - j.r0 * (cplx(j.r1, -s) / denom);
  return {p_plus, p_minus};
}

namespace detail {

// Order-3 family jet that never trips the breakpoint precondition: interior
// machinery (bisection refinements, dense sampling) takes the right-hand jet
// at spline knots.
inline FamilyJet guarded_jet3(const CircleFamily& f, double t) {
  if (f.is_breakpoint(t) || t == f.t_max())
    return f.jet(t, 3, t == f.t_max() ? Side::left : Side::right);
  return f.jet(t, 3);
}

}  // namespace detail

// Jet (order 2) of one sliding branch, from the order-3 family jet.
inline Jet sliding_point_jet(const FamilyJet& fj, int sign) {
  if (fj.order < 3) throw std::invalid_argument("sliding_point_jet: needs an order-3 family jet");
  const Jet c = fj.c_jet();
  const Jet r = fj.r_jet();
  const Jet cp = c.differentiate();
  const Jet rp = r.differentiate();
  const Jet disc = abs2(cp) - rp * rp;
  if (!(disc.value().real() > 0.0))
    throw std::domain_error("sliding_point_jet: discriminant is not positive");
  const Jet s = sqrt(disc);
  return c - r * ((rp + cplx(0.0, double(sign)) * s) / conj(cp));
}

// Radius of curvature |p'|^3 / |Im(conj(p') p'')|; infinity when the
// denominator vanishes relative to |p'|^3.
inline double curvature_radius(cplx dp, cplx d2p) {
  const double speed3 = std::pow(std::abs(dp), 3);
  const double denom = std::abs((std::conj(dp) * d2p).imag());
  if (denom < 1e-14 * speed3) return std::numeric_limits<double>::infinity();
  return speed3 / denom;
}

struct BranchSample {
  double t = 0;
  cplx p{}, dp{}, d2p{};
  double rho = 0;  // +inf for straight pieces
};

struct SlidingBranch {
  int sign = +1;
  std::vector<BranchSample> samples;
};

struct CriticalSet {
  SlidingBranch plus{+1, {}}, minus{-1, {}};
  std::vector<double> singular_points;  // t with p'(t) ~ 0 on either branch
  bool simple = true;
  double min_regular_separation = std::numeric_limits<double>::infinity();
  std::optional<std::pair<double, double>> collision_witness;
};

enum class TangencyKind { interior, exterior };
enum class TangencyLabel { case1, case2, case3_forbidden };

struct TangencyCase {
  TangencyLabel label = TangencyLabel::case1;
  TangencyKind tangency = TangencyKind::interior;
  double rho = 0;
  double r = 0;
  double kappa_toward_center = 0;  // signed curvature, positive bending toward c(t)
  bool family_degeneracy = false;  // case3 configuration: implies c'(t) ~ 0
};

inline const char* to_string(TangencyLabel l) {
  switch (l) {
    case TangencyLabel::case1: return "case1";
    case TangencyLabel::case2: return "case2";
    case TangencyLabel::case3_forbidden: return "case3_forbidden";
  }
  return "?";
}

// Classifies the tangency of the critical curve and the circle at p(t):
// interior when the curvature center of the branch lies on the same side of
// the common tangent as c(t). Straight pieces (rho = inf) count as interior.
inline TangencyCase tangency_case(const CircleFamily& f, int branch_sign, double t,
                                  double tol = 1e-9) {
  const FamilyJet fj = f.jet(t, 3);
  const Jet pj = sliding_point_jet(fj, branch_sign);
  const cplx p = pj.d[0], dp = pj.d[1], d2p = pj.d[2];
  const double speed = std::abs(dp);
  const double scale = std::max(1.0, std::abs(fj.c1));
  if (speed <= 1e-7 * scale)
    throw std::invalid_argument("tangency_case: t is a singular point of the branch");

  TangencyCase out;
  out.r = fj.r0;
  out.rho = curvature_radius(dp, d2p);
  const double kappa = (std::conj(dp) * d2p).imag() / (speed * speed * speed);
  const cplx toward_center = fj.c0 - p;
  const double side = (std::conj(dp) * toward_center).imag();
  out.kappa_toward_center = kappa * (side >= 0.0 ? 1.0 : -1.0);

  if (!std::isfinite(out.rho)) {
    out.tangency = TangencyKind::interior;
    out.label = TangencyLabel::case1;
    return out;
  }
  out.tangency = out.kappa_toward_center >= 0.0 ? TangencyKind::interior : TangencyKind::exterior;
  if (out.tangency == TangencyKind::interior && std::abs(out.rho - out.r) < tol) {
    out.label = TangencyLabel::case3_forbidden;
    out.family_degeneracy = true;
    return out;
  }
  if (out.tangency == TangencyKind::interior && out.rho < out.r) out.label = TangencyLabel::case2;
  else out.label = TangencyLabel::case1;
  return out;
}

// Samples both sliding branches with derivatives and curvature, locates
// singular points, and scans regular points pairwise for collisions (the
// sampled "simplicity" check).
inline CriticalSet build_critical_curves(const CircleFamily& f, int n_samples = 512) {
  if (n_samples < 16) throw std::invalid_argument("build_critical_curves: n_samples >= 16");
  CriticalSet out;
  const double a = f.t_min(), b = f.t_max();
  const double span = b - a;

  auto sample_branch = [&](int sign, SlidingBranch* br) {
    br->sign = sign;
    br->samples.reserve(n_samples);
    for (int i = 0; i < n_samples; ++i) {
      // midpoint grid avoids endpoints and most spline knots
      const double t = a + span * (i + 0.5) / double(n_samples);
      if (f.is_breakpoint(t)) continue;
      const Jet pj = sliding_point_jet(detail::guarded_jet3(f, t), sign);
      BranchSample s;
      s.t = t;
      s.p = pj.d[0];
      s.dp = pj.d[1];
      s.d2p = pj.d[2];
      s.rho = curvature_radius(s.dp, s.d2p);
      br->samples.push_back(s);
    }
  };
  sample_branch(+1, &out.plus);
  sample_branch(-1, &out.minus);

  // singular points: near-zeros of |p'|^2, located via sign changes of its
  // derivative 2 Re(conj(p') p'') and a speed threshold
  for (const SlidingBranch* br : {&out.plus, &out.minus}) {
    double typical = 0.0;
    for (const auto& s : br->samples) typical = std::max(typical, std::abs(s.dp));
    const double thresh = 1e-6 * std::max(typical, 1e-12);
    for (std::size_t i = 1; i < br->samples.size(); ++i) {
      const auto& s0 = br->samples[i - 1];
      const auto& s1 = br->samples[i];
      const double h0 = (std::conj(s0.dp) * s0.d2p).real();
      const double h1 = (std::conj(s1.dp) * s1.d2p).real();
      if (h0 < 0.0 && h1 >= 0.0) {
        double lo = s0.t, hi = s1.t;
        for (int k = 0; k < 60 && hi - lo > 1e-14 * std::max(1.0, span); ++k) {
          const double mid = 0.5 * (lo + hi);
          const Jet pj = sliding_point_jet(detail::guarded_jet3(f, mid), br->sign);
          ((std::conj(pj.d[1]) * pj.d[2]).real() < 0.0 ? lo : hi) = mid;
        }
        const double tstar = 0.5 * (lo + hi);
        const Jet pj = sliding_point_jet(detail::guarded_jet3(f, tstar), br->sign);
        if (std::abs(pj.d[1]) < thresh) out.singular_points.push_back(tstar);
      }
    }
  }
  std::sort(out.singular_points.begin(), out.singular_points.end());

  // sampled simplicity of the regular part: pairwise collision scan
  struct RegPt { double t; cplx p; int sign; double speed; };
  std::vector<RegPt> reg;
  double typical_speed = 0.0;
  for (const SlidingBranch* br : {&out.plus, &out.minus})
    for (const auto& s : br->samples) typical_speed = std::max(typical_speed, std::abs(s.dp));
  double geom = 1.0;
  for (const auto& s : out.plus.samples) geom = std::max(geom, std::abs(s.p));
  for (const SlidingBranch* br : {&out.plus, &out.minus})
    for (const auto& s : br->samples)
      if (std::abs(s.dp) > 1e-4 * typical_speed) reg.push_back({s.t, s.p, br->sign, std::abs(s.dp)});
  const double delta = 4.0 * span / double(n_samples);
  for (std::size_t i = 0; i < reg.size(); ++i)
    for (std::size_t j = i + 1; j < reg.size(); ++j) {
      if (reg[i].sign == reg[j].sign && std::abs(reg[i].t - reg[j].t) < delta) continue;
      const double d = std::abs(reg[i].p - reg[j].p);
      if (d < out.min_regular_separation) {
        out.min_regular_separation = d;
        out.collision_witness = {reg[i].t, reg[j].t};
      }
    }
  out.simple = out.min_regular_separation > 1e-9 * geom;
  return out;
}

// Independent route to the critical set: zeros of the Jacobian determinant of
// (t, theta) -> Z(t, theta) located on a grid and refined in theta.
inline std::vector<cplx> critical_values_oracle(const CircleFamily& f, int n_t = 64,
                                                int n_theta = 128) {
  std::vector<cplx> cloud;
  const double a = f.t_min(), b = f.t_max();
  auto det = [](const FamilyJet& j, double theta) {
    // det of the real Jacobian equals r (Re(conj(c') e^{i theta}) + r')
    return j.r0 * ((std::conj(j.c1) * std::polar(1.0, theta)).real() + j.r1);
  };
  for (int i = 0; i < n_t; ++i) {
    const double t = a + (b - a) * (i + 0.5) / double(n_t);
    if (f.is_breakpoint(t)) continue;
    const FamilyJet j = f.jet(t, 1);
    double prev_theta = 0.0, prev_d = det(j, 0.0);
    for (int k = 1; k <= n_theta; ++k) {
      const double theta = 2.0 * kPi * double(k) / double(n_theta);
      const double d = det(j, theta);
      if ((prev_d < 0.0) != (d < 0.0)) {
        double lo = prev_theta, hi = theta;
        double dlo = prev_d;
        for (int it = 0; it < 80 && hi - lo > 1e-14; ++it) {
          const double mid = 0.5 * (lo + hi);
          const double dm = det(j, mid);
          if ((dm < 0.0) == (dlo < 0.0)) { lo = mid; dlo = dm; }
          else hi = mid;
        }
        cloud.push_back(j.c0 + j.r0 * std::polar(1.0, 0.5 * (lo + hi)));
      }
      prev_theta = theta;
      prev_d = d;
    }
  }
  return cloud;
}

// Directed/symmetric Hausdorff distances between finite point clouds.
inline double hausdorff_distance(const std::vector<cplx>& A, const std::vector<cplx>& B) {
  if (A.empty() || B.empty()) throw std::invalid_argument("hausdorff: empty cloud");
  auto directed = [](const std::vector<cplx>& X, const std::vector<cplx>& Y) {
    double worst = 0.0;
    for (cplx x : X) {
      double best = std::numeric_limits<double>::infinity();
      for (cplx y : Y) best = std::min(best, std::abs(x - y));
      worst = std::max(worst, best);
    }
    return worst;
  };
  return std::max(directed(A, B), directed(B, A));
}

}  // namespace holocheck
