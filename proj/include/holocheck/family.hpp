#pragma once

#include <limits>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "holocheck/expr.hpp"
#include "holocheck/spline.hpp"

namespace holocheck {

// Center/radius data of one circle of the family, with derivatives up to the
// requested order. Derivatives above `order` are left unset.
struct FamilyJet {
  double t = 0;
  int order = 0;
  cplx c0{}, c1{}, c2{}, c3{};
  double r0 = 0, r1 = 0, r2 = 0, r3 = 0;

  Jet c_jet() const {
    Jet j(c0, order);
    if (order >= 1) j.d[1] = c1;
    if (order >= 2) j.d[2] = c2;
    if (order >= 3) j.d[3] = c3;
    return j;
  }
  Jet r_jet() const {
    Jet j(cplx(r0), order);
    if (order >= 1) j.d[1] = r1;
    if (order >= 2) j.d[2] = r2;
    if (order >= 3) j.d[3] = r3;
    return j;
  }
};

// One-parameter family of circles t -> (center c(t), radius r(t)) on a closed
// parameter interval, backed either by closed-form expressions or by a
// quintic spline through samples. Both backends supply derivative jets up to
// order 3; the spline backend is C^2 at interior knots, so those knots are
// breakpoints for third derivatives and one-sided evaluation applies there.
class CircleFamily {
 public:
  static CircleFamily from_expressions(const std::string& c_expr, const std::string& r_expr,
                                       double t_lo, double t_hi) {
    if (!(t_lo < t_hi)) throw std::invalid_argument("family: empty parameter range");
    CircleFamily f;
    f.t_lo_ = t_lo;
    f.t_hi_ = t_hi;
    f.backend_ = ExprBackend{Expression::parse(c_expr), Expression::parse(r_expr)};
    f.jet(0.5 * (t_lo + t_hi), 3);  // surface evaluation errors early
    return f;
  }

  static CircleFamily from_samples(std::vector<double> t, std::vector<cplx> c,
                                   std::vector<double> r) {
    if (t.size() != c.size() || t.size() != r.size())
      throw std::invalid_argument("family: sample arrays must have equal length");
    for (double ri : r)
      if (!(ri > 0.0)) throw std::invalid_argument("family: sampled radius must be positive");
    CircleFamily f;
    f.t_lo_ = t.front();
    f.t_hi_ = t.back();
    std::vector<cplx> rc(r.begin(), r.end());
    f.breakpoints_.assign(t.begin() + 1, t.end() - 1);
    f.backend_ = SplineBackend{QuinticSpline(t, std::move(c)), QuinticSpline(std::move(t), std::move(rc))};
    return f;
  }

  double t_min() const { return t_lo_; }
  double t_max() const { return t_hi_; }
  double span() const { return t_hi_ - t_lo_; }
  const std::vector<double>& breakpoints() const { return breakpoints_; }

  bool is_breakpoint(double t) const {
    const double tol = 1e-12 * std::max(1.0, span());
    auto it = std::lower_bound(breakpoints_.begin(), breakpoints_.end(), t - tol);
    return it != breakpoints_.end() && std::abs(*it - t) <= tol;
  }

  FamilyJet jet(double t, int order = 3, std::optional<Side> side = std::nullopt) const {
    if (t < t_lo_ || t > t_hi_)
      throw std::domain_error("family: parameter outside range [" + std::to_string(t_lo_) +
                              ", " + std::to_string(t_hi_) + "]");
    if (order < 0 || order > 3) throw std::invalid_argument("family: order must be in [0,3]");
    if (order >= 1 && !side && is_breakpoint(t))
      throw std::invalid_argument(
          "family: derivative at a breakpoint requires a side (left/right)");

    Jet cj, rj;
    if (const auto* e = std::get_if<ExprBackend>(&backend_)) {
      const Jet tv = Jet::variable(t, order);
      cj = e->c.eval(tv);
      rj = e->r.eval(tv);
    } else {
      const auto& s = std::get<SplineBackend>(backend_);
      const Side sd = side.value_or(t == t_hi_ ? Side::left : Side::right);
      cj = s.c.eval(t, order, sd);
      rj = s.r.eval(t, order, sd);
    }

    const double rim = std::abs(rj.d[0].imag());
    if (rim > 1e-9 * (1.0 + std::abs(rj.d[0].real())))
      throw std::runtime_error("family: radius expression is not real-valued");
    FamilyJet out;
    out.t = t;
    out.order = order;
    out.c0 = cj.d[0];
    out.r0 = rj.d[0].real();
    if (!(out.r0 > 0.0)) throw std::runtime_error("family: radius must be positive");
    if (order >= 1) { out.c1 = cj.d[1]; out.r1 = rj.d[1].real(); }
    if (order >= 2) { out.c2 = cj.d[2]; out.r2 = rj.d[2].real(); }
    if (order >= 3) { out.c3 = cj.d[3]; out.r3 = rj.d[3].real(); }
    return out;
  }

  cplx center(double t) const { return jet(t, 0).c0; }
  double radius(double t) const { return jet(t, 0).r0; }

 private:
  struct ExprBackend { Expression c, r; };
  struct SplineBackend { QuinticSpline c, r; };

  double t_lo_ = 0, t_hi_ = 0;
  std::vector<double> breakpoints_;
  std::variant<ExprBackend, SplineBackend> backend_;
};

inline FamilyJet eval_family(const CircleFamily& f, double t, int order = 3,
                             std::optional<Side> side = std::nullopt) {
  return f.jet(t, order, side);
}

enum class PointClass { interior, boundary, exterior };

inline PointClass point_in_disc(const CircleFamily& f, double t, cplx z, double tol) {
  if (!(tol > 0.0)) throw std::invalid_argument("point_in_disc: tol must be positive");
  const FamilyJet j = f.jet(t, 0);
  const double s = std::abs(z - j.c0) - j.r0;
  if (s > tol) return PointClass::exterior;
  if (s < -tol) return PointClass::interior;
  return PointClass::boundary;
}

struct ConditionReport {
  std::string id;
  bool pass = false;
  double margin = 0;  // positive certifies the condition
  double witness_t = 0;
  std::optional<double> witness_s;
  std::string note;
};

struct ValidationReport {
  ConditionReport cond_a, cond_b, cond_c, cond_d;
  int n_samples = 0;
  bool overall = false;
};

namespace detail {

// Evaluates with a side at breakpoints so validation sweeps never trip the
// breakpoint precondition.
inline FamilyJet sided_jet(const CircleFamily& f, double t, int order, Side side) {
  if (f.is_breakpoint(t) || t == f.t_min() || t == f.t_max())
    return f.jet(t, order, t == f.t_max() ? Side::left : side);
  return f.jet(t, order);
}

}  // namespace detail

// Samples hypotheses (a)-(d) on a uniform grid with local refinement around
// the worst sample. Strict inequalities are certified by positive margins.
inline ValidationReport validate_family(const CircleFamily& f, int n_samples) {
  if (n_samples < 64) throw std::invalid_argument("validate_family: n_samples must be >= 64");
  ValidationReport rep;
  rep.n_samples = n_samples;
  const double a = f.t_min(), b = f.t_max();
  const double span = b - a;
  const int n = n_samples;
  std::vector<double> ts(n);
  for (int i = 0; i < n; ++i) ts[i] = a + span * double(i) / double(n - 1);

  // (a) endpoint separation, exact.
  {
    const FamilyJet ja = f.jet(a, 0), jb = f.jet(b, 0);
    rep.cond_a.id = "a";
    rep.cond_a.margin = std::abs(ja.c0 - jb.c0) - (ja.r0 + jb.r0);
    rep.cond_a.pass = rep.cond_a.margin > 0.0;
    rep.cond_a.witness_t = a;
    rep.cond_a.witness_s = b;
    rep.cond_a.note = "checked exactly at the endpoints";
  }

  std::vector<FamilyJet> jets(n);
  for (int i = 0; i < n; ++i) {
    try {
      jets[i] = detail::sided_jet(f, ts[i], 3, Side::right);
    } catch (const std::exception& e) {
      throw std::runtime_error("validate_family: backend evaluation failure at t=" +
                               std::to_string(ts[i]) + ": " + e.what());
    }
  }

  double cmax = 0.0;
  for (const auto& j : jets) cmax = std::max(cmax, std::abs(j.c0));
  const double geom_scale = std::max(1.0, cmax);

  // (b) regularity of the center curve plus sampled injectivity.
  {
    rep.cond_b.id = "b";
    double min_speed = std::numeric_limits<double>::infinity();
    double wt = a;
    for (int i = 0; i < n; ++i) {
      const double sp = std::abs(jets[i].c1);
      if (sp < min_speed) { min_speed = sp; wt = ts[i]; }
    }
    const double delta = 4.0 * span / double(n);
    double min_sep = std::numeric_limits<double>::infinity();
    double it = a, is = b;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) {
        if (ts[j] - ts[i] < delta) continue;
        const double d = std::abs(jets[i].c0 - jets[j].c0);
        if (d < min_sep) { min_sep = d; it = ts[i]; is = ts[j]; }
      }
    // local refinement of the closest approach
    if (min_sep < std::numeric_limits<double>::infinity()) {
      double half = span / double(n - 1);
      for (int round = 0; round < 3; ++round) {
        double bt = it, bs = is;
        for (int p = -3; p <= 3; ++p)
          for (int q = -3; q <= 3; ++q) {
            const double tt = std::clamp(it + half * p / 3.0, a, b);
            const double ss = std::clamp(is + half * q / 3.0, a, b);
            if (ss - tt < delta && tt - ss < delta) continue;
            const double d = std::abs(f.center(tt) - f.center(ss));
            if (d < min_sep) { min_sep = d; bt = tt; bs = ss; }
          }
        it = bt; is = bs; half /= 3.0;
      }
    }
    const double inj_tol = 1e-9 * geom_scale;
    rep.cond_b.pass = min_speed > 1e-12 * geom_scale && min_sep > inj_tol;
    rep.cond_b.margin = min_speed;
    rep.cond_b.witness_t = wt;
    rep.cond_b.note = "sampled injectivity: min off-diagonal |c(t)-c(s)| = " +
                      std::to_string(min_sep) + " at (" + std::to_string(it) + ", " +
                      std::to_string(is) + ")";
    if (!(min_sep > inj_tol)) { rep.cond_b.witness_t = it; rep.cond_b.witness_s = is; }
  }

  // (c) no circle inside another, checked off the near-diagonal band; the
  // band |t-s| < delta is covered by (d).
  {
    rep.cond_c.id = "c";
    const double delta = 4.0 * span / double(n);
    double min_margin = std::numeric_limits<double>::infinity();
    double it = a, is = b;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) {
        if (ts[j] - ts[i] < delta) continue;
        const double m =
            std::abs(jets[i].c0 - jets[j].c0) - std::abs(jets[i].r0 - jets[j].r0);
        if (m < min_margin) { min_margin = m; it = ts[i]; is = ts[j]; }
      }
    if (min_margin < std::numeric_limits<double>::infinity()) {
      double half = span / double(n - 1);
      for (int round = 0; round < 3; ++round) {
        double bt = it, bs = is;
        for (int p = -3; p <= 3; ++p)
          for (int q = -3; q <= 3; ++q) {
            const double tt = std::clamp(it + half * p / 3.0, a, b);
            const double ss = std::clamp(is + half * q / 3.0, a, b);
            if (std::abs(ss - tt) < delta) continue;
            const FamilyJet jt = f.jet(tt, 0), js = f.jet(ss, 0);
            const double m = std::abs(jt.c0 - js.c0) - std::abs(jt.r0 - js.r0);
            if (m < min_margin) { min_margin = m; bt = tt; bs = ss; }
          }
        it = bt; is = bs; half /= 3.0;
      }
      rep.cond_c.margin = min_margin;
      rep.cond_c.pass = min_margin > 0.0;
      rep.cond_c.witness_t = it;
      rep.cond_c.witness_s = is;
      rep.cond_c.note = "pairs with |t-s| >= " + std::to_string(delta);
    } else {
      rep.cond_c.pass = true;
      rep.cond_c.margin = 0.0;
      rep.cond_c.note = "no off-diagonal pairs at this resolution";
    }
  }

  // (d) |c'| > |r'| on the grid, evaluated on both sides at breakpoints.
  {
    rep.cond_d.id = "d";
    double min_margin = std::numeric_limits<double>::infinity();
    double wt = a;
    auto consider = [&](double t, const FamilyJet& j) {
      const double m = std::abs(j.c1) - std::abs(j.r1);
      if (m < min_margin) { min_margin = m; wt = t; }
    };
    for (int i = 0; i < n; ++i) {
      consider(ts[i], detail::sided_jet(f, ts[i], 1, Side::right));
      if (f.is_breakpoint(ts[i])) consider(ts[i], f.jet(ts[i], 1, Side::left));
    }
    double half = span / double(n - 1);
    for (int round = 0; round < 4; ++round) {
      double bt = wt;
      for (int p = -3; p <= 3; ++p) {
        const double tt = std::clamp(wt + half * p / 3.0, a, b);
        const FamilyJet j = detail::sided_jet(f, tt, 1, Side::right);
        const double m = std::abs(j.c1) - std::abs(j.r1);
        if (m < min_margin) { min_margin = m; bt = tt; }
      }
      wt = bt; half /= 3.0;
    }
    rep.cond_d.margin = min_margin;
    rep.cond_d.pass = min_margin > 0.0;
    rep.cond_d.witness_t = wt;
  }

  rep.overall = rep.cond_a.pass && rep.cond_b.pass && rep.cond_c.pass && rep.cond_d.pass;
  return rep;
}

}  // namespace holocheck
