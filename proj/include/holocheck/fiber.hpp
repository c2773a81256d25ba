#pragma once

#include <limits>

#include "holocheck/family.hpp"

namespace holocheck {

// Point of the Riemann sphere: a finite chart value or the point at infinity.
class SpherePoint {
 public:
  SpherePoint() = default;
  static SpherePoint finite(cplx w) {
    SpherePoint p;
    p.w_ = w;
    p.inf_ = false;
    return p;
  }
  static SpherePoint infinity() {
    SpherePoint p;
    p.inf_ = true;
    return p;
  }
  bool is_infinity() const { return inf_; }
  cplx value() const {
    if (inf_) throw std::domain_error("SpherePoint: no finite value at infinity");
    return w_;
  }
  // Mobius chart u = 1/(w - a); infinity maps to 0.
  cplx mobius(cplx a) const { return inf_ ? cplx(0.0) : 1.0 / (w_ - a); }

  // Stereographic embedding into R^3; the chordal distance is the Euclidean
  // distance between embedded points.
  std::array<double, 3> embed() const {
    if (inf_) return {0.0, 0.0, 1.0};
    const double n2 = std::norm(w_);
    const double d = 1.0 + n2;
    return {2.0 * w_.real() / d, 2.0 * w_.imag() / d, (n2 - 1.0) / d};
  }

 private:
  cplx w_{};
  bool inf_ = false;
};

inline double chordal_distance(const SpherePoint& a, const SpherePoint& b) {
  const auto pa = a.embed(), pb = b.embed();
  const double dx = pa[0] - pb[0], dy = pa[1] - pb[1], dz = pa[2] - pb[2];
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

struct ParamInterval {
  double lo = 0, hi = 0;
  double length() const { return hi - lo; }
};

// Parameters t whose closed disc contains z, as refined disjoint intervals.
struct IncidenceSet {
  cplx z{};
  std::vector<ParamInterval> intervals;
  std::vector<double> tangency_warnings;  // grid minima of |g| below tol without sign change
};

// One closed loop of the fiber curve: the image of one incidence interval
// under t -> w(t), closing at conj(z) at both ends.
struct Loop {
  ParamInterval interval;
  std::vector<double> params;
  std::vector<SpherePoint> samples;
  bool passes_infinity = false;

  // Axis-aligned bound on the chordal diameter (within sqrt(3) of exact).
  double diameter() const {
    double lo[3] = {1e9, 1e9, 1e9}, hi[3] = {-1e9, -1e9, -1e9};
    for (const auto& s : samples) {
      const auto p = s.embed();
      for (int k = 0; k < 3; ++k) {
        lo[k] = std::min(lo[k], p[k]);
        hi[k] = std::max(hi[k], p[k]);
      }
    }
    double d2 = 0.0;
    for (int k = 0; k < 3; ++k) d2 += (hi[k] - lo[k]) * (hi[k] - lo[k]);
    return std::sqrt(d2);
  }

  // Euclidean bounding-box diagonal over finite samples.
  double euclid_diameter() const {
    double xlo = 1e300, xhi = -1e300, ylo = 1e300, yhi = -1e300;
    bool any = false;
    for (const auto& s : samples) {
      if (s.is_infinity()) continue;
      any = true;
      const cplx w = s.value();
      xlo = std::min(xlo, w.real());
      xhi = std::max(xhi, w.real());
      ylo = std::min(ylo, w.imag());
      yhi = std::max(yhi, w.imag());
    }
    if (!any) return std::numeric_limits<double>::infinity();
    return std::hypot(xhi - xlo, yhi - ylo);
  }

  // Shoelace area over finite samples; the sign gives the planar orientation.
  double signed_area() const {
    double area2 = 0.0;
    cplx prev{};
    bool have_prev = false, have_first = false;
    cplx first{};
    for (const auto& s : samples) {
      if (s.is_infinity()) continue;
      const cplx w = s.value();
      if (!have_first) { first = w; have_first = true; }
      if (have_prev) area2 += prev.real() * w.imag() - prev.imag() * w.real();
      prev = w;
      have_prev = true;
    }
    if (have_first && have_prev) area2 += prev.real() * first.imag() - prev.imag() * first.real();
    return 0.5 * area2;
  }

  int orientation() const { return signed_area() >= 0.0 ? +1 : -1; }
};

// Fiber over z: one loop per incidence interval.
struct FiberCurve {
  cplx z{};
  std::vector<Loop> loops;
  double min_sample_gap = std::numeric_limits<double>::infinity();  // non-endpoint samples
  double max_closure_error = 0.0;

  int loop_count() const { return static_cast<int>(loops.size()); }
};

struct SamplingController {
  double chord_factor = 0.05;     // target chord / loop diameter
  int initial_samples = 65;
  int max_samples_per_loop = 4096;
  bool check_injectivity = true;
  double pole_tol = 1e-9;         // |z - c(t)| below this marks a pole hit
};

namespace detail {

inline double incidence_g(const CircleFamily& f, double t, cplx z) {
  const FamilyJet j = f.jet(t, 0);
  return std::norm(z - j.c0) - j.r0 * j.r0;
}

inline double incidence_g_prime(const CircleFamily& f, double t, cplx z) {
  const FamilyJet j = (f.is_breakpoint(t) || t == f.t_max())
                          ? f.jet(t, 1, t == f.t_max() ? Side::left : Side::right)
                          : f.jet(t, 1);
  const cplx q = z - j.c0;
  return -2.0 * (std::conj(q) * j.c1).real() - 2.0 * j.r0 * j.r1;
}

// Bracketed bisection with a short Newton polish.
inline double refine_incidence_root(const CircleFamily& f, cplx z, double lo, double hi) {
  const double span = std::max(1.0, f.span());
  double glo = incidence_g(f, lo, z);
  for (int k = 0; k < 200 && hi - lo > 1e-15 * span; ++k) {
    const double mid = 0.5 * (lo + hi);
    const double gm = incidence_g(f, mid, z);
    if ((gm < 0.0) == (glo < 0.0)) {
      lo = mid;
      glo = gm;
    } else {
      hi = mid;
    }
  }
  double t = 0.5 * (lo + hi);
  for (int k = 0; k < 3; ++k) {
    const double g = incidence_g(f, t, z);
    const double gp = incidence_g_prime(f, t, z);
    if (gp == 0.0) break;
    const double step = g / gp;
    const double tn = t - step;
    if (tn < lo || tn > hi) break;
    t = tn;
  }
  return std::clamp(t, f.t_min(), f.t_max());
}

}  // namespace detail

// Locates the incidence set of z by a sign scan of g(t) = |z-c(t)|^2 - r(t)^2
// with bracketed refinement. Requires z outside the closed end discs;
// tangential near-zeros below tol are reported as warnings.
inline IncidenceSet incidence_intervals(const CircleFamily& f, cplx z, int resolution = 256,
                                        double tol = 1e-8) {
  if (resolution < 256) throw std::invalid_argument("incidence_intervals: resolution >= 256");
  const double a = f.t_min(), b = f.t_max();
  {
    const FamilyJet ja = f.jet(a, 0);
    if (std::abs(z - ja.c0) <= ja.r0)
      throw std::domain_error("incidence_intervals: z lies in the closed disc at t_min");
    const FamilyJet jb = f.jet(b, 0);
    if (std::abs(z - jb.c0) <= jb.r0)
      throw std::domain_error("incidence_intervals: z lies in the closed disc at t_max");
  }

  IncidenceSet out;
  out.z = z;
  std::vector<double> g(resolution);
  std::vector<double> ts(resolution);
  for (int i = 0; i < resolution; ++i) {
    ts[i] = a + (b - a) * double(i) / double(resolution - 1);
    g[i] = detail::incidence_g(f, ts[i], z);
  }

  // The grid can step over narrow features: an interval just being born (local
  // minimum dipping below zero between grid points) or a pinch about to split
  // an interval (local maximum poking above zero). Refine every interior grid
  // extremum by ternary search and inject the resolved points.
  std::vector<std::pair<double, double>> extra;  // (t, g) of refined extrema
  auto refine_extremum = [&](double lo, double hi, bool minimum) {
    for (int k = 0; k < 200 && hi - lo > 1e-15 * std::max(1.0, b - a); ++k) {
      const double m1 = lo + (hi - lo) / 3.0, m2 = hi - (hi - lo) / 3.0;
      const double g1 = detail::incidence_g(f, m1, z), g2 = detail::incidence_g(f, m2, z);
      if ((g1 < g2) == minimum) hi = m2;
      else lo = m1;
    }
    const double t = 0.5 * (lo + hi);
    return std::pair<double, double>{t, detail::incidence_g(f, t, z)};
  };
  for (int i = 1; i + 1 < resolution; ++i) {
    const bool is_min = g[i] <= g[i - 1] && g[i] <= g[i + 1];
    const bool is_max = g[i] >= g[i - 1] && g[i] >= g[i + 1];
    if (is_min && g[i] >= 0.0) {
      const auto [t_star, g_star] = refine_extremum(ts[i - 1], ts[i + 1], true);
      if (g_star < 0.0) extra.push_back({t_star, g_star});
      else if (g_star < tol) out.tangency_warnings.push_back(t_star);
    } else if (is_max && g[i] < 0.0) {
      const auto [t_star, g_star] = refine_extremum(ts[i - 1], ts[i + 1], false);
      if (g_star >= 0.0) extra.push_back({t_star, g_star});
      else if (-g_star < tol) out.tangency_warnings.push_back(t_star);
    }
  }
  if (!extra.empty()) {
    for (const auto& [t_star, g_star] : extra) {
      const auto pos = std::lower_bound(ts.begin(), ts.end(), t_star);
      const auto idx = pos - ts.begin();
      ts.insert(pos, t_star);
      g.insert(g.begin() + idx, g_star);
    }
    resolution = static_cast<int>(ts.size());
  }

  bool inside = false;
  double open_at = 0.0;
  for (int i = 1; i < resolution; ++i) {
    if (!inside && g[i] < 0.0 && g[i - 1] >= 0.0) {
      open_at = detail::refine_incidence_root(f, z, ts[i - 1], ts[i]);
      inside = true;
    } else if (inside && g[i] >= 0.0 && g[i - 1] < 0.0) {
      out.intervals.push_back({open_at, detail::refine_incidence_root(f, z, ts[i - 1], ts[i])});
      inside = false;
    }
  }
  if (inside)
    throw std::domain_error("incidence_intervals: incidence interval reaches t_max");
  return out;
}

// w(t) = conj(c) + r^2 / (z - c); the point at infinity when z hits the
// center curve.
inline SpherePoint fiber_point(const CircleFamily& f, double t, cplx z) {
  const FamilyJet j = f.jet(t, 0);
  const cplx q = z - j.c0;
  if (std::norm(q) < 1e-60) return SpherePoint::infinity();
  return SpherePoint::finite(std::conj(j.c0) + j.r0 * j.r0 / q);
}

namespace detail {

// Exact closest pair over points already sorted by x (sweep line).
inline double min_pairwise_distance(std::vector<cplx> pts) {
  if (pts.size() < 2) return std::numeric_limits<double>::infinity();
  std::sort(pts.begin(), pts.end(), [](cplx a, cplx b) {
    return a.real() < b.real() || (a.real() == b.real() && a.imag() < b.imag());
  });
  double best = std::numeric_limits<double>::infinity();
  std::size_t tail = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    while (tail < i && pts[i].real() - pts[tail].real() > best) ++tail;
    for (std::size_t j = tail; j < i; ++j) {
      const double d = std::abs(pts[i] - pts[j]);
      if (d < best) best = d;
    }
  }
  return best;
}

}  // namespace detail

// Builds the loops of the fiber curve over z. Sampling refines parameter
// steps until chords are bounded in the finite chart or, near a pole, in the
// inverted chart u = 1/(w - conj(z) - 1).
inline FiberCurve build_fiber_curve(const CircleFamily& f, cplx z,
                                    const SamplingController& ctrl = {},
                                    const IncidenceSet* precomputed = nullptr) {
  const IncidenceSet inc = precomputed ? *precomputed : incidence_intervals(f, z);
  FiberCurve out;
  out.z = z;
  const cplx zbar = std::conj(z);
  const cplx chart_pole = zbar + 1.0;

  for (const ParamInterval& iv : inc.intervals) {
    Loop loop;
    loop.interval = iv;
    const int n0 = std::max(5, ctrl.initial_samples);
    std::vector<double> params(n0);
    for (int i = 0; i < n0; ++i)
      params[i] = iv.lo + (iv.hi - iv.lo) * double(i) / double(n0 - 1);

    auto eval = [&](double t) { return fiber_point(f, t, z); };
    std::vector<SpherePoint> samples(params.size());
    for (std::size_t i = 0; i < params.size(); ++i) samples[i] = eval(params[i]);

    auto u_of = [&](const SpherePoint& p) { return p.mobius(chart_pole); };

    for (int round = 0; round < 24; ++round) {
      if (static_cast<int>(params.size()) >= ctrl.max_samples_per_loop) break;
      // robust chart scales from the current samples
      double wlo_x = 1e300, whi_x = -1e300, wlo_y = 1e300, whi_y = -1e300;
      double ulo_x = 1e300, uhi_x = -1e300, ulo_y = 1e300, uhi_y = -1e300;
      std::vector<double> dist_w;
      dist_w.reserve(samples.size());
      for (const auto& s : samples)
        if (!s.is_infinity()) dist_w.push_back(std::abs(s.value() - zbar));
      double med = 1.0;
      if (!dist_w.empty()) {
        std::vector<double> tmp = dist_w;
        std::nth_element(tmp.begin(), tmp.begin() + tmp.size() / 2, tmp.end());
        med = std::max(tmp[tmp.size() / 2], 1e-300);
      }
      for (const auto& s : samples) {
        if (!s.is_infinity() && std::abs(s.value() - zbar) <= 20.0 * med) {
          const cplx w = s.value();
          wlo_x = std::min(wlo_x, w.real());
          whi_x = std::max(whi_x, w.real());
          wlo_y = std::min(wlo_y, w.imag());
          whi_y = std::max(whi_y, w.imag());
        }
        const cplx u = u_of(s);
        ulo_x = std::min(ulo_x, u.real());
        uhi_x = std::max(uhi_x, u.real());
        ulo_y = std::min(ulo_y, u.imag());
        uhi_y = std::max(uhi_y, u.imag());
      }
      const double diam_w = (whi_x >= wlo_x) ? std::hypot(whi_x - wlo_x, whi_y - wlo_y) : 0.0;
      const double diam_u = std::hypot(uhi_x - ulo_x, uhi_y - ulo_y);
      const double h_w = ctrl.chord_factor * std::max(diam_w, 1e-300);
      const double h_u = ctrl.chord_factor * std::max(diam_u, 1e-300);

      std::vector<double> new_params;
      new_params.reserve(params.size() * 2);
      bool refined = false;
      for (std::size_t i = 0; i + 1 < params.size(); ++i) {
        new_params.push_back(params[i]);
        const SpherePoint &s0 = samples[i], &s1 = samples[i + 1];
        bool ok = false;
        if (!s0.is_infinity() && !s1.is_infinity() &&
            std::abs(s0.value() - s1.value()) <= h_w)
          ok = true;
        if (!ok && std::abs(u_of(s0) - u_of(s1)) <= h_u) ok = true;
        if (!ok && static_cast<int>(params.size() + new_params.size()) <
                       ctrl.max_samples_per_loop) {
          new_params.push_back(0.5 * (params[i] + params[i + 1]));
          refined = true;
        }
      }
      new_params.push_back(params.back());
      if (!refined) break;
      params = std::move(new_params);
      samples.resize(params.size());
      for (std::size_t i = 0; i < params.size(); ++i) samples[i] = eval(params[i]);
    }

    loop.params = std::move(params);
    loop.samples = std::move(samples);

    // pole detection: minimize |z - c(t)| over the interval
    double best_t = loop.params.front();
    double best_d = std::numeric_limits<double>::infinity();
    for (double t : loop.params) {
      const double d = std::abs(z - f.center(t));
      if (d < best_d) { best_d = d; best_t = t; }
    }
    {
      double lo = std::max(iv.lo, best_t - iv.length() / double(loop.params.size()));
      double hi = std::min(iv.hi, best_t + iv.length() / double(loop.params.size()));
      for (int k = 0; k < 60 && hi - lo > 1e-15 * std::max(1.0, f.span()); ++k) {
        const double m1 = lo + (hi - lo) / 3.0, m2 = hi - (hi - lo) / 3.0;
        if (std::abs(z - f.center(m1)) < std::abs(z - f.center(m2))) hi = m2;
        else lo = m1;
      }
      best_d = std::min(best_d, std::abs(z - f.center(0.5 * (lo + hi))));
    }
    const double pole_scale = std::max(1.0, f.jet(best_t, 0).r0);
    loop.passes_infinity = best_d < ctrl.pole_tol * pole_scale;
    for (const auto& s : loop.samples)
      if (s.is_infinity()) loop.passes_infinity = true;

    const cplx w_lo = loop.samples.front().is_infinity() ? chart_pole : loop.samples.front().value();
    const cplx w_hi = loop.samples.back().is_infinity() ? chart_pole : loop.samples.back().value();
    out.max_closure_error =
        std::max({out.max_closure_error, std::abs(w_lo - zbar), std::abs(w_hi - zbar)});
    out.loops.push_back(std::move(loop));
  }

  if (ctrl.check_injectivity) {
    std::vector<cplx> interior;
    for (const Loop& lp : out.loops)
      for (std::size_t i = 1; i + 1 < lp.samples.size(); ++i)
        if (!lp.samples[i].is_infinity()) interior.push_back(lp.samples[i].value());
    out.min_sample_gap = detail::min_pairwise_distance(std::move(interior));
  }
  return out;
}

namespace detail {

inline double point_segment_distance(cplx p, cplx a, cplx b) {
  const cplx ab = b - a;
  const double len2 = std::norm(ab);
  if (len2 == 0.0) return std::abs(p - a);
  double s = ((p - a).real() * ab.real() + (p - a).imag() * ab.imag()) / len2;
  s = std::clamp(s, 0.0, 1.0);
  return std::abs(p - (a + s * ab));
}

inline double turn_angle(cplx v0, cplx v1, cplx w, int depth) {
  const double ang = std::arg((v1 - w) / (v0 - w));
  if (std::abs(ang) < 2.0 || depth >= 30) return ang;
  const cplx mid = 0.5 * (v0 + v1);
  return turn_angle(v0, mid, w, depth + 1) + turn_angle(mid, v1, w, depth + 1);
}

// Planar winding number of the closed polygon through `pts` around w.
inline int polygon_winding(const std::vector<cplx>& pts, cplx w, double tol) {
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    if (point_segment_distance(w, pts[i], pts[i + 1]) <= tol)
      throw std::domain_error("winding_index: point lies on the loop");
    total += turn_angle(pts[i], pts[i + 1], w, 0);
  }
  if (std::abs(pts.back() - pts.front()) > 0.0) {
    if (point_segment_distance(w, pts.back(), pts.front()) <= tol)
      throw std::domain_error("winding_index: point lies on the loop");
    total += turn_angle(pts.back(), pts.front(), w, 0);
  }
  const double turns = total / (2.0 * kPi);
  const double rounded = std::round(turns);
  if (std::abs(turns - rounded) > 1e-6)
    throw std::runtime_error("winding_index: argument sum is not an integer multiple of 2 pi");
  return static_cast<int>(rounded);
}

// Deterministic anchor off the loop set for Mobius transfers.
inline cplx choose_anchor(const std::vector<const Loop*>& loops, cplx base, double tol) {
  cplx a = base;
  for (int attempt = 0; attempt < 64; ++attempt) {
    double dmin = std::numeric_limits<double>::infinity();
    for (const Loop* lp : loops)
      for (const auto& s : lp->samples)
        if (!s.is_infinity()) dmin = std::min(dmin, std::abs(s.value() - a));
    if (dmin > 8.0 * tol) return a;
    a += cplx(0.31, 0.17) * double(attempt + 1);
  }
  throw std::runtime_error("winding_index: could not place a Mobius anchor off the loop");
}

}  // namespace detail

// Planar winding index of a loop around w, by summed argument increments.
// Loops through infinity (or w at infinity) are first moved by the Mobius map
// 1/(zeta - a); for a bounded loop the index of infinity is zero.
inline int winding_index(const Loop& loop, const SpherePoint& w, double tol = 1e-9) {
  if (loop.samples.size() < 3) throw std::invalid_argument("winding_index: degenerate loop");
  bool loop_infinite = false;
  for (const auto& s : loop.samples) loop_infinite |= s.is_infinity();

  if (!loop_infinite && !w.is_infinity()) {
    std::vector<cplx> pts;
    pts.reserve(loop.samples.size());
    for (const auto& s : loop.samples) pts.push_back(s.value());
    return detail::polygon_winding(pts, w.value(), tol);
  }
  if (!loop_infinite && w.is_infinity()) return 0;

  // transfer through u = 1/(zeta - a)
  const cplx base = loop.samples.front().is_infinity()
                        ? cplx(1.0, 1.0)
                        : loop.samples.front().value() + 1.0;
  const cplx a = detail::choose_anchor({&loop}, base, tol);
  std::vector<cplx> pts;
  pts.reserve(loop.samples.size());
  for (const auto& s : loop.samples) pts.push_back(s.mobius(a));
  return detail::polygon_winding(pts, w.mobius(a), tol);
}

enum class RegionSide { plus, minus, other };

struct RegionProbe {
  SpherePoint point;
  int raw_index = 0;         // summed planar winding over all loops
  int normalized_index = 0;  // raw minus the minimum over probes
  RegionSide side = RegionSide::minus;
};

struct RegionClassification {
  bool quasi_simple = false;
  std::vector<RegionProbe> probes;
  int index_min = 0, index_max = 0;
};

// Probes the complement of a loop set and classifies region indices. Indices
// are normalized so the smallest observed value is 0; quasi-simple means only
// the two values 0 and 1 occur. Probes landing on a loop are nudged, and
// dropped if the nudge fails.
inline RegionClassification classify_regions(const std::vector<Loop>& loops, int probes = 64) {
  if (loops.empty()) throw std::invalid_argument("classify_regions: no loops");
  bool any_infinite = false;
  double xlo = 1e300, xhi = -1e300, ylo = 1e300, yhi = -1e300;
  for (const Loop& lp : loops) {
    for (const auto& s : lp.samples) {
      if (s.is_infinity()) { any_infinite = true; continue; }
      const cplx w = s.value();
      xlo = std::min(xlo, w.real());
      xhi = std::max(xhi, w.real());
      ylo = std::min(ylo, w.imag());
      yhi = std::max(yhi, w.imag());
    }
  }
  if (!(xlo <= xhi)) throw std::invalid_argument("classify_regions: loops have no finite samples");
  const double pad = 0.35 * std::max({xhi - xlo, yhi - ylo, 1e-6});
  xlo -= pad; xhi += pad; ylo -= pad; yhi += pad;
  const double tol = 1e-9 * std::max(1.0, std::max(xhi - xlo, yhi - ylo));

  std::vector<SpherePoint> candidates;
  candidates.push_back(SpherePoint::infinity());
  const int g = std::max(3, static_cast<int>(std::ceil(std::sqrt(double(std::max(probes - 1, 8))))));
  for (int iy = 0; iy < g; ++iy)
    for (int ix = 0; ix < g; ++ix)
      candidates.push_back(SpherePoint::finite(
          cplx(xlo + (xhi - xlo) * (ix + 0.5) / g, ylo + (yhi - ylo) * (iy + 0.5) / g)));

  cplx common_anchor{};
  if (any_infinite) {
    std::vector<const Loop*> ptrs;
    for (const Loop& lp : loops) ptrs.push_back(&lp);
    common_anchor = detail::choose_anchor(ptrs, cplx(xhi + 1.0, yhi + 1.0), tol);
  }

  RegionClassification out;
  for (const SpherePoint& base : candidates) {
    SpherePoint p = base;
    for (int attempt = 0; attempt < 6; ++attempt) {
      try {
        int total = 0;
        for (const Loop& lp : loops) {
          if (!any_infinite) {
            total += winding_index(lp, p, tol);
          } else {
            std::vector<cplx> pts;
            for (const auto& s : lp.samples) pts.push_back(s.mobius(common_anchor));
            total += detail::polygon_winding(pts, p.mobius(common_anchor), tol);
          }
        }
        RegionProbe rp;
        rp.point = p;
        rp.raw_index = total;
        out.probes.push_back(rp);
        break;
      } catch (const std::domain_error&) {
        if (p.is_infinity()) break;
        p = SpherePoint::finite(p.value() + cplx(3.7, 1.9) * tol * double(1 << attempt));
      }
    }
  }
  if (out.probes.empty()) throw std::runtime_error("classify_regions: all probes failed");

  int mn = out.probes.front().raw_index, mx = mn;
  for (const auto& rp : out.probes) {
    mn = std::min(mn, rp.raw_index);
    mx = std::max(mx, rp.raw_index);
  }
  out.index_min = mn;
  out.index_max = mx;
  for (auto& rp : out.probes) {
    rp.normalized_index = rp.raw_index - mn;
    rp.side = rp.normalized_index == 0 ? RegionSide::minus
              : rp.normalized_index == 1 ? RegionSide::plus
                                         : RegionSide::other;
  }
  out.quasi_simple = (mx - mn) <= 1;
  return out;
}

}  // namespace holocheck
