#pragma once

#include <functional>
#include <map>
#include <memory>

#include "holocheck/boundary.hpp"
#include "holocheck/critical.hpp"
#include "holocheck/fiber.hpp"

namespace holocheck {

struct PhiOptions {
  double margin_frac = 1e-3;      // endpoint fraction excluded around the corner at conj(z)
  double rel_tol = 1e-8;          // successive-refinement agreement target
  int max_refinements = 8;
  int max_nodes = 40000;
  double defect_threshold = 1e-6; // extendibility gate for the traces feeding F
  double distance_tol = 1e-9;     // w must stay this far from the loop
  int trace_samples = 256;        // N for boundary traces
  int constancy_nodes = 129;
};

// Parametrized integrand of Phi over one loop: boundary values F(z, w(t)) and
// the algebraically exact kernel weights. The kernel and the antiderivative
// 1/(w(t)-w0) are expressed through q = z - c(t), so loops running through
// infinity need no special casing.
struct LoopIntegrand {
  double full_lo = 0, full_hi = 0;  // exact interval (w = conj(z) at the ends)
  double clip_lo = 0, clip_hi = 0;  // after the endpoint margin
  std::vector<double> nodes;        // initial quadrature nodes in [clip_lo, clip_hi]
  std::function<cplx(double)> boundary_value;         // t -> F
  std::function<cplx(double, cplx)> kernel;           // (t, w0) -> w'(t)/(w(t)-w0)^2
  std::function<cplx(double, cplx)> inv_distance;     // (t, w0) -> 1/(w(t)-w0)
  cplx closure_point{};             // w at the exact interval ends
  bool apply_tails = true;          // false for smooth closed synthetic loops
  std::vector<SpherePoint> samples; // geometry, for the distance precondition
};

struct PhiResult {
  cplx value{};
  double l1_scale = 0;  // integral of |F K|, the no-cancellation magnitude
  int nodes_used = 0;
};

namespace detail {

inline std::shared_ptr<std::map<double, cplx>> make_trace_cache() {
  return std::make_shared<std::map<double, cplx>>();
}

}  // namespace detail

// Family-backed integrand for one fiber loop; f_t(z) values are cached across
// quadrature refinements and probes through `cache`.
inline LoopIntegrand make_loop_integrand(const CircleFamily& family, const FunctionSpec& f,
                                         cplx z, const Loop& loop, const PhiOptions& opt = {},
                                         std::shared_ptr<std::map<double, cplx>> cache = nullptr) {
  if (!cache) cache = detail::make_trace_cache();
  LoopIntegrand li;
  li.full_lo = loop.interval.lo;
  li.full_hi = loop.interval.hi;
  const double margin = opt.margin_frac * loop.interval.length();
  li.clip_lo = li.full_lo + margin;
  li.clip_hi = li.full_hi - margin;
  if (!(li.clip_hi > li.clip_lo))
    throw std::runtime_error("phi: loop interval too short for the endpoint margin");
  li.closure_point = std::conj(z);
  li.apply_tails = true;
  li.samples = loop.samples;

  for (double t : loop.params)
    if (t >= li.clip_lo && t <= li.clip_hi) li.nodes.push_back(t);
  if (li.nodes.empty() || li.nodes.front() > li.clip_lo) li.nodes.insert(li.nodes.begin(), li.clip_lo);
  if (li.nodes.back() < li.clip_hi) li.nodes.push_back(li.clip_hi);

  const int N = opt.trace_samples;
  // f is captured by value: integrands routinely outlive temporary specs
  li.boundary_value = [&family, f, z, N, cache](double t) {
    auto it = cache->find(t);
    if (it != cache->end()) return it->second;
    const BoundaryTrace tr = sample_trace(f, family, t, N);
    const cplx v = evaluate_extension(tr, z);
    (*cache)[t] = v;
    return v;
  };
  li.kernel = [&family, z](double t, cplx w0) {
    const FamilyJet j = family.jet(t, 1);
    const cplx q = z - j.c0;
    const cplx num = std::conj(j.c1) * q * q + 2.0 * j.r0 * j.r1 * q + j.r0 * j.r0 * j.c1;
    const cplx den = j.r0 * j.r0 + (std::conj(j.c0) - w0) * q;
    return num / (den * den);
  };
  li.inv_distance = [&family, z](double t, cplx w0) {
    const FamilyJet j = family.jet(t, 0);
    const cplx q = z - j.c0;
    return q / (j.r0 * j.r0 + (std::conj(j.c0) - w0) * q);
  };
  return li;
}

// Synthetic integrand over the circle |zeta - center| = radius with explicit
// boundary values; used by kernel-identity oracles.
inline LoopIntegrand make_circle_integrand(cplx center, double radius,
                                           std::function<cplx(cplx)> boundary_value,
                                           int n_nodes = 512) {
  LoopIntegrand li;
  li.full_lo = 0.0;
  li.full_hi = 2.0 * kPi;
  li.clip_lo = li.full_lo;
  li.clip_hi = li.full_hi;
  li.apply_tails = false;
  li.closure_point = center + radius;
  auto zeta = [center, radius](double th) { return center + radius * std::polar(1.0, th); };
  li.nodes.resize(n_nodes + 1);
  li.samples.resize(n_nodes + 1);
  for (int i = 0; i <= n_nodes; ++i) {
    li.nodes[i] = 2.0 * kPi * double(i) / double(n_nodes);
    li.samples[i] = SpherePoint::finite(zeta(li.nodes[i]));
  }
  li.boundary_value = [zeta, bv = std::move(boundary_value)](double th) { return bv(zeta(th)); };
  li.kernel = [zeta, center, radius](double th, cplx w0) {
    const cplx w = zeta(th);
    const cplx dw = cplx(0.0, radius) * std::polar(1.0, th);
    const cplx d = w - w0;
    return dw / (d * d);
  };
  li.inv_distance = [zeta](double th, cplx w0) { return 1.0 / (zeta(th) - w0); };
  return li;
}

// Quadrature of one loop integrand: composite trapezoid on a uniform grid of
// [clip_lo, clip_hi], doubled until successive values agree, with Richardson
// extrapolation of the last two levels. Exact kernel tails with the boundary
// value frozen at the clip ends cover the excluded margins, so for constant F
// the tails telescope against the closed loop and Phi vanishes to quadrature
// precision.
inline PhiResult phi_over_integrand(const LoopIntegrand& li, cplx w0, const PhiOptions& opt = {}) {
  for (std::size_t i = 0; i + 1 < li.samples.size(); ++i) {
    const SpherePoint &s0 = li.samples[i], &s1 = li.samples[i + 1];
    if (s0.is_infinity() || s1.is_infinity()) continue;
    if (detail::point_segment_distance(w0, s0.value(), s1.value()) <= opt.distance_tol)
      throw std::domain_error("phi: w lies on a loop");
  }

  const double lo = li.clip_lo, hi = li.clip_hi;
  std::size_t segs = std::max<std::size_t>(li.nodes.empty() ? 0 : li.nodes.size() - 1, 256);
  // round up to a power of two so doubled grids nest
  while (segs & (segs - 1)) ++segs;
  if (static_cast<int>(segs) > opt.max_nodes) segs = std::size_t(opt.max_nodes);

  std::map<double, std::pair<cplx, cplx>> values;  // t -> (F, K)
  auto at = [&](double t) {
    auto it = values.find(t);
    if (it != values.end()) return it->second;
    const std::pair<cplx, cplx> v{li.boundary_value(t), li.kernel(t, w0)};
    values.emplace(t, v);
    return v;
  };
  auto trapezoid = [&](std::size_t n, double* l1) {
    const double h = (hi - lo) / double(n);
    cplx acc = 0.0;
    double a1 = 0.0;
    std::pair<cplx, cplx> prev = at(lo);
    for (std::size_t i = 1; i <= n; ++i) {
      const double t = (i == n) ? hi : lo + h * double(i);
      const std::pair<cplx, cplx> cur = at(t);
      const cplx v0 = prev.first * prev.second, v1 = cur.first * cur.second;
      acc += 0.5 * h * (v0 + v1);
      a1 += 0.5 * h * (std::abs(v0) + std::abs(v1));
      prev = cur;
    }
    *l1 = a1;
    return acc;
  };

  double l1 = 0.0;
  cplx coarse = trapezoid(segs, &l1);
  cplx val = coarse;
  int used = static_cast<int>(segs) + 1;
  for (int round = 0; round < opt.max_refinements; ++round) {
    if (static_cast<int>(segs) * 2 > opt.max_nodes) break;
    segs *= 2;
    double l1_new = 0.0;
    const cplx fine = trapezoid(segs, &l1_new);
    used = static_cast<int>(segs) + 1;
    const double change = std::abs(fine - coarse);
    val = (4.0 * fine - coarse) / 3.0;  // Richardson-extrapolated value
    l1 = l1_new;
    coarse = fine;
    if (change <= opt.rel_tol * std::max(std::abs(fine), 0.01 * l1_new)) break;
  }

  if (li.apply_tails) {
    const cplx ad_full_lo = 1.0 / (li.closure_point - w0);
    const cplx ad_full_hi = ad_full_lo;
    const cplx head = li.boundary_value(li.clip_lo) *
                      (ad_full_lo - li.inv_distance(li.clip_lo, w0));
    const cplx tail = li.boundary_value(li.clip_hi) *
                      (li.inv_distance(li.clip_hi, w0) - ad_full_hi);
    val += head + tail;
    l1 += std::abs(head) + std::abs(tail);
  }
  return {val, l1, used};
}

// Phi(z, w) = sum over loops of the Cauchy-type integral with the
// second-power kernel; the kernel's zeta^{-2} decay makes Phi(z, infinity)
// vanish identically.
inline PhiResult phi_detailed(const CircleFamily& family, const FunctionSpec& f, cplx z,
                              const std::vector<Loop>& loops, const SpherePoint& w,
                              const PhiOptions& opt = {}) {
  if (w.is_infinity()) return {cplx(0.0), 0.0, 0};
  auto cache = detail::make_trace_cache();
  PhiResult total;
  for (const Loop& lp : loops) {
    // extendibility gate on representative circles of this loop
    for (double frac : {0.25, 0.5, 0.75}) {
      const double t = lp.interval.lo + frac * lp.interval.length();
      const double defect = extendibility_defect(sample_trace(f, family, t, opt.trace_samples));
      if (defect > opt.defect_threshold)
        throw std::runtime_error("phi: extendibility defect " + std::to_string(defect) +
                                 " above threshold at t=" + std::to_string(t));
    }
    const LoopIntegrand li = make_loop_integrand(family, f, z, lp, opt, cache);
    const PhiResult r = phi_over_integrand(li, w.value(), opt);
    total.value += r.value;
    total.l1_scale += r.l1_scale;
    total.nodes_used += r.nodes_used;
  }
  return total;
}

inline cplx phi(const CircleFamily& family, const FunctionSpec& f, cplx z,
                const std::vector<Loop>& loops, const SpherePoint& w, const PhiOptions& opt = {}) {
  return phi_detailed(family, f, z, loops, w, opt).value;
}

// Direct test that F is constant on a loop: max deviation of f_t(z) from its
// mean over uniform samples of the margin-clipped interval.
inline double loop_constancy_defect_fn(const ParamInterval& interval,
                                       const std::function<cplx(double)>& value, int n_nodes,
                                       double margin_frac) {
  const double m = margin_frac * interval.length();
  const double lo = interval.lo + m, hi = interval.hi - m;
  if (!(hi > lo) || n_nodes < 2)
    throw std::runtime_error("loop_constancy_defect: no valid interior samples");
  std::vector<cplx> vals(n_nodes);
  cplx mean = 0.0;
  for (int i = 0; i < n_nodes; ++i) {
    const double t = lo + (hi - lo) * double(i) / double(n_nodes - 1);
    vals[i] = value(t);
    mean += vals[i];
  }
  mean /= double(n_nodes);
  double defect = 0.0;
  for (const cplx& v : vals) defect = std::max(defect, std::abs(v - mean));
  return defect;
}

inline double loop_constancy_defect(const CircleFamily& family, const FunctionSpec& f, cplx z,
                                    const Loop& loop, const PhiOptions& opt = {}) {
  auto cache = detail::make_trace_cache();
  const int N = opt.trace_samples;
  return loop_constancy_defect_fn(
      loop.interval,
      [&family, f, z, N, cache](double t) {
        auto it = cache->find(t);
        if (it != cache->end()) return it->second;
        const cplx v = evaluate_extension(sample_trace(f, family, t, N), z);
        (*cache)[t] = v;
        return v;
      },
      opt.constancy_nodes, opt.margin_frac);
}

struct MoreraResult {
  double residual = 0;   // |contour integral of Phi dz|
  double relative = 0;   // residual / (2 pi rho * max Phi scale)
  double max_phi = 0;
  double max_scale = 0;
};

// Contour test of Lemma-3-type holomorphy of z -> Phi(z, w) over the circle
// |z - z0| = radius. The disc must avoid the critical set and the center
// curve so the loop structure stays constant along the contour.
inline MoreraResult morera_phi_detailed(const CircleFamily& family, const FunctionSpec& f,
                                        cplx z0, double radius, const SpherePoint& w, int n,
                                        const PhiOptions& opt = {},
                                        const CriticalSet* critical = nullptr) {
  if (n < 8) throw std::invalid_argument("morera_phi_test: need n >= 8");
  CriticalSet local;
  if (!critical) {
    local = build_critical_curves(family, 512);
    critical = &local;
  }
  for (const SlidingBranch* br : {&critical->plus, &critical->minus})
    for (const auto& s : br->samples)
      if (std::abs(s.p - z0) <= radius)
        throw std::domain_error("morera_phi_test: contour disc crosses the critical set P");
  {
    const int nc = 512;
    for (int i = 0; i <= nc; ++i) {
      const double t = family.t_min() + family.span() * double(i) / double(nc);
      if (std::abs(family.center(t) - z0) <= radius)
        throw std::domain_error("morera_phi_test: contour disc crosses the center curve C");
    }
  }

  std::vector<cplx> gamma(n), values(n);
  MoreraResult out;
  int k_loops = -1;
  SamplingController light;
  light.initial_samples = 33;
  light.max_samples_per_loop = 1024;
  light.check_injectivity = false;
  for (int i = 0; i < n; ++i) {
    gamma[i] = z0 + radius * std::polar(1.0, 2.0 * kPi * double(i) / double(n));
    const FiberCurve fc = build_fiber_curve(family, gamma[i], light);
    if (k_loops < 0) k_loops = fc.loop_count();
    else if (k_loops != fc.loop_count())
      throw std::domain_error("morera_phi_test: loop count changes along the contour (crosses P)");
    const PhiResult pr = phi_detailed(family, f, gamma[i], fc.loops, w, opt);
    values[i] = pr.value;
    out.max_phi = std::max(out.max_phi, std::abs(pr.value));
    out.max_scale = std::max(out.max_scale, pr.l1_scale);
  }
  cplx contour = 0.0;
  for (int i = 0; i < n; ++i) {
    const int j = (i + 1) % n;
    contour += 0.5 * (values[i] + values[j]) * (gamma[j] - gamma[i]);
  }
  out.residual = std::abs(contour);
  out.relative = out.residual / (2.0 * kPi * radius * std::max(out.max_scale, 1e-300));
  return out;
}

inline double morera_phi_test(const CircleFamily& family, const FunctionSpec& f, cplx z0,
                              double radius, const SpherePoint& w, int n,
                              const PhiOptions& opt = {}) {
  return morera_phi_detailed(family, f, z0, radius, w, n, opt).residual;
}

}  // namespace holocheck
