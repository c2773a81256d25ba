#pragma once

#include "holocheck/continuation.hpp"
#include "holocheck/cr_integral.hpp"

namespace holocheck {

struct Rect {
  double x0 = 0, x1 = 0, y0 = 0, y1 = 0;
};

// Max over mesh squares of |contour integral of f dz| / h^2, each side
// integrated by composite trapezoid. For smooth f the value approximates
// 2 |df/dzbar| at the square.
inline double dbar_residual(const FunctionSpec& f, const Rect& region, double h,
                            int points_per_side = 32,
                            const std::function<bool(cplx)>* inside = nullptr,
                            cplx* witness = nullptr) {
  if (!(h > 0.0)) throw std::invalid_argument("dbar_residual: h must be positive");
  if (points_per_side < 1) throw std::invalid_argument("dbar_residual: points_per_side >= 1");
  const int nx = std::max(1, static_cast<int>(std::floor((region.x1 - region.x0) / h + 1e-9)));
  const int ny = std::max(1, static_cast<int>(std::floor((region.y1 - region.y0) / h + 1e-9)));
  double worst = 0.0;
  cplx worst_at{};
  bool any = false;
  const int k = points_per_side;
  for (int iy = 0; iy < ny; ++iy) {
    for (int ix = 0; ix < nx; ++ix) {
      const cplx c0(region.x0 + ix * h, region.y0 + iy * h);
      const cplx corners[4] = {c0, c0 + cplx(h, 0.0), c0 + cplx(h, h), c0 + cplx(0.0, h)};
      if (inside) {
        bool ok = true;
        for (const cplx& c : corners) ok = ok && (*inside)(c);
        if (!ok) continue;
      }
      cplx contour = 0.0;
      for (int side = 0; side < 4; ++side) {
        const cplx a = corners[side], b = corners[(side + 1) % 4];
        const cplx d = (b - a) / double(k);
        cplx prev = f(a);
        for (int j = 1; j <= k; ++j) {
          const cplx cur = f(a + double(j) * d);
          contour += 0.5 * (prev + cur) * d;
          prev = cur;
        }
      }
      const double res = std::abs(contour) / (h * h);
      any = true;
      if (res > worst) {
        worst = res;
        worst_at = c0 + cplx(0.5 * h, 0.5 * h);
      }
    }
  }
  if (!any) throw std::runtime_error("dbar_residual: no mesh square lies inside the region");
  if (witness) *witness = worst_at;
  return worst;
}

struct VerificationConfig {
  int trace_samples = 256;      // N, power of two
  int validate_samples = 257;
  int sweep_samples = 64;       // extendibility t-sweep
  double omega_mesh = 0.01;     // dbar mesh over Omega
  int dbar_points_per_side = 32;
  int constancy_stations = 20;
  int phi_pairs = 50;
  int morera_loops = 5;
  int morera_points = 64;
  double path_step = 0.0;       // 0 = auto
  unsigned seed = 1;

  double tol_extendibility = 1e-8;
  double tol_consistency = 1e-7;
  double tol_phi = 1e-5;     // relative to the integrand scale
  double tol_morera = 1e-4;  // relative
  double tol_dbar = 1e-6;

  void check() const {
    if (trace_samples < 16 || !is_power_of_two(std::size_t(trace_samples)))
      throw std::invalid_argument("config: N must be a power of two >= 16");
    for (double tol : {tol_extendibility, tol_consistency, tol_phi, tol_morera, tol_dbar})
      if (!(tol > 0.0)) throw std::invalid_argument("config: tolerances must be positive");
  }
};

enum class Verdict { consistent, hypothesis_fails, machinery_fails };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::consistent: return "consistent-with-holomorphic";
    case Verdict::hypothesis_fails: return "hypothesis-fails";
    case Verdict::machinery_fails: return "machinery-fails";
  }
  return "?";
}

inline int exit_code(Verdict v) {
  switch (v) {
    case Verdict::consistent: return 0;
    case Verdict::hypothesis_fails: return 2;
    case Verdict::machinery_fails: return 3;
  }
  return 1;
}

struct VerdictReport {
  ValidationReport family_validation;
  bool family_ok = false;

  double hypothesis_max_defect = 0;
  double hypothesis_witness_t = 0;

  bool machinery_ran = false;
  double constancy_max = 0;
  cplx constancy_witness{};
  double phi_max_rel = 0;
  cplx phi_witness_z{};
  std::vector<double> morera_relative;
  double morera_max_rel = 0;
  int infinity_crossings = 0;
  bool parity_ok = false;
  bool quasi_simple_ok = false;
  int stations = 0;
  int events_create = 0, events_annihilate = 0, events_split = 0, events_merge = 0,
      events_cross_infinity = 0;

  double dbar_max = 0;
  cplx dbar_witness{};

  Verdict verdict = Verdict::machinery_fails;
  std::string witness_note;
  VerificationConfig config;
};

namespace detail {

inline bool point_in_domain(const CircleFamily& f, cplx z, double margin) {
  const int n = 512;
  double best = std::numeric_limits<double>::infinity();
  double best_t = f.t_min();
  for (int i = 0; i <= n; ++i) {
    const double t = f.t_min() + f.span() * double(i) / double(n);
    const FamilyJet j = f.jet(t, 0);
    const double d = std::abs(z - j.c0) - j.r0;
    if (d < best) { best = d; best_t = t; }
  }
  double lo = std::max(f.t_min(), best_t - f.span() / n);
  double hi = std::min(f.t_max(), best_t + f.span() / n);
  for (int k = 0; k < 50 && hi - lo > 1e-13 * std::max(1.0, f.span()); ++k) {
    const double m1 = lo + (hi - lo) / 3.0, m2 = hi - (hi - lo) / 3.0;
    const FamilyJet j1 = f.jet(m1, 0), j2 = f.jet(m2, 0);
    if (std::abs(z - j1.c0) - j1.r0 < std::abs(z - j2.c0) - j2.r0) hi = m2;
    else lo = m1;
  }
  const FamilyJet j = f.jet(0.5 * (lo + hi), 0);
  best = std::min(best, std::abs(z - j.c0) - j.r0);
  return best < -margin;
}

// interior probe: a point of winding index +-1 with respect to the loop
inline std::optional<cplx> interior_probe(const Loop& loop, double tol) {
  std::vector<cplx> finite;
  for (const auto& s : loop.samples)
    if (!s.is_infinity()) finite.push_back(s.value());
  if (finite.size() < 3) return std::nullopt;
  std::vector<cplx> candidates;
  cplx centroid = 0.0;
  for (cplx w : finite) centroid += w;
  centroid /= double(finite.size());
  candidates.push_back(centroid);
  for (std::size_t off : {finite.size() / 2, finite.size() / 3, (2 * finite.size()) / 5})
    for (std::size_t i = 0; i < finite.size(); i += std::max<std::size_t>(1, finite.size() / 7)) {
      const std::size_t j = (i + off) % finite.size();
      candidates.push_back(0.5 * (finite[i] + finite[j]));
    }
  for (cplx cand : candidates) {
    try {
      if (std::abs(winding_index(loop, SpherePoint::finite(cand), tol)) == 1) return cand;
    } catch (const std::exception&) {
    }
  }
  return std::nullopt;
}

inline std::optional<cplx> exterior_probe(const Loop& loop, cplx zbar, double tol) {
  const double d = std::max(loop.euclid_diameter(), 1e-6);
  for (int k = 1; k <= 8; ++k) {
    const cplx cand = zbar + std::polar(2.0 * d + 0.7 * k * d, 0.37 * k);
    try {
      if (winding_index(loop, SpherePoint::finite(cand), tol) == 0) return cand;
    } catch (const std::exception&) {
    }
  }
  return std::nullopt;
}

}  // namespace detail

// Full pipeline: family validation, extendibility sweep, critical set and
// separating line, loop continuation along the line, loop-constancy / Phi /
// Morera machinery, and the direct contour test of the conclusion on a grid
// over Omega.
inline VerdictReport run_verification(const CircleFamily& family, const FunctionSpec& f,
                                      const VerificationConfig& config = {}) {
  config.check();
  VerdictReport rep;
  rep.config = config;

  // Stage 1: hypotheses (a)-(d).
  rep.family_validation = validate_family(family, config.validate_samples);
  rep.family_ok = rep.family_validation.overall;
  if (!rep.family_ok) {
    rep.verdict = Verdict::machinery_fails;
    rep.witness_note = "family validation failed";
    return rep;
  }

  // Stage 2: extendibility sweep over t.
  {
    const double a = family.t_min(), b = family.t_max();
    for (int i = 0; i < config.sweep_samples; ++i) {
      const double t = a + (b - a) * (i + 0.5) / double(config.sweep_samples);
      const double d = extendibility_defect(sample_trace(f, family, t, config.trace_samples));
      if (d > rep.hypothesis_max_defect) {
        rep.hypothesis_max_defect = d;
        rep.hypothesis_witness_t = t;
      }
    }
  }
  const bool hypothesis_ok = rep.hypothesis_max_defect <= config.tol_extendibility;

  PhiOptions phi_opt;
  phi_opt.trace_samples = config.trace_samples;
  phi_opt.defect_threshold = std::max(10.0 * config.tol_extendibility, 1e-7);

  // Stage 3-5: machinery along the separating line (needs extendible data).
  ContinuationTrace trace;
  bool have_trace = false;
  if (hypothesis_ok) {
    const CriticalSet crit = build_critical_curves(family, 512);
    const SeparatingLine line = choose_separating_line(family, crit, config.seed);

    // span of the family in line coordinates, padded into the empty region
    double s_lo = 1e300, s_hi = -1e300;
    {
      const int n = 512;
      for (int i = 0; i <= n; ++i) {
        const double t = family.t_min() + family.span() * double(i) / double(n);
        const FamilyJet j = family.jet(t, 0);
        const double s = (std::conj(line.dir) * (j.c0 - line.point)).real();
        s_lo = std::min(s_lo, s - j.r0);
        s_hi = std::max(s_hi, s + j.r0);
      }
    }
    const double pad = 0.02 * (s_hi - s_lo);
    StepController ctrl;
    ctrl.step = config.path_step > 0.0 ? config.path_step : (s_hi - s_lo + 2 * pad) / 200.0;
    trace = track_loops(family, {line.at(s_lo - pad), line.at(s_hi + pad)}, ctrl);
    const LoopClassesResult classes = loop_classes(trace);
    have_trace = true;
    rep.machinery_ran = true;
    rep.stations = int(trace.stations.size());
    for (const auto& ev : trace.events) {
      switch (ev.type) {
        case EventType::create: ++rep.events_create; break;
        case EventType::annihilate: ++rep.events_annihilate; break;
        case EventType::split: ++rep.events_split; break;
        case EventType::merge: ++rep.events_merge; break;
        case EventType::cross_infinity: ++rep.events_cross_infinity; break;
      }
    }
    for (const auto& cs : classes.classes)
      if (cs.selected) rep.infinity_crossings = cs.infinity_crossings;
    rep.parity_ok = true;  // loop_classes throws otherwise

    // stations carrying selected loops, skipping contracted ones
    std::vector<const Station*> active;
    for (const Station& st : trace.stations) {
      bool has = false;
      for (const StationLoop& sl : st.loops)
        if (int(trace.classes.find(std::size_t(sl.global_id))) == classes.selected &&
            sl.geometry.euclid_diameter() > 1e-3)
          has = true;
      if (has) active.push_back(&st);
    }
    if (active.empty()) throw std::runtime_error("run_verification: no usable stations on the line");

    auto selected_loops_of = [&](const Station& st) {
      std::vector<Loop> loops;
      for (const StationLoop& sl : st.loops)
        if (int(trace.classes.find(std::size_t(sl.global_id))) == classes.selected)
          loops.push_back(sl.geometry);
      return loops;
    };

    // loop constancy + quasi-simplicity at sampled stations
    rep.quasi_simple_ok = true;
    const int n_st = std::min<int>(config.constancy_stations, int(active.size()));
    for (int i = 0; i < n_st; ++i) {
      const Station& st = *active[std::size_t(i) * (active.size() - 1) / std::max(1, n_st - 1)];
      const auto loops = selected_loops_of(st);
      for (const Loop& lp : loops) {
        const double d = loop_constancy_defect(family, f, st.z, lp, phi_opt);
        if (d > rep.constancy_max) {
          rep.constancy_max = d;
          rep.constancy_witness = st.z;
        }
      }
      if (!loops.empty() && !classify_regions(loops, 64).quasi_simple) {
        rep.quasi_simple_ok = false;
        rep.witness_note = "selected loops not quasi-simple at z=(" +
                           std::to_string(st.z.real()) + "," + std::to_string(st.z.imag()) + ")";
      }
    }

    // Phi smallness on both sides of the selected loops; the boundary-value
    // cache is shared across the two probes of each station
    int pair_count = 0;
    for (std::size_t k = 0; pair_count < config.phi_pairs && k < 2 * active.size() + 8; ++k) {
      const Station& st = *active[k % active.size()];
      const auto loops = selected_loops_of(st);
      if (loops.empty()) continue;
      auto cache = detail::make_trace_cache();
      std::vector<LoopIntegrand> integrands;
      for (const Loop& lp : loops)
        integrands.push_back(make_loop_integrand(family, f, st.z, lp, phi_opt, cache));
      for (int side = 0; side < 2 && pair_count < config.phi_pairs; ++side) {
        const std::optional<cplx> probe =
            side == 0 ? detail::interior_probe(loops.front(), 1e-9)
                      : detail::exterior_probe(loops.front(), std::conj(st.z), 1e-9);
        if (!probe) continue;
        PhiResult total;
        bool usable = true;
        for (const LoopIntegrand& li : integrands) {
          try {
            const PhiResult r = phi_over_integrand(li, *probe, phi_opt);
            total.value += r.value;
            total.l1_scale += r.l1_scale;
          } catch (const std::domain_error&) {
            usable = false;
            break;
          }
        }
        if (!usable) continue;
        const double rel = std::abs(total.value) / std::max(total.l1_scale, 1e-300);
        if (rel > rep.phi_max_rel) {
          rep.phi_max_rel = rel;
          rep.phi_witness_z = st.z;
        }
        ++pair_count;
      }
    }

    // Morera contour residuals on small discs away from events, P and C
    CriticalSet crit_local = crit;
    int made = 0;
    for (std::size_t k = 0; made < config.morera_loops && k < active.size(); ++k) {
      const Station& st = *active[(k * 37 + 11) % active.size()];
      double d_events = std::numeric_limits<double>::infinity();
      for (const auto& ev : trace.events) d_events = std::min(d_events, std::abs(ev.z - st.z));
      double d_pc = d_events;
      for (const SlidingBranch* br : {&crit.plus, &crit.minus})
        for (const auto& s : br->samples) d_pc = std::min(d_pc, std::abs(s.p - st.z));
      for (int i = 0; i <= 256; ++i) {
        const double t = family.t_min() + family.span() * double(i) / 256.0;
        d_pc = std::min(d_pc, std::abs(family.center(t) - st.z));
      }
      const double radius = 0.5 * d_pc;
      if (!(radius > 1e-4)) continue;
      PhiOptions mopt = phi_opt;
      mopt.rel_tol = 1e-7;
      mopt.max_refinements = 4;
      try {
        const MoreraResult mr = morera_phi_detailed(family, f, st.z, radius,
                                                    SpherePoint::finite(std::conj(st.z) + 5.0),
                                                    config.morera_points, mopt, &crit_local);
        rep.morera_relative.push_back(mr.relative);
        rep.morera_max_rel = std::max(rep.morera_max_rel, mr.relative);
        ++made;
      } catch (const std::domain_error&) {
        continue;
      }
    }
  }

  // Stage 6: direct contour (Morera) test of the conclusion over Omega.
  {
    double xlo = 1e300, xhi = -1e300, ylo = 1e300, yhi = -1e300;
    const int n = 512;
    for (int i = 0; i <= n; ++i) {
      const double t = family.t_min() + family.span() * double(i) / double(n);
      const FamilyJet j = family.jet(t, 0);
      xlo = std::min(xlo, j.c0.real() - j.r0);
      xhi = std::max(xhi, j.c0.real() + j.r0);
      ylo = std::min(ylo, j.c0.imag() - j.r0);
      yhi = std::max(yhi, j.c0.imag() + j.r0);
    }
    const Rect box{xlo, xhi, ylo, yhi};
    const double h = config.omega_mesh;
    std::function<bool(cplx)> inside = [&family, h](cplx z) {
      return detail::point_in_domain(family, z, 0.25 * h);
    };
    rep.dbar_max = dbar_residual(f, box, h, config.dbar_points_per_side, &inside, &rep.dbar_witness);
  }

  // Verdict.
  if (!hypothesis_ok) {
    rep.verdict = Verdict::hypothesis_fails;
    rep.witness_note = "extendibility defect " + std::to_string(rep.hypothesis_max_defect) +
                       " at t=" + std::to_string(rep.hypothesis_witness_t);
  } else {
    const bool machinery_ok = have_trace && rep.parity_ok && rep.quasi_simple_ok &&
                              rep.constancy_max <= config.tol_consistency &&
                              rep.phi_max_rel <= config.tol_phi &&
                              rep.morera_max_rel <= config.tol_morera;
    const bool conclusion_ok = rep.dbar_max <= config.tol_dbar;
    if (machinery_ok && conclusion_ok) {
      rep.verdict = Verdict::consistent;
    } else {
      rep.verdict = Verdict::machinery_fails;
      if (rep.witness_note.empty()) {
        if (!machinery_ok)
          rep.witness_note = "machinery defect above tolerance (constancy " +
                             std::to_string(rep.constancy_max) + ", phi " +
                             std::to_string(rep.phi_max_rel) + ", morera " +
                             std::to_string(rep.morera_max_rel) + ")";
        else
          rep.witness_note =
              "conclusion contour residual " + std::to_string(rep.dbar_max) + " above tolerance";
      }
    }
  }
  return rep;
}

}  // namespace holocheck
