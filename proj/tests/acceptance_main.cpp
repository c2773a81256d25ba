// Acceptance suite: runs every gate criterion at its pinned tolerance and
// prints one pass/fail line per criterion. Exit status is the number of
// failed criteria.

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <random>
#include <sstream>

#include "holocheck/cr_integral.hpp"
#include "holocheck/io.hpp"
#include "test_support.hpp"

using namespace holocheck;

namespace {

struct Harness {
  int failed = 0;
  void report(int idx, const std::string& name, bool ok, const std::string& detail) {
    std::printf("[%s] %2d. %s%s%s\n", ok ? "PASS" : "FAIL", idx, name.c_str(),
                detail.empty() ? "" : " -- ", detail.c_str());
    std::fflush(stdout);
    if (!ok) ++failed;
  }

  template <typename Fn>
  void run(int idx, const std::string& name, Fn&& fn) {
    try {
      std::string detail;
      const bool ok = fn(&detail);
      report(idx, name, ok, detail);
    } catch (const std::exception& e) {
      report(idx, name, false, std::string("exception: ") + e.what());
    }
  }
};

std::string fmt(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.3e", v);
  return buf;
}

int run_cli(const std::string& args, const std::string& log_path) {
  const char* cli = std::getenv("HOLOCHECK_CLI");
  if (!cli) return -777;
  const std::string cmd = std::string("\"") + cli + "\" " + args + " > " + log_path + " 2>&1";
  const int status = std::system(cmd.c_str());
  if (status == -1) return -1;
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// criterion 1: family gate
bool c1_family_gate(std::string* detail) {
  const ValidationReport pass = validate_family(hctest::load_family("linear.json"), 257);
  const ValidationReport fail = validate_family(hctest::load_family("linear_short.json"), 257);
  const bool ok = pass.overall && std::abs(pass.cond_a.margin - 0.2) <= 1e-12 &&
                  !fail.overall && !fail.cond_a.pass;
  *detail = "(a) margin " + fmt(pass.cond_a.margin) + "; short family (a) margin " +
            fmt(fail.cond_a.margin);
  return ok;
}

// criterion 2: extendibility defects
bool c2_extendibility(std::string* detail) {
  const CircleFamily fam = hctest::load_family("linear.json");
  const char* holo_names[] = {"z2.json", "cubic.json", "exp.json", "recip3.json"};
  double worst_holo = 0.0;
  for (const char* name : holo_names) {
    const FunctionSpec f = hctest::load_function(name);
    for (int i = 0; i <= 20; ++i) {
      const double t = fam.t_min() + fam.span() * i / 20.0;
      worst_holo = std::max(worst_holo, extendibility_defect(sample_trace(f, fam, t, 256)));
    }
  }
  const FunctionSpec zbar = hctest::load_function("zbar.json");
  double worst_zbar_err = 0.0;
  for (int i = 0; i <= 20; ++i) {
    const double t = fam.t_min() + fam.span() * i / 20.0;
    worst_zbar_err = std::max(
        worst_zbar_err, std::abs(extendibility_defect(sample_trace(zbar, fam, t, 256)) - 1.0));
  }
  *detail = "holomorphic max defect " + fmt(worst_holo) + "; conj(z) |defect-1| max " +
            fmt(worst_zbar_err);
  return worst_holo < 1e-9 && worst_zbar_err <= 1e-10;
}

// criterion 3: fiber geometry at z = 0.4i
bool c3_fiber(std::string* detail) {
  const CircleFamily fam = hctest::load_family("linear.json");
  const cplx z(0.0, 0.4);
  const IncidenceSet inc = incidence_intervals(fam, z);
  const double s = std::sqrt(0.84);
  if (inc.intervals.size() != 1) {
    *detail = "expected one interval";
    return false;
  }
  const double end_err =
      std::max(std::abs(inc.intervals[0].lo + s), std::abs(inc.intervals[0].hi - s));
  const FiberCurve fc = build_fiber_curve(fam, z, {}, &inc);
  const cplx w0 = fiber_point(fam, 0.0, z).value();
  const double w0_err = std::abs(w0 - cplx(0.0, -2.5));
  *detail = "interval endpoint err " + fmt(end_err) + "; closure err " +
            fmt(fc.max_closure_error) + "; fiber_point err " + fmt(w0_err);
  return end_err <= 1e-9 && fc.max_closure_error <= 1e-8 && w0_err <= 1e-12;
}

// criterion 4: critical set of the linear family
bool c4_critical(std::string* detail) {
  const CircleFamily fam = hctest::load_family("linear.json");
  const auto cloud = critical_values_oracle(fam, 64, 256);
  std::vector<cplx> formula;
  double on_circle_err = 0.0;
  bool all_case1 = true, all_straight = true;
  for (int i = 0; i < 64; ++i) {
    const double t = fam.t_min() + fam.span() * (i + 0.5) / 64.0;
    const auto [pp, pm] = sliding_points(fam, t);
    formula.push_back(pp);
    formula.push_back(pm);
    on_circle_err = std::max({on_circle_err, std::abs(std::abs(pp - cplx(t)) - 1.0),
                              std::abs(std::abs(pm - cplx(t)) - 1.0)});
    for (int sign : {+1, -1}) {
      const TangencyCase tc = tangency_case(fam, sign, t);
      all_case1 = all_case1 && tc.label == TangencyLabel::case1;
      all_straight = all_straight && !std::isfinite(tc.rho);
    }
  }
  const double haus = hausdorff_distance(cloud, formula);
  *detail = "oracle Hausdorff " + fmt(haus) + "; on-circle err " + fmt(on_circle_err) +
            (all_straight ? "; rho = inf" : "; rho finite!");
  return haus < 1e-6 && on_circle_err <= 1e-10 && all_case1 && all_straight;
}

// criterion 5: kernel identities
bool c5_kernel(std::string* detail) {
  const auto phi_circ = [](std::function<cplx(cplx)> f, cplx w) {
    return phi_over_integrand(make_circle_integrand(cplx(0.0), 1.0, std::move(f), 1024), w).value;
  };
  const double const_err = std::abs(phi_circ([](cplx) { return cplx(1.0); }, cplx(0.3, 0.2)));
  const double inside_err =
      std::abs(phi_circ([](cplx zz) { return zz; }, cplx(0.3, 0.2)) - cplx(0.0, 2.0 * kPi));
  const double outside_err = std::abs(phi_circ([](cplx zz) { return zz; }, cplx(2.0, -1.0)));
  *detail = "F=1: " + fmt(const_err) + "; residue err " + fmt(inside_err) + "; outside " +
            fmt(outside_err);
  return const_err < 1e-10 && inside_err <= 1e-8 && outside_err < 1e-8;
}

// shared continuation trace for criteria 6 and 7
struct TraceBundle {
  ContinuationTrace trace;
  LoopClassesResult classes;
  double step = 0.0;
};

TraceBundle& linear_trace() {
  static TraceBundle bundle = [] {
    TraceBundle b;
    StepController ctrl;
    ctrl.step = 0.013;
    b.step = ctrl.step;
    b.trace = track_loops(hctest::load_family("linear.json"),
                          {cplx(0.0, 1.05), cplx(0.0, -1.05)}, ctrl);
    b.classes = loop_classes(b.trace);
    return b;
  }();
  return bundle;
}

// criterion 6: continuation parity and contraction
bool c6_continuation(std::string* detail) {
  TraceBundle& b = linear_trace();
  int n_create = 0, n_annih = 0, n_cross = 0;
  cplx z_create, z_annih, z_cross;
  for (const auto& ev : b.trace.events) {
    if (ev.type == EventType::create) { ++n_create; z_create = ev.z; }
    if (ev.type == EventType::annihilate) { ++n_annih; z_annih = ev.z; }
    if (ev.type == EventType::cross_infinity) { ++n_cross; z_cross = ev.z; }
  }
  bool ok = n_create == 1 && n_annih == 1 && n_cross == 1;
  ok = ok && std::abs(z_cross) <= b.step;
  ok = ok && std::abs(z_create - cplx(0, 1)) <= b.step && std::abs(z_annih + cplx(0, 1)) <= b.step;

  int odd_classes = 0;
  for (const auto& cs : b.classes.classes) odd_classes += cs.infinity_crossings % 2;
  ok = ok && odd_classes == 1 && b.classes.selected >= 0;

  // quasi-simplicity of the selected loops at every station carrying them
  bool quasi = true;
  for (const Station& st : b.trace.stations) {
    std::vector<Loop> sel;
    for (const StationLoop& sl : st.loops)
      if (int(b.trace.classes.find(std::size_t(sl.global_id))) == b.classes.selected)
        sel.push_back(sl.geometry);
    if (!sel.empty()) quasi = quasi && classify_regions(sel, 48).quasi_simple;
  }
  ok = ok && quasi;

  // loop diameter decreases toward both band edges, within a noise band
  double prev = -1.0;
  bool monotone_top = true;
  for (const Station& st : b.trace.stations) {
    if (st.loops.size() != 1) continue;
    if (st.z.imag() < 0.5) break;  // top section: y decreasing from the edge
    const double d = st.loops[0].geometry.euclid_diameter();
    if (prev >= 0.0 && d + 1e-3 < prev) monotone_top = false;  // must grow away from K+
    prev = d;
  }
  double prev2 = -1.0;
  bool monotone_bottom = true;
  for (auto it = b.trace.stations.rbegin(); it != b.trace.stations.rend(); ++it) {
    if (it->loops.size() != 1) continue;
    if (it->z.imag() > -0.5) break;
    const double d = it->loops[0].geometry.euclid_diameter();
    if (prev2 >= 0.0 && d + 1e-3 < prev2) monotone_bottom = false;
    prev2 = d;
  }
  ok = ok && monotone_top && monotone_bottom;

  *detail = "events " + std::to_string(n_create) + "/" + std::to_string(n_cross) + "/" +
            std::to_string(n_annih) + " (create/cross/annihilate); odd classes " +
            std::to_string(odd_classes) + (quasi ? "; quasi-simple" : "; NOT quasi-simple") +
            ((monotone_top && monotone_bottom) ? "; contraction monotone" : "; contraction broken");
  return ok;
}

// criterion 7: machinery on holomorphic data
bool c7_machinery(std::string* detail) {
  const CircleFamily fam = hctest::load_family("linear.json");
  const FunctionSpec f = FunctionSpec::exp_z();
  TraceBundle& b = linear_trace();
  PhiOptions opt;

  std::vector<const Station*> active;
  for (const Station& st : b.trace.stations)
    if (st.loops.size() == 1 && st.loops[0].geometry.euclid_diameter() > 1e-2)
      active.push_back(&st);

  double constancy = 0.0;
  for (int i = 0; i < 20; ++i) {
    const Station& st = *active[std::size_t(i) * (active.size() - 1) / 19];
    constancy = std::max(constancy,
                         loop_constancy_defect(fam, f, st.z, st.loops[0].geometry, opt));
  }

  double phi_rel = 0.0;
  int pairs = 0;
  for (std::size_t k = 0; pairs < 50 && k < active.size(); ++k) {
    const Station& st = *active[(k * 7 + 3) % active.size()];
    auto cache = detail::make_trace_cache();
    const LoopIntegrand li = make_loop_integrand(fam, f, st.z, st.loops[0].geometry, opt, cache);
    for (int side = 0; side < 2 && pairs < 50; ++side) {
      const std::optional<cplx> probe =
          side == 0 ? detail::interior_probe(st.loops[0].geometry, 1e-9)
                    : detail::exterior_probe(st.loops[0].geometry, std::conj(st.z), 1e-9);
      if (!probe) continue;
      const PhiResult r = phi_over_integrand(li, *probe, opt);
      phi_rel = std::max(phi_rel, std::abs(r.value) / std::max(r.l1_scale, 1e-300));
      ++pairs;
    }
  }

  const CriticalSet crit = build_critical_curves(fam, 256);
  PhiOptions mopt;
  mopt.rel_tol = 1e-7;
  mopt.max_refinements = 4;
  double morera = 0.0;
  int discs = 0;
  const cplx centers[] = {cplx(0.0, 0.4), cplx(0.0, -0.45), cplx(0.0, 0.62), cplx(0.0, -0.3),
                          cplx(0.0, 0.2)};
  for (cplx z0 : centers) {
    const MoreraResult mr =
        morera_phi_detailed(fam, f, z0, 0.05, SpherePoint::finite(cplx(5.0)), 64, mopt, &crit);
    morera = std::max(morera, mr.relative);
    ++discs;
  }

  *detail = "constancy " + fmt(constancy) + "; phi rel " + fmt(phi_rel) + " over " +
            std::to_string(pairs) + " pairs; morera rel " + fmt(morera) + " over " +
            std::to_string(discs) + " discs";
  return constancy < 1e-7 && pairs == 50 && phi_rel < 1e-5 && discs == 5 && morera < 1e-4;
}

// criterion 8: conclusion test and verify exit codes
bool c8_conclusion(std::string* detail) {
  const double res_z2 =
      dbar_residual(FunctionSpec::poly({{2, 0, 1.0}}), Rect{-1.0, 1.0, -1.0, 1.0}, 0.05);
  const double res_zbar =
      dbar_residual(FunctionSpec::poly({{0, 1, 1.0}}), Rect{-1.0, 1.0, -1.0, 1.0}, 0.05);
  bool ok = res_z2 < 1e-12 && std::abs(res_zbar - 2.0) <= 1e-10;
  std::string cli_note;

  const auto tmp = std::filesystem::temp_directory_path();
  const std::string cfg_path = (tmp / "holocheck_accept_cfg.json").string();
  {
    ordered_json cfg;
    cfg["omega_mesh"] = 0.02;
    cfg["dbar_points_per_side"] = 48;
    cfg["sweep_samples"] = 24;
    cfg["constancy_stations"] = 6;
    cfg["phi_pairs"] = 8;
    cfg["morera_loops"] = 2;
    cfg["morera_points"] = 32;
    write_text_file(cfg_path, cfg.dump(2));
  }
  const std::string fam_path = hctest::data_file("families/linear.json");
  const int code_exp = run_cli("verify --family " + fam_path + " --function " +
                                   hctest::data_file("functions/exp.json") + " --config " +
                                   cfg_path + " --out " + (tmp / "accept_v_exp.json").string(),
                               (tmp / "accept_v_exp.log").string());
  const int code_zbar = run_cli("verify --family " + fam_path + " --function " +
                                    hctest::data_file("functions/zbar.json") + " --config " +
                                    cfg_path + " --out " + (tmp / "accept_v_zbar.json").string(),
                                (tmp / "accept_v_zbar.log").string());
  if (code_exp == -777) {
    // no CLI in the environment: fall back to the in-process pipeline
    VerificationConfig cfg;
    cfg.omega_mesh = 0.02;
    cfg.dbar_points_per_side = 48;
    cfg.sweep_samples = 24;
    cfg.constancy_stations = 6;
    cfg.phi_pairs = 8;
    cfg.morera_loops = 2;
    cfg.morera_points = 32;
    const CircleFamily fam = hctest::load_family("linear.json");
    const int e1 = exit_code(run_verification(fam, FunctionSpec::exp_z(), cfg).verdict);
    const int e2 =
        exit_code(run_verification(fam, FunctionSpec::poly({{0, 1, 1.0}}), cfg).verdict);
    ok = ok && e1 == 0 && e2 == 2;
    cli_note = "in-process exits " + std::to_string(e1) + "/" + std::to_string(e2);
  } else {
    ok = ok && code_exp == 0 && code_zbar == 2;
    cli_note = "cli exits " + std::to_string(code_exp) + "/" + std::to_string(code_zbar);
  }
  *detail = "dbar(z^2) " + fmt(res_z2) + "; dbar(conj z) - 2 = " + fmt(res_zbar - 2.0) + "; " +
            cli_note;
  return ok;
}

// criterion 9: incidence oracle equivalence on 100 random points per family
bool c9_oracle(std::string* detail) {
  const char* names[] = {"linear.json", "arc.json", "hairpin.json"};
  double worst = 0.0;
  for (const char* name : names) {
    const CircleFamily fam = hctest::load_family(name);
    double xlo = 1e9, xhi = -1e9, ylo = 1e9, yhi = -1e9;
    for (int i = 0; i <= 96; ++i) {
      const FamilyJet j = fam.jet(fam.t_min() + fam.span() * i / 96.0, 0);
      xlo = std::min(xlo, j.c0.real() - j.r0);
      xhi = std::max(xhi, j.c0.real() + j.r0);
      ylo = std::min(ylo, j.c0.imag() - j.r0);
      yhi = std::max(yhi, j.c0.imag() + j.r0);
    }
    std::mt19937 rng(42);
    std::uniform_real_distribution<double> ux(xlo, xhi), uy(ylo, yhi);
    auto inside = [&fam](double t, cplx z) {
      const FamilyJet j = fam.jet(t, 0);
      return std::abs(z - j.c0) <= j.r0;
    };
    int tested = 0;
    while (tested < 100) {
      const cplx z(ux(rng), uy(rng));
      IncidenceSet inc;
      try {
        inc = incidence_intervals(fam, z, 512);
      } catch (const std::domain_error&) {
        continue;
      }
      // brute force at 10x resolution on the raw predicate
      const int n = 5120;
      std::vector<std::pair<double, double>> brute;
      bool prev = false;
      double open_at = 0.0, prev_t = fam.t_min();
      bool valid = true;
      for (int i = 0; i < n; ++i) {
        const double t = fam.t_min() + fam.span() * double(i) / double(n - 1);
        const bool cur = inside(t, z);
        if (i == 0 && cur) { valid = false; break; }
        if (cur && !prev) {
          double lo = prev_t, hi = t;
          for (int k = 0; k < 100 && hi - lo > 1e-14; ++k) {
            const double mid = 0.5 * (lo + hi);
            (inside(mid, z) ? hi : lo) = mid;
          }
          open_at = 0.5 * (lo + hi);
        }
        if (!cur && prev) {
          double lo = prev_t, hi = t;
          for (int k = 0; k < 100 && hi - lo > 1e-14; ++k) {
            const double mid = 0.5 * (lo + hi);
            (inside(mid, z) ? lo : hi) = mid;
          }
          brute.push_back({open_at, 0.5 * (lo + hi)});
        }
        prev = cur;
        prev_t = t;
      }
      if (!valid || prev) continue;
      if (brute.size() != inc.intervals.size()) {
        *detail = std::string(name) + ": interval count mismatch at z = (" +
                  std::to_string(z.real()) + "," + std::to_string(z.imag()) + ")";
        return false;
      }
      for (std::size_t i = 0; i < brute.size(); ++i) {
        worst = std::max(worst, std::abs(inc.intervals[i].lo - brute[i].first));
        worst = std::max(worst, std::abs(inc.intervals[i].hi - brute[i].second));
      }
      ++tested;
    }
  }
  *detail = "3 families x 100 points; worst endpoint deviation " + fmt(worst);
  return worst < 1e-8;
}

// criterion 10: deterministic reports
bool c10_determinism(std::string* detail) {
  const auto tmp = std::filesystem::temp_directory_path();
  const std::string cfg_path = (tmp / "holocheck_accept_cfg10.json").string();
  {
    ordered_json cfg;
    cfg["omega_mesh"] = 0.05;
    cfg["sweep_samples"] = 16;
    cfg["constancy_stations"] = 4;
    cfg["phi_pairs"] = 4;
    cfg["morera_loops"] = 1;
    cfg["morera_points"] = 16;
    cfg["seed"] = 7;
    write_text_file(cfg_path, cfg.dump(2));
  }
  const std::string args = "verify --family " + hctest::data_file("families/linear.json") +
                           " --function " + hctest::data_file("functions/exp.json") +
                           " --config " + cfg_path + " --out ";
  const std::string p1 = (tmp / "accept_det1.json").string();
  const std::string p2 = (tmp / "accept_det2.json").string();
  const int c1 = run_cli(args + p1, (tmp / "accept_det1.log").string());
  if (c1 == -777) {
    VerificationConfig cfg;
    cfg.omega_mesh = 0.05;
    cfg.sweep_samples = 16;
    cfg.constancy_stations = 4;
    cfg.phi_pairs = 4;
    cfg.morera_loops = 1;
    cfg.morera_points = 16;
    cfg.seed = 7;
    const CircleFamily fam = hctest::load_family("linear.json");
    const std::string a = to_json(run_verification(fam, FunctionSpec::exp_z(), cfg)).dump(2);
    const std::string b = to_json(run_verification(fam, FunctionSpec::exp_z(), cfg)).dump(2);
    *detail = "in-process reports " + std::to_string(a.size()) + " bytes";
    return !a.empty() && a == b;
  }
  const int c2 = run_cli(args + p2, (tmp / "accept_det2.log").string());
  const std::string a = slurp(p1), b = slurp(p2);
  *detail = "cli exits " + std::to_string(c1) + "/" + std::to_string(c2) + "; " +
            std::to_string(a.size()) + " bytes each";
  return c1 == 0 && c2 == 0 && !a.empty() && a == b;
}

}  // namespace

int main() {
  Harness h;
  std::printf("acceptance suite (data: %s)\n", hctest::data_dir().c_str());
  h.run(1, "family gate: hypotheses (a)-(d) on the linear family", c1_family_gate);
  h.run(2, "extendibility defects at N = 256", c2_extendibility);
  h.run(3, "fiber geometry at z = 0.4i", c3_fiber);
  h.run(4, "critical set vs Jacobian-zero oracle", c4_critical);
  h.run(5, "kernel identities of the second-power Cauchy integral", c5_kernel);
  h.run(6, "continuation parity, quasi-simplicity, contraction", c6_continuation);
  h.run(7, "machinery defects on holomorphic data", c7_machinery);
  h.run(8, "conclusion test and verify exit codes", c8_conclusion);
  h.run(9, "incidence oracle equivalence on random points", c9_oracle);
  h.run(10, "byte-identical verify reports under a fixed seed", c10_determinism);
  if (h.failed == 0) std::printf("all 10 acceptance criteria passed\n");
  else std::printf("%d acceptance criteria FAILED\n", h.failed);
  return h.failed;
}
