// Command-line front end: family validation, boundary-trace extension tests,
// fiber geometry, critical curves, loop continuation, and the end-to-end
// verification pipeline. All numeric output is JSON at full double precision.
// Exit codes: 0 pass/consistent, 2 hypothesis fails, 3 machinery or
// validation fails, 1 error.

#include <CLI11.hpp>
#include <iostream>

#include "holocheck/io.hpp"
#include "holocheck/svg.hpp"

using namespace holocheck;

namespace {

cplx parse_point(const std::string& s) {
  const auto comma = s.find(',');
  if (comma == std::string::npos)
    throw std::invalid_argument("expected RE,IM but got \"" + s + "\"");
  return cplx(std::stod(s.substr(0, comma)), std::stod(s.substr(comma + 1)));
}

void emit(const ordered_json& j, const std::string& out_path) {
  const std::string text = j.dump(2) + "\n";
  if (!out_path.empty()) write_text_file(out_path, text);
  std::cout << text;
}

int cmd_validate(const std::string& family_path, int samples, const std::string& out_path) {
  const CircleFamily fam = load_family_file(family_path);
  const ValidationReport rep = validate_family(fam, samples);
  emit(to_json(rep), out_path);
  return rep.overall ? 0 : 3;
}

int cmd_extension(const std::string& family_path, const std::string& function_path, double t,
                  int N, double tol, const std::string& out_path) {
  const CircleFamily fam = load_family_file(family_path);
  const FunctionSpec f = load_function_file(function_path);
  const BoundaryTrace tr = sample_trace(f, fam, t, N);
  const double defect = extendibility_defect(tr);
  ordered_json j;
  j["t"] = tr.t;
  j["center"] = complex_json(tr.center);
  j["radius"] = tr.radius;
  j["N"] = tr.n;
  j["extendibility_defect"] = defect;
  j["extends"] = defect <= tol;
  j["tol"] = tol;
  ordered_json coeffs = ordered_json::array();
  for (int n = -tr.n / 2; n < tr.n / 2; ++n) {
    const cplx a = tr.coeff(n);
    if (std::abs(a) > 1e-15) {
      ordered_json cj;
      cj["n"] = n;
      cj["re"] = a.real();
      cj["im"] = a.imag();
      coeffs.push_back(std::move(cj));
    }
  }
  j["coefficients"] = std::move(coeffs);
  emit(j, out_path);
  return defect <= tol ? 0 : 2;
}

int cmd_fiber(const std::string& family_path, const std::string& z_str,
              const std::string& svg_path, const std::string& csv_path,
              const std::string& out_path) {
  const CircleFamily fam = load_family_file(family_path);
  const cplx z = parse_point(z_str);
  const IncidenceSet inc = incidence_intervals(fam, z);
  const FiberCurve fc = build_fiber_curve(fam, z, {}, &inc);
  ordered_json j;
  j["z"] = complex_json(z);
  j["k"] = fc.loop_count();
  j["intervals"] = ordered_json::array();
  for (const auto& iv : inc.intervals)
    j["intervals"].push_back(ordered_json::array({iv.lo, iv.hi}));
  j["tangency_warnings"] = inc.tangency_warnings;
  j["max_closure_error"] = fc.max_closure_error;
  j["loops"] = ordered_json::array();
  for (const Loop& lp : fc.loops) {
    ordered_json lj;
    lj["interval"] = ordered_json::array({lp.interval.lo, lp.interval.hi});
    lj["samples"] = int(lp.samples.size());
    lj["passes_infinity"] = lp.passes_infinity;
    lj["orientation"] = lp.orientation();
    lj["diameter"] = lp.euclid_diameter();
    j["loops"].push_back(std::move(lj));
  }
  if (!svg_path.empty()) write_fiber_svg(svg_path, fc);
  if (!csv_path.empty()) write_fiber_csv(csv_path, fc);
  emit(j, out_path);
  return 0;
}

int cmd_critical(const std::string& family_path, int samples, const std::string& csv_path,
                 const std::string& svg_path, const std::string& out_path) {
  const CircleFamily fam = load_family_file(family_path);
  const CriticalSet crit = build_critical_curves(fam, samples);
  ordered_json j;
  j["samples_per_branch"] = int(crit.plus.samples.size());
  j["singular_points"] = crit.singular_points;
  j["simple"] = crit.simple;
  j["min_regular_separation"] = crit.min_regular_separation;
  if (crit.collision_witness) {
    j["collision_witness"] =
        ordered_json::array({crit.collision_witness->first, crit.collision_witness->second});
  }
  if (!csv_path.empty()) write_critical_csv(csv_path, fam, crit);
  if (!svg_path.empty()) write_critical_svg(svg_path, fam, crit);
  emit(j, out_path);
  return crit.simple ? 0 : 3;
}

int cmd_continuation(const std::string& family_path, unsigned seed, double step,
                     const std::string& svg_path, const std::string& out_path) {
  const CircleFamily fam = load_family_file(family_path);
  const CriticalSet crit = build_critical_curves(fam, 512);
  const SeparatingLine line = choose_separating_line(fam, crit, seed);

  double s_lo = 1e300, s_hi = -1e300;
  const int n = 512;
  for (int i = 0; i <= n; ++i) {
    const double t = fam.t_min() + fam.span() * double(i) / double(n);
    const FamilyJet jt = fam.jet(t, 0);
    const double s = (std::conj(line.dir) * (jt.c0 - line.point)).real();
    s_lo = std::min(s_lo, s - jt.r0);
    s_hi = std::max(s_hi, s + jt.r0);
  }
  const double pad = 0.02 * (s_hi - s_lo);
  StepController ctrl;
  if (step > 0.0) ctrl.step = step;
  else ctrl.step = (s_hi - s_lo + 2 * pad) / 200.0;
  ContinuationTrace trace = track_loops(fam, {line.at(s_lo - pad), line.at(s_hi + pad)}, ctrl);
  loop_classes(trace);

  ordered_json j = to_json(trace);
  ordered_json lj;
  lj["point"] = complex_json(line.point);
  lj["dir"] = complex_json(line.dir);
  lj["attempts"] = line.attempts;
  lj["band_half_width"] = line.band_half_width;
  lj["crossings_c"] = ordered_json::array();
  for (const auto& cc : line.crossings_c) {
    ordered_json cj;
    cj["z"] = complex_json(cc.z);
    cj["t"] = cc.t;
    cj["transversality"] = cc.transversality;
    lj["crossings_c"].push_back(std::move(cj));
  }
  lj["crossings_p"] = ordered_json::array();
  for (const auto& cp : line.crossings_p) {
    ordered_json cj;
    cj["z"] = complex_json(cp.z);
    cj["t"] = cp.t;
    cj["branch"] = cp.branch_sign > 0 ? "+" : "-";
    cj["case"] = to_string(cp.label);
    cj["transversality"] = cp.transversality;
    lj["crossings_p"].push_back(std::move(cj));
  }
  j["separating_line"] = std::move(lj);
  if (!svg_path.empty()) write_continuation_svg(svg_path, trace);
  emit(j, out_path);
  return 0;
}

int cmd_verify(const std::string& family_path, const std::string& function_path,
               const std::string& config_path, const std::string& out_path) {
  const CircleFamily fam = load_family_file(family_path);
  const FunctionSpec f = load_function_file(function_path);
  VerificationConfig cfg;
  if (!config_path.empty()) cfg = config_from_json(load_json_file(config_path));
  const VerdictReport rep = run_verification(fam, f, cfg);
  emit(to_json(rep), out_path);
  return exit_code(rep.verdict);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"analyticity-on-circles verification toolkit"};
  app.require_subcommand(1);

  std::string family_path, function_path, config_path, out_path, svg_path, csv_path, z_str;
  int samples = 257;
  int N = 256;
  double t = 0.0, tol = 1e-8, step = 0.0;
  unsigned seed = 1;

  auto* validate = app.add_subcommand("validate", "check family hypotheses (a)-(d)");
  validate->add_option("--family", family_path, "family spec JSON")->required();
  validate->add_option("--samples", samples, "grid resolution (>= 64)");
  validate->add_option("--out", out_path, "report JSON path");

  auto* extension = app.add_subcommand("extension", "trace f on one circle and test extendibility");
  extension->add_option("--family", family_path)->required();
  extension->add_option("--function", function_path)->required();
  extension->add_option("--t", t, "circle parameter")->required();
  extension->add_option("-N", N, "trace samples (power of two)");
  extension->add_option("--tol", tol, "extendibility tolerance");
  extension->add_option("--out", out_path);

  auto* fiber = app.add_subcommand("fiber", "build the fiber curve over z");
  fiber->add_option("--family", family_path)->required();
  fiber->add_option("--z", z_str, "point RE,IM")->required();
  fiber->add_option("--svg", svg_path, "SVG export path");
  fiber->add_option("--csv", csv_path, "CSV export path");
  fiber->add_option("--out", out_path);

  auto* critical = app.add_subcommand("critical", "sample the critical (sliding) curves");
  critical->add_option("--family", family_path)->required();
  critical->add_option("--samples", samples, "samples per branch");
  critical->add_option("--out", csv_path, "branch CSV path");
  critical->add_option("--svg", svg_path, "SVG overlay path");
  critical->add_option("--json", out_path, "summary JSON path");

  auto* continuation = app.add_subcommand("continuation", "track loops along the separating line");
  continuation->add_option("--family", family_path)->required();
  continuation->add_option("--seed", seed, "perturbation seed");
  continuation->add_option("--step", step, "station step (0 = auto)");
  continuation->add_option("--svg", svg_path, "filmstrip SVG path");
  continuation->add_option("--out", out_path, "trace JSON path");

  auto* verify = app.add_subcommand("verify", "run the full verification pipeline");
  verify->add_option("--family", family_path)->required();
  verify->add_option("--function", function_path)->required();
  verify->add_option("--config", config_path, "config JSON");
  verify->add_option("--out", out_path, "verdict JSON path");

  CLI11_PARSE(app, argc, argv);

  try {
    if (validate->parsed()) return cmd_validate(family_path, samples, out_path);
    if (extension->parsed()) return cmd_extension(family_path, function_path, t, N, tol, out_path);
    if (fiber->parsed()) return cmd_fiber(family_path, z_str, svg_path, csv_path, out_path);
    if (critical->parsed()) return cmd_critical(family_path, samples, csv_path, svg_path, out_path);
    if (continuation->parsed()) return cmd_continuation(family_path, seed, step, svg_path, out_path);
    if (verify->parsed()) return cmd_verify(family_path, function_path, config_path, out_path);
  } catch (const std::exception& e) {
    ordered_json j;
    j["error"] = e.what();
    std::cout << j.dump(2) << "\n";
    return 1;
  }
  return 1;
}
