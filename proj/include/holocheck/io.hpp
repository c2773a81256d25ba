#pragma once

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "holocheck/verifier.hpp"

namespace holocheck {

using ordered_json = nlohmann::ordered_json;

// Family spec files:
//   {"kind":"expr","c":"<expr in t>","r":"<expr in t>","t_range":[a,b]}
//   {"kind":"sampled","t":[...],"c_re":[...],"c_im":[...],"r":[...]}
inline CircleFamily family_from_json(const ordered_json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "expr") {
    const auto& range = j.at("t_range");
    if (!range.is_array() || range.size() != 2)
      throw std::invalid_argument("family spec: t_range must be [a, b]");
    return CircleFamily::from_expressions(j.at("c").get<std::string>(),
                                          j.at("r").get<std::string>(),
                                          range[0].get<double>(), range[1].get<double>());
  }
  if (kind == "sampled") {
    const auto t = j.at("t").get<std::vector<double>>();
    const auto cre = j.at("c_re").get<std::vector<double>>();
    const auto cim = j.at("c_im").get<std::vector<double>>();
    const auto r = j.at("r").get<std::vector<double>>();
    if (cre.size() != t.size() || cim.size() != t.size())
      throw std::invalid_argument("family spec: c_re/c_im length mismatch");
    std::vector<cplx> c(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) c[i] = cplx(cre[i], cim[i]);
    return CircleFamily::from_samples(t, std::move(c), r);
  }
  throw std::invalid_argument("family spec: unknown kind \"" + kind + "\"");
}

// Function spec files:
//   {"kind":"poly","terms":[{"m":..,"n":..,"re":..,"im":..}, ...]}
//   {"kind":"exp"}
//   {"kind":"reciprocal","a_re":..,"a_im":..}
//   {"kind":"grid","x0":..,"x1":..,"y0":..,"y1":..,"nx":..,"ny":..,"re":[...],"im":[...]}
inline FunctionSpec function_from_json(const ordered_json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "poly") {
    std::vector<PolyTerm> terms;
    for (const auto& tj : j.at("terms")) {
      PolyTerm tm;
      tm.z_pow = tj.at("m").get<int>();
      tm.zbar_pow = tj.at("n").get<int>();
      tm.coef = cplx(tj.value("re", 0.0), tj.value("im", 0.0));
      if (tm.z_pow < 0 || tm.zbar_pow < 0)
        throw std::invalid_argument("function spec: negative powers not supported");
      terms.push_back(tm);
    }
    return FunctionSpec::poly(std::move(terms));
  }
  if (kind == "exp") return FunctionSpec::exp_z();
  if (kind == "reciprocal")
    return FunctionSpec::reciprocal(cplx(j.at("a_re").get<double>(), j.value("a_im", 0.0)));
  if (kind == "grid") {
    GridData g;
    g.x0 = j.at("x0").get<double>();
    g.x1 = j.at("x1").get<double>();
    g.y0 = j.at("y0").get<double>();
    g.y1 = j.at("y1").get<double>();
    g.nx = j.at("nx").get<int>();
    g.ny = j.at("ny").get<int>();
    const auto re = j.at("re").get<std::vector<double>>();
    const auto im = j.at("im").get<std::vector<double>>();
    if (re.size() != im.size()) throw std::invalid_argument("function spec: re/im length mismatch");
    g.values.resize(re.size());
    for (std::size_t i = 0; i < re.size(); ++i) g.values[i] = cplx(re[i], im[i]);
    return FunctionSpec::grid(std::move(g));
  }
  throw std::invalid_argument("function spec: unknown kind \"" + kind + "\"");
}

inline ordered_json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  ordered_json j;
  in >> j;
  return j;
}

inline CircleFamily load_family_file(const std::string& path) {
  return family_from_json(load_json_file(path));
}
inline FunctionSpec load_function_file(const std::string& path) {
  return function_from_json(load_json_file(path));
}

inline VerificationConfig config_from_json(const ordered_json& j) {
  VerificationConfig c;
  c.trace_samples = j.value("N", c.trace_samples);
  c.validate_samples = j.value("validate_samples", c.validate_samples);
  c.sweep_samples = j.value("sweep_samples", c.sweep_samples);
  c.omega_mesh = j.value("omega_mesh", c.omega_mesh);
  c.dbar_points_per_side = j.value("dbar_points_per_side", c.dbar_points_per_side);
  c.constancy_stations = j.value("constancy_stations", c.constancy_stations);
  c.phi_pairs = j.value("phi_pairs", c.phi_pairs);
  c.morera_loops = j.value("morera_loops", c.morera_loops);
  c.morera_points = j.value("morera_points", c.morera_points);
  c.path_step = j.value("path_step", c.path_step);
  c.seed = j.value("seed", c.seed);
  c.tol_extendibility = j.value("tol_extendibility", c.tol_extendibility);
  c.tol_consistency = j.value("tol_consistency", c.tol_consistency);
  c.tol_phi = j.value("tol_phi", c.tol_phi);
  c.tol_morera = j.value("tol_morera", c.tol_morera);
  c.tol_dbar = j.value("tol_dbar", c.tol_dbar);
  c.check();
  return c;
}

inline ordered_json to_json(const ConditionReport& c) {
  ordered_json j;
  j["id"] = c.id;
  j["pass"] = c.pass;
  j["margin"] = c.margin;
  j["witness_t"] = c.witness_t;
  if (c.witness_s) j["witness_s"] = *c.witness_s;
  if (!c.note.empty()) j["note"] = c.note;
  return j;
}

inline ordered_json to_json(const ValidationReport& r) {
  ordered_json j;
  j["overall"] = r.overall;
  j["n_samples"] = r.n_samples;
  j["conditions"] = ordered_json::array({to_json(r.cond_a), to_json(r.cond_b),
                                         to_json(r.cond_c), to_json(r.cond_d)});
  return j;
}

inline ordered_json complex_json(cplx z) { return ordered_json::array({z.real(), z.imag()}); }

inline ordered_json to_json(const ContinuationTrace& trace) {
  ordered_json j;
  j["path"] = ordered_json::array();
  for (cplx p : trace.path) j["path"].push_back(complex_json(p));
  j["stations"] = ordered_json::array();
  for (const Station& st : trace.stations) {
    ordered_json sj;
    sj["s"] = st.s;
    sj["z"] = complex_json(st.z);
    sj["loops"] = ordered_json::array();
    for (const StationLoop& sl : st.loops) {
      ordered_json lj;
      lj["id"] = sl.global_id;
      lj["class"] = int(trace.classes.find(std::size_t(sl.global_id)));
      lj["interval"] = ordered_json::array({sl.geometry.interval.lo, sl.geometry.interval.hi});
      lj["samples"] = int(sl.geometry.samples.size());
      lj["diameter"] = sl.geometry.euclid_diameter();
      lj["orientation"] = sl.orientation;
      lj["passes_infinity"] = sl.geometry.passes_infinity;
      if (sl.matched_prev >= 0) lj["matched_prev"] = sl.matched_prev;
      sj["loops"].push_back(std::move(lj));
    }
    j["stations"].push_back(std::move(sj));
  }
  j["events"] = ordered_json::array();
  for (const ContinuationEvent& ev : trace.events) {
    ordered_json ej;
    ej["type"] = to_string(ev.type);
    ej["z"] = complex_json(ev.z);
    ej["s"] = ev.s;
    ej["loops_before"] = ev.loops_before;
    ej["loops_after"] = ev.loops_after;
    ej["cause"] = ev.cause;
    ej["cause_distance"] = ev.cause_distance;
    j["events"].push_back(std::move(ej));
  }
  j["classes"] = ordered_json::array();
  for (const LoopClassSummary& cs : trace.class_summary) {
    ordered_json cj;
    cj["id"] = cs.class_id;
    cj["members"] = cs.members;
    cj["infinity_crossings"] = cs.infinity_crossings;
    cj["selected"] = cs.selected;
    j["classes"].push_back(std::move(cj));
  }
  if (trace.selected_class >= 0) j["selected_class"] = trace.selected_class;
  ordered_json edges = ordered_json::array();
  for (const auto& e : trace.band_edges)
    edges.push_back(e ? complex_json(*e) : ordered_json(nullptr));
  j["band_edges"] = std::move(edges);
  return j;
}

inline ordered_json to_json(const VerificationConfig& c) {
  ordered_json j;
  j["N"] = c.trace_samples;
  j["validate_samples"] = c.validate_samples;
  j["sweep_samples"] = c.sweep_samples;
  j["omega_mesh"] = c.omega_mesh;
  j["dbar_points_per_side"] = c.dbar_points_per_side;
  j["constancy_stations"] = c.constancy_stations;
  j["phi_pairs"] = c.phi_pairs;
  j["morera_loops"] = c.morera_loops;
  j["morera_points"] = c.morera_points;
  j["path_step"] = c.path_step;
  j["seed"] = c.seed;
  j["tol_extendibility"] = c.tol_extendibility;
  j["tol_consistency"] = c.tol_consistency;
  j["tol_phi"] = c.tol_phi;
  j["tol_morera"] = c.tol_morera;
  j["tol_dbar"] = c.tol_dbar;
  return j;
}

inline ordered_json to_json(const VerdictReport& r) {
  ordered_json j;
  j["verdict"] = to_string(r.verdict);
  j["exit_code"] = exit_code(r.verdict);
  if (!r.witness_note.empty()) j["witness"] = r.witness_note;
  j["family_validation"] = to_json(r.family_validation);
  ordered_json hy;
  hy["max_extendibility_defect"] = r.hypothesis_max_defect;
  hy["witness_t"] = r.hypothesis_witness_t;
  j["hypothesis"] = std::move(hy);
  ordered_json mach;
  mach["ran"] = r.machinery_ran;
  mach["max_loop_constancy_defect"] = r.constancy_max;
  mach["constancy_witness_z"] = complex_json(r.constancy_witness);
  mach["max_phi_relative"] = r.phi_max_rel;
  mach["phi_witness_z"] = complex_json(r.phi_witness_z);
  mach["morera_relative"] = r.morera_relative;
  mach["max_morera_relative"] = r.morera_max_rel;
  mach["stations"] = r.stations;
  mach["infinity_crossings_selected"] = r.infinity_crossings;
  mach["parity_ok"] = r.parity_ok;
  mach["quasi_simple_ok"] = r.quasi_simple_ok;
  ordered_json evj;
  evj["create"] = r.events_create;
  evj["annihilate"] = r.events_annihilate;
  evj["split"] = r.events_split;
  evj["merge"] = r.events_merge;
  evj["cross_infinity"] = r.events_cross_infinity;
  mach["events"] = std::move(evj);
  j["machinery"] = std::move(mach);
  ordered_json con;
  con["dbar_residual"] = r.dbar_max;
  con["witness_z"] = complex_json(r.dbar_witness);
  j["conclusion"] = std::move(con);
  j["config"] = to_json(r.config);
  return j;
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

}  // namespace holocheck
