#pragma once

#include <map>
#include <memory>
#include <random>

#include "holocheck/critical.hpp"
#include "holocheck/fiber.hpp"
#include "holocheck/union_find.hpp"

namespace holocheck {

struct LineCrossingP {
  cplx z{};
  double t = 0;
  int branch_sign = +1;
  TangencyLabel label = TangencyLabel::case1;
  double transversality = 0;  // |cos angle| between branch velocity and the line normal
  double speed = 0;           // |p'(t)| at the crossing, distance from the singular set
};

struct LineCrossingC {
  cplx z{};
  double t = 0;
  double transversality = 0;
};

// Straight line separating the end circles, with its transverse crossings of
// the critical set P and the center curve C. |crossings_c| must be odd.
struct SeparatingLine {
  cplx point{};
  cplx dir{};     // unit direction
  cplx normal{};  // i * dir
  std::vector<LineCrossingP> crossings_p;
  std::vector<LineCrossingC> crossings_c;
  double band_half_width = 0;
  double min_margin = 0;
  int attempts = 0;     // perturbations tried before acceptance
  double tilt = 0, offset = 0;

  cplx at(double s) const { return point + s * dir; }
};

struct LineSearchOptions {
  double transversality_tol = 1e-3;
  double singular_speed_tol = 1e-4;  // relative floor on |p'| at P crossings
  int scan_resolution = 2048;
  int max_attempts = 1000;
};

namespace detail {

struct LineProbeResult {
  std::vector<LineCrossingP> crossings_p;
  std::vector<LineCrossingC> crossings_c;
  double min_margin = std::numeric_limits<double>::infinity();
  bool odd_c = false;
  bool ok = false;
};

inline LineProbeResult probe_line(const CircleFamily& f, const CriticalSet& crit, cplx m,
                                  cplx dir, const LineSearchOptions& opt) {
  LineProbeResult out;
  const cplx nrm = cplx(0.0, 1.0) * dir;
  auto height = [&](cplx z) { return (std::conj(nrm) * (z - m)).real(); };

  // crossings of the center curve
  {
    const int n = opt.scan_resolution;
    double prev_t = f.t_min();
    double prev_h = height(f.center(prev_t));
    for (int i = 1; i < n; ++i) {
      const double t = f.t_min() + f.span() * double(i) / double(n - 1);
      const double h = height(f.center(t));
      if ((prev_h < 0.0) != (h < 0.0)) {
        double lo = prev_t, hi = t, hlo = prev_h;
        for (int k = 0; k < 80 && hi - lo > 1e-14 * std::max(1.0, f.span()); ++k) {
          const double mid = 0.5 * (lo + hi);
          const double hm = height(f.center(mid));
          if ((hm < 0.0) == (hlo < 0.0)) { lo = mid; hlo = hm; }
          else hi = mid;
        }
        const double tc = 0.5 * (lo + hi);
        const FamilyJet j = detail::sided_jet(f, tc, 1, Side::right);
        LineCrossingC cc;
        cc.t = tc;
        cc.z = j.c0;
        cc.transversality = std::abs((std::conj(nrm) * j.c1).real()) / std::max(std::abs(j.c1), 1e-300);
        out.crossings_c.push_back(cc);
        out.min_margin = std::min(out.min_margin, cc.transversality);
      }
      prev_t = t;
      prev_h = h;
    }
  }

  // crossings of both branches of P
  for (const SlidingBranch* br : {&crit.plus, &crit.minus}) {
    double typical_speed = 0.0;
    for (const auto& s : br->samples) typical_speed = std::max(typical_speed, std::abs(s.dp));
    for (std::size_t i = 1; i < br->samples.size(); ++i) {
      const auto& s0 = br->samples[i - 1];
      const auto& s1 = br->samples[i];
      const double h0 = height(s0.p), h1 = height(s1.p);
      if ((h0 < 0.0) == (h1 < 0.0)) continue;
      double lo = s0.t, hi = s1.t;
      double hlo = h0;
      for (int k = 0; k < 80 && hi - lo > 1e-14 * std::max(1.0, f.span()); ++k) {
        const double mid = 0.5 * (lo + hi);
        const Jet pj = sliding_point_jet(detail::guarded_jet3(f, mid), br->sign);
        const double hm = height(pj.d[0]);
        if ((hm < 0.0) == (hlo < 0.0)) { lo = mid; hlo = hm; }
        else hi = mid;
      }
      const double tp = 0.5 * (lo + hi);
      const Jet pj = sliding_point_jet(detail::guarded_jet3(f, tp), br->sign);
      LineCrossingP cp;
      cp.t = tp;
      cp.z = pj.d[0];
      cp.branch_sign = br->sign;
      cp.speed = std::abs(pj.d[1]) / std::max(typical_speed, 1e-300);
      cp.transversality =
          std::abs((std::conj(nrm) * pj.d[1]).real()) / std::max(std::abs(pj.d[1]), 1e-300);
      if (cp.speed > opt.singular_speed_tol) {
        try {
          cp.label = tangency_case(f, br->sign, tp).label;
        } catch (const std::exception&) {
          cp.label = TangencyLabel::case1;
        }
      }
      out.crossings_p.push_back(cp);
      out.min_margin = std::min({out.min_margin, cp.transversality, cp.speed});
    }
  }

  out.odd_c = (out.crossings_c.size() % 2) == 1;
  bool ok = out.odd_c;
  for (const auto& cc : out.crossings_c) ok = ok && cc.transversality > opt.transversality_tol;
  for (const auto& cp : out.crossings_p)
    ok = ok && cp.transversality > opt.transversality_tol && cp.speed > opt.singular_speed_tol;
  out.ok = ok;
  return out;
}

}  // namespace detail

// Perpendicular bisector of the gap between the end circles, perturbed by a
// seeded deterministic tilt/offset until it crosses P and C transversally,
// away from singular points, with an odd number of center-curve crossings.
inline SeparatingLine choose_separating_line(const CircleFamily& f, const CriticalSet& crit,
                                             unsigned seed = 1, const LineSearchOptions& opt = {}) {
  const FamilyJet ja = f.jet(f.t_min(), 0), jb = f.jet(f.t_max(), 0);
  const double gap = std::abs(ja.c0 - jb.c0) - ja.r0 - jb.r0;
  if (!(gap > 0.0))
    throw std::runtime_error("choose_separating_line: end discs are not separated (condition a)");
  const cplx u = (jb.c0 - ja.c0) / std::abs(jb.c0 - ja.c0);
  const cplx m0 = ja.c0 + (ja.r0 + 0.5 * gap) * u;
  const cplx dir0 = cplx(0.0, 1.0) * u;

  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);

  double best_margin = -1.0;
  for (int attempt = 0; attempt <= opt.max_attempts; ++attempt) {
    double tilt = 0.0, offset = 0.0;
    if (attempt > 0) {
      const double amp = 0.02 + 0.10 * double(attempt) / double(opt.max_attempts);
      tilt = amp * uni(rng);
      offset = 0.25 * gap * amp * uni(rng);
    }
    const cplx dir = dir0 * std::polar(1.0, tilt);
    const cplx m = m0 + offset * u;
    const auto probe = detail::probe_line(f, crit, m, dir, opt);
    best_margin = std::max(best_margin, probe.min_margin);
    if (!probe.ok) continue;

    SeparatingLine line;
    line.point = m;
    line.dir = dir;
    line.normal = cplx(0.0, 1.0) * dir;
    line.crossings_p = probe.crossings_p;
    line.crossings_c = probe.crossings_c;
    line.min_margin = probe.min_margin;
    line.attempts = attempt;
    line.tilt = tilt;
    line.offset = offset;
    auto dist_line_circle = [&](cplx c, double r) {
      return std::abs((std::conj(line.normal) * (c - m)).real()) - r;
    };
    line.band_half_width =
        0.1 * std::max(1e-6, std::min(dist_line_circle(ja.c0, ja.r0), dist_line_circle(jb.c0, jb.r0)));
    return line;
  }
  throw std::runtime_error(
      "choose_separating_line: no valid perturbation found; best margin " +
      std::to_string(best_margin));
}

enum class EventType { create, annihilate, split, merge, cross_infinity };

inline const char* to_string(EventType e) {
  switch (e) {
    case EventType::create: return "CREATE";
    case EventType::annihilate: return "ANNIHILATE";
    case EventType::split: return "SPLIT";
    case EventType::merge: return "MERGE";
    case EventType::cross_infinity: return "CROSS_INFINITY";
  }
  return "?";
}

struct ContinuationEvent {
  EventType type = EventType::create;
  cplx z{};       // located on the path, within tol of P or C
  double s = 0;   // arc-length coordinate along the path
  std::vector<int> loops_before, loops_after;  // global loop ids
  std::string cause;       // nearest structure: P branch with case label, or C
  double cause_distance = 0;
};

struct StationLoop {
  Loop geometry;
  int global_id = -1;
  int orientation = +1;
  int matched_prev = -1;  // global id at the previous station, -1 if none
};

struct Station {
  double s = 0;
  cplx z{};
  std::vector<StationLoop> loops;
};

struct LoopClassSummary {
  int class_id = -1;
  int members = 0;
  int infinity_crossings = 0;
  bool selected = false;
};

struct ContinuationTrace {
  std::vector<cplx> path;
  std::vector<Station> stations;
  std::vector<ContinuationEvent> events;
  UnionFind classes;
  int loop_count = 0;  // number of global loop ids
  std::array<std::optional<cplx>, 2> band_edges;  // contraction ends K+/K-

  // filled by loop_classes
  std::vector<LoopClassSummary> class_summary;
  int selected_class = -1;
};

struct StepController {
  double step = 0.0;          // 0 = auto: path length / 160
  double min_step = 1e-7;     // ambiguity floor for event separation
  double event_tol = 1e-9;    // bisection bracket size on z
  int incidence_resolution = 512;
  SamplingController sampling{0.05, 33, 1024, false, 1e-9};
  double match_drift = 6.0;   // allowed station-to-station motion, in |dz| units
};

namespace detail {

// Chordal Hausdorff distance between subsampled loops.
inline double loop_hausdorff(const Loop& a, const Loop& b, int cap = 96) {
  auto pick = [cap](const Loop& l) {
    std::vector<SpherePoint> pts;
    const std::size_t n = l.samples.size();
    const std::size_t stride = std::max<std::size_t>(1, n / static_cast<std::size_t>(cap));
    for (std::size_t i = 0; i < n; i += stride) pts.push_back(l.samples[i]);
    return pts;
  };
  const auto pa = pick(a), pb = pick(b);
  auto directed = [](const std::vector<SpherePoint>& X, const std::vector<SpherePoint>& Y) {
    double worst = 0.0;
    for (const auto& x : X) {
      double best = std::numeric_limits<double>::infinity();
      for (const auto& y : Y) best = std::min(best, chordal_distance(x, y));
      worst = std::max(worst, best);
    }
    return worst;
  };
  return std::max(directed(pa, pb), directed(pb, pa));
}

inline double union_hausdorff(const Loop& a, const Loop& b1, const Loop& b2, int cap = 96) {
  Loop merged;
  merged.samples = b1.samples;
  merged.samples.insert(merged.samples.end(), b2.samples.begin(), b2.samples.end());
  return loop_hausdorff(a, merged, cap);
}

struct MatchOutcome {
  // index pairs (i in A, j in B); -1 marks unmatched
  std::vector<int> match_of_a, match_of_b;
  bool ok = false;
};

inline MatchOutcome match_loops(const std::vector<Loop>& A, const std::vector<Loop>& B,
                                double dz, double drift_factor) {
  MatchOutcome out;
  out.match_of_a.assign(A.size(), -1);
  out.match_of_b.assign(B.size(), -1);
  struct Cand { double d; int i, j; };
  std::vector<Cand> cands;
  for (std::size_t i = 0; i < A.size(); ++i)
    for (std::size_t j = 0; j < B.size(); ++j)
      cands.push_back({loop_hausdorff(A[i], B[j]), int(i), int(j)});
  std::sort(cands.begin(), cands.end(), [](const Cand& x, const Cand& y) {
    return x.d < y.d || (x.d == y.d && (x.i < y.i || (x.i == y.i && x.j < y.j)));
  });
  for (const Cand& c : cands) {
    if (out.match_of_a[c.i] != -1 || out.match_of_b[c.j] != -1) continue;
    const double cap =
        0.45 * std::min(A[c.i].diameter(), B[c.j].diameter()) + drift_factor * dz + 1e-12;
    if (c.d <= cap) {
      out.match_of_a[c.i] = c.j;
      out.match_of_b[c.j] = int(c.i);
    }
  }
  out.ok = true;
  return out;
}

}  // namespace detail

// Tracks the loops of the fiber curve along a polyline path. Stations are
// matched by chordal Hausdorff distance; changes are refined by recursive
// bisection until each event is isolated within event_tol, then classified:
// loop count +1 near P is CREATE (or SPLIT when two successors jointly match
// a predecessor), -1 is ANNIHILATE/MERGE, and an orientation flip of a
// matched loop is CROSS_INFINITY at a crossing of the center curve.
class LoopTracker {
 public:
  LoopTracker(const CircleFamily& family, const StepController& ctrl)
      : family_(family), ctrl_(ctrl) {}

  ContinuationTrace run(const std::vector<cplx>& path) {
    if (path.size() < 2) throw std::invalid_argument("track_loops: path needs >= 2 points");
    trace_ = ContinuationTrace{};
    trace_.path = path;
    seg_starts_.clear();
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < path.size(); ++i) {
      seg_starts_.push_back(total);
      total += std::abs(path[i + 1] - path[i]);
    }
    total_length_ = total;
    const double step = ctrl_.step > 0.0 ? ctrl_.step : total / 160.0;

    Snapshot prev = snapshot(0.0);
    commit_station(prev, -1);
    double s = 0.0;
    while (s < total) {
      const double s_next = std::min(total, s + step);
      Snapshot next = snapshot(s_next);
      process_segment(prev, next, 0);
      commit_station(next, -1);
      prev = std::move(next);
      s = s_next;
    }
    finalize_band_edges();
    return std::move(trace_);
  }

 private:
  struct Snapshot {
    double s = 0;
    cplx z{};
    std::vector<Loop> loops;
    std::vector<int> orientation;
    std::vector<int> global_id;  // assigned when committed / linked
  };

  cplx point_at(double s) const {
    const auto& p = trace_.path;
    for (std::size_t i = 0; i + 1 < p.size(); ++i) {
      const double len = std::abs(p[i + 1] - p[i]);
      if (s <= seg_starts_[i] + len || i + 2 == p.size()) {
        const double u = len > 0.0 ? std::clamp((s - seg_starts_[i]) / len, 0.0, 1.0) : 0.0;
        return p[i] + u * (p[i + 1] - p[i]);
      }
    }
    return p.back();
  }

  Snapshot snapshot(double s) {
    Snapshot sn;
    sn.s = s;
    sn.z = point_at(s);
    IncidenceSet inc = incidence_intervals(family_, sn.z, ctrl_.incidence_resolution);
    FiberCurve fc = build_fiber_curve(family_, sn.z, ctrl_.sampling, &inc);
    sn.loops = std::move(fc.loops);
    sn.orientation.reserve(sn.loops.size());
    for (const Loop& lp : sn.loops) sn.orientation.push_back(lp.orientation());
    sn.global_id.assign(sn.loops.size(), -1);
    return sn;
  }

  int new_global_id() {
    trace_.classes.add();
    return trace_.loop_count++;
  }

  void commit_station(Snapshot& sn, int /*unused*/) {
    Station st;
    st.s = sn.s;
    st.z = sn.z;
    for (std::size_t i = 0; i < sn.loops.size(); ++i) {
      if (sn.global_id[i] < 0) sn.global_id[i] = new_global_id();
      StationLoop sl;
      sl.geometry = sn.loops[i];
      sl.global_id = sn.global_id[i];
      sl.orientation = sn.orientation[i];
      sl.matched_prev = matched_prev_.count(sn.global_id[i])
                            ? matched_prev_[sn.global_id[i]]
                            : -1;
      st.loops.push_back(std::move(sl));
    }
    trace_.stations.push_back(std::move(st));
  }

  // Links B's loops to A's, records events in between; on unresolvable
  // configurations bisects recursively down to event_tol.
  void process_segment(Snapshot& a, Snapshot& b, int depth) {
    const double dz = std::abs(b.z - a.z);
    auto m = detail::match_loops(a.loops, b.loops, dz, ctrl_.match_drift);

    std::vector<int> unmatched_a, unmatched_b;
    for (std::size_t i = 0; i < a.loops.size(); ++i)
      if (m.match_of_a[i] < 0) unmatched_a.push_back(int(i));
    for (std::size_t j = 0; j < b.loops.size(); ++j)
      if (m.match_of_b[j] < 0) unmatched_b.push_back(int(j));

    int orientation_flips = 0;
    for (std::size_t i = 0; i < a.loops.size(); ++i)
      if (m.match_of_a[i] >= 0 && a.orientation[i] != b.orientation[m.match_of_a[i]])
        ++orientation_flips;

    const int changes = int(unmatched_a.size() + unmatched_b.size()) + orientation_flips;
    if (changes == 0) {
      link_matches(a, b, m);
      return;
    }

    if (dz > ctrl_.event_tol && dz > ctrl_.min_step) {
      // isolate the change by bisection
      Snapshot mid = snapshot(0.5 * (a.s + b.s));
      process_segment(a, mid, depth + 1);
      process_segment(mid, b, depth + 1);
      return;
    }

    // at event scale: classify exactly one event
    if (changes > 1 && !(unmatched_b.size() == 2 && unmatched_a.empty() && orientation_flips == 0) &&
        !(unmatched_a.size() == 2 && unmatched_b.empty() && orientation_flips == 0))
      throw std::runtime_error(
          "track_loops: ambiguous loop matching below the minimum step near z = (" +
          std::to_string(b.z.real()) + ", " + std::to_string(b.z.imag()) + ")");

    ContinuationEvent ev;
    ev.s = 0.5 * (a.s + b.s);
    ev.z = 0.5 * (a.z + b.z);

    if (orientation_flips == 1 && unmatched_a.empty() && unmatched_b.empty()) {
      ev.type = EventType::cross_infinity;
      for (std::size_t i = 0; i < a.loops.size(); ++i)
        if (m.match_of_a[i] >= 0 && a.orientation[i] != b.orientation[m.match_of_a[i]]) {
          ensure_id(a, int(i));
          ev.loops_before.push_back(a.global_id[i]);
        }
      link_matches(a, b, m);
      for (int gid : ev.loops_before) ev.loops_after.push_back(gid);
    } else if (unmatched_b.size() >= 1 && unmatched_a.empty()) {
      // count increased: split if a predecessor matches the union, else create
      int parent = -1, sibling = -1;
      const int j_new = unmatched_b.front();
      for (std::size_t i = 0; i < a.loops.size() && parent < 0; ++i) {
        const int j_old = m.match_of_a[i];
        if (j_old < 0) continue;
        const double d = detail::union_hausdorff(a.loops[i], b.loops[j_old], b.loops[j_new]);
        if (d <= 0.45 * a.loops[i].diameter() + ctrl_.match_drift * dz + 1e-12) {
          parent = int(i);
          sibling = j_old;
        }
      }
      if (unmatched_b.size() == 2)
        parent = -1;  // simultaneous appearances are never a split
      if (parent >= 0) {
        ev.type = EventType::split;
        ensure_id(a, parent);
        ev.loops_before.push_back(a.global_id[parent]);
        link_matches(a, b, m);
        b.global_id[j_new] = new_global_id();
        trace_.classes.unite(std::size_t(a.global_id[parent]), std::size_t(b.global_id[sibling]));
        trace_.classes.unite(std::size_t(a.global_id[parent]), std::size_t(b.global_id[j_new]));
        matched_prev_[b.global_id[j_new]] = a.global_id[parent];
        ev.loops_after.push_back(b.global_id[sibling]);
        ev.loops_after.push_back(b.global_id[j_new]);
      } else {
        if (unmatched_b.size() > 1)
          throw std::runtime_error(
              "track_loops: ambiguous loop matching (simultaneous loop appearances) near z = (" +
              std::to_string(b.z.real()) + ", " + std::to_string(b.z.imag()) + ")");
        ev.type = EventType::create;
        link_matches(a, b, m);
        b.global_id[j_new] = new_global_id();
        ev.loops_after.push_back(b.global_id[j_new]);
      }
    } else if (unmatched_a.size() >= 1 && unmatched_b.empty()) {
      // count decreased: merge if the union of two predecessors matches, else annihilate
      const int i_gone = unmatched_a.front();
      int partner = -1, target = -1;
      for (std::size_t i = 0; i < a.loops.size() && partner < 0; ++i) {
        if (int(i) == i_gone || m.match_of_a[i] < 0) continue;
        const int j_old = m.match_of_a[i];
        const double d = detail::union_hausdorff(b.loops[j_old], a.loops[i], a.loops[i_gone]);
        if (d <= 0.45 * b.loops[j_old].diameter() + ctrl_.match_drift * dz + 1e-12) {
          partner = int(i);
          target = j_old;
        }
      }
      if (unmatched_a.size() == 2) partner = -1;
      if (partner >= 0) {
        ev.type = EventType::merge;
        ensure_id(a, i_gone);
        ensure_id(a, partner);
        link_matches(a, b, m);
        trace_.classes.unite(std::size_t(a.global_id[i_gone]), std::size_t(a.global_id[partner]));
        ev.loops_before.push_back(a.global_id[i_gone]);
        ev.loops_before.push_back(a.global_id[partner]);
        ev.loops_after.push_back(b.global_id[target]);
      } else {
        if (unmatched_a.size() > 1)
          throw std::runtime_error(
              "track_loops: ambiguous loop matching (simultaneous loop disappearances) near z = (" +
              std::to_string(b.z.real()) + ", " + std::to_string(b.z.imag()) + ")");
        ev.type = EventType::annihilate;
        ensure_id(a, i_gone);
        ev.loops_before.push_back(a.global_id[i_gone]);
        link_matches(a, b, m);
      }
    } else {
      throw std::runtime_error("track_loops: unclassifiable loop transition near z = (" +
                               std::to_string(b.z.real()) + ", " + std::to_string(b.z.imag()) +
                               ")");
    }

    attach_cause(ev);
    trace_.events.push_back(std::move(ev));
  }

  void ensure_id(Snapshot& sn, int i) {
    if (sn.global_id[i] < 0) sn.global_id[i] = new_global_id();
  }

  void link_matches(Snapshot& a, Snapshot& b, const detail::MatchOutcome& m) {
    for (std::size_t i = 0; i < a.loops.size(); ++i) {
      const int j = m.match_of_a[i];
      if (j < 0) continue;
      ensure_id(a, int(i));
      if (b.global_id[j] < 0) {
        b.global_id[j] = new_global_id();
        matched_prev_[b.global_id[j]] = a.global_id[i];
      }
      trace_.classes.unite(std::size_t(a.global_id[i]), std::size_t(b.global_id[j]));
    }
  }

  void attach_cause(ContinuationEvent& ev) {
    // distance to the center curve
    double best_c = std::numeric_limits<double>::infinity();
    double best_ct = family_.t_min();
    const int n = 1024;
    for (int i = 0; i <= n; ++i) {
      const double t = family_.t_min() + family_.span() * double(i) / double(n);
      const double d = std::abs(family_.center(t) - ev.z);
      if (d < best_c) { best_c = d; best_ct = t; }
    }
    {
      double lo = std::max(family_.t_min(), best_ct - family_.span() / n);
      double hi = std::min(family_.t_max(), best_ct + family_.span() / n);
      for (int k = 0; k < 60 && hi - lo > 1e-14 * std::max(1.0, family_.span()); ++k) {
        const double m1 = lo + (hi - lo) / 3.0, m2 = hi - (hi - lo) / 3.0;
        if (std::abs(family_.center(m1) - ev.z) < std::abs(family_.center(m2) - ev.z)) hi = m2;
        else lo = m1;
      }
      best_ct = 0.5 * (lo + hi);
      best_c = std::abs(family_.center(best_ct) - ev.z);
    }

    // distance to the critical branches
    double best_p = std::numeric_limits<double>::infinity();
    double best_pt = family_.t_min();
    int best_sign = +1;
    if (!critical_) critical_ = std::make_unique<CriticalSet>(build_critical_curves(family_, 512));
    for (const SlidingBranch* br : {&critical_->plus, &critical_->minus})
      for (const auto& s : br->samples) {
        const double d = std::abs(s.p - ev.z);
        if (d < best_p) { best_p = d; best_pt = s.t; best_sign = br->sign; }
      }

    if (ev.type == EventType::cross_infinity) {
      ev.cause = "C(t=" + std::to_string(best_ct) + ")";
      ev.cause_distance = best_c;
    } else {
      std::string label = "unclassified";
      try {
        label = to_string(tangency_case(family_, best_sign, best_pt).label);
      } catch (const std::exception&) {
      }
      ev.cause = std::string("P(branch=") + (best_sign > 0 ? "+" : "-") + ", " + label +
                 ", t=" + std::to_string(best_pt) + ")";
      ev.cause_distance = best_p;
    }
  }

  void finalize_band_edges() {
    // outermost contraction events along the path
    const ContinuationEvent* first = nullptr;
    const ContinuationEvent* last = nullptr;
    for (const auto& ev : trace_.events) {
      if (ev.type != EventType::create && ev.type != EventType::annihilate) continue;
      if (!first || ev.s < first->s) first = &ev;
      if (!last || ev.s > last->s) last = &ev;
    }
    if (first) trace_.band_edges[0] = first->z;
    if (last && last != first) trace_.band_edges[1] = last->z;
  }

  const CircleFamily& family_;
  StepController ctrl_;
  ContinuationTrace trace_;
  std::vector<double> seg_starts_;
  double total_length_ = 0;
  std::map<int, int> matched_prev_;
  std::unique_ptr<CriticalSet> critical_;
};

inline ContinuationTrace track_loops(const CircleFamily& family, const std::vector<cplx>& path,
                                     const StepController& ctrl = {}) {
  return LoopTracker(family, ctrl).run(path);
}

struct LoopClassesResult {
  std::vector<LoopClassSummary> classes;
  int selected = -1;
};

// Union-find closure over the deformation/split equivalences, counting
// infinity crossings per class; selects the class with odd parity.
inline LoopClassesResult loop_classes(ContinuationTrace& trace) {
  std::map<int, LoopClassSummary> by_class;
  for (const Station& st : trace.stations)
    for (const StationLoop& sl : st.loops) {
      const int root = int(trace.classes.find(std::size_t(sl.global_id)));
      auto& cs = by_class[root];
      cs.class_id = root;
      ++cs.members;
    }
  for (const ContinuationEvent& ev : trace.events) {
    if (ev.type != EventType::cross_infinity) continue;
    for (int gid : ev.loops_before) {
      const int root = int(trace.classes.find(std::size_t(gid)));
      ++by_class[root].infinity_crossings;
      break;
    }
  }
  LoopClassesResult out;
  std::vector<int> odd;
  for (auto& [root, cs] : by_class) {
    out.classes.push_back(cs);
    if (cs.infinity_crossings % 2 == 1) odd.push_back(root);
  }
  if (odd.size() != 1) {
    std::string dump = "loop_classes: expected exactly one odd-parity class, found " +
                       std::to_string(odd.size()) + "; classes:";
    for (const auto& cs : out.classes)
      dump += " [id=" + std::to_string(cs.class_id) +
              " members=" + std::to_string(cs.members) +
              " inf=" + std::to_string(cs.infinity_crossings) + "]";
    throw std::runtime_error(dump);
  }
  out.selected = odd.front();
  for (auto& cs : out.classes) cs.selected = (cs.class_id == out.selected);
  trace.class_summary = out.classes;
  trace.selected_class = out.selected;
  return out;
}

struct SelectedLoops {
  std::vector<Loop> loops;
  bool empty = false;       // z outside the band U
  bool contracted = false;  // all loops below the contraction tolerance
};

// Loops of the selected class at the station nearest to z.
inline SelectedLoops select_loops(const ContinuationTrace& trace, int class_id, cplx z,
                                  double station_tol = 1e-9, double contract_tol = 1e-3) {
  const Station* best = nullptr;
  double best_d = std::numeric_limits<double>::infinity();
  for (const Station& st : trace.stations) {
    const double d = std::abs(st.z - z);
    if (d < best_d) { best_d = d; best = &st; }
  }
  if (!best || best_d > std::max(station_tol, 1e-12))
    throw std::invalid_argument("select_loops: z is not a station of the trace");
  SelectedLoops out;
  for (const StationLoop& sl : best->loops)
    if (int(trace.classes.find(std::size_t(sl.global_id))) == class_id)
      out.loops.push_back(sl.geometry);
  out.empty = out.loops.empty();
  if (!out.empty) {
    out.contracted = true;
    for (const Loop& lp : out.loops) out.contracted &= lp.euclid_diameter() < contract_tol;
  }
  return out;
}

}  // namespace holocheck
