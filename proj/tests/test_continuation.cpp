#include <catch2/catch_amalgamated.hpp>

#include "holocheck/cr_integral.hpp"
#include "test_support.hpp"

using namespace holocheck;
using Catch::Approx;

namespace {

const CircleFamily& linear_family() {
  static CircleFamily fam = hctest::load_family("linear.json");
  return fam;
}

int count_events(const ContinuationTrace& tr, EventType type) {
  int n = 0;
  for (const auto& ev : tr.events) n += ev.type == type ? 1 : 0;
  return n;
}

}  // namespace

TEST_CASE("choose_separating_line") {
  SECTION("linear family: the unperturbed axis works") {
    const CriticalSet crit = build_critical_curves(linear_family(), 256);
    const SeparatingLine line = choose_separating_line(linear_family(), crit, 1);
    REQUIRE(line.attempts == 0);
    REQUIRE(std::abs(line.point) < 1e-12);
    REQUIRE(std::abs(std::abs(line.dir.imag()) - 1.0) < 1e-12);
    REQUIRE(line.crossings_c.size() == 1);
    REQUIRE(std::abs(line.crossings_c[0].z) < 1e-9);
    REQUIRE(line.crossings_p.size() == 2);
    for (const auto& cp : line.crossings_p) {
      REQUIRE(std::abs(std::abs(cp.z.imag()) - 1.0) < 1e-9);
      REQUIRE(cp.label == TangencyLabel::case1);
    }
    REQUIRE(line.band_half_width == Approx(0.01).epsilon(1e-6));
  }

  SECTION("family violating (a) has no separating line") {
    const CircleFamily shortfam = hctest::load_family("linear_short.json");
    const CriticalSet crit = build_critical_curves(shortfam, 128);
    REQUIRE_THROWS_WITH(choose_separating_line(shortfam, crit, 1),
                        Catch::Matchers::ContainsSubstring("not separated"));
  }

  SECTION("bisector through a singular point of P gets perturbed away") {
    // center-curve curvature 1 at t=0 makes the envelope branch cusp at z = i,
    // which sits exactly on the unperturbed bisector
    const CircleFamily cusp = CircleFamily::from_expressions("t + i*t^2/2", "1", -1.1, 1.1);
    const CriticalSet crit = build_critical_curves(cusp, 512);
    REQUIRE_FALSE(crit.singular_points.empty());
    const SeparatingLine line = choose_separating_line(cusp, crit, 3);
    REQUIRE(line.attempts >= 1);
    for (const auto& cp : line.crossings_p) REQUIRE(cp.speed > 1e-4);
    REQUIRE(line.crossings_c.size() % 2 == 1);
  }
}

TEST_CASE("track_loops on the linear family") {
  SECTION("interior path: exactly one infinity crossing at the center curve") {
    ContinuationTrace tr =
        track_loops(linear_family(), {cplx(0.0, 0.99), cplx(0.0, -0.99)});
    REQUIRE(count_events(tr, EventType::cross_infinity) == 1);
    REQUIRE(count_events(tr, EventType::create) == 0);
    REQUIRE(count_events(tr, EventType::annihilate) == 0);
    const auto& ev = tr.events.front();
    REQUIRE(std::abs(ev.z) < 1e-6);
    REQUIRE(ev.cause_distance < 1e-6);
    for (const Station& st : tr.stations) REQUIRE(st.loops.size() == 1);
    const LoopClassesResult classes = loop_classes(tr);
    REQUIRE(classes.classes.size() == 1);
    REQUIRE(classes.classes[0].infinity_crossings == 1);
    REQUIRE(classes.selected == classes.classes[0].class_id);
  }

  SECTION("extended path: creation and annihilation at the critical lines") {
    ContinuationTrace tr =
        track_loops(linear_family(), {cplx(0.0, 1.05), cplx(0.0, -1.05)});
    REQUIRE(count_events(tr, EventType::create) == 1);
    REQUIRE(count_events(tr, EventType::annihilate) == 1);
    REQUIRE(count_events(tr, EventType::cross_infinity) == 1);
    for (const auto& ev : tr.events) {
      if (ev.type == EventType::create) REQUIRE(std::abs(ev.z - cplx(0, 1)) < 1e-6);
      if (ev.type == EventType::annihilate) REQUIRE(std::abs(ev.z - cplx(0, -1)) < 1e-6);
      REQUIRE(ev.cause_distance < 1e-5);
    }
    REQUIRE(tr.band_edges[0].has_value());
    REQUIRE(tr.band_edges[1].has_value());
    const LoopClassesResult classes = loop_classes(tr);
    REQUIRE(classes.classes.size() == 1);
    REQUIRE(classes.classes[0].infinity_crossings == 1);
  }

  SECTION("a coarse step still isolates all three events by recursion") {
    StepController ctrl;
    ctrl.step = 0.8;
    ContinuationTrace tr =
        track_loops(linear_family(), {cplx(0.0, 1.05), cplx(0.0, -1.05)}, ctrl);
    REQUIRE(count_events(tr, EventType::create) == 1);
    REQUIRE(count_events(tr, EventType::annihilate) == 1);
    REQUIRE(count_events(tr, EventType::cross_infinity) == 1);
  }

  SECTION("events match the crossings of the separating line") {
    const CriticalSet crit = build_critical_curves(linear_family(), 256);
    const SeparatingLine line = choose_separating_line(linear_family(), crit, 1);
    ContinuationTrace tr =
        track_loops(linear_family(), {cplx(0.0, 1.05), cplx(0.0, -1.05)});
    REQUIRE(count_events(tr, EventType::cross_infinity) == int(line.crossings_c.size()));
    REQUIRE(int(line.crossings_c.size()) % 2 == 1);
  }
}

TEST_CASE("contraction toward the band edges") {
  ContinuationTrace tr = track_loops(linear_family(), {cplx(0.0, 1.04), cplx(0.0, 0.5)});
  // diameters shrink monotonically (within noise) as y increases toward K+
  std::vector<std::pair<double, double>> diam;  // (y, diameter)
  for (const Station& st : tr.stations)
    if (st.loops.size() == 1) diam.push_back({st.z.imag(), st.loops[0].geometry.euclid_diameter()});
  REQUIRE(diam.size() > 10);
  for (std::size_t i = 1; i < diam.size(); ++i)
    if (diam[i].first > diam[i - 1].first)
      REQUIRE(diam[i].second <= diam[i - 1].second + 1e-3);

  // |phi| also decays: injected nonconstant data on the shrinking loop
  const SpherePoint w = SpherePoint::finite(cplx(3.0, -2.0));
  double phi_near_edge = -1.0, phi_far = -1.0;
  for (const Station& st : tr.stations) {
    if (st.loops.size() != 1) continue;
    if (st.loops[0].geometry.euclid_diameter() < 1e-6) continue;
    LoopIntegrand li = make_loop_integrand(linear_family(), FunctionSpec::exp_z(), st.z,
                                           st.loops[0].geometry);
    li.boundary_value = [](double t) { return cplx(t); };
    const double val = std::abs(phi_over_integrand(li, w.value()).value);
    if (st.z.imag() > 0.998 && st.z.imag() < 1.0)
      phi_near_edge = std::max(phi_near_edge, val);
    if (st.z.imag() < 0.6) phi_far = val;
  }
  REQUIRE(phi_near_edge >= 0.0);
  REQUIRE(phi_far > 0.0);
  REQUIRE(phi_near_edge < 0.05 * phi_far);
}

TEST_CASE("index of infinity flips across the center curve") {
  ContinuationTrace tr = track_loops(linear_family(), {cplx(0.0, 0.9), cplx(0.0, -0.9)});
  int first_norm = -1, last_norm = -1;
  for (const Station& st : tr.stations) {
    if (st.loops.size() != 1) continue;
    const RegionClassification rc = classify_regions({st.loops[0].geometry}, 64);
    REQUIRE(rc.quasi_simple);
    for (const auto& p : rc.probes)
      if (p.point.is_infinity()) {
        if (first_norm < 0) first_norm = p.normalized_index;
        last_norm = p.normalized_index;
      }
  }
  REQUIRE(first_norm == 1);  // near K+: small clockwise loop, infinity in the plus region
  REQUIRE(last_norm == 0);
}

TEST_CASE("hairpin: two classes, odd one selected") {
  const CircleFamily hairpin = hctest::load_family("hairpin.json");
  ContinuationTrace tr = track_loops(hairpin, {cplx(-1.5, 2.6), cplx(-1.5, 0.75)});
  REQUIRE(count_events(tr, EventType::create) == 2);
  REQUIRE(count_events(tr, EventType::cross_infinity) == 1);
  const LoopClassesResult classes = loop_classes(tr);
  REQUIRE(classes.classes.size() == 2);
  int odd = 0;
  for (const auto& cs : classes.classes) odd += cs.infinity_crossings % 2;
  REQUIRE(odd == 1);

  // the selected class is the one living on the upper arm; at the final
  // station both classes have one loop each
  const Station& last = tr.stations.back();
  REQUIRE(last.loops.size() == 2);
  const SelectedLoops sel = select_loops(tr, classes.selected, last.z);
  REQUIRE(sel.loops.size() == 1);
  REQUIRE_FALSE(sel.empty);
}

TEST_CASE("select_loops") {
  ContinuationTrace tr = track_loops(linear_family(), {cplx(0.0, 1.05), cplx(0.0, -1.05)});
  const LoopClassesResult classes = loop_classes(tr);

  SECTION("interior station returns the single loop") {
    const Station* mid = nullptr;
    for (const Station& st : tr.stations)
      if (std::abs(st.z - cplx(0, 0.4)) < 0.02) mid = &st;
    REQUIRE(mid != nullptr);
    const SelectedLoops sel = select_loops(tr, classes.selected, mid->z);
    REQUIRE(sel.loops.size() == 1);
    REQUIRE_FALSE(sel.contracted);
  }

  SECTION("station outside the band is empty") {
    const Station& first = tr.stations.front();
    REQUIRE(first.z.imag() > 1.0);
    const SelectedLoops sel = select_loops(tr, classes.selected, first.z);
    REQUIRE(sel.empty);
  }

  SECTION("station hugging the edge is contracted") {
    const Station* edge = nullptr;
    for (const Station& st : tr.stations)
      if (!st.loops.empty() && st.z.imag() > 0.999 && st.z.imag() < 1.0) edge = &st;
    if (edge) {
      const SelectedLoops sel = select_loops(tr, classes.selected, edge->z, 1e-9, 0.2);
      REQUIRE_FALSE(sel.empty);
      REQUIRE(sel.contracted);
    }
  }

  SECTION("non-station point is rejected") {
    REQUIRE_THROWS_AS(select_loops(tr, classes.selected, cplx(0.123456, 0.7891011)),
                      std::invalid_argument);
  }
}

TEST_CASE("split events share the class of their parent") {
  // radius wiggle pinches the incidence set away from the symmetry axis; the
  // asymmetric phase separates the two sides into distinct events
  const CircleFamily wig = hctest::load_family("wiggle.json");
  StepController ctrl;
  ctrl.step = 0.005;
  ContinuationTrace tr = track_loops(wig, {cplx(0.0, 0.66), cplx(0.0, 0.72)}, ctrl);
  REQUIRE(count_events(tr, EventType::split) >= 1);
  for (const auto& ev : tr.events) {
    if (ev.type != EventType::split) continue;
    REQUIRE(ev.loops_before.size() == 1);
    REQUIRE(ev.loops_after.size() == 2);
    const auto root = tr.classes.find(std::size_t(ev.loops_before[0]));
    REQUIRE(tr.classes.find(std::size_t(ev.loops_after[0])) == root);
    REQUIRE(tr.classes.find(std::size_t(ev.loops_after[1])) == root);
    REQUIRE(ev.cause.find("case2") != std::string::npos);
  }
}

TEST_CASE("simultaneous events below the minimum step are ambiguous") {
  const CircleFamily wig = hctest::load_family("wiggle_symmetric.json");
  StepController ctrl;
  ctrl.step = 0.01;
  REQUIRE_THROWS_WITH(track_loops(wig, {cplx(0.0, 0.62), cplx(0.0, 0.55)}, ctrl),
                      Catch::Matchers::ContainsSubstring("ambiguous"));
}
