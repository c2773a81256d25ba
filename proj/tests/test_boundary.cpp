#include <catch2/catch_amalgamated.hpp>

#include "test_support.hpp"

using namespace holocheck;
using Catch::Approx;

namespace {
const CircleFamily& linear_family() {
  static CircleFamily fam = hctest::load_family("linear.json");
  return fam;
}
FunctionSpec zbar() { return FunctionSpec::poly({{0, 1, 1.0}}); }
FunctionSpec z_sq() { return FunctionSpec::poly({{2, 0, 1.0}}); }
}  // namespace

TEST_CASE("sample_trace coefficients") {
  SECTION("z^2 on the unit circle") {
    const BoundaryTrace tr = sample_trace(z_sq(), linear_family(), 0.0, 64);
    REQUIRE(std::abs(tr.coeff(2) - cplx(1.0)) < 1e-12);
    for (int n = -32; n < 32; ++n) {
      if (n == 2) continue;
      REQUIRE(std::abs(tr.coeff(n)) < 1e-12);
    }
  }

  SECTION("conj(z) on the unit circle") {
    const BoundaryTrace tr = sample_trace(zbar(), linear_family(), 0.0, 64);
    REQUIRE(std::abs(tr.coeff(-1) - cplx(1.0)) < 1e-12);
    REQUIRE(std::abs(tr.coeff(0)) < 1e-12);
    REQUIRE(std::abs(tr.coeff(1)) < 1e-12);
  }

  SECTION("conj(z) on a shifted circle picks up conj(c)") {
    const double t0 = 0.7;
    const BoundaryTrace tr = sample_trace(zbar(), linear_family(), t0, 64);
    REQUIRE(std::abs(tr.coeff(0) - cplx(t0)) < 1e-12);
    REQUIRE(std::abs(tr.coeff(-1) - cplx(1.0)) < 1e-12);
  }

  SECTION("N must be a power of two >= 16") {
    REQUIRE_THROWS_AS(sample_trace(z_sq(), linear_family(), 0.0, 48), std::invalid_argument);
    REQUIRE_THROWS_AS(sample_trace(z_sq(), linear_family(), 0.0, 8), std::invalid_argument);
  }
}

TEST_CASE("trace invariants") {
  const FunctionSpec mixed = FunctionSpec::poly({{2, 0, cplx(1, 0.5)}, {1, 1, cplx(0, 1)}, {0, 2, 0.25}});
  const BoundaryTrace tr = sample_trace(mixed, linear_family(), 0.3, 128);

  SECTION("Parseval") {
    double lhs = 0.0, rhs = 0.0;
    for (const cplx& v : tr.values) lhs += std::norm(v);
    lhs /= double(tr.n);
    for (const cplx& a : tr.coefficients) rhs += std::norm(a);
    REQUIRE(lhs == Approx(rhs).epsilon(1e-12));
  }

  SECTION("inverse transform identity") {
    double scale = 0.0, worst = 0.0;
    for (int j = 0; j < tr.n; ++j) {
      cplx rec = 0.0;
      for (int k = 0; k < tr.n; ++k)
        rec += tr.coefficients[std::size_t(k)] * std::polar(1.0, 2.0 * kPi * j * k / tr.n);
      worst = std::max(worst, std::abs(rec - tr.values[std::size_t(j)]));
      scale = std::max(scale, std::abs(tr.values[std::size_t(j)]));
    }
    REQUIRE(worst < 1e-12 * std::max(1.0, scale));
  }
}

TEST_CASE("extendibility_defect") {
  SECTION("holomorphic data has defect below 1e-9 at N = 256") {
    const FunctionSpec holo[] = {z_sq(),
                                 FunctionSpec::poly({{3, 0, 1.0}, {1, 0, -2.0}}),
                                 FunctionSpec::exp_z(), FunctionSpec::reciprocal(3.0)};
    for (const auto& f : holo)
      for (double t : {-1.1, -0.4, 0.0, 0.6, 1.1})
        REQUIRE(extendibility_defect(sample_trace(f, linear_family(), t, 256)) < 1e-9);
  }

  SECTION("exp has defect below 1e-10") {
    REQUIRE(extendibility_defect(sample_trace(FunctionSpec::exp_z(), linear_family(), 0.0, 256)) <
            1e-10);
  }

  SECTION("pole outside the disc keeps defect below 1e-10") {
    REQUIRE(extendibility_defect(sample_trace(FunctionSpec::reciprocal(3.0), linear_family(), 0.0,
                                              256)) < 1e-10);
  }

  SECTION("conj(z) has defect r on every circle") {
    const CircleFamily wig = hctest::load_family("wiggle.json");
    for (double t : {-2.0, -1.0, 0.0, 0.8, 2.2}) {
      const double r = wig.radius(t);
      REQUIRE(extendibility_defect(sample_trace(zbar(), wig, t, 256)) == Approx(r).margin(1e-10));
    }
    REQUIRE(extendibility_defect(sample_trace(zbar(), linear_family(), 0.0, 256)) ==
            Approx(1.0).margin(1e-10));
  }
}

TEST_CASE("evaluate_extension") {
  SECTION("z^2 at 0.4i") {
    const BoundaryTrace tr = sample_trace(z_sq(), linear_family(), 0.0, 64);
    REQUIRE(std::abs(evaluate_extension(tr, cplx(0, 0.4)) - cplx(-0.16)) < 1e-13);
  }

  SECTION("mean value of exp at the center") {
    const BoundaryTrace tr = sample_trace(FunctionSpec::exp_z(), linear_family(), 0.0, 256);
    REQUIRE(std::abs(evaluate_extension(tr, cplx(0.0)) - cplx(1.0)) < 1e-12);
  }

  SECTION("center value is exactly a_0") {
    const BoundaryTrace tr = sample_trace(FunctionSpec::exp_z(), linear_family(), 0.4, 128);
    REQUIRE(evaluate_extension(tr, cplx(0.4)) == tr.coeff(0));
  }

  SECTION("boundary point rejected") {
    const BoundaryTrace tr = sample_trace(z_sq(), linear_family(), 0.0, 64);
    REQUIRE_THROWS_AS(evaluate_extension(tr, cplx(1.0)), std::domain_error);
  }

  SECTION("series matches the discrete Cauchy integral") {
    const BoundaryTrace tr = sample_trace(FunctionSpec::exp_z(), linear_family(), 0.2, 256);
    const cplx z(0.5, 0.3);
    // trapezoid quadrature of (1/2 pi i) integral f(zeta)/(zeta - z) d zeta
    cplx cauchy = 0.0;
    for (int j = 0; j < tr.n; ++j) {
      const cplx zeta = tr.center + tr.radius * std::polar(1.0, 2.0 * kPi * j / tr.n);
      const cplx dzeta = cplx(0, 1) * (zeta - tr.center) * (2.0 * kPi / tr.n);
      cauchy += tr.values[std::size_t(j)] / (zeta - z) * dzeta;
    }
    cauchy /= cplx(0, 2.0 * kPi);
    REQUIRE(std::abs(evaluate_extension(tr, z) - cauchy) < 1e-12);
  }
}

TEST_CASE("consistency_defect") {
  SECTION("entire functions agree across discs") {
    REQUIRE(consistency_defect(FunctionSpec::exp_z(), linear_family(), cplx(0, 0.4), 16, 256) <
            1e-8);
    REQUIRE(consistency_defect(z_sq(), linear_family(), cplx(0.0), 16, 256) < 1e-10);
  }

  SECTION("point outside the domain is rejected") {
    REQUIRE_THROWS_WITH(consistency_defect(FunctionSpec::exp_z(), linear_family(), cplx(5.0), 8, 64),
                        Catch::Matchers::ContainsSubstring("fewer than two discs"));
  }

  SECTION("conj(z) extensions disagree") {
    REQUIRE(consistency_defect(zbar(), linear_family(), cplx(0, 0.4), 16, 256) > 0.1);
  }
}

TEST_CASE("grid-backed functions") {
  GridData g;
  g.x0 = -2.5; g.x1 = 2.5; g.y0 = -1.6; g.y1 = 1.6;
  g.nx = 401; g.ny = 257;
  g.values.resize(std::size_t(g.nx) * g.ny);
  for (int iy = 0; iy < g.ny; ++iy)
    for (int ix = 0; ix < g.nx; ++ix) {
      const cplx z(g.x0 + (g.x1 - g.x0) * ix / (g.nx - 1), g.y0 + (g.y1 - g.y0) * iy / (g.ny - 1));
      g.values[std::size_t(iy) * g.nx + ix] = std::exp(z);
    }
  const FunctionSpec f = FunctionSpec::grid(std::move(g));

  SECTION("bilinear interpolation tracks the sampled function") {
    REQUIRE(std::abs(f(cplx(0.33, 0.21)) - std::exp(cplx(0.33, 0.21))) < 1e-3);
  }

  SECTION("trace through the grid stays near the analytic trace") {
    const BoundaryTrace tg = sample_trace(f, linear_family(), 0.0, 64);
    REQUIRE(extendibility_defect(tg) < 1e-3);  // bilinear interpolation noise floor
  }

  SECTION("query outside the grid errors") {
    GridData small;
    small.x0 = -0.5; small.x1 = 0.5; small.y0 = -0.5; small.y1 = 0.5;
    small.nx = small.ny = 8;
    small.values.assign(64, cplx(1.0));
    const FunctionSpec fs = FunctionSpec::grid(std::move(small));
    REQUIRE_THROWS_WITH(sample_trace(fs, linear_family(), 0.0, 16),
                        Catch::Matchers::ContainsSubstring("grid does not cover"));
  }
}
