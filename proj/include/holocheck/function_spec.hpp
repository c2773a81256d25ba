#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "holocheck/jet.hpp"

namespace holocheck {

// One monomial z^m * conj(z)^n with a complex coefficient.
struct PolyTerm {
  int z_pow = 0;
  int zbar_pow = 0;
  cplx coef{};
};

// Rectangular grid of samples with bilinear interpolation; row-major with x
// varying fastest.
struct GridData {
  double x0 = 0, x1 = 0, y0 = 0, y1 = 0;
  int nx = 0, ny = 0;
  std::vector<cplx> values;
};

// Boundary-data source: the function whose restrictions to the circles get
// tested. Polynomials in z and conj(z), exp(z), a simple pole, or gridded
// samples.
class FunctionSpec {
 public:
  enum class Kind { poly, exp_z, reciprocal, grid };

  static FunctionSpec poly(std::vector<PolyTerm> terms) {
    FunctionSpec f;
    f.kind_ = Kind::poly;
    f.terms_ = std::move(terms);
    return f;
  }
  static FunctionSpec exp_z() {
    FunctionSpec f;
    f.kind_ = Kind::exp_z;
    return f;
  }
  static FunctionSpec reciprocal(cplx pole) {
    FunctionSpec f;
    f.kind_ = Kind::reciprocal;
    f.pole_ = pole;
    return f;
  }
  static FunctionSpec grid(GridData g) {
    if (g.nx < 2 || g.ny < 2) throw std::invalid_argument("grid function: need nx, ny >= 2");
    if (static_cast<int>(g.values.size()) != g.nx * g.ny)
      throw std::invalid_argument("grid function: value count != nx*ny");
    if (!(g.x0 < g.x1 && g.y0 < g.y1))
      throw std::invalid_argument("grid function: empty extent");
    FunctionSpec f;
    f.kind_ = Kind::grid;
    f.grid_ = std::move(g);
    return f;
  }

  Kind kind() const { return kind_; }
  const std::vector<PolyTerm>& terms() const { return terms_; }
  cplx pole() const { return pole_; }
  const GridData& grid_data() const { return grid_; }

  cplx operator()(cplx z) const {
    switch (kind_) {
      case Kind::poly: {
        cplx s = 0.0;
        const cplx zb = std::conj(z);
        for (const PolyTerm& tm : terms_) s += tm.coef * ipow(z, tm.z_pow) * ipow(zb, tm.zbar_pow);
        return s;
      }
      case Kind::exp_z:
        return std::exp(z);
      case Kind::reciprocal: {
        const cplx d = z - pole_;
        if (d == cplx(0.0)) throw std::domain_error("function: evaluation at the pole");
        return 1.0 / d;
      }
      case Kind::grid:
        return bilinear(z);
    }
    throw std::logic_error("function: unreachable kind");
  }

 private:
  static cplx ipow(cplx b, int n) {
    cplx r = 1.0;
    for (int k = 0; k < n; ++k) r *= b;
    return r;
  }

  cplx bilinear(cplx z) const {
    const double eps = 1e-12 * std::max({1.0, std::abs(grid_.x1 - grid_.x0),
                                         std::abs(grid_.y1 - grid_.y0)});
    const double x = z.real(), y = z.imag();
    if (x < grid_.x0 - eps || x > grid_.x1 + eps || y < grid_.y0 - eps || y > grid_.y1 + eps)
      throw std::runtime_error("function: grid does not cover the queried point");
    const double hx = (grid_.x1 - grid_.x0) / double(grid_.nx - 1);
    const double hy = (grid_.y1 - grid_.y0) / double(grid_.ny - 1);
    double fx = (x - grid_.x0) / hx, fy = (y - grid_.y0) / hy;
    int ix = std::min(grid_.nx - 2, std::max(0, static_cast<int>(std::floor(fx))));
    int iy = std::min(grid_.ny - 2, std::max(0, static_cast<int>(std::floor(fy))));
    const double ux = std::clamp(fx - ix, 0.0, 1.0);
    const double uy = std::clamp(fy - iy, 0.0, 1.0);
    auto at = [&](int i, int j) { return grid_.values[static_cast<std::size_t>(j) * grid_.nx + i]; };
    return (1 - ux) * (1 - uy) * at(ix, iy) + ux * (1 - uy) * at(ix + 1, iy) +
           (1 - ux) * uy * at(ix, iy + 1) + ux * uy * at(ix + 1, iy + 1);
  }

  Kind kind_ = Kind::exp_z;
  std::vector<PolyTerm> terms_;
  cplx pole_{};
  GridData grid_;
};

}  // namespace holocheck
