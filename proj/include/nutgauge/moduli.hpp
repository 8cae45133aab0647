#pragma once

#include <optional>
#include <variant>

#include "nutgauge/core.hpp"
#include "nutgauge/geometry.hpp"

namespace nutgauge::moduli {

/// Point of the unframed moduli space: a center y (chart point or NUT
/// index) and the concentration parameter lambda in (0, +inf].
struct ModuliPoint {
  std::variant<geom::ChartPoint, int> y;  // int: NUT index into the configuration
  double lambda = 1.0;
  bool lambda_infinite = false;

  static ModuliPoint at(const geom::ChartPoint& p, double lam) { return {p, lam, false}; }
  static ModuliPoint at_infinity(geom::ChartPoint p) {
    p.tau = 0.0;  // S^1-orbit representative
    return {p, 0.0, true};
  }
  static ModuliPoint at_nut(int index, double lam, bool inf = false) { return {index, lam, inf}; }

  void validate(const geom::NutConfiguration& cfg) const;
  /// reducible iff lambda = +inf and y is a NUT
  bool reducible(const geom::NutConfiguration& cfg) const;
};

/// Gauge equivalence: points are equal, or both have lambda = +inf and lie
/// on the same isometry orbit (equal projections to R^3).
bool are_equivalent(const ModuliPoint& m1, const ModuliPoint& m2,
                    const geom::NutConfiguration& cfg, double tol = 1e-12);

/// The singular fibration Phi: moduli -> R^3 (projection of the center).
Vec3 fibration(const ModuliPoint& m, const geom::NutConfiguration& cfg);

enum class FiberKind { Generic, Singular };

struct FiberType {
  FiberKind kind = FiberKind::Generic;
  int nut_index = -1;          // set for singular fibers
  bool cone_over_cp2 = false;  // metadata tag at the reducible endpoint
};

FiberType fiber_type(const Vec3& base, const geom::NutConfiguration& cfg, double tol = 1e-9);

/// Disk chart of a generic fiber: (tau, lambda) -> mu (cos tau, sin tau) with
/// mu = 1/(1+lambda); lambda = +inf is the center, lambda -> 0 the boundary.
std::array<double, 2> fiber_chart(double tau, double lambda, bool lambda_infinite);

}  // namespace nutgauge::moduli
