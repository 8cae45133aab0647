#include "nutgauge/moduli.hpp"

namespace nutgauge::moduli {

void ModuliPoint::validate(const geom::NutConfiguration& cfg) const {
  if (!lambda_infinite && !(lambda > 0)) throw ValidationError("ModuliPoint: lambda must be > 0");
  if (std::holds_alternative<int>(y)) {
    const int i = std::get<int>(y);
    if (i < 0 || std::size_t(i) >= cfg.points.size())
      throw ValidationError("ModuliPoint: NUT index out of range");
  }
}

bool ModuliPoint::reducible(const geom::NutConfiguration& cfg) const {
  (void)cfg;
  return lambda_infinite && std::holds_alternative<int>(y);
}

Vec3 fibration(const ModuliPoint& m, const geom::NutConfiguration& cfg) {
  m.validate(cfg);
  if (std::holds_alternative<int>(m.y)) return cfg.points[std::size_t(std::get<int>(m.y))];
  return std::get<geom::ChartPoint>(m.y).x;
}

bool are_equivalent(const ModuliPoint& m1, const ModuliPoint& m2,
                    const geom::NutConfiguration& cfg, double tol) {
  m1.validate(cfg);
  m2.validate(cfg);
  const Vec3 b1 = fibration(m1, cfg), b2 = fibration(m2, cfg);
  const bool same_base = norm(b1 - b2) <= tol;
  if (m1.lambda_infinite && m2.lambda_infinite) return same_base;
  if (m1.lambda_infinite != m2.lambda_infinite) return false;
  if (!same_base || std::abs(m1.lambda - m2.lambda) > tol) return false;
  // finite lambda: points on the same orbit are distinct unless tau agrees
  const bool n1 = std::holds_alternative<int>(m1.y), n2 = std::holds_alternative<int>(m2.y);
  if (n1 != n2) return same_base;  // same NUT described twice
  if (n1) return true;
  const double t1 = std::get<geom::ChartPoint>(m1.y).tau;
  const double t2 = std::get<geom::ChartPoint>(m2.y).tau;
  return std::abs(std::remainder(t1 - t2, 2 * kPi)) <= tol;
}

FiberType fiber_type(const Vec3& base, const geom::NutConfiguration& cfg, double tol) {
  cfg.validate();
  FiberType ft;
  for (std::size_t j = 0; j < cfg.points.size(); ++j)
    if (norm(base - cfg.points[j]) <= tol) {
      ft.kind = FiberKind::Singular;
      ft.nut_index = int(j);
      ft.cone_over_cp2 = true;  // reducible endpoint metadata
      return ft;
    }
  return ft;
}

std::array<double, 2> fiber_chart(double tau, double lambda, bool lambda_infinite) {
  if (lambda_infinite) return {0.0, 0.0};
  if (!(lambda > 0)) throw ValidationError("fiber_chart: lambda must be positive");
  const double mu = 1.0 / (1.0 + lambda);
  return {mu * std::cos(tau), mu * std::sin(tau)};
}

}  // namespace nutgauge::moduli
