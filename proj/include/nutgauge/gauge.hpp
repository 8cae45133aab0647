#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "nutgauge/core.hpp"
#include "nutgauge/geometry.hpp"
#include "nutgauge/harmonic.hpp"

namespace nutgauge::gauge {

/// Im-H valued 1-form; components with respect to the orthonormal coframe
/// xi^0..xi^3 (index 0 = circle-fiber leg).
struct QuaternionOneForm {
  std::array<ImQuat, 4> comp{};
  double norm2() const {
    double s = 0;
    for (const auto& c : comp) s += c.norm2();
    return s;
  }
};

/// Curvature at a point, orthonormal-frame components in the 2-form basis
/// (01, 02, 03, 23, 31, 12).
struct CurvatureSample {
  std::array<ImQuat, 6> F{};
  double asd_residual = 0;  // ||*F + F|| / ||F||, complex orientation (eps_{0123} = -1)
  double density = 0;       // |F|^2 * volume density
  double norm2() const {    // |F|^2 = 2 sum_{mu<nu} |F_{mu nu}|^2
    double s = 0;
    for (const auto& c : F) s += c.norm2();
    return 2 * s;
  }
};

/// Pointlike singularity of the scaling function, with the effective BPST
/// weight lambda_B = lambda/(4 pi^2) of its Euclidean model.
struct SourcePoint {
  Vec3 x{};
  double tau = 0;
  double lambda_bpst = 0;   // 0 flags the pure-Green (lambda = +inf) mode
};

/// Geometry + scaling-function pair the gauge pipeline runs on.
/// Coordinates are always (x1, x2, x3, tau); frame leg 0 is the fiber.
class InstantonProblem {
 public:
  virtual ~InstantonProblem() = default;

  virtual double f(const geom::ChartPoint& p) const = 0;
  virtual Vec4 df(const geom::ChartPoint& p) const = 0;  // partials (x1,x2,x3,tau)
  virtual geom::FrameData frame(const geom::ChartPoint& p) const = 0;
  virtual std::vector<SourcePoint> sources() const = 0;
  virtual double tau_period() const { return 2 * kPi; }
  /// geodesic distance proxy to the nearest source (exact for flat space)
  virtual double source_distance(const geom::ChartPoint& p) const;
  virtual const geom::GhSpace* gh() const { return nullptr; }
};

/// Calorons: flat R^3 x S^1 with f = 1 + sum_i lambda_i G(., y_i), or the
/// pure Green function when pure_green is set (single source).
class CaloronProblem : public InstantonProblem {
 public:
  struct Source {
    Vec3 y{};
    double tau = 0;
    double lambda = 1;
  };
  CaloronProblem(std::vector<Source> sources, bool pure_green = false);
  double f(const geom::ChartPoint& p) const override;
  Vec4 df(const geom::ChartPoint& p) const override;
  geom::FrameData frame(const geom::ChartPoint& p) const override;
  std::vector<SourcePoint> sources() const override;
  const std::vector<Source>& green_sources() const { return src_; }
  bool pure_green() const { return pure_; }

 private:
  std::vector<Source> src_;
  bool pure_;
};

/// NUT-centered solution on the collapsed model (s = 1: Taub-NUT itself),
/// f = 1 + lambda kappa / r, run in the ambient Gibbons-Hawking chart.
class CollapsedNutProblem : public InstantonProblem {
 public:
  CollapsedNutProblem(int s, double lambda, bool pure_green = false);
  double f(const geom::ChartPoint& p) const override;
  Vec4 df(const geom::ChartPoint& p) const override;
  geom::FrameData frame(const geom::ChartPoint& p) const override;
  std::vector<SourcePoint> sources() const override;
  const geom::GhSpace* gh() const override { return &gh_; }
  int s() const { return s_; }
  double lambda() const { return lambda_; }
  bool pure_green() const { return pure_; }

 private:
  int s_;
  double lambda_;
  bool pure_;
  geom::GhSpace gh_;
};

/// Flat R^4 with f = 1 + lambda/|x-y|^2 (the BPST oracle). The fourth
/// coordinate is stored in the tau slot; there is no periodicity.
class FlatR4Problem : public InstantonProblem {
 public:
  FlatR4Problem(double lambda, const Vec4& center = {});
  double f(const geom::ChartPoint& p) const override;
  Vec4 df(const geom::ChartPoint& p) const override;
  geom::FrameData frame(const geom::ChartPoint& p) const override;
  std::vector<SourcePoint> sources() const override;
  double tau_period() const override { return std::numeric_limits<double>::infinity(); }
  double lambda() const { return lambda_; }

 private:
  double lambda_;
  Vec4 c_;
};

/// User-supplied scaling function on a multi-Taub-NUT background. Gradients
/// by central differences; construction runs a harmonicity-residual gate at
/// random probe points.
class UserGhProblem : public InstantonProblem {
 public:
  using Field = std::function<double(const geom::ChartPoint&)>;
  UserGhProblem(geom::GhSpace gh, Field f, std::vector<SourcePoint> sources,
                double harmonicity_tol, unsigned gate_seed = 1);
  double f(const geom::ChartPoint& p) const override;
  Vec4 df(const geom::ChartPoint& p) const override;
  geom::FrameData frame(const geom::ChartPoint& p) const override;
  std::vector<SourcePoint> sources() const override;
  const geom::GhSpace* gh() const override { return &gh_; }

 private:
  geom::GhSpace gh_;
  Field f_;
  std::vector<SourcePoint> src_;
};

/// Laplace-Beltrami of a scalar field on a Gibbons-Hawking space by finite
/// differences (the residual gate for user-supplied candidates).
double gh_laplacian(const geom::GhSpace& gh, const UserGhProblem::Field& f,
                    const geom::ChartPoint& p, double h);

// ---------------------------------------------------------------------------

/// a = 1/2 Im((d log f) xi) in the orthonormal gauge; u are the frame
/// components of d log f, ordered (fiber, 1, 2, 3).
QuaternionOneForm rescale_potential(const Vec4& u);
/// Convenience: evaluate on a problem at p (frame components).
QuaternionOneForm rescale_potential(const InstantonProblem& prob, const geom::ChartPoint& p);
/// Coordinate components of the same 1-form, a_mu (mu = x1,x2,x3,tau).
std::array<ImQuat, 4> potential_coordinate(const InstantonProblem& prob,
                                           const geom::ChartPoint& p);

/// F = da + a ^ a by central differences in the chart with Richardson
/// extrapolation; h scales down automatically near sources.
CurvatureSample curvature(const InstantonProblem& prob, const geom::ChartPoint& p, double h);

struct QuadratureSpec {
  double R_max = 24.0;
  double excision = 0.0;      // 0: default 1e-2 * sqrt(lambda_B) per source
  int n_radial = 72;
  int n_sphere_polar = 10;    // S^3 / S^2 polar resolution
  int n_sphere_azimuth = 16;
  int n_tau = 24;
  double fd_step = 1e-4;
  unsigned seed = 0;
  std::size_t mc_samples = 0; // > 0 switches on the Monte-Carlo cross-check
};

struct EnergyReport {
  double energy_units = 0;     // (1/8pi^2) integral of |F|^2 dV, all pieces
  double bulk = 0;             // quadrature part
  double tail_estimate = 0;    // fitted power-law tail beyond R_max
  double excision_estimate = 0;
  double tail_exponent = 0;    // fitted d log|F|^2 / d log r at the boundary
  double mc_cross_check = -1;  // bulk re-estimated by Monte-Carlo (if enabled)
};

EnergyReport energy(const InstantonProblem& prob, const QuadratureSpec& quad);

struct DecayReport {
  double a_exponent = 0;        // sup-norm |a| ~ r^{-p_a}
  double F_exponent = 0;        // ||F||_{L^2(r>R)} ~ R^{-p_F}
  bool rapid_decay_decreasing = false;  // sqrt(R)||F||_{L^2(r>R)} decreasing
  std::vector<double> R;
  std::vector<double> sup_a;
  std::vector<double> l2_tail;  // ||F||_{L^2(r>R_k)}
  std::vector<double> weighted; // sqrt(R_k) * l2_tail
};

DecayReport decay_report(const InstantonProblem& prob, const std::vector<double>& R_list,
                         const QuadratureSpec& quad = {});

/// max |F| over shells of geodesic radius eps around the (first) source.
std::vector<double> boundedness_at_source(const InstantonProblem& prob,
                                          const std::vector<double>& eps_list);

/// Max ASD residual over n random sample points at radii in [r_lo, r_hi].
double max_asd_residual(const InstantonProblem& prob, int n, double r_lo, double r_hi,
                        unsigned seed, double h = 1e-4);

/// Closed-form energy of the Euclidean BPST model inside a ball of radius
/// rho around its center (the excision oracle).
double bpst_ball_energy(double lambda_bpst, double rho);

}  // namespace nutgauge::gauge
