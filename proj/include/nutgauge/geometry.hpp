#pragma once

#include <optional>
#include <vector>

#include "nutgauge/core.hpp"

namespace nutgauge::geom {

/// A multi-Taub-NUT configuration: s distinct NUT points q_j in R^3 and the
/// asymptotic constant c (kept as a field, fixed to 1 in practice).
struct NutConfiguration {
  std::vector<Vec3> points;
  double c = 1.0;

  std::size_t s() const { return points.size(); }
  void validate() const;
};

/// Point in the chart (x^1,x^2,x^3,tau), tau in [0, 2pi).
struct ChartPoint {
  Vec3 x{};
  double tau = 0.0;
};

/// Point of the collapsed single-center model, chart (r, tau, phi, Theta)
/// with tau in [0, 4pi/s). The collapsed tau is 2/s times the tau of the
/// ambient chart.
struct CollapsedChartPoint {
  double r = 1.0;
  double tau = 0.0;
  double phi = 0.0;
  double theta = 1.5707963267948966;
};

/// Harmonic potential, connection 1-form, orthonormal (co)frame and metric at
/// a point. Frame index 0 is the circle-fiber leg xi^0 = V^{-1/2}(dtau+alpha);
/// legs 1..3 are V^{1/2} e_i . dx for the spatial triple e_i.
struct FrameData {
  double V = 1.0;
  Vec3 alpha{};                 // connection components alpha_i (dx^i basis)
  Mat4 coframe{};               // coframe[a][mu]: xi^a = coframe[a][mu] dx^mu, mu = (x1,x2,x3,tau)
  Mat4 frame{};                 // frame[a][mu]: xi_a = frame[a][mu] d/dx^mu
  Mat4 metric{};                // g_{mu nu}, coordinate order (x1,x2,x3,tau)
  double volume_density = 1.0;  // sqrt(det g) = V
};

/// Levi-Civita connection 1-forms in the orthonormal gauge,
/// omega^a_b = c[a][b][k] xi^k with c antisymmetric in (a,b).
struct ConnectionMatrix {
  double c[4][4][4] = {};
};

struct CurvatureDiagnostics {
  double scalar_curvature = 0;
  double weyl_plus_norm = 0;  // Weyl block on the complex-orientation SD side
  double ricci_norm = 0;
  double riemann_norm = 0;    // full |Riem|, non-vacuousness control
};

/// Gibbons-Hawking space with weighted centers. NutConfiguration maps to unit
/// weights; the collapsed model is a single center of weight s. The Dirac
/// potential of every center uses the symmetric gauge (s/2) cos(Theta) dphi,
/// singular on the full vertical axis through the center.
class GhSpace {
 public:
  GhSpace(std::vector<Vec3> centers, std::vector<double> weights, double c);
  static GhSpace from_config(const NutConfiguration& cfg);
  static GhSpace collapsed(int s);       // V = 1 + s/(2r), single center at 0
  static GhSpace flat();                 // s = 0: flat R^3 x S^1

  double potential(const Vec3& x) const;
  Vec3 potential_grad(const Vec3& x) const;
  Vec3 monopole_potential(const Vec3& x) const;                  // alpha_i
  std::array<Vec3, 3> monopole_jacobian(const Vec3& x) const;    // d_k alpha_l -> [k][l]
  /// (d alpha)_{ij} assembled from the exact Jacobian.
  std::array<std::array<double, 3>, 3> dalpha(const Vec3& x) const;

  FrameData frame_at(const ChartPoint& p) const;
  /// Frame with spatial legs along a right-handed orthonormal completion of
  /// the unit direction e1.
  FrameData frame_at(const ChartPoint& p, const Vec3& e1) const;

  ConnectionMatrix levi_civita(const ChartPoint& p) const;
  /// Residual of the Cartan equation ||d xi^a + omega^a_b ^ xi^b|| for a
  /// given connection matrix; the oracle for levi_civita.
  double cartan_residual(const ChartPoint& p, const ConnectionMatrix& om) const;

  /// Levi-Civita connection of the conformally rescaled metric f^2 g in the
  /// original coframe: omega~^a_b = omega^a_b + u_a xi^b - u_b xi^a, where u
  /// holds the frame components of d log f. With constant f this is omega.
  ConnectionMatrix rescaled_connection(const ChartPoint& p, const Vec4& u) const;
  /// Cartan residual of om~ for the rescaled coframe f xi^a (independent
  /// check of rescaled_connection); u as above, any smooth positive f.
  double cartan_residual_rescaled(const ChartPoint& p, const ConnectionMatrix& om,
                                  const Vec4& u) const;

  CurvatureDiagnostics curvature_diagnostics(const ChartPoint& p, double h) const;
  double kahler_form_closure(const Vec3& e1, const ChartPoint& p) const;

  /// Closed-form volume of {|x-x0| <= R} x S^1_tau; returns (R, Vol/R^3) rows.
  std::vector<std::pair<double, double>> volume_growth(const Vec3& x0,
                                                       const std::vector<double>& R_list) const;
  /// Monte-Carlo cross-check of the same volume.
  double volume_ball_mc(const Vec3& x0, double R, std::size_t n_samples, unsigned seed) const;

  double min_center_distance(const Vec3& x) const;
  const std::vector<Vec3>& centers() const { return centers_; }
  const std::vector<double>& weights() const { return weights_; }
  double c() const { return c_; }

  static constexpr double kNutTolerance = 1e-9;
  static constexpr double kStringTolerance = 1e-7;

 private:
  void require_off_centers(const Vec3& x) const;
  void require_off_strings(const Vec3& x) const;

  std::vector<Vec3> centers_;
  std::vector<double> weights_;
  double c_ = 1.0;
};

/// Right-handed orthonormal completion of e1: returns (e2, e3) with
/// det[e1 e2 e3] = +1.
std::pair<Vec3, Vec3> right_handed_completion(const Vec3& e1);

/// Structure coefficients of the coframe at p: d xi^a = 1/2 D[a][b][c] xi^b ^ xi^c,
/// from exact partials of V and alpha. Shared by levi_civita and tests.
std::array<std::array<std::array<double, 4>, 4>, 4> coframe_structure(const GhSpace& g,
                                                                      const ChartPoint& p);

}  // namespace nutgauge::geom
