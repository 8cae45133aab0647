#include "nutgauge/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace nutgauge::geom {

void NutConfiguration::validate() const {
  if (points.empty()) throw ValidationError("NutConfiguration: need s >= 1 points");
  if (!(c > 0)) throw ValidationError("NutConfiguration: c must be positive");
  for (std::size_t i = 0; i < points.size(); ++i)
    for (std::size_t j = i + 1; j < points.size(); ++j)
      if (norm(points[i] - points[j]) < 1e-12)
        throw ValidationError("NutConfiguration: NUT points must be pairwise distinct");
}

GhSpace::GhSpace(std::vector<Vec3> centers, std::vector<double> weights, double c)
    : centers_(std::move(centers)), weights_(std::move(weights)), c_(c) {
  if (centers_.size() != weights_.size()) throw ValidationError("GhSpace: size mismatch");
  if (!(c_ > 0)) throw ValidationError("GhSpace: c must be positive");
}

GhSpace GhSpace::from_config(const NutConfiguration& cfg) {
  cfg.validate();
  return GhSpace(cfg.points, std::vector<double>(cfg.points.size(), 1.0), cfg.c);
}

GhSpace GhSpace::collapsed(int s) {
  if (s < 1) throw ValidationError("collapsed model needs s >= 1");
  return GhSpace({Vec3{0, 0, 0}}, {double(s)}, 1.0);
}

GhSpace GhSpace::flat() { return GhSpace({}, {}, 1.0); }

double GhSpace::min_center_distance(const Vec3& x) const {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& q : centers_) m = std::min(m, norm(x - q));
  return m;
}

void GhSpace::require_off_centers(const Vec3& x) const {
  if (min_center_distance(x) < kNutTolerance)
    throw EvaluationAtNut("evaluation at a NUT point");
}

void GhSpace::require_off_strings(const Vec3& x) const {
  for (const auto& q : centers_) {
    const Vec3 d = x - q;
    const double rho2 = d[0]*d[0] + d[1]*d[1];
    const double r2 = rho2 + d[2]*d[2];
    if (rho2 < kStringTolerance * kStringTolerance * std::max(r2, 1e-300))
      throw OnDiracString("point lies on the Dirac string axis of a center");
  }
}

double GhSpace::potential(const Vec3& x) const {
  require_off_centers(x);
  double v = c_;
  for (std::size_t j = 0; j < centers_.size(); ++j)
    v += 0.5 * weights_[j] / norm(x - centers_[j]);
  return v;
}

Vec3 GhSpace::potential_grad(const Vec3& x) const {
  require_off_centers(x);
  Vec3 g{0, 0, 0};
  for (std::size_t j = 0; j < centers_.size(); ++j) {
    const Vec3 d = x - centers_[j];
    const double r = norm(d);
    g = g + (-0.5 * weights_[j] / (r * r * r)) * d;
  }
  return g;
}

Vec3 GhSpace::monopole_potential(const Vec3& x) const {
  require_off_centers(x);
  require_off_strings(x);
  Vec3 a{0, 0, 0};
  for (std::size_t j = 0; j < centers_.size(); ++j) {
    const Vec3 d = x - centers_[j];
    const double r = norm(d);
    const double rho2 = d[0]*d[0] + d[1]*d[1];
    // (w/2) cos(Theta) dphi in Cartesian components
    const double f = 0.5 * weights_[j] * d[2] / (r * rho2);
    a[0] += -f * d[1];
    a[1] += f * d[0];
  }
  return a;
}

std::array<Vec3, 3> GhSpace::monopole_jacobian(const Vec3& x) const {
  require_off_centers(x);
  require_off_strings(x);
  std::array<Vec3, 3> J{};  // J[k][l] = d_k alpha_l
  for (std::size_t j = 0; j < centers_.size(); ++j) {
    const Vec3 d = x - centers_[j];
    const double r = norm(d);
    const double rho2 = d[0]*d[0] + d[1]*d[1];
    const double X = d[0], Y = d[1], Z = d[2];
    const double w = 0.5 * weights_[j];
    const double ir3rho2 = 1.0 / (r * r * r * rho2);
    const double irrho4 = 1.0 / (r * rho2 * rho2);
    const double irrho2 = 1.0 / (r * rho2);
    // alpha_x = -w Z Y/(r rho^2), alpha_y = +w Z X/(r rho^2), alpha_z = 0
    J[0][0] += w * X * Y * Z * (ir3rho2 + 2 * irrho4);
    J[1][0] += -w * Z * (irrho2 - Y * Y * ir3rho2 - 2 * Y * Y * irrho4);
    J[2][0] += -w * Y * (irrho2 - Z * Z * ir3rho2);
    J[0][1] += w * Z * (irrho2 - X * X * ir3rho2 - 2 * X * X * irrho4);
    J[1][1] += -w * X * Y * Z * (ir3rho2 + 2 * irrho4);
    J[2][1] += w * X * (irrho2 - Z * Z * ir3rho2);
  }
  return J;
}

std::array<std::array<double, 3>, 3> GhSpace::dalpha(const Vec3& x) const {
  const auto J = monopole_jacobian(x);
  std::array<std::array<double, 3>, 3> F{};
  for (int i = 0; i < 3; ++i)
    for (int k = 0; k < 3; ++k) F[i][k] = J[i][k] - J[k][i];
  return F;
}

FrameData GhSpace::frame_at(const ChartPoint& p) const {
  return frame_at(p, Vec3{1, 0, 0});
}

std::pair<Vec3, Vec3> right_handed_completion(const Vec3& e1) {
  // pick a seed direction least aligned with e1
  Vec3 seed{1, 0, 0};
  if (std::abs(e1[0]) > 0.9) seed = Vec3{0, 1, 0};
  Vec3 e2 = seed - dot(seed, e1) * e1;
  e2 = (1.0 / norm(e2)) * e2;
  const Vec3 e3 = cross(e1, e2);
  return {e2, e3};
}

FrameData GhSpace::frame_at(const ChartPoint& p, const Vec3& e1in) const {
  Vec3 e1 = e1in;
  const double n1 = norm(e1);
  if (n1 < 1e-14) throw ValidationError("frame_at: zero direction");
  e1 = (1.0 / n1) * e1;
  auto [e2, e3] = right_handed_completion(e1);
  const Vec3 E[3] = {e1, e2, e3};

  FrameData fd;
  fd.V = centers_.empty() ? c_ : potential(p.x);
  fd.alpha = centers_.empty() ? Vec3{0, 0, 0} : monopole_potential(p.x);
  const double sv = std::sqrt(fd.V);
  if (!(sv > 0) || !std::isfinite(sv)) throw DegenerateFrame("frame degenerate");

  // coframe: xi^0 = V^{-1/2}(dtau + alpha), xi^i = V^{1/2} e_i . dx
  fd.coframe = {};
  fd.coframe[0][3] = 1.0 / sv;
  for (int m = 0; m < 3; ++m) fd.coframe[0][m] = fd.alpha[m] / sv;
  for (int a = 1; a <= 3; ++a)
    for (int m = 0; m < 3; ++m) fd.coframe[a][m] = sv * E[a - 1][m];

  // dual frame: xi_0 = V^{1/2} d/dtau, xi_i = V^{-1/2}(e_i . d/dx - (alpha.e_i) d/dtau)
  fd.frame = {};
  fd.frame[0][3] = sv;
  for (int a = 1; a <= 3; ++a) {
    const double ae = dot(fd.alpha, E[a - 1]);
    for (int m = 0; m < 3; ++m) fd.frame[a][m] = E[a - 1][m] / sv;
    fd.frame[a][3] = -ae / sv;
  }

  fd.metric = {};
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j)
      fd.metric[i][j] = fd.V * (i == j ? 1.0 : 0.0) + fd.alpha[i] * fd.alpha[j] / fd.V;
    fd.metric[i][3] = fd.metric[3][i] = fd.alpha[i] / fd.V;
  }
  fd.metric[3][3] = 1.0 / fd.V;
  fd.volume_density = fd.V;
  return fd;
}

std::array<std::array<std::array<double, 4>, 4>, 4> coframe_structure(const GhSpace& g,
                                                                      const ChartPoint& p) {
  // d xi^a in coordinate 2-form components, then converted to frame indices.
  const FrameData fd = g.frame_at(p);
  const Vec3 dV = g.centers().empty() ? Vec3{0, 0, 0} : g.potential_grad(p.x);
  const double V = fd.V;
  const double sv = std::sqrt(V);

  // dxi[a][mu][nu] antisymmetric coordinate components of d xi^a, mu,nu in (x1,x2,x3,tau)
  double dxi[4][4][4] = {};
  // d xi^0 = -1/2 V^{-3/2} dV ^ (dtau + alpha) + V^{-1/2} d alpha
  // (dtau+alpha) components: (alpha_1, alpha_2, alpha_3, 1)
  double oneform[4] = {fd.alpha[0], fd.alpha[1], fd.alpha[2], 1.0};
  double dVc[4] = {dV[0], dV[1], dV[2], 0.0};
  const auto dA = g.centers().empty() ? std::array<std::array<double, 3>, 3>{} : g.dalpha(p.x);
  for (int m = 0; m < 4; ++m)
    for (int n = 0; n < 4; ++n) {
      double t = -0.5 / (V * sv) * (dVc[m] * oneform[n] - dVc[n] * oneform[m]);
      if (m < 3 && n < 3) t += dA[m][n] / sv;
      dxi[0][m][n] = t;
    }
  // d xi^i = 1/2 V^{-1/2} dV ^ (e_i . dx); coframe row gives sv*e_i
  for (int a = 1; a <= 3; ++a)
    for (int m = 0; m < 4; ++m)
      for (int n = 0; n < 4; ++n) {
        const double ei_m = (m < 3) ? fd.coframe[a][m] / sv : 0.0;
        const double ei_n = (n < 3) ? fd.coframe[a][n] / sv : 0.0;
        dxi[a][m][n] = 0.5 / sv * (dVc[m] * ei_n - dVc[n] * ei_m);
      }

  // D[a][b][c] = dxi^a(xi_b, xi_c)
  std::array<std::array<std::array<double, 4>, 4>, 4> D{};
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b)
      for (int c = 0; c < 4; ++c) {
        double s = 0;
        for (int m = 0; m < 4; ++m)
          for (int n = 0; n < 4; ++n) s += dxi[a][m][n] * fd.frame[b][m] * fd.frame[c][n];
        D[a][b][c] = s;
      }
  return D;
}

ConnectionMatrix GhSpace::levi_civita(const ChartPoint& p) const {
  const auto D = coframe_structure(*this, p);
  // commutation coefficients C^a_{bc} = -D^a_{bc};
  // omega_{ab|c} = 1/2 (C^a_{cb} - C^b_{ca} - C^c_{ba}) in the orthonormal gauge
  ConnectionMatrix om;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b)
      for (int cc = 0; cc < 4; ++cc)
        om.c[a][b][cc] = 0.5 * (-D[a][cc][b] + D[b][cc][a] + D[cc][b][a]);
  return om;
}

double GhSpace::cartan_residual(const ChartPoint& p, const ConnectionMatrix& om) const {
  const auto D = coframe_structure(*this, p);
  // residual of d xi^a + omega^a_b ^ xi^b: in frame components the 2-form
  // d xi^a has coefficients 1/2 D[a][b][c], and omega^a_b ^ xi^b gives
  // 1/2 (om[a][c][b] - om[a][b][c]) on xi^b ^ xi^c.
  double s2 = 0;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b)
      for (int c = b + 1; c < 4; ++c) {
        const double r = D[a][b][c] + (om.c[a][c][b] - om.c[a][b][c]);
        s2 += r * r;
      }
  return std::sqrt(s2);
}

ConnectionMatrix GhSpace::rescaled_connection(const ChartPoint& p, const Vec4& u) const {
  // index placement follows our Cartan convention g(nabla_c xi_b, xi_a);
  // relative to the usual display the correction term appears transposed
  ConnectionMatrix om = levi_civita(p);
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b)
      for (int cc = 0; cc < 4; ++cc)
        om.c[a][b][cc] += u[b] * (a == cc ? 1.0 : 0.0) - u[a] * (b == cc ? 1.0 : 0.0);
  return om;
}

double GhSpace::cartan_residual_rescaled(const ChartPoint& p, const ConnectionMatrix& om,
                                         const Vec4& u) const {
  // rescaled coframe xi~^a = f xi^a has structure coefficients
  // D~^a_{bc} = (1/f)(D^a_{bc} + u_b delta^a_c - u_c delta^a_b); the Cartan
  // equation in the xi~ basis reads D~^a_{bc} + (om~[a][c][b] - om~[a][b][c])/f = 0
  // since om~ is expressed in the unrescaled coframe. The overall 1/f drops.
  const auto D = coframe_structure(*this, p);
  double s2 = 0;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b)
      for (int c = b + 1; c < 4; ++c) {
        const double Dt = D[a][b][c] + u[b] * (a == c ? 1.0 : 0.0) - u[c] * (a == b ? 1.0 : 0.0);
        const double r = Dt + (om.c[a][c][b] - om.c[a][b][c]);
        s2 += r * r;
      }
  return std::sqrt(s2);
}

namespace {

Mat4 metric_at(const GhSpace& g, const Vec3& x) {
  ChartPoint p{x, 0.0};
  return g.frame_at(p).metric;
}

// Christoffel symbols by exact-metric central differences.
void christoffel(const GhSpace& g, const Vec3& x, double h, double G[4][4][4]) {
  const Mat4 g0 = metric_at(g, x);
  // closed-form inverse of the Gibbons-Hawking metric
  const double V = g.potential(x);
  const Vec3 al = g.centers().empty() ? Vec3{0, 0, 0} : g.monopole_potential(x);
  Mat4 gi{};
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) gi[i][j] = (i == j ? 1.0 : 0.0) / V;
    gi[i][3] = gi[3][i] = -al[i] / V;
  }
  gi[3][3] = V + dot(al, al) / V;
  (void)g0;

  double dg[4][4][4] = {};  // dg[m][a][b], m = x1..x3 (tau derivative vanishes)
  for (int m = 0; m < 3; ++m) {
    Vec3 xp = x, xm = x;
    xp[m] += h;
    xm[m] -= h;
    const Mat4 gp = metric_at(g, xp), gm = metric_at(g, xm);
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b) dg[m][a][b] = (gp[a][b] - gm[a][b]) / (2 * h);
  }
  for (int l = 0; l < 4; ++l)
    for (int m = 0; m < 4; ++m)
      for (int n = 0; n < 4; ++n) {
        double s = 0;
        for (int k = 0; k < 4; ++k) s += gi[l][k] * (dg[m][n][k] + dg[n][m][k] - dg[k][m][n]);
        G[l][m][n] = 0.5 * s;
      }
}

struct RiemannBlocks {
  double s = 0, ric = 0, wp = 0, riem = 0;
};

RiemannBlocks riemann_blocks(const GhSpace& g, const ChartPoint& p, double h) {
  double G0[4][4][4];
  christoffel(g, p.x, h, G0);
  double dG[3][4][4][4];
  for (int m = 0; m < 3; ++m) {
    Vec3 xp = p.x, xm = p.x;
    xp[m] += h;
    xm[m] -= h;
    double Gp[4][4][4], Gm[4][4][4];
    christoffel(g, xp, h, Gp);
    christoffel(g, xm, h, Gm);
    for (int l = 0; l < 4; ++l)
      for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) dG[m][l][a][b] = (Gp[l][a][b] - Gm[l][a][b]) / (2 * h);
  }
  auto dGam = [&](int m, int l, int a, int b) -> double {
    return (m < 3) ? dG[m][l][a][b] : 0.0;  // tau-independence
  };
  // R^l_{smn}
  static thread_local double R[4][4][4][4];
  for (int l = 0; l < 4; ++l)
    for (int s = 0; s < 4; ++s)
      for (int m = 0; m < 4; ++m)
        for (int n = 0; n < 4; ++n) {
          double t = dGam(m, l, n, s) - dGam(n, l, m, s);
          for (int k = 0; k < 4; ++k) t += G0[l][m][k] * G0[k][n][s] - G0[l][n][k] * G0[k][m][s];
          R[l][s][m][n] = t;
        }

  const FrameData fd = g.frame_at(p);
  const Mat4 gmat = fd.metric;
  // Ricci and scalar
  double Ric[4][4] = {};
  for (int l = 0; l < 4; ++l)
    for (int m = 0; m < 4; ++m) {
      double t = 0;
      for (int a = 0; a < 4; ++a) t += R[a][l][a][m];
      Ric[l][m] = t;
    }
  const double V = fd.V;
  const Vec3 al = fd.alpha;
  Mat4 gi{};
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) gi[i][j] = (i == j ? 1.0 : 0.0) / V;
    gi[i][3] = gi[3][i] = -al[i] / V;
  }
  gi[3][3] = V + dot(al, al) / V;
  double scal = 0;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) scal += gi[a][b] * Ric[a][b];

  // lower first index, convert to frame components
  static thread_local double Rl[4][4][4][4];
  for (int a = 0; a < 4; ++a)
    for (int s = 0; s < 4; ++s)
      for (int m = 0; m < 4; ++m)
        for (int n = 0; n < 4; ++n) {
          double t = 0;
          for (int l = 0; l < 4; ++l) t += gmat[a][l] * R[l][s][m][n];
          Rl[a][s][m][n] = t;
        }
  static thread_local double Rf[4][4][4][4];
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b)
      for (int c = 0; c < 4; ++c)
        for (int d = 0; d < 4; ++d) {
          double t = 0;
          for (int m = 0; m < 4; ++m) {
            double t1 = 0;
            for (int n = 0; n < 4; ++n) {
              double t2 = 0;
              for (int q = 0; q < 4; ++q) {
                double t3 = 0;
                for (int r = 0; r < 4; ++r) t3 += Rl[m][n][q][r] * fd.frame[d][r];
                t2 += t3 * fd.frame[c][q];
              }
              t1 += t2 * fd.frame[b][n];
            }
            t += t1 * fd.frame[a][m];
          }
          Rf[a][b][c][d] = t;
        }

  // curvature operator in the 2-form basis (01,02,03,23,31,12)
  const int P[6][2] = {{0, 1}, {0, 2}, {0, 3}, {2, 3}, {3, 1}, {1, 2}};
  double Rop[6][6];
  for (int A = 0; A < 6; ++A)
    for (int B = 0; B < 6; ++B) Rop[A][B] = Rf[P[A][0]][P[A][1]][P[B][0]][P[B][1]];
  // SD/ASD split for the complex orientation (eps_{0123} = -1):
  // SD_c = (e^0^e^c - e^{c'})/sqrt2. A-block = SD x SD is the side that
  // vanishes for the Gibbons-Hawking family.
  double Ablk[3][3];
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b)
      Ablk[a][b] = 0.5 * (Rop[a][b] - Rop[a][3 + b] - Rop[3 + a][b] + Rop[3 + a][3 + b]);
  const double trA = Ablk[0][0] + Ablk[1][1] + Ablk[2][2];
  double wp2 = 0;
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) {
      const double w = Ablk[a][b] - (a == b ? trA / 3 : 0.0);
      wp2 += w * w;
    }

  double ric2 = 0;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) {
      // frame components of Ricci
      double t = 0;
      for (int m = 0; m < 4; ++m)
        for (int n = 0; n < 4; ++n) t += Ric[m][n] * fd.frame[a][m] * fd.frame[b][n];
      ric2 += t * t;
    }
  double riem2 = 0;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b)
      for (int c = 0; c < 4; ++c)
        for (int d = 0; d < 4; ++d) riem2 += Rf[a][b][c][d] * Rf[a][b][c][d];

  RiemannBlocks out;
  out.s = scal;
  out.ric = std::sqrt(ric2);
  out.wp = std::sqrt(wp2);
  out.riem = std::sqrt(riem2);
  return out;
}

}  // namespace

CurvatureDiagnostics GhSpace::curvature_diagnostics(const ChartPoint& p, double h) const {
  const RiemannBlocks b1 = riemann_blocks(*this, p, h);
  const RiemannBlocks b2 = riemann_blocks(*this, p, h / 2);
  // convergence sanity: the h/2 defect of the vanishing quantities must shrink
  if (std::abs(b2.s) > 0.9 * std::abs(b1.s) + 1e-3)
    throw StepTooLarge("curvature diagnostics: no h^2 convergence, reduce h");
  CurvatureDiagnostics d;
  d.scalar_curvature = richardson2(b1.s, b2.s);
  d.weyl_plus_norm = std::abs(richardson2(b1.wp, b2.wp));
  d.ricci_norm = std::abs(richardson2(b1.ric, b2.ric));
  d.riemann_norm = b2.riem;
  return d;
}

double GhSpace::kahler_form_closure(const Vec3& e1, const ChartPoint& p) const {
  // omega_{e1} = xi^0 ^ xi^1 + xi^2 ^ xi^3 in the frame adapted to the
  // complex structure J_{e1}; its completion (e2, e3) is the one with
  // e2 x e3 = -e1 (the complex orientation is opposite to dtau ^ d^3x).
  // Directly, omega = (dtau + alpha) ^ (e1.dx) + V (e2.dx) ^ (e3.dx), so
  // d omega = dalpha ^ (e1.dx) + dV ^ (e2.dx) ^ (e3.dx), a pure-spatial
  // 3-form evaluated from exact partials of V and alpha.
  Vec3 e1n = e1;
  const double n1 = norm(e1n);
  if (n1 < 1e-14) throw ValidationError("kahler_form_closure: zero direction");
  e1n = (1.0 / n1) * e1n;
  auto [e3, e2] = right_handed_completion(e1n);  // swapped: e2 x e3 = -e1

  if (centers_.empty()) return 0.0;
  const Vec3 dV = potential_grad(p.x);
  const auto dA = dalpha(p.x);
  // (dalpha ^ u)_{123} = dA_12 u_3 + dA_23 u_1 + dA_31 u_2
  const double t1 = dA[0][1] * e1n[2] + dA[1][2] * e1n[0] + dA[2][0] * e1n[1];
  // (dV ^ v ^ w)_{123} = det[dV; v; w]
  const double t2 = dV[0] * (e2[1] * e3[2] - e2[2] * e3[1]) -
                    dV[1] * (e2[0] * e3[2] - e2[2] * e3[0]) +
                    dV[2] * (e2[0] * e3[1] - e2[1] * e3[0]);
  return std::abs(t1 + t2);
}

std::vector<std::pair<double, double>> GhSpace::volume_growth(
    const Vec3& x0, const std::vector<double>& R_list) const {
  // Vol = 2pi * Int_{B_R(x0)} V d^3x, with the center integrals in closed form:
  // Int_{B_R} 1/|x-q| = 2pi(R^2 - d^2/3) for d <= R, else (4/3) pi R^3 / d.
  std::vector<std::pair<double, double>> out;
  double prev = -1;
  for (double R : R_list) {
    if (R <= prev) throw ValidationError("volume_growth: R_list must increase");
    prev = R;
    double vol3 = c_ * (4.0 / 3.0) * kPi * R * R * R;
    for (std::size_t j = 0; j < centers_.size(); ++j) {
      const double d = norm(x0 - centers_[j]);
      const double I = (d <= R) ? 2 * kPi * (R * R - d * d / 3) : (4.0 / 3.0) * kPi * R * R * R / d;
      vol3 += 0.5 * weights_[j] * I;
    }
    out.emplace_back(R, 2 * kPi * vol3 / (R * R * R));
  }
  return out;
}

double GhSpace::volume_ball_mc(const Vec3& x0, double R, std::size_t n, unsigned seed) const {
  if (n == 0 || n > 200'000'000) throw BudgetExceeded("volume_ball_mc: bad sample budget");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(-R, R);
  double acc = 0;
  std::size_t inside = 0;
  for (std::size_t i = 0; i < n; ++i) {
    Vec3 x{U(rng), U(rng), U(rng)};
    if (dot(x, x) > R * R) continue;
    ++inside;
    Vec3 xx = x0 + x;
    if (min_center_distance(xx) < 1e-6) continue;  // measure-zero guard
    acc += potential(xx);
  }
  (void)inside;
  const double cube = 8 * R * R * R;
  return 2 * kPi * acc / double(n) * cube;
}

}  // namespace nutgauge::geom
