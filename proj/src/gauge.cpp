#include "nutgauge/gauge.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace nutgauge::gauge {

using geom::ChartPoint;
using geom::FrameData;
using harmonic::flat_green_jet;

namespace {
double wrap_angle(double t, double period) {
  if (!std::isfinite(period)) return t;
  double w = std::remainder(t, period);
  return w;
}
}  // namespace

double InstantonProblem::source_distance(const ChartPoint& p) const {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& s : sources()) {
    const Vec3 d = p.x - s.x;
    const double dt = wrap_angle(p.tau - s.tau, tau_period());
    best = std::min(best, std::sqrt(dot(d, d) + dt * dt));
  }
  return best;
}

// ---------------------------------------------------------------------------
// Problems
// ---------------------------------------------------------------------------

CaloronProblem::CaloronProblem(std::vector<Source> sources, bool pure_green)
    : src_(std::move(sources)), pure_(pure_green) {
  if (src_.empty()) throw ValidationError("CaloronProblem: need at least one source");
  if (pure_ && src_.size() != 1)
    throw ValidationError("CaloronProblem: pure Green mode takes a single source");
  for (const auto& s : src_)
    if (!(s.lambda > 0)) throw ValidationError("CaloronProblem: lambda must be positive");
}

double CaloronProblem::f(const ChartPoint& p) const {
  double acc = pure_ ? 0.0 : 1.0;
  for (const auto& s : src_) {
    const double a = norm(p.x - s.y);
    const double g = flat_green_jet(a, p.tau - s.tau).value;
    acc += (pure_ ? 1.0 : s.lambda) * g;
  }
  return acc;
}

Vec4 CaloronProblem::df(const ChartPoint& p) const {
  Vec4 out{};
  for (const auto& s : src_) {
    const Vec3 d = p.x - s.y;
    const double a = norm(d);
    const auto jet = flat_green_jet(a, p.tau - s.tau);
    const double w = pure_ ? 1.0 : s.lambda;
    for (int i = 0; i < 3; ++i) out[i] += w * jet.da_over_a * d[i];
    out[3] += w * jet.db;
  }
  return out;
}

FrameData CaloronProblem::frame(const ChartPoint& p) const {
  static const geom::GhSpace flat = geom::GhSpace::flat();
  return flat.frame_at(p);
}

std::vector<SourcePoint> CaloronProblem::sources() const {
  std::vector<SourcePoint> out;
  for (const auto& s : src_)
    out.push_back({s.y, s.tau, pure_ ? 0.0 : s.lambda / (4 * kPi * kPi)});
  return out;
}

CollapsedNutProblem::CollapsedNutProblem(int s, double lambda, bool pure_green)
    : s_(s), lambda_(lambda), pure_(pure_green), gh_(geom::GhSpace::collapsed(s)) {
  if (!pure_ && !(lambda_ > 0)) throw ValidationError("CollapsedNutProblem: lambda > 0");
}

double CollapsedNutProblem::f(const ChartPoint& p) const {
  const double r = norm(p.x);
  const double g = harmonic::collapsed_green(s_, r);
  return pure_ ? g : 1.0 + lambda_ * g;
}

Vec4 CollapsedNutProblem::df(const ChartPoint& p) const {
  const double r = norm(p.x);
  if (!(r > 0)) throw SourceCoincidence("CollapsedNutProblem::df at the NUT");
  const double w = pure_ ? 1.0 : lambda_;
  Vec4 out{};
  for (int i = 0; i < 3; ++i)
    out[i] = -w * harmonic::kCollapsedGreenKappa * p.x[i] / (r * r * r);
  return out;
}

FrameData CollapsedNutProblem::frame(const ChartPoint& p) const { return gh_.frame_at(p); }

std::vector<SourcePoint> CollapsedNutProblem::sources() const {
  // lambda_B in geodesic normal coordinates at the NUT: f = 1 + 2 s lambda kappa / rho^2
  const double lb = pure_ ? 0.0 : 2.0 * s_ * lambda_ * harmonic::kCollapsedGreenKappa;
  return {{Vec3{0, 0, 0}, 0.0, lb}};
}

FlatR4Problem::FlatR4Problem(double lambda, const Vec4& center) : lambda_(lambda), c_(center) {
  if (!(lambda_ > 0)) throw ValidationError("FlatR4Problem: lambda > 0");
}

double FlatR4Problem::f(const ChartPoint& p) const {
  const Vec3 d = p.x - Vec3{c_[0], c_[1], c_[2]};
  const double dt = p.tau - c_[3];
  const double r2 = dot(d, d) + dt * dt;
  if (r2 < 1e-28) throw SourceCoincidence("FlatR4Problem::f at the source");
  return 1.0 + lambda_ / r2;
}

Vec4 FlatR4Problem::df(const ChartPoint& p) const {
  const Vec3 d = p.x - Vec3{c_[0], c_[1], c_[2]};
  const double dt = p.tau - c_[3];
  const double r2 = dot(d, d) + dt * dt;
  Vec4 out{};
  for (int i = 0; i < 3; ++i) out[i] = -2 * lambda_ * d[i] / (r2 * r2);
  out[3] = -2 * lambda_ * dt / (r2 * r2);
  return out;
}

FrameData FlatR4Problem::frame(const ChartPoint& p) const {
  static const geom::GhSpace flat = geom::GhSpace::flat();
  return flat.frame_at(p);
}

std::vector<SourcePoint> FlatR4Problem::sources() const {
  return {{Vec3{c_[0], c_[1], c_[2]}, c_[3], lambda_}};
}

UserGhProblem::UserGhProblem(geom::GhSpace gh, Field f, std::vector<SourcePoint> sources,
                             double harmonicity_tol, unsigned gate_seed)
    : gh_(std::move(gh)), f_(std::move(f)), src_(std::move(sources)) {
  // harmonicity-residual gate at random probe points away from sources/NUTs
  std::mt19937_64 rng(gate_seed);
  std::uniform_real_distribution<double> U(-1, 1), Ut(0, 2 * kPi);
  int accepted = 0;
  double worst = 0;
  for (int i = 0; i < 200 && accepted < 24; ++i) {
    Vec3 x{4 * U(rng), 4 * U(rng), 4 * U(rng)};
    ChartPoint p{x, Ut(rng)};
    if (gh_.min_center_distance(x) < 0.4) continue;
    bool near = false;
    for (const auto& s : src_)
      if (norm(x - s.x) < 0.4) near = true;
    if (near) continue;
    const double rho2 = x[0] * x[0] + x[1] * x[1];
    if (rho2 < 1e-3) continue;
    ++accepted;
    worst = std::max(worst, std::abs(gh_laplacian(gh_, f_, p, 1e-3)));
  }
  if (accepted == 0) throw ValidationError("UserGhProblem: no valid probe points");
  if (worst > harmonicity_tol)
    throw ValidationError("UserGhProblem: harmonicity residual " + std::to_string(worst) +
                          " exceeds gate tolerance");
}

double UserGhProblem::f(const ChartPoint& p) const { return f_(p); }

Vec4 UserGhProblem::df(const ChartPoint& p) const {
  Vec4 out{};
  const double h = 1e-5 * std::max(0.05, source_distance(p));
  for (int m = 0; m < 4; ++m) {
    ChartPoint pp = p, pm = p;
    (m < 3 ? pp.x[m] : pp.tau) += h;
    (m < 3 ? pm.x[m] : pm.tau) -= h;
    out[m] = (f_(pp) - f_(pm)) / (2 * h);
  }
  return out;
}

FrameData UserGhProblem::frame(const ChartPoint& p) const { return gh_.frame_at(p); }
std::vector<SourcePoint> UserGhProblem::sources() const { return src_; }

double gh_laplacian(const geom::GhSpace& gh, const UserGhProblem::Field& f, const ChartPoint& p,
                    double h) {
  // (1/sqrt g) d_mu (sqrt g g^{mu nu} d_nu f), with the closed-form inverse
  // metric; the flux components are finite-differenced.
  auto flux = [&](const ChartPoint& q) -> Vec4 {
    const double V = gh.potential(q.x);
    const Vec3 al = gh.monopole_potential(q.x);
    Vec4 g{};
    const double hh = h;
    Vec4 df{};
    for (int m = 0; m < 4; ++m) {
      ChartPoint qp = q, qm = q;
      (m < 3 ? qp.x[m] : qp.tau) += hh;
      (m < 3 ? qm.x[m] : qm.tau) -= hh;
      df[m] = (f(qp) - f(qm)) / (2 * hh);
    }
    // sqrt(g) = V; g^{ij} = delta/V, g^{i tau} = -alpha_i/V, g^{tt} = V + |a|^2/V
    for (int i = 0; i < 3; ++i) g[i] = V * (df[i] / V - al[i] / V * df[3]);
    double gt = 0;
    for (int i = 0; i < 3; ++i) gt += -al[i] / V * df[i];
    gt += (V + dot(al, al) / V) * df[3];
    g[3] = V * gt;
    return g;
  };
  double div = 0;
  for (int m = 0; m < 4; ++m) {
    ChartPoint qp = p, qm = p;
    (m < 3 ? qp.x[m] : qp.tau) += h;
    (m < 3 ? qm.x[m] : qm.tau) -= h;
    div += (flux(qp)[m] - flux(qm)[m]) / (2 * h);
  }
  return div / gh.potential(p.x);
}

// ---------------------------------------------------------------------------
// Potential and curvature
// ---------------------------------------------------------------------------

QuaternionOneForm rescale_potential(const Vec4& u) {
  // a = 1/2 Im((-u0 + u1 i + u2 j + u3 k)(xi^0 + xi^1 i + xi^2 j + xi^3 k))
  QuaternionOneForm a;
  const Quat q{-u[0], u[1], u[2], u[3]};
  for (int mu = 0; mu < 4; ++mu) {
    Quat e{};
    (mu == 0 ? e.w : mu == 1 ? e.x : mu == 2 ? e.y : e.z) = 1.0;
    a.comp[mu] = 0.5 * im(qmul(q, e));
  }
  return a;
}

QuaternionOneForm rescale_potential(const InstantonProblem& prob, const ChartPoint& p) {
  const FrameData fd = prob.frame(p);
  const double fv = prob.f(p);
  if (!(fv > 0)) throw SourceCoincidence("rescale_potential: non-positive f");
  const Vec4 dlf = prob.df(p);
  Vec4 u{};
  for (int a = 0; a < 4; ++a) {
    double t = 0;
    for (int m = 0; m < 4; ++m) t += dlf[m] / fv * fd.frame[a][m];
    u[a] = t;
  }
  return rescale_potential(u);
}

std::array<ImQuat, 4> potential_coordinate(const InstantonProblem& prob, const ChartPoint& p) {
  const FrameData fd = prob.frame(p);
  const QuaternionOneForm af = rescale_potential(prob, p);
  std::array<ImQuat, 4> ac{};
  for (int m = 0; m < 4; ++m)
    for (int b = 0; b < 4; ++b) ac[m] += fd.coframe[b][m] * af.comp[b];
  return ac;
}

namespace {
std::array<ImQuat, 6> curvature_frame_at_step(const InstantonProblem& prob, const ChartPoint& p,
                                              double h) {
  const auto a0 = potential_coordinate(prob, p);
  ImQuat da[4][4];  // da[m][n] = d_m a_n
  for (int m = 0; m < 4; ++m) {
    ChartPoint pp = p, pm = p;
    (m < 3 ? pp.x[m] : pp.tau) += h;
    (m < 3 ? pm.x[m] : pm.tau) -= h;
    const auto ap = potential_coordinate(prob, pp);
    const auto am = potential_coordinate(prob, pm);
    for (int n = 0; n < 4; ++n) da[m][n] = (1.0 / (2 * h)) * (ap[n] - am[n]);
  }
  ImQuat Fc[4][4];
  for (int m = 0; m < 4; ++m)
    for (int n = 0; n < 4; ++n) Fc[m][n] = da[m][n] - da[n][m] + commutator(a0[m], a0[n]);
  const FrameData fd = prob.frame(p);
  // coordinate -> frame: F_ab = F_{mn} (xi_a)^m (xi_b)^n
  const int pairs[6][2] = {{0, 1}, {0, 2}, {0, 3}, {2, 3}, {3, 1}, {1, 2}};
  std::array<ImQuat, 6> F{};
  for (int A = 0; A < 6; ++A) {
    const int a = pairs[A][0], b = pairs[A][1];
    ImQuat t{};
    for (int m = 0; m < 4; ++m)
      for (int n = 0; n < 4; ++n) t += (fd.frame[a][m] * fd.frame[b][n]) * Fc[m][n];
    F[A] = t;
  }
  return F;
}
}  // namespace

CurvatureSample curvature(const InstantonProblem& prob, const ChartPoint& p, double h) {
  const double d = prob.source_distance(p);
  if (d < 1e-8) throw StencilCrossesSingularity("curvature: stencil at a source");
  const double he = std::min(h, 0.05 * d);
  const auto F1 = curvature_frame_at_step(prob, p, he);
  const auto F2 = curvature_frame_at_step(prob, p, he / 2);
  CurvatureSample out;
  for (int A = 0; A < 6; ++A) {
    out.F[A].x = richardson2(F1[A].x, F2[A].x);
    out.F[A].y = richardson2(F1[A].y, F2[A].y);
    out.F[A].z = richardson2(F1[A].z, F2[A].z);
  }
  // basis order (01,02,03,23,31,12): SD part (complex orientation) pairs A <-> A+3
  double sd2 = 0;
  for (int c = 0; c < 3; ++c) sd2 += (out.F[c] - out.F[c + 3]).norm2();
  const double tot2 = out.norm2();
  out.asd_residual = tot2 > 0 ? 2 * std::sqrt(sd2) / std::sqrt(tot2) : 0.0;
  out.density = tot2 * prob.frame(p).volume_density;
  return out;
}

double bpst_ball_energy(double lambda_bpst, double rho) {
  const double l = lambda_bpst, u = rho * rho;
  return 1.0 + 12 * l * l * (-1.0 / (4 * std::pow(l + u, 2)) + l / (6 * std::pow(l + u, 3)));
}

// ---------------------------------------------------------------------------
// Energy
// ---------------------------------------------------------------------------

namespace {

double density_at(const InstantonProblem& prob, const ChartPoint& p, double h) {
  return curvature(prob, p, h).density;
}

// log-spaced midpoint nodes with weights for int_{r0}^{r1} g(r) dr
std::vector<std::pair<double, double>> log_nodes(double r0, double r1, int n) {
  std::vector<std::pair<double, double>> out;
  const double u0 = std::log(r0), u1 = std::log(r1);
  for (int i = 0; i < n; ++i) {
    const double u = u0 + (i + 0.5) * (u1 - u0) / n;
    const double r = std::exp(u);
    out.emplace_back(r, r * (u1 - u0) / n);
  }
  return out;
}

struct ShellAverager {
  // S^2 x tau product sampling of |F|^2 * sqrt(g) at radius rho around x0
  const InstantonProblem& prob;
  Vec3 x0;
  int nth, nph, ntau;
  double h;
  double operator()(double rho) const {
    const double T = prob.tau_period();
    double acc = 0;
    int cnt = 0;
    for (int i = 0; i < nth; ++i) {
      const double x = -1 + (i + 0.5) * 2.0 / nth;  // cos(theta)
      const double st = std::sqrt(std::max(0.0, 1 - x * x));
      for (int jv = 0; jv < nph; ++jv) {
        const double ph = (jv + 0.5) * 2 * kPi / nph;
        const Vec3 dir{st * std::cos(ph), st * std::sin(ph), x};
        for (int k = 0; k < ntau; ++k) {
          const double tv = (k + 0.5) * T / ntau;
          ChartPoint p{x0 + rho * dir, tv};
          acc += density_at(prob, p, h);
          ++cnt;
        }
      }
    }
    return acc / cnt;  // angular average of density
  }
};

// fit slope of log y vs log x by least squares
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(y[i] > 0)) continue;
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++n;
  }
  if (n < 2) throw InsufficientRange("log-log fit needs at least two positive samples");
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace

EnergyReport energy(const InstantonProblem& prob, const QuadratureSpec& quad) {
  EnergyReport rep;
  const auto srcs = prob.sources();
  const double T = prob.tau_period();
  const double h = quad.fd_step;

  // excision radii (geodesic) and the model contribution
  std::vector<double> eps(srcs.size());
  for (std::size_t i = 0; i < srcs.size(); ++i) {
    eps[i] = quad.excision > 0
                 ? quad.excision
                 : (srcs[i].lambda_bpst > 0 ? 0.01 * std::sqrt(srcs[i].lambda_bpst) : 1e-3);
    if (srcs[i].lambda_bpst > 0) rep.excision_estimate += bpst_ball_energy(srcs[i].lambda_bpst, eps[i]);
  }

  const bool curved = prob.gh() != nullptr;
  double bulk = 0;

  if (!curved && std::isfinite(T)) {
    // flat R^3 x S^1. Region A: 4d-spherical near balls; B: cylinder shells
    // minus the balls; C: global spherical grid skipping the cylinders.
    double minsep = 1e300;
    for (std::size_t i = 0; i < srcs.size(); ++i)
      for (std::size_t jv = i + 1; jv < srcs.size(); ++jv)
        minsep = std::min(minsep, norm(srcs[i].x - srcs[jv].x));
    const double rA = std::min({1.4, 0.42 * minsep, 0.45 * T});

    for (std::size_t i = 0; i < srcs.size(); ++i) {
      // region A
      for (auto [rho, w] : log_nodes(eps[i], rA, quad.n_radial)) {
        const int npsi = quad.n_sphere_polar, nth = quad.n_sphere_polar,
                  nph = quad.n_sphere_azimuth;
        double acc = 0;
        for (int a = 0; a < npsi; ++a) {
          const double ps = (a + 0.5) * kPi / npsi;
          for (int b = 0; b < nth; ++b) {
            const double th = (b + 0.5) * kPi / nth;
            for (int cphi = 0; cphi < nph; ++cphi) {
              const double ph = (cphi + 0.5) * 2 * kPi / nph;
              const Vec3 dx{std::sin(ps) * std::sin(th) * std::cos(ph),
                            std::sin(ps) * std::sin(th) * std::sin(ph),
                            std::sin(ps) * std::cos(th)};
              ChartPoint p{srcs[i].x + rho * dx, srcs[i].tau + rho * std::cos(ps)};
              acc += density_at(prob, p, h) * std::sin(ps) * std::sin(ps) * std::sin(th);
            }
          }
        }
        acc *= (kPi / npsi) * (kPi / nth) * (2 * kPi / nph);
        bulk += w * rho * rho * rho * acc;
      }
      // region B: rho3 <= rA, |dtau| in (sqrt(rA^2-rho3^2), T/2]
      const int nr = std::max(8, quad.n_radial / 3);
      for (int a = 0; a < nr; ++a) {
        const double rho3 = (a + 0.5) * rA / nr;
        const double wr = rA / nr;
        const double t0 = std::sqrt(std::max(0.0, rA * rA - rho3 * rho3));
        if (t0 >= T / 2) continue;
        const int nt = std::max(6, quad.n_tau / 2);
        const int nth = quad.n_sphere_polar, nph = quad.n_sphere_azimuth;
        double acc = 0;
        for (int b = 0; b < nth; ++b) {
          const double x = -1 + (b + 0.5) * 2.0 / nth;
          const double st = std::sqrt(std::max(0.0, 1 - x * x));
          for (int cphi = 0; cphi < nph; ++cphi) {
            const double ph = (cphi + 0.5) * 2 * kPi / nph;
            const Vec3 dir{st * std::cos(ph), st * std::sin(ph), x};
            for (int k = 0; k < nt; ++k) {
              const double dt = t0 + (k + 0.5) * (T / 2 - t0) / nt;
              for (double sgn : {-1.0, 1.0}) {
                ChartPoint p{srcs[i].x + rho3 * dir, srcs[i].tau + sgn * dt};
                acc += density_at(prob, p, h) * ((T / 2 - t0) / nt) * (2.0 / nth) *
                       (2 * kPi / nph);
              }
            }
          }
        }
        // solid-angle measure: dcos dphi already included; multiply rho^2
        bulk += wr * rho3 * rho3 * acc;
      }
    }

    // region C: spherical around the centroid, excluding the source cylinders
    Vec3 xc{0, 0, 0};
    for (const auto& s : srcs) xc = xc + (1.0 / srcs.size()) * s.x;
    double dmax = 0;
    for (const auto& s : srcs) dmax = std::max(dmax, norm(s.x - xc));
    if (quad.R_max < dmax + 2 * rA) throw ValidationError("energy: R_max too small");
    std::vector<std::pair<double, double>> rnodes;
    const double rfine = dmax + 2 * rA;
    const int nfine = std::max(6, int(rfine / (rA / 2.5)));
    for (int i = 0; i < nfine; ++i)
      rnodes.emplace_back((i + 0.5) * rfine / nfine, rfine / nfine);
    for (auto nd : log_nodes(rfine, quad.R_max, quad.n_radial)) rnodes.push_back(nd);

    std::vector<double> shellR, shellD;
    for (auto [rho, w] : rnodes) {
      const int nth = quad.n_sphere_polar * 2, nph = quad.n_sphere_azimuth, ntau = quad.n_tau;
      double acc = 0;
      int cnt = 0;
      for (int b = 0; b < nth; ++b) {
        const double x = -1 + (b + 0.5) * 2.0 / nth;
        const double st = std::sqrt(std::max(0.0, 1 - x * x));
        for (int cphi = 0; cphi < nph; ++cphi) {
          const double ph = (cphi + 0.5) * 2 * kPi / nph;
          const Vec3 xx = xc + rho * Vec3{st * std::cos(ph), st * std::sin(ph), x};
          bool in_cyl = false;
          for (const auto& s : srcs)
            if (norm(xx - s.x) <= rA) in_cyl = true;
          if (in_cyl) {
            cnt += ntau;
            continue;
          }
          for (int k = 0; k < ntau; ++k) {
            const double tv = (k + 0.5) * T / ntau;
            acc += density_at(prob, {xx, tv}, h);
            ++cnt;
          }
        }
      }
      const double avg = acc / cnt;  // includes excluded cells as zeros
      bulk += w * rho * rho * avg * 4 * kPi * T;
      if (rho > 0.7 * quad.R_max) {
        shellR.push_back(rho);
        shellD.push_back(avg);
      }
    }
    // tail: fit |F|^2 ~ c r^-q on the outer shells
    if (shellR.size() >= 3 && shellD.back() > 0) {
      const double q = -loglog_slope(shellR, shellD);
      rep.tail_exponent = q;
      if (q > 3.2) {
        const double c = shellD.back() * std::pow(shellR.back(), q);
        rep.tail_estimate = c * 4 * kPi * T * std::pow(quad.R_max, 3.0 - q) / (q - 3.0);
      }
    }
  } else if (curved) {
    // collapsed / user Gibbons-Hawking geometry: spatial-spherical decomposition
    // around each source; the fiber shortens near NUT sources so there is no
    // tau concentration to resolve.
    if (srcs.size() != 1)
      throw NonConvergentQuadrature("curved-space energy implemented for a single source");
    const auto& s0 = srcs[0];
    const geom::GhSpace& gh = *prob.gh();
    // geodesic excision -> coordinate radius near a NUT: rho = sqrt(2 w r)
    double wgt = 1.0;
    if (!gh.centers().empty() && norm(s0.x - gh.centers()[0]) < 1e-12) wgt = gh.weights()[0];
    const double r_eps = eps[0] * eps[0] / (2 * wgt);
    std::vector<double> shellR, shellD;
    ShellAverager avgF{prob, s0.x, quad.n_sphere_polar * 2, quad.n_sphere_azimuth, quad.n_tau, h};
    for (auto [rho, w] : log_nodes(r_eps, quad.R_max, quad.n_radial * 2)) {
      const double avg = avgF(rho);
      // density_at already carries sqrt(g); measure d^3x dtau
      bulk += w * rho * rho * avg * 4 * kPi * T;
      if (rho > 0.7 * quad.R_max) {
        shellR.push_back(rho);
        shellD.push_back(avg);
      }
    }
    if (shellR.size() >= 3 && shellD.back() > 0) {
      const double q = -loglog_slope(shellR, shellD);
      rep.tail_exponent = q;
      if (q > 3.2) {
        const double c = shellD.back() * std::pow(shellR.back(), q);
        rep.tail_estimate = c * 4 * kPi * T * std::pow(quad.R_max, 3.0 - q) / (q - 3.0);
      }
    }
  } else {
    // flat R^4 (BPST): radial profile with S^3 averaging
    const auto& s0 = srcs[0];
    for (auto [rho, w] : log_nodes(eps[0], quad.R_max, quad.n_radial * 2)) {
      const int npsi = quad.n_sphere_polar, nth = quad.n_sphere_polar,
                nph = quad.n_sphere_azimuth;
      double acc = 0;
      for (int a = 0; a < npsi; ++a) {
        const double ps = (a + 0.5) * kPi / npsi;
        for (int b = 0; b < nth; ++b) {
          const double th = (b + 0.5) * kPi / nth;
          for (int cphi = 0; cphi < nph; ++cphi) {
            const double ph = (cphi + 0.5) * 2 * kPi / nph;
            const Vec3 dx{std::sin(ps) * std::sin(th) * std::cos(ph),
                          std::sin(ps) * std::sin(th) * std::sin(ph),
                          std::sin(ps) * std::cos(th)};
            ChartPoint p{s0.x + rho * dx, s0.tau + rho * std::cos(ps)};
            acc += density_at(prob, p, h) * std::sin(ps) * std::sin(ps) * std::sin(th);
          }
        }
      }
      acc *= (kPi / npsi) * (kPi / nth) * (2 * kPi / nph);
      bulk += w * rho * rho * rho * acc;
    }
    // analytic BPST tail
    const FlatR4Problem* bp = dynamic_cast<const FlatR4Problem*>(&prob);
    if (bp) rep.tail_estimate = 8 * kPi * kPi * (1.0 - bpst_ball_energy(bp->lambda(), quad.R_max));
  }

  rep.bulk = bulk / (8 * kPi * kPi);
  rep.tail_estimate /= 8 * kPi * kPi;
  rep.energy_units = rep.bulk + rep.tail_estimate + rep.excision_estimate;

  if (quad.mc_samples > 0 && !curved && std::isfinite(T)) {
    // Monte-Carlo cross-check of the bulk over the global ball minus eps-balls
    std::mt19937_64 rng(quad.seed + 17);
    std::uniform_real_distribution<double> U(-1, 1), Ut(0, T);
    Vec3 xc{0, 0, 0};
    for (const auto& s : srcs) xc = xc + (1.0 / srcs.size()) * s.x;
    double acc = 0;
    std::size_t kept = 0;
    for (std::size_t i = 0; i < quad.mc_samples; ++i) {
      Vec3 x{U(rng) * quad.R_max, U(rng) * quad.R_max, U(rng) * quad.R_max};
      if (dot(x, x) > quad.R_max * quad.R_max) continue;
      ChartPoint p{xc + x, Ut(rng)};
      ++kept;
      if (prob.source_distance(p) < 2 * eps[0]) continue;
      acc += density_at(prob, p, h);
    }
    const double cube = 8 * std::pow(quad.R_max, 3);
    rep.mc_cross_check = acc / double(quad.mc_samples) * cube * T / (8 * kPi * kPi);
    (void)kept;
  }
  return rep;
}

// ---------------------------------------------------------------------------

DecayReport decay_report(const InstantonProblem& prob, const std::vector<double>& R_list,
                         const QuadratureSpec& quad) {
  if (R_list.size() < 4 || R_list.back() < 2 * R_list.front())
    throw InsufficientRange("decay_report: need >= 4 radii spanning a factor >= 2");
  DecayReport rep;
  rep.R = R_list;
  const double T = prob.tau_period();
  Vec3 x0{0, 0, 0};
  for (const auto& s : prob.sources()) x0 = x0 + (1.0 / prob.sources().size()) * s.x;

  // sup |a| on shells
  for (double R : R_list) {
    double best = 0;
    const int nth = 8, nph = 12, ntau = 8;
    for (int b = 0; b < nth; ++b) {
      const double x = -1 + (b + 0.5) * 2.0 / nth;
      const double st = std::sqrt(1 - x * x);
      for (int c = 0; c < nph; ++c) {
        const double ph = (c + 0.5) * 2 * kPi / nph;
        for (int k = 0; k < ntau; ++k) {
          ChartPoint p{x0 + R * Vec3{st * std::cos(ph), st * std::sin(ph), x},
                       std::isfinite(T) ? (k + 0.5) * T / ntau : (k - ntau / 2.0) * R / ntau};
          best = std::max(best, std::sqrt(rescale_potential(prob, p).norm2()));
        }
      }
    }
    rep.sup_a.push_back(best);
  }
  rep.a_exponent = -loglog_slope(rep.R, rep.sup_a);

  // ||F||_{L^2(r > R)} via shell integrals + fitted tail
  ShellAverager avgF{prob, x0, 10, 12, std::isfinite(T) ? quad.n_tau : 12, quad.fd_step};
  std::vector<double> segs(R_list.size() - 1, 0.0);
  std::vector<double> dens(R_list.size());
  for (std::size_t i = 0; i < R_list.size(); ++i) dens[i] = avgF(R_list[i]);
  const double Tm = std::isfinite(T) ? T : 2 * R_list.back();
  for (std::size_t i = 0; i + 1 < R_list.size(); ++i) {
    // log-trapezoid between consecutive shells
    const double r0 = R_list[i], r1 = R_list[i + 1];
    const double g0 = dens[i] * r0 * r0 * r0, g1 = dens[i + 1] * r1 * r1 * r1;
    segs[i] = 0.5 * (g0 + g1) * std::log(r1 / r0) * 4 * kPi * Tm;
  }
  const double q = -loglog_slope(R_list, dens);
  double tail = 0;
  if (q > 3.2 && dens.back() > 0) {
    const double c = dens.back() * std::pow(R_list.back(), q);
    tail = c * 4 * kPi * Tm * std::pow(R_list.back(), 3.0 - q) / (q - 3.0);
  }
  for (std::size_t i = 0; i < R_list.size(); ++i) {
    double s = tail;
    for (std::size_t jv = i; jv + 1 < R_list.size(); ++jv) s += segs[jv];
    rep.l2_tail.push_back(std::sqrt(std::max(0.0, s)));
    rep.weighted.push_back(std::sqrt(R_list[i]) * rep.l2_tail.back());
  }
  rep.F_exponent = -loglog_slope(rep.R, rep.l2_tail);
  rep.rapid_decay_decreasing = true;
  for (std::size_t i = 0; i + 1 < rep.weighted.size(); ++i)
    if (rep.weighted[i + 1] >= rep.weighted[i]) rep.rapid_decay_decreasing = false;
  return rep;
}

std::vector<double> boundedness_at_source(const InstantonProblem& prob,
                                          const std::vector<double>& eps_list) {
  const auto srcs = prob.sources();
  const auto& s0 = srcs.at(0);
  const bool curved = prob.gh() != nullptr;
  double wgt = 1.0;
  if (curved && !prob.gh()->centers().empty() && norm(s0.x - prob.gh()->centers()[0]) < 1e-12)
    wgt = prob.gh()->weights()[0];
  std::vector<double> out;
  for (double e : eps_list) {
    double best = 0;
    if (!curved) {
      const int npsi = 6, nth = 6, nph = 8;
      for (int a = 0; a < npsi; ++a) {
        const double ps = (a + 0.5) * kPi / npsi;
        for (int b = 0; b < nth; ++b) {
          const double th = (b + 0.5) * kPi / nth;
          for (int c = 0; c < nph; ++c) {
            const double ph = (c + 0.5) * 2 * kPi / nph;
            const Vec3 dx{std::sin(ps) * std::sin(th) * std::cos(ph),
                          std::sin(ps) * std::sin(th) * std::sin(ph),
                          std::sin(ps) * std::cos(th)};
            ChartPoint p{s0.x + e * dx, s0.tau + e * std::cos(ps)};
            best = std::max(best, std::sqrt(curvature(prob, p, 1e-4).norm2()));
          }
        }
      }
    } else {
      const double r = e * e / (2 * wgt);
      const int nth = 6, nph = 8, ntau = 4;
      const double T = prob.tau_period();
      for (int b = 0; b < nth; ++b) {
        const double x = -1 + (b + 0.5) * 2.0 / nth;
        const double st = std::sqrt(1 - x * x);
        for (int c = 0; c < nph; ++c) {
          const double ph = (c + 0.5) * 2 * kPi / nph;
          for (int k = 0; k < ntau; ++k) {
            ChartPoint p{s0.x + r * Vec3{st * std::cos(ph), st * std::sin(ph), x},
                         (k + 0.5) * T / ntau};
            best = std::max(best, std::sqrt(curvature(prob, p, 1e-4).norm2()));
          }
        }
      }
    }
    out.push_back(best);
  }
  return out;
}

double max_asd_residual(const InstantonProblem& prob, int n, double r_lo, double r_hi,
                        unsigned seed, double h) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(-1, 1), Ulog(std::log(r_lo), std::log(r_hi)),
      Ut(0, std::isfinite(prob.tau_period()) ? prob.tau_period() : 2 * kPi);
  Vec3 x0{0, 0, 0};
  for (const auto& s : prob.sources()) x0 = x0 + (1.0 / prob.sources().size()) * s.x;
  double worst = 0;
  int done = 0;
  while (done < n) {
    Vec3 d{U(rng), U(rng), U(rng)};
    const double nd = norm(d);
    if (nd < 1e-3) continue;
    d = (std::exp(Ulog(rng)) / nd) * d;
    ChartPoint p{x0 + d, Ut(rng)};
    if (prob.source_distance(p) < 0.05) continue;
    if (prob.gh() && prob.gh()->min_center_distance(p.x) < 0.05) continue;
    // keep away from Dirac strings of the background when present
    if (prob.gh()) {
      bool bad = false;
      for (const auto& q : prob.gh()->centers()) {
        const Vec3 rel = p.x - q;
        if (rel[0] * rel[0] + rel[1] * rel[1] < 2.5e-3) bad = true;
      }
      if (bad) continue;
    }
    worst = std::max(worst, curvature(prob, p, h).asd_residual);
    ++done;
  }
  return worst;
}

}  // namespace nutgauge::gauge
