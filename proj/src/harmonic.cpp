#include "nutgauge/harmonic.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace nutgauge::harmonic {

namespace {
void require_off_source(double a, double b) {
  const double bw = std::remainder(b, 2 * kPi);
  if (a * a + bw * bw < 1e-20) throw SourceCoincidence("flat Green source coincidence");
}
}  // namespace

double flat_green_series(double a, double b, int K) {
  require_off_source(a, b);
  if (K < 1) throw ValidationError("flat_green_series: K >= 1");
  // sum outside-in so the small terms accumulate first
  double s = 0;
  for (int k = K; k >= 1; --k) {
    const double tp = b + 2 * kPi * k, tm = b - 2 * kPi * k;
    s += 1.0 / (a * a + tp * tp) + 1.0 / (a * a + tm * tm);
  }
  s += 1.0 / (a * a + b * b);
  return s / (4 * kPi * kPi);
}

double flat_green_series_accel(double a, double b, int K) {
  // midpoint (Euler-Maclaurin) tail: sum_{k>K} h(k) ~ int_{K+1/2}^inf h,
  // exact integral of the Lorentzian terms, error O(K^-3).
  double s = flat_green_series(a, b, K);
  auto tail = [&](double bb) {
    const double u = bb + 2 * kPi * (K + 0.5);
    return (kPi / 2 - std::atan(u / a)) / (2 * kPi * a);
  };
  s += (tail(b) + tail(-b)) / (4 * kPi * kPi);
  return s;
}

double flat_green_closed(double a, double b, double C) {
  require_off_source(a, b);
  // C (1/a) sinh a / (cosh a - cos b), written with E = e^{-a} against overflow
  const double E = std::exp(-a);
  const double Q = 1 + E * E - 2 * E * std::cos(b);
  return C * (1 - E * E) / (a * Q);
}

FlatGreenJet flat_green_jet(double a, double b) {
  require_off_source(a, b);
  FlatGreenJet out;
  if (a > 0.05) {
    const double C = kFlatGreenPrefactor;
    const double E = std::exp(-a);
    const double cb = std::cos(b), sb = std::sin(b);
    const double Q = 1 + E * E - 2 * E * cb;
    const double P = 1 - E * E;
    out.value = C * P / (a * Q);
    const double dPda = 2 * E * E;
    const double dQda = 2 * E * (cb - E);
    out.da = C * ((dPda * Q - P * dQda) / (a * Q * Q) - P / (a * a * Q));
    out.db = -C * P * (2 * E * sb) / (a * Q * Q);
    out.da_over_a = out.da / a;
    return out;
  }
  // near the source line: image series with exact term derivatives
  const int K = 600;
  double v = 0, doa = 0, db = 0;
  for (int k = K; k >= -K; --k) {
    const double t = b + 2 * kPi * k;
    const double d = a * a + t * t;
    v += 1.0 / d;
    doa += -2.0 / (d * d);
    db += -2 * t / (d * d);
  }
  // midpoint tail for the value (derivative tails are O(K^-4), negligible)
  auto tail = [&](double bb) {
    const double u = bb + 2 * kPi * (K + 0.5);
    return (kPi / 2 - std::atan(u / a)) / (2 * kPi * a);
  };
  v += tail(b) + tail(-b);
  const double c = 1.0 / (4 * kPi * kPi);
  out.value = c * v;
  out.da_over_a = c * doa;
  out.da = c * doa * a;
  out.db = c * db;
  return out;
}

double fit_flat_green_prefactor(int n_samples, unsigned seed, double* max_rel_spread) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> Ua(0.2, 6.0), Ub(-kPi, kPi);
  double sum = 0, lo = 1e300, hi = -1e300;
  for (int i = 0; i < n_samples; ++i) {
    const double a = Ua(rng), b = Ub(rng);
    const double series = flat_green_series_accel(a, b, 20000);
    const double shape = flat_green_closed(a, b, 1.0);
    const double c = series / shape;
    sum += c;
    lo = std::min(lo, c);
    hi = std::max(hi, c);
  }
  const double mean = sum / n_samples;
  if (max_rel_spread) *max_rel_spread = (hi - lo) / mean;
  return mean;
}

// ---------------------------------------------------------------------------

double collapsed_green(int s, double r) {
  if (s < 1) throw ValidationError("collapsed_green: s >= 1");
  if (!(r > 0)) throw SourceCoincidence("collapsed_green: r must be positive");
  return kCollapsedGreenKappa / r;
}

double collapsed_green_flux(int s, double kappa, double r0, int n_theta) {
  // flux of -grad(kappa/r) through {r = r0}: area element
  // (s/2) sqrt(V) r^2 sinTheta dtau dphi dTheta, unit normal d_r/sqrt(V).
  // The normal derivative is found by finite differences so this stays an
  // independent oracle for the normalization.
  const double h = 1e-6 * r0;
  const double dG = (collapsed_green(s, r0 + h) * kappa / kCollapsedGreenKappa -
                     collapsed_green(s, r0 - h) * kappa / kCollapsedGreenKappa) /
                    (2 * h);
  const double V = 1 + s / (2.0 * r0);
  double acc = 0;  // midpoint rule in Theta
  for (int i = 0; i < n_theta; ++i) {
    const double th = (i + 0.5) * kPi / n_theta;
    acc += std::sin(th) * (kPi / n_theta);
  }
  const double area_factor = (s / 2.0) * std::sqrt(V) * r0 * r0 * acc * (2 * kPi) * (4 * kPi / s);
  return -dG / std::sqrt(V) * area_factor;
}

namespace {
struct CollapsedCoeffs {
  double rr, r1, tt, thth, th1, pp, tp;
};
CollapsedCoeffs collapsed_coeffs(int s, double r, double Th) {
  const double S = double(s);
  const double sin2 = std::sin(Th) * std::sin(Th);
  if (sin2 < 1e-14) throw PoleProximity("collapsed Laplacian near sin(Theta)=0");
  CollapsedCoeffs c;
  c.rr = 2 * r / (2 * r + S);
  c.r1 = 4 / (2 * r + S);
  c.tt = (2 * std::pow(2 * r + S, 2) * sin2 + 2 * S * S * (1 - sin2)) /
         (r * S * S * (2 * r + S) * sin2);
  c.thth = 2 / (r * (2 * r + S));
  c.th1 = c.thth;  // times cot(Theta)
  c.pp = 2 / (r * (2 * r + S) * sin2);
  c.tp = -2 * std::cos(Th) * c.pp;
  return c;
}

// central second differences on the collapsed chart
struct Stencil2 {
  double d2r, dr, d2t, d2th, dth, d2p, dtp;
};
Stencil2 stencil(const CollapsedField& f, const geom::CollapsedChartPoint& p, double h) {
  auto F = [&](double dr, double dt, double dp, double dth) {
    geom::CollapsedChartPoint q = p;
    q.r += dr;
    q.tau += dt;
    q.phi += dp;
    q.theta += dth;
    return f(q);
  };
  const double f0 = F(0, 0, 0, 0);
  Stencil2 st;
  st.d2r = (F(h, 0, 0, 0) - 2 * f0 + F(-h, 0, 0, 0)) / (h * h);
  st.dr = (F(h, 0, 0, 0) - F(-h, 0, 0, 0)) / (2 * h);
  st.d2t = (F(0, h, 0, 0) - 2 * f0 + F(0, -h, 0, 0)) / (h * h);
  st.d2th = (F(0, 0, 0, h) - 2 * f0 + F(0, 0, 0, -h)) / (h * h);
  st.dth = (F(0, 0, 0, h) - F(0, 0, 0, -h)) / (2 * h);
  st.d2p = (F(0, 0, h, 0) - 2 * f0 + F(0, 0, -h, 0)) / (h * h);
  st.dtp = (F(0, h, h, 0) - F(0, h, -h, 0) - F(0, -h, h, 0) + F(0, -h, -h, 0)) / (4 * h * h);
  return st;
}
}  // namespace

double collapsed_laplacian_apply(int s, const CollapsedField& f,
                                 const geom::CollapsedChartPoint& p, double h) {
  const auto c = collapsed_coeffs(s, p.r, p.theta);
  const auto st = stencil(f, p, h);
  const double cot = std::cos(p.theta) / std::sin(p.theta);
  return c.rr * st.d2r + c.r1 * st.dr + c.tt * st.d2t + c.thth * st.d2th + c.th1 * cot * st.dth +
         c.pp * st.d2p + c.tp * st.dtp;
}

double collapsed_laplacian_apply_vform(int s, const CollapsedField& f,
                                       const geom::CollapsedChartPoint& p, double h) {
  // V(r) Lap = d2r + (2/r) dr + (4/(rs) + 4/s^2) d2tau + (1/r^2) Lap_{L(s,-1)}
  const double V = 1 + s / (2 * p.r);
  const auto st = stencil(f, p, h);
  const double sin2 = std::sin(p.theta) * std::sin(p.theta);
  if (sin2 < 1e-14) throw PoleProximity("collapsed Laplacian near sin(Theta)=0");
  const double cot = std::cos(p.theta) / std::sin(p.theta);
  const double lapL = st.d2th + cot * st.dth +
                      (st.d2p - 2 * std::cos(p.theta) * st.dtp + st.d2t) / sin2;
  const double vlap = st.d2r + 2 / p.r * st.dr +
                      (4.0 / (p.r * s) + 4.0 / (double(s) * s)) * st.d2t + lapL / (p.r * p.r);
  return vlap / V;
}

double lens_laplacian_apply(int s, const CollapsedField& f,
                            const geom::CollapsedChartPoint& p, double h) {
  (void)s;
  const auto st = stencil(f, p, h);
  const double sin2 = std::sin(p.theta) * std::sin(p.theta);
  if (sin2 < 1e-14) throw PoleProximity("lens Laplacian near sin(Theta)=0");
  const double cot = std::cos(p.theta) / std::sin(p.theta);
  return st.d2th + cot * st.dth + (st.d2p - 2 * std::cos(p.theta) * st.dtp + st.d2t) / sin2;
}

// ---------------------------------------------------------------------------
// Jacobi polynomials with real (possibly half-integer) parameters
// ---------------------------------------------------------------------------

namespace {
double jacobi_poly(int n, double a, double b, double x) {
  if (n == 0) return 1.0;
  double p0 = 1.0;
  double p1 = 0.5 * (a - b) + 0.5 * (a + b + 2) * x;
  for (int m = 2; m <= n; ++m) {
    const double c = 2 * m + a + b;
    const double a1 = 2 * m * (m + a + b) * (c - 2);
    const double a2 = (c - 1) * (a * a - b * b);
    const double a3 = (c - 2) * (c - 1) * c;
    const double a4 = 2 * (m + a - 1) * (m + b - 1) * c;
    const double p2 = ((a2 + a3 * x) * p1 - a4 * p0) / a1;
    p0 = p1;
    p1 = p2;
  }
  return p1;
}
}  // namespace

GeneralLegendre legendre_general(int j, int k, int l, int s) {
  if (j < 0 || std::abs(k) > j || s < 1) throw ValidationError("legendre_general: bad indices");
  if (std::abs(l) > (2 * j) / s) throw ValidationError("legendre_general: |l| > floor(2j/s)");
  GeneralLegendre P;
  P.j = j;
  P.k = k;
  P.l = l;
  P.s = s;
  const double m = l * s / 2.0;
  P.a = std::abs(k - m);
  P.b = std::abs(k + m);
  const double nf = j - std::max(std::abs(double(k)), std::abs(m));
  const double nr = std::round(nf);
  if (nf < -1e-9 || std::abs(nf - nr) > 1e-9)
    throw NoBoundedSolution("no solution bounded at both x = -1 and x = 1 for these indices");
  P.n = int(nr);
  return P;
}

double GeneralLegendre::eval(double x) const {
  if (x < -1 || x > 1) throw ValidationError("legendre eval: x outside [-1,1]");
  return std::pow(1 - x, a / 2) * std::pow(1 + x, b / 2) * jacobi_poly(n, a, b, x);
}

double GeneralLegendre::ode_residual(double x) const {
  const double h = 1e-5;
  const double P0 = eval(x), Pp = eval(x + h), Pm = eval(x - h);
  const double d1 = (Pp - Pm) / (2 * h);
  const double d2 = (Pp - 2 * P0 + Pm) / (h * h);
  const double pot = (k * k - x * (k * l * s) + l * l * s * s / 4.0) / (1 - x * x);
  return (1 - x * x) * d2 - 2 * x * d1 - pot * P0 + j * (j + 1) * P0;
}

std::vector<std::pair<int, int>> lens_harmonic_indices(int j, int s) {
  std::vector<std::pair<int, int>> out;
  for (int k = -j; k <= j; ++k)
    for (int l = -(2 * j) / s; l <= (2 * j) / s; ++l) {
      const double m = l * s / 2.0;
      const double nf = j - std::max(std::abs(double(k)), std::abs(m));
      if (nf > -1e-9 && std::abs(nf - std::round(nf)) < 1e-9) out.emplace_back(k, l);
    }
  return out;
}

LensHarmonic lens_harmonic(int j, int k, int l, int s) {
  LensHarmonic Y{j, k, l, s, legendre_general(j, k, l, s), 1.0};
  // unit L^2 with measure (1/8) sin dtau dphi dTheta: N^2 (pi^2/s) ||P||^2 = 1
  double acc = 0;
  const int nsimp = 2000;
  const double hx = 2.0 / nsimp;
  for (int i = 0; i <= nsimp; ++i) {
    const double x = -1 + i * hx;
    const double w = (i == 0 || i == nsimp) ? 1 : (i % 2 ? 4 : 2);
    const double P = Y.legendre.eval(x);
    acc += w * P * P;
  }
  acc *= hx / 3;
  Y.normalization = 1.0 / std::sqrt(acc * kPi * kPi / s);
  return Y;
}

cplx LensHarmonic::eval(const geom::CollapsedChartPoint& p) const {
  const double ph = l * s / 2.0 * p.tau + k * p.phi;
  return normalization * legendre.eval(std::cos(p.theta)) * cplx(std::cos(ph), std::sin(ph));
}

// ---------------------------------------------------------------------------
// Radial equation
// ---------------------------------------------------------------------------

namespace {
// y = (K, K'); K'' = (j(j+1)/r^2 + s l^2 / r + l^2) K - (2/r) K'
struct RadialRhs {
  double jj, sl2, l2;
  std::array<double, 2> operator()(double r, const std::array<double, 2>& y) const {
    return {y[1], (jj / (r * r) + sl2 / r + l2) * y[0] - 2 / r * y[1]};
  }
};

std::array<double, 2> rk4_step(const RadialRhs& f, double r, std::array<double, 2> y, double h) {
  auto add = [](std::array<double, 2> u, double s, const std::array<double, 2>& v) {
    return std::array<double, 2>{u[0] + s * v[0], u[1] + s * v[1]};
  };
  const auto k1 = f(r, y);
  const auto k2 = f(r + h / 2, add(y, h / 2, k1));
  const auto k3 = f(r + h / 2, add(y, h / 2, k2));
  const auto k4 = f(r + h, add(y, h, k3));
  return {y[0] + h / 6 * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0]),
          y[1] + h / 6 * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1])};
}

void integrate_to(const RadialRhs& f, double& r, std::array<double, 2>& y, double r_target,
                  double hmax) {
  const double dir = (r_target > r) ? 1.0 : -1.0;
  while (std::abs(r_target - r) > 1e-14 * std::max(1.0, std::abs(r))) {
    // resolve both the 1/r core and the e^{lr} envelope
    double h = std::min({hmax, 0.05 * std::abs(r), std::abs(r_target - r)});
    if (h < 1e-15) break;
    y = rk4_step(f, r, y, dir * h);
    r += dir * h;
    if (!std::isfinite(y[0]) || std::abs(y[0]) > 1e290)
      throw StiffnessFailure("radial integration overflow; reduce r range");
  }
}
}  // namespace

RadialSolution radial_solve(int j, int l, int s, RadialBranch branch,
                            const std::vector<double>& r_grid) {
  if (r_grid.size() < 2) throw ValidationError("radial_solve: need at least 2 grid points");
  for (std::size_t i = 0; i < r_grid.size(); ++i) {
    if (!(r_grid[i] > 0)) throw ValidationError("radial_solve: grid must be positive");
    if (i && r_grid[i] <= r_grid[i - 1]) throw ValidationError("radial_solve: grid must increase");
  }
  l = std::abs(l);  // K^l = K^{-l}
  RadialSolution sol;
  sol.j = j;
  sol.l = l;
  sol.s = s;
  sol.branch = branch;
  sol.r = r_grid;
  sol.value.resize(r_grid.size());
  sol.deriv.resize(r_grid.size());

  if (l == 0) {  // exact monomials
    for (std::size_t i = 0; i < r_grid.size(); ++i) {
      const double r = r_grid[i];
      if (branch == RadialBranch::Growing) {
        sol.value[i] = std::pow(r, j);
        sol.deriv[i] = j == 0 ? 0.0 : j * std::pow(r, j - 1);
      } else {
        sol.value[i] = std::pow(r, -j - 1);
        sol.deriv[i] = -(j + 1) * std::pow(r, -j - 2);
      }
    }
    return sol;
  }

  const RadialRhs rhs{double(j) * (j + 1), double(s) * l * l, double(l) * l};
  if (branch == RadialBranch::Growing) {
    // start from small r with the series r^j (1 + a1 r + a2 r^2):
    // a_n n(2j+n+1) = s l^2 a_{n-1} + l^2 a_{n-2}
    const double r0 = std::min(1e-3, 0.01 * r_grid.front());
    const double a1 = double(s) * l * l / (1.0 * (2 * j + 2));
    const double a2 = (double(s) * l * l * a1 + double(l) * l) / (2.0 * (2 * j + 3));
    const double K0 = std::pow(r0, j) * (1 + a1 * r0 + a2 * r0 * r0);
    const double K1 = j * std::pow(r0, std::max(j - 1, 0)) * (j == 0 ? 0.0 : 1.0) *
                          (1 + a1 * r0 + a2 * r0 * r0) +
                      std::pow(r0, j) * (a1 + 2 * a2 * r0);
    double r = r0;
    std::array<double, 2> y{K0, K1};
    for (std::size_t i = 0; i < r_grid.size(); ++i) {
      integrate_to(rhs, r, y, r_grid[i], 2e-3 / l);
      sol.value[i] = y[0];
      sol.deriv[i] = y[1];
    }
  } else {
    // start from large r with e^{-l r} r^p (1 + c1/r), p = -s l/2 - 1, inward
    const double p = -double(s) * l / 2.0 - 1.0;
    const double c1 = -(p * (p + 1) - double(j) * (j + 1)) / (2.0 * l);
    const double r1 = std::max(2.0 * r_grid.back(), r_grid.back() + 10.0 / l);
    const double e = std::exp(-l * r1);
    const double K0 = e * std::pow(r1, p) * (1 + c1 / r1);
    const double K1 = e * (-l * std::pow(r1, p) * (1 + c1 / r1) +
                           p * std::pow(r1, p - 1) * (1 + c1 / r1) - c1 * std::pow(r1, p - 2));
    double r = r1;
    std::array<double, 2> y{K0, K1};
    for (std::size_t i = r_grid.size(); i-- > 0;) {
      integrate_to(rhs, r, y, r_grid[i], 2e-3 / l);
      sol.value[i] = y[0];
      sol.deriv[i] = y[1];
    }
  }
  return sol;
}

double RadialSolution::eval(double rr) const {
  if (l == 0)  // exact monomials
    return branch == RadialBranch::Growing ? std::pow(rr, j) : std::pow(rr, -j - 1);
  if (rr <= r.front() || rr >= r.back()) {
    // clamp to nearest grid sample outside the table
    return rr <= r.front() ? value.front() : value.back();
  }
  const auto it = std::upper_bound(r.begin(), r.end(), rr);
  const std::size_t i = std::size_t(it - r.begin()) - 1;
  const double h = r[i + 1] - r[i], t = (rr - r[i]) / h;
  const double y0 = value[i], y1 = value[i + 1], m0 = deriv[i] * h, m1 = deriv[i + 1] * h;
  const double t2 = t * t, t3 = t2 * t;
  return (2 * t3 - 3 * t2 + 1) * y0 + (t3 - 2 * t2 + t) * m0 + (-2 * t3 + 3 * t2) * y1 +
         (t3 - t2) * m1;
}

double RadialSolution::eval_deriv(double rr) const {
  if (l == 0)
    return branch == RadialBranch::Growing ? (j == 0 ? 0.0 : j * std::pow(rr, j - 1))
                                           : -(j + 1) * std::pow(rr, -j - 2);
  if (rr <= r.front()) return deriv.front();
  if (rr >= r.back()) return deriv.back();
  const auto it = std::upper_bound(r.begin(), r.end(), rr);
  const std::size_t i = std::size_t(it - r.begin()) - 1;
  const double h = r[i + 1] - r[i], t = (rr - r[i]) / h;
  const double y0 = value[i], y1 = value[i + 1], m0 = deriv[i] * h, m1 = deriv[i + 1] * h;
  return ((6 * t * t - 6 * t) * y0 + (3 * t * t - 4 * t + 1) * m0 + (-6 * t * t + 6 * t) * y1 +
          (3 * t * t - 2 * t) * m1) /
         h;
}

double RadialSolution::ode_residual(std::size_t i) const {
  if (i == 0 || i + 1 >= r.size()) return 0.0;
  // second derivative from the stored first derivatives (centered)
  const double d2 = (deriv[i + 1] - deriv[i - 1]) / (r[i + 1] - r[i - 1]);
  const double rr = r[i];
  return d2 + 2 / rr * deriv[i] -
         (double(j) * (j + 1) / (rr * rr) + double(s) * l * l / rr + double(l) * l) * value[i];
}

double radial_wronskian(const RadialSolution& dec, const RadialSolution& gro, double r) {
  return dec.eval(r) * gro.eval_deriv(r) - dec.eval_deriv(r) * gro.eval(r);
}

// ---------------------------------------------------------------------------

void ExpansionCoefficients::validate_reality(double tol) const {
  for (const auto& [key, lm] : terms) {
    auto [j, k, l] = key;
    const auto it = terms.find({j, -k, -l});
    if (it == terms.end()) throw RealityViolation("missing conjugate partner coefficient");
    if (std::abs(std::conj(lm.first) - it->second.first) > tol ||
        std::abs(std::conj(lm.second) - it->second.second) > tol)
      throw RealityViolation("conjugate-pair coefficient condition fails");
  }
}

cplx expansion_evaluate(const ExpansionCoefficients& coeffs, const geom::CollapsedChartPoint& p,
                        int j_max) {
  coeffs.validate_reality();
  cplx acc = 0;
  // radial tables cached per (j,l) on a grid bracketing p.r
  std::map<std::pair<int, int>, std::pair<RadialSolution, RadialSolution>> cache;
  std::vector<double> grid;
  for (double rr = std::max(1e-3, p.r / 8); rr <= p.r * 8; rr *= 1.05) grid.push_back(rr);
  for (const auto& [key, lm] : coeffs.terms) {
    auto [j, k, l] = key;
    if (j > j_max) continue;
    auto ck = std::make_pair(j, std::abs(l));
    if (!cache.count(ck))
      cache.emplace(ck, std::make_pair(radial_solve(j, l, coeffs.s, RadialBranch::Decaying, grid),
                                       radial_solve(j, l, coeffs.s, RadialBranch::Growing, grid)));
    const auto& [dec, gro] = cache.at(ck);
    const auto Y = lens_harmonic(j, k, l, coeffs.s);
    acc += (lm.first * dec.eval(p.r) + lm.second * gro.eval(p.r)) * Y.eval(p);
  }
  return acc;
}

// ---------------------------------------------------------------------------

double green_eval(const GreenSpec& g, const geom::ChartPoint& p) {
  switch (g.space) {
    case GreenSpace::FlatR3xS1: {
      const double a = norm(p.x - g.y);
      return g.normalization * flat_green_jet(a, p.tau - g.tau_y).value;
    }
    case GreenSpace::CollapsedModel:
    case GreenSpace::TaubNutAtNut: {
      const double r = norm(p.x);
      return g.normalization * collapsed_green(g.s, r);
    }
  }
  throw Error("unreachable");
}

Vec4 green_grad(const GreenSpec& g, const geom::ChartPoint& p) {
  switch (g.space) {
    case GreenSpace::FlatR3xS1: {
      const Vec3 d = p.x - g.y;
      const double a = norm(d);
      const auto jet = flat_green_jet(a, p.tau - g.tau_y);
      Vec4 out{};
      for (int i = 0; i < 3; ++i) out[i] = g.normalization * jet.da_over_a * d[i];
      out[3] = g.normalization * jet.db;
      return out;
    }
    case GreenSpace::CollapsedModel:
    case GreenSpace::TaubNutAtNut: {
      const double r = norm(p.x);
      if (!(r > 0)) throw SourceCoincidence("green_grad at source");
      Vec4 out{};
      for (int i = 0; i < 3; ++i)
        out[i] = -g.normalization * kCollapsedGreenKappa * p.x[i] / (r * r * r);
      return out;
    }
  }
  throw Error("unreachable");
}

double HarmonicFunction::eval(const geom::ChartPoint& p) const {
  const double G = green_eval(green, p);
  if (pure_green) return G;
  if (!(lambda >= 0)) throw ValidationError("HarmonicFunction: lambda must be >= 0");
  return constant_term + lambda * G;
}

Vec4 HarmonicFunction::grad(const geom::ChartPoint& p) const {
  Vec4 gg = green_grad(green, p);
  const double scale = pure_green ? 1.0 : lambda;
  for (auto& v : gg) v *= scale;
  return gg;
}

}  // namespace nutgauge::harmonic
