#include "nutgauge/twistor.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <boost/multiprecision/cpp_int.hpp>

namespace nutgauge::twistor {

Vec3 direction_of(cplx t) {
  const double n = 1 + std::norm(t);
  if (!std::isfinite(n) || n > 1e300) return {-1, 0, 0};
  return {(1 - std::norm(t)) / n, 2 * t.real() / n, 2 * t.imag() / n};
}

RootPair roots(const QuadraticSection& zeta, const QuadraticSection& pj) {
  const cplx da = zeta.alpha - pj.alpha;
  const double db = zeta.beta - pj.beta;
  if (std::abs(da) < 1e-14)
    throw DegenerateDirection("roots: alpha = alpha_j (exceptional direction)");
  const double D = std::sqrt(db * db + std::norm(da));
  return {(-db - D) / da, (-db + D) / da};
}

cplx eta_section(const QuadraticSection& zeta, double c, cplx a, cplx b, Chart chart) {
  if (chart == Chart::Ub) {
    if (std::abs(b) < 1e-300) throw ChartMismatch("eta_section: U_b chart needs b != 0");
    const cplx t = a / b;
    return std::exp(c * (zeta.alpha * t + zeta.beta));
  }
  if (std::abs(a) < 1e-300) throw ChartMismatch("eta_section: U_a chart needs a != 0");
  const cplx u = b / a;
  return std::exp(c * (std::conj(zeta.alpha) * u - zeta.beta));
}

cplx RealTwistorSection::B() const {
  cplx prod(1, 0);
  for (const auto& p : ps) prod *= (zeta.alpha - p.alpha);
  if (std::abs(A) < 1e-300) throw ValidationError("RealTwistorSection: A = 0");
  return prod / A;
}

double RealTwistorSection::reality_modulus_squared(const QuadraticSection& zeta,
                                                   const std::vector<QuadraticSection>& ps) {
  double m = 1;
  for (const auto& p : ps) {
    const double db = zeta.beta - p.beta;
    const double D = std::sqrt(db * db + std::norm(zeta.alpha - p.alpha));
    m *= (D - db);
  }
  return m;
}

double RealTwistorSection::paper_modulus_squared(const QuadraticSection& zeta,
                                                 const std::vector<QuadraticSection>& ps) {
  double m = 1;
  for (const auto& p : ps) {
    const double db = zeta.beta - p.beta;
    const double D = std::sqrt(db * db + std::norm(zeta.alpha - p.alpha));
    m *= (D + db);
  }
  return m;
}

RealTwistorSection RealTwistorSection::make(const QuadraticSection& zeta,
                                            const std::vector<QuadraticSection>& ps,
                                            double arg_A) {
  for (const auto& p : ps)
    if (std::abs(zeta.alpha - p.alpha) < 1e-14)
      throw DegenerateDirection("RealTwistorSection: alpha = alpha_j");
  RealTwistorSection s;
  s.zeta = zeta;
  s.ps = ps;
  s.A = std::sqrt(reality_modulus_squared(zeta, ps)) * std::exp(cplx(0, arg_A));
  return s;
}

void RealTwistorSection::validate(double tol) const {
  const double want = reality_modulus_squared(zeta, ps);
  if (std::abs(std::norm(A) - want) > tol * std::max(1.0, want))
    throw RealityViolation("RealTwistorSection: |A|^2 violates the reality constraint");
}

LinePolynomials real_line(const RealTwistorSection& section, double c) {
  section.validate();
  LinePolynomials line;
  line.section = section;
  line.c = c;
  for (const auto& p : section.ps) {
    const auto rp = roots(section.zeta, p);
    line.rhos.push_back(rp.rho);
    line.sigmas.push_back(rp.sigma);
  }
  return line;
}

cplx LinePolynomials::xi_b(cplx t) const {
  cplx prod(1, 0);
  for (const auto& r : rhos) prod *= (t - r);
  return section.A * eta_section(section.zeta, c, t, cplx(1), Chart::Ub) * prod;
}

cplx LinePolynomials::ups_b(cplx t) const {
  cplx prod(1, 0);
  for (const auto& s : sigmas) prod *= (t - s);
  return section.B() * eta_section(section.zeta, -c, t, cplx(1), Chart::Ub) * prod;
}

cplx LinePolynomials::xi_a(cplx t) const {
  // L^c transition g = exp(-c z b/a) along the section
  const cplx g = std::exp(-c * zeta_b(t) / t);
  return g * xi_b(t);
}

cplx LinePolynomials::ups_a(cplx t) const {
  const cplx g = std::exp(c * zeta_b(t) / t);
  return g * ups_b(t);
}

double LinePolynomials::factorization_residual(cplx t) const {
  cplx prod(1, 0);
  for (const auto& p : section.ps) prod *= (zeta_b(t) - p.affine(t));
  const cplx lhs = xi_b(t) * ups_b(t);
  return std::abs(lhs - prod) / std::max(1.0, std::abs(prod));
}

double LinePolynomials::reality_residual(cplx t) const {
  // tau_c (x, y, z) = ((-1)^s r(y), r(x), -r(z)) maps the point of the line
  // over [t:1] to the point over sigma(t) = -1/conj(t); checked in the U_b
  // homogeneous trivialization with representative sigma(t, 1) = (1, -conj(t)).
  const std::size_t s = section.ps.size();
  const cplx tb = std::conj(t);
  const cplx tp = -1.0 / tb;
  const double sgn = (s % 2 == 0) ? 1.0 : -1.0;
  const cplx pw = std::pow(-tb, double(s));

  const cplx z_im = section.zeta.eval(cplx(1), -tb);
  const double r1 = std::abs(z_im + std::conj(zeta_b(t))) / std::max(1.0, std::abs(z_im));

  const cplx xi_im = pw * xi_b(tp);
  const double r2 = std::abs(xi_im - sgn * std::conj(ups_a(t))) / std::max(1.0, std::abs(xi_im));

  const cplx up_im = pw * ups_b(tp);
  const double r3 = std::abs(up_im - std::conj(xi_a(t))) / std::max(1.0, std::abs(up_im));
  return std::max({r1, r2, r3});
}

cplx surface_eval(const std::vector<QuadraticSection>& ps, cplx x, cplx y, cplx z, cplx a,
                  cplx b) {
  cplx prod(1, 0);
  for (const auto& p : ps) prod *= (z - p.eval(a, b));
  return x * y - prod;
}

std::pair<cplx, cplx> theta_by_division(const LinePolynomials& line, cplx t, cplx z) {
  // dividend P(z) - P(zeta) with P(w) = prod (w - p_j(t)); divide by (z - zeta)
  const std::size_t s = line.section.ps.size();
  std::vector<cplx> coef(s + 1, cplx(0));
  coef[0] = 1;  // leading
  std::size_t deg = 0;
  for (const auto& p : line.section.ps) {
    const cplx w = p.affine(t);
    ++deg;
    for (std::size_t k = deg; k >= 1; --k) coef[k] = (k < deg ? coef[k] : cplx(0)) - w * coef[k - 1];
  }
  const cplx ze = line.zeta_b(t);
  cplx pzeta(0);
  for (std::size_t k = 0; k <= s; ++k) pzeta = pzeta * ze + coef[k];
  std::vector<cplx> dividend = coef;
  dividend[s] -= pzeta;  // subtract the constant P(zeta)
  // synthetic division by (z - ze)
  cplx acc(0), val(0);
  std::vector<cplx> quot(s, cplx(0));
  acc = dividend[0];
  for (std::size_t k = 0; k < s; ++k) {
    quot[k] = acc;
    acc = acc * ze + dividend[k + 1];
  }
  const cplx remainder = acc;
  val = 0;
  for (std::size_t k = 0; k < s; ++k) val = val * z + quot[k];
  return {val, remainder};
}

GluingData theta_and_gluing(const LinePolynomials& line, cplx t, cplx x, cplx y, cplx z) {
  GluingData gd;
  const cplx ze = line.zeta_b(t);
  const cplx xi = line.xi_b(t), up = line.ups_b(t);
  gd.f = x - xi;
  gd.g = y - up;
  gd.h = z - ze;
  auto [theta, rem] = theta_by_division(line, t, z);
  gd.theta = theta;
  if (std::abs(rem) > 1e-8 * std::max(1.0, std::abs(theta)))
    throw DivisionRemainderNonzero("theta division left a nonzero remainder");
  if (std::abs(up) < 1e-300) throw DegenerateDirection("gluing matrix: upsilon vanishes");
  gd.M[0][0] = -x / up;
  gd.M[0][1] = theta / up;
  gd.M[1][0] = -gd.h / up;
  gd.M[1][1] = y / up;
  gd.det = gd.M[0][0] * gd.M[1][1] - gd.M[0][1] * gd.M[1][0];
  // f = (-x/ups) g + (theta/ups) h ;  h = (-h/ups) g + (y/ups) h
  const cplx id1 = gd.f - (gd.M[0][0] * gd.g + gd.M[0][1] * gd.h);
  const cplx id2 = gd.h - (gd.M[1][0] * gd.g + gd.M[1][1] * gd.h);
  gd.identity_residual = std::max(std::abs(id1), std::abs(id2)) /
                         std::max({1.0, std::abs(gd.f), std::abs(gd.h)});
  return gd;
}

double s1_equivariance(const RealTwistorSection& section, double tau, int n_samples,
                       unsigned seed) {
  RealTwistorSection rotated = section;
  rotated.A = section.A * std::exp(cplx(0, tau));
  const LinePolynomials l0 = real_line(section);
  const LinePolynomials l1 = real_line(rotated);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(-1.2, 1.2);
  double worst = 0;
  const cplx phase = std::exp(cplx(0, tau));
  for (int i = 0; i < n_samples; ++i) {
    const cplx t(U(rng), U(rng));
    const cplx z(U(rng), U(rng));
    cplx prod(1, 0);
    for (const auto& p : section.ps) prod *= (z - p.affine(t));
    cplx x(U(rng) + 2.0, U(rng));  // bounded away from 0
    const cplx y = prod / x;
    const auto M0 = theta_and_gluing(l0, t, x, y, z);
    const auto M1 = theta_and_gluing(l1, t, x, y, z);
    for (int rr = 0; rr < 2; ++rr)
      for (int cc = 0; cc < 2; ++cc)
        worst = std::max(worst, std::abs(M1.M[rr][cc] - phase * M0.M[rr][cc]));
  }
  return worst;
}

std::vector<ExceptionalDirection> exceptional_directions(const geom::NutConfiguration& cfg) {
  cfg.validate();
  std::vector<QuadraticSection> ps;
  for (const auto& q : cfg.points) ps.push_back(QuadraticSection::from_point(q));
  std::vector<ExceptionalDirection> out;
  for (std::size_t i = 0; i < ps.size(); ++i)
    for (std::size_t j = i + 1; j < ps.size(); ++j) {
      const cplx da = ps[i].alpha - ps[j].alpha;
      const double db = ps[i].beta - ps[j].beta;
      if (std::abs(da) < 1e-14 && std::abs(db) < 1e-14)
        throw NonGenericConfiguration("coincident NUT projections");
      ExceptionalDirection d1, d2;
      d1.i = d2.i = int(i);
      d1.j = d2.j = int(j);
      if (std::abs(da) < 1e-14) {
        // (p_i - p_j)(a,b) = 2 db a b: roots [0:1] and [1:0]
        d1.a = 0; d1.b = 1;
        d2.a = 1; d2.b = 0;
        d1.direction = direction_of(cplx(0));
        d2.direction = Vec3{-1, 0, 0};
      } else {
        const double D = std::sqrt(db * db + std::norm(da));
        const cplx t1 = (-db - D) / da, t2 = (-db + D) / da;
        d1.a = t1; d1.b = 1;
        d2.a = t2; d2.b = 1;
        d1.direction = direction_of(t1);
        d2.direction = direction_of(t2);
      }
      out.push_back(d1);
      out.push_back(d2);
    }
  return out;
}

// ---------------------------------------------------------------------------
// Exact Gaussian-rational division
// ---------------------------------------------------------------------------

namespace {
using Rat = boost::multiprecision::cpp_rational;

struct CQ {
  Rat re, im;
  CQ operator+(const CQ& o) const { return {re + o.re, im + o.im}; }
  CQ operator-(const CQ& o) const { return {re - o.re, im - o.im}; }
  CQ operator*(const CQ& o) const {
    return {re * o.re - im * o.im, re * o.im + im * o.re};
  }
  bool is_zero() const { return re == 0 && im == 0; }
};
}  // namespace

bool theta_division_exact_zero(int s, unsigned seed) {
  std::mt19937_64 rng(seed);
  auto rat = [&]() {
    const long num = long(rng() % 41) - 20;
    const long den = 1 + long(rng() % 7);
    return Rat(num, den);
  };
  auto rc = [&]() { return CQ{rat(), rat()}; };
  // rational sections p_j(t) evaluated at a rational t; rational zeta value
  const CQ t = rc();
  std::vector<CQ> pvals;
  for (int j = 0; j < s; ++j) {
    // alpha a^2 + 2 beta ab - conj(alpha) b^2 at (t, 1), all entries rational
    const CQ al = rc();
    const Rat be = rat();
    const CQ albar{al.re, -al.im};
    const CQ two_be{2 * be, Rat(0)};
    pvals.push_back(al * t * t + two_be * t - albar);
  }
  const CQ alz = rc();
  const Rat bez = rat();
  const CQ albarz{alz.re, -alz.im};
  const CQ zeta = alz * t * t + CQ{2 * bez, Rat(0)} * t - albarz;

  // coefficients of P(z) = prod (z - pvals[j])
  std::vector<CQ> coef(std::size_t(s) + 1, CQ{Rat(0), Rat(0)});
  coef[0] = CQ{Rat(1), Rat(0)};
  std::size_t deg = 0;
  for (int j = 0; j < s; ++j) {
    ++deg;
    for (std::size_t k = deg; k >= 1; --k) {
      const CQ prev = (k < deg) ? coef[k] : CQ{Rat(0), Rat(0)};
      coef[k] = prev - pvals[j] * coef[k - 1];
    }
  }
  // P(zeta) by Horner
  CQ pz{Rat(0), Rat(0)};
  for (std::size_t k = 0; k <= std::size_t(s); ++k) pz = pz * zeta + coef[k];
  std::vector<CQ> dividend = coef;
  dividend[std::size_t(s)] = dividend[std::size_t(s)] - pz;
  // synthetic division by (z - zeta): remainder must vanish identically
  CQ acc = dividend[0];
  for (std::size_t k = 0; k < std::size_t(s); ++k) acc = acc * zeta + dividend[k + 1];
  return acc.is_zero();
}

}  // namespace nutgauge::twistor
