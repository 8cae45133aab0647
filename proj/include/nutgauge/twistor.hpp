#pragma once

#include <complex>
#include <vector>

#include "nutgauge/core.hpp"
#include "nutgauge/geometry.hpp"

namespace nutgauge::twistor {

/// Real section of O(2) over CP^1: z([a:b]) = alpha a^2 + 2 beta ab - conj(alpha) b^2.
/// Corresponds to a point of R^3 via alpha = -x2 + i x3, beta = -x1.
struct QuadraticSection {
  cplx alpha{};
  double beta = 0;

  cplx eval(cplx a, cplx b) const { return alpha * a * a + 2.0 * beta * a * b - std::conj(alpha) * b * b; }
  cplx affine(cplx t) const { return eval(t, cplx(1)); }  // U_b chart value
  static QuadraticSection from_point(const Vec3& q) { return {cplx(-q[1], q[2]), -q[0]}; }
  Vec3 to_point() const { return {-beta, -alpha.real(), alpha.imag()}; }
};

/// General degree-2 section c2 a^2 + c1 ab + c0 b^2 and the real structure
/// r(z) = conj(z o sigma) with sigma(a,b) = (conj b, -conj a). The point
/// sections are exactly the fixed points of -r, i.e. the (alpha, 2beta, -conj alpha)
/// coefficient pattern with beta real.
struct GeneralSection {
  cplx c2{}, c1{}, c0{};
  GeneralSection r_transform() const { return {std::conj(c0), -std::conj(c1), std::conj(c2)}; }
  cplx eval(cplx a, cplx b) const { return c2 * a * a + c1 * a * b + c0 * b * b; }
};
inline GeneralSection as_general(const QuadraticSection& q) {
  return {q.alpha, 2.0 * q.beta, -std::conj(q.alpha)};
}

/// Point of S^2 corresponding to [t:1] under inverse stereographic projection.
Vec3 direction_of(cplx t);

struct RootPair {
  cplx rho, sigma;  // rho: minus branch, sigma: plus branch of the sqrt
};
/// Roots of zeta - p_j = 0 in the affine coordinate t = a/b, closed forms
/// with the non-negative real square root. Throws DegenerateDirection when
/// alpha = alpha_j.
RootPair roots(const QuadraticSection& zeta, const QuadraticSection& pj);

enum class Chart { Ua, Ub };

/// The nowhere vanishing section eta^c of L^c along the section zeta,
/// in the chart's trivialization.
cplx eta_section(const QuadraticSection& zeta, double c, cplx a, cplx b, Chart chart);

/// Real twistor section data (alpha, beta, A). |A| is pinned by the reality
/// constraint |A|^2 = prod_j (sqrt((beta-beta_j)^2 + |alpha-alpha_j|^2) - (beta-beta_j));
/// only arg A is free, sweeping the isometry circle. (The paper prints the
/// Galois-conjugate product with + signs, which equals |B|^2; the two are
/// swapped by relabeling every root pair.)
struct RealTwistorSection {
  QuadraticSection zeta;
  cplx A{1, 0};
  std::vector<QuadraticSection> ps;

  cplx B() const;  // from A B = prod (alpha - alpha_j)
  static double reality_modulus_squared(const QuadraticSection& zeta,
                                        const std::vector<QuadraticSection>& ps);
  static double paper_modulus_squared(const QuadraticSection& zeta,
                                      const std::vector<QuadraticSection>& ps);
  static RealTwistorSection make(const QuadraticSection& zeta,
                                 const std::vector<QuadraticSection>& ps, double arg_A);
  void validate(double tol = 1e-9) const;
};

/// The real line (xi, upsilon, zeta) attached to a RealTwistorSection,
/// with all evaluators in the U_b trivialization (t = a/b).
struct LinePolynomials {
  RealTwistorSection section;
  double c = 1.0;
  std::vector<cplx> rhos, sigmas;

  cplx zeta_b(cplx t) const { return section.zeta.affine(t); }
  cplx xi_b(cplx t) const;
  cplx ups_b(cplx t) const;
  cplx xi_a(cplx t) const;   // U_a trivialization of the L^c factor
  cplx ups_a(cplx t) const;

  /// on-surface identity: xi ups - prod(zeta - p_j), relative
  double factorization_residual(cplx t) const;
  /// pointwise tau_c-invariance of the line (three slot identities), relative
  double reality_residual(cplx t) const;
};

LinePolynomials real_line(const RealTwistorSection& section, double c = 1.0);

/// theta = (xy - xi ups)/h by polynomial division in z (exact division:
/// the remainder vanishes identically), and the gluing matrix
/// M = (1/ups) [[-x, theta], [-h, y]].
struct GluingData {
  cplx M[2][2]{};
  cplx theta = 0;
  cplx f = 0, g = 0, h = 0;          // x - xi, y - ups, z - zeta at the point
  double identity_residual = 0;       // the two displayed linear identities
  cplx det = 0;                       // must equal -xi/ups
};

GluingData theta_and_gluing(const LinePolynomials& line, cplx t, cplx x, cplx y, cplx z);

/// theta value by synthetic division of prod(z - p_j(t)) - prod(zeta - p_j)(t)
/// by (z - zeta(t)); also returns the division remainder (0 up to rounding).
std::pair<cplx, cplx> theta_by_division(const LinePolynomials& line, cplx t, cplx z);

/// Max |M_{e^{i tau} A} - e^{i tau} M_A| over random on-surface samples.
/// (The transition matrix picks up e^{+i tau} for A -> e^{i tau} A since its
/// prefactor is 1/upsilon and B -> e^{-i tau} B; the printed law with the
/// opposite exponent is the same statement for the inverse matrix.)
double s1_equivariance(const RealTwistorSection& section, double tau, int n_samples,
                       unsigned seed);

struct ExceptionalDirection {
  int i = 0, j = 0;   // NUT pair
  cplx a, b;          // homogeneous direction [a:b]
  Vec3 direction;     // unit vector in R^3
};

/// Directions e_1 for which some p_i([a:b]) = p_j([a:b]): one quadratic per
/// pair, s(s-1) roots total for generic configurations.
std::vector<ExceptionalDirection> exceptional_directions(const geom::NutConfiguration& cfg);

/// Surface residual x y - prod_j (z - p_j([a:b])) at a normalized [a:b].
cplx surface_eval(const std::vector<QuadraticSection>& ps, cplx x, cplx y, cplx z, cplx a,
                  cplx b);

// ---------------------------------------------------------------------------
// Exact arithmetic layer (Gaussian rationals) for the division theorem
// ---------------------------------------------------------------------------

/// Runs the theta polynomial division over exact Gaussian-rational arithmetic
/// for a random configuration with rational data; returns true iff the
/// remainder is identically zero. Denominators and seeds are small integers.
bool theta_division_exact_zero(int s, unsigned seed);

}  // namespace nutgauge::twistor
