// Acceptance suite: runs every acceptance criterion at its stated tolerance
// and prints one PASS/FAIL line per criterion. Exit code = number of failures.

#include <chrono>
#include <cstdarg>
#include <cstdio>
#include <random>
#include <vector>

#include "nutgauge/gauge.hpp"
#include "nutgauge/harmonic.hpp"
#include "nutgauge/moduli.hpp"
#include "nutgauge/twistor.hpp"

using namespace nutgauge;

namespace {

int failures = 0;

struct Timer {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }
};

void report(int id, bool pass, const char* what, const std::string& detail, double secs) {
  std::printf("%s  [%2d] %s (%s; %.1f s)\n", pass ? "PASS" : "FAIL", id, what, detail.c_str(),
              secs);
  std::fflush(stdout);
  if (!pass) ++failures;
}

std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

geom::NutConfiguration random_config(int s, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(-1.5, 1.5);
  geom::NutConfiguration cfg;
  cfg.c = 1.0;
  for (int i = 0; i < s; ++i) cfg.points.push_back({U(rng), U(rng), U(rng)});
  return cfg;
}

// --------------------------------------------------------------------------

void criterion1_flat_green() {
  Timer t;
  double spread = 0;
  const double C = harmonic::fit_flat_green_prefactor(200, 1, &spread);
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> Ua(0.05, 8.0), Ub(-kPi, kPi);
  double max_rel = 0;
  for (int i = 0; i < 1000; ++i) {
    const double a = Ua(rng), b = Ub(rng);
    const double closed = harmonic::flat_green_closed(a, b, C);
    const double series = harmonic::flat_green_series_accel(a, b, 20000);
    max_rel = std::max(max_rel, std::abs(closed - series) / series);
  }
  const double vs_printed = C / harmonic::kFlatGreenPaperPrefactor;
  const double vs_series = C / harmonic::kFlatGreenPrefactor;
  const bool pass = max_rel < 1e-6 && t.seconds() < 10.0;
  // the factor-2 discrepancy report is a required output of this criterion
  std::printf("      flat Green prefactor: fitted C = %.12g = %.6f x printed 1/(16 pi^2), "
              "%.6f x series-forced 1/(8 pi^2)\n", C, vs_printed, vs_series);
  report(1, pass, "flat Green closed form vs image series",
         fmt("max rel err %.2e over 1000 samples, fit spread %.1e", max_rel, spread), t.seconds());
}

void criterion2_geometry() {
  Timer t;
  double max_s = 0, max_wp = 0, max_mono = 0, max_kahler = 0, min_riem = 1e300;
  for (int which = 0; which < 2; ++which) {
    const geom::NutConfiguration cfg =
        which == 0 ? geom::NutConfiguration{{Vec3{0, 0, 0}}, 1.0} : random_config(3, 11);
    const geom::GhSpace gh = geom::GhSpace::from_config(cfg);
    std::mt19937_64 rng(3 + which);
    std::uniform_real_distribution<double> U(-1, 1), Ut(0, 2 * kPi);
    int done = 0;
    while (done < 100) {
      Vec3 x{5 * U(rng), 5 * U(rng), 5 * U(rng)};
      if (gh.min_center_distance(x) < 0.6) continue;
      bool off_axis = true;
      for (const auto& q : gh.centers()) {
        const Vec3 d = x - q;
        if (d[0] * d[0] + d[1] * d[1] < 0.1) off_axis = false;
      }
      if (!off_axis) continue;
      ++done;
      const geom::ChartPoint p{x, Ut(rng)};
      const auto diag = gh.curvature_diagnostics(p, 0.01);
      max_s = std::max(max_s, std::abs(diag.scalar_curvature));
      max_wp = std::max(max_wp, diag.weyl_plus_norm);
      if (norm(x) <= 5.0) min_riem = std::min(min_riem, diag.riemann_norm);

      // monopole identity by finite differences
      const Vec3 dV = gh.potential_grad(x);
      const double h = 1e-5;
      for (int a = 0; a < 3; ++a)
        for (int b = a + 1; b < 3; ++b) {
          Vec3 xp = x, xm = x;
          xp[a] += h;
          xm[a] -= h;
          const double dab =
              (gh.monopole_potential(xp)[b] - gh.monopole_potential(xm)[b]) / (2 * h);
          xp = x;
          xm = x;
          xp[b] += h;
          xm[b] -= h;
          const double dba =
              (gh.monopole_potential(xp)[a] - gh.monopole_potential(xm)[a]) / (2 * h);
          const int c = 3 - a - b;
          const double sign = (a == 0 && b == 2) ? -1.0 : 1.0;
          max_mono = std::max(max_mono, std::abs(dab - dba - sign * dV[c]));
        }
      Vec3 e1{U(rng), U(rng), U(rng)};
      if (norm(e1) < 0.2) e1 = {0, 0, 1};
      max_kahler = std::max(max_kahler, gh.kahler_form_closure(e1, p));
    }
  }
  const bool pass = max_s < 1e-5 && max_wp < 1e-5 && max_mono < 1e-5 && max_kahler < 1e-5 &&
                    min_riem > 1e-2 && t.seconds() < 60.0;
  report(2, pass, "geometry identities (s=1 and random s=3)",
         fmt("|s_g| %.1e, |W+| %.1e, |da-*dV| %.1e, |dw| %.1e, |Riem|min %.2e", max_s, max_wp,
             max_mono, max_kahler, min_riem),
         t.seconds());
}

void criterion3_unital_energy() {
  Timer t;
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> U(-1.5, 1.5), Ut(0, 2 * kPi), Ul(0.5, 6.0);
  double worst = 0;
  bool pass = true;
  for (int i = 0; i < 5; ++i) {
    std::vector<gauge::CaloronProblem::Source> src = {{{U(rng), U(rng), U(rng)}, Ut(rng), Ul(rng)}};
    gauge::CaloronProblem cal(src, false);
    gauge::QuadratureSpec quad;
    quad.R_max = 20.0;
    quad.n_radial = 48;
    quad.n_sphere_polar = 8;
    quad.n_sphere_azimuth = 12;
    quad.n_tau = 20;
    const auto rep = gauge::energy(cal, quad);
    worst = std::max(worst, std::abs(rep.energy_units - 1.0));
    if (std::abs(rep.energy_units - 1.0) > 0.02) pass = false;
  }
  double col_defect = 0;
  {
    gauge::CollapsedNutProblem col(1, 5.0, false);
    gauge::QuadratureSpec quad;
    quad.R_max = 60.0;
    quad.n_radial = 56;
    quad.n_sphere_polar = 4;
    quad.n_sphere_azimuth = 8;
    quad.n_tau = 4;
    const auto rep = gauge::energy(col, quad);
    col_defect = std::abs(rep.energy_units - 1.0);
    if (col_defect > 0.02) pass = false;
  }
  pass = pass && t.seconds() < 600.0;
  report(3, pass, "unital energy (5 random calorons + collapsed NUT solution)",
         fmt("max caloron defect %.3f, collapsed defect %.3f", worst, col_defect), t.seconds());
}

void criterion4_additivity() {
  Timer t;
  std::vector<gauge::CaloronProblem::Source> src = {{{-4.0, 0.2, 0.0}, 0.5, 2.0},
                                                    {{4.0, -0.1, 0.3}, 2.0, 3.5}};
  gauge::CaloronProblem cal(src, false);
  gauge::QuadratureSpec quad;
  quad.R_max = 26.0;
  quad.n_radial = 48;
  quad.n_sphere_polar = 8;
  quad.n_sphere_azimuth = 12;
  quad.n_tau = 20;
  const auto rep = gauge::energy(cal, quad);
  const bool pass = std::abs(rep.energy_units - 2.0) < 0.04;
  report(4, pass, "energy additivity for two well-separated sources",
         fmt("energy %.4f (bulk %.4f, tail %.4f, excision %.4f)", rep.energy_units, rep.bulk,
             rep.tail_estimate, rep.excision_estimate),
         t.seconds());
}

void criterion5_asd() {
  Timer t;
  double worst = 0;
  {
    std::vector<gauge::CaloronProblem::Source> src = {{{0.3, -0.2, 0.5}, 1.1, 2.3}};
    worst = std::max(worst, gauge::max_asd_residual(gauge::CaloronProblem(src, false), 200, 0.3,
                                                    8.0, 21));
    worst = std::max(worst, gauge::max_asd_residual(gauge::CaloronProblem(src, true), 100, 0.3,
                                                    8.0, 22));
  }
  worst = std::max(worst, gauge::max_asd_residual(gauge::CollapsedNutProblem(1, 5.0, false), 100,
                                                  0.3, 8.0, 23));
  worst = std::max(worst,
                   gauge::max_asd_residual(gauge::CollapsedNutProblem(1, 1.0, true), 100, 0.3,
                                           8.0, 24));
  worst = std::max(worst, gauge::max_asd_residual(gauge::FlatR4Problem(0.8), 100, 0.3, 8.0, 25));
  const bool pass = worst < 1e-5;
  report(5, pass, "anti-self-duality residual, all constructed families incl. lambda=inf",
         fmt("max ||*F+F||/||F|| = %.2e", worst), t.seconds());
}

void criterion6_decay() {
  Timer t;
  std::vector<double> R;
  for (double r = 6; r <= 30; r *= 1.22) R.push_back(r);
  std::vector<gauge::CaloronProblem::Source> src = {{{0, 0, 0}, 0.0, 2.0}};
  const auto fin = gauge::decay_report(gauge::CaloronProblem(src, false), R);
  const auto inf = gauge::decay_report(gauge::CaloronProblem(src, true), R);
  const bool pass = fin.a_exponent > 1.8 && fin.a_exponent < 2.2 && inf.a_exponent > 0.9 &&
                    inf.a_exponent < 1.1 && fin.rapid_decay_decreasing;
  report(6, pass, "decay exponents and rapid-decay functional",
         fmt("p_a(finite) %.3f, p_a(inf) %.3f, sqrt(R)||F|| decreasing(finite) %s, (inf) %s",
             fin.a_exponent, inf.a_exponent, fin.rapid_decay_decreasing ? "yes" : "no",
             inf.rapid_decay_decreasing ? "yes" : "no"),
         t.seconds());
}

void criterion7_harmonic() {
  Timer t;
  double max_eig = 0;
  geom::CollapsedChartPoint p{1.0, 0.9, 1.3, 1.1};
  for (int s : {1, 2, 3})
    for (int j = 0; j <= 3; ++j)
      for (auto [k, l] : harmonic::lens_harmonic_indices(j, s)) {
        const auto Y = harmonic::lens_harmonic(j, k, l, s);
        auto fr = [&](const geom::CollapsedChartPoint& q) { return Y.eval(q).real(); };
        auto fi = [&](const geom::CollapsedChartPoint& q) { return Y.eval(q).imag(); };
        const cplx lap(harmonic::lens_laplacian_apply(s, fr, p, 1e-4),
                       harmonic::lens_laplacian_apply(s, fi, p, 1e-4));
        max_eig = std::max(max_eig, std::abs(lap + double(j * (j + 1)) * Y.eval(p)));
      }

  double max_l0 = 0;
  std::vector<double> grid;
  for (double r = 0.2; r < 30; r *= 1.2) grid.push_back(r);
  for (int j = 0; j <= 3; ++j) {
    const auto dec = harmonic::radial_solve(j, 0, 1, harmonic::RadialBranch::Decaying, grid);
    const auto gro = harmonic::radial_solve(j, 0, 1, harmonic::RadialBranch::Growing, grid);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      max_l0 = std::max(max_l0, std::abs(dec.value[i] * std::pow(grid[i], j + 1) - 1.0));
      max_l0 = std::max(max_l0, std::abs(gro.value[i] / std::pow(grid[i], j) - 1.0));
    }
  }

  // l = 1 large-r laws for s in {1, 2}
  bool exponents_ok = true;
  std::string expo_detail;
  for (int s : {1, 2}) {
    std::vector<double> g2;
    for (double r = 0.5; r < 42; r *= 1.1) g2.push_back(r);
    const auto dec = harmonic::radial_solve(0, 1, s, harmonic::RadialBranch::Decaying, g2);
    const auto gro = harmonic::radial_solve(0, 1, s, harmonic::RadialBranch::Growing, g2);
    // fit log K = rate r + pow log r + c on r > 15
    auto fit = [&](const harmonic::RadialSolution& K) {
      double A[3][4] = {};
      for (std::size_t i = 0; i < g2.size(); ++i)
        if (g2[i] > 15) {
          const double v[3] = {g2[i], std::log(g2[i]), 1.0};
          const double y = std::log(std::abs(K.value[i]));
          for (int a = 0; a < 3; ++a) {
            for (int b = 0; b < 3; ++b) A[a][b] += v[a] * v[b];
            A[a][3] += v[a] * y;
          }
        }
      for (int c = 0; c < 3; ++c)
        for (int r2 = 0; r2 < 3; ++r2)
          if (r2 != c) {
            const double f = A[r2][c] / A[c][c];
            for (int cc = 0; cc < 4; ++cc) A[r2][cc] -= f * A[c][cc];
          }
      return std::pair<double, double>{A[0][3] / A[0][0], A[1][3] / A[1][1]};
    };
    const auto [rate_d, pow_d] = fit(dec);
    const auto [rate_g, pow_g] = fit(gro);
    const double want_d = -double(s) / 2 - 1, want_g = double(s) / 2 - 1;
    if (std::abs(rate_d + 1) > 0.02 || std::abs(rate_g - 1) > 0.02) exponents_ok = false;
    if (std::abs(pow_d - want_d) > 0.02 * std::abs(want_d)) exponents_ok = false;
    if (std::abs(want_g) > 1e-9 && std::abs(pow_g - want_g) > 0.02 * std::abs(want_g))
      exponents_ok = false;
    if (std::abs(want_g) < 1e-9 && std::abs(pow_g) > 0.02) exponents_ok = false;
    expo_detail += fmt(" s=%d:(%.3f,%.3f|%.3f,%.3f)", s, rate_d, pow_d, rate_g, pow_g);
  }

  // every j > 0 harmonic changes sign on sampled shells
  bool signs = true;
  std::mt19937_64 rng(7);
  for (int s : {1, 2, 3})
    for (int j = 1; j <= 3; ++j)
      for (auto [k, l] : harmonic::lens_harmonic_indices(j, s)) {
        const auto Y = harmonic::lens_harmonic(j, k, l, s);
        std::uniform_real_distribution<double> Ut(0, 4 * kPi / s), Up(0, 2 * kPi), Uc(-1, 1);
        double lo = 1e300, hi = -1e300;
        for (int i = 0; i < 600; ++i) {
          geom::CollapsedChartPoint q{1.0, Ut(rng), Up(rng), std::acos(Uc(rng))};
          const double v = Y.eval(q).real();
          lo = std::min(lo, v);
          hi = std::max(hi, v);
        }
        if (!(lo < 0 && hi > 0)) signs = false;
      }

  const bool pass = max_eig < 1e-6 && max_l0 < 1e-12 && exponents_ok && signs;
  report(7, pass, "harmonic suite (lens eigenrelation, radial laws, overtone signs)",
         fmt("eig %.1e, l0 %.1e, exponents%s, signs %s", max_eig, max_l0, expo_detail.c_str(),
             signs ? "ok" : "FAIL"),
         t.seconds());
}

void criterion8_twistor() {
  Timer t;
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> U(-1.5, 1.5), Uarg(0, 2 * kPi);
  double max_fact = 0, max_glue = 0, max_det = 0, max_equiv = 0;
  bool division_ok = true;
  for (int trial = 0; trial < 50; ++trial) {
    const int s = 1 + trial % 3;
    std::vector<twistor::QuadraticSection> ps;
    for (int i = 0; i < s; ++i) ps.push_back({cplx(U(rng), U(rng)), U(rng)});
    twistor::QuadraticSection zeta{cplx(U(rng), U(rng)), U(rng)};
    bool degenerate = false;
    for (const auto& p : ps)
      if (std::abs(zeta.alpha - p.alpha) < 0.05) degenerate = true;
    if (degenerate) continue;
    const auto sec = twistor::RealTwistorSection::make(zeta, ps, Uarg(rng));
    const auto line = twistor::real_line(sec);
    for (int i = 0; i < 100; ++i) {
      const cplx tt(U(rng), U(rng));
      if (std::abs(tt) < 0.05) continue;
      max_fact = std::max(max_fact, line.factorization_residual(tt));
    }
    for (int i = 0; i < 10; ++i) {
      const cplx tt(U(rng), U(rng));
      if (std::abs(tt) < 0.05) continue;
      const cplx z(U(rng), U(rng));
      cplx prod(1, 0);
      for (const auto& p : ps) prod *= (z - p.affine(tt));
      const cplx x(U(rng) + 2.0, U(rng));
      const auto gd = twistor::theta_and_gluing(line, tt, x, prod / x, z);
      max_glue = std::max(max_glue, gd.identity_residual);
      const cplx want = -line.xi_b(tt) / line.ups_b(tt);
      max_det = std::max(max_det, std::abs(gd.det - want) / std::max(1.0, std::abs(want)));
    }
  }
  for (int s : {1, 2, 3, 4})
    for (unsigned seed : {1u, 2u, 3u})
      if (!twistor::theta_division_exact_zero(s, seed)) division_ok = false;

  for (int pair = 0; pair < 20; ++pair) {
    const int s = 1 + pair % 3;
    std::vector<twistor::QuadraticSection> ps;
    for (int i = 0; i < s; ++i) ps.push_back({cplx(U(rng), U(rng)), U(rng)});
    twistor::QuadraticSection zeta{cplx(U(rng) + 2.0, U(rng)), U(rng)};
    const auto sec = twistor::RealTwistorSection::make(zeta, ps, Uarg(rng));
    max_equiv = std::max(max_equiv, twistor::s1_equivariance(sec, Uarg(rng), 10, 100 + pair));
  }

  bool counts_ok = true;
  for (int s : {2, 3, 4}) {
    const auto ex = twistor::exceptional_directions(random_config(s, 40 + s));
    if (ex.size() != std::size_t(s) * (s - 1)) counts_ok = false;
  }

  const bool pass = max_fact < 1e-9 && division_ok && max_glue < 1e-10 && max_det < 1e-10 &&
                    max_equiv < 1e-10 && counts_ok;
  report(8, pass, "twistor suite (factorization, division, gluing, equivariance, counts)",
         fmt("fact %.1e, glue %.1e, det %.1e, equiv %.1e, division %s, counts %s", max_fact,
             max_glue, max_det, max_equiv, division_ok ? "exact" : "FAIL",
             counts_ok ? "ok" : "FAIL"),
         t.seconds());
}

void criterion9_moduli() {
  Timer t;
  const auto cfg = random_config(3, 9);
  std::mt19937_64 rng(10);
  std::uniform_real_distribution<double> U(-2, 2), Ut(0, 2 * kPi), Ul(0.05, 12.0);
  std::vector<moduli::ModuliPoint> pts;
  for (int i = 0; i < 10000; ++i) {
    const int kind = i % 5;
    Vec3 x{U(rng), U(rng), U(rng)};
    if (kind == 3) x = cfg.points[std::size_t(i) % 3];
    pts.push_back(kind == 0 ? moduli::ModuliPoint::at_infinity({x, Ut(rng)})
                            : moduli::ModuliPoint::at({x, Ut(rng)}, Ul(rng)));
  }
  bool ok = true;
  for (int i = 0; i < 10000; ++i)
    if (!moduli::are_equivalent(pts[std::size_t(i)], pts[std::size_t(i)], cfg)) ok = false;
  for (int i = 0; i < 10000; ++i) {
    const auto &a = pts[rng() % pts.size()], &b = pts[rng() % pts.size()];
    if (moduli::are_equivalent(a, b, cfg) != moduli::are_equivalent(b, a, cfg)) ok = false;
  }
  int checked = 0;
  for (int i = 0; i < 200000 && checked < 10000; ++i) {
    const auto &a = pts[rng() % pts.size()], &b = pts[rng() % pts.size()],
               &c = pts[rng() % pts.size()];
    if (moduli::are_equivalent(a, b, cfg)) {
      ++checked;
      if (moduli::are_equivalent(b, c, cfg) && !moduli::are_equivalent(a, c, cfg)) ok = false;
      // well-definedness of the fibration on classes
      if (norm(moduli::fibration(a, cfg) - moduli::fibration(b, cfg)) > 1e-12) ok = false;
    }
  }
  int singular = 0;
  for (const auto& q : cfg.points)
    if (moduli::fiber_type(q, cfg).kind == moduli::FiberKind::Singular) ++singular;
  if (singular != int(cfg.points.size())) ok = false;

  // chart injectivity over 10^4 samples
  for (int i = 0; i < 10000; ++i) {
    const double t1 = Ut(rng), l1 = Ul(rng), t2 = Ut(rng), l2 = Ul(rng);
    const auto c1 = moduli::fiber_chart(t1, l1, false), c2 = moduli::fiber_chart(t2, l2, false);
    const bool same_in = std::abs(t1 - t2) < 1e-12 && std::abs(l1 - l2) < 1e-12;
    const bool same_out = std::abs(c1[0] - c2[0]) < 1e-14 && std::abs(c1[1] - c2[1]) < 1e-14;
    if (same_out && !same_in) ok = false;
  }
  report(9, ok, "moduli model (equivalence axioms, fibration, fibers, chart)",
         fmt("%d singular fibers over s=3 scan", singular), t.seconds());
}

void criterion10_volume() {
  Timer t;
  const geom::GhSpace tn = geom::GhSpace::from_config({{Vec3{0, 0, 0}}, 1.0});
  const auto rows = tn.volume_growth({0, 0, 0}, {50.0});
  const double target = 8 * kPi * kPi / 3;
  const double rel = std::abs(rows[0].second - target) / target;
  report(10, rel < 0.05, "ALF volume growth Vol(B_R)/R^3 at R = 50",
         fmt("ratio %.4f vs 8 pi^2/3 = %.4f (rel dev %.3f)", rows[0].second, target, rel),
         t.seconds());
}

}  // namespace

int main() {
  std::printf("nutgauge acceptance suite\n");
  criterion1_flat_green();
  criterion2_geometry();
  criterion3_unital_energy();
  criterion4_additivity();
  criterion5_asd();
  criterion6_decay();
  criterion7_harmonic();
  criterion8_twistor();
  criterion9_moduli();
  criterion10_volume();
  std::printf("%d criteria failed\n", failures);
  return failures;
}
