// nutgauge: batch front end for the multi-Taub-NUT instanton toolkit.
// Reads a JSON config, dispatches to the library, writes JSON or CSV.
// Exit codes: 0 pass, 1 tolerance failure, 2 usage/config error.

#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "nutgauge/config.hpp"
#include "nutgauge/gauge.hpp"
#include "nutgauge/harmonic.hpp"
#include "nutgauge/moduli.hpp"
#include "nutgauge/twistor.hpp"

using json = nlohmann::json;
using namespace nutgauge;
using cli::format_double;
using cli::RunConfig;

namespace {

struct Output {
  json results;
  std::vector<std::string> csv_header;
  std::vector<std::vector<double>> csv_rows;
  bool pass = true;
};

std::unique_ptr<gauge::InstantonProblem> make_problem(const RunConfig& rc) {
  switch (rc.family) {
    case cli::Family::Caloron: {
      std::vector<gauge::CaloronProblem::Source> src;
      for (const auto& s : rc.sources) src.push_back({s.y, s.tau, s.lambda});
      if (src.empty()) src.push_back({{0, 0, 0}, 0.0, rc.lambda});
      return std::make_unique<gauge::CaloronProblem>(src, rc.pure_green);
    }
    case cli::Family::Collapsed:
      return std::make_unique<gauge::CollapsedNutProblem>(rc.lens_s, rc.lambda, rc.pure_green);
    case cli::Family::Bpst:
      return std::make_unique<gauge::FlatR4Problem>(rc.lambda);
  }
  throw Error("unreachable");
}

Output run_verify_geometry(const RunConfig& rc) {
  Output out;
  geom::GhSpace gh = rc.geometry.points.empty() ? geom::GhSpace::flat()
                                                : geom::GhSpace::from_config(rc.geometry);
  std::mt19937_64 rng(rc.seed);
  std::uniform_real_distribution<double> U(-1, 1), Ut(0, 2 * kPi);
  const double tol_ortho = rc.tol("orthonormality", 1e-12);
  const double tol_monopole = rc.tol("monopole", 1e-6);
  const double tol_cartan = rc.tol("cartan", 1e-8);
  double max_ortho = 0, max_mono = 0, max_cartan = 0, max_kahler = 0;
  int accepted = 0;
  while (accepted < 60) {
    Vec3 x{4 * U(rng), 4 * U(rng), 4 * U(rng)};
    if (!gh.centers().empty() && gh.min_center_distance(x) < 0.3) continue;
    if (x[0] * x[0] + x[1] * x[1] < 0.05) continue;
    bool off_axis = true;
    for (const auto& q : gh.centers()) {
      const Vec3 d = x - q;
      if (d[0] * d[0] + d[1] * d[1] < 0.05) off_axis = false;
    }
    if (!off_axis) continue;
    ++accepted;
    geom::ChartPoint p{x, Ut(rng)};
    const auto fd = gh.frame_at(p);
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b) {
        double g = 0;
        for (int m = 0; m < 4; ++m)
          for (int n = 0; n < 4; ++n) g += fd.metric[m][n] * fd.frame[a][m] * fd.frame[b][n];
        max_ortho = std::max(max_ortho, std::abs(g - (a == b ? 1.0 : 0.0)));
      }
    if (!gh.centers().empty()) {
      // d alpha vs *3 dV: alpha differentiated by finite differences
      const double hh = 1e-5;
      const Vec3 dV = gh.potential_grad(x);
      for (int i = 0; i < 3; ++i)
        for (int k = i + 1; k < 3; ++k) {
          Vec3 xp = x, xm = x;
          xp[i] += hh;
          xm[i] -= hh;
          const double d_i_ak = (gh.monopole_potential(xp)[k] - gh.monopole_potential(xm)[k]) / (2 * hh);
          xp = x; xm = x;
          xp[k] += hh;
          xm[k] -= hh;
          const double d_k_ai = (gh.monopole_potential(xp)[i] - gh.monopole_potential(xm)[i]) / (2 * hh);
          const int l = 3 - i - k;  // epsilon_{ikl}
          const double sign = ((i == 0 && k == 1) || (i == 1 && k == 2)) ? 1.0 : -1.0;
          max_mono = std::max(max_mono, std::abs(d_i_ak - d_k_ai - sign * dV[l]));
        }
      max_cartan = std::max(max_cartan, gh.cartan_residual(p, gh.levi_civita(p)));
      max_kahler = std::max(max_kahler, gh.kahler_form_closure(Vec3{U(rng), U(rng), 1 + U(rng)}, p));
    }
  }
  out.results["max_orthonormality_defect"] = max_ortho;
  out.results["max_monopole_residual"] = max_mono;
  out.results["max_cartan_residual"] = max_cartan;
  out.results["max_kahler_closure"] = max_kahler;

  // curvature diagnostics along a radial ray
  out.csv_header = {"r", "s_g", "weyl_plus", "ricci"};
  if (!gh.centers().empty()) {
    for (double r : {1.5, 2.0, 3.0, 5.0}) {
      geom::ChartPoint p{Vec3{r * 0.36, r * 0.48, r * 0.8}, 0.7};
      const auto d = gh.curvature_diagnostics(p, 0.01);
      out.csv_rows.push_back({r, d.scalar_curvature, d.weyl_plus_norm, d.ricci_norm});
      out.results["diagnostics"].push_back({{"r", r},
                                            {"s_g", d.scalar_curvature},
                                            {"weyl_plus", d.weyl_plus_norm},
                                            {"ricci", d.ricci_norm},
                                            {"riemann", d.riemann_norm}});
    }
  }
  out.pass = max_ortho < tol_ortho && max_mono < tol_monopole && max_cartan < tol_cartan;
  return out;
}

Output run_green_identity(const RunConfig& rc) {
  Output out;
  double spread = 0;
  const double C = harmonic::fit_flat_green_prefactor(200, rc.seed, &spread);
  std::mt19937_64 rng(rc.seed + 1);
  std::uniform_real_distribution<double> Ua(0.1, 8.0), Ub(-kPi, kPi);
  double max_rel = 0;
  const int n = 1000;
  for (int i = 0; i < n; ++i) {
    const double a = Ua(rng), b = Ub(rng);
    const double closed = harmonic::flat_green_closed(a, b, C);
    const double series = harmonic::flat_green_series_accel(a, b, rc.K);
    max_rel = std::max(max_rel, std::abs(closed - series) / series);
  }
  out.results["fitted_prefactor"] = C;
  out.results["series_forced_prefactor"] = harmonic::kFlatGreenPrefactor;
  out.results["paper_printed_prefactor"] = harmonic::kFlatGreenPaperPrefactor;
  out.results["fitted_over_printed"] = C / harmonic::kFlatGreenPaperPrefactor;
  out.results["fitted_over_series_forced"] = C / harmonic::kFlatGreenPrefactor;
  out.results["factor_two_discrepancy_note"] =
      "the closed form printed with 1/(16 pi^2) disagrees with its own image series by a factor "
      "2; the series-forced prefactor 1/(8 pi^2) is used throughout";
  out.results["max_relative_error"] = max_rel;
  out.results["fit_spread"] = spread;
  out.pass = max_rel < rc.tol("green_identity", 1e-6);
  out.csv_header = {"fitted_prefactor", "max_relative_error"};
  out.csv_rows.push_back({C, max_rel});
  return out;
}

Output run_harmonic_suite(const RunConfig& rc) {
  Output out;
  const int s = rc.lens_s;
  double max_eig = 0;
  for (int j = 0; j <= rc.j_max; ++j) {
    for (auto [k, l] : harmonic::lens_harmonic_indices(j, s)) {
      const auto Y = harmonic::lens_harmonic(j, k, l, s);
      geom::CollapsedChartPoint p{1.0, 0.9, 1.3, 1.1};
      auto fr = [&](const geom::CollapsedChartPoint& q) { return Y.eval(q).real(); };
      auto fi = [&](const geom::CollapsedChartPoint& q) { return Y.eval(q).imag(); };
      const double lr = harmonic::lens_laplacian_apply(s, fr, p, 1e-4);
      const double li = harmonic::lens_laplacian_apply(s, fi, p, 1e-4);
      const cplx Yv = Y.eval(p);
      const double res = std::abs(cplx(lr, li) + double(j * (j + 1)) * Yv);
      max_eig = std::max(max_eig, res);
    }
  }
  out.results["max_eigenrelation_residual"] = max_eig;

  // radial l=0 exactness and l=1 asymptotic fit
  std::vector<double> grid;
  for (double r = 0.2; r <= 40.0; r *= 1.15) grid.push_back(r);
  double max_l0 = 0;
  for (int j = 0; j <= rc.j_max; ++j) {
    const auto dec = harmonic::radial_solve(j, 0, s, harmonic::RadialBranch::Decaying, grid);
    const auto gro = harmonic::radial_solve(j, 0, s, harmonic::RadialBranch::Growing, grid);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      max_l0 = std::max(max_l0, std::abs(dec.value[i] - std::pow(grid[i], -j - 1)) /
                                    std::pow(grid[i], -j - 1));
      max_l0 = std::max(max_l0,
                        std::abs(gro.value[i] - std::pow(grid[i], j)) / std::pow(grid[i], j));
    }
  }
  out.results["max_l0_relative_defect"] = max_l0;

  const auto dec1 = harmonic::radial_solve(0, 1, s, harmonic::RadialBranch::Decaying, grid);
  // fit log K = -l r + p log r + const on the outer grid
  double exp_rate = 0, exp_power = 0;
  {
    std::vector<double> rs, ys;
    for (std::size_t i = 0; i < grid.size(); ++i)
      if (grid[i] > 12) {
        rs.push_back(grid[i]);
        ys.push_back(std::log(std::abs(dec1.value[i])));
      }
    // 2-parameter least squares on (r, log r)
    double a11 = 0, a12 = 0, a22 = 0, b1 = 0, b2 = 0, a01 = 0, a02 = 0, b0 = 0;
    const int n = int(rs.size());
    for (int i = 0; i < n; ++i) {
      const double x1 = rs[i], x2 = std::log(rs[i]);
      a11 += x1 * x1;
      a12 += x1 * x2;
      a22 += x2 * x2;
      a01 += x1;
      a02 += x2;
      b1 += x1 * ys[i];
      b2 += x2 * ys[i];
      b0 += ys[i];
    }
    // solve [[a11,a12,a01],[a12,a22,a02],[a01,a02,n]] (rate, power, const)
    double M[3][4] = {{a11, a12, a01, b1}, {a12, a22, a02, b2}, {a01, a02, double(n), b0}};
    for (int c = 0; c < 3; ++c) {
      int piv = c;
      for (int r2 = c + 1; r2 < 3; ++r2)
        if (std::abs(M[r2][c]) > std::abs(M[piv][c])) piv = r2;
      std::swap(M[c], M[piv]);
      for (int r2 = 0; r2 < 3; ++r2)
        if (r2 != c) {
          const double f = M[r2][c] / M[c][c];
          for (int cc = c; cc < 4; ++cc) M[r2][cc] -= f * M[c][cc];
        }
    }
    exp_rate = M[0][3] / M[0][0];
    exp_power = M[1][3] / M[1][1];
  }
  out.results["decaying_l1_exponential_rate"] = exp_rate;   // expect -l = -1
  out.results["decaying_l1_power"] = exp_power;             // expect -s l/2 - 1
  const double want_pow = -double(s) / 2 - 1;
  out.pass = max_eig < rc.tol("eigen", 1e-6) && max_l0 < rc.tol("radial_l0", 1e-12) &&
             std::abs(exp_rate + 1.0) < 0.02 && std::abs(exp_power - want_pow) < 0.02 * std::abs(want_pow);

  // sign change of higher overtones on a shell
  bool sign_changes = true;
  for (int j = 1; j <= std::min(rc.j_max, 2); ++j) {
    const auto idx = harmonic::lens_harmonic_indices(j, s);
    const auto [k, l] = idx.front();
    const auto Y = harmonic::lens_harmonic(j, k, l, s);
    double lo = 1e300, hi = -1e300;
    std::mt19937_64 rng(rc.seed + j);
    std::uniform_real_distribution<double> Ut(0, 4 * kPi / s), Up(0, 2 * kPi), Uc(-1, 1);
    for (int i = 0; i < 400; ++i) {
      geom::CollapsedChartPoint q{1.0, Ut(rng), Up(rng), std::acos(Uc(rng))};
      const double v = Y.eval(q).real() + Y.eval(q).imag();  // a real combination
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    if (!(lo < 0 && hi > 0)) sign_changes = false;
  }
  out.results["higher_overtones_change_sign"] = sign_changes;
  out.pass = out.pass && sign_changes;

  out.csv_header = {"max_eigenrelation_residual", "max_l0_relative_defect",
                    "decaying_l1_exponential_rate", "decaying_l1_power"};
  out.csv_rows.push_back({max_eig, max_l0, exp_rate, exp_power});
  return out;
}

Output run_energy(const RunConfig& rc, bool decay_only) {
  Output out;
  auto prob = make_problem(rc);
  gauge::QuadratureSpec quad;
  quad.R_max = rc.R_max;
  quad.excision = rc.epsilon;
  quad.seed = rc.seed;
  quad.fd_step = std::min(rc.h, 1e-3);

  std::vector<double> Rl;
  for (double R = rc.R_max / 4; R <= rc.R_max; R *= 1.2) Rl.push_back(R);
  const auto dec = gauge::decay_report(*prob, Rl, quad);
  const double asd =
      gauge::max_asd_residual(*prob, 40, 0.4, 0.6 * rc.R_max, rc.seed, quad.fd_step);
  out.results["decay_exponents"] = {{"a", dec.a_exponent}, {"F_l2", dec.F_exponent}};
  out.results["rapid_decay_decreasing"] = dec.rapid_decay_decreasing;
  out.results["asd_residual_max"] = asd;

  if (decay_only) {
    out.csv_header = {"R", "sup_a", "l2_tail", "sqrtR_l2_tail"};
    for (std::size_t i = 0; i < dec.R.size(); ++i)
      out.csv_rows.push_back({dec.R[i], dec.sup_a[i], dec.l2_tail[i], dec.weighted[i]});
    out.pass = asd < rc.tol("asd", 1e-5);
    return out;
  }

  const auto rep = gauge::energy(*prob, quad);
  out.results["energy"] = rep.energy_units;
  out.results["bulk"] = rep.bulk;
  out.results["tail"] = rep.tail_estimate;
  out.results["excision"] = rep.excision_estimate;
  const double expected = double(prob->sources().size());
  out.results["nearest_integer"] = std::round(rep.energy_units);
  out.results["integer_defect"] = std::abs(rep.energy_units - std::round(rep.energy_units));
  out.pass = std::abs(rep.energy_units - expected) < rc.tol("energy", 0.02 * expected) &&
             asd < rc.tol("asd", 1e-5);
  out.csv_header = {"energy", "bulk", "tail", "excision", "asd_residual_max"};
  out.csv_rows.push_back({rep.energy_units, rep.bulk, rep.tail_estimate, rep.excision_estimate, asd});
  return out;
}

Output run_build_instanton(const RunConfig& rc) {
  Output out;
  auto prob = make_problem(rc);
  std::mt19937_64 rng(rc.seed);
  std::uniform_real_distribution<double> U(-1, 1), Ut(0, 2 * kPi);
  out.csv_header = {"x1", "x2", "x3", "tau", "F_norm", "asd_residual", "density"};
  double max_asd = 0;
  int accepted = 0;
  while (accepted < 64) {
    Vec3 x{0.5 * rc.R_max * U(rng), 0.5 * rc.R_max * U(rng), 0.5 * rc.R_max * U(rng)};
    geom::ChartPoint p{x, Ut(rng)};
    if (prob->source_distance(p) < 0.3) continue;
    if (prob->gh() && prob->gh()->min_center_distance(x) < 0.3) continue;
    if (prob->gh() && x[0] * x[0] + x[1] * x[1] < 0.05) continue;
    ++accepted;
    const auto c = gauge::curvature(*prob, p, std::min(rc.h, 1e-3));
    max_asd = std::max(max_asd, c.asd_residual);
    out.csv_rows.push_back(
        {x[0], x[1], x[2], p.tau, std::sqrt(c.norm2()), c.asd_residual, c.density});
  }
  out.results["samples"] = int(out.csv_rows.size());
  out.results["asd_residual_max"] = max_asd;
  out.pass = max_asd < rc.tol("asd", 1e-5);
  return out;
}

Output run_twistor_lines(const RunConfig& rc) {
  Output out;
  if (rc.geometry.points.empty()) throw ValidationError("twistor-lines: config needs 'nuts'");
  std::vector<twistor::QuadraticSection> ps;
  for (const auto& q : rc.geometry.points) ps.push_back(twistor::QuadraticSection::from_point(q));
  std::mt19937_64 rng(rc.seed);
  std::uniform_real_distribution<double> U(-1.5, 1.5), Uarg(0, 2 * kPi);
  double max_fact = 0, max_real = 0, max_glue = 0, max_det = 0;
  for (int trial = 0; trial < 50; ++trial) {
    twistor::QuadraticSection zeta{cplx(U(rng), U(rng)), U(rng)};
    bool degenerate = false;
    for (const auto& p : ps)
      if (std::abs(zeta.alpha - p.alpha) < 1e-3) degenerate = true;
    if (degenerate) continue;
    const auto sec = twistor::RealTwistorSection::make(zeta, ps, Uarg(rng));
    const auto line = twistor::real_line(sec);
    for (int i = 0; i < 20; ++i) {
      const cplx t(U(rng), U(rng));
      if (std::abs(t) < 0.05) continue;
      max_fact = std::max(max_fact, line.factorization_residual(t));
      max_real = std::max(max_real, line.reality_residual(t));
      const cplx z(U(rng), U(rng));
      cplx prod(1, 0);
      for (const auto& p : ps) prod *= (z - p.affine(t));
      const cplx x(U(rng) + 2.0, U(rng));
      const auto gd = twistor::theta_and_gluing(line, t, x, prod / x, z);
      max_glue = std::max(max_glue, gd.identity_residual);
      const cplx want = -line.xi_b(t) / line.ups_b(t);
      max_det = std::max(max_det, std::abs(gd.det - want) / std::max(1.0, std::abs(want)));
    }
  }
  const auto ex = twistor::exceptional_directions(rc.geometry);
  out.results["factorization_residual_max"] = max_fact;
  out.results["reality_residual_max"] = max_real;
  out.results["gluing_identity_residual_max"] = max_glue;
  out.results["det_residual_max"] = max_det;
  out.results["exceptional_direction_count"] = int(ex.size());
  const std::size_t s = rc.geometry.points.size();
  out.pass = max_fact < rc.tol("factorization", 1e-9) && max_glue < rc.tol("gluing", 1e-10) &&
             max_det < rc.tol("gluing", 1e-10) && ex.size() == s * (s - 1);
  out.csv_header = {"factorization_max", "reality_max", "gluing_max", "det_max",
                    "exceptional_count"};
  out.csv_rows.push_back({max_fact, max_real, max_glue, max_det, double(ex.size())});
  return out;
}

Output run_equivariance(const RunConfig& rc) {
  Output out;
  if (rc.geometry.points.empty()) throw ValidationError("equivariance: config needs 'nuts'");
  std::vector<twistor::QuadraticSection> ps;
  for (const auto& q : rc.geometry.points) ps.push_back(twistor::QuadraticSection::from_point(q));
  std::mt19937_64 rng(rc.seed);
  std::uniform_real_distribution<double> U(-1.5, 1.5), Uarg(0, 2 * kPi);
  out.csv_header = {"tau", "deviation"};
  double worst = 0;
  for (int trial = 0; trial < 20; ++trial) {
    twistor::QuadraticSection zeta{cplx(U(rng), U(rng)), U(rng)};
    bool degenerate = false;
    for (const auto& p : ps)
      if (std::abs(zeta.alpha - p.alpha) < 1e-3) degenerate = true;
    if (degenerate) continue;
    const auto sec = twistor::RealTwistorSection::make(zeta, ps, Uarg(rng));
    const double tau = Uarg(rng);
    const double dev = twistor::s1_equivariance(sec, tau, 10, rc.seed + trial);
    worst = std::max(worst, dev);
    out.csv_rows.push_back({tau, dev});
  }
  out.results["max_deviation"] = worst;
  out.pass = worst < rc.tol("equivariance", 1e-10);
  return out;
}

Output run_moduli_sample(const RunConfig& rc) {
  Output out;
  if (rc.geometry.points.empty()) throw ValidationError("moduli-sample: config needs 'nuts'");
  std::mt19937_64 rng(rc.seed);
  std::uniform_real_distribution<double> U(-3, 3), Ut(0, 2 * kPi), Ul(0.1, 10.0);
  json arr = json::array();
  int singular = 0;
  for (int i = 0; i < 200; ++i) {
    const bool inf = (i % 4 == 0);
    const bool at_nut = (i % 7 == 0);
    moduli::ModuliPoint m =
        at_nut ? moduli::ModuliPoint::at_nut(int(rng() % rc.geometry.points.size()), Ul(rng), inf)
               : (inf ? moduli::ModuliPoint::at_infinity({Vec3{U(rng), U(rng), U(rng)}, Ut(rng)})
                      : moduli::ModuliPoint::at({Vec3{U(rng), U(rng), U(rng)}, Ut(rng)}, Ul(rng)));
    const Vec3 base = moduli::fibration(m, rc.geometry);
    const auto ft = moduli::fiber_type(base, rc.geometry);
    if (ft.kind == moduli::FiberKind::Singular) ++singular;
    const auto chart = moduli::fiber_chart(
        std::holds_alternative<geom::ChartPoint>(m.y) ? std::get<geom::ChartPoint>(m.y).tau : 0.0,
        m.lambda_infinite ? 1.0 : m.lambda, m.lambda_infinite);
    arr.push_back({{"base", {base[0], base[1], base[2]}},
                   {"lambda", m.lambda_infinite ? -1.0 : m.lambda},
                   {"lambda_infinite", m.lambda_infinite},
                   {"fiber", ft.kind == moduli::FiberKind::Singular ? "singular" : "generic"},
                   {"reducible", m.reducible(rc.geometry)},
                   {"chart", {chart[0], chart[1]}}});
  }
  // singular fiber count over the configuration scan
  int count = 0;
  for (const auto& q : rc.geometry.points)
    if (moduli::fiber_type(q, rc.geometry).kind == moduli::FiberKind::Singular) ++count;
  out.results["samples"] = arr;
  out.results["singular_fiber_count"] = count;
  out.pass = count == int(rc.geometry.points.size());
  out.csv_header = {"singular_fiber_count"};
  out.csv_rows.push_back({double(count)});
  return out;
}

std::string render_csv(const RunConfig& rc, const std::string& command, const Output& out) {
  std::ostringstream os;
  os << "# nutgauge " << command << " seed=" << rc.seed << "\n";
  for (std::size_t i = 0; i < out.csv_header.size(); ++i)
    os << (i ? "," : "") << out.csv_header[i];
  os << "\n";
  for (const auto& row : out.csv_rows) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << format_double(row[i]);
    os << "\n";
  }
  return os.str();
}

std::string render_json(const RunConfig& rc, const std::string& command, const Output& out) {
  json doc;
  doc["meta"] = {{"tool", "nutgauge"}, {"command", command}, {"seed", rc.seed},
                 {"pass", out.pass}};
  doc["results"] = out.results;
  return doc.dump(2) + "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"multi-Taub-NUT instanton toolkit"};
  std::string command, config_path, out_path, format;
  long long seed_override = -1;
  app.add_option("command", command, "subcommand to run")->required();
  app.add_option("--config", config_path, "JSON configuration file")->required();
  app.add_option("--out", out_path, "output path (default: stdout)");
  app.add_option("--format", format, "json|csv (overrides config)");
  app.add_option("--seed", seed_override, "seed override");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    std::ifstream in(config_path);
    if (!in) throw ParseError("cannot open config file: " + config_path);
    std::stringstream ss;
    ss << in.rdbuf();
    RunConfig rc = cli::parse_config(ss.str());
    rc.command = cli::parse_command(command);
    if (seed_override >= 0) rc.seed = unsigned(seed_override);
    if (!format.empty())
      rc.format = format == "csv" ? cli::OutputFormat::Csv : cli::OutputFormat::Json;
    if (!out_path.empty()) rc.out_path = out_path;

    Output out;
    switch (rc.command) {
      case cli::Command::VerifyGeometry: out = run_verify_geometry(rc); break;
      case cli::Command::GreenIdentity: out = run_green_identity(rc); break;
      case cli::Command::HarmonicSuite: out = run_harmonic_suite(rc); break;
      case cli::Command::BuildInstanton: out = run_build_instanton(rc); break;
      case cli::Command::Energy: out = run_energy(rc, false); break;
      case cli::Command::Decay: out = run_energy(rc, true); break;
      case cli::Command::TwistorLines: out = run_twistor_lines(rc); break;
      case cli::Command::Equivariance: out = run_equivariance(rc); break;
      case cli::Command::ModuliSample: out = run_moduli_sample(rc); break;
    }
    const std::string text = rc.format == cli::OutputFormat::Csv
                                 ? render_csv(rc, command, out)
                                 : render_json(rc, command, out);
    if (rc.out_path.empty()) {
      std::cout << text;
    } else {
      std::ofstream of(rc.out_path, std::ios::binary);
      if (!of) throw Error("cannot open output path: " + rc.out_path);
      of << text;
    }
    return out.pass ? 0 : 1;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 1;
  }
}
