// Acceptance suite: runs each acceptance criterion at its stated tolerance
// and prints one pass/fail line per criterion.  Exit code is the number of
// failed criteria.

#include "normground/fiber.hpp"
#include "normground/json_io.hpp"
#include "normground/landscape.hpp"
#include "normground/scalar.hpp"
#include "normground/solver.hpp"
#include "oracles.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace normground;

namespace {

int failures = 0;

void report(int number, const std::string& name, bool pass, const std::string& detail) {
  std::printf("[%s] criterion %2d: %s  (%s)\n", pass ? "PASS" : "FAIL", number, name.c_str(),
              detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

ProblemParams mixed_instance() {
  ProblemParams p;
  p.N = 3;
  p.p = 2.5;
  p.q = 4.0;
  p.r1 = 1.5;
  p.r2 = 1.5;
  p.mu1 = p.mu2 = 1.0;
  p.beta = 1.0;
  p.a1 = 0.7;  // masses scaled below the effective threshold
  p.a2 = 0.1;
  return p;
}

ProblemParams super_instance(double beta) {
  ProblemParams p;
  p.N = 3;
  p.p = 4.0;
  p.q = 4.0;
  p.r1 = 1.9;
  p.r2 = 1.9;
  p.mu1 = p.mu2 = 1.0;
  p.beta = beta;
  p.a1 = p.a2 = 3.0;
  return p;
}

StatePair gaussian_pair(GridPtr g, double wu, double wv, double a1, double a2) {
  Eigen::ArrayXd u = (-g->r.square() / (2.0 * wu * wu)).exp();
  Eigen::ArrayXd v = (-g->r.square() / (2.0 * wv * wv)).exp();
  u[g->n - 1] = v[g->n - 1] = 0.0;
  return StatePair(normalize_mass(RadialField(g, std::move(u)), a1),
                   normalize_mass(RadialField(g, std::move(v)), a2));
}

void criterion_1_scalar_consistency() {
  const auto t0 = std::chrono::steady_clock::now();
  auto grid = RadialGrid::make(3, 40.0, 4096);
  const ScalarGroundState gs = solve_unit_scalar(3, 4.0, grid);
  const double wall = seconds_since(t0);
  std::ostringstream d;
  d << "pohozaev=" << gs.pohozaev_residual << " gn=" << gs.gn_residual << " wall=" << wall
    << "s";
  report(1, "scalar consistency N=3 p=4", gs.pohozaev_residual < 1e-4 && gs.gn_residual < 1e-4
                                              && wall < 2.0,
         d.str());
}

void criterion_2_scaling_law() {
  auto grid = RadialGrid::make(3, 60.0, 8192);
  bool ok = true;
  double worst = 0.0;
  for (double p : {2.5, 4.0}) {
    const ScalarGroundState gs = solve_unit_scalar(3, p, grid);
    const double a_base = (p < 10.0 / 3.0) ? 6.0 : 4.0;
    double prev_level = std::numeric_limits<double>::infinity();
    for (double afac : {0.7, 1.0, 1.4}) {
      for (double mu : {0.8, 1.0, 1.3}) {
        const double a = a_base * afac;
        const NormalizedScalarSolution sol = normalized_scalar(gs, mu, a);
        const double lvl = scalar_level(gs, mu, a);
        const double rel = std::abs(sol.energy - lvl) / std::abs(sol.energy);
        worst = std::max(worst, rel);
        ok = ok && rel < 1e-4;
      }
      const double lvl_a = scalar_level(gs, 1.0, a_base * afac);
      ok = ok && lvl_a < prev_level;  // strictly decreasing in a
      prev_level = lvl_a;
    }
  }
  std::ostringstream d;
  d << "worst rel err=" << worst;
  report(2, "scaling-law oracle on the (mu,a) grid", ok, d.str());
}

void criterion_3_sobolev() {
  bool ok = true;
  std::ostringstream d;
  for (int N : {3, 4}) {
    const double S = sobolev_constant(N);
    const double rel = std::abs(S - oracle::sobolev_beta(N)) / S;
    const double lvl = sobolev_level(N, 1.3);
    const double want = std::pow(1.3, -0.5 * (N - 2)) * std::pow(S, 0.5 * N) / N;
    ok = ok && rel < 1e-5 && std::abs(lvl - want) < 1e-12 * want;
    d << "N=" << N << " rel=" << rel << " ";
  }
  report(3, "Sobolev constant vs Beta oracle", ok, d.str());
}

void criterion_4_fiber_calculus() {
  auto grid = RadialGrid::make(3, 40.0, 4096);
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> W(0.7, 2.5), S(-0.8, 0.8), A(0.3, 0.8);
  bool ok = true;
  double worst_closed = 0.0, worst_regrid = 0.0;
  for (int k = 0; k < 20; ++k) {
    ProblemParams P = mixed_instance();
    P.a1 = A(rng);
    P.a2 = A(rng);
    StatePair pair = gaussian_pair(grid, W(rng), W(rng), P.a1, P.a2);
    const FiberCoeffs c = fiber_coeffs(pair, P);
    const double s = S(rng);
    const double h = 1e-5;
    const double fd = (c.phi(s + h) - c.phi(s - h)) / (2.0 * h);
    const double rel_closed = std::abs(fd - c.dphi(s)) / std::abs(c.dphi(s));
    StatePair dil(dilate(pair.u, s), dilate(pair.v, s));
    const double rel_regrid = std::abs(pohozaev(dil, P) - c.dphi(s)) / std::abs(c.dphi(s));
    worst_closed = std::max(worst_closed, rel_closed);
    worst_regrid = std::max(worst_regrid, rel_regrid);
    ok = ok && rel_closed < 1e-6 && rel_regrid < 1e-3;
  }
  std::ostringstream d;
  d << "closed-form worst=" << worst_closed << " regridded worst=" << worst_regrid;
  report(4, "fiber calculus Phi' = P(s*(u,v))", ok, d.str());
}

void criterion_5_appendix_bound() {
  std::mt19937_64 rng(2026);
  std::uniform_real_distribution<double> U(0.0, 1.0), LogC(-3.0, 3.0);
  const int N = 3;
  const double pbar = 2.0 + 4.0 / N, two_star = 6.0;
  auto gam = [&](double s) { return s * gamma_exponent(N, s); };
  int violations = 0, mismatches = 0;
  for (int which = 0; which < 4; ++which) {
    for (int k = 0; k < 1000; ++k) {
      double q = pbar + (two_star - pbar) * (0.05 + 0.95 * U(rng));
      double p = 0, r = 0;
      switch (which) {
        case 0:
          p = 2.0 + (pbar - 2.0) * (0.05 + 0.9 * U(rng));
          r = p + (pbar - p) * 0.95 * U(rng);
          break;
        case 1:
          r = 2.0 + (pbar - 2.0) * (0.05 + 0.9 * U(rng));
          p = r + (pbar - r) * (0.05 + 0.9 * U(rng));
          break;
        case 2:
          p = 2.0 + (pbar - 2.0) * (0.05 + 0.9 * U(rng));
          r = pbar;
          break;
        default:
          p = 2.0 + (pbar - 2.0) * (0.05 + 0.9 * U(rng));
          r = pbar + (two_star - pbar) * (0.05 + 0.9 * U(rng));
          break;
      }
      LandscapeCoeffs c;
      c.a = std::pow(10.0, LogC(rng));
      c.b = std::pow(10.0, LogC(rng));
      c.c = std::pow(10.0, LogC(rng));
      c.d = std::pow(10.0, LogC(rng));
      c.ep = gam(p);
      c.eq = gam(q);
      c.er = gam(r);
      if (which == 2) c.b = c.a * (0.05 + 0.9 * U(rng));  // b < a in the critical case
      LandscapeReport rep;
      try {
        rep = analyze(c);
      } catch (const std::exception&) {
        ++violations;  // hard error means > 2 critical points were seen
        continue;
      }
      if (rep.critical_points.size() > 2) ++violations;

      std::vector<std::pair<double, double>> terms;
      double a_eff = c.a;
      if (std::abs(c.er - 2.0) < 1e-12)
        a_eff -= c.b;
      else if (c.b > 0.0)
        terms.push_back({c.b, c.er});
      terms.push_back({c.c, c.ep});
      terms.push_back({c.d, c.eq});
      if (a_eff > 0.0) {
        double lo = 0, hi = 0;
        int dense = 0;
        if (oracle::critical_root_bounds(a_eff, terms, &lo, &hi))
          dense = oracle::dense_critical_count(a_eff, terms, lo / 4.0, hi * 4.0, 1000000);
        if (dense > 2) ++violations;
        if (dense != static_cast<int>(rep.critical_points.size())) ++mismatches;
      }
    }
  }
  std::ostringstream d;
  d << "4000 draws, violations=" << violations << " oracle mismatches=" << mismatches;
  report(5, "at most two critical points (dense oracle cross-check)",
         violations == 0 && mismatches == 0, d.str());
}

void criterion_6_landscape_structure() {
  const ProblemParams P = mixed_instance();
  const ScalarMarginals marg = scalar_marginals(P);
  const ThresholdData thr = compute_thresholds(P, marg.gn);
  const LandscapeCoeffs hc = h_coeffs(P, thr);
  const LandscapeReport rep = analyze(hc);
  bool ok = rep.structure_ok && rep.critical_points.size() == 2 && rep.zeros.size() == 2;
  if (ok) {
    ok = ok && rep.critical_points[0].is_min && rep.critical_points[0].value < 0.0;
    ok = ok && !rep.critical_points[1].is_min && rep.critical_points[1].value > 0.0;
    const double R0 = rep.zeros[0], R1 = rep.zeros[1];
    ok = ok && std::abs(hc.value(R0)) < 1e-10 && std::abs(hc.value(R1)) < 1e-10;
    ok = ok && std::abs(hc.deriv(rep.critical_points[0].t)) < 1e-10 &&
         std::abs(hc.deriv(rep.critical_points[1].t)) < 1e-10;
    for (int k = 1; k <= 1000 && ok; ++k) {
      const double t = rep.t_scan * k / 1000.0;
      const double v = hc.value(t);
      if (t > R0 * 1.000001 && t < R1 * 0.999999) ok = ok && v > 0.0;
      if (t < R0 * 0.999999 || t > R1 * 1.000001) ok = ok && v <= 0.0;
    }
  }
  std::ostringstream d;
  d << "T=" << thr.T << " ncrit=" << rep.critical_points.size()
    << " nzeros=" << rep.zeros.size();
  report(6, "landscape two-critical-point structure at the pinned instance", ok, d.str());
}

GroundStateResult run_criterion_7(std::uint64_t seed, double* wall) {
  const ProblemParams P = mixed_instance();
  auto grid = RadialGrid::make(3, 60.0, 4096);
  SolverConfig cfg;
  cfg.seed = seed;
  const auto t0 = std::chrono::steady_clock::now();
  GroundStateResult res = solve_mixed(P, grid, cfg);
  if (wall) *wall = seconds_since(t0);
  return res;
}

void criterion_7_mixed_ground_state() {
  double wall = 0.0;
  const GroundStateResult res = run_criterion_7(0, &wall);
  const ProblemParams P = mixed_instance();
  const FiberCoeffs c = fiber_coeffs(res.pair, P);
  const bool ok = res.converged && mass(res.pair.u) == P.a1 && mass(res.pair.v) == P.a2 &&
                  res.pohozaev_residual < 1e-4 && res.lambda1 > 0.0 && res.lambda2 > 0.0 &&
                  res.energy < 0.0 &&
                  res.energy < std::min(res.marginal_u, res.marginal_v) && c.ddphi(0.0) > 0.0 &&
                  wall < 60.0;
  std::ostringstream d;
  d << "E=" << res.energy << " min_marg=" << std::min(res.marginal_u, res.marginal_v)
    << " P=" << res.pohozaev_residual << " l1=" << res.lambda1 << " l2=" << res.lambda2
    << " wall=" << wall << "s";
  report(7, "mixed-regime normalized ground state", ok, d.str());
}

void criterion_8_singular_bound() {
  const ProblemParams P = mixed_instance();
  auto grid = RadialGrid::make(3, 60.0, 4096);
  std::vector<double> s_grid;
  for (double s = -10.0; s <= 0.0; s += 0.25) s_grid.push_back(s);
  const SingularBoundResult b = singular_testfunction_bound(P, grid, s_grid);
  const double theta_err = std::abs(b.theta_fit - b.theta) / b.theta;
  const bool ok = b.bound < b.marginal && theta_err < 0.05;
  std::ostringstream d;
  d << "bound=" << b.bound << " m(a1,0)=" << b.marginal << " theta=" << b.theta
    << " fit=" << b.theta_fit << " rel=" << theta_err;
  report(8, "singular test-function upper bound", ok, d.str());
}

void criterion_9_supercritical_family() {
  auto grid = RadialGrid::make(3, 60.0, 8192);
  bool ok = true;
  double prev = std::numeric_limits<double>::infinity();
  std::ostringstream d;
  for (double beta : {0.5, 1.0, 2.0, 4.0}) {
    const auto t0 = std::chrono::steady_clock::now();
    const GroundStateResult res = solve_supercritical(super_instance(beta), grid, {});
    const double wall = seconds_since(t0);
    ok = ok && res.converged && res.unique_fiber_max_all_iterates && res.energy > 0.0 &&
         res.energy < std::min(res.marginal_u, res.marginal_v) && res.lambda1 > 0.0 &&
         res.lambda2 > 0.0 && res.energy <= prev * (1.0 + 1e-12) && wall < 120.0 &&
         res.fiber.classification == FiberClass::UniqueMax;
    prev = res.energy;
    d << "E(" << beta << ")=" << res.energy << " [" << wall << "s] ";
  }
  report(9, "supercritical ground states across the beta grid", ok, d.str());
}

void criterion_10_remark_case() {
  ProblemParams P;
  P.N = 4;
  P.p = P.q = 3.5;
  P.r1 = P.r2 = 1.75;
  P.mu1 = P.mu2 = 1.0;
  P.beta = 0.5;
  P.a1 = P.a2 = 1.0;
  auto grid = RadialGrid::make(4, 8.0, 32768);
  const auto t0 = std::chrono::steady_clock::now();
  const GroundStateResult res = solve_supercritical(P, grid, {});
  const double wall = seconds_since(t0);
  const bool ok = res.converged && res.checks.all() && res.energy > 0.0;
  std::ostringstream d;
  d << "E=" << res.energy << " l1=" << res.lambda1 << " P=" << res.pohozaev_residual
    << " g=" << res.gradient_residual << " wall=" << wall << "s";
  report(10, "N=4 remark-case positive ground state", ok, d.str());
}

void criterion_11_determinism() {
  SolverConfig cfg;
  cfg.seed = 20260808;
  GridConfig gc{60.0, 4096};
  const ProblemParams P = mixed_instance();

  double w1 = 0, w2 = 0;
  const GroundStateResult r1 = run_criterion_7(cfg.seed, &w1);
  const GroundStateResult r2 = run_criterion_7(cfg.seed, &w2);
  const std::string j1 = result_to_json(r1, P, gc, cfg, "profile.csv").dump();
  const std::string j2 = result_to_json(r2, P, gc, cfg, "profile.csv").dump();
  std::ostringstream d;
  d << "bytes=" << j1.size() << (j1 == j2 ? " identical" : " DIFFER");
  report(11, "bit-identical JSON under a fixed seed", j1 == j2, d.str());
}

}  // namespace

int main() {
  const auto t0 = std::chrono::steady_clock::now();
  criterion_1_scalar_consistency();
  criterion_2_scaling_law();
  criterion_3_sobolev();
  criterion_4_fiber_calculus();
  criterion_5_appendix_bound();
  criterion_6_landscape_structure();
  criterion_7_mixed_ground_state();
  criterion_8_singular_bound();
  criterion_9_supercritical_family();
  criterion_10_remark_case();
  criterion_11_determinism();
  std::printf("%d of 11 criteria passed in %.1fs\n", 11 - failures, seconds_since(t0));
  return failures;
}
