#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "normground/fiber.hpp"
#include "normground/landscape.hpp"
#include "normground/scalar.hpp"
#include "normground/solver.hpp"
#include "oracles.hpp"

#include <cmath>
#include <random>

using namespace normground;

namespace {

ProblemParams mixed_instance(double a1 = 0.5, double a2 = 0.5) {
  ProblemParams p;
  p.N = 3;
  p.p = 2.5;
  p.q = 4.0;
  p.r1 = 1.5;
  p.r2 = 1.5;
  p.mu1 = p.mu2 = 1.0;
  p.beta = 1.0;
  p.a1 = a1;
  p.a2 = a2;
  return p;
}

ProblemParams super_instance(double a = 3.0, double beta = 1.0) {
  ProblemParams p;
  p.N = 3;
  p.p = 4.0;
  p.q = 4.0;
  p.r1 = 1.9;
  p.r2 = 1.9;
  p.mu1 = p.mu2 = 1.0;
  p.beta = beta;
  p.a1 = p.a2 = a;
  return p;
}

StatePair gaussian_pair(GridPtr g, double wu, double wv, double a1, double a2) {
  Eigen::ArrayXd u = (-g->r.square() / (2.0 * wu * wu)).exp();
  Eigen::ArrayXd v = (-g->r.square() / (2.0 * wv * wv)).exp();
  u[g->n - 1] = v[g->n - 1] = 0.0;
  return StatePair(normalize_mass(RadialField(g, std::move(u)), a1),
                   normalize_mass(RadialField(g, std::move(v)), a2));
}

}  // namespace

TEST_CASE("energy: zero pair, beta = 0 splitting, Gaussian oracle value") {
  auto g = RadialGrid::make(3, 25.0, 2048);
  const ProblemParams P = mixed_instance();

  StatePair zero{RadialField(g), RadialField(g)};
  CHECK(energy(zero, P) == 0.0);
  CHECK(pohozaev(zero, P) == 0.0);

  StatePair pair = gaussian_pair(g, 1.0, 1.6, 0.5, 0.5);
  ProblemParams p0 = P;
  p0.beta = 0.0;
  const double eu = 0.5 * kinetic(pair.u) - P.mu1 / P.p * std::pow(lp_norm(pair.u, P.p), P.p);
  const double ev = 0.5 * kinetic(pair.v) - P.mu2 / P.q * std::pow(lp_norm(pair.v, P.q), P.q);
  CHECK(energy(pair, p0) == doctest::Approx(eu + ev).epsilon(1e-12));

  // full coupled energy against a 10x-resolution quadrature oracle
  const double au = 0.5 / std::sqrt(oracle::radial_integral(
                              3, 25.0, 20480, [](double r) { return std::exp(-r * r); }));
  const double av = 0.5 / std::sqrt(oracle::radial_integral(3, 25.0, 20480, [](double r) {
                      return std::exp(-r * r / (1.6 * 1.6));
                    }));
  auto uf = [&](double r) { return au * std::exp(-r * r / 2.0); };
  auto vf = [&](double r) { return av * std::exp(-r * r / (2.0 * 1.6 * 1.6)); };
  auto duf = [&](double r) { return -r * au * std::exp(-r * r / 2.0); };
  auto dvf = [&](double r) { return -r / (1.6 * 1.6) * av * std::exp(-r * r / (2.0 * 1.6 * 1.6)); };
  const double want =
      0.5 * (oracle::radial_integral(3, 25.0, 20480, [&](double r) { return duf(r) * duf(r); }) +
             oracle::radial_integral(3, 25.0, 20480, [&](double r) { return dvf(r) * dvf(r); })) -
      P.mu1 / P.p *
          oracle::radial_integral(3, 25.0, 20480, [&](double r) { return std::pow(uf(r), P.p); }) -
      P.mu2 / P.q *
          oracle::radial_integral(3, 25.0, 20480, [&](double r) { return std::pow(vf(r), P.q); }) -
      P.beta * oracle::radial_integral(3, 25.0, 20480, [&](double r) {
        return std::pow(uf(r), P.r1) * std::pow(vf(r), P.r2);
      });
  CHECK(energy(pair, P) == doctest::Approx(want).epsilon(2e-5));
}

TEST_CASE("Phi' equals P along the fiber: closed form and regridded dilation") {
  auto g = RadialGrid::make(3, 40.0, 4096);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> W(0.7, 2.5), S(-0.8, 0.8), A(0.3, 0.8);
  for (int k = 0; k < 20; ++k) {
    const ProblemParams P = mixed_instance(A(rng), A(rng));
    StatePair pair = gaussian_pair(g, W(rng), W(rng), P.a1, P.a2);
    const FiberCoeffs c = fiber_coeffs(pair, P);
    const double s = S(rng);

    // centered finite differences of the closed form
    const double h = 1e-5;
    const double fd = (c.phi(s + h) - c.phi(s - h)) / (2.0 * h);
    CHECK(std::abs(fd - c.dphi(s)) / std::abs(c.dphi(s)) < 1e-6);

    // actual dilation route: P(s * pair) from regridded fields
    StatePair dil(dilate(pair.u, s), dilate(pair.v, s));
    const double P_dil = pohozaev(dil, P);
    CHECK(std::abs(P_dil - c.dphi(s)) / std::abs(c.dphi(s)) < 1e-3);
  }
}

TEST_CASE("the scalar normalized solution sits on the Pohozaev manifold") {
  // wide subcritical profile at small mass: needs the larger box
  auto g = RadialGrid::make(3, 60.0, 4096);
  const ScalarGroundState gs = solve_unit_scalar(3, 2.5, g);
  const NormalizedScalarSolution sol = normalized_scalar(gs, 1.0, 0.7);
  ProblemParams P = mixed_instance(0.7, 0.5);
  StatePair pair(sol.u, RadialField(g));
  CHECK(std::abs(pohozaev(pair, P)) < 1e-4 * kinetic(sol.u));
}

TEST_CASE("fiber profile endpoints and limits in the mixed regime") {
  auto g = RadialGrid::make(3, 30.0, 1024);
  const ProblemParams P = mixed_instance();
  StatePair pair = gaussian_pair(g, 1.0, 1.0, P.a1, P.a2);
  const FiberCoeffs c = fiber_coeffs(pair, P);

  const auto curve = fiber_profile(pair, P, -3.0, 3.0, 61);
  CHECK(curve.front().s == doctest::Approx(-3.0));
  CHECK(curve[30].phi == doctest::Approx(energy(pair, P)).epsilon(1e-12));

  CHECK(c.phi(-30.0) < 0.0);                  // Phi -> 0^- as s -> -infinity
  CHECK(std::abs(c.phi(-30.0)) < 1e-9);
  CHECK(c.phi(25.0) < -1.0);                  // Phi -> -infinity as s -> +infinity
}

TEST_CASE("critical point location and classification") {
  auto g = RadialGrid::make(3, 30.0, 2048);

  SUBCASE("purely supercritical: exactly one root, a strict maximum") {
    const ProblemParams P = super_instance();
    StatePair pair = gaussian_pair(g, 1.0, 1.4, P.a1, P.a2);
    const FiberReport rep = locate_critical_points(pair, P);
    REQUIRE(rep.roots.size() == 1);
    CHECK(rep.classification == FiberClass::UniqueMax);
    REQUIRE(rep.t_max.has_value());
    CHECK(rep.second_derivs[0] < 0.0);
    CHECK(rep.phi_at_crit[0] > 0.0);  // maximum at positive level
    CHECK(rep.zeros.size() == 1);
  }

  SUBCASE("mixed regime below threshold: min then max with interlaced zeros") {
    const ProblemParams P = mixed_instance();
    StatePair pair = gaussian_pair(g, 1.0, 1.2, P.a1, P.a2);
    const FiberReport rep = locate_critical_points(pair, P);
    REQUIRE(rep.roots.size() == 2);
    CHECK(rep.classification == FiberClass::PlusMinus);
    REQUIRE(rep.s_minus.has_value());
    REQUIRE(rep.t_max.has_value());
    CHECK(*rep.s_minus < *rep.t_max);
    CHECK(rep.phi_at_crit[0] < 0.0);
    CHECK(rep.phi_at_crit[1] > 0.0);
    REQUIRE(rep.zeros.size() == 2);
    // Lemma-style interlacing s_- < c < t_+ < d
    CHECK(*rep.s_minus < rep.zeros[0]);
    CHECK(rep.zeros[0] < *rep.t_max);
    CHECK(*rep.t_max < rep.zeros[1]);
  }

  SUBCASE("roots translate by -sigma under dilation (exact coefficients)") {
    const ProblemParams P = mixed_instance();
    StatePair pair = gaussian_pair(g, 1.0, 1.2, P.a1, P.a2);
    FiberCoeffs c = fiber_coeffs(pair, P);
    const double sigma = 0.61803398875;
    FiberCoeffs shifted = c;
    shifted.K *= std::exp(2.0 * sigma);
    shifted.Bp *= std::exp(c.ep * sigma);
    shifted.Bq *= std::exp(c.eq * sigma);
    shifted.Br *= std::exp(c.er * sigma);
    const FiberReport r0 = locate_critical_points(c, Regime::MixedSubSuper);
    const FiberReport r1 = locate_critical_points(shifted, Regime::MixedSubSuper);
    REQUIRE(r0.roots.size() == 2);
    REQUIRE(r1.roots.size() == 2);
    CHECK(std::abs(r1.roots[0] - (r0.roots[0] - sigma)) < 1e-10);
    CHECK(std::abs(r1.roots[1] - (r0.roots[1] - sigma)) < 1e-10);
  }
}

TEST_CASE("projection to the Pohozaev manifold") {
  auto g = RadialGrid::make(3, 40.0, 4096);
  const ProblemParams P = super_instance();
  StatePair pair = gaussian_pair(g, 1.0, 1.0, P.a1, P.a2);

  StatePair proj = project_to_pohozaev(pair, P, FiberPoint::Maximizer);
  CHECK(mass(proj.u) == doctest::Approx(P.a1).epsilon(1e-15));
  CHECK(mass(proj.v) == doctest::Approx(P.a2).epsilon(1e-15));
  CHECK(std::abs(pohozaev(proj, P)) < 1e-3 * (kinetic(proj.u) + kinetic(proj.v)));
  // the fiber maximum dominates the fiber value at s = 0
  CHECK(energy(proj, P) >= energy(pair, P) * (1.0 - 1e-9));

  // an already-projected pair has its critical point at ~0
  const FiberReport rep = locate_critical_points(proj, P);
  REQUIRE(rep.t_max.has_value());
  CHECK(std::abs(*rep.t_max) < 2e-3);

  CHECK_THROWS(project_to_pohozaev(pair, P, FiberPoint::Minimizer));  // no minimizer here
}

TEST_CASE("fiber map dominates the landscape lower bound in the mixed regime") {
  auto g = RadialGrid::make(3, 30.0, 2048);
  const ProblemParams P = mixed_instance();
  const ScalarMarginals marg = scalar_marginals(P);
  const ThresholdData thr = compute_thresholds(P, marg.gn);
  const LandscapeCoeffs hc = h_coeffs(P, thr);
  StatePair pair = gaussian_pair(g, 1.1, 0.9, P.a1, P.a2);
  const FiberCoeffs c = fiber_coeffs(pair, P);
  const double kroot = std::sqrt(c.K);
  for (int k = 0; k <= 40; ++k) {
    const double s = -4.0 + 8.0 * k / 40.0;
    CHECK(c.phi(s) >= hc.value(std::exp(s) * kroot) - 1e-12);
  }
}
