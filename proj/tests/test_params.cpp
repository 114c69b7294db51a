#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "normground/json_io.hpp"
#include "normground/params.hpp"

#include <cmath>

using namespace normground;

namespace {

ProblemParams mixed_instance() {
  ProblemParams p;
  p.N = 3;
  p.p = 2.5;
  p.q = 4.0;
  p.r1 = 1.5;
  p.r2 = 1.5;
  p.mu1 = p.mu2 = 1.0;
  p.beta = 1.0;
  p.a1 = p.a2 = 0.5;
  return p;
}

}  // namespace

TEST_CASE("gamma exponents and regime labels") {
  ProblemParams p = mixed_instance();
  p.p = 4.0;
  RegimeData d = derive_regime(p);
  CHECK(d.gamma_p == doctest::Approx(0.75).epsilon(1e-14));  // N=3, p=4

  p.p = 10.0 / 3.0;  // p = pbar: p * gamma_p = 2 by definition
  d = derive_regime(p);
  CHECK(p.p * d.gamma_p == doctest::Approx(2.0).epsilon(1e-14));

  ProblemParams p4 = mixed_instance();
  p4.N = 4;
  p4.p = 2.5;
  p4.q = 4.0;  // q = 2* at N = 4
  RegimeData d4 = derive_regime(p4);
  CHECK(d4.gamma_q == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(d4.two_star == doctest::Approx(4.0));

  CHECK(derive_regime(mixed_instance()).regime == Regime::MixedSubSuper);

  ProblemParams sup = mixed_instance();
  sup.p = sup.q = 4.0;
  sup.r1 = sup.r2 = 1.9;
  CHECK(derive_regime(sup).regime == Regime::PurelySupercritical);

  ProblemParams other = mixed_instance();
  other.p = 2.5;
  other.q = 3.0;  // q below pbar
  CHECK(derive_regime(other).regime == Regime::Other);
}

TEST_CASE("gamma is in (0,1) on (2, 2*) and increasing in s") {
  for (int N : {3, 4, 5}) {
    const double ts = 2.0 * N / (N - 2.0);
    double prev = 0.0;
    for (int k = 1; k <= 40; ++k) {
      const double s = 2.0 + (ts - 2.0) * k / 41.0;
      const double g = gamma_exponent(N, s);
      CHECK(g > 0.0);
      CHECK(g < 1.0);
      CHECK(g > prev);
      prev = g;
    }
  }
}

TEST_CASE("parameter validation rejects out-of-range exponents") {
  ProblemParams p = mixed_instance();
  p.p = 2.0;
  CHECK_THROWS_AS(derive_regime(p), std::invalid_argument);
  p = mixed_instance();
  p.q = 6.5;  // above 2* = 6
  CHECK_THROWS_AS(derive_regime(p), std::invalid_argument);
  p = mixed_instance();
  p.r1 = 0.9;
  CHECK_THROWS_AS(derive_regime(p), std::invalid_argument);
  p = mixed_instance();
  p.r1 = p.r2 = 3.1;  // r beyond 2*
  CHECK_THROWS_AS(derive_regime(p), std::invalid_argument);
  p = mixed_instance();
  p.mu1 = 0.0;
  CHECK_THROWS_AS(derive_regime(p), std::invalid_argument);
  p = mixed_instance();
  p.beta = -0.25;
  CHECK_THROWS_AS(derive_regime(p), std::invalid_argument);
  p = mixed_instance();
  p.a2 = 0.0;
  CHECK_THROWS_AS(derive_regime(p), std::invalid_argument);
  p = mixed_instance();
  p.N = 2;
  CHECK_THROWS_AS(derive_regime(p), std::invalid_argument);
  CHECK(derive_regime(mixed_instance()).regime == Regime::MixedSubSuper);
}

TEST_CASE("threshold T at the pinned mixed instance equals the hand value") {
  // N=3, p=2.5, q=4, r=3, mu=1, beta=1, a1=a2=1/2: the r < pbar branch
  // collapses to 0.5^2 + 0.5^3 = 0.375 exactly.
  GNConstants gn{0.69430701, 0.44925702, 0.55908191};
  const ThresholdData t = compute_thresholds(mixed_instance(), gn);
  CHECK(t.T == doctest::Approx(0.375).epsilon(1e-12));
  CHECK(t.D1 > 0.0);
  CHECK(t.D2 > 0.0);
  CHECK(t.D3 > 0.0);
}

TEST_CASE("beta = 0 collapses T to the pure scalar term") {
  ProblemParams p = mixed_instance();
  p.beta = 0.0;
  GNConstants gn{0.7, 0.45, 0.56};
  const RegimeData reg = derive_regime(p);
  const ThresholdData t = compute_thresholds(p, gn);
  const double expo = (2.0 - p.p * reg.gamma_p) / (p.q * reg.gamma_q - 2.0);
  const double want = p.mu1 * std::pow(p.a1, p.p * (1.0 - reg.gamma_p)) *
                      std::pow(p.mu2 * std::pow(p.a2, p.q * (1.0 - reg.gamma_q)), expo);
  CHECK(t.T == doctest::Approx(want).epsilon(1e-13));
}

TEST_CASE("T vanishes with the masses and increases in each mass") {
  GNConstants gn{0.7, 0.45, 0.56};
  ProblemParams p = mixed_instance();
  double prev = 0.0;
  for (double s : {1e-4, 1e-3, 1e-2, 0.1, 0.3, 0.6, 1.0}) {
    ProblemParams q = p;
    q.a1 = p.a1 * s;
    q.a2 = p.a2 * s;
    const double T = compute_thresholds(q, gn).T;
    CHECK(T > prev);
    prev = T;
  }
  CHECK(prev > 0.0);
  CHECK(compute_thresholds(p, gn).T == prev);

  // increasing separately in a1 and in a2 over a sample grid
  for (double base : {0.25, 0.5, 1.0}) {
    double last1 = 0.0, last2 = 0.0;
    for (double a : {0.2, 0.4, 0.8, 1.2}) {
      ProblemParams q1 = p;
      q1.a1 = a * base;
      ProblemParams q2 = p;
      q2.a2 = a * base;
      const double T1 = compute_thresholds(q1, gn).T;
      const double T2 = compute_thresholds(q2, gn).T;
      CHECK(T1 > last1);
      CHECK(T2 > last2);
      last1 = T1;
      last2 = T2;
    }
  }
}

TEST_CASE("T branch selection across r vs pbar, and the critical rejections") {
  GNConstants gn{0.7, 0.45, 0.56};

  ProblemParams sup = mixed_instance();
  sup.r1 = sup.r2 = 1.9;  // r = 3.8 > pbar = 10/3
  CHECK(compute_thresholds(sup, gn).T > 0.0);

  ProblemParams crit = mixed_instance();
  crit.r1 = crit.r2 = 5.0 / 3.0;  // r = pbar exactly
  CHECK(compute_thresholds(crit, gn).T > 0.0);

  ProblemParams qbar = mixed_instance();
  qbar.q = 10.0 / 3.0;  // q = pbar: branch denominators vanish
  CHECK_THROWS_AS(compute_thresholds(qbar, gn), std::invalid_argument);

  CHECK_THROWS_AS(compute_thresholds(mixed_instance(), GNConstants{0.0, 0.4, 0.5}),
                  std::invalid_argument);
}

TEST_CASE("D constants are continuous in (a1, a2, beta)") {
  GNConstants gn{0.7, 0.45, 0.56};
  const ProblemParams p = mixed_instance();
  const ThresholdData base = compute_thresholds(p, gn);
  ProblemParams q = p;
  q.a1 *= 1.0 + 1e-9;
  q.a2 *= 1.0 - 1e-9;
  q.beta *= 1.0 + 1e-9;
  const ThresholdData nudged = compute_thresholds(q, gn);
  CHECK(nudged.D1 == doctest::Approx(base.D1).epsilon(1e-7));
  CHECK(nudged.D2 == doctest::Approx(base.D2).epsilon(1e-7));
  CHECK(nudged.D3 == doctest::Approx(base.D3).epsilon(1e-7));
}

TEST_CASE("params JSON is strict about field names") {
  nlohmann::json good = {{"N", 3},     {"p", 2.5},   {"q", 4.0},    {"r1", 1.5}, {"r2", 1.5},
                         {"mu1", 1.0}, {"mu2", 1.0}, {"beta", 1.0}, {"a1", 0.5}, {"a2", 0.5}};
  const ProblemParams p = params_from_json(good);
  CHECK(p.q == 4.0);
  CHECK(p.a2 == 0.5);

  nlohmann::json typo = good;
  typo.erase("r2");
  typo["r_2"] = 1.5;  // typo in an exponent name must be caught
  CHECK_THROWS_AS(params_from_json(typo), std::invalid_argument);

  nlohmann::json missing = good;
  missing.erase("beta");
  CHECK_THROWS_AS(params_from_json(missing), std::invalid_argument);

  CHECK(params_from_json(params_to_json(p)).p == p.p);
}
