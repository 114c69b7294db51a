#pragma once

#include <string>

namespace normground {

/// Regime classification of the exponent triple (p, q, r).
enum class Regime { MixedSubSuper, PurelySupercritical, Other };

const char* regime_name(Regime r);

/// Problem data: exponents, coefficients and prescribed masses of the
/// two-component system.  All fields are validated together by validate().
struct ProblemParams {
  int N = 3;         // space dimension, N >= 3
  double p = 0.0;    // first power nonlinearity, 2 < p < 2N/(N-2)
  double q = 0.0;    // second power nonlinearity, 2 < q <= 2N/(N-2)
  double r1 = 0.0;   // coupling exponents, r1, r2 > 1,
  double r2 = 0.0;   //   2 < r1+r2 < 2N/(N-2)
  double mu1 = 1.0;  // mu1, mu2 > 0
  double mu2 = 1.0;
  double beta = 0.0;  // coupling strength, beta >= 0
  double a1 = 1.0;    // prescribed masses (L2 norms), a1, a2 > 0
  double a2 = 1.0;

  double r() const { return r1 + r2; }

  /// Throws std::invalid_argument naming the violated constraint.
  void validate() const;
};

/// Derived exponent data: the scaling exponents gamma_s = N(s-2)/(2s),
/// the mass-critical exponent pbar = 2 + 4/N, the Sobolev exponent
/// 2* = 2N/(N-2), and the regime label.
struct RegimeData {
  double gamma_p = 0.0;
  double gamma_q = 0.0;
  double gamma_r = 0.0;
  double pbar = 0.0;
  double two_star = 0.0;
  Regime regime = Regime::Other;
};

/// Best-constant data for the Gagliardo-Nirenberg inequalities at the
/// three exponents p, q, r.  Computed by scalar_theory and injected here.
struct GNConstants {
  double C_Np = 0.0;
  double C_Nq = 0.0;
  double C_Nr = 0.0;
};

/// The landscape constants D1, D2, D3 and the mass threshold quantity T.
struct ThresholdData {
  double D1 = 0.0;
  double D2 = 0.0;
  double D3 = 0.0;
  double T = 0.0;
  GNConstants gn;
};

double gamma_exponent(int N, double s);

/// Validates params and returns all gamma values plus the regime label:
/// MixedSubSuper when 2 < p < pbar < q <= 2*, PurelySupercritical when
/// pbar < p, q, r < 2*, Other otherwise.
RegimeData derive_regime(const ProblemParams& params);

/// D1 = (max{r1,r2}/r)^{r gamma_r/2} C_Nr^r a1^{r1(1-gamma_r)} a2^{r2(1-gamma_r)},
/// D2 = mu1 C_Np^p a1^{p(1-gamma_p)} / p,  D3 analogous with q, and the
/// three-branch T(a1,a2) selected by comparing r with pbar.  Rejects
/// configurations where a used branch denominator q*gamma_q-2 or
/// 2-p*gamma_p vanishes (q = pbar, and p = pbar in the r >= pbar branches).
ThresholdData compute_thresholds(const ProblemParams& params, const GNConstants& gn);

}  // namespace normground
