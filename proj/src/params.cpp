#include "normground/params.hpp"

#include <cmath>
#include <stdexcept>

namespace normground {

namespace {

// relative tolerance for detecting the r = pbar branch and vanishing
// branch denominators
constexpr double kBranchEps = 1e-12;

[[noreturn]] void reject(const std::string& what) { throw std::invalid_argument(what); }

}  // namespace

const char* regime_name(Regime r) {
  switch (r) {
    case Regime::MixedSubSuper: return "MixedSubSuper";
    case Regime::PurelySupercritical: return "PurelySupercritical";
    default: return "Other";
  }
}

double gamma_exponent(int N, double s) { return N * (s - 2.0) / (2.0 * s); }

void ProblemParams::validate() const {
  if (N < 3) reject("N must be >= 3");
  const double ts = 2.0 * N / (N - 2.0);
  if (!(r1 > 1.0)) reject("r1 must be > 1");
  if (!(r2 > 1.0)) reject("r2 must be > 1");
  if (!(p > 2.0 && p < ts)) reject("p must satisfy 2 < p < 2N/(N-2)");
  if (!(q > 2.0 && q <= ts)) reject("q must satisfy 2 < q <= 2N/(N-2)");
  const double rsum = r1 + r2;
  if (!(rsum > 2.0 && rsum < ts)) reject("r1+r2 must satisfy 2 < r1+r2 < 2N/(N-2)");
  if (!(mu1 > 0.0)) reject("mu1 must be > 0");
  if (!(mu2 > 0.0)) reject("mu2 must be > 0");
  if (!(beta >= 0.0)) reject("beta must be >= 0");
  if (!(a1 > 0.0)) reject("a1 must be > 0");
  if (!(a2 > 0.0)) reject("a2 must be > 0");
}

RegimeData derive_regime(const ProblemParams& params) {
  params.validate();
  RegimeData d;
  d.pbar = 2.0 + 4.0 / params.N;
  d.two_star = 2.0 * params.N / (params.N - 2.0);
  d.gamma_p = gamma_exponent(params.N, params.p);
  d.gamma_q = gamma_exponent(params.N, params.q);
  d.gamma_r = gamma_exponent(params.N, params.r());
  const double r = params.r();
  if (params.p < d.pbar && params.q > d.pbar) {
    d.regime = Regime::MixedSubSuper;
  } else if (params.p > d.pbar && params.q > d.pbar && params.q < d.two_star && r > d.pbar) {
    d.regime = Regime::PurelySupercritical;
  } else {
    d.regime = Regime::Other;
  }
  return d;
}

ThresholdData compute_thresholds(const ProblemParams& params, const GNConstants& gn) {
  const RegimeData reg = derive_regime(params);
  if (!(gn.C_Np > 0.0 && gn.C_Nq > 0.0 && gn.C_Nr > 0.0))
    reject("Gagliardo-Nirenberg constants must be positive");

  const double r = params.r();
  const double pgp = params.p * reg.gamma_p;
  const double qgq = params.q * reg.gamma_q;
  const double rgr = r * reg.gamma_r;

  ThresholdData t;
  t.gn = gn;
  t.D1 = std::pow(std::max(params.r1, params.r2) / r, rgr / 2.0) * std::pow(gn.C_Nr, r) *
         std::pow(params.a1, params.r1 * (1.0 - reg.gamma_r)) *
         std::pow(params.a2, params.r2 * (1.0 - reg.gamma_r));
  t.D2 = params.mu1 / params.p * std::pow(gn.C_Np, params.p) *
         std::pow(params.a1, params.p * (1.0 - reg.gamma_p));
  t.D3 = params.mu2 / params.q * std::pow(gn.C_Nq, params.q) *
         std::pow(params.a2, params.q * (1.0 - reg.gamma_q));

  // T(a1, a2), three branches by the position of r relative to pbar
  const double Au = params.mu1 * std::pow(params.a1, params.p * (1.0 - reg.gamma_p));
  const double Av = params.mu2 * std::pow(params.a2, params.q * (1.0 - reg.gamma_q));
  const double cross = std::pow(params.a1, params.r1 * (1.0 - reg.gamma_r)) *
                       std::pow(params.a2, params.r2 * (1.0 - reg.gamma_r)) * params.beta;
  const bool r_critical = std::abs(rgr - 2.0) < kBranchEps * 2.0;
  if (std::abs(qgq - 2.0) < kBranchEps * 2.0)
    reject("unsupported configuration: q = pbar (q gamma_q = 2 branch denominator)");
  if (!r_critical && rgr > 2.0 && std::abs(2.0 - pgp) < kBranchEps * 2.0)
    reject("unsupported configuration: p = pbar with r > pbar (2 - p gamma_p denominator)");

  if (r_critical) {
    if (std::abs(2.0 - pgp) < kBranchEps * 2.0)
      reject("unsupported configuration: p = pbar in the r = pbar branch");
    t.T = std::min(cross, std::pow(Au, 1.0 / (2.0 - pgp)) * std::pow(Av, 1.0 / (qgq - 2.0)));
  } else if (rgr < 2.0) {
    t.T = cross * std::pow(Av, (2.0 - rgr) / (qgq - 2.0)) +
          Au * std::pow(Av, (2.0 - pgp) / (qgq - 2.0));
  } else {
    t.T = cross * std::pow(Au, (rgr - 2.0) / (2.0 - pgp)) +
          Av * std::pow(Au, (qgq - 2.0) / (2.0 - pgp));
  }
  return t;
}

}  // namespace normground
