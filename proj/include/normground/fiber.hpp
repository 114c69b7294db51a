#pragma once

#include "normground/field.hpp"
#include "normground/params.hpp"

#include <optional>
#include <vector>

namespace normground {

/// Cached integrals of a pair, turning the fiber map into the exact
/// four-term exponential sum
///   Phi(s) = (K/2) e^{2s} - Bp e^{ep s} - Bq e^{eq s} - Br e^{er s},
/// where ep = p gamma_p, eq = q gamma_q, er = r gamma_r and
/// Bp = mu1 |u|_p^p / p, Bq = mu2 |v|_q^q / q, Br = beta int |u|^{r1}|v|^{r2}.
/// Then Phi'(s) = P(s*(u,v)) with no interpolation error.
struct FiberCoeffs {
  double K = 0.0;
  double Bp = 0.0, Bq = 0.0, Br = 0.0;
  double ep = 0.0, eq = 0.0, er = 0.0;

  double phi(double s) const;
  double dphi(double s) const;   // = P(s * (u,v))
  double ddphi(double s) const;
  /// scale of |Phi''| terms at s, for degeneracy tests
  double ddphi_scale(double s) const;
};

FiberCoeffs fiber_coeffs(const StatePair& pair, const ProblemParams& params);

/// Energy I(u,v) evaluated through the cached integrals.
double energy(const StatePair& pair, const ProblemParams& params);

/// Pohozaev functional P(u,v) = K - gamma_p mu1 |u|_p^p - gamma_q mu2 |v|_q^q
/// - r gamma_r beta int |u|^{r1}|v|^{r2}.
double pohozaev(const StatePair& pair, const ProblemParams& params);

enum class FiberClass { PlusMinus, UniqueMax, Degenerate, None };

const char* fiber_class_name(FiberClass c);

/// Critical points, zeros and classification of one fiber map.
struct FiberReport {
  std::optional<double> s_minus;  // local minimum location
  std::optional<double> t_max;    // maximum location
  std::vector<double> roots;      // all roots of Phi', ascending
  std::vector<double> zeros;      // zeros of Phi, ascending
  std::vector<double> phi_at_crit;
  std::vector<double> second_derivs;
  FiberClass classification = FiberClass::None;
};

/// Finds all roots of Phi' by sign scan on [-40, 40] (widened adaptively,
/// capped at |s| <= 100) plus bisection to 1e-12, classifies each by the
/// sign of Phi'', and locates the zeros of Phi.  Throws if the
/// PurelySupercritical regime does not produce exactly one root.
FiberReport locate_critical_points(const FiberCoeffs& coeffs, Regime regime);
FiberReport locate_critical_points(const StatePair& pair, const ProblemParams& params);

struct FiberSample {
  double s, phi, dphi;
};

/// Samples Phi and Phi' from the closed form on [s_lo, s_hi].
std::vector<FiberSample> fiber_profile(const StatePair& pair, const ProblemParams& params,
                                       double s_lo, double s_hi, int samples);

enum class FiberPoint { Minimizer, Maximizer };

/// Returns t* * (u,v) where t* is the requested critical point of the
/// fiber map; masses are preserved exactly by the dilation.  Throws when
/// the requested critical point does not exist for the pair's landscape.
StatePair project_to_pohozaev(const StatePair& pair, const ProblemParams& params,
                              FiberPoint which);

}  // namespace normground
