#pragma once

#include "normground/params.hpp"

#include <vector>

namespace normground {

/// Coefficients of the one-dimensional landscape function
///   l(t) = a t^2 - b t^{er} - c t^{ep} - d t^{eq},
/// which for the energy lower bound is h(t) with a = 1/2, b = D1*beta,
/// c = D2, d = D3 and exponents (2, r gamma_r, p gamma_p, q gamma_q).
struct LandscapeCoeffs {
  double a = 0.5;
  double b = 0.0, c = 0.0, d = 0.0;
  double er = 0.0, ep = 0.0, eq = 0.0;

  double value(double t) const;
  double deriv(double t) const;
  double second(double t) const;
};

LandscapeCoeffs h_coeffs(const ProblemParams& params, const ThresholdData& thr);

struct LandscapeCritical {
  double t = 0.0;
  double value = 0.0;
  bool is_min = false;
};

struct LandscapeReport {
  std::vector<LandscapeCritical> critical_points;  // ascending in t
  std::vector<double> zeros;                       // ascending
  bool structure_ok = false;  // exactly two critical points, min at
                              // negative level then max at positive level,
                              // two zeros R0 < R1 with l > 0 iff t in (R0,R1)
  double t_scan = 0.0;
};

/// Locates all roots of l' and all zeros of l on (0, t_scan) by sign scan
/// plus bisection to 1e-12 and fills the structure flag.  Requires the
/// exponent ordering ep < 2 < eq (er anywhere positive); throws a hard
/// error if more than two critical points are found.
LandscapeReport analyze(const LandscapeCoeffs& coeffs);

/// First zero R0 of the landscape (requires structure_ok); defines the
/// ball A_{R0} the mixed-regime minimization runs over.
double radius_R0(const LandscapeCoeffs& coeffs);

struct EffectiveThreshold {
  bool found = false;
  double sigma = 0.0;  // largest tested mass scale with structure_ok
  double T = 0.0;      // T(sigma a1, sigma a2) at that scale
  std::vector<std::pair<double, bool>> tested;  // (sigma, structure_ok)
};

/// Scans a grid of joint mass scales sigma, (a1,a2) -> (sigma a1, sigma a2),
/// and reports the largest sigma whose h-coefficients have the two-critical-
/// point structure, together with the corresponding T value.
EffectiveThreshold effective_threshold(const ProblemParams& params, const GNConstants& gn,
                                       const std::vector<double>& sigma_grid);

}  // namespace normground
