#pragma once

#include "normground/field.hpp"

#include <Eigen/Core>

namespace normground {

/// Ground state w > 0 of  -Delta w + w = w^{p-1}  in R^N, radial and
/// decreasing, found by shooting on the center value w(0).  Norms are
/// evaluated on the dense integration output (not the resampled grid), so
/// the Pohozaev and Gagliardo-Nirenberg residuals reflect the ODE solve.
struct ScalarGroundState {
  RadialField w;  // resampled onto the requested grid
  int N = 0;
  double p = 0.0;
  double w0 = 0.0;       // shooting value w(0)
  double w_mass = 0.0;   // |w|_2
  double w_kinetic = 0.0;  // |grad w|_2^2
  double w_lp = 0.0;     // |w|_p^p
  double C_Np = 0.0;     // best Gagliardo-Nirenberg constant
  double pohozaev_residual = 0.0;  // | |grad w|^2 - gamma_p |w|_p^p | / |grad w|^2
  double gn_residual = 0.0;        // relative defect of the GN equality at w

  // dense trajectory, kept for high-fidelity rescaling
  Eigen::ArrayXd dense_r;
  Eigen::ArrayXd dense_w;
};

struct ShootingOptions {
  double bracket_tol = 1e-12;  // bisection tolerance in w(0)
  double r_end = 30.0;         // integration horizon
  double ode_tol = 1e-12;      // local error control
  int max_bisections = 200;
};

/// Shooting solve of the unit scalar equation; requires 2 < p < 2*.
ScalarGroundState solve_unit_scalar(int N, double p, GridPtr grid,
                                    const ShootingOptions& opts = {});

/// C_{N,p} = |w|_p / (|grad w|_2^{gamma_p} |w|_2^{1-gamma_p}).
double gn_constant(const ScalarGroundState& gs);

/// Normalized solution of -Delta u + lambda u = mu |u|^{p-2} u, |u|_2 = a,
/// obtained from w by scaling.
struct NormalizedScalarSolution {
  RadialField u;
  double lambda = 0.0;
  double p = 0.0, mu = 0.0, a = 0.0;
  double energy = 0.0;  // E_{p,mu}(u) by direct quadrature
};

/// lambda = (a^2/|w|_2^2 mu^{2/(p-2)})^{(p-2)/(2-p gamma_p)},
/// u(x) = (lambda/mu)^{1/(p-2)} w(lambda^{1/2} x); rejects p = pbar.
NormalizedScalarSolution normalized_scalar(const ScalarGroundState& gs, double mu, double a);

/// Closed-form level m_p^mu(a) = (1/2 - 1/(p gamma_p)) *
/// (gamma_p C_{N,p}^p mu a^{p - p gamma_p})^{2/(2 - p gamma_p)}.
double scalar_level(const ScalarGroundState& gs, double mu, double a);

/// Best Sobolev constant S = inf |grad f|_2^2 / |f|_{2*}^2, evaluated on
/// the extremal profile (1 + |x|^2/(N(N-2)))^{-(N-2)/2} by quadrature in
/// the angle variable r = sqrt(N(N-2)) tan(theta).
double sobolev_constant(int N);

/// Scalar level at q = 2*:  (1/N) mu^{-(N-2)/2} S^{N/2}  (not attained
/// for N = 3, 4; used as the marginal m(0, a2) when q = 2*).
double sobolev_level(int N, double mu);

}  // namespace normground
