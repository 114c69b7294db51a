#pragma once

#include "normground/fiber.hpp"
#include "normground/field.hpp"
#include "normground/landscape.hpp"
#include "normground/params.hpp"
#include "normground/scalar.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace normground {

struct SolverConfig {
  double tau0 = 0.1;       // initial flow step
  double tau_min = 1e-12;  // backtracking floor
  double tau_max = 2.0;
  int max_iter = 200000;
  double tol_grad = 1e-6;  // relative Euler-Lagrange residual
  double tol_P = 1e-4;     // relative Pohozaev residual (reporting check)
  double init_width_u = 1.0;  // Gaussian initial data widths
  double init_width_v = 1.0;
  double init_kinetic_fraction = 0.5;  // mixed: start at this fraction of R0
  std::uint64_t seed = 0;  // jitters the initial widths; 0 = none
  bool verbose = false;
};

struct ResultChecks {
  bool positivity = false;
  bool multiplier_signs = false;
  bool energy_ordering = false;
  bool pohozaev = false;
  bool fiber_class = false;
  bool all() const {
    return positivity && multiplier_signs && energy_ordering && pohozaev && fiber_class;
  }
};

struct GroundStateResult {
  StatePair pair;
  double lambda1 = 0.0, lambda2 = 0.0;
  double energy = 0.0;
  double pohozaev_residual = 0.0;  // |P| / (|grad u|^2 + |grad v|^2)
  double gradient_residual = 0.0;
  double kinetic_u = 0.0, kinetic_v = 0.0;
  FiberReport fiber;
  double marginal_u = 0.0;  // m(a1, 0)
  double marginal_v = 0.0;  // m(0, a2)
  bool sobolev_critical_marginal = false;
  ResultChecks checks;
  int iterations = 0;
  bool converged = false;
  bool unique_fiber_max_all_iterates = true;  // supercritical diagnostics
};

/// Residual-minimizing Lagrange multipliers from testing each equation
/// against its own component:
///   lambda1 = (-|grad u|^2 + mu1 |u|_p^p + beta r1 int |u|^{r1}|v|^{r2}) / a1^2
/// and analogously for lambda2 with r2.
std::pair<double, double> extract_multipliers(const StatePair& pair,
                                              const ProblemParams& params);

/// Cached unit-equation data shared by the solvers: ground states for the
/// exponents p, q, r on a reference grid, the GN constants, and the scalar
/// marginal levels.  Solves are memoized per (N, exponent).
struct ScalarMarginals {
  GNConstants gn;
  double m_a1_0 = 0.0;  // m(a1, 0) = m_p^{mu1}(a1)
  double m_0_a2 = 0.0;  // m(0, a2) = m_q^{mu2}(a2), Sobolev level at q = 2*
  bool sobolev_critical = false;
};

ScalarMarginals scalar_marginals(const ProblemParams& params);

/// Memoized unit scalar solve (shared across solver calls and sweeps).
const ScalarGroundState& cached_unit_scalar(int N, double p);

/// Mixed regime (2 < p < pbar < q <= 2*): minimizes I over the ball A_{R0}
/// by mass-projected semi-implicit gradient flow with positivity clipping,
/// starting from Gaussians pre-projected to the fiber local minimizer.
/// Throws on regime mismatch, missing landscape structure, or escape from
/// the ball (kinetic norm beyond R1).
GroundStateResult solve_mixed(const ProblemParams& params, GridPtr grid,
                              const SolverConfig& config = {});

/// Purely supercritical regime (pbar < p, q, r < 2*): alternates projection
/// to the Pohozaev manifold through the unique fiber maximizer with
/// mass-constrained descent of I; the fiber-projected energy is the merit
/// function and never increases between accepted steps.
GroundStateResult solve_supercritical(const ProblemParams& params, GridPtr grid,
                                      const SolverConfig& config = {});

/// Single-component flow to the scalar normalized ground state (used by
/// tests and as the building block of the coupled flows).
RadialField scalar_flow_ground_state(int N, double p, double mu, double a, GridPtr grid,
                                     const SolverConfig& config = {});

/// Independent upper bound on m(a1,a2) from the singular test pair
/// (u, s*v), u the scalar ground state with mass a1 and v = c phi(|x|)/|x|^m
/// normalized to mass a2, phi a smooth cutoff (1 on [0,1], 0 outside [0,2]),
/// m the midpoint of (N/2 - 2/r2, N/2 - 1).  Requires r2 < 2.  In the mixed
/// regime the bound is min_s I(u, s*v); in the supercritical regime
/// min_s max_t I(t*(u, s*v)).
struct SingularBoundResult {
  double bound = 0.0;
  double s_at_min = 0.0;
  double m_exponent = 0.0;
  double theta = 0.0;      // (N/2 - m) r2, the coupling decay rate
  double theta_fit = 0.0;  // log-slope of the coupling term on the fit window
  double marginal = 0.0;   // m(a1, 0)
  std::vector<std::pair<double, double>> samples;           // (s, bound(s))
  std::vector<std::pair<double, double>> coupling_samples;  // (s, coupling integral)
};

SingularBoundResult singular_testfunction_bound(const ProblemParams& params, GridPtr grid,
                                                const std::vector<double>& s_grid);

enum class SweepAxis { Beta, MassScale };

struct SweepRow {
  double x = 0.0;
  bool ok = false;
  double energy = 0.0;
  double lambda1 = 0.0, lambda2 = 0.0;
  double pohozaev_residual = 0.0, gradient_residual = 0.0;
  double marginal_u = 0.0, marginal_v = 0.0;
  std::string error;
};

struct SweepTable {
  SweepAxis axis = SweepAxis::Beta;
  std::vector<SweepRow> rows;
  bool monotone_energy = false;  // Beta axis: energies non-increasing
};

/// Runs the regime-appropriate solver over a beta or joint-mass-scale grid;
/// per-point failures are recorded without aborting the sweep.  Points run
/// concurrently; the row order is the grid order.
SweepTable sweep(const ProblemParams& base, SweepAxis axis, const std::vector<double>& grid_values,
                 GridPtr grid, const SolverConfig& config = {});

}  // namespace normground
