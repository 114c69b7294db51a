#pragma once

#include <Eigen/Core>
#include <memory>
#include <optional>
#include <string>

namespace normground {

/// Uniform radial grid on [0, R_max] with the r^{N-1} surface-weighted
/// measure.  Quadrature weights and midpoint kinetic weights are
/// precomputed once; grids are shared immutably between fields.
struct RadialGrid {
  int N;               // space dimension
  double R_max;        // truncation radius
  int n;               // node count, r_0 = 0 ... r_{n-1} = R_max
  double dr;           // uniform spacing
  double sphere_area;  // 2 pi^{N/2} / Gamma(N/2)
  Eigen::ArrayXd r;    // node radii
  Eigen::ArrayXd w;    // mass-quadrature weights: sphere_area * trap_i * r_i^{N-1} * dr
  Eigen::ArrayXd kappa;  // kinetic cell weights: sphere_area * r_{i+1/2}^{N-1} / dr, size n-1

  static std::shared_ptr<const RadialGrid> make(int N, double R_max, int n);
};

using GridPtr = std::shared_ptr<const RadialGrid>;

/// A radial scalar function sampled at the grid nodes.  Immutable after
/// construction; the Dirichlet value at R_max is forced to zero.
class RadialField {
 public:
  explicit RadialField(GridPtr grid);  // zero field
  RadialField(GridPtr grid, Eigen::ArrayXd values);

  const RadialGrid& grid() const { return *grid_; }
  const GridPtr& grid_ptr() const { return grid_; }
  const Eigen::ArrayXd& values() const { return values_; }
  double operator[](int i) const { return values_[i]; }
  int size() const { return static_cast<int>(values_.size()); }

 private:
  GridPtr grid_;
  Eigen::ArrayXd values_;
};

/// The unknown of the system: a pair (u, v) on one shared grid.
struct StatePair {
  RadialField u;
  RadialField v;

  StatePair(RadialField u_, RadialField v_);
  const RadialGrid& grid() const { return u.grid(); }
};

/// Weighted integral  sphere_area * int g(r) r^{N-1} dr  of a sampled
/// integrand, composite trapezoid.
double integrate(const RadialGrid& grid, const Eigen::ArrayXd& integrand);

/// L2 norm |f|_2 (the mass constraint reads mass(u) = a).
double mass(const RadialField& f);

/// Squared gradient norm |grad f|_2^2, staggered midpoint differences.
double kinetic(const RadialField& f);

/// |f|_s = (sphere_area * int |f|^s r^{N-1} dr)^{1/s}, s >= 1.
double lp_norm(const RadialField& f, double s);

/// int |u|^{r1} |v|^{r2} with the radial weight.
double coupling_integral(const StatePair& pair, double r1, double r2);

/// Mass-preserving dilation (s * f)(r) = e^{Ns/2} f(e^s r), resampled by
/// cubic interpolation and renormalized by one constant so the L2 norm is
/// preserved exactly.  Warns on stderr when the 99.9%-mass radius of the
/// result falls outside the grid.
RadialField dilate(const RadialField& f, double s);

/// Scalar multiple of f with mass(result) == a exactly.  Throws on a
/// zero field.
RadialField normalize_mass(const RadialField& f, double a);

/// Radius enclosing the given fraction of the squared-L2 mass.
double mass_radius(const RadialField& f, double fraction = 0.999);

/// Cubic (4-point Lagrange) interpolation of the samples at radius x;
/// even symmetry across r = 0, zero beyond R_max.
double interpolate(const RadialField& f, double x);

// --- profile CSV: header "r,u" or "r,u,v", 17 significant digits ---

void write_profile_csv(const std::string& path, const RadialField& u,
                       const RadialField* v = nullptr);

struct ProfileData {
  Eigen::ArrayXd r;
  Eigen::ArrayXd u;
  std::optional<Eigen::ArrayXd> v;
};

/// Reads a profile CSV; validates the uniform grid (r_0 = 0).
ProfileData read_profile_csv(const std::string& path);

/// Rebuilds fields from a profile read for dimension N.
RadialField field_from_profile(int N, const Eigen::ArrayXd& r, const Eigen::ArrayXd& u);

}  // namespace normground
