#include "normground/field.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>

namespace normground {

std::shared_ptr<const RadialGrid> RadialGrid::make(int N, double R_max, int n) {
  if (N < 3) throw std::invalid_argument("RadialGrid: N must be >= 3");
  if (n < 16) throw std::invalid_argument("RadialGrid: need at least 16 nodes");
  if (!(R_max > 0.0)) throw std::invalid_argument("RadialGrid: R_max must be positive");
  auto g = std::make_shared<RadialGrid>();
  g->N = N;
  g->R_max = R_max;
  g->n = n;
  g->dr = R_max / (n - 1);
  g->sphere_area = 2.0 * std::pow(M_PI, 0.5 * N) / std::tgamma(0.5 * N);
  g->r = Eigen::ArrayXd::LinSpaced(n, 0.0, R_max);
  // composite trapezoid with the r^{N-1} weight; the r = 0 node drops out
  g->w = g->r.pow(N - 1) * (g->sphere_area * g->dr);
  g->w[0] *= 0.5;  // zero anyway for N >= 3
  g->w[n - 1] *= 0.5;
  // kinetic cell weights at midpoints r_{i+1/2}
  Eigen::ArrayXd rmid = (g->r.head(n - 1) + g->r.tail(n - 1)) * 0.5;
  g->kappa = rmid.pow(N - 1) * (g->sphere_area / g->dr);
  return g;
}

RadialField::RadialField(GridPtr grid)
    : grid_(std::move(grid)), values_(Eigen::ArrayXd::Zero(grid_->n)) {}

RadialField::RadialField(GridPtr grid, Eigen::ArrayXd values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  if (values_.size() != grid_->n)
    throw std::invalid_argument("RadialField: sample count does not match grid");
  values_[grid_->n - 1] = 0.0;  // Dirichlet truncation
}

StatePair::StatePair(RadialField u_, RadialField v_) : u(std::move(u_)), v(std::move(v_)) {
  if (u.grid_ptr() != v.grid_ptr())
    throw std::invalid_argument("StatePair: components must share one grid");
}

double integrate(const RadialGrid& grid, const Eigen::ArrayXd& integrand) {
  return (grid.w * integrand).sum();
}

double mass(const RadialField& f) {
  return std::sqrt(integrate(f.grid(), f.values().square()));
}

double kinetic(const RadialField& f) {
  const auto& v = f.values();
  const int n = f.grid().n;
  Eigen::ArrayXd diff = v.tail(n - 1) - v.head(n - 1);
  return (f.grid().kappa * diff.square()).sum();
}

double lp_norm(const RadialField& f, double s) {
  if (!(s >= 1.0)) throw std::invalid_argument("lp_norm: need s >= 1");
  return std::pow(integrate(f.grid(), f.values().abs().pow(s)), 1.0 / s);
}

double coupling_integral(const StatePair& pair, double r1, double r2) {
  return integrate(pair.grid(), pair.u.values().abs().pow(r1) * pair.v.values().abs().pow(r2));
}

double mass_radius(const RadialField& f, double fraction) {
  const auto& g = f.grid();
  Eigen::ArrayXd cum = (g.w * f.values().square());
  const double total = cum.sum();
  if (total <= 0.0) return 0.0;
  double acc = 0.0;
  for (int i = 0; i < g.n; ++i) {
    acc += cum[i];
    if (acc >= fraction * total) return g.r[i];
  }
  return g.R_max;
}

double interpolate(const RadialField& f, double x) {
  const auto& g = f.grid();
  const auto& v = f.values();
  const double ax = std::abs(x);  // even extension across r = 0
  if (ax >= g.R_max) return 0.0;
  const double s = ax / g.dr;
  int j = static_cast<int>(std::floor(s));
  if (j >= g.n - 1) return 0.0;
  const double t = s - j;
  // 4-point Lagrange on nodes j-1 .. j+2 with even reflection at the
  // origin and zero padding beyond R_max
  auto at = [&](int k) -> double {
    if (k < 0) k = -k;
    return k < g.n ? v[k] : 0.0;
  };
  const double fm1 = at(j - 1), f0 = at(j), f1 = at(j + 1), f2 = at(j + 2);
  const double c0 = -t * (t - 1.0) * (t - 2.0) / 6.0;
  const double c1 = (t + 1.0) * (t - 1.0) * (t - 2.0) / 2.0;
  const double c2 = -(t + 1.0) * t * (t - 2.0) / 2.0;
  const double c3 = (t + 1.0) * t * (t - 1.0) / 6.0;
  return c0 * fm1 + c1 * f0 + c2 * f1 + c3 * f2;
}

RadialField dilate(const RadialField& f, double s) {
  const auto& g = f.grid();
  const double scale = std::exp(0.5 * g.N * s);
  const double es = std::exp(s);
  Eigen::ArrayXd out(g.n);
  for (int i = 0; i < g.n; ++i) out[i] = scale * interpolate(f, es * g.r[i]);
  out[g.n - 1] = 0.0;

  const double m0 = mass(f);
  if (m0 > 0.0) {
    const double r_core = mass_radius(f);
    if (r_core > 0.0 && r_core / es > g.R_max)
      std::cerr << "normground: warning: dilate(s=" << s
                << ") pushes the 99.9% mass radius beyond R_max; mass renormalization "
                   "will hide the truncated tail\n";
    RadialField tmp(f.grid_ptr(), std::move(out));
    const double m1 = mass(tmp);
    if (m1 == 0.0) throw std::runtime_error("dilate: support left the grid entirely");
    return RadialField(f.grid_ptr(), tmp.values() * (m0 / m1));
  }
  return RadialField(f.grid_ptr(), std::move(out));
}

RadialField normalize_mass(const RadialField& f, double a) {
  const double m = mass(f);
  if (m <= 0.0) throw std::invalid_argument("normalize_mass: zero field");
  return RadialField(f.grid_ptr(), f.values() * (a / m));
}

void write_profile_csv(const std::string& path, const RadialField& u, const RadialField* v) {
  if (v && v->grid_ptr() != u.grid_ptr())
    throw std::invalid_argument("write_profile_csv: fields on different grids");
  std::FILE* fp = std::fopen(path.c_str(), "w");
  if (!fp) throw std::runtime_error("write_profile_csv: cannot open " + path);
  std::fprintf(fp, v ? "r,u,v\n" : "r,u\n");
  const auto& g = u.grid();
  for (int i = 0; i < g.n; ++i) {
    if (v)
      std::fprintf(fp, "%.17g,%.17g,%.17g\n", g.r[i], u[i], (*v)[i]);
    else
      std::fprintf(fp, "%.17g,%.17g\n", g.r[i], u[i]);
  }
  std::fclose(fp);
}

ProfileData read_profile_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("read_profile_csv: cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("read_profile_csv: empty file");
  bool has_v;
  if (line == "r,u")
    has_v = false;
  else if (line == "r,u,v")
    has_v = true;
  else
    throw std::runtime_error("read_profile_csv: bad header '" + line + "'");

  std::vector<double> rs, us, vs;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    double r, u, v = 0.0;
    char c1 = 0, c2 = 0;
    ls >> r >> c1 >> u;
    if (has_v) ls >> c2 >> v;
    if (!ls || c1 != ',' || (has_v && c2 != ','))
      throw std::runtime_error("read_profile_csv: malformed row '" + line + "'");
    rs.push_back(r);
    us.push_back(u);
    if (has_v) vs.push_back(v);
  }
  const int n = static_cast<int>(rs.size());
  if (n < 16) throw std::runtime_error("read_profile_csv: too few rows");
  if (rs.front() != 0.0) throw std::runtime_error("read_profile_csv: grid must start at r = 0");
  const double dr = rs[1] - rs[0];
  for (int i = 1; i < n; ++i)
    if (std::abs(rs[i] - i * dr) > 1e-9 * std::max(1.0, rs[i]))
      throw std::runtime_error("read_profile_csv: non-uniform grid");

  ProfileData pd;
  pd.r = Eigen::Map<Eigen::ArrayXd>(rs.data(), n);
  pd.u = Eigen::Map<Eigen::ArrayXd>(us.data(), n);
  if (has_v) pd.v = Eigen::Map<Eigen::ArrayXd>(vs.data(), n);
  return pd;
}

RadialField field_from_profile(int N, const Eigen::ArrayXd& r, const Eigen::ArrayXd& u) {
  auto grid = RadialGrid::make(N, r[r.size() - 1], static_cast<int>(r.size()));
  return RadialField(grid, u);
}

}  // namespace normground
