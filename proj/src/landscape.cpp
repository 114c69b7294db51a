#include "normground/landscape.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace normground {

namespace {

constexpr double kRootTol = 1e-12;
constexpr double kCriticalExpEps = 1e-12;

struct Term {
  double coef;
  double exp;
};

// balance radius where coef * e * t^{e-1} meets 2a t
double balance_point(double a2, const Term& t) {
  return t.exp > 2.0 ? std::pow(a2 / (t.coef * t.exp), 1.0 / (t.exp - 2.0))
                     : std::pow(t.coef * t.exp / a2, 1.0 / (2.0 - t.exp));
}

template <class F>
std::vector<double> scan_roots_log(F&& g, double t_lo, double t_hi, int samples) {
  std::vector<double> roots;
  const double x_lo = std::log(t_lo), x_hi = std::log(t_hi);
  double prev_t = t_lo, prev_g = g(t_lo);
  for (int i = 1; i <= samples; ++i) {
    const double t = std::exp(x_lo + (x_hi - x_lo) * i / samples);
    const double gt = g(t);
    if (prev_g == 0.0) {
      roots.push_back(prev_t);
    } else if (std::isfinite(prev_g) && std::isfinite(gt) && prev_g * gt < 0.0) {
      double a = prev_t, b = t, fa = prev_g;
      while (b - a > kRootTol * std::max(1.0, a)) {
        const double m = 0.5 * (a + b);
        const double fm = g(m);
        if (fm == 0.0) {
          a = b = m;
          break;
        }
        if (fa * fm < 0.0)
          b = m;
        else {
          a = m;
          fa = fm;
        }
      }
      roots.push_back(0.5 * (a + b));
    }
    prev_t = t;
    prev_g = gt;
  }
  return roots;
}

}  // namespace

double LandscapeCoeffs::value(double t) const {
  return a * t * t - b * std::pow(t, er) - c * std::pow(t, ep) - d * std::pow(t, eq);
}

double LandscapeCoeffs::deriv(double t) const {
  return 2.0 * a * t - b * er * std::pow(t, er - 1.0) - c * ep * std::pow(t, ep - 1.0) -
         d * eq * std::pow(t, eq - 1.0);
}

double LandscapeCoeffs::second(double t) const {
  return 2.0 * a - b * er * (er - 1.0) * std::pow(t, er - 2.0) -
         c * ep * (ep - 1.0) * std::pow(t, ep - 2.0) -
         d * eq * (eq - 1.0) * std::pow(t, eq - 2.0);
}

LandscapeCoeffs h_coeffs(const ProblemParams& params, const ThresholdData& thr) {
  const RegimeData reg = derive_regime(params);
  LandscapeCoeffs c;
  c.a = 0.5;
  c.b = thr.D1 * params.beta;
  c.c = thr.D2;
  c.d = thr.D3;
  c.er = params.r() * reg.gamma_r;
  c.ep = params.p * reg.gamma_p;
  c.eq = params.q * reg.gamma_q;
  return c;
}

LandscapeReport analyze(const LandscapeCoeffs& in) {
  if (!(in.a > 0.0) || in.b < 0.0 || in.c < 0.0 || in.d < 0.0)
    throw std::invalid_argument("analyze: coefficients must be nonnegative with a > 0");
  if (!(in.ep > 0.0 && in.eq > 0.0 && in.er > 0.0))
    throw std::invalid_argument("analyze: exponents must be positive");
  if (!(in.ep < 2.0 && in.eq > 2.0))
    throw std::invalid_argument("analyze: requires the exponent ordering ep < 2 < eq");

  // the mass-critical coupling exponent er = 2 merges into the quadratic
  LandscapeCoeffs c = in;
  if (std::abs(c.er - 2.0) < kCriticalExpEps) {
    c.a -= c.b;
    c.b = 0.0;
    c.er = 3.0;  // placeholder exponent with zero coefficient
  }

  LandscapeReport rep;
  if (c.a <= 0.0) return rep;  // strictly decreasing, nothing to locate

  std::vector<Term> terms;
  if (c.b > 0.0) terms.push_back({c.b, c.er});
  if (c.c > 0.0) terms.push_back({c.c, c.ep});
  if (c.d > 0.0) terms.push_back({c.d, c.eq});
  if (terms.empty()) return rep;  // pure quadratic

  const double a2 = 2.0 * c.a;
  double bal_lo = 1e300, bal_hi = 0.0;
  double t_scan = 0.0;
  for (const Term& t : terms) {
    const double bp = balance_point(a2, t);
    bal_lo = std::min(bal_lo, bp);
    bal_hi = std::max(bal_hi, bp);
    if (t.exp > 2.0) t_scan = std::max(t_scan, 10.0 * std::pow(a2 / t.coef, 1.0 / (t.exp - 2.0)));
  }
  if (t_scan == 0.0) t_scan = 8.0 * bal_hi;
  const double t_lo = bal_lo / 64.0;
  const double t_hi = std::max(t_scan, 8.0 * bal_hi);
  rep.t_scan = t_hi;

  const int samples = 8000;
  auto dl = [&](double t) { return c.deriv(t); };
  auto l = [&](double t) { return c.value(t); };
  std::vector<double> roots = scan_roots_log(dl, t_lo, t_hi, samples);
  if (roots.size() > 2)
    throw std::runtime_error("analyze: found " + std::to_string(roots.size()) +
                             " critical points; at most two are possible for this "
                             "exponent pattern, the scan or the coefficients are wrong");
  for (double t : roots)
    rep.critical_points.push_back({t, c.value(t), c.second(t) > 0.0});
  rep.zeros = scan_roots_log(l, t_lo, t_hi, samples);

  rep.structure_ok =
      rep.critical_points.size() == 2 && rep.critical_points[0].is_min &&
      rep.critical_points[0].value < 0.0 && !rep.critical_points[1].is_min &&
      rep.critical_points[1].value > 0.0 && rep.zeros.size() == 2 &&
      rep.critical_points[0].t < rep.zeros[0] && rep.zeros[0] < rep.critical_points[1].t &&
      rep.critical_points[1].t < rep.zeros[1] && l(t_lo) < 0.0 && l(t_hi) < 0.0;
  return rep;
}

double radius_R0(const LandscapeCoeffs& coeffs) {
  const LandscapeReport rep = analyze(coeffs);
  if (!rep.structure_ok)
    throw std::runtime_error("radius_R0: landscape does not have the two-critical-point "
                             "structure");
  return rep.zeros[0];
}

EffectiveThreshold effective_threshold(const ProblemParams& params, const GNConstants& gn,
                                       const std::vector<double>& sigma_grid) {
  EffectiveThreshold out;
  for (double sigma : sigma_grid) {
    ProblemParams scaled = params;
    scaled.a1 = params.a1 * sigma;
    scaled.a2 = params.a2 * sigma;
    const ThresholdData thr = compute_thresholds(scaled, gn);
    bool ok = false;
    try {
      ok = analyze(h_coeffs(scaled, thr)).structure_ok;
    } catch (const std::exception&) {
      ok = false;
    }
    out.tested.emplace_back(sigma, ok);
    if (ok && (!out.found || sigma > out.sigma)) {
      out.found = true;
      out.sigma = sigma;
      out.T = thr.T;
    }
  }
  return out;
}

}  // namespace normground
