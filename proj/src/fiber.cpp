#include "normground/fiber.hpp"

#include <cmath>
#include <stdexcept>

namespace normground {

namespace {

constexpr double kRootTol = 1e-12;
constexpr double kDegenerateRel = 1e-8;

// Sign-stable bracket of Phi'(s) / e^{2s}; roots coincide with Phi'.
double dphi_bracket(const FiberCoeffs& c, double s) {
  return c.K - c.ep * c.Bp * std::exp((c.ep - 2.0) * s) -
         c.eq * c.Bq * std::exp((c.eq - 2.0) * s) - c.er * c.Br * std::exp((c.er - 2.0) * s);
}

double phi_bracket(const FiberCoeffs& c, double s) {
  return 0.5 * c.K - c.Bp * std::exp((c.ep - 2.0) * s) - c.Bq * std::exp((c.eq - 2.0) * s) -
         c.Br * std::exp((c.er - 2.0) * s);
}

double ddphi_bracket(const FiberCoeffs& c, double s) {
  return 2.0 * c.K - c.ep * c.ep * c.Bp * std::exp((c.ep - 2.0) * s) -
         c.eq * c.eq * c.Bq * std::exp((c.eq - 2.0) * s) -
         c.er * c.er * c.Br * std::exp((c.er - 2.0) * s);
}

double ddphi_bracket_scale(const FiberCoeffs& c, double s) {
  return 2.0 * c.K + c.ep * c.ep * c.Bp * std::exp((c.ep - 2.0) * s) +
         c.eq * c.eq * c.Bq * std::exp((c.eq - 2.0) * s) +
         c.er * c.er * c.Br * std::exp((c.er - 2.0) * s);
}

template <class F>
std::vector<double> scan_roots(F&& g, double lo, double hi, int samples) {
  std::vector<double> roots;
  double prev_s = lo;
  double prev_g = g(lo);
  const double ds = (hi - lo) / samples;
  for (int i = 1; i <= samples; ++i) {
    const double s = lo + i * ds;
    const double gs = g(s);
    if (prev_g == 0.0) {
      roots.push_back(prev_s);
    } else if (std::isfinite(prev_g) && std::isfinite(gs) && prev_g * gs < 0.0) {
      double a = prev_s, b = s, fa = prev_g;
      while (b - a > kRootTol) {
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
    prev_s = s;
    prev_g = gs;
  }
  return roots;
}

}  // namespace

double FiberCoeffs::phi(double s) const {
  return 0.5 * K * std::exp(2.0 * s) - Bp * std::exp(ep * s) - Bq * std::exp(eq * s) -
         Br * std::exp(er * s);
}

double FiberCoeffs::dphi(double s) const {
  return K * std::exp(2.0 * s) - ep * Bp * std::exp(ep * s) - eq * Bq * std::exp(eq * s) -
         er * Br * std::exp(er * s);
}

double FiberCoeffs::ddphi(double s) const {
  return 2.0 * K * std::exp(2.0 * s) - ep * ep * Bp * std::exp(ep * s) -
         eq * eq * Bq * std::exp(eq * s) - er * er * Br * std::exp(er * s);
}

double FiberCoeffs::ddphi_scale(double s) const {
  return 2.0 * K * std::exp(2.0 * s) + ep * ep * Bp * std::exp(ep * s) +
         eq * eq * Bq * std::exp(eq * s) + er * er * Br * std::exp(er * s);
}

const char* fiber_class_name(FiberClass c) {
  switch (c) {
    case FiberClass::PlusMinus: return "PlusMinus";
    case FiberClass::UniqueMax: return "UniqueMax";
    case FiberClass::Degenerate: return "Degenerate";
    default: return "None";
  }
}

FiberCoeffs fiber_coeffs(const StatePair& pair, const ProblemParams& params) {
  const RegimeData reg = derive_regime(params);
  FiberCoeffs c;
  c.K = kinetic(pair.u) + kinetic(pair.v);
  c.Bp = params.mu1 / params.p *
         integrate(pair.grid(), pair.u.values().abs().pow(params.p));
  c.Bq = params.mu2 / params.q *
         integrate(pair.grid(), pair.v.values().abs().pow(params.q));
  c.Br = params.beta * coupling_integral(pair, params.r1, params.r2);
  c.ep = params.p * reg.gamma_p;
  c.eq = params.q * reg.gamma_q;
  c.er = params.r() * reg.gamma_r;
  return c;
}

double energy(const StatePair& pair, const ProblemParams& params) {
  return fiber_coeffs(pair, params).phi(0.0);
}

double pohozaev(const StatePair& pair, const ProblemParams& params) {
  return fiber_coeffs(pair, params).dphi(0.0);
}

FiberReport locate_critical_points(const FiberCoeffs& coeffs, Regime regime) {
  FiberReport rep;
  if (coeffs.K == 0.0 && coeffs.Bp == 0.0 && coeffs.Bq == 0.0 && coeffs.Br == 0.0) return rep;

  auto dbr = [&](double s) { return dphi_bracket(coeffs, s); };
  auto pbr = [&](double s) { return phi_bracket(coeffs, s); };

  const int expected = (regime == Regime::PurelySupercritical) ? 1
                       : (regime == Regime::MixedSubSuper)     ? 2
                                                               : -1;
  double window = 40.0;
  int samples = 4000;
  rep.roots = scan_roots(dbr, -window, window, samples);
  while (expected > 0 && static_cast<int>(rep.roots.size()) < expected && window < 100.0) {
    window = std::min(100.0, window * 2.5);
    samples *= 3;
    rep.roots = scan_roots(dbr, -window, window, samples);
  }
  rep.zeros = scan_roots(pbr, -window, window, samples);

  bool degenerate = false;
  for (double s : rep.roots) {
    const double dd = ddphi_bracket(coeffs, s);
    rep.phi_at_crit.push_back(coeffs.phi(s));
    rep.second_derivs.push_back(coeffs.ddphi(s));
    if (std::abs(dd) < kDegenerateRel * ddphi_bracket_scale(coeffs, s)) {
      degenerate = true;
      continue;
    }
    if (dd > 0.0)
      rep.s_minus = s;
    else if (!rep.t_max)
      rep.t_max = s;
  }

  if (degenerate)
    rep.classification = FiberClass::Degenerate;
  else if (rep.roots.size() == 2 && rep.s_minus && rep.t_max && *rep.s_minus < *rep.t_max)
    rep.classification = FiberClass::PlusMinus;
  else if (rep.roots.size() == 1 && rep.t_max)
    rep.classification = FiberClass::UniqueMax;
  else if (rep.roots.empty())
    rep.classification = FiberClass::None;
  else
    rep.classification = FiberClass::Degenerate;

  if (regime == Regime::PurelySupercritical && rep.roots.size() != 1)
    throw std::runtime_error("locate_critical_points: supercritical fiber map must have "
                             "exactly one critical point, found " +
                             std::to_string(rep.roots.size()));
  return rep;
}

FiberReport locate_critical_points(const StatePair& pair, const ProblemParams& params) {
  return locate_critical_points(fiber_coeffs(pair, params), derive_regime(params).regime);
}

std::vector<FiberSample> fiber_profile(const StatePair& pair, const ProblemParams& params,
                                       double s_lo, double s_hi, int samples) {
  if (samples < 2 || !(s_hi > s_lo))
    throw std::invalid_argument("fiber_profile: bad sampling range");
  const FiberCoeffs c = fiber_coeffs(pair, params);
  std::vector<FiberSample> out;
  out.reserve(samples);
  for (int i = 0; i < samples; ++i) {
    const double s = s_lo + (s_hi - s_lo) * i / (samples - 1);
    out.push_back({s, c.phi(s), c.dphi(s)});
  }
  return out;
}

StatePair project_to_pohozaev(const StatePair& pair, const ProblemParams& params,
                              FiberPoint which) {
  const FiberReport rep = locate_critical_points(pair, params);
  double t;
  if (which == FiberPoint::Minimizer) {
    if (!rep.s_minus)
      throw std::runtime_error("project_to_pohozaev: fiber map has no local minimizer");
    t = *rep.s_minus;
  } else {
    if (!rep.t_max)
      throw std::runtime_error("project_to_pohozaev: fiber map has no maximizer");
    t = *rep.t_max;
  }
  return StatePair(dilate(pair.u, t), dilate(pair.v, t));
}

}  // namespace normground
