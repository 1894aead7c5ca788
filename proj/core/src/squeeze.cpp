#include "fujita/squeeze.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fujita/errors.hpp"
#include "fujita/fujita.hpp"

namespace fujita {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
const double kE = std::exp(1.0);
}  // namespace

CriticalConstants critical_constants(double alpha, double m, double c, double c1, double c2, double c3, double c_prime,
                                     double C1) {
  CriticalConstants k;
  k.alpha = alpha;
  k.m = m;
  k.c = c;
  k.c1 = c1;
  k.c2 = c2;
  k.c3 = c3;
  k.c_prime = c_prime;
  k.C1 = C1;
  k.c_double_prime = kE * c * c_prime / c2;
  k.C2 = std::pow(c2, alpha) * std::pow(C1, 1.0 + alpha) / (kE * std::pow(c, alpha));
  k.C3 = k.C2 * c2 / (std::pow(2.0, m / 2.0) * c);
  k.upper = c * c1 * k.c_double_prime;
  return k;
}

double critical_lower(const CriticalConstants& k, double t, double r) {
  const double x = t / (k.c3 * k.alpha * r * r);
  if (!(x >= 1.0)) return kNaN;
  return k.C3 * std::log(x);
}

SubcriticalConstants subcritical_constants(double alpha, double c_lower, double c_upper, double c1, double c2, double c3,
                                           double zeta, double eta, double c_prime, double C1, double a0, double r) {
  SubcriticalConstants k;
  k.alpha = alpha;
  k.c_lower = c_lower;
  k.c_upper = c_upper;
  k.c1 = c1;
  k.c2 = c2;
  k.c3 = c3;
  k.zeta = zeta;
  k.eta = eta;
  k.c_prime = c_prime;
  k.C1 = C1;
  k.a0 = a0;
  k.r = r;
  k.c_double_prime = kE * c_upper * c_prime / c2;
  k.exponent = eta * (1.0 + alpha) + zeta;
  k.b = k.exponent > 0.0 ? (1.0 + alpha) / k.exponent : std::numeric_limits<double>::infinity();
  const double two_power = std::pow(2.0, (eta - 1.0 / alpha) * (1.0 + alpha) + zeta);
  const double inner = std::pow(a0, alpha) * c2 * C1 / c_upper;
  const double log_term = std::log(std::sqrt(c3 * r * r));
  k.C_tilde = c_lower * two_power / ((2.0 + alpha) * c1 * k.c_double_prime) * std::pow(inner, 1.0 + alpha) *
              std::pow(log_term, -eta);
  return k;
}

double subcritical_lower(const SubcriticalConstants& k, double t) {
  if (!(t > 0.0)) return kNaN;
  if (k.exponent == 0.0) return k.C_tilde * std::pow(t, 1.0 + k.alpha);
  const double log2t = std::log(2.0 * t);
  if (!(log2t > 0.0)) return kNaN;
  return k.C_tilde * std::pow(std::pow(t, k.b) / log2t, k.exponent);
}

std::string to_string(SqueezeRegime regime) {
  return regime == SqueezeRegime::Critical ? "c1-critical" : "c2-subcritical";
}

SqueezeReport squeeze_report(const WeightedGraph& g, std::span<const double> a, double alpha, Vertex x0,
                             const SqueezeFits& fits, std::span<const double> t_grid, int r, SqueezeRegime regime,
                             double product_tol) {
  require(alpha > 0.0, ErrorCode::InvalidArgument, "alpha must be positive");
  require(a.size() == g.size(), ErrorCode::InvalidArgument, "data must be indexed by graph vertex");
  g.check(x0);
  if (!fits.gaussian) fail(ErrorCode::MissingFit, "squeeze report needs a Gaussian fit");
  if (!fits.volume) fail(ErrorCode::MissingFit, "squeeze report needs a volume-growth fit");
  const GaussianFit& gf = *fits.gaussian;
  const VolumeGrowthFit& vf = *fits.volume;
  if (regime == SqueezeRegime::Subcritical && vf.regime != GrowthRegime::LogCorrected)
    fail(ErrorCode::MissingFit, "the subcritical report needs a log-corrected volume fit");
  require(gf.c2 > 0.0 && gf.c3 > 0.0 && gf.c1 > 0.0, ErrorCode::MissingFit, "Gaussian fit constants must be positive");
  require(a[x0] > 0.0, ErrorCode::InvalidArgument, "a(x0) must be positive");

  SqueezeReport rep;
  rep.regime = regime;
  rep.alpha = alpha;
  rep.x0 = x0;
  rep.r = r;
  rep.caveat = kFittedConstantsCaveat;
  const double r0 = static_cast<double>(vf.r_min);
  rep.rho = std::max(gf.t0, r0 * r0);
  rep.validity_radius = std::sqrt(rep.rho / gf.c3);
  if (regime == SqueezeRegime::Critical)
    rep.validity_radius = std::max(rep.validity_radius, std::sqrt(rep.rho / (gf.c3 * alpha)));
  if (!(static_cast<double>(r) > rep.validity_radius))
    fail(ErrorCode::RadiusBelowValidity,
         "radius " + std::to_string(r) + " is not above the validity radius " + std::to_string(rep.validity_radius));

  const double c_prime = fujita_product(alpha, product_tol).value;
  const double C1 = g.measure(x0) * a[x0];
  const double rr = static_cast<double>(r);
  rep.t_grid.assign(t_grid.begin(), t_grid.end());

  if (regime == SqueezeRegime::Critical) {
    const auto k = critical_constants(alpha, vf.m, vf.c(), gf.c1, gf.c2, gf.c3, c_prime, C1);
    rep.critical = k;
    rep.log_t_star = std::log(gf.c3 * alpha * rr * rr) + k.upper / k.C3;
    for (double t : t_grid) {
      const double lo = t > rep.rho ? critical_lower(k, t, rr) : kNaN;
      rep.lower.push_back(lo);
      rep.upper.push_back(k.upper);
      if (!rep.t_star && lo > k.upper) rep.t_star = t;
    }
  } else {
    const double a0 = *std::min_element(a.begin(), a.end());
    const auto k = subcritical_constants(alpha, vf.c_lower_log, vf.c_upper_log, gf.c1, gf.c2, gf.c3, vf.zeta, vf.eta,
                                         c_prime, C1, a0, rr);
    rep.subcritical = k;
    for (double t : t_grid) {
      const double lo = t > rep.rho ? subcritical_lower(k, t) : kNaN;
      rep.lower.push_back(lo);
      rep.upper.push_back(1.0);
      if (!rep.t_star && lo > 1.0) rep.t_star = t;
    }
  }
  return rep;
}

}  // namespace fujita
