#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fujita/graph.hpp"
#include "fujita/heat_kernel.hpp"
#include "fujita/volume.hpp"

namespace fujita {

/// Constants of the critical-exponent squeeze
///   t^{m/2} G(t, r) <= c c1 C''           (upper)
///   t^{m/2} G(t, r) >= C3 log(t / (c3 alpha r^2))   (lower)
struct CriticalConstants {
  double alpha = 0.0, m = 0.0;
  double c = 0.0, c1 = 0.0, c2 = 0.0, c3 = 0.0;
  double c_prime = 0.0;         // C'
  double C1 = 0.0;              // mu(x0) a(x0)
  double c_double_prime = 0.0;  // e c C' / c2
  double C2 = 0.0;              // c2^alpha C1^{1+alpha} / (e c^alpha)
  double C3 = 0.0;              // C2 c2 / (2^{m/2} c)
  double upper = 0.0;           // c c1 C''
};

CriticalConstants critical_constants(double alpha, double m, double c, double c1, double c2, double c3, double c_prime,
                                     double C1);
/// C3 log(t / (c3 alpha r^2)); NaN for t < c3 alpha r^2.
double critical_lower(const CriticalConstants& k, double t, double r);

/// Constants of the log-corrected squeeze C~ (t^b / log 2t)^{eta(1+alpha)+zeta} <= 1.
struct SubcriticalConstants {
  double alpha = 0.0;
  double c_lower = 0.0, c_upper = 0.0;  // c', c''
  double c1 = 0.0, c2 = 0.0, c3 = 0.0;
  double zeta = 0.0, eta = 0.0;
  double c_prime = 0.0, C1 = 0.0, a0 = 0.0, r = 0.0;
  double c_double_prime = 0.0;  // e c'' C' / c2
  double exponent = 0.0;        // eta(1+alpha) + zeta
  double b = 0.0;               // (1+alpha)/exponent, infinite when exponent = 0
  double C_tilde = 0.0;
};

SubcriticalConstants subcritical_constants(double alpha, double c_lower, double c_upper, double c1, double c2, double c3,
                                           double zeta, double eta, double c_prime, double C1, double a0, double r);
/// C~ (t^b / log 2t)^{exponent}, or C~ t^{1+alpha} when the exponent is 0.
double subcritical_lower(const SubcriticalConstants& k, double t);

enum class SqueezeRegime { Critical, Subcritical };

struct SqueezeFits {
  std::optional<GaussianFit> gaussian;
  std::optional<VolumeGrowthFit> volume;
};

struct SqueezeReport {
  SqueezeRegime regime = SqueezeRegime::Critical;
  double alpha = 0.0;
  Vertex x0 = 0;
  int r = 0;
  double rho = 0.0;             // max{t0, r0^2}
  double validity_radius = 0.0; // r must exceed this
  std::optional<CriticalConstants> critical;
  std::optional<SubcriticalConstants> subcritical;
  std::vector<double> t_grid;
  std::vector<double> lower;  // NaN where the lower bound does not apply
  std::vector<double> upper;  // constant c c1 C'' (critical) or 1 (subcritical)
  std::optional<double> t_star;
  /// Critical regime: log of the exact crossing time c3 alpha r^2 exp(upper/C3).
  std::optional<double> log_t_star;
  std::string caveat;
};

/// Assembles both bound curves from the fitted constants. `a` is indexed by
/// graph vertex; the subcritical regime uses a0 = inf a over the graph.
/// MissingFit if a fit is absent; RadiusBelowValidity unless r exceeds
/// max{sqrt(rho/(c3 alpha)), sqrt(rho/c3)}.
SqueezeReport squeeze_report(const WeightedGraph& g, std::span<const double> a, double alpha, Vertex x0,
                             const SqueezeFits& fits, std::span<const double> t_grid, int r, SqueezeRegime regime,
                             double product_tol = 1e-12);

std::string to_string(SqueezeRegime regime);

}  // namespace fujita
