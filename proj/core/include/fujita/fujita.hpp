#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "fujita/graph.hpp"
#include "fujita/heat_kernel.hpp"

namespace fujita {

struct FujitaProduct {
  double alpha = 0.0;
  double value = 0.0;       // C' = prod_{i=2}^{N} (((1+a)^i - 1)/a)^{(1+a)^-i}
  std::size_t terms = 0;    // N
  double tail_bound = 0.0;  // sum_{i>N} (1+a)^-i log(i (1+a)^i), bounds log C'_inf - log C'_N
  std::vector<double> partial_products;  // entry k is the product up to i = k + 2
};

/// log of the i-th factor, (1+a)^-i log(((1+a)^i - 1)/a).
double fujita_log_term(double alpha, std::size_t i);
/// (1+a)^-i log(i (1+a)^i), which dominates fujita_log_term.
double fujita_majorant_term(double alpha, std::size_t i);
/// sum_{i>N} fujita_majorant_term(alpha, i).
double fujita_tail_bound(double alpha, std::size_t N);

/// Smallest N >= 2 with tail bound < tol.
FujitaProduct fujita_product(double alpha, double tol = 1e-12);

inline constexpr const char* kFittedConstantsCaveat =
    "relative to fitted constants: heat-kernel and volume constants are empirical fits, not proven bounds";

struct CertificateOptions {
  double tol = 1e-10;        // exhaustion tolerance per grid point
  double product_tol = 1e-12;
  /// Throw TruncationExhausted on any unconverged point instead of using
  /// the largest-ball value, which is a lower bound for a >= 0.
  bool strict = false;
};

struct FujitaCertificate {
  double alpha = 0.0;
  Vertex x0 = 0;
  std::vector<double> t_grid;
  std::vector<double> values;      // t^{1/alpha} P_t a(x0)
  std::vector<char> converged;     // 0 where `values` is only a lower bound
  std::vector<int> radii;          // exhaustion radius per point
  double sup_value = 0.0;
  double sup_t = 0.0;
  double c_prime = 0.0;
  bool fired = false;              // sup_value > c_prime
  int max_radius_used = 0;
  bool all_converged = true;
};

/// Geometric grid from t_min to t_max with the given ratio (t_max included
/// when it lands on the grid up to rounding).
std::vector<double> geometric_grid(double t_min, double t_max, double ratio);
/// 1 to 1e4, ratio 2^{1/4}.
std::vector<double> default_certificate_grid();

/// `a` is indexed by graph vertex. A fired certificate means no non-negative
/// global solution exists (given D_mu < inf); a non-fired one proves nothing.
FujitaCertificate small_data_certificate(const WeightedGraph& g, std::span<const double> a, double alpha, Vertex x0,
                                      std::span<const double> t_grid, const CertificateOptions& options = {});

struct VolumeGrowthFit;

struct MassBoundEntry {
  int r = 0;
  double mass = 0.0;   // sum_{B_r} mu a
  double bound = 0.0;  // C'' or C'' (log sqrt(c3 r^2))^eta
  bool exceeds = false;
};

struct MassBoundReport {
  bool log_corrected = false;
  double c_double_prime = 0.0;  // C''
  double rho = 0.0;             // max{t0, r0^2}
  double min_radius = 0.0;      // sqrt(rho / c3)
  std::vector<MassBoundEntry> entries;
};

/// Compares the initial mass on B_r with C'' = e c C'/c2 (polynomial regime,
/// c = max(c_low, c_high)) or with C''(log sqrt(c3 r^2))^eta,
/// C'' = e c'' C'/c2 (log-corrected regime). RadiusBelowValidity unless
/// every r > sqrt(rho / c3).
MassBoundReport initial_mass_bound(const WeightedGraph& g, std::span<const double> a, Vertex x0,
                                   std::span<const int> r_list, const GaussianFit& fit, double c_prime,
                                   const VolumeGrowthFit& volume_fit);

/// G(t, r) = sum_{y in B_r} mu(y) p(t, x0, y) u(y), with u indexed by graph vertex.
double g_functional(const WeightedGraph& g, Vertex x0, double t, int r, std::span<const double> u,
                    double tol = 1e-10);
double g_functional(Exhaustion& ex, double t, int r, std::span<const double> u, const ExhaustionOptions& options);

}  // namespace fujita
