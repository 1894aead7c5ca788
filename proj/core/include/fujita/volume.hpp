#pragma once

#include <optional>
#include <vector>

#include "fujita/graph.hpp"

namespace fujita {

enum class GrowthRegime {
  Polynomial,    // c^-1 r^m <= V(x0, r) <= c r^m
  LogCorrected,  // c' r^m log^-zeta r <= V(x0, r) <= c'' r^m log^eta r
};

struct VolumeGrowthFit {
  Vertex x0 = 0;
  int r_min = 0;
  int r_max = 0;
  GrowthRegime regime = GrowthRegime::Polynomial;
  double m_hat = 0.0;      // least-squares slope of log V on log r
  double m = 0.0;          // degree used for the brackets (m_hat unless fixed)
  double intercept = 0.0;  // of the least-squares fit
  double c_low = 0.0;      // c_low^-1 r^m <= V
  double c_high = 0.0;     // V <= c_high r^m
  double zeta = 0.0;
  double eta = 0.0;
  double c_lower_log = 0.0;  // c'
  double c_upper_log = 0.0;  // c''
  std::vector<int> radii;
  std::vector<double> volumes;
  std::vector<double> residuals;  // log V minus the least-squares prediction

  /// max(c_low, c_high): the single constant of the two-sided polynomial bound.
  double c() const { return c_low > c_high ? c_low : c_high; }
};

/// Least squares on (log r, log V) over every integer r in [r_min, r_max].
/// The log-corrected regime also regresses on log log r and splits the
/// coefficient into its positive (eta) and negative (zeta) parts, with m = m_hat.
/// `fixed_m` replaces m_hat in the brackets.
VolumeGrowthFit volume_growth_fit(const WeightedGraph& g, Vertex x0, int r_min, int r_max, GrowthRegime regime,
                                  std::optional<double> fixed_m = std::nullopt);

}  // namespace fujita
