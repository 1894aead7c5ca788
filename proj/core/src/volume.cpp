#include "fujita/volume.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Dense>

#include "fujita/errors.hpp"

namespace fujita {

VolumeGrowthFit volume_growth_fit(const WeightedGraph& g, Vertex x0, int r_min, int r_max, GrowthRegime regime,
                                  std::optional<double> fixed_m) {
  g.check(x0);
  require(r_min >= 2, ErrorCode::InvalidArgument, "r_min must be at least 2");
  require(r_max >= r_min, ErrorCode::InvalidArgument, "r_max must be at least r_min");
  require(r_max > r_min, ErrorCode::DegenerateFit, "a single radius does not determine a growth degree");
  if (regime == GrowthRegime::LogCorrected)
    require(r_max - r_min >= 2 || fixed_m.has_value(), ErrorCode::DegenerateFit,
            "the log-corrected fit needs at least three radii");
  const int limit = max_valid_radius(g, x0);
  if (r_max > limit)
    fail(ErrorCode::TruncationTooSmall,
         "radius " + std::to_string(r_max) + " exceeds the truncation (max " + std::to_string(limit) + ")");

  // Volumes by depth from a single BFS.
  const auto depth = distances_from(g, x0, r_max);
  std::vector<double> shell(static_cast<std::size_t>(r_max) + 1, 0.0);
  for (Vertex v = 0; v < g.size(); ++v)
    if (depth[v] >= 0) shell[static_cast<std::size_t>(depth[v])] += g.measure(v);

  VolumeGrowthFit fit;
  fit.x0 = x0;
  fit.r_min = r_min;
  fit.r_max = r_max;
  fit.regime = regime;
  double running = 0.0;
  for (int r = 0; r <= r_max; ++r) {
    running += shell[static_cast<std::size_t>(r)];
    if (r >= r_min) {
      fit.radii.push_back(r);
      fit.volumes.push_back(running);
    }
  }

  const auto n = static_cast<Eigen::Index>(fit.radii.size());
  Eigen::VectorXd log_r(n), log_log_r(n), log_v(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double r = static_cast<double>(fit.radii[static_cast<std::size_t>(i)]);
    log_r[i] = std::log(r);
    log_log_r[i] = std::log(std::log(r));
    log_v[i] = std::log(fit.volumes[static_cast<std::size_t>(i)]);
  }

  // Polynomial least squares, always reported as m_hat.
  {
    Eigen::MatrixXd A(n, 2);
    A.col(0).setOnes();
    A.col(1) = log_r;
    const Eigen::VectorXd coef = A.colPivHouseholderQr().solve(log_v);
    fit.intercept = coef[0];
    fit.m_hat = coef[1];
  }
  fit.m = fixed_m.value_or(fit.m_hat);

  double gamma = 0.0;
  Eigen::VectorXd predicted;
  if (regime == GrowthRegime::LogCorrected) {
    if (fixed_m) {
      Eigen::MatrixXd A(n, 2);
      A.col(0).setOnes();
      A.col(1) = log_log_r;
      const Eigen::VectorXd coef = A.colPivHouseholderQr().solve(log_v - fit.m * log_r);
      gamma = coef[1];
      predicted = coef[0] + fit.m * log_r.array() + gamma * log_log_r.array();
    } else {
      Eigen::MatrixXd A(n, 3);
      A.col(0).setOnes();
      A.col(1) = log_r;
      A.col(2) = log_log_r;
      const Eigen::VectorXd coef = A.colPivHouseholderQr().solve(log_v);
      fit.m = coef[1];
      gamma = coef[2];
      predicted = coef[0] + coef[1] * log_r.array() + gamma * log_log_r.array();
    }
    fit.eta = std::max(gamma, 0.0);
    fit.zeta = std::max(-gamma, 0.0);
  } else {
    predicted = fit.intercept + fit.m_hat * log_r.array();
  }
  fit.residuals.resize(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) fit.residuals[static_cast<std::size_t>(i)] = log_v[i] - predicted[i];

  // Extremal ratios make the brackets hold at every fitted radius.
  double ratio_min = std::numeric_limits<double>::infinity(), ratio_max = 0.0;
  double lower_log = std::numeric_limits<double>::infinity(), upper_log = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double v = fit.volumes[static_cast<std::size_t>(i)];
    const double rm = std::exp(fit.m * log_r[i]);
    ratio_min = std::min(ratio_min, v / rm);
    ratio_max = std::max(ratio_max, v / rm);
    const double lr = log_r[i];
    lower_log = std::min(lower_log, v * std::pow(lr, fit.zeta) / rm);
    upper_log = std::max(upper_log, v / (rm * std::pow(lr, fit.eta)));
  }
  fit.c_low = 1.0 / ratio_min;
  fit.c_high = ratio_max;
  fit.c_lower_log = lower_log;
  fit.c_upper_log = upper_log;
  return fit;
}

}  // namespace fujita
