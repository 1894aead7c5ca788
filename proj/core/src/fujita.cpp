#include "fujita/fujita.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "fujita/errors.hpp"
#include "fujita/parallel.hpp"
#include "fujita/volume.hpp"

namespace fujita {

namespace {

void require_alpha(double alpha) {
  require(alpha > 0.0 && std::isfinite(alpha), ErrorCode::InvalidArgument, "alpha must be positive");
}

void require_data(std::span<const double> a, const WeightedGraph& g) {
  require(a.size() == g.size(), ErrorCode::InvalidArgument, "data must be indexed by graph vertex");
  bool nontrivial = false;
  for (double v : a) {
    require(v >= 0.0 && std::isfinite(v), ErrorCode::InvalidArgument, "data must be finite and >= 0");
    nontrivial = nontrivial || v > 0.0;
  }
  require(nontrivial, ErrorCode::InvalidArgument, "data is identically zero");
}

// Majorant terms for i = first, first+1, ... until they stop mattering.
std::vector<double> majorant_terms(double alpha, std::size_t first) {
  std::vector<double> terms;
  double total = 0.0;
  double previous = std::numeric_limits<double>::infinity();
  for (std::size_t i = first;; ++i) {
    const double term = fujita_majorant_term(alpha, i);
    terms.push_back(term);
    total += term;
    if (term < previous && (term < 1e-18 * total || term < 1e-300)) break;
    previous = term;
  }
  return terms;
}

}  // namespace

double fujita_log_term(double alpha, std::size_t i) {
  const double L = static_cast<double>(i) * std::log1p(alpha);
  // log(((1+a)^i - 1)/a) = L + log(1 - e^-L) - log a
  return std::exp(-L) * (L + std::log(-std::expm1(-L)) - std::log(alpha));
}

double fujita_majorant_term(double alpha, std::size_t i) {
  const double L = static_cast<double>(i) * std::log1p(alpha);
  return std::exp(-L) * (std::log(static_cast<double>(i)) + L);
}

double fujita_tail_bound(double alpha, std::size_t N) {
  require_alpha(alpha);
  const auto terms = majorant_terms(alpha, N + 1);
  double sum = 0.0;
  for (auto it = terms.rbegin(); it != terms.rend(); ++it) sum += *it;
  return sum;
}

FujitaProduct fujita_product(double alpha, double tol) {
  require_alpha(alpha);
  require(tol > 0.0, ErrorCode::InvalidArgument, "tol must be positive");
  // suffix[k] = sum of majorant terms for i >= k + 3, i.e. the tail after N = k + 2.
  const auto terms = majorant_terms(alpha, 3);
  std::vector<double> suffix(terms.size() + 1, 0.0);
  for (std::size_t k = terms.size(); k-- > 0;) suffix[k] = suffix[k + 1] + terms[k];

  FujitaProduct out;
  out.alpha = alpha;
  double log_sum = 0.0;
  for (std::size_t N = 2;; ++N) {
    log_sum += fujita_log_term(alpha, N);
    out.partial_products.push_back(std::exp(log_sum));
    const std::size_t k = N - 2;
    const double tail = k < suffix.size() ? suffix[k] : 0.0;
    if (tail < tol) {
      out.terms = N;
      out.tail_bound = tail;
      out.value = out.partial_products.back();
      return out;
    }
  }
}

std::vector<double> geometric_grid(double t_min, double t_max, double ratio) {
  require(t_min > 0.0 && t_max >= t_min && ratio > 1.0, ErrorCode::InvalidArgument,
          "geometric grid needs 0 < t_min <= t_max and ratio > 1");
  std::vector<double> grid;
  const double steps = std::log(t_max / t_min) / std::log(ratio);
  const auto n = static_cast<std::size_t>(std::floor(steps + 1e-9));
  for (std::size_t k = 0; k <= n; ++k) grid.push_back(t_min * std::pow(ratio, static_cast<double>(k)));
  if (std::abs(grid.back() - t_max) <= 1e-9 * t_max) grid.back() = t_max;
  return grid;
}

std::vector<double> default_certificate_grid() { return geometric_grid(1.0, 1e4, std::pow(2.0, 0.25)); }

FujitaCertificate small_data_certificate(const WeightedGraph& g, std::span<const double> a, double alpha, Vertex x0,
                                      std::span<const double> t_grid, const CertificateOptions& options) {
  require_alpha(alpha);
  require_data(a, g);
  g.check(x0);
  require(!t_grid.empty(), ErrorCode::InvalidArgument, "time grid is empty");
  for (std::size_t k = 0; k < t_grid.size(); ++k)
    require(t_grid[k] > 0.0 && (k == 0 || t_grid[k] > t_grid[k - 1]), ErrorCode::InvalidArgument,
            "time grid must be positive and increasing");

  FujitaCertificate cert;
  cert.alpha = alpha;
  cert.x0 = x0;
  cert.t_grid.assign(t_grid.begin(), t_grid.end());
  const std::size_t n = t_grid.size();
  cert.values.assign(n, 0.0);
  cert.converged.assign(n, 1);
  cert.radii.assign(n, 0);

  Exhaustion ex(g, x0);
  ExhaustionOptions ex_options;
  ex_options.tol = options.tol;
  parallel_for(n, [&](std::size_t k) {
    const double t = t_grid[k];
    double value = 0.0;
    try {
      const auto r = semigroup_at_center(ex, t, a, ex_options);
      value = r.value;
      cert.radii[k] = r.radius;
    } catch (const TruncationExhausted& e) {
      if (options.strict || !std::isfinite(e.last_value())) throw;
      value = e.last_value();
      cert.radii[k] = e.last_radius();
      cert.converged[k] = 0;
    }
    cert.values[k] = std::pow(t, 1.0 / alpha) * value;
  });

  cert.c_prime = fujita_product(alpha, options.product_tol).value;
  for (std::size_t k = 0; k < n; ++k) {
    if (k == 0 || cert.values[k] > cert.sup_value) {
      cert.sup_value = cert.values[k];
      cert.sup_t = t_grid[k];
    }
    cert.max_radius_used = std::max(cert.max_radius_used, cert.radii[k]);
    cert.all_converged = cert.all_converged && cert.converged[k] != 0;
  }
  cert.fired = cert.sup_value > cert.c_prime;
  return cert;
}

MassBoundReport initial_mass_bound(const WeightedGraph& g, std::span<const double> a, Vertex x0,
                                   std::span<const int> r_list, const GaussianFit& fit, double c_prime,
                                   const VolumeGrowthFit& volume_fit) {
  require(a.size() == g.size(), ErrorCode::InvalidArgument, "data must be indexed by graph vertex");
  require(fit.c2 > 0.0 && fit.c3 > 0.0, ErrorCode::MissingFit, "Gaussian fit has no usable c2, c3");
  require(c_prime > 0.0, ErrorCode::InvalidArgument, "C' must be positive");

  MassBoundReport report;
  report.log_corrected = volume_fit.regime == GrowthRegime::LogCorrected;
  const double r0 = static_cast<double>(volume_fit.r_min);
  report.rho = std::max(fit.t0, r0 * r0);
  report.min_radius = std::sqrt(report.rho / fit.c3);
  const double c = report.log_corrected ? volume_fit.c_upper_log : volume_fit.c();
  report.c_double_prime = std::exp(1.0) * c * c_prime / fit.c2;

  for (int r : r_list) {
    if (!(static_cast<double>(r) > report.min_radius))
      fail(ErrorCode::RadiusBelowValidity, "radius " + std::to_string(r) + " is not above sqrt(rho/c3) = " +
                                               std::to_string(report.min_radius));
    const Ball b = ball(g, x0, r);
    MassBoundEntry e;
    e.r = r;
    for (Vertex v : b.members()) e.mass += g.measure(v) * a[v];
    e.bound = report.c_double_prime;
    if (report.log_corrected) {
      const double rr = static_cast<double>(r);
      e.bound *= std::pow(std::log(std::sqrt(fit.c3 * rr * rr)), volume_fit.eta);
    }
    e.exceeds = e.mass > e.bound;
    report.entries.push_back(e);
  }
  return report;
}

double g_functional(Exhaustion& ex, double t, int r, std::span<const double> u, const ExhaustionOptions& options) {
  const WeightedGraph& g = ex.graph();
  require(u.size() == g.size(), ErrorCode::InvalidArgument, "u must be indexed by graph vertex");
  const auto row = heat_kernel_row(ex, t, r, options);
  double acc = 0.0;
  for (std::size_t j = 0; j < row.vertices.size(); ++j) {
    const Vertex v = row.vertices[j];
    acc += g.measure(v) * row.values[j] * u[v];
  }
  return acc;
}

double g_functional(const WeightedGraph& g, Vertex x0, double t, int r, std::span<const double> u, double tol) {
  Exhaustion ex(g, x0);
  ExhaustionOptions options;
  options.tol = tol;
  return g_functional(ex, t, r, u, options);
}

}  // namespace fujita
