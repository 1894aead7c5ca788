#include "fujita/operators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "fujita/errors.hpp"
#include "fujita/parallel.hpp"

namespace fujita {

namespace {

void check_size(const WeightedGraph& g, std::span<const double> f) {
  if (f.size() != g.size())
    fail(ErrorCode::InvalidArgument, "function has " + std::to_string(f.size()) + " values for " +
                                         std::to_string(g.size()) + " vertices");
}

void require_full_neighbourhood(const WeightedGraph& g, Vertex x) {
  g.check(x);
  if (g.is_cut(x))
    fail(ErrorCode::MissingNeighborValue, "vertex " + g.label(x) + " lost neighbours to the truncation");
}

double laplacian_at(const WeightedGraph& g, std::span<const double> f, Vertex x) {
  double acc = 0.0;
  for (const auto& nb : g.neighbors(x)) acc += nb.weight * (f[nb.vertex] - f[x]);
  return acc / g.measure(x);
}

double gamma_at(const WeightedGraph& g, std::span<const double> f, std::span<const double> h, Vertex x) {
  double acc = 0.0;
  for (const auto& nb : g.neighbors(x)) acc += nb.weight * (f[nb.vertex] - f[x]) * (h[nb.vertex] - h[x]);
  return acc / (2.0 * g.measure(x));
}

// Gamma(f, q)(x) where q is only known on x and its neighbours; `local`
// holds q(x) followed by q(y) in neighbour order.
double gamma_local(const WeightedGraph& g, std::span<const double> f, std::span<const double> local, Vertex x) {
  double acc = 0.0;
  std::size_t k = 1;
  for (const auto& nb : g.neighbors(x)) {
    acc += nb.weight * (f[nb.vertex] - f[x]) * (local[k] - local[0]);
    ++k;
  }
  return acc / (2.0 * g.measure(x));
}

double laplacian_local(const WeightedGraph& g, std::span<const double> local, Vertex x) {
  double acc = 0.0;
  std::size_t k = 1;
  for (const auto& nb : g.neighbors(x)) {
    acc += nb.weight * (local[k] - local[0]);
    ++k;
  }
  return acc / g.measure(x);
}

void require_two_hops(const WeightedGraph& g, Vertex x) {
  require_full_neighbourhood(g, x);
  for (const auto& nb : g.neighbors(x)) {
    if (g.is_cut(nb.vertex))
      fail(ErrorCode::MissingNeighborValue, "2-hop neighbourhood of " + g.label(x) + " reaches the truncation at " +
                                                g.label(nb.vertex));
  }
}

double gamma2_unchecked(const WeightedGraph& g, std::span<const double> f, std::span<const double> h, Vertex x) {
  const auto nbs = g.neighbors(x);
  std::vector<double> gamma_fh(nbs.size() + 1), lap_f(nbs.size() + 1), lap_h(nbs.size() + 1);
  gamma_fh[0] = gamma_at(g, f, h, x);
  lap_f[0] = laplacian_at(g, f, x);
  lap_h[0] = laplacian_at(g, h, x);
  for (std::size_t k = 0; k < nbs.size(); ++k) {
    gamma_fh[k + 1] = gamma_at(g, f, h, nbs[k].vertex);
    lap_f[k + 1] = laplacian_at(g, f, nbs[k].vertex);
    lap_h[k + 1] = laplacian_at(g, h, nbs[k].vertex);
  }
  const double lap_gamma = laplacian_local(g, gamma_fh, x);
  const double f_lap_h = gamma_local(g, f, lap_h, x);
  const double lap_f_h = gamma_local(g, h, lap_f, x);
  return 0.5 * (lap_gamma - f_lap_h - lap_f_h);
}

double cde_residual_unchecked(const WeightedGraph& g, Vertex x, double n, double curvature, std::span<const double> f) {
  const auto nbs = g.neighbors(x);
  std::vector<double> ratio(nbs.size() + 1);
  ratio[0] = gamma_at(g, f, f, x) / f[x];
  for (std::size_t k = 0; k < nbs.size(); ++k) {
    const Vertex y = nbs[k].vertex;
    ratio[k + 1] = gamma_at(g, f, f, y) / f[y];
  }
  double log_lap = 0.0;
  for (const auto& nb : nbs) log_lap += nb.weight * (std::log(f[nb.vertex]) - std::log(f[x]));
  log_lap /= g.measure(x);

  const double gamma_f = gamma_at(g, f, f, x);
  const double lhs = gamma2_unchecked(g, f, f, x) - gamma_local(g, f, ratio, x);
  const double rhs = f[x] * f[x] * log_lap * log_lap / n + curvature * gamma_f;
  return lhs - rhs;
}

std::vector<Vertex> two_hop_members(const WeightedGraph& g, Vertex x) {
  std::vector<Vertex> out{x};
  for (const auto& nb : g.neighbors(x)) {
    out.push_back(nb.vertex);
    for (const auto& nb2 : g.neighbors(nb.vertex)) out.push_back(nb2.vertex);
  }
  std::sort(out.begin() + 1, out.end());
  out.erase(std::unique(out.begin() + 1, out.end()), out.end());
  out.erase(std::remove(out.begin() + 1, out.end(), x), out.end());
  return out;  // x first, then the rest ascending
}

}  // namespace

double laplacian_apply(const WeightedGraph& g, std::span<const double> f, Vertex x) {
  check_size(g, f);
  require_full_neighbourhood(g, x);
  return laplacian_at(g, f, x);
}

double gamma(const WeightedGraph& g, std::span<const double> f, std::span<const double> h, Vertex x) {
  check_size(g, f);
  check_size(g, h);
  require_full_neighbourhood(g, x);
  return gamma_at(g, f, h, x);
}

double gamma2(const WeightedGraph& g, std::span<const double> f, std::span<const double> h, Vertex x) {
  check_size(g, f);
  check_size(g, h);
  require_two_hops(g, x);
  return gamma2_unchecked(g, f, h, x);
}

bool has_two_hop_neighbourhood(const WeightedGraph& g, Vertex x) {
  if (g.is_cut(x)) return false;
  for (const auto& nb : g.neighbors(x)) {
    if (g.is_cut(nb.vertex)) return false;
  }
  return true;
}

double cde_residual(const WeightedGraph& g, Vertex x, double n, double curvature, std::span<const double> f) {
  check_size(g, f);
  require_two_hops(g, x);
  if (!(n > 0.0)) fail(ErrorCode::InvalidArgument, "dimension parameter n must be positive");
  for (Vertex y : two_hop_members(g, x)) {
    if (!(f[y] > 0.0))
      fail(ErrorCode::NonpositiveTestFunction, "test function is " + std::to_string(f[y]) + " at " + g.label(y));
  }
  return cde_residual_unchecked(g, x, n, curvature, f);
}

DirichletOperator::DirichletOperator(Ball b) : ball_(std::move(b)) {
  const auto interior = ball_.interior();
  if (interior.empty())
    fail(ErrorCode::EmptyInterior, "B_" + std::to_string(ball_.radius()) + "(" + ball_.graph().label(ball_.center()) +
                                       ") has no interior vertices");
  const auto& g = ball_.graph();
  const auto n = static_cast<Eigen::Index>(interior.size());
  matrix_ = Eigen::MatrixXd::Zero(n, n);
  sqrt_mu_.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) sqrt_mu_[i] = std::sqrt(g.measure(interior[static_cast<std::size_t>(i)]));
  for (Eigen::Index i = 0; i < n; ++i) {
    const Vertex x = interior[static_cast<std::size_t>(i)];
    matrix_(i, i) = -g.degree(x) / g.measure(x);
    for (const auto& nb : g.neighbors(x)) {
      if (nb.vertex <= x) continue;
      if (auto j = ball_.interior_index_of(nb.vertex)) {
        const auto jj = static_cast<Eigen::Index>(*j);
        const double s = nb.weight / (sqrt_mu_[i] * sqrt_mu_[jj]);
        matrix_(i, jj) = s;
        matrix_(jj, i) = s;
      }
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(matrix_);
  if (solver.info() != Eigen::Success) fail(ErrorCode::NoConvergence, "symmetric eigensolver failed");
  eigenvalues_ = solver.eigenvalues();
  eigenvectors_ = solver.eigenvectors();
}

Eigen::VectorXd DirichletOperator::apply(const Eigen::VectorXd& f_interior) const {
  if (f_interior.size() != matrix_.rows()) fail(ErrorCode::InvalidArgument, "interior function has wrong size");
  // L = M^{-1/2} S M^{1/2}
  return (matrix_ * f_interior.cwiseProduct(sqrt_mu_)).cwiseQuotient(sqrt_mu_);
}

Eigen::VectorXd DirichletOperator::to_spectral(const Eigen::VectorXd& f_interior) const {
  return eigenvectors_.transpose() * f_interior.cwiseProduct(sqrt_mu_);
}

Eigen::VectorXd DirichletOperator::from_spectral(const Eigen::VectorXd& coefficients) const {
  return (eigenvectors_ * coefficients).cwiseQuotient(sqrt_mu_);
}

DirichletOperator dirichlet_operator(const Ball& b) { return DirichletOperator(b); }

CurvatureReport cde_search(const WeightedGraph& g, double n, double curvature, const CdeSearchOptions& options) {
  if (options.trials < 1) fail(ErrorCode::InvalidArgument, "cde_search needs trials >= 1");
  if (!(n > 0.0)) fail(ErrorCode::InvalidArgument, "dimension parameter n must be positive");

  std::vector<Vertex> candidates;
  for (Vertex x = 0; x < g.size(); ++x) {
    if (has_two_hop_neighbourhood(g, x)) candidates.push_back(x);
  }
  if (candidates.empty()) fail(ErrorCode::MissingNeighborValue, "no vertex has a full 2-hop neighbourhood");

  struct Outcome {
    double residual = std::numeric_limits<double>::infinity();
    std::vector<double> values;  // aligned with the 2-hop member list
  };
  const std::size_t jobs = candidates.size() * options.trials;
  std::vector<Outcome> outcomes(jobs);
  std::vector<std::vector<Vertex>> hoods(candidates.size());
  for (std::size_t c = 0; c < candidates.size(); ++c) hoods[c] = two_hop_members(g, candidates[c]);

  parallel_for(jobs, [&](std::size_t job) {
    const std::size_t c = job / options.trials;
    const std::size_t trial = job % options.trials;
    const Vertex x = candidates[c];
    const auto& hood = hoods[c];

    std::mt19937_64 rng(mix_seed(options.seed, x, trial));
    std::normal_distribution<double> normal(0.0, options.log_sigma);
    std::vector<double> f(g.size(), 1.0);
    for (std::size_t k = 1; k < hood.size(); ++k) f[hood[k]] = std::exp(normal(rng));

    double best = cde_residual_unchecked(g, x, n, curvature, f);
    double step = options.initial_step;
    for (int it = 0; it < options.refine_iterations; ++it) {
      bool improved = false;
      for (std::size_t k = 1; k < hood.size(); ++k) {
        const Vertex y = hood[k];
        const double original = f[y];
        for (double factor : {1.0 + step, 1.0 - step}) {
          f[y] = original * factor;
          const double r = cde_residual_unchecked(g, x, n, curvature, f);
          if (r < best) {
            best = r;
            improved = true;
            break;
          }
          f[y] = original;
        }
      }
      if (!improved) step *= 0.5;
    }

    Outcome& out = outcomes[job];
    out.residual = best;
    out.values.reserve(hood.size());
    for (Vertex y : hood) out.values.push_back(f[y]);
  });

  CurvatureReport report;
  report.n = n;
  report.curvature = curvature;
  report.tolerance = options.tolerance;
  report.trials = options.trials;
  report.vertices_tested = candidates.size();
  std::size_t best_job = 0;
  for (std::size_t job = 1; job < jobs; ++job) {
    if (outcomes[job].residual < outcomes[best_job].residual) best_job = job;
  }
  const std::size_t c = best_job / options.trials;
  report.worst_residual = outcomes[best_job].residual;
  report.witness_vertex = candidates[c];
  for (std::size_t k = 0; k < hoods[c].size(); ++k) report.witness.emplace_back(hoods[c][k], outcomes[best_job].values[k]);
  std::sort(report.witness.begin(), report.witness.end());
  report.verdict = report.worst_residual < -options.tolerance ? CurvatureVerdict::Violated : CurvatureVerdict::NoViolationFound;
  return report;
}

}  // namespace fujita
