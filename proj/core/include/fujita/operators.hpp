#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "fujita/graph.hpp"

namespace fujita {

// Functions on vertices are dense arrays indexed by Vertex, sized g.size().
// The 1-hop (Laplacian, gamma) and 2-hop (gamma2, CDE') neighbourhoods must
// lie off the truncation edge; otherwise MissingNeighborValue is raised
// rather than silently reading a clipped neighbourhood.

/// Delta f(x) = (1/mu(x)) sum_{y~x} w_xy (f(y) - f(x)).
double laplacian_apply(const WeightedGraph& g, std::span<const double> f, Vertex x);

/// Gamma(f,h)(x) = (1/(2 mu(x))) sum_{y~x} w_xy (f(y)-f(x)) (h(y)-h(x)).
double gamma(const WeightedGraph& g, std::span<const double> f, std::span<const double> h, Vertex x);

/// 2 Gamma2(f,h) = Delta Gamma(f,h) - Gamma(f, Delta h) - Gamma(Delta f, h).
double gamma2(const WeightedGraph& g, std::span<const double> f, std::span<const double> h, Vertex x);

/// LHS - RHS of the exponential curvature-dimension inequality at x:
///   Gamma2(f) - Gamma(f, Gamma(f)/f)  -  [ f^2 (Delta log f)^2 / n + K Gamma(f) ].
/// Non-negative iff CDE'(x, n, K) holds for this particular f.
double cde_residual(const WeightedGraph& g, Vertex x, double n, double curvature, std::span<const double> f);

/// True when x and all its neighbours are off the truncation edge, i.e.
/// gamma2 and cde_residual are defined at x.
bool has_two_hop_neighbourhood(const WeightedGraph& g, Vertex x);

/// The Dirichlet Laplacian of a ball in the mu-symmetrised interior basis,
/// S = M^{1/2} L M^{-1/2}, with its eigendecomposition cached at
/// construction (eigenvalues ascending, all <= 0).
class DirichletOperator {
 public:
  explicit DirichletOperator(Ball b);

  const Ball& ball() const noexcept { return ball_; }
  std::size_t dimension() const noexcept { return static_cast<std::size_t>(matrix_.rows()); }

  const Eigen::MatrixXd& matrix() const noexcept { return matrix_; }
  const Eigen::VectorXd& eigenvalues() const noexcept { return eigenvalues_; }
  /// Orthonormal eigenvectors as columns.
  const Eigen::MatrixXd& eigenvectors() const noexcept { return eigenvectors_; }
  /// sqrt(mu) on the interior, aligned with ball().interior().
  const Eigen::VectorXd& sqrt_measure() const noexcept { return sqrt_mu_; }

  /// Delta_r applied to f given on the interior (zero on the boundary).
  Eigen::VectorXd apply(const Eigen::VectorXd& f_interior) const;

  /// Spectral coordinates Phi^T M^{1/2} f of an interior function.
  Eigen::VectorXd to_spectral(const Eigen::VectorXd& f_interior) const;
  /// Inverse of to_spectral: M^{-1/2} Phi c.
  Eigen::VectorXd from_spectral(const Eigen::VectorXd& coefficients) const;

 private:
  Ball ball_;
  Eigen::MatrixXd matrix_;
  Eigen::VectorXd eigenvalues_;
  Eigen::MatrixXd eigenvectors_;
  Eigen::VectorXd sqrt_mu_;
};

/// Throws EmptyInterior.
DirichletOperator dirichlet_operator(const Ball& b);

enum class CurvatureVerdict { NoViolationFound, Violated };

struct CurvatureReport {
  double n = 0.0;
  double curvature = 0.0;  // K
  double tolerance = 0.0;
  double worst_residual = 0.0;
  Vertex witness_vertex = 0;
  /// Minimising positive function restricted to the 2-hop neighbourhood
  /// of witness_vertex, normalised so f(witness_vertex) = 1.
  std::vector<std::pair<Vertex, double>> witness;
  std::size_t trials = 0;
  std::size_t vertices_tested = 0;
  CurvatureVerdict verdict = CurvatureVerdict::NoViolationFound;
};

struct CdeSearchOptions {
  std::size_t trials = 16;
  std::uint64_t seed = 0;
  double tolerance = 1e-9;
  double log_sigma = 1.0;        // spread of the log-normal starting values
  int refine_iterations = 50;
  double initial_step = 1e-2;    // multiplicative perturbation f(y) -> f(y)(1 +/- h)
};

/// Random search (log-normal starts + multiplicative coordinate descent)
/// for a positive f violating CDE'(n, K) at some vertex with a full 2-hop
/// neighbourhood. NoViolationFound is evidence, not proof.
CurvatureReport cde_search(const WeightedGraph& g, double n, double curvature, const CdeSearchOptions& options);

}  // namespace fujita
