#pragma once

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "fujita/graph.hpp"
#include "fujita/operators.hpp"

namespace fujita {

/// p_r(t, x, y) on a ball, indexed by ball members (Ball::index_of).
/// Uses the normalisation delta_x(y) = 1{x=y}/mu(x), so that
///   p_r(t,x,y) = sum_i exp(t lambda_i) phi_i(x) phi_i(y) / sqrt(mu(x) mu(y))
/// on the interior and 0 whenever x or y is on the boundary.
class HeatKernelMatrix {
 public:
  HeatKernelMatrix(Ball b, double t, Eigen::MatrixXd values);

  const Ball& ball() const noexcept { return ball_; }
  double time() const noexcept { return time_; }
  const Eigen::MatrixXd& values() const noexcept { return values_; }

  /// Throws UnknownVertex if x or y is outside the ball.
  double operator()(Vertex x, Vertex y) const;

 private:
  Ball ball_;
  double time_;
  Eigen::MatrixXd values_;
};

HeatKernelMatrix dirichlet_heat_kernel(const DirichletOperator& op, double t);
HeatKernelMatrix dirichlet_heat_kernel(const Ball& b, double t);

/// Single entry p_r(t, x, y) in O(#interior); zero off the interior.
double dirichlet_kernel_entry(const DirichletOperator& op, double t, Vertex x, Vertex y);

/// Row p_r(t, x, .) over the ball members.
Eigen::VectorXd dirichlet_kernel_row(const DirichletOperator& op, double t, Vertex x);

/// P_t f = sum_y mu(y) p_r(t, ., y) f(y) for f given on the ball members
/// (boundary entries are ignored); result over the members, 0 on the boundary.
Eigen::VectorXd semigroup_apply(const DirichletOperator& op, double t, const Eigen::VectorXd& f_members);

/// sum_y mu(y) p_r(t, x, y).
double dirichlet_mass(const DirichletOperator& op, double t, Vertex x);

/// Measured finite-ball kernel laws at one time t.
struct KernelLaws {
  double t = 0.0;
  double symmetry = 0.0;         // max |p(x,y) - p(y,x)|
  double min_entry = 0.0;
  double max_mass = 0.0;         // max_x sum_y mu(y) p(x,y)
  double chapman_kolmogorov = 0.0;  // max |sum_z mu(z) p_t(x,z) p_t(z,y) - p_2t(x,y)|
  double boundary = 0.0;         // max |entry| in boundary rows and columns
  double heat_equation = 0.0;    // relative sup of centred d/dt p - Delta_r p, step 1e-4 t
};

KernelLaws kernel_laws(const DirichletOperator& op, double t);

/// Write-once cache of Dirichlet operators on B_r(center) for the radii an
/// exhaustion visits. Safe to share between threads.
class Exhaustion {
 public:
  Exhaustion(const WeightedGraph& g, Vertex center);

  const WeightedGraph& graph() const noexcept { return *graph_; }
  Vertex center() const noexcept { return center_; }
  /// Largest radius whose ball avoids the truncation edge.
  int max_radius() const noexcept { return max_radius_; }
  /// True when B_r(center) is the whole (non-truncated) graph, so p_r = p.
  bool is_exact(int radius) const;

  std::shared_ptr<const DirichletOperator> at(int radius);

 private:
  const WeightedGraph* graph_;
  Vertex center_;
  int max_radius_;
  std::mutex mutex_;
  std::map<int, std::shared_ptr<const DirichletOperator>> cache_;
};

struct ExhaustedValue {
  double value = 0.0;
  int radius = 0;
  double previous = 0.0;  // value at the preceding radius in the doubling sequence
};

struct ExhaustionOptions {
  double tol = 1e-10;
  int start_radius = 4;
};

/// Runs radii r0, 2 r0, 4 r0, ... (clamped to max_radius) until successive
/// values differ by < tol, or the ball is the whole graph. Throws
/// TruncationExhausted carrying the last bracket otherwise.
ExhaustedValue exhaust(Exhaustion& ex, int min_radius, const ExhaustionOptions& options,
                       const std::function<double(const DirichletOperator&)>& value_at);

/// p(t, x, y) = lim_r p_r(t, x, y), balls centred at x.
ExhaustedValue heat_kernel(const WeightedGraph& g, double t, Vertex x, Vertex y, double tol);
ExhaustedValue heat_kernel(Exhaustion& ex, double t, Vertex y, const ExhaustionOptions& options);

/// sum_y mu(y) p(t, x, y).
ExhaustedValue mass(const WeightedGraph& g, double t, Vertex x, double tol);
ExhaustedValue mass(Exhaustion& ex, double t, const ExhaustionOptions& options);

/// P_t a(center) with a given on the whole graph. Because p_r increases
/// to p, for a >= 0 every member of the sequence is a lower bound.
ExhaustedValue semigroup_at_center(Exhaustion& ex, double t, std::span<const double> a,
                                   const ExhaustionOptions& options);

struct ExhaustedRow {
  std::vector<Vertex> vertices;  // members of B_{row_radius}(center)
  std::vector<double> values;    // p(t, center, v)
  int radius = 0;                // exhaustion radius used
};

/// p(t, center, .) restricted to B_{row_radius}(center), converged in sup-norm.
ExhaustedRow heat_kernel_row(Exhaustion& ex, double t, int row_radius, const ExhaustionOptions& options);

struct GaussianFitPoint {
  double t = 0.0;
  Vertex x = 0;
  Vertex y = 0;
  int distance = 0;
  double kernel = 0.0;  // p(t, x, y)
  double volume = 0.0;  // V(x, sqrt t)
};

/// Empirical stand-ins for the constants of the two-sided Gaussian bounds
///   p(t,x,y) <= c1 / V(x, sqrt t),
///   p(t,x,y) >= c2 / V(x, sqrt t) * exp(-c3 d(x,y)^2 / t)     (t > t0).
struct GaussianFit {
  Vertex x0 = 0;
  double t0 = 1.0;
  double c1 = 0.0;
  double c2 = 0.0;
  double c3 = 0.0;
  bool c3_floored = false;      // regression slope was not negative
  double slope = 0.0;           // raw least-squares slope of log(pV) on d^2/t
  double intercept = 0.0;       // raw least-squares intercept
  double rms_residual = 0.0;
  std::vector<double> t_grid;
  std::vector<std::pair<Vertex, Vertex>> pairs;
  std::vector<GaussianFitPoint> points;
};

struct GaussianFitOptions {
  double t0 = 1.0;
  double tol = 1e-12;
  double c3_floor = 1e-6;
};

/// c1 = max p V; (c2, c3) by least squares of log(p V) against d^2/t, with
/// c2 then lowered until the lower bound holds at every grid point. An
/// empty pair set defaults to (x0, y) for y at distances 0, 1, 2, 4, 8.
GaussianFit gaussian_fit(const WeightedGraph& g, Vertex x0, std::span<const double> t_grid,
                         std::span<const std::pair<Vertex, Vertex>> pairs, const GaussianFitOptions& options = {});

}  // namespace fujita
