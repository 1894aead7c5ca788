#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "fujita/graph.hpp"
#include "fujita/heat_kernel.hpp"

namespace fujita {

enum class BoundaryMode { DirichletTruncation, None };

/// du/dt = Lu + u^{1+alpha}, u(0) = a, on a ball (Dirichlet truncation, u = 0
/// on the boundary) or on a whole finite graph.
struct Problem {
  Ball domain;
  double alpha = 1.0;
  std::vector<double> initial;  // aligned with domain.members(); 0 on the boundary
  double horizon = 1.0;
  BoundaryMode boundary = BoundaryMode::DirichletTruncation;
};

/// `a` is indexed by graph vertex. Throws InvalidArgument unless alpha > 0,
/// horizon > 0, a >= 0 and a is not identically 0 on the domain's interior.
Problem make_problem(Ball domain, double alpha, std::span<const double> a, double horizon, BoundaryMode mode);
Problem finite_graph_problem(const WeightedGraph& g, double alpha, std::span<const double> a, double horizon);
Problem truncated_problem(const WeightedGraph& g, Vertex center, int radius, double alpha, std::span<const double> a,
                          double horizon);

/// a = delta * p(gamma, x0, .) on B_{row_radius}(x0) and 0 elsewhere, indexed
/// by graph vertex. Rounding negatives of the spectral sum are set to 0.
std::vector<double> kernel_data(const WeightedGraph& g, Vertex x0, double delta, double gamma, int row_radius,
                                double tol = 1e-12);

struct HorizonReached {};
struct BlowUp {
  double t_low = 0.0;
  double t_high = 0.0;
};
struct StepFloor {
  double t = 0.0;
};
using TrajectoryStatus = std::variant<HorizonReached, BlowUp, StepFloor>;

/// "horizon_reached", "blow_up" or "step_floor".
std::string status_name(const TrajectoryStatus& status);

inline constexpr const char* kTruncationCaveat =
    "Dirichlet truncation: blow-up on the truncation certifies blow-up on the full graph; "
    "a bounded run does not certify global existence";

struct Trajectory {
  std::vector<Vertex> vertices;             // domain members
  std::vector<double> times;                // increasing
  std::vector<std::vector<double>> states;  // states[k][j] = u(times[k], vertices[j])
  std::vector<double> sup_norm;             // aligned with times
  TrajectoryStatus status;
  std::string caveat;
  std::size_t accepted_steps = 0;
  std::size_t rejected_steps = 0;

  bool blew_up() const { return std::holds_alternative<BlowUp>(status); }
};

struct MolOptions {
  double rtol = 1e-10;
  double atol = 1e-12;
  double blowup_threshold = 1e8;
  double step_floor = 1e-12;
  /// Record only these times (plus 0 and the final state). Empty records
  /// every accepted step.
  std::vector<double> output_times;
  std::size_t max_steps = 5'000'000;
};

/// Dormand-Prince 5(4) with PI control, run in the rescaled time s with
/// dt/ds = 1/(1 + |u|_inf^alpha) so the integrator can follow the solution
/// well past the point where physical steps drop below double resolution.
/// Blow-up is declared when |u|_inf >= threshold while the physical step is
/// below step_floor*(t+1); the bracket's upper end comes from the comparison
/// ODE v' = v^{1+alpha} - D v started at the final sup-norm.
Trajectory integrate_mol(const Problem& p, const MolOptions& options = {});

struct BlowupBracket {
  double t_low = 0.0;
  double t_high = 0.0;
  bool within_tolerance = false;  // t_high - t_low <= rtol * t_high
  double integrator_rtol = 0.0;   // tolerance of the run that produced it
};

/// Intersects the brackets from thresholds 1e6 and 1e10, tightening the
/// integrator tolerance until the width is below rtol * t_high. Returns
/// nullopt when the horizon is reached; StepFloorWithoutGrowth on a stalled
/// run.
std::optional<BlowupBracket> blowup_time(const Problem& p, double rtol = 1e-6, const MolOptions& base = {});

struct DuhamelResult {
  Trajectory trajectory;  // on the requested grid (0 prepended if absent)
  std::size_t iterations = 0;
  double last_update = 0.0;  // sup-norm change of the final iteration
  bool converged = false;
};

/// One application of u -> P_t a + int_0^t P_{t-s} u(s)^{1+alpha} ds on a
/// grid starting at 0 whose odd entries are midpoints of the even ones.
/// Integrals end on even nodes use Simpson (trapezoid plus one Richardson
/// step) per panel; odd nodes add a three-point rule on the final half panel.
/// States are over the domain members.
std::vector<std::vector<double>> duhamel_map(const Problem& p, std::span<const double> fine_times,
                                             const std::vector<std::vector<double>>& states);

/// Picard iteration of duhamel_map from u^0 = P_t a. Throws NoConvergence
/// when iterates go non-finite or grow without bound.
DuhamelResult duhamel_iterate(const Problem& p, std::span<const double> t_grid, std::size_t max_iters = 200,
                              double tol = 1e-12);

/// The grid used internally by duhamel_iterate: 0 prepended, midpoints inserted.
std::vector<double> refine_grid(std::span<const double> t_grid);

}  // namespace fujita
