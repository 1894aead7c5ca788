#include "fujita/semilinear.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Dense>

#include "fujita/errors.hpp"
#include "fujita/operators.hpp"

namespace fujita {

namespace {

double power_term(double u, double exponent) { return u > 0.0 ? std::exp(exponent * std::log(u)) : 0.0; }

// Interior-indexed sparse Laplacian plus the reaction term, in rescaled time.
struct System {
  std::size_t n = 0;
  double alpha = 1.0;
  double d_max = 0.0;  // max m(x)/mu(x) over the interior
  std::vector<double> inv_mu;
  std::vector<double> m;
  std::vector<std::size_t> offsets;
  std::vector<std::pair<std::size_t, double>> links;

  explicit System(const Problem& p) : alpha(p.alpha) {
    const Ball& b = p.domain;
    const WeightedGraph& g = b.graph();
    const auto interior = b.interior();
    n = interior.size();
    inv_mu.resize(n);
    m.resize(n);
    offsets.assign(n + 1, 0);
    for (std::size_t i = 0; i < n; ++i) {
      const Vertex x = interior[i];
      inv_mu[i] = 1.0 / g.measure(x);
      double deg = 0.0;
      for (const auto& nb : g.neighbors(x)) {
        deg += nb.weight;
        if (auto j = b.interior_index_of(nb.vertex)) links.emplace_back(*j, nb.weight);
      }
      m[i] = deg;
      d_max = std::max(d_max, deg * inv_mu[i]);
      offsets[i + 1] = links.size();
    }
  }

  double sup(const double* y) const {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s = std::max(s, std::abs(y[i]));
    return s;
  }

  double speed(const double* y) const { return 1.0 + power_term(sup(y), alpha); }

  // y = (u_0..u_{n-1}, t); dy/ds.
  void rhs(const double* y, double* dy) const {
    const double inv_g = 1.0 / speed(y);
    for (std::size_t i = 0; i < n; ++i) {
      double acc = -m[i] * y[i];
      for (std::size_t k = offsets[i]; k < offsets[i + 1]; ++k) acc += links[k].second * y[links[k].first];
      dy[i] = (acc * inv_mu[i] + power_term(y[i], 1.0 + alpha)) * inv_g;
    }
    dy[n] = inv_g;
  }
};

// Dormand-Prince 5(4) tableau.
constexpr double a21 = 1.0 / 5.0;
constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0, a53 = 64448.0 / 6561.0, a54 = -212.0 / 729.0;
constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0, a64 = 49.0 / 176.0,
                 a65 = -5103.0 / 18656.0;
constexpr double a71 = 35.0 / 384.0, a73 = 500.0 / 1113.0, a74 = 125.0 / 192.0, a75 = -2187.0 / 6784.0,
                 a76 = 11.0 / 84.0;
constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0, e5 = -17253.0 / 339200.0,
                 e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;

struct Stepper {
  const System& sys;
  std::size_t dim;
  std::array<std::vector<double>, 7> k;
  std::vector<double> tmp, err;

  explicit Stepper(const System& s) : sys(s), dim(s.n + 1), tmp(dim), err(dim) {
    for (auto& v : k) v.assign(dim, 0.0);
  }

  // k[0] must hold f(y). Writes y_out and k[6] = f(y_out); returns the error
  // vector in err.
  void step(const std::vector<double>& y, double h, std::vector<double>& y_out) {
    auto stage = [&](std::initializer_list<std::pair<int, double>> terms, std::vector<double>& out) {
      for (std::size_t i = 0; i < dim; ++i) {
        double acc = 0.0;
        for (const auto& [idx, c] : terms) acc += c * k[static_cast<std::size_t>(idx)][i];
        out[i] = y[i] + h * acc;
      }
    };
    stage({{0, a21}}, tmp);
    sys.rhs(tmp.data(), k[1].data());
    stage({{0, a31}, {1, a32}}, tmp);
    sys.rhs(tmp.data(), k[2].data());
    stage({{0, a41}, {1, a42}, {2, a43}}, tmp);
    sys.rhs(tmp.data(), k[3].data());
    stage({{0, a51}, {1, a52}, {2, a53}, {3, a54}}, tmp);
    sys.rhs(tmp.data(), k[4].data());
    stage({{0, a61}, {1, a62}, {2, a63}, {3, a64}, {4, a65}}, tmp);
    sys.rhs(tmp.data(), k[5].data());
    stage({{0, a71}, {2, a73}, {3, a74}, {4, a75}, {5, a76}}, y_out);
    sys.rhs(y_out.data(), k[6].data());
    for (std::size_t i = 0; i < dim; ++i)
      err[i] = h * (e1 * k[0][i] + e3 * k[2][i] + e4 * k[3][i] + e5 * k[4][i] + e6 * k[5][i] + e7 * k[6][i]);
  }

  double error_norm(const std::vector<double>& y, const std::vector<double>& y_new, double rtol, double atol) const {
    double worst = 0.0;
    for (std::size_t i = 0; i < dim; ++i) {
      const double scale = atol + rtol * std::max(std::abs(y[i]), std::abs(y_new[i]));
      worst = std::max(worst, std::abs(err[i]) / scale);
    }
    return worst;
  }
};

// Clips components in (-atol, 0) to 0; returns true if anything changed.
bool enforce_nonnegative(std::vector<double>& y, std::size_t n, double atol, double t) {
  bool changed = false;
  for (std::size_t i = 0; i < n; ++i) {
    if (y[i] < 0.0) {
      if (y[i] < -atol)
        fail(ErrorCode::NegativeState, "component " + std::to_string(i) + " reached " + std::to_string(y[i]) +
                                           " at t = " + std::to_string(t));
      y[i] = 0.0;
      changed = true;
    }
  }
  return changed;
}

std::vector<double> interior_values(const Ball& b, std::span<const double> members_values) {
  const auto interior = b.interior();
  std::vector<double> out(interior.size());
  for (std::size_t i = 0; i < interior.size(); ++i) out[i] = members_values[*b.index_of(interior[i])];
  return out;
}

std::vector<double> to_members(const Ball& b, const double* interior_vals) {
  std::vector<double> out(b.size(), 0.0);
  const auto interior = b.interior();
  for (std::size_t i = 0; i < interior.size(); ++i) out[*b.index_of(interior[i])] = interior_vals[i];
  return out;
}

double sup_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s = std::max(s, std::abs(x));
  return s;
}

// Time the comparison ODE v' = v^{1+alpha} - D v takes to blow up from v = U.
double comparison_blowup_time(double U, double alpha, double D) {
  const double q = std::exp(-alpha * std::log(U));  // U^{-alpha}
  if (D <= 0.0) return q / alpha;
  const double z = D * q;
  if (z >= 1.0) return std::numeric_limits<double>::infinity();
  return -std::log1p(-z) / (alpha * D);
}

}  // namespace

Problem make_problem(Ball domain, double alpha, std::span<const double> a, double horizon, BoundaryMode mode) {
  const WeightedGraph& g = domain.graph();
  require(alpha > 0.0 && std::isfinite(alpha), ErrorCode::InvalidArgument, "alpha must be positive");
  require(horizon > 0.0, ErrorCode::InvalidArgument, "horizon must be positive");
  require(a.size() == g.size(), ErrorCode::InvalidArgument, "initial data must be indexed by graph vertex");
  if (mode == BoundaryMode::None)
    require(domain.is_whole_graph(), ErrorCode::InvalidArgument, "boundary mode 'none' needs the whole graph");
  require(!domain.interior().empty(), ErrorCode::EmptyInterior, "domain has no interior");
  Problem p{std::move(domain), alpha, {}, horizon, mode};
  p.initial.assign(p.domain.size(), 0.0);
  bool nontrivial = false;
  for (std::size_t j = 0; j < p.domain.size(); ++j) {
    const Vertex v = p.domain.members()[j];
    const double value = a[v];
    require(value >= 0.0 && std::isfinite(value), ErrorCode::InvalidArgument, "initial data must be finite and >= 0");
    if (p.domain.on_boundary(v)) continue;
    p.initial[j] = value;
    nontrivial = nontrivial || value > 0.0;
  }
  require(nontrivial, ErrorCode::InvalidArgument, "initial data vanishes on the domain interior");
  return p;
}

Problem finite_graph_problem(const WeightedGraph& g, double alpha, std::span<const double> a, double horizon) {
  return make_problem(whole_graph_ball(g), alpha, a, horizon, BoundaryMode::None);
}

Problem truncated_problem(const WeightedGraph& g, Vertex center, int radius, double alpha, std::span<const double> a,
                          double horizon) {
  return make_problem(ball(g, center, radius), alpha, a, horizon, BoundaryMode::DirichletTruncation);
}

std::vector<double> kernel_data(const WeightedGraph& g, Vertex x0, double delta, double gamma, int row_radius,
                                double tol) {
  require(delta > 0.0 && gamma > 0.0, ErrorCode::InvalidArgument, "kernel data needs delta > 0 and gamma > 0");
  Exhaustion ex(g, x0);
  ExhaustionOptions options;
  options.tol = tol;
  const auto row = heat_kernel_row(ex, gamma, row_radius, options);
  std::vector<double> a(g.size(), 0.0);
  for (std::size_t j = 0; j < row.vertices.size(); ++j) a[row.vertices[j]] = delta * std::max(row.values[j], 0.0);
  return a;
}

std::string status_name(const TrajectoryStatus& status) {
  if (std::holds_alternative<HorizonReached>(status)) return "horizon_reached";
  if (std::holds_alternative<BlowUp>(status)) return "blow_up";
  return "step_floor";
}

Trajectory integrate_mol(const Problem& p, const MolOptions& options) {
  require(options.rtol > 0.0 && options.atol > 0.0, ErrorCode::InvalidArgument, "tolerances must be positive");
  const System sys(p);
  Stepper stepper(sys);
  const std::size_t n = sys.n;
  const Ball& b = p.domain;

  Trajectory traj;
  traj.vertices.assign(b.members().begin(), b.members().end());
  traj.caveat = p.boundary == BoundaryMode::DirichletTruncation ? kTruncationCaveat : "";
  traj.status = HorizonReached{};

  auto record = [&](double t, const std::vector<double>& y) {
    traj.times.push_back(t);
    traj.states.push_back(to_members(b, y.data()));
    traj.sup_norm.push_back(sys.sup(y.data()));
  };

  std::vector<double> outputs;
  for (double t : options.output_times)
    if (t > 0.0 && t <= p.horizon) outputs.push_back(t);
  std::sort(outputs.begin(), outputs.end());
  outputs.erase(std::unique(outputs.begin(), outputs.end()), outputs.end());
  const bool every_step = options.output_times.empty();
  std::size_t next_output = 0;

  std::vector<double> y(n + 1), y_new(n + 1), y_sub(n + 1);
  {
    const auto a_int = interior_values(b, p.initial);
    std::copy(a_int.begin(), a_int.end(), y.begin());
    y[n] = 0.0;
  }
  record(0.0, y);
  sys.rhs(y.data(), stepper.k[0].data());

  // State at physical time `target` inside the accepted step [y, y + h].
  auto state_at = [&](double target, double h_accepted) {
    const std::vector<double> k0 = stepper.k[0];
    const double t0 = y[n];
    double h = std::clamp((target - t0) * sys.speed(y.data()), 0.0, h_accepted);
    Stepper sub(sys);
    sub.k[0] = k0;
    for (int it = 0; it < 12; ++it) {
      sub.step(y, h, y_sub);
      const double miss = y_sub[n] - target;
      if (std::abs(miss) <= 4.0 * std::numeric_limits<double>::epsilon() * (target + 1.0)) break;
      h = std::clamp(h - miss * sys.speed(y_sub.data()), 0.0, h_accepted);
    }
    enforce_nonnegative(y_sub, n, options.atol, target);
    y_sub[n] = target;
    return y_sub;
  };

  constexpr double safe = 0.9, fac_min = 0.2, fac_max = 10.0, beta = 0.04;
  const double expo = 0.2 - 0.75 * beta;
  double fac_old = 1e-4;
  bool last_rejected = false;
  double h = std::min(1e-3, p.horizon);
  double s = 0.0;

  while (true) {
    if (traj.accepted_steps + traj.rejected_steps >= options.max_steps)
      fail(ErrorCode::BudgetExceeded, "integrator step budget exhausted at t = " + std::to_string(y[n]));
    if (h < options.step_floor * (s + 1.0)) {
      traj.status = StepFloor{y[n]};
      if (traj.times.back() != y[n]) record(y[n], y);
      break;
    }
    stepper.step(y, h, y_new);
    const double err = stepper.error_norm(y, y_new, options.rtol, options.atol);
    bool finite = std::isfinite(err);
    for (std::size_t i = 0; finite && i <= n; ++i) finite = std::isfinite(y_new[i]);
    if (!finite) {
      h *= 0.1;
      ++traj.rejected_steps;
      last_rejected = true;
      continue;
    }
    const double fac11 = std::pow(std::max(err, 1e-300), expo);
    double fac = std::clamp(fac11 / std::pow(fac_old, beta) / safe, 1.0 / fac_max, 1.0 / fac_min);
    if (err > 1.0) {
      h /= std::min(1.0 / fac_min, fac11 / safe);
      ++traj.rejected_steps;
      last_rejected = true;
      continue;
    }
    double h_next = h / fac;
    if (last_rejected) h_next = std::min(h_next, h);
    fac_old = std::max(err, 1e-4);
    last_rejected = false;
    ++traj.accepted_steps;

    const double t0 = y[n];
    const double t1 = y_new[n];
    while (next_output < outputs.size() && outputs[next_output] <= std::min(t1, p.horizon)) {
      if (outputs[next_output] < p.horizon) record(outputs[next_output], state_at(outputs[next_output], h));
      ++next_output;
    }
    if (t1 >= p.horizon) {
      record(p.horizon, state_at(p.horizon, h));
      traj.status = HorizonReached{};
      break;
    }

    const bool clipped = enforce_nonnegative(y_new, n, options.atol, t1);
    std::swap(y, y_new);
    if (clipped)
      sys.rhs(y.data(), stepper.k[0].data());
    else
      std::swap(stepper.k[0], stepper.k[6]);
    s += h;
    if (every_step) record(t1, y);

    const double sup = sys.sup(y.data());
    if (sup >= options.blowup_threshold && (t1 - t0) < options.step_floor * (t1 + 1.0)) {
      if (traj.times.back() != t1) record(t1, y);
      const double pad = 10.0 * options.rtol * (t1 + 1.0);
      traj.status = BlowUp{t1, t1 + comparison_blowup_time(sup, p.alpha, sys.d_max) + pad};
      break;
    }
    h = h_next;
  }
  return traj;
}

std::optional<BlowupBracket> blowup_time(const Problem& p, double rtol, const MolOptions& base) {
  require(rtol > 0.0, ErrorCode::InvalidArgument, "rtol must be positive");
  constexpr int kAttempts = 4;
  BlowupBracket out;
  for (int attempt = 0; attempt < kAttempts; ++attempt) {
    MolOptions opts = base;
    opts.output_times = {p.horizon};
    const double scale = std::pow(10.0, -attempt);
    opts.rtol = std::max(base.rtol * scale, 1e-14);
    opts.atol = std::max(base.atol * scale, 1e-300);
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();
    for (double threshold : {1e6, 1e10}) {
      opts.blowup_threshold = threshold;
      const Trajectory traj = integrate_mol(p, opts);
      if (std::holds_alternative<HorizonReached>(traj.status)) return std::nullopt;
      if (const auto* floor = std::get_if<StepFloor>(&traj.status))
        fail(ErrorCode::StepFloorWithoutGrowth,
             "step size collapsed at t = " + std::to_string(floor->t) + " without sup-norm growth");
      const auto& bu = std::get<BlowUp>(traj.status);
      lo = std::max(lo, bu.t_low);
      hi = std::min(hi, bu.t_high);
    }
    hi = std::max(hi, lo);
    out = {lo, hi, hi - lo <= rtol * hi, opts.rtol};
    if (out.within_tolerance) break;
  }
  return out;
}

std::vector<double> refine_grid(std::span<const double> t_grid) {
  require(!t_grid.empty(), ErrorCode::InvalidArgument, "time grid is empty");
  std::vector<double> coarse;
  if (t_grid.front() != 0.0) coarse.push_back(0.0);
  for (double t : t_grid) {
    require(std::isfinite(t) && t >= 0.0 && (coarse.empty() || t > coarse.back()), ErrorCode::InvalidArgument,
            "time grid must be non-negative and strictly increasing");
    coarse.push_back(t);
  }
  require(coarse.size() >= 2, ErrorCode::InvalidArgument, "time grid needs a positive time");
  std::vector<double> fine;
  fine.reserve(2 * coarse.size() - 1);
  for (std::size_t i = 0; i + 1 < coarse.size(); ++i) {
    fine.push_back(coarse[i]);
    fine.push_back(0.5 * (coarse[i] + coarse[i + 1]));
  }
  fine.push_back(coarse.back());
  return fine;
}

namespace {

// Weights w_k with int_{t_0}^{t_j} g ds ~ sum_k w_k g(t_k) on a refined grid.
std::vector<double> quadrature_weights(std::span<const double> tau, std::size_t j) {
  std::vector<double> w(j + 1, 0.0);
  const std::size_t even_end = j - (j % 2);
  for (std::size_t i = 0; i + 2 <= even_end; i += 2) {
    const double len = tau[i + 2] - tau[i];
    w[i] += len / 6.0;
    w[i + 1] += 4.0 * len / 6.0;
    w[i + 2] += len / 6.0;
  }
  if (j % 2 == 1) {
    const double a = tau[j - 1];
    const double b = tau[j];
    if (j == 1) {
      w[0] += 0.5 * (b - a);
      w[1] += 0.5 * (b - a);
    } else {
      // Quadratic through tau[j-2..j], integrated over [a, b] by 2-point Gauss.
      const double x0 = tau[j - 2], x1 = tau[j - 1], x2 = tau[j];
      const double half = 0.5 * (b - a), mid = 0.5 * (a + b), off = half / std::sqrt(3.0);
      for (double xi : {mid - off, mid + off}) {
        w[j - 2] += half * (xi - x1) * (xi - x2) / ((x0 - x1) * (x0 - x2));
        w[j - 1] += half * (xi - x0) * (xi - x2) / ((x1 - x0) * (x1 - x2));
        w[j] += half * (xi - x0) * (xi - x1) / ((x2 - x0) * (x2 - x1));
      }
    }
  }
  return w;
}

struct DuhamelContext {
  const Problem& p;
  DirichletOperator op;
  Eigen::VectorXd a_spec;

  explicit DuhamelContext(const Problem& problem) : p(problem), op(problem.domain) {
    const auto a_int = interior_values(p.domain, p.initial);
    a_spec = op.to_spectral(Eigen::Map<const Eigen::VectorXd>(a_int.data(), static_cast<Eigen::Index>(a_int.size())));
  }

  std::vector<double> members_from_spectral(const Eigen::VectorXd& c) const {
    const Eigen::VectorXd v = op.from_spectral(c);
    return to_members(p.domain, v.data());
  }

  std::vector<double> linear(double t) const {
    return members_from_spectral((t * op.eigenvalues().array()).exp().matrix().cwiseProduct(a_spec));
  }

  std::vector<std::vector<double>> apply(std::span<const double> tau,
                                         const std::vector<std::vector<double>>& states) const {
    const std::size_t N = tau.size();
    const double exponent = 1.0 + p.alpha;
    std::vector<Eigen::VectorXd> c(N);
    for (std::size_t k = 0; k < N; ++k) {
      auto f = interior_values(p.domain, states[k]);
      for (double& v : f) v = power_term(v, exponent);
      c[k] = op.to_spectral(Eigen::Map<const Eigen::VectorXd>(f.data(), static_cast<Eigen::Index>(f.size())));
    }
    const Eigen::ArrayXd lambda = op.eigenvalues().array();
    std::vector<std::vector<double>> out(N);
    for (std::size_t j = 0; j < N; ++j) {
      Eigen::VectorXd acc = (tau[j] * lambda).exp().matrix().cwiseProduct(a_spec);
      if (j > 0) {
        const auto w = quadrature_weights(tau, j);
        for (std::size_t k = 0; k <= j; ++k) {
          if (w[k] == 0.0) continue;
          acc += w[k] * ((tau[j] - tau[k]) * lambda).exp().matrix().cwiseProduct(c[k]);
        }
      }
      out[j] = members_from_spectral(acc);
    }
    return out;
  }
};

void check_refined(std::span<const double> tau) {
  require(tau.size() >= 3 && tau.size() % 2 == 1 && tau.front() == 0.0, ErrorCode::InvalidArgument,
          "refined grid must start at 0 and have an odd number of nodes");
  for (std::size_t i = 1; i < tau.size(); ++i)
    require(tau[i] > tau[i - 1], ErrorCode::InvalidArgument, "refined grid must be increasing");
}

}  // namespace

std::vector<std::vector<double>> duhamel_map(const Problem& p, std::span<const double> fine_times,
                                             const std::vector<std::vector<double>>& states) {
  check_refined(fine_times);
  require(states.size() == fine_times.size(), ErrorCode::InvalidArgument, "one state per grid time required");
  for (const auto& s : states)
    require(s.size() == p.domain.size(), ErrorCode::InvalidArgument, "state size must match the domain");
  const DuhamelContext ctx(p);
  return ctx.apply(fine_times, states);
}

DuhamelResult duhamel_iterate(const Problem& p, std::span<const double> t_grid, std::size_t max_iters, double tol) {
  require(tol > 0.0, ErrorCode::InvalidArgument, "tol must be positive");
  const std::vector<double> tau = refine_grid(t_grid);
  const DuhamelContext ctx(p);

  std::vector<std::vector<double>> u(tau.size());
  double base_sup = 0.0;
  for (std::size_t j = 0; j < tau.size(); ++j) {
    u[j] = ctx.linear(tau[j]);
    base_sup = std::max(base_sup, sup_of(u[j]));
  }

  DuhamelResult result;
  for (std::size_t it = 0; it < max_iters; ++it) {
    auto next = ctx.apply(tau, u);
    double diff = 0.0;
    for (std::size_t j = 0; j < tau.size(); ++j) {
      for (std::size_t i = 0; i < next[j].size(); ++i) {
        if (!std::isfinite(next[j][i]))
          fail(ErrorCode::NoConvergence, "Picard iterate became non-finite at t = " + std::to_string(tau[j]));
        diff = std::max(diff, std::abs(next[j][i] - u[j][i]));
      }
    }
    u = std::move(next);
    result.iterations = it + 1;
    result.last_update = diff;
    if (diff > 1e12 * (1.0 + base_sup))
      fail(ErrorCode::NoConvergence, "Picard iteration diverges; the grid likely reaches the blow-up time");
    if (diff < tol) {
      result.converged = true;
      break;
    }
  }

  Trajectory& traj = result.trajectory;
  traj.vertices.assign(p.domain.members().begin(), p.domain.members().end());
  traj.caveat = p.boundary == BoundaryMode::DirichletTruncation ? kTruncationCaveat : "";
  traj.status = HorizonReached{};
  for (std::size_t j = 0; j < tau.size(); j += 2) {
    traj.times.push_back(tau[j]);
    traj.sup_norm.push_back(sup_of(u[j]));
    traj.states.push_back(std::move(u[j]));
  }
  return result;
}

}  // namespace fujita
