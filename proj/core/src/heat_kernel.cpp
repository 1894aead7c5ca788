#include "fujita/heat_kernel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "fujita/errors.hpp"

namespace fujita {

namespace {

void require_time(double t, bool allow_zero) {
  if (!(allow_zero ? t >= 0.0 : t > 0.0) || !std::isfinite(t))
    fail(ErrorCode::InvalidArgument, "time must be " + std::string(allow_zero ? "non-negative" : "positive") +
                                         ", got " + std::to_string(t));
}

Eigen::VectorXd decay(const DirichletOperator& op, double t) {
  return (t * op.eigenvalues().array()).exp().matrix();
}

template <class T, class ValueAt, class Gap>
std::pair<T, ExhaustedValue> exhaust_impl(Exhaustion& ex, int min_radius, const ExhaustionOptions& options,
                                          ValueAt value_at, Gap gap) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  // Past the eccentricity of a finite graph every ball is the whole graph.
  if (!ex.graph().is_truncation()) min_radius = std::min(min_radius, ex.max_radius());
  if (ex.max_radius() < min_radius)
    throw TruncationExhausted("truncation allows radius " + std::to_string(ex.max_radius()) + " < required " +
                                  std::to_string(min_radius),
                              nan, nan, ex.max_radius());
  int r = std::min(std::max(min_radius, options.start_radius), ex.max_radius());
  T prev = value_at(*ex.at(r));
  if (ex.is_exact(r)) {
    auto [only, _] = gap(prev, prev);
    return {prev, {only, r, only}};
  }
  double before = nan;
  while (true) {
    if (r >= ex.max_radius()) {
      auto [last, _] = gap(prev, prev);
      throw TruncationExhausted("exhaustion did not settle to tol " + std::to_string(options.tol) + " by radius " +
                                    std::to_string(r),
                                last, before, r);
    }
    const int next = std::min(2 * r, ex.max_radius());
    T current = value_at(*ex.at(next));
    auto [cur_scalar, diff] = gap(current, prev);
    if (diff < options.tol || ex.is_exact(next)) {
      auto [prev_scalar, _] = gap(prev, prev);
      return {current, {cur_scalar, next, prev_scalar}};
    }
    before = gap(prev, prev).first;
    prev = std::move(current);
    r = next;
  }
}

std::pair<double, double> scalar_gap(double current, double previous) {
  return {current, std::abs(current - previous)};
}

}  // namespace

HeatKernelMatrix::HeatKernelMatrix(Ball b, double t, Eigen::MatrixXd values)
    : ball_(std::move(b)), time_(t), values_(std::move(values)) {}

double HeatKernelMatrix::operator()(Vertex x, Vertex y) const {
  const auto i = ball_.index_of(x);
  const auto j = ball_.index_of(y);
  if (!i || !j) fail(ErrorCode::UnknownVertex, "vertex outside the kernel's ball");
  return values_(static_cast<Eigen::Index>(*i), static_cast<Eigen::Index>(*j));
}

HeatKernelMatrix dirichlet_heat_kernel(const DirichletOperator& op, double t) {
  require_time(t, true);
  const Ball& b = op.ball();
  const auto n = static_cast<Eigen::Index>(b.size());
  Eigen::MatrixXd values = Eigen::MatrixXd::Zero(n, n);
  const auto interior = b.interior();
  const auto k = static_cast<Eigen::Index>(interior.size());
  std::vector<Eigen::Index> slot(interior.size());
  for (std::size_t i = 0; i < interior.size(); ++i) slot[i] = static_cast<Eigen::Index>(*b.index_of(interior[i]));

  Eigen::MatrixXd inner;
  if (t == 0.0) {
    inner = Eigen::MatrixXd::Identity(k, k);
  } else {
    const Eigen::MatrixXd& phi = op.eigenvectors();
    inner = phi * decay(op, t).asDiagonal() * phi.transpose();
    inner = 0.5 * (inner + inner.transpose());
  }
  const Eigen::VectorXd& s = op.sqrt_measure();
  for (Eigen::Index i = 0; i < k; ++i) {
    for (Eigen::Index j = 0; j < k; ++j) values(slot[i], slot[j]) = inner(i, j) / (s[i] * s[j]);
  }
  return HeatKernelMatrix(b, t, std::move(values));
}

HeatKernelMatrix dirichlet_heat_kernel(const Ball& b, double t) {
  return dirichlet_heat_kernel(DirichletOperator(b), t);
}

double dirichlet_kernel_entry(const DirichletOperator& op, double t, Vertex x, Vertex y) {
  require_time(t, true);
  const auto i = op.ball().interior_index_of(x);
  const auto j = op.ball().interior_index_of(y);
  if (!i || !j) {
    if (!op.ball().contains(x) || !op.ball().contains(y)) fail(ErrorCode::UnknownVertex, "vertex outside the ball");
    return 0.0;
  }
  const auto ii = static_cast<Eigen::Index>(*i);
  const auto jj = static_cast<Eigen::Index>(*j);
  if (t == 0.0) return ii == jj ? 1.0 / op.ball().graph().measure(x) : 0.0;
  const Eigen::MatrixXd& phi = op.eigenvectors();
  const double acc = (phi.row(ii).transpose().array() * decay(op, t).array() * phi.row(jj).transpose().array()).sum();
  return acc / (op.sqrt_measure()[ii] * op.sqrt_measure()[jj]);
}

Eigen::VectorXd dirichlet_kernel_row(const DirichletOperator& op, double t, Vertex x) {
  require_time(t, true);
  const Ball& b = op.ball();
  Eigen::VectorXd row = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(b.size()));
  const auto i = b.interior_index_of(x);
  if (!i) {
    if (!b.contains(x)) fail(ErrorCode::UnknownVertex, "vertex outside the ball");
    return row;
  }
  const auto ii = static_cast<Eigen::Index>(*i);
  Eigen::VectorXd inner;
  if (t == 0.0) {
    inner = Eigen::VectorXd::Unit(static_cast<Eigen::Index>(op.dimension()), ii);
  } else {
    const Eigen::MatrixXd& phi = op.eigenvectors();
    inner = phi * (decay(op, t).array() * phi.row(ii).transpose().array()).matrix();
  }
  const Eigen::VectorXd& s = op.sqrt_measure();
  const auto interior = b.interior();
  for (std::size_t j = 0; j < interior.size(); ++j) {
    const auto jj = static_cast<Eigen::Index>(j);
    row[static_cast<Eigen::Index>(*b.index_of(interior[j]))] = inner[jj] / (s[ii] * s[jj]);
  }
  return row;
}

Eigen::VectorXd semigroup_apply(const DirichletOperator& op, double t, const Eigen::VectorXd& f_members) {
  require_time(t, true);
  const Ball& b = op.ball();
  if (f_members.size() != static_cast<Eigen::Index>(b.size()))
    fail(ErrorCode::InvalidArgument, "function on the ball has wrong size");
  const auto interior = b.interior();
  Eigen::VectorXd f(static_cast<Eigen::Index>(interior.size()));
  for (std::size_t j = 0; j < interior.size(); ++j)
    f[static_cast<Eigen::Index>(j)] = f_members[static_cast<Eigen::Index>(*b.index_of(interior[j]))];

  Eigen::VectorXd out_interior;
  if (t == 0.0) {
    out_interior = f;
  } else {
    out_interior = op.from_spectral(decay(op, t).cwiseProduct(op.to_spectral(f)));
  }
  Eigen::VectorXd out = Eigen::VectorXd::Zero(f_members.size());
  for (std::size_t j = 0; j < interior.size(); ++j)
    out[static_cast<Eigen::Index>(*b.index_of(interior[j]))] = out_interior[static_cast<Eigen::Index>(j)];
  return out;
}

double dirichlet_mass(const DirichletOperator& op, double t, Vertex x) {
  const Eigen::VectorXd row = dirichlet_kernel_row(op, t, x);
  const Ball& b = op.ball();
  double acc = 0.0;
  for (std::size_t j = 0; j < b.size(); ++j) acc += b.graph().measure(b.members()[j]) * row[static_cast<Eigen::Index>(j)];
  return acc;
}

KernelLaws kernel_laws(const DirichletOperator& op, double t) {
  require_time(t, false);
  const Ball& b = op.ball();
  const WeightedGraph& g = b.graph();
  const auto members = b.members();
  const auto n = static_cast<Eigen::Index>(members.size());
  const Eigen::MatrixXd p = dirichlet_heat_kernel(op, t).values();
  const Eigen::MatrixXd p2 = dirichlet_heat_kernel(op, 2.0 * t).values();
  Eigen::VectorXd mu(n);
  for (Eigen::Index i = 0; i < n; ++i) mu[i] = g.measure(members[static_cast<std::size_t>(i)]);

  KernelLaws laws;
  laws.t = t;
  laws.symmetry = (p - p.transpose()).cwiseAbs().maxCoeff();
  laws.min_entry = p.minCoeff();
  laws.max_mass = (p * mu).maxCoeff();
  laws.chapman_kolmogorov = (p * mu.asDiagonal() * p - p2).cwiseAbs().maxCoeff();
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!b.on_boundary(members[static_cast<std::size_t>(i)])) continue;
    laws.boundary = std::max({laws.boundary, p.row(i).cwiseAbs().maxCoeff(), p.col(i).cwiseAbs().maxCoeff()});
  }

  const double h = 1e-4 * t;
  const Eigen::MatrixXd dt =
      (dirichlet_heat_kernel(op, t + h).values() - dirichlet_heat_kernel(op, t - h).values()) / (2.0 * h);
  const auto interior = b.interior();
  double worst = 0.0, scale = 0.0;
  for (Vertex x : interior) {
    const auto i = static_cast<Eigen::Index>(*b.index_of(x));
    Eigen::VectorXd row_int(static_cast<Eigen::Index>(interior.size()));
    for (std::size_t j = 0; j < interior.size(); ++j)
      row_int[static_cast<Eigen::Index>(j)] = p(i, static_cast<Eigen::Index>(*b.index_of(interior[j])));
    const Eigen::VectorXd lap = op.apply(row_int);
    for (std::size_t j = 0; j < interior.size(); ++j) {
      const double d = dt(i, static_cast<Eigen::Index>(*b.index_of(interior[j])));
      worst = std::max(worst, std::abs(d - lap[static_cast<Eigen::Index>(j)]));
      scale = std::max(scale, std::abs(lap[static_cast<Eigen::Index>(j)]));
    }
  }
  laws.heat_equation = scale > 0.0 ? worst / scale : worst;
  return laws;
}

Exhaustion::Exhaustion(const WeightedGraph& g, Vertex center)
    : graph_(&g), center_(center), max_radius_(max_valid_radius(g, center)) {}

bool Exhaustion::is_exact(int radius) const { return !graph_->is_truncation() && radius >= max_radius_; }

std::shared_ptr<const DirichletOperator> Exhaustion::at(int radius) {
  {
    std::lock_guard lock(mutex_);
    if (auto it = cache_.find(radius); it != cache_.end()) return it->second;
  }
  auto op = std::make_shared<const DirichletOperator>(ball(*graph_, center_, radius));
  std::lock_guard lock(mutex_);
  return cache_.emplace(radius, std::move(op)).first->second;
}

ExhaustedValue exhaust(Exhaustion& ex, int min_radius, const ExhaustionOptions& options,
                       const std::function<double(const DirichletOperator&)>& value_at) {
  return exhaust_impl<double>(ex, min_radius, options, value_at, scalar_gap).second;
}

ExhaustedValue heat_kernel(Exhaustion& ex, double t, Vertex y, const ExhaustionOptions& options) {
  require_time(t, false);
  const int d = distance(ex.graph(), ex.center(), y);
  return exhaust(ex, d + 1, options,
                 [&](const DirichletOperator& op) { return dirichlet_kernel_entry(op, t, ex.center(), y); });
}

ExhaustedValue heat_kernel(const WeightedGraph& g, double t, Vertex x, Vertex y, double tol) {
  Exhaustion ex(g, x);
  ExhaustionOptions options;
  options.tol = tol;
  return heat_kernel(ex, t, y, options);
}

ExhaustedValue mass(Exhaustion& ex, double t, const ExhaustionOptions& options) {
  require_time(t, false);
  return exhaust(ex, 1, options, [&](const DirichletOperator& op) { return dirichlet_mass(op, t, ex.center()); });
}

ExhaustedValue mass(const WeightedGraph& g, double t, Vertex x, double tol) {
  Exhaustion ex(g, x);
  ExhaustionOptions options;
  options.tol = tol;
  return mass(ex, t, options);
}

ExhaustedValue semigroup_at_center(Exhaustion& ex, double t, std::span<const double> a,
                                   const ExhaustionOptions& options) {
  require_time(t, false);
  const WeightedGraph& g = ex.graph();
  if (a.size() != g.size()) fail(ErrorCode::InvalidArgument, "initial data has wrong size");
  return exhaust(ex, 1, options, [&](const DirichletOperator& op) {
    const auto row = dirichlet_kernel_row(op, t, ex.center());
    const auto members = op.ball().members();
    double acc = 0.0;
    for (std::size_t j = 0; j < members.size(); ++j)
      acc += g.measure(members[j]) * row[static_cast<Eigen::Index>(j)] * a[members[j]];
    return acc;
  });
}

ExhaustedRow heat_kernel_row(Exhaustion& ex, double t, int row_radius, const ExhaustionOptions& options) {
  require_time(t, false);
  const Ball target = ball(ex.graph(), ex.center(), row_radius);
  const auto members = target.members();
  auto value_at = [&](const DirichletOperator& op) {
    const auto row = dirichlet_kernel_row(op, t, ex.center());
    std::vector<double> out(members.size());
    for (std::size_t j = 0; j < members.size(); ++j)
      out[j] = row[static_cast<Eigen::Index>(*op.ball().index_of(members[j]))];
    return out;
  };
  auto gap = [](const std::vector<double>& cur, const std::vector<double>& prev) {
    double diff = 0.0;
    double peak = 0.0;
    for (std::size_t j = 0; j < cur.size(); ++j) {
      diff = std::max(diff, std::abs(cur[j] - prev[j]));
      peak = std::max(peak, cur[j]);
    }
    return std::pair{peak, diff};
  };
  auto [values, info] = exhaust_impl<std::vector<double>>(ex, row_radius, options, value_at, gap);
  ExhaustedRow out;
  out.vertices.assign(members.begin(), members.end());
  out.values = std::move(values);
  out.radius = info.radius;
  return out;
}

GaussianFit gaussian_fit(const WeightedGraph& g, Vertex x0, std::span<const double> t_grid,
                         std::span<const std::pair<Vertex, Vertex>> pairs, const GaussianFitOptions& options) {
  if (t_grid.empty()) fail(ErrorCode::InvalidArgument, "gaussian_fit needs a non-empty time grid");
  for (double t : t_grid) {
    if (!(t > options.t0))
      fail(ErrorCode::InvalidArgument, "grid time " + std::to_string(t) + " is not above t0 = " + std::to_string(options.t0));
  }

  GaussianFit fit;
  fit.x0 = x0;
  fit.t0 = options.t0;
  fit.t_grid.assign(t_grid.begin(), t_grid.end());
  if (pairs.empty()) {
    const auto dist = distances_from(g, x0);
    for (int d : {0, 1, 2, 4, 8}) {
      for (Vertex v = 0; v < g.size(); ++v) {
        if (dist[v] == d) {
          fit.pairs.emplace_back(x0, v);
          break;
        }
      }
    }
  } else {
    fit.pairs.assign(pairs.begin(), pairs.end());
  }

  std::map<Vertex, std::unique_ptr<Exhaustion>> exhaustions;
  ExhaustionOptions ex_options;
  ex_options.tol = options.tol;
  for (const auto& [x, y] : fit.pairs) {
    auto& ex = exhaustions[x];
    if (!ex) ex = std::make_unique<Exhaustion>(g, x);
    const int d = distance(g, x, y);
    for (double t : fit.t_grid) {
      GaussianFitPoint pt;
      pt.t = t;
      pt.x = x;
      pt.y = y;
      pt.distance = d;
      pt.kernel = heat_kernel(*ex, t, y, ex_options).value;
      pt.volume = volume(g, x, static_cast<int>(std::floor(std::sqrt(t))));
      if (!(pt.kernel > 0.0)) fail(ErrorCode::DegenerateFit, "non-positive kernel value in Gaussian fit");
      fit.points.push_back(pt);
    }
  }

  const std::size_t n = fit.points.size();
  double sx = 0.0, sy = 0.0;
  std::vector<double> xs(n), ys(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& p = fit.points[i];
    xs[i] = static_cast<double>(p.distance) * p.distance / p.t;
    ys[i] = std::log(p.kernel * p.volume);
    sx += xs[i];
    sy += ys[i];
    fit.c1 = std::max(fit.c1, p.kernel * p.volume);
  }
  const double mx = sx / static_cast<double>(n);
  const double my = sy / static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  if (!(sxx > 0.0)) fail(ErrorCode::DegenerateFit, "all pairs have the same d^2/t; add off-diagonal pairs to identify c3");
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.c3 = -fit.slope;
  if (fit.c3 < options.c3_floor) {
    fit.c3 = options.c3_floor;
    fit.c3_floored = true;
  }
  double ss = 0.0;
  double log_c2 = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    const double r = ys[i] - (fit.intercept + fit.slope * xs[i]);
    ss += r * r;
    log_c2 = std::min(log_c2, ys[i] + fit.c3 * xs[i]);
  }
  fit.rms_residual = std::sqrt(ss / static_cast<double>(n));
  fit.c2 = std::exp(log_c2);
  return fit;
}

}  // namespace fujita
