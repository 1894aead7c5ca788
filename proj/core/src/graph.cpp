#include "fujita/graph.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <queue>
#include <sstream>

#include "fujita/errors.hpp"

namespace fujita {

namespace {

std::string lattice_label(std::span<const int> coords) {
  std::string s;
  for (std::size_t i = 0; i < coords.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(coords[i]);
  }
  return s;
}

}  // namespace

std::span<const Neighbor> WeightedGraph::neighbors(Vertex x) const {
  check(x);
  return {neighbors_.data() + offsets_[x], offsets_[x + 1] - offsets_[x]};
}

void WeightedGraph::check(Vertex x) const {
  if (x >= size()) fail(ErrorCode::UnknownVertex, "vertex index " + std::to_string(x) + " out of range");
}

Vertex WeightedGraph::find(std::string_view label) const {
  auto it = label_index_.find(std::string(label));
  if (it == label_index_.end()) fail(ErrorCode::UnknownVertex, "no vertex labelled '" + std::string(label) + "'");
  return it->second;
}

std::span<const int> WeightedGraph::coordinates(Vertex x) const {
  check(x);
  if (!family_) fail(ErrorCode::InvalidFamily, "graph is not a lattice");
  const auto m = static_cast<std::size_t>(family_->dimension);
  return {coords_.data() + x * m, m};
}

Vertex WeightedGraph::lattice_vertex(std::span<const int> coords) const {
  if (!family_) fail(ErrorCode::InvalidFamily, "graph is not a lattice");
  if (coords.size() != static_cast<std::size_t>(family_->dimension))
    fail(ErrorCode::UnknownVertex, "coordinate tuple has wrong dimension");
  const int w = family_->half_width;
  std::size_t index = 0;
  for (int c : coords) {
    if (c < -w || c > w) fail(ErrorCode::UnknownVertex, "lattice coordinate outside truncation");
    index = index * static_cast<std::size_t>(2 * w + 1) + static_cast<std::size_t>(c + w);
  }
  return static_cast<Vertex>(index);
}

void WeightedGraph::finalize() {
  const std::size_t n = measure_.size();
  degree_.assign(n, 0.0);
  min_weight_ = std::numeric_limits<double>::infinity();
  for (std::size_t x = 0; x < n; ++x) {
    for (std::size_t k = offsets_[x]; k < offsets_[x + 1]; ++k) {
      degree_[x] += neighbors_[k].weight;
      min_weight_ = std::min(min_weight_, neighbors_[k].weight);
    }
  }
  if (cut_.empty()) cut_.assign(n, 0);
  has_cut_ = std::any_of(cut_.begin(), cut_.end(), [](char c) { return c != 0; });
  label_index_.clear();
  for (std::size_t x = 0; x < n; ++x) label_index_.emplace(labels_[x], static_cast<Vertex>(x));
}

WeightedGraph build_graph(std::span<const EdgeSpec> edges,
                          const std::map<std::string, double>& measures) {
  if (edges.empty()) fail(ErrorCode::InvalidArgument, "graph needs at least one edge (omega_min undefined)");

  WeightedGraph g;
  std::unordered_map<std::string, Vertex> ids;
  auto intern = [&](const std::string& label) {
    auto [it, inserted] = ids.emplace(label, static_cast<Vertex>(g.labels_.size()));
    if (inserted) g.labels_.push_back(label);
    return it->second;
  };

  struct Directed {
    Vertex from, to;
    double weight;
  };
  std::map<std::pair<Vertex, Vertex>, double> seen;  // keyed by the direction it was given
  std::vector<Directed> stored;
  for (const auto& e : edges) {
    if (!(e.weight > 0.0) || !std::isfinite(e.weight))
      fail(ErrorCode::NonpositiveWeightOrMeasure, "edge " + e.from + "-" + e.to + " has weight " + std::to_string(e.weight));
    if (e.from == e.to) fail(ErrorCode::SelfLoop, "self-loop at " + e.from);
    const Vertex a = intern(e.from);
    const Vertex b = intern(e.to);
    if (seen.count({a, b})) fail(ErrorCode::DuplicateEdge, "edge " + e.from + "-" + e.to + " listed twice");
    if (auto rev = seen.find({b, a}); rev != seen.end()) {
      if (rev->second != e.weight)
        fail(ErrorCode::AsymmetricWeight, "edge " + e.from + "-" + e.to + " has weights " +
                                              std::to_string(rev->second) + " and " + std::to_string(e.weight));
      seen.emplace(std::pair{a, b}, e.weight);
      continue;  // symmetric partner of an edge already stored
    }
    seen.emplace(std::pair{a, b}, e.weight);
    stored.push_back({a, b, e.weight});
  }

  for (const auto& [label, mu] : measures) {
    if (!ids.count(label)) intern(label);  // isolated vertex; caught by the connectivity check
    if (!(mu > 0.0) || !std::isfinite(mu))
      fail(ErrorCode::NonpositiveWeightOrMeasure, "vertex " + label + " has measure " + std::to_string(mu));
  }

  const std::size_t n = g.labels_.size();
  g.measure_.resize(n);
  for (std::size_t x = 0; x < n; ++x) {
    auto it = measures.find(g.labels_[x]);
    if (it == measures.end()) fail(ErrorCode::NonpositiveWeightOrMeasure, "vertex " + g.labels_[x] + " has no measure");
    g.measure_[x] = it->second;
  }

  std::vector<std::size_t> count(n, 0);
  for (const auto& e : stored) {
    ++count[e.from];
    ++count[e.to];
  }
  g.offsets_.assign(n + 1, 0);
  for (std::size_t x = 0; x < n; ++x) g.offsets_[x + 1] = g.offsets_[x] + count[x];
  g.neighbors_.resize(g.offsets_[n]);
  std::vector<std::size_t> fill(g.offsets_.begin(), g.offsets_.end() - 1);
  for (const auto& e : stored) {
    g.neighbors_[fill[e.from]++] = {e.to, e.weight};
    g.neighbors_[fill[e.to]++] = {e.from, e.weight};
  }
  for (std::size_t x = 0; x < n; ++x) {
    std::sort(g.neighbors_.begin() + static_cast<std::ptrdiff_t>(g.offsets_[x]),
              g.neighbors_.begin() + static_cast<std::ptrdiff_t>(g.offsets_[x + 1]),
              [](const Neighbor& l, const Neighbor& r) { return l.vertex < r.vertex; });
  }
  g.finalize();

  const auto reach = distances_from(g, 0);
  for (std::size_t x = 0; x < n; ++x) {
    if (reach[x] < 0) fail(ErrorCode::Disconnected, "vertex " + g.labels_[x] + " is not reachable from " + g.labels_[0]);
  }
  return g;
}

WeightedGraph lattice(int dimension, int half_width, MeasureMode mode, std::size_t vertex_budget) {
  if (dimension < 1) fail(ErrorCode::InvalidFamily, "lattice dimension must be >= 1");
  if (half_width < 1) fail(ErrorCode::InvalidFamily, "lattice half-width must be >= 1 (single vertex has no edges)");
  const double side = 2.0 * half_width + 1.0;
  const double cost = dimension * std::pow(side, dimension);
  if (cost > static_cast<double>(vertex_budget))
    fail(ErrorCode::BudgetExceeded, "lattice(" + std::to_string(dimension) + ", " + std::to_string(half_width) +
                                        ") needs " + std::to_string(cost) + " > budget " + std::to_string(vertex_budget));

  const auto m = static_cast<std::size_t>(dimension);
  const auto s = static_cast<std::size_t>(side);
  std::size_t n = 1;
  for (std::size_t i = 0; i < m; ++i) n *= s;

  WeightedGraph g;
  g.family_ = LatticeFamily{dimension, half_width, mode};
  g.coords_.resize(n * m);
  g.labels_.resize(n);
  g.cut_.assign(n, 0);
  std::vector<std::size_t> stride(m, 1);
  for (std::size_t i = m - 1; i-- > 0;) stride[i] = stride[i + 1] * s;

  for (std::size_t v = 0; v < n; ++v) {
    std::size_t rest = v;
    for (std::size_t i = 0; i < m; ++i) {
      const int c = static_cast<int>(rest / stride[i]) - half_width;
      rest %= stride[i];
      g.coords_[v * m + i] = c;
      if (c == half_width || c == -half_width) g.cut_[v] = 1;
    }
    g.labels_[v] = lattice_label({g.coords_.data() + v * m, m});
  }

  g.offsets_.assign(n + 1, 0);
  g.neighbors_.reserve(2 * m * n);
  for (std::size_t v = 0; v < n; ++v) {
    for (std::size_t i = 0; i < m; ++i) {
      const int c = g.coords_[v * m + i];
      if (c > -half_width) g.neighbors_.push_back({static_cast<Vertex>(v - stride[i]), 1.0});
    }
    for (std::size_t i = m; i-- > 0;) {
      const int c = g.coords_[v * m + i];
      if (c < half_width) g.neighbors_.push_back({static_cast<Vertex>(v + stride[i]), 1.0});
    }
    g.offsets_[v + 1] = g.neighbors_.size();
  }
  for (std::size_t v = 0; v < n; ++v) {
    std::sort(g.neighbors_.begin() + static_cast<std::ptrdiff_t>(g.offsets_[v]),
              g.neighbors_.begin() + static_cast<std::ptrdiff_t>(g.offsets_[v + 1]),
              [](const Neighbor& l, const Neighbor& r) { return l.vertex < r.vertex; });
  }

  g.measure_.assign(n, 1.0);
  g.finalize();
  if (mode == MeasureMode::Degree) g.measure_ = g.degree_;
  return g;
}

std::vector<int> distances_from(const WeightedGraph& g, Vertex source, int max_depth) {
  g.check(source);
  std::vector<int> dist(g.size(), -1);
  std::queue<Vertex> frontier;
  dist[source] = 0;
  frontier.push(source);
  while (!frontier.empty()) {
    const Vertex x = frontier.front();
    frontier.pop();
    if (max_depth >= 0 && dist[x] >= max_depth) continue;
    for (const auto& nb : g.neighbors(x)) {
      if (dist[nb.vertex] < 0) {
        dist[nb.vertex] = dist[x] + 1;
        frontier.push(nb.vertex);
      }
    }
  }
  return dist;
}

int distance(const WeightedGraph& g, Vertex x, Vertex y) {
  g.check(x);
  g.check(y);
  if (x == y) return 0;
  return distances_from(g, x)[y];
}

int max_valid_radius(const WeightedGraph& g, Vertex center) {
  g.check(center);
  const auto dist = distances_from(g, center);
  if (!g.is_truncation()) return *std::max_element(dist.begin(), dist.end());
  int nearest_cut = std::numeric_limits<int>::max();
  for (std::size_t v = 0; v < g.size(); ++v) {
    if (g.is_cut(static_cast<Vertex>(v))) nearest_cut = std::min(nearest_cut, dist[v]);
  }
  return nearest_cut - 1;
}

bool Ball::on_boundary(Vertex v) const {
  return std::binary_search(boundary_.begin(), boundary_.end(), v);
}

std::optional<std::size_t> Ball::index_of(Vertex v) const {
  auto it = std::lower_bound(members_.begin(), members_.end(), v);
  if (it == members_.end() || *it != v) return std::nullopt;
  return static_cast<std::size_t>(it - members_.begin());
}

std::optional<std::size_t> Ball::interior_index_of(Vertex v) const {
  auto it = std::lower_bound(interior_.begin(), interior_.end(), v);
  if (it == interior_.end() || *it != v) return std::nullopt;
  return static_cast<std::size_t>(it - interior_.begin());
}

Ball ball(const WeightedGraph& g, Vertex center, int radius) {
  g.check(center);
  if (radius < 0) fail(ErrorCode::InvalidArgument, "ball radius must be >= 0");
  const auto dist = distances_from(g, center, radius);

  Ball b;
  b.graph_ = &g;
  b.center_ = center;
  b.radius_ = radius;
  for (std::size_t v = 0; v < g.size(); ++v) {
    if (dist[v] < 0) continue;
    if (g.is_cut(static_cast<Vertex>(v)))
      fail(ErrorCode::TruncationTooSmall, "B_" + std::to_string(radius) + "(" + g.label(center) +
                                              ") reaches the truncation edge at " + g.label(static_cast<Vertex>(v)));
    b.members_.push_back(static_cast<Vertex>(v));
    b.depths_.push_back(dist[v]);
  }
  for (Vertex v : b.members_) {
    bool leaks = false;
    for (const auto& nb : g.neighbors(v)) {
      if (dist[nb.vertex] < 0) {
        leaks = true;
        break;
      }
    }
    (leaks ? b.boundary_ : b.interior_).push_back(v);
  }
  return b;
}

Ball whole_graph_ball(const WeightedGraph& g, Vertex center) {
  g.check(center);
  const auto dist = distances_from(g, center);
  Ball b;
  b.graph_ = &g;
  b.center_ = center;
  b.radius_ = *std::max_element(dist.begin(), dist.end());
  b.members_.resize(g.size());
  for (std::size_t v = 0; v < g.size(); ++v) b.members_[v] = static_cast<Vertex>(v);
  b.depths_ = dist;
  b.interior_ = b.members_;
  return b;
}

double volume(const WeightedGraph& g, Vertex center, int radius) {
  const Ball b = ball(g, center, radius);
  double total = 0.0;
  for (Vertex v : b.members()) total += g.measure(v);
  return total;
}

DegreeBounds degree_bounds(const WeightedGraph& g) {
  DegreeBounds d;
  d.m_of.resize(g.size());
  double mu_max = 0.0;
  double w_min = std::numeric_limits<double>::infinity();
  for (Vertex x = 0; x < g.size(); ++x) {
    d.m_of[x] = g.degree(x);
    const double ratio = g.degree(x) / g.measure(x);
    if (ratio > d.d_mu) {
      d.d_mu = ratio;
      d.d_mu_vertex = x;
    }
    if (g.measure(x) > mu_max) {
      mu_max = g.measure(x);
      d.mu_max_vertex = x;
    }
    for (const auto& nb : g.neighbors(x)) {
      if (nb.vertex > x && nb.weight < w_min) {
        w_min = nb.weight;
        d.min_weight_edge = {x, nb.vertex};
      }
    }
  }
  d.d_omega = mu_max / w_min;
  return d;
}

WeightedGraph parse_edge_list(std::istream& in) {
  std::vector<EdgeSpec> edges;
  std::map<std::string, double> measures;
  bool in_measures = false;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    std::string trimmed = line.substr(first);
    while (!trimmed.empty() && (trimmed.back() == ' ' || trimmed.back() == '\t' || trimmed.back() == '\r'))
      trimmed.pop_back();
    if (trimmed[0] == '#') {
      if (trimmed == "# measure") in_measures = true;
      continue;
    }
    std::istringstream fields(trimmed);
    if (in_measures) {
      std::string x;
      double mu = 0.0;
      if (!(fields >> x >> mu)) fail(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": expected `x mu`");
      if (measures.count(x)) fail(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": measure for " + x + " repeated");
      measures[x] = mu;
    } else {
      EdgeSpec e;
      if (!(fields >> e.from >> e.to >> e.weight))
        fail(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": expected `x y w`");
      edges.push_back(std::move(e));
    }
    std::string extra;
    if (fields >> extra) fail(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": trailing field '" + extra + "'");
  }
  return build_graph(edges, measures);
}

WeightedGraph read_edge_list(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::ParseError, "cannot open edge list " + path);
  return parse_edge_list(in);
}

void write_edge_list(std::ostream& out, const WeightedGraph& g) {
  const auto old_precision = out.precision(17);
  for (Vertex x = 0; x < g.size(); ++x) {
    for (const auto& nb : g.neighbors(x)) {
      if (nb.vertex > x) out << g.label(x) << ' ' << g.label(nb.vertex) << ' ' << nb.weight << '\n';
    }
  }
  out << "# measure\n";
  for (Vertex x = 0; x < g.size(); ++x) out << g.label(x) << ' ' << g.measure(x) << '\n';
  out.precision(old_precision);
}

}  // namespace fujita
