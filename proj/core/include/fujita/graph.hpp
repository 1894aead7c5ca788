#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace fujita {

/// Dense vertex index into a WeightedGraph. Labels are the opaque ids.
using Vertex = std::uint32_t;

struct Neighbor {
  Vertex vertex;
  double weight;
};

enum class MeasureMode { Counting, Degree };

/// Generator descriptor for a truncated lattice Z^m restricted to {-W..W}^m.
struct LatticeFamily {
  int dimension = 1;
  int half_width = 1;
  MeasureMode measure = MeasureMode::Counting;
};

struct EdgeSpec {
  std::string from;
  std::string to;
  double weight = 1.0;
};

/// Default cap on dimension * (2W+1)^dimension for lattice truncations.
inline constexpr std::size_t kDefaultVertexBudget = 4'000'000;

/// A finite, connected, symmetric weighted graph with a positive vertex
/// measure. When it is the truncation of an infinite family, the vertices
/// whose ambient neighbourhood was cut off are flagged (`is_cut`); every
/// ball-based query refuses to touch them.
///
/// Immutable after construction.
class WeightedGraph {
 public:
  std::size_t size() const noexcept { return measure_.size(); }
  std::size_t edge_count() const noexcept { return neighbors_.size() / 2; }

  std::span<const Neighbor> neighbors(Vertex x) const;
  double measure(Vertex x) const { return measure_.at(x); }
  /// m(x) = sum of incident edge weights.
  double degree(Vertex x) const { return degree_.at(x); }
  std::span<const double> measures() const noexcept { return measure_; }

  const std::string& label(Vertex x) const { return labels_.at(x); }
  Vertex find(std::string_view label) const;
  bool contains(Vertex x) const noexcept { return x < size(); }
  void check(Vertex x) const;

  /// True when x lost neighbours to the truncation of the ambient family.
  bool is_cut(Vertex x) const { return cut_.at(x) != 0; }
  bool is_truncation() const noexcept { return has_cut_; }

  double min_weight() const noexcept { return min_weight_; }

  const std::optional<LatticeFamily>& family() const noexcept { return family_; }
  /// Lattice coordinates of x (lattice graphs only).
  std::span<const int> coordinates(Vertex x) const;
  /// Vertex at the given lattice coordinates (lattice graphs only).
  Vertex lattice_vertex(std::span<const int> coords) const;

 private:
  friend WeightedGraph build_graph(std::span<const EdgeSpec>,
                                   const std::map<std::string, double>&);
  friend WeightedGraph lattice(int, int, MeasureMode, std::size_t);

  void finalize();

  std::vector<std::string> labels_;
  std::unordered_map<std::string, Vertex> label_index_;
  std::vector<std::size_t> offsets_;
  std::vector<Neighbor> neighbors_;
  std::vector<double> measure_;
  std::vector<double> degree_;
  std::vector<char> cut_;
  bool has_cut_ = false;
  double min_weight_ = 0.0;
  std::optional<LatticeFamily> family_;
  std::vector<int> coords_;
};

/// Validates and assembles a graph from an edge list. A reversed copy of
/// an edge with the same weight is accepted as the same edge.
WeightedGraph build_graph(std::span<const EdgeSpec> edges,
                          const std::map<std::string, double>& measures);

WeightedGraph lattice(int dimension, int half_width, MeasureMode mode,
                      std::size_t vertex_budget = kDefaultVertexBudget);

/// Hop distance. Throws UnknownVertex.
int distance(const WeightedGraph& g, Vertex x, Vertex y);

/// BFS hop distances from `source`; vertices deeper than `max_depth`
/// (when non-negative) are reported as -1.
std::vector<int> distances_from(const WeightedGraph& g, Vertex source, int max_depth = -1);

/// Largest radius r for which B_r(center) avoids every cut vertex. On a
/// graph that is not a truncation this is the eccentricity of `center`
/// (larger radii give the same ball). Returns -1 when center itself is cut.
int max_valid_radius(const WeightedGraph& g, Vertex center);

/// B_r(x0) with its interior/boundary split. Holds a pointer to the graph,
/// which must outlive the ball.
class Ball {
 public:
  const WeightedGraph& graph() const noexcept { return *graph_; }
  Vertex center() const noexcept { return center_; }
  int radius() const noexcept { return radius_; }
  std::size_t size() const noexcept { return members_.size(); }

  /// Sorted ascending.
  std::span<const Vertex> members() const noexcept { return members_; }
  std::span<const Vertex> interior() const noexcept { return interior_; }
  std::span<const Vertex> boundary() const noexcept { return boundary_; }
  /// Hop distance from the center, aligned with members().
  std::span<const int> depths() const noexcept { return depths_; }

  bool contains(Vertex v) const { return index_of(v).has_value(); }
  bool on_boundary(Vertex v) const;
  std::optional<std::size_t> index_of(Vertex v) const;
  std::optional<std::size_t> interior_index_of(Vertex v) const;
  /// True when the ball is the whole graph with an empty boundary.
  bool is_whole_graph() const noexcept { return boundary_.empty() && members_.size() == graph_->size(); }

 private:
  friend Ball ball(const WeightedGraph&, Vertex, int);
  friend Ball whole_graph_ball(const WeightedGraph&, Vertex);

  const WeightedGraph* graph_ = nullptr;
  Vertex center_ = 0;
  int radius_ = 0;
  std::vector<Vertex> members_;
  std::vector<int> depths_;
  std::vector<Vertex> interior_;
  std::vector<Vertex> boundary_;
};

/// Throws TruncationTooSmall if the ball would contain a cut vertex.
Ball ball(const WeightedGraph& g, Vertex center, int radius);

/// The whole stored graph viewed as a finite graph in its own right: every
/// vertex is interior, the boundary is empty, cut flags are ignored.
Ball whole_graph_ball(const WeightedGraph& g, Vertex center = 0);

/// V(x0, r) = sum of mu over B_r(x0). Same validity rules as ball().
double volume(const WeightedGraph& g, Vertex center, int radius);

struct DegreeBounds {
  double d_mu = 0.0;         // sup m(x)/mu(x)
  Vertex d_mu_vertex = 0;    // attains d_mu
  double d_omega = 0.0;      // mu_max / omega_min
  Vertex mu_max_vertex = 0;  // attains mu_max
  std::pair<Vertex, Vertex> min_weight_edge{0, 0};
  std::vector<double> m_of;  // per-vertex m(x)
};

DegreeBounds degree_bounds(const WeightedGraph& g);

// Edge-list text format: `x y w` per edge, then an optional `# measure`
// section of `x mu` lines. Other lines starting with '#' are comments.
WeightedGraph parse_edge_list(std::istream& in);
WeightedGraph read_edge_list(const std::string& path);
void write_edge_list(std::ostream& out, const WeightedGraph& g);

}  // namespace fujita
