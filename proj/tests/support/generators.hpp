#pragma once

// Hand-rolled random inputs for property tests.

#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "fujita/graph.hpp"

namespace gen {

struct RandomGraph {
  std::vector<fujita::EdgeSpec> edges;
  std::map<std::string, double> measures;
};

/// Connected graph on n vertices: a random spanning tree plus `extra` chords,
/// weights in [0.5, 2], measures in [0.5, 3].
inline RandomGraph random_graph(std::mt19937_64& rng, int n, int extra) {
  std::uniform_real_distribution<double> weight(0.5, 2.0), measure(0.5, 3.0);
  RandomGraph g;
  std::map<std::pair<int, int>, bool> used;
  auto name = [](int i) { return "v" + std::to_string(i); };
  for (int i = 1; i < n; ++i) {
    const int parent = std::uniform_int_distribution<int>(0, i - 1)(rng);
    used[{parent, i}] = true;
    g.edges.push_back({name(parent), name(i), weight(rng)});
  }
  std::uniform_int_distribution<int> pick(0, n - 1);
  for (int k = 0, tries = 0; k < extra && tries < 50 * extra; ++tries) {
    int a = pick(rng), b = pick(rng);
    if (a == b) continue;
    if (a > b) std::swap(a, b);
    if (used[{a, b}]) continue;
    used[{a, b}] = true;
    g.edges.push_back({name(a), name(b), weight(rng)});
    ++k;
  }
  for (int i = 0; i < n; ++i) g.measures[name(i)] = measure(rng);
  return g;
}

inline fujita::WeightedGraph build(const RandomGraph& r) { return fujita::build_graph(r.edges, r.measures); }

inline std::vector<double> positive_function(std::mt19937_64& rng, std::size_t n, double sigma = 1.0) {
  std::lognormal_distribution<double> d(0.0, sigma);
  std::vector<double> f(n);
  for (auto& v : f) v = d(rng);
  return f;
}

inline std::vector<double> real_function(std::mt19937_64& rng, std::size_t n) {
  std::normal_distribution<double> d(0.0, 1.0);
  std::vector<double> f(n);
  for (auto& v : f) v = d(rng);
  return f;
}

/// Path graph v0 - v1 - ... - v{n-1} with unit weights and the given measure.
inline fujita::WeightedGraph path(int n, double mu) {
  std::vector<fujita::EdgeSpec> edges;
  std::map<std::string, double> measures;
  for (int i = 0; i + 1 < n; ++i) edges.push_back({"v" + std::to_string(i), "v" + std::to_string(i + 1), 1.0});
  for (int i = 0; i < n; ++i) measures["v" + std::to_string(i)] = mu;
  return fujita::build_graph(edges, measures);
}

/// Cycle on n vertices, unit weights and measures.
inline fujita::WeightedGraph cycle(int n) {
  std::vector<fujita::EdgeSpec> edges;
  std::map<std::string, double> measures;
  for (int i = 0; i < n; ++i) {
    edges.push_back({"c" + std::to_string(i), "c" + std::to_string((i + 1) % n), 1.0});
    measures["c" + std::to_string(i)] = 1.0;
  }
  return fujita::build_graph(edges, measures);
}

}  // namespace gen
