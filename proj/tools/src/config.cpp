#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include "fujita/errors.hpp"
#include "fujita/runner.hpp"

namespace fujita::runner {

using nlohmann::json;

namespace {

[[noreturn]] void bad(const std::string& what) { fail(ErrorCode::ConfigParse, what); }

const json& field(const json& doc, const char* key) { return doc.at(key); }

double get_number(const json& doc, const char* key) {
  const json& v = field(doc, key);
  if (!v.is_number()) bad(std::string("'") + key + "' must be a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) bad(std::string("'") + key + "' must be finite");
  return x;
}

double get_positive(const json& doc, const char* key) {
  const double x = get_number(doc, key);
  if (!(x > 0.0)) bad(std::string("'") + key + "' must be > 0");
  return x;
}

int get_int(const json& doc, const char* key) {
  const json& v = field(doc, key);
  if (!v.is_number_integer()) bad(std::string("'") + key + "' must be an integer");
  return v.get<int>();
}

std::string get_string(const json& doc, const char* key, std::initializer_list<const char*> allowed = {}) {
  const json& v = field(doc, key);
  if (!v.is_string()) bad(std::string("'") + key + "' must be a string");
  std::string s = v.get<std::string>();
  if (allowed.size() != 0 &&
      std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return s == a; })) {
    std::string list;
    for (const char* a : allowed) list += std::string(list.empty() ? "" : ", ") + a;
    bad("'" + std::string(key) + "' must be one of: " + list);
  }
  return s;
}

std::vector<double> get_numbers(const json& doc, const char* key, bool positive) {
  const json& v = field(doc, key);
  if (!v.is_array()) bad(std::string("'") + key + "' must be an array of numbers");
  std::vector<double> out;
  for (const auto& e : v) {
    if (!e.is_number()) bad(std::string("'") + key + "' must be an array of numbers");
    const double x = e.get<double>();
    if (!std::isfinite(x) || (positive && !(x > 0.0))) bad(std::string("'") + key + "' entries must be positive");
    out.push_back(x);
  }
  return out;
}

std::vector<int> get_ints(const json& doc, const char* key) {
  const json& v = field(doc, key);
  if (!v.is_array()) bad(std::string("'") + key + "' must be an array of integers");
  std::vector<int> out;
  for (const auto& e : v) {
    if (!e.is_number_integer()) bad(std::string("'") + key + "' must be an array of integers");
    out.push_back(e.get<int>());
  }
  return out;
}

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys{
      "pipeline", "graph",   "path",       "dimension", "half_width",  "measure",       "center",    "radius",
      "data",     "a0",      "delta",      "gamma",     "data_radius", "alpha",         "alphas",    "horizon",
      "rtol",     "atol",    "blowup_rtol", "output_points", "times",   "tol",           "t_grid",    "t_min",
      "t_max",    "t_ratio", "t0",         "r_min",     "r_max",       "regime",        "fixed_m",   "r",
      "r_list",   "fit_times", "n",        "curvature", "trials",      "search_tolerance", "seed",  "output_dir"};
  return keys;
}

void require_increasing(const std::vector<double>& v, const char* key) {
  for (std::size_t i = 1; i < v.size(); ++i)
    if (!(v[i] > v[i - 1])) bad(std::string("'") + key + "' must be strictly increasing");
}

}  // namespace

ExperimentConfig parse_config(const json& doc) {
  if (!doc.is_object()) bad("config must be a JSON object");
  for (const auto& [key, _] : doc.items())
    if (!known_keys().count(key)) bad("unknown key '" + key + "'");
  if (!doc.contains("pipeline")) bad("missing 'pipeline'");

  ExperimentConfig c;
  c.raw = doc;
  c.pipeline = get_string(doc, "pipeline");
  const auto& names = pipelines();
  if (std::find(names.begin(), names.end(), c.pipeline) == names.end()) bad("unknown pipeline '" + c.pipeline + "'");

  auto has = [&](const char* k) { return doc.contains(k); };
  if (has("graph")) c.graph = get_string(doc, "graph", {"lattice", "edge-list"});
  if (has("path")) c.path = get_string(doc, "path");
  if (c.graph == "edge-list" && c.path.empty()) bad("'graph': 'edge-list' needs 'path'");
  if (has("dimension")) c.dimension = get_int(doc, "dimension");
  if (has("half_width")) c.half_width = get_int(doc, "half_width");
  if (c.dimension < 1 || c.half_width < 1) bad("'dimension' and 'half_width' must be >= 1");
  if (has("measure")) c.measure = get_string(doc, "measure", {"degree", "counting"});
  if (has("center")) c.center = get_string(doc, "center");
  if (has("radius")) {
    c.radius = get_int(doc, "radius");
    if (*c.radius < 1) bad("'radius' must be >= 1");
  }

  if (has("data")) c.data = get_string(doc, "data", {"constant", "bump", "kernel"});
  if (has("a0")) c.a0 = get_positive(doc, "a0");
  if (has("delta")) c.delta = get_positive(doc, "delta");
  if (has("gamma")) c.gamma = get_positive(doc, "gamma");
  if (has("data_radius")) {
    c.data_radius = get_int(doc, "data_radius");
    if (*c.data_radius < 0) bad("'data_radius' must be >= 0");
  }

  if (has("alpha")) c.alpha = get_positive(doc, "alpha");
  if (has("alphas")) {
    c.alphas = get_numbers(doc, "alphas", true);
    if (c.alphas.empty()) bad("'alphas' must be non-empty");
  }
  if (has("horizon")) c.horizon = get_positive(doc, "horizon");
  if (has("rtol")) c.rtol = get_positive(doc, "rtol");
  if (has("atol")) c.atol = get_positive(doc, "atol");
  if (has("blowup_rtol")) c.blowup_rtol = get_positive(doc, "blowup_rtol");
  if (has("output_points")) {
    c.output_points = get_int(doc, "output_points");
    if (c.output_points < 1) bad("'output_points' must be >= 1");
  }

  if (has("times")) {
    c.times = get_numbers(doc, "times", true);
    if (c.times.empty()) bad("'times' must be non-empty");
  }
  if (has("tol")) c.tol = get_positive(doc, "tol");
  if (has("t_grid")) {
    c.t_grid = get_numbers(doc, "t_grid", true);
    require_increasing(c.t_grid, "t_grid");
  }
  if (has("t_min")) c.t_min = get_positive(doc, "t_min");
  if (has("t_max")) c.t_max = get_positive(doc, "t_max");
  if (has("t_ratio")) c.t_ratio = get_positive(doc, "t_ratio");
  if (c.t_max < c.t_min || c.t_ratio <= 1.0) bad("need t_min <= t_max and t_ratio > 1");
  if (has("t0")) c.t0 = get_positive(doc, "t0");
  if (has("r_min")) c.r_min = get_int(doc, "r_min");
  if (has("r_max")) c.r_max = get_int(doc, "r_max");
  if (has("regime")) c.regime = get_string(doc, "regime", {"c1", "c2"});
  if (has("fixed_m")) c.fixed_m = get_positive(doc, "fixed_m");
  if (has("r")) c.r = get_int(doc, "r");
  if (has("r_list")) c.r_list = get_ints(doc, "r_list");
  if (has("fit_times")) {
    c.fit_times = get_numbers(doc, "fit_times", true);
    require_increasing(c.fit_times, "fit_times");
  }

  if (has("n")) c.n = get_positive(doc, "n");
  if (has("curvature")) c.curvature = get_number(doc, "curvature");
  if (has("trials")) {
    c.trials = get_int(doc, "trials");
    if (c.trials < 1) bad("'trials' must be >= 1");
  }
  if (has("search_tolerance")) c.search_tolerance = get_positive(doc, "search_tolerance");

  if (has("seed")) {
    const json& s = doc.at("seed");
    if (!s.is_number_integer() || (!s.is_number_unsigned() && s.get<std::int64_t>() < 0))
      bad("'seed' must be a non-negative integer");
    c.seed = s.get<std::uint64_t>();
  }
  if (has("output_dir")) c.output_dir = get_string(doc, "output_dir");

  if (c.pipeline == "fujita-dichotomy" && c.alphas.empty()) bad("'fujita-dichotomy' needs a non-empty 'alphas'");
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) bad("cannot open config '" + path.string() + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    bad("invalid JSON in '" + path.string() + "': " + e.what());
  }
  return parse_config(doc);
}

}  // namespace fujita::runner
