#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

#include <openssl/evp.h>

#include "fujita/errors.hpp"
#include "fujita/fujita.hpp"
#include "fujita/graph.hpp"
#include "fujita/heat_kernel.hpp"
#include "fujita/operators.hpp"
#include "fujita/runner.hpp"
#include "fujita/semilinear.hpp"
#include "fujita/serialize.hpp"
#include "fujita/squeeze.hpp"
#include "fujita/volume.hpp"

namespace fujita::runner {

namespace fs = std::filesystem;
using nlohmann::json;

std::string sha256_hex(const fs::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) fail(ErrorCode::StageFailure, "cannot read '" + file.string() + "' for hashing");
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
  char buf[1 << 16];
  while (in) {
    in.read(buf, sizeof buf);
    if (in.gcount() > 0) EVP_DigestUpdate(ctx, buf, static_cast<std::size_t>(in.gcount()));
  }
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx, digest, &len);
  EVP_MD_CTX_free(ctx);
  std::ostringstream hex;
  for (unsigned int i = 0; i < len; ++i) hex << std::hex << std::setw(2) << std::setfill('0') << int(digest[i]);
  return hex.str();
}

json to_json(const RunManifest& m) {
  json stages = json::array();
  for (const auto& s : m.stages) stages.push_back({{"name", s.name}, {"seconds", s.seconds}});
  json files = json::array();
  for (const auto& f : m.files) files.push_back({{"path", f.path}, {"sha256", f.sha256}, {"bytes", f.bytes}});
  return {{"tool", "fujita"},     {"version", m.tool_version}, {"pipeline", m.pipeline}, {"seed", m.seed},
          {"config", m.config},   {"stages", stages},          {"files", files},         {"caveats", m.caveats}};
}

namespace {

class Run {
 public:
  Run(const ExperimentConfig& c, fs::path out) : c_(c), out_(std::move(out)) {
    manifest_.config = c.raw;
    manifest_.pipeline = c.pipeline;
    manifest_.seed = c.seed;
  }

  template <class F>
  auto stage(const std::string& name, F&& body) {
    const auto start = std::chrono::steady_clock::now();
    auto finish = [&] {
      manifest_.stages.push_back(
          {name, std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count()});
    };
    try {
      if constexpr (std::is_void_v<decltype(body())>) {
        body();
        finish();
      } else {
        auto result = body();
        finish();
        return result;
      }
    } catch (const Error& e) {
      finish();
      if (e.code() == ErrorCode::StageFailure || e.code() == ErrorCode::ConfigParse) throw;
      fail(ErrorCode::StageFailure, "stage '" + name + "': " + e.what());
    } catch (const std::exception& e) {
      finish();
      fail(ErrorCode::StageFailure, "stage '" + name + "': " + e.what());
    }
  }

  void write_json(const std::string& name, const json& doc) {
    write(name, [&](std::ostream& os) { os << doc.dump(2) << '\n'; });
  }

  template <class F>
  void write(const std::string& name, F&& emit) {
    std::ofstream os(out_ / name, std::ios::binary);
    if (!os) fail(ErrorCode::StageFailure, "cannot write '" + (out_ / name).string() + "'");
    emit(os);
    os.close();
    if (std::find(emitted_.begin(), emitted_.end(), name) == emitted_.end()) emitted_.push_back(name);
  }

  void caveat(const std::string& text) {
    if (std::find(manifest_.caveats.begin(), manifest_.caveats.end(), text) == manifest_.caveats.end())
      manifest_.caveats.push_back(text);
  }

  RunManifest finish() {
    std::sort(emitted_.begin(), emitted_.end());
    for (const auto& name : emitted_)
      manifest_.files.push_back({name, sha256_hex(out_ / name), fs::file_size(out_ / name)});
    std::ofstream os(out_ / "manifest.json", std::ios::binary);
    os << to_json(manifest_).dump(2) << '\n';
    return manifest_;
  }

  const ExperimentConfig& c_;
  fs::path out_;
  RunManifest manifest_;
  std::vector<std::string> emitted_;
};

WeightedGraph make_graph(const ExperimentConfig& c) {
  if (c.graph == "edge-list") return read_edge_list(c.path);
  return lattice(c.dimension, c.half_width, c.measure == "degree" ? MeasureMode::Degree : MeasureMode::Counting);
}

Vertex center_of(const ExperimentConfig& c, const WeightedGraph& g) {
  if (c.center) return g.find(*c.center);
  if (g.family()) return g.lattice_vertex(std::vector<int>(static_cast<std::size_t>(g.family()->dimension), 0));
  return 0;
}

std::vector<double> make_data(const ExperimentConfig& c, const WeightedGraph& g, Vertex x0) {
  if (c.data == "constant") return std::vector<double>(g.size(), c.a0);
  if (c.data == "bump") {
    const int R = c.data_radius.value_or(2);
    const auto d = distances_from(g, x0);
    std::vector<double> a(g.size(), 0.0);
    for (Vertex v = 0; v < g.size(); ++v)
      if (d[v] >= 0 && d[v] <= R) a[v] = c.a0 * (1.0 - static_cast<double>(d[v]) / (R + 1));
    return a;
  }
  const int R = c.data_radius.value_or(std::max(1, max_valid_radius(g, x0) / 2));
  return kernel_data(g, x0, c.delta, c.gamma, R);
}

Problem make_dynamics(const ExperimentConfig& c, const WeightedGraph& g, Vertex x0, double alpha,
                      const std::vector<double>& a) {
  if (g.is_truncation() || c.radius)
    return truncated_problem(g, x0, c.radius.value_or(max_valid_radius(g, x0)), alpha, a, c.horizon);
  return finite_graph_problem(g, alpha, a, c.horizon);
}

std::vector<double> output_grid(const ExperimentConfig& c) {
  std::vector<double> grid;
  for (int k = 1; k <= c.output_points; ++k) grid.push_back(c.horizon * k / c.output_points);
  return grid;
}

std::vector<double> certificate_grid(const ExperimentConfig& c) {
  return c.t_grid.empty() ? geometric_grid(c.t_min, c.t_max, c.t_ratio) : c.t_grid;
}

std::string alpha_tag(double alpha) {
  std::ostringstream os;
  os << alpha;
  return os.str();
}

void kernel_validate(Run& run, const WeightedGraph& g, Vertex x0) {
  const auto& c = run.c_;
  const int max_r = max_valid_radius(g, x0);
  json checks = json::array();
  bool all_pass = true;
  auto check = [&](const std::string& name, double value, double tolerance, bool pass, json extra = json::object()) {
    json e = {{"name", name}, {"value", value}, {"tolerance", tolerance}, {"pass", pass}};
    e.update(extra);
    checks.push_back(e);
    all_pass = all_pass && pass;
  };

  run.stage("finite-ball-laws", [&] {
    const int radius = c.radius.value_or(std::min(20, max_r));
    const DirichletOperator op(ball(g, x0, radius));
    run.write("kernel.csv", [&](std::ostream& os) {
      bool header = true;
      for (double t : c.times) {
        write_kernel_csv(os, dirichlet_heat_kernel(op, t), header);
        header = false;
      }
    });
    for (double t : c.times) {
      const auto laws = kernel_laws(op, t);
      const json at = {{"t", t}, {"radius", radius}};
      check("symmetry", laws.symmetry, 1e-10, laws.symmetry <= 1e-10, at);
      check("nonnegativity", laws.min_entry, -1e-12, laws.min_entry >= -1e-12, at);
      check("sub_markov_mass", laws.max_mass, 1.0 + 1e-10, laws.max_mass <= 1.0 + 1e-10, at);
      check("chapman_kolmogorov", laws.chapman_kolmogorov, 1e-8, laws.chapman_kolmogorov <= 1e-8, at);
      check("boundary_zero", laws.boundary, 0.0, laws.boundary == 0.0, at);
      check("heat_equation_relative", laws.heat_equation, 1e-6, laws.heat_equation <= 1e-6, at);
    }
  });

  run.stage("exhaustion", [&] {
    Exhaustion ex(g, x0);
    double previous = 0.0;
    bool monotone = true;
    json seq = json::array();
    for (int r : {5, 10, 20, 40, 80}) {
      if (r > max_r) break;
      const double v = dirichlet_kernel_entry(*ex.at(r), 1.0, x0, x0);
      monotone = monotone && v >= previous - 64.0 * std::numeric_limits<double>::epsilon() * previous;
      previous = v;
      seq.push_back({{"r", r}, {"p_r", v}});
    }
    check("exhaustion_monotone", previous, 0.0, monotone, {{"sequence", seq}});
    if (max_r >= 50) {
      const int r = std::min(max_r, 64);
      const double m = dirichlet_mass(*ex.at(r), 1.0, x0);
      check("stochastic_completeness", std::abs(1.0 - m), 1e-6, std::abs(1.0 - m) <= 1e-6, {{"radius", r}});
    }
    const auto d = distances_from(g, x0, 3);
    Vertex y = x0;
    for (Vertex v = 0; v < g.size(); ++v)
      if (d[v] == std::min(3, max_r / 4)) {
        y = v;
        break;
      }
    const double pxy = heat_kernel(g, 1.0, x0, y, c.tol).value;
    const double pyx = heat_kernel(g, 1.0, y, x0, c.tol).value;
    check("limit_symmetry", std::abs(pxy - pyx), 2.0 * c.tol, std::abs(pxy - pyx) <= 2.0 * c.tol,
          {{"y", g.label(y)}});
    const double total = mass(g, 1.0, x0, c.tol).value;
    check("limit_mass_at_most_one", total, 1.0 + 1e-10, total <= 1.0 + 1e-10);
  });

  run.write_json("kernel_validate.json", {{"checks", checks}, {"all_pass", all_pass}});
  if (!all_pass) fail(ErrorCode::StageFailure, "kernel-validate: at least one invariant failed");
}

void curvature_search(Run& run, const WeightedGraph& g) {
  const auto& c = run.c_;
  const auto report = run.stage("cde-search", [&] {
    CdeSearchOptions o;
    o.trials = static_cast<std::size_t>(c.trials);
    o.seed = c.seed;
    o.tolerance = c.search_tolerance;
    return cde_search(g, c.n, c.curvature, o);
  });
  json doc = to_json(g, report);
  doc["degree_bounds"] = to_json(g, degree_bounds(g));
  run.write_json("curvature.json", doc);
}

void blowup_pipeline(Run& run, const WeightedGraph& g, Vertex x0, const std::vector<double>& a) {
  const auto& c = run.c_;
  const Problem p = run.stage("problem", [&] { return make_dynamics(c, g, x0, c.alpha, a); });
  MolOptions o;
  o.rtol = c.rtol;
  o.atol = c.atol;
  o.output_times = output_grid(c);
  const auto traj = run.stage("integrate", [&] { return integrate_mol(p, o); });
  const auto bracket = run.stage("bracket", [&] { return blowup_time(p, c.blowup_rtol, o); });
  json doc = trajectory_summary(traj);
  doc["alpha"] = c.alpha;
  doc["refined_bracket"] = bracket ? to_json(*bracket) : json(nullptr);
  run.write_json("blowup.json", doc);
  run.write("trajectory.csv", [&](std::ostream& os) { write_trajectory_csv(os, g, traj); });
  if (!traj.caveat.empty()) run.caveat(traj.caveat);
}

void dichotomy(Run& run, const WeightedGraph& g, Vertex x0, const std::vector<double>& a) {
  const auto& c = run.c_;
  json rows = json::array();
  for (double alpha : c.alphas) {
    const std::string tag = alpha_tag(alpha);
    const auto traj = run.stage("alpha=" + tag, [&] {
      MolOptions o;
      o.rtol = c.rtol;
      o.atol = c.atol;
      o.output_times = output_grid(c);
      return integrate_mol(make_dynamics(c, g, x0, alpha, a), o);
    });
    json row = trajectory_summary(traj);
    row.erase("times");
    row.erase("sup_norm");
    row["alpha"] = alpha;
    row["final_t"] = traj.times.back();
    row["final_sup"] = traj.sup_norm.back();
    if (!traj.blew_up()) row["note"] = "bounded to the horizon: a demonstration, not a certificate of global existence";
    rows.push_back(row);
    run.write("trajectory_alpha_" + tag + ".csv", [&](std::ostream& os) { write_trajectory_csv(os, g, traj); });
    if (!traj.caveat.empty()) run.caveat(traj.caveat);
  }
  run.write_json("dichotomy.json", {{"runs", rows}, {"horizon", c.horizon}, {"data", c.data}});
}

void certificate(Run& run, const WeightedGraph& g, Vertex x0, const std::vector<double>& a) {
  const auto& c = run.c_;
  const auto grid = certificate_grid(c);
  const auto cert = run.stage("certificate", [&] {
    CertificateOptions o;
    o.tol = c.tol;
    return small_data_certificate(g, a, c.alpha, x0, grid, o);
  });
  run.write_json("certificate.json", to_json(g, cert));
  run.write("certificate.csv", [&](std::ostream& os) {
    os << "t,value,converged,radius\n";
    for (std::size_t k = 0; k < grid.size(); ++k)
      os << format_double(grid[k]) << ',' << format_double(cert.values[k]) << ',' << int(cert.converged[k]) << ','
         << cert.radii[k] << '\n';
  });
  if (!cert.all_converged)
    run.caveat("some certificate points use the largest truncation ball value, a lower bound for P_t a");
}

GaussianFit fit_gaussian(Run& run, const WeightedGraph& g, Vertex x0) {
  const auto& c = run.c_;
  return run.stage("gaussian-fit", [&] {
    GaussianFitOptions o;
    o.t0 = c.t0;
    o.tol = std::min(c.tol, 1e-12);
    return gaussian_fit(g, x0, c.fit_times, {}, o);
  });
}

VolumeGrowthFit fit_volume(Run& run, const WeightedGraph& g, Vertex x0) {
  const auto& c = run.c_;
  return run.stage("volume-fit", [&] {
    return volume_growth_fit(g, x0, c.r_min, c.r_max,
                             c.regime == "c1" ? GrowthRegime::Polynomial : GrowthRegime::LogCorrected, c.fixed_m);
  });
}

void squeeze(Run& run, const WeightedGraph& g, Vertex x0, const std::vector<double>& a) {
  const auto& c = run.c_;
  const auto gf = fit_gaussian(run, g, x0);
  const auto vf = fit_volume(run, g, x0);
  run.write_json("gaussian_fit.json", to_json(g, gf));
  run.write_json("volume_fit.json", to_json(g, vf));
  const SqueezeRegime regime = c.regime == "c1" ? SqueezeRegime::Critical : SqueezeRegime::Subcritical;

  const double r0 = vf.r_min;
  const double rho = std::max(gf.t0, r0 * r0);
  double validity = std::sqrt(rho / gf.c3);
  if (regime == SqueezeRegime::Critical) validity = std::max(validity, std::sqrt(rho / (gf.c3 * c.alpha)));
  const int r = c.r.value_or(static_cast<int>(std::floor(validity)) + 1);

  const auto c_prime = fujita_product(c.alpha).value;
  const auto mass = run.stage("mass-bound", [&] {
    const std::vector<int> radii = c.r_list.empty() ? std::vector<int>{r} : c.r_list;
    return initial_mass_bound(g, a, x0, radii, gf, c_prime, vf);
  });
  run.write_json("mass_bound.json", to_json(mass));

  const auto report = run.stage("squeeze", [&] {
    return squeeze_report(g, a, c.alpha, x0, {gf, vf}, certificate_grid(c), r, regime);
  });
  run.write_json("squeeze.json", to_json(g, report));
  run.write("squeeze.csv", [&](std::ostream& os) { write_squeeze_csv(os, report); });
  run.caveat(kFittedConstantsCaveat);
}

}  // namespace

RunManifest run_experiment(const ExperimentConfig& c, const fs::path& out_dir) {
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  {
    std::ofstream probe(out_dir / ".write_probe");
    if (ec || !probe) fail(ErrorCode::ConfigParse, "output directory '" + out_dir.string() + "' is not writable");
  }
  fs::remove(out_dir / ".write_probe", ec);

  Run run(c, out_dir);
  const WeightedGraph g = run.stage("build-graph", [&] { return make_graph(c); });
  const Vertex x0 = run.stage("center", [&] { return center_of(c, g); });
  if (g.is_truncation())
    run.caveat("graph is a finite truncation of an infinite family; ball queries stop before the cut");

  const auto& p = c.pipeline;
  if (p == "kernel-validate") {
    kernel_validate(run, g, x0);
  } else if (p == "curvature-search") {
    curvature_search(run, g);
  } else if (p == "volume-fit") {
    run.write_json("volume_fit.json", to_json(g, fit_volume(run, g, x0)));
  } else if (p == "gaussian-fit") {
    run.write_json("gaussian_fit.json", to_json(g, fit_gaussian(run, g, x0)));
    run.caveat(kFittedConstantsCaveat);
  } else {
    const auto a = run.stage("initial-data", [&] { return make_data(c, g, x0); });
    if (p == "blowup") blowup_pipeline(run, g, x0, a);
    else if (p == "fujita-dichotomy") dichotomy(run, g, x0, a);
    else if (p == "certificate") certificate(run, g, x0, a);
    else if (p == "squeeze-report") squeeze(run, g, x0, a);
    else fail(ErrorCode::ConfigParse, "unknown pipeline '" + p + "'");
  }
  return run.finish();
}

}  // namespace fujita::runner
