#include "fujita/serialize.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

namespace fujita {

using nlohmann::json;

namespace {

json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json numbers(const std::vector<double>& v) {
  json out = json::array();
  for (double x : v) out.push_back(number(x));
  return out;
}

json optional_number(const std::optional<double>& v) { return v ? number(*v) : json(nullptr); }

}  // namespace

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

json to_json(const WeightedGraph& g, const DegreeBounds& b) {
  return {{"d_mu", number(b.d_mu)},
          {"d_mu_vertex", g.label(b.d_mu_vertex)},
          {"d_omega", number(b.d_omega)},
          {"mu_max_vertex", g.label(b.mu_max_vertex)},
          {"min_weight_edge", {g.label(b.min_weight_edge.first), g.label(b.min_weight_edge.second)}}};
}

json to_json(const WeightedGraph& g, const CurvatureReport& r) {
  json witness = json::array();
  for (const auto& [v, f] : r.witness) witness.push_back({{"vertex", g.label(v)}, {"f", number(f)}});
  return {{"n", number(r.n)},
          {"curvature", number(r.curvature)},
          {"tolerance", number(r.tolerance)},
          {"worst_residual", number(r.worst_residual)},
          {"witness_vertex", g.label(r.witness_vertex)},
          {"witness", witness},
          {"trials", r.trials},
          {"vertices_tested", r.vertices_tested},
          {"verdict", r.verdict == CurvatureVerdict::Violated ? "violated" : "no_violation_found"}};
}

json to_json(const WeightedGraph& g, const GaussianFit& f) {
  json pairs = json::array();
  for (const auto& [x, y] : f.pairs) pairs.push_back({g.label(x), g.label(y)});
  json points = json::array();
  for (const auto& p : f.points)
    points.push_back({{"t", number(p.t)},
                      {"x", g.label(p.x)},
                      {"y", g.label(p.y)},
                      {"distance", p.distance},
                      {"kernel", number(p.kernel)},
                      {"volume", number(p.volume)}});
  return {{"x0", g.label(f.x0)},
          {"t0", number(f.t0)},
          {"c1", number(f.c1)},
          {"c2", number(f.c2)},
          {"c3", number(f.c3)},
          {"c3_floored", f.c3_floored},
          {"slope", number(f.slope)},
          {"intercept", number(f.intercept)},
          {"rms_residual", number(f.rms_residual)},
          {"t_grid", numbers(f.t_grid)},
          {"pairs", pairs},
          {"points", points},
          {"caveat", "empirical stand-ins for the Gaussian-bound constants"}};
}

json to_json(const FujitaProduct& p) {
  return {{"alpha", number(p.alpha)},
          {"c_prime", number(p.value)},
          {"terms", p.terms},
          {"tail_bound", number(p.tail_bound)}};
}

json to_json(const WeightedGraph& g, const FujitaCertificate& c) {
  json converged = json::array();
  for (char v : c.converged) converged.push_back(v != 0);
  return {{"alpha", number(c.alpha)},
          {"x0", g.label(c.x0)},
          {"t_grid", numbers(c.t_grid)},
          {"values", numbers(c.values)},
          {"converged", converged},
          {"radii", c.radii},
          {"sup_value", number(c.sup_value)},
          {"sup_t", number(c.sup_t)},
          {"c_prime", number(c.c_prime)},
          {"fired", c.fired},
          {"max_radius_used", c.max_radius_used},
          {"all_converged", c.all_converged},
          {"meaning", c.fired ? "no non-negative global solution exists (given D_mu finite)"
                              : "not fired: proves nothing"}};
}

json to_json(const MassBoundReport& r) {
  json entries = json::array();
  for (const auto& e : r.entries)
    entries.push_back({{"r", e.r}, {"mass", number(e.mass)}, {"bound", number(e.bound)}, {"exceeds", e.exceeds}});
  return {{"log_corrected", r.log_corrected},
          {"c_double_prime", number(r.c_double_prime)},
          {"rho", number(r.rho)},
          {"min_radius", number(r.min_radius)},
          {"entries", entries},
          {"caveat", kFittedConstantsCaveat}};
}

json to_json(const WeightedGraph& g, const VolumeGrowthFit& f) {
  return {{"x0", g.label(f.x0)},
          {"r_min", f.r_min},
          {"r_max", f.r_max},
          {"regime", f.regime == GrowthRegime::Polynomial ? "polynomial" : "log_corrected"},
          {"m_hat", number(f.m_hat)},
          {"m", number(f.m)},
          {"intercept", number(f.intercept)},
          {"c_low", number(f.c_low)},
          {"c_high", number(f.c_high)},
          {"c", number(f.c())},
          {"zeta", number(f.zeta)},
          {"eta", number(f.eta)},
          {"c_lower_log", number(f.c_lower_log)},
          {"c_upper_log", number(f.c_upper_log)},
          {"radii", f.radii},
          {"volumes", numbers(f.volumes)},
          {"residuals", numbers(f.residuals)}};
}

json to_json(const WeightedGraph& g, const SqueezeReport& r) {
  json constants;
  if (r.critical) {
    const auto& k = *r.critical;
    constants = {{"alpha", number(k.alpha)}, {"m", number(k.m)},       {"c", number(k.c)},
                 {"c1", number(k.c1)},       {"c2", number(k.c2)},     {"c3", number(k.c3)},
                 {"c_prime", number(k.c_prime)}, {"C1", number(k.C1)}, {"C_double_prime", number(k.c_double_prime)},
                 {"C2", number(k.C2)},       {"C3", number(k.C3)},     {"upper", number(k.upper)}};
  } else if (r.subcritical) {
    const auto& k = *r.subcritical;
    constants = {{"alpha", number(k.alpha)},
                 {"c_lower", number(k.c_lower)},
                 {"c_upper", number(k.c_upper)},
                 {"c1", number(k.c1)},
                 {"c2", number(k.c2)},
                 {"c3", number(k.c3)},
                 {"zeta", number(k.zeta)},
                 {"eta", number(k.eta)},
                 {"c_prime", number(k.c_prime)},
                 {"C1", number(k.C1)},
                 {"a0", number(k.a0)},
                 {"C_double_prime", number(k.c_double_prime)},
                 {"exponent", number(k.exponent)},
                 {"b", number(k.b)},
                 {"C_tilde", number(k.C_tilde)}};
  }
  return {{"regime", to_string(r.regime)},
          {"alpha", number(r.alpha)},
          {"x0", g.label(r.x0)},
          {"r", r.r},
          {"rho", number(r.rho)},
          {"validity_radius", number(r.validity_radius)},
          {"constants", constants},
          {"t_star", optional_number(r.t_star)},
          {"log_t_star", optional_number(r.log_t_star)},
          {"caveat", r.caveat}};
}

json to_json(const BlowupBracket& b) {
  return {{"t_low", number(b.t_low)},
          {"t_high", number(b.t_high)},
          {"within_tolerance", b.within_tolerance},
          {"integrator_rtol", number(b.integrator_rtol)}};
}

json trajectory_summary(const Trajectory& t) {
  json out = {{"status", status_name(t.status)},
              {"caveat", t.caveat},
              {"accepted_steps", t.accepted_steps},
              {"rejected_steps", t.rejected_steps},
              {"times", numbers(t.times)},
              {"sup_norm", numbers(t.sup_norm)}};
  if (const auto* b = std::get_if<BlowUp>(&t.status)) {
    out["bracket"] = {{"t_low", number(b->t_low)}, {"t_high", number(b->t_high)}};
  } else if (const auto* s = std::get_if<StepFloor>(&t.status)) {
    out["step_floor_t"] = number(s->t);
  }
  return out;
}

void write_kernel_csv(std::ostream& out, const HeatKernelMatrix& k, bool header) {
  if (header) out << "x,y,t,value\n";
  const Ball& b = k.ball();
  const WeightedGraph& g = b.graph();
  const auto members = b.members();
  const std::string t = format_double(k.time());
  for (std::size_t i = 0; i < members.size(); ++i)
    for (std::size_t j = 0; j < members.size(); ++j)
      out << '"' << g.label(members[i]) << "\",\"" << g.label(members[j]) << "\"," << t << ','
          << format_double(k.values()(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j))) << '\n';
}

void write_trajectory_csv(std::ostream& out, const WeightedGraph& g, const Trajectory& t) {
  out << "t,vertex,value\n";
  for (std::size_t k = 0; k < t.times.size(); ++k) {
    const std::string tk = format_double(t.times[k]);
    for (std::size_t j = 0; j < t.vertices.size(); ++j)
      out << tk << ",\"" << g.label(t.vertices[j]) << "\"," << format_double(t.states[k][j]) << '\n';
  }
}

void write_squeeze_csv(std::ostream& out, const SqueezeReport& r) {
  out << "t,lower,upper\n";
  for (std::size_t k = 0; k < r.t_grid.size(); ++k)
    out << format_double(r.t_grid[k]) << ',' << format_double(r.lower[k]) << ',' << format_double(r.upper[k]) << '\n';
}

}  // namespace fujita
