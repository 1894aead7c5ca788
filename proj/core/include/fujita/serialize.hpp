#pragma once

#include <iosfwd>
#include <string>

#include <nlohmann/json.hpp>

#include "fujita/fujita.hpp"
#include "fujita/graph.hpp"
#include "fujita/heat_kernel.hpp"
#include "fujita/operators.hpp"
#include "fujita/semilinear.hpp"
#include "fujita/squeeze.hpp"
#include "fujita/volume.hpp"

namespace fujita {

/// %.17g; the fixed float format of every CSV this library writes.
std::string format_double(double v);

nlohmann::json to_json(const WeightedGraph& g, const DegreeBounds& b);
nlohmann::json to_json(const WeightedGraph& g, const CurvatureReport& r);
nlohmann::json to_json(const WeightedGraph& g, const GaussianFit& f);
nlohmann::json to_json(const FujitaProduct& p);
nlohmann::json to_json(const WeightedGraph& g, const FujitaCertificate& c);
nlohmann::json to_json(const MassBoundReport& r);
nlohmann::json to_json(const WeightedGraph& g, const VolumeGrowthFit& f);
nlohmann::json to_json(const WeightedGraph& g, const SqueezeReport& r);
nlohmann::json to_json(const BlowupBracket& b);
/// Status, bracket, caveat and sup-norm series; states go to CSV.
nlohmann::json trajectory_summary(const Trajectory& t);

/// Rows `x,y,t,value` over the ball members, labels for vertices.
void write_kernel_csv(std::ostream& out, const HeatKernelMatrix& k, bool header = true);
/// Rows `t,vertex,value`.
void write_trajectory_csv(std::ostream& out, const WeightedGraph& g, const Trajectory& t);
/// Rows `t,lower,upper`.
void write_squeeze_csv(std::ostream& out, const SqueezeReport& r);

}  // namespace fujita
