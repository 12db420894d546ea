// Shared fixtures: the 2 x 2 case instance and the MILP-versus-evaluator check.

#pragma once

#include "lidarconf/milp.hpp"
#include "lidarconf/objective.hpp"

#include <algorithm>
#include <map>
#include <string>

namespace support {

using namespace lidarconf;

inline Roi case_roi(double edge = 0.5) { return {{-8.5, 8.5}, {-2.5, 2.5}, {0.0, 5.0}, edge}; }

inline FleetSpec case_fleet() {
  return FleetSpec(BeamAngles{{deg_to_rad(10), deg_to_rad(-10)}, {deg_to_rad(10), deg_to_rad(-10)}});
}

inline Configuration reported_config() {
  return {{4.335641, -0.777785, 0.696529, 0, 0}, {-4.335641, 1.893497, -0.696529, 0, 0}};
}

struct Equivalence {
  bool dead_band = false;  ///< some face margin fell in (0, epsilon); no feasible completion exists
  bool match = false;
  std::string detail;
};

/// Fixes the position variables of the model at `config`, propagates the
/// indicators through the rows, and compares the resulting per-(s, k)
/// counts with the pyramid-mode evaluator.
inline Equivalence milp_matches_evaluator(const FleetSpec& fleet, const Roi& roi, double gap,
                                          const Configuration& config, const MilpParams& params = {}) {
  const auto sc = Scenario::build(fleet, roi, gap);
  const auto model =
      build_model(fleet, config, sc.lattice, sc.shells, sc.patterns, params, PositionBounds::from_roi(roi));
  std::map<VarId, double> fixed;
  for (std::size_t l = 0; l < config.size(); ++l) {
    const auto s = std::to_string(l);
    fixed[model.at("X" + s)] = config[l].x;
    fixed[model.at("Y" + s)] = config[l].y;
    fixed[model.at("Z" + s)] = config[l].z;
  }
  const auto done = propagate_fixed(model, fixed);
  Equivalence out;
  if (!done.infeasible.empty()) {
    // only acceptable when every stuck indicator is a face whose margin is in (0, epsilon)
    std::vector<double> x(model.variables().size(), 0.0);
    for (const auto& [v, val] : fixed) x[v] = val;
    for (VarId v : done.infeasible) {
      const auto& name = model.variable(v).name;
      const auto row = model.constraints().begin() +
                       (std::find_if(model.constraints().begin(), model.constraints().end(),
                                     [&](const Constraint& c) { return c.name == "ite_" + name.substr(7) + "_a"; }) -
                        model.constraints().begin());
      if (classify_variable(name) != VarClass::Face || row == model.constraints().end()) {
        out.detail = "no feasible value for " + name;
        return out;
      }
      // row: g_terms . x + M d <= M - g_const, so g = activity (d = 0) + M - rhs
      const double g = row_activity(*row, x) + params.big_m - row->rhs;
      if (!(g > -1e-9 && g < params.epsilon + 1e-9)) {
        out.detail = name + " infeasible with face margin " + std::to_string(g);
        return out;
      }
    }
    out.dead_band = true;
    out.detail = "face margin in (0, epsilon) for " + model.variable(done.infeasible.front()).name;
    return out;
  }
  if (!done.ambiguous.empty() || !done.complete_for(model, VarKind::Binary)) {
    out.detail = "indicators not fully determined";
    return out;
  }
  const auto rep = evaluate(sc, config, {SideModel::Pyramid, params.n_faces});
  for (std::size_t s = 0; s < rep.per_subspace.size(); ++s) {
    for (std::size_t k = 0; k < rep.shells; ++k) {
      const std::string name = "d_ss_s" + std::to_string(s) + "_k" + std::to_string(k);
      const auto id = model.find(name);
      const double got = id ? done.values[*id].value_or(-1.0) : 0.0;
      const auto want = static_cast<double>(rep.shell_counts[s * rep.shells + k]);
      if (got != want) {
        out.detail = name + ": model " + std::to_string(got) + ", evaluator " + std::to_string(want);
        return out;
      }
    }
  }
  out.match = true;
  return out;
}

}  // namespace support
