/*
 * objective.hpp
 *
 * F_s(C) = max_k sum_c E[s][k][c] and the min-max placement objective
 * max_s F_s(C).
 */

#pragma once

#include "lidarconf/geometry.hpp"
#include "lidarconf/lattice.hpp"
#include "lidarconf/segmentation.hpp"

#include <algorithm>
#include <compare>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace lidarconf {

/// Everything about a placement problem that does not depend on the poses.
struct Scenario {
  FleetSpec fleet;
  CubeLattice lattice;
  CylinderFamily cylinders;
  ShellAssignment shells;
  std::vector<SubspacePattern> patterns;
  std::uint64_t fingerprint = 0;

  static Scenario build(FleetSpec fleet, const Roi& roi, double radius_gap) {
    Scenario s;
    s.fleet = std::move(fleet);
    s.lattice = build_lattice(roi);
    s.cylinders = build_cylinders(roi, radius_gap);
    s.shells = assign_shells(s.lattice, s.cylinders);
    s.patterns = enumerate_patterns(s.fleet);
    s.fingerprint = lattice_fingerprint(s.lattice, s.cylinders);
    return s;
  }
};

struct ObjectiveReport {
  std::vector<std::size_t> per_subspace;  ///< F_s
  std::vector<std::size_t> shell_counts;  ///< count(s, k), row-major over s
  std::size_t shells = 0;
  std::size_t argmax_subspace = 0;        ///< lowest s attaining the max
  std::size_t objective = 0;
  double approx_radius = 0.0;             ///< objective * cube_edge / 2, meters
  Configuration config;
  std::uint64_t provenance = 0;

  std::size_t sum_f() const {
    std::size_t t = 0;
    for (auto f : per_subspace) t += f;
    return t;
  }
};

inline ObjectiveReport make_report(const MembershipTensor& m, const Configuration& config, double cube_edge,
                                   std::uint64_t provenance) {
  ObjectiveReport rep;
  rep.shells = m.shells;
  rep.shell_counts = m.counts;
  rep.per_subspace.assign(m.subspaces, 0);
  for (std::size_t s = 0; s < m.subspaces; ++s) {
    for (std::size_t k = 0; k < m.shells; ++k) rep.per_subspace[s] = std::max(rep.per_subspace[s], m.count(s, k));
  }
  if (!rep.per_subspace.empty()) {
    const auto it = std::max_element(rep.per_subspace.begin(), rep.per_subspace.end());
    rep.argmax_subspace = static_cast<std::size_t>(it - rep.per_subspace.begin());
    rep.objective = *it;
  }
  rep.approx_radius = static_cast<double>(rep.objective) * cube_edge / 2.0;
  rep.config = config;
  rep.provenance = provenance;
  return rep;
}

/// Reusable evaluator; holds precomputed side-test data for one scenario.
class Evaluator {
 public:
  Evaluator(const Scenario& scenario, SideTest side) : scenario_(&scenario), sides_(scenario.fleet, side) {}

  ObjectiveReport operator()(const Configuration& config) const {
    const auto m = build_membership(scenario_->fleet, config, scenario_->patterns, scenario_->lattice,
                                    scenario_->shells, sides_);
    return make_report(m, config, scenario_->lattice.cube_edge(), scenario_->fingerprint);
  }

  MembershipTensor membership(const Configuration& config) const {
    return build_membership(scenario_->fleet, config, scenario_->patterns, scenario_->lattice, scenario_->shells,
                            sides_);
  }

  const Scenario& scenario() const { return *scenario_; }
  SideTest side() const { return sides_.side(); }

 private:
  const Scenario* scenario_;
  SideEvaluator sides_;
};

inline ObjectiveReport evaluate(const Scenario& scenario, const Configuration& config, SideTest side = {}) {
  return Evaluator(scenario, side)(config);
}

inline ObjectiveReport evaluate(const FleetSpec& fleet, const Configuration& config, const CubeLattice& lattice,
                                const CylinderFamily& cylinders, const ShellAssignment& shells,
                                SideTest side = {}) {
  const auto m = build_membership(fleet, config, lattice, shells, side);
  return make_report(m, config, lattice.cube_edge(), lattice_fingerprint(lattice, cylinders));
}

/// Total order: objective, then sum of F_s, then the configuration
/// lexicographically. Throws if the reports come from different lattices.
inline std::strong_ordering compare(const ObjectiveReport& a, const ObjectiveReport& b) {
  if (a.provenance != b.provenance) {
    throw std::invalid_argument("cannot compare reports built on different lattices");
  }
  if (auto c = a.objective <=> b.objective; c != 0) return c;
  if (auto c = a.sum_f() <=> b.sum_f(); c != 0) return c;
  const auto pc = std::lexicographical_compare_three_way(a.config.begin(), a.config.end(), b.config.begin(),
                                                         b.config.end());
  if (pc == std::partial_ordering::less) return std::strong_ordering::less;
  if (pc == std::partial_ordering::greater) return std::strong_ordering::greater;
  return std::strong_ordering::equal;
}

}  // namespace lidarconf
