/*
 * segmentation.hpp
 *
 * Subspace patterns produced by the laser cones of a fleet and the
 * cube-in-subspace membership tensor.
 *
 * Within one LiDAR the beam angles are kept in descending order. A point
 * below a steep cone cannot be above a shallower one, so a per-LiDAR flag
 * vector is nonempty only when it is a run of -1 (below) followed by a run
 * of +1 (above). That leaves N_r + 1 vectors per LiDAR, indexed by the
 * number of leading -1 flags, and (N_r + 1)^N_l patterns for the fleet.
 */

#pragma once

#include "lidarconf/geometry.hpp"
#include "lidarconf/lattice.hpp"

#include <algorithm>
#include <cstddef>
#include <functional>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace lidarconf {

/// Per LiDAR, the beam angles (radians) of its lasers.
using BeamAngles = std::vector<std::vector<double>>;

/// Beam angles (radians) of every laser on every LiDAR.
class FleetSpec {
 public:
  FleetSpec() = default;

  /// Sorts each LiDAR's angles descending. All LiDARs must carry the same
  /// number of lasers, with distinct angles strictly inside (-90, 90) degrees.
  explicit FleetSpec(BeamAngles beam_angles) : angles_(std::move(beam_angles)) {
    if (angles_.empty()) throw std::invalid_argument("fleet needs at least one LiDAR");
    for (std::size_t l = 0; l < angles_.size(); ++l) {
      auto& a = angles_[l];
      if (a.empty()) throw std::invalid_argument("LiDAR " + std::to_string(l) + " has no lasers");
      if (a.size() != angles_.front().size()) {
        throw std::invalid_argument("every LiDAR must have the same number of lasers");
      }
      std::sort(a.begin(), a.end(), std::greater<>());
      for (std::size_t r = 0; r < a.size(); ++r) {
        if (!(std::abs(a[r]) < std::numbers::pi / 2.0)) {
          throw std::invalid_argument("beam angles must satisfy |theta| < 90 degrees");
        }
        if (r > 0 && !(a[r] < a[r - 1])) {
          throw std::invalid_argument("LiDAR " + std::to_string(l) + " has duplicate beam angles");
        }
      }
    }
  }

  int lidar_count() const { return static_cast<int>(angles_.size()); }
  int lasers_per_lidar() const { return angles_.empty() ? 0 : static_cast<int>(angles_.front().size()); }
  int laser_count() const { return lidar_count() * lasers_per_lidar(); }

  /// (N_r + 1)^N_l
  std::size_t subspace_count() const {
    std::size_t n = 1;
    for (int l = 0; l < lidar_count(); ++l) n *= static_cast<std::size_t>(lasers_per_lidar() + 1);
    return n;
  }

  double beam_angle(int lidar, int laser) const {
    return angles_[static_cast<std::size_t>(lidar)][static_cast<std::size_t>(laser)];
  }
  const std::vector<double>& beam_angles(int lidar) const { return angles_[static_cast<std::size_t>(lidar)]; }

  bool operator==(const FleetSpec&) const = default;

 private:
  std::vector<std::vector<double>> angles_;
};

/// Side flag f_lr per laser: +1 upward side, -1 downward side.
struct SubspacePattern {
  std::vector<std::vector<int>> flags;

  /// Number of leading -1 flags of each LiDAR.
  std::vector<int> below_counts() const {
    std::vector<int> out;
    out.reserve(flags.size());
    for (const auto& f : flags) {
      out.push_back(static_cast<int>(std::count(f.begin(), f.end(), -1)));
    }
    return out;
  }

  bool operator==(const SubspacePattern&) const = default;
};

/// Flag vector with the first `below` lasers on the downward side.
inline std::vector<int> monotone_flags(int lasers, int below) {
  std::vector<int> f(static_cast<std::size_t>(lasers), +1);
  std::fill_n(f.begin(), below, -1);
  return f;
}

inline bool is_monotone(const std::vector<int>& flags) {
  return std::is_sorted(flags.begin(), flags.end());
}

/// Pattern index from per-LiDAR below counts; LiDAR 0 is the most significant digit.
inline std::size_t pattern_index(const std::vector<int>& below_counts, int lasers_per_lidar) {
  std::size_t s = 0;
  for (int j : below_counts) s = s * static_cast<std::size_t>(lasers_per_lidar + 1) + static_cast<std::size_t>(j);
  return s;
}

/// Cartesian product of the N_r + 1 monotone flag vectors of each LiDAR,
/// ordered so that patterns[s] has pattern_index == s.
inline std::vector<SubspacePattern> enumerate_patterns(const FleetSpec& fleet) {
  const int nl = fleet.lidar_count();
  const int nr = fleet.lasers_per_lidar();
  std::vector<SubspacePattern> patterns;
  patterns.reserve(fleet.subspace_count());
  std::vector<int> digits(static_cast<std::size_t>(nl), 0);
  for (std::size_t s = 0; s < fleet.subspace_count(); ++s) {
    SubspacePattern p;
    for (int j : digits) p.flags.push_back(monotone_flags(nr, j));
    patterns.push_back(std::move(p));
    for (int l = nl - 1; l >= 0; --l) {
      if (++digits[static_cast<std::size_t>(l)] <= nr) break;
      digits[static_cast<std::size_t>(l)] = 0;
    }
  }
  return patterns;
}

enum class SideModel { ExactCone, Pyramid };

struct SideTest {
  SideModel model = SideModel::ExactCone;
  int n_faces = 4;
};

inline const char* to_string(SideModel m) { return m == SideModel::ExactCone ? "exact" : "pyramid"; }

/// Precomputed per-laser data for repeated side tests against a fleet.
class SideEvaluator {
 public:
  SideEvaluator(const FleetSpec& fleet, SideTest side) : fleet_(fleet), side_(side) {
    if (side.model == SideModel::Pyramid && side.n_faces < 3) {
      throw std::invalid_argument("pyramid side test needs n_faces >= 3");
    }
    for (int l = 0; l < fleet.lidar_count(); ++l) {
      for (int r = 0; r < fleet.lasers_per_lidar(); ++r) {
        const double theta = fleet.beam_angle(l, r);
        tangents_.push_back(std::tan(theta));
        if (side.model == SideModel::Pyramid) faces_.push_back(pyramid_planes(theta, side.n_faces));
      }
    }
  }

  const FleetSpec& fleet() const { return fleet_; }
  SideTest side() const { return side_; }

  /// Signed margin of a LiDAR-frame point against laser r of LiDAR l.
  double margin(int lidar, int laser, const Vec3& p_local) const {
    const std::size_t i = static_cast<std::size_t>(lidar * fleet_.lasers_per_lidar() + laser);
    if (side_.model == SideModel::ExactCone) {
      return p_local.z() - tangents_[i] * std::hypot(p_local.x(), p_local.y());
    }
    return pyramid_side_test(p_local, fleet_.beam_angle(lidar, laser), faces_[i]);
  }

  /// Side flags (+1 / -1) of a car-frame point for every laser, using the
  /// per-LiDAR car-to-LiDAR transforms in `to_local`.
  void flags(const std::vector<Transform>& to_local, const Vec3& p_car, std::vector<std::vector<int>>& out) const {
    out.resize(static_cast<std::size_t>(fleet_.lidar_count()));
    for (int l = 0; l < fleet_.lidar_count(); ++l) {
      const Vec3 p = to_local[static_cast<std::size_t>(l)].apply(p_car);
      auto& row = out[static_cast<std::size_t>(l)];
      row.resize(static_cast<std::size_t>(fleet_.lasers_per_lidar()));
      for (int r = 0; r < fleet_.lasers_per_lidar(); ++r) {
        row[static_cast<std::size_t>(r)] = is_upward(margin(l, r, p)) ? +1 : -1;
      }
    }
  }

 private:
  FleetSpec fleet_;
  SideTest side_;
  std::vector<double> tangents_;
  std::vector<std::vector<HalfSpace>> faces_;
};

inline std::vector<Transform> car_to_lidar_transforms(const Configuration& config) {
  std::vector<Transform> out;
  out.reserve(config.size());
  for (const auto& pose : config) out.push_back(invert_transform(build_pose_transform(pose)));
  return out;
}

inline void check_config_size(const FleetSpec& fleet, const Configuration& config) {
  if (config.size() != static_cast<std::size_t>(fleet.lidar_count())) {
    throw std::invalid_argument("configuration has " + std::to_string(config.size()) + " poses for " +
                                std::to_string(fleet.lidar_count()) + " LiDARs");
  }
}

/// 1 when the cube center lies on the side f_lr of every laser, else 0.
inline int cube_membership(const FleetSpec& fleet, const Configuration& config, const SubspacePattern& pattern,
                           const Vec3& cube_center, SideTest side = {}) {
  check_config_size(fleet, config);
  const SideEvaluator eval(fleet, side);
  for (int l = 0; l < fleet.lidar_count(); ++l) {
    const Vec3 p = to_lidar_frame(cube_center, config[static_cast<std::size_t>(l)]);
    for (int r = 0; r < fleet.lasers_per_lidar(); ++r) {
      const int f = is_upward(eval.margin(l, r, p)) ? +1 : -1;
      if (f != pattern.flags[static_cast<std::size_t>(l)][static_cast<std::size_t>(r)]) return 0;
    }
  }
  return 1;
}

/// E[s][k][c] stored sparsely: each shell-assigned cube records the subspace
/// that claims it. counts(s, k) = sum over c of E[s][k][c].
struct MembershipTensor {
  std::size_t subspaces = 0;
  std::size_t shells = 0;
  std::vector<int> subspace_of;  ///< per cube, -1 if unassigned or unclaimed
  std::vector<int> claims;       ///< number of patterns claiming each cube
  std::vector<std::size_t> counts;

  std::size_t count(std::size_t s, std::size_t k) const { return counts[s * shells + k]; }

  bool contains(std::size_t s, std::size_t k, std::size_t c, const ShellAssignment& shell_map) const {
    return shell_map.shell_of_cube[c] == static_cast<int>(k) && subspace_of[c] == static_cast<int>(s);
  }

  std::size_t total() const {
    std::size_t t = 0;
    for (auto n : counts) t += n;
    return t;
  }
};

inline MembershipTensor build_membership(const FleetSpec& fleet, const Configuration& config,
                                         const std::vector<SubspacePattern>& patterns, const CubeLattice& lattice,
                                         const ShellAssignment& shells, const SideEvaluator& eval) {
  check_config_size(fleet, config);
  MembershipTensor m;
  m.subspaces = patterns.size();
  m.shells = shells.shell_count;
  m.subspace_of.assign(lattice.size(), -1);
  m.claims.assign(lattice.size(), 0);
  m.counts.assign(m.subspaces * m.shells, 0);

  const auto to_local = car_to_lidar_transforms(config);
  std::vector<std::vector<int>> flags;
  for (std::size_t c = 0; c < lattice.size(); ++c) {
    const int k = shells.shell_of_cube[c];
    if (k == kNoShell) continue;
    eval.flags(to_local, lattice.centers[c], flags);
    for (std::size_t s = 0; s < patterns.size(); ++s) {
      if (patterns[s].flags == flags) {
        ++m.claims[c];
        m.subspace_of[c] = static_cast<int>(s);
        ++m.counts[s * m.shells + static_cast<std::size_t>(k)];
      }
    }
  }
  return m;
}

inline MembershipTensor build_membership(const FleetSpec& fleet, const Configuration& config,
                                         const CubeLattice& lattice, const ShellAssignment& shells,
                                         SideTest side = {}) {
  return build_membership(fleet, config, enumerate_patterns(fleet), lattice, shells, SideEvaluator(fleet, side));
}

}  // namespace lidarconf
