/*
 * lattice.hpp
 *
 * Cube discretization of the range of interest (ROI) and the concentric
 * cylinder shells used to pick representative cube subsets.
 */

#pragma once

#include "lidarconf/geometry.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <stdexcept>
#include <string>
#include <vector>

namespace lidarconf {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  double length() const { return hi - lo; }
  bool contains(double v) const { return v >= lo && v <= hi; }
  double clamp(double v) const { return std::clamp(v, lo, hi); }

  bool operator==(const Interval&) const = default;
};

/// Axis-aligned ROI box around the vehicle, in car-frame meters.
struct Roi {
  Interval x;
  Interval y;
  Interval z;
  double cube_edge = 0.5;

  void validate() const {
    if (!(cube_edge > 0.0) || !std::isfinite(cube_edge)) {
      throw std::invalid_argument("cube_edge must be positive");
    }
    const std::array<std::pair<const char*, Interval>, 3> axes{{{"x", x}, {"y", y}, {"z", z}}};
    for (const auto& [name, range] : axes) {
      if (!std::isfinite(range.lo) || !std::isfinite(range.hi) || !(range.hi > range.lo)) {
        throw std::invalid_argument(std::string("ROI ") + name + " range must be a nonempty interval");
      }
      if (range.length() < cube_edge * (1.0 - 1e-12)) {
        throw std::invalid_argument(std::string("ROI ") + name + " range is shorter than cube_edge");
      }
    }
  }

  /// Largest |x| or |y| reached by the box.
  double max_horizontal_extent() const {
    return std::max({std::abs(x.lo), std::abs(x.hi), std::abs(y.lo), std::abs(y.hi)});
  }

  bool operator==(const Roi&) const = default;
};

namespace detail {

// floor/ceil that ignore representation noise like 17 / 0.5 = 33.99999...
inline long stable_floor(double v) { return static_cast<long>(std::floor(v + 1e-9)); }
inline long stable_ceil(double v) { return static_cast<long>(std::ceil(v - 1e-9)); }

inline void fnv1a(std::uint64_t& h, const void* data, std::size_t n) {
  const auto* bytes = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < n; ++i) {
    h ^= bytes[i];
    h *= 0x100000001b3ULL;
  }
}

inline void fnv1a(std::uint64_t& h, double v) {
  if (v == 0.0) v = 0.0;  // fold -0
  fnv1a(h, &v, sizeof v);
}

}  // namespace detail

/// Regular grid of cube centers. Index layout: c = (ix * ny + iy) * nz + iz.
struct CubeLattice {
  Roi roi;
  std::array<int, 3> counts{0, 0, 0};
  std::vector<Vec3> centers;

  std::size_t size() const { return centers.size(); }
  double cube_edge() const { return roi.cube_edge; }

  std::size_t index(int ix, int iy, int iz) const {
    return (static_cast<std::size_t>(ix) * counts[1] + iy) * counts[2] + iz;
  }
};

inline CubeLattice build_lattice(const Roi& roi) {
  roi.validate();
  CubeLattice lattice;
  lattice.roi = roi;
  const double e = roi.cube_edge;
  lattice.counts = {static_cast<int>(detail::stable_floor(roi.x.length() / e)),
                    static_cast<int>(detail::stable_floor(roi.y.length() / e)),
                    static_cast<int>(detail::stable_floor(roi.z.length() / e))};
  const auto [nx, ny, nz] = lattice.counts;
  lattice.centers.reserve(static_cast<std::size_t>(nx) * ny * nz);
  for (int ix = 0; ix < nx; ++ix) {
    for (int iy = 0; iy < ny; ++iy) {
      for (int iz = 0; iz < nz; ++iz) {
        lattice.centers.emplace_back(roi.x.lo + e * (ix + 0.5), roi.y.lo + e * (iy + 0.5),
                                     roi.z.lo + e * (iz + 0.5));
      }
    }
  }
  return lattice;
}

/// Concentric vertical cylinders about the car-frame z axis, spanning the
/// full ROI height. radii[k] = (k + 1) * radius_gap.
struct CylinderFamily {
  double radius_gap = 0.0;
  std::vector<double> radii;

  std::size_t count() const { return radii.size(); }
};

inline CylinderFamily build_cylinders(const Roi& roi, double radius_gap) {
  if (!(radius_gap > 0.0) || !std::isfinite(radius_gap)) {
    throw std::invalid_argument("radius_gap must be positive");
  }
  CylinderFamily family;
  family.radius_gap = radius_gap;
  const long n = std::max(1L, detail::stable_ceil(roi.max_horizontal_extent() / radius_gap));
  family.radii.reserve(static_cast<std::size_t>(n));
  for (long k = 1; k <= n; ++k) family.radii.push_back(static_cast<double>(k) * radius_gap);
  return family;
}

inline constexpr int kNoShell = -1;

/// Shell (cylinder index) of each cube, or kNoShell.
struct ShellAssignment {
  std::vector<int> shell_of_cube;
  std::size_t shell_count = 0;

  std::size_t assigned_count() const {
    return static_cast<std::size_t>(
        std::count_if(shell_of_cube.begin(), shell_of_cube.end(), [](int k) { return k != kNoShell; }));
  }

  std::vector<std::size_t> cubes_per_shell() const {
    std::vector<std::size_t> counts(shell_count, 0);
    for (int k : shell_of_cube) {
      if (k != kNoShell) ++counts[static_cast<std::size_t>(k)];
    }
    return counts;
  }
};

/// Min and max distance from the z axis over the square footprint of a cube.
inline std::pair<double, double> footprint_radial_range(const Vec3& center, double edge) {
  const double h = edge / 2.0;
  const double x0 = center.x() - h, x1 = center.x() + h;
  const double y0 = center.y() - h, y1 = center.y() + h;
  const double dx = x0 > 0.0 ? x0 : (x1 < 0.0 ? -x1 : 0.0);
  const double dy = y0 > 0.0 ? y0 : (y1 < 0.0 ? -y1 : 0.0);
  const double fx = std::max(std::abs(x0), std::abs(x1));
  const double fy = std::max(std::abs(y0), std::abs(y1));
  return {std::hypot(dx, dy), std::hypot(fx, fy)};
}

/// A cube joins the first cylinder whose circle crosses its footprint.
inline ShellAssignment assign_shells(const CubeLattice& lattice, const CylinderFamily& cylinders) {
  ShellAssignment out;
  out.shell_count = cylinders.count();
  out.shell_of_cube.assign(lattice.size(), kNoShell);
  for (std::size_t c = 0; c < lattice.size(); ++c) {
    const auto [near, far] = footprint_radial_range(lattice.centers[c], lattice.cube_edge());
    // radii are sorted: first r >= near is the only candidate for the smallest k
    const auto it = std::lower_bound(cylinders.radii.begin(), cylinders.radii.end(), near);
    if (it != cylinders.radii.end() && *it <= far) {
      out.shell_of_cube[c] = static_cast<int>(it - cylinders.radii.begin());
    }
  }
  return out;
}

/// Hash of everything that determines cube indices and shells. Reports that
/// share a fingerprint are comparable.
inline std::uint64_t lattice_fingerprint(const CubeLattice& lattice, const CylinderFamily& cylinders) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  const Roi& r = lattice.roi;
  for (double v : {r.x.lo, r.x.hi, r.y.lo, r.y.hi, r.z.lo, r.z.hi, r.cube_edge, cylinders.radius_gap}) {
    detail::fnv1a(h, v);
  }
  for (double v : cylinders.radii) detail::fnv1a(h, v);
  return h;
}

}  // namespace lidarconf
