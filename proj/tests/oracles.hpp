// Independent reference computations for the tests. Nothing here calls the
// library code paths it is used to check; formulas are written out from
// scalars so that a shared bug cannot hide.

#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <vector>

namespace oracle {

using Vec = std::array<double, 3>;
using Mat4 = std::array<std::array<double, 4>, 4>;

/// H = [Ry(b) Rx(g) | t] with the product expanded by hand.
inline Mat4 pose_matrix(double x, double y, double z, double b, double g) {
  const double cb = std::cos(b), sb = std::sin(b), cg = std::cos(g), sg = std::sin(g);
  return {{{cb, sb * sg, sb * cg, x}, {0.0, cg, -sg, y}, {-sb, cb * sg, cb * cg, z}, {0.0, 0.0, 0.0, 1.0}}};
}

/// General 4x4 inverse by Gauss-Jordan elimination with partial pivoting.
inline Mat4 inverse(Mat4 a) {
  Mat4 inv{};
  for (int i = 0; i < 4; ++i) inv[i][i] = 1.0;
  for (int col = 0; col < 4; ++col) {
    int piv = col;
    for (int r = col + 1; r < 4; ++r) {
      if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
    }
    std::swap(a[col], a[piv]);
    std::swap(inv[col], inv[piv]);
    const double d = a[col][col];
    for (int k = 0; k < 4; ++k) {
      a[col][k] /= d;
      inv[col][k] /= d;
    }
    for (int r = 0; r < 4; ++r) {
      if (r == col) continue;
      const double f = a[r][col];
      for (int k = 0; k < 4; ++k) {
        a[r][k] -= f * a[col][k];
        inv[r][k] -= f * inv[col][k];
      }
    }
  }
  return inv;
}

inline Vec transform_point(const Mat4& m, const Vec& p) {
  Vec out{};
  for (int i = 0; i < 3; ++i) out[i] = m[i][0] * p[0] + m[i][1] * p[1] + m[i][2] * p[2] + m[i][3];
  return out;
}

/// Car-frame point into the LiDAR frame through the inverted 4x4 matrix.
inline Vec to_local(const Vec& p, double x, double y, double z, double b, double g) {
  return transform_point(inverse(pose_matrix(x, y, z, b, g)), p);
}

/// Side flag straight from the inequality z - tan(theta) sqrt(x^2 + y^2) > 0,
/// with surface points (|margin| < 1e-12) counted as downward.
inline int side_flag(const Vec& local, double theta) {
  const double g = local[2] - std::tan(theta) * std::sqrt(local[0] * local[0] + local[1] * local[1]);
  return g >= 1e-12 ? +1 : -1;
}

struct Pose {
  double x, y, z, pitch, roll;
};

/// 1 iff the point is on side flags[l][r] of every laser.
inline int membership(const std::vector<std::vector<double>>& angles, const std::vector<Pose>& poses,
                      const std::vector<std::vector<int>>& flags, const Vec& p) {
  for (std::size_t l = 0; l < angles.size(); ++l) {
    const auto& q = poses[l];
    const Vec local = to_local(p, q.x, q.y, q.z, q.pitch, q.roll);
    for (std::size_t r = 0; r < angles[l].size(); ++r) {
      if (side_flag(local, angles[l][r]) != flags[l][r]) return 0;
    }
  }
  return 1;
}

/// Whether a circle of radius r about the origin crosses the square
/// [cx - h, cx + h] x [cy - h, cy + h], judged from an n x n grid of samples
/// that includes the square's boundary.
inline bool footprint_crosses(double cx, double cy, double h, double r, int n = 32) {
  double lo = INFINITY, hi = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double x = cx - h + 2.0 * h * i / (n - 1);
      const double y = cy - h + 2.0 * h * j / (n - 1);
      const double d = std::sqrt(x * x + y * y);
      lo = std::min(lo, d);
      hi = std::max(hi, d);
    }
  }
  return lo <= r && r <= hi;
}

/// Largest sampled distance gap near the closest point; used to excuse
/// sampling misses right at the inner tangency.
inline double sample_min_distance(double cx, double cy, double h, int n = 32) {
  double lo = INFINITY;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double x = cx - h + 2.0 * h * i / (n - 1);
      const double y = cy - h + 2.0 * h * j / (n - 1);
      lo = std::min(lo, std::sqrt(x * x + y * y));
    }
  }
  return lo;
}

/// Feasibility of the two AND rows at a 0/1 point, written from the
/// printed inequalities with delta = 1 - d.
inline bool and_rows_hold(const std::vector<int>& d, int out, double big_m, double eps) {
  double sum = 0.0;
  for (int v : d) sum += 1.0 - v;
  const double delta = 1.0 - out;
  return -sum + delta <= eps + 1e-9 && sum - big_m * delta <= eps + 1e-9;
}

inline bool or_rows_hold(const std::vector<int>& f, int out, double big_m, double eps) {
  double sum = 0.0;
  for (int v : f) sum += v;
  return -sum + out <= eps + 1e-9 && sum - big_m * out <= eps + 1e-9;
}

inline bool ite_rows_hold(double fx, int d, double big_m, double eps) {
  return fx <= big_m * (1.0 - d) + 1e-9 && fx >= eps - (big_m + eps) * d - 1e-9;
}

/// Deterministic 64-bit generator for test sampling (splitmix64).
struct SplitMix {
  std::uint64_t state;
  explicit SplitMix(std::uint64_t seed) : state(seed) {}
  std::uint64_t next() {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
  double uniform(double lo, double hi) { return lo + (hi - lo) * (static_cast<double>(next() >> 11) * 0x1.0p-53); }
};

}  // namespace oracle
