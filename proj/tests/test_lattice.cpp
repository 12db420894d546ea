#include "lidarconf/lattice.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>

namespace lidarconf {
namespace {

Roi case_roi() { return {{-8.5, 8.5}, {-2.5, 2.5}, {0.0, 5.0}, 0.5}; }

TEST(Lattice, SingleCube) {
  const auto lat = build_lattice({{0.5, 1.5}, {-0.5, 0.5}, {0.0, 1.0}, 1.0});
  ASSERT_EQ(lat.size(), 1u);
  EXPECT_EQ(lat.centers[0], Vec3(1.0, 0.0, 0.5));
}

TEST(Lattice, CaseRoiCubeCount) {
  const auto lat = build_lattice(case_roi());
  EXPECT_EQ(lat.counts, (std::array<int, 3>{34, 10, 10}));
  EXPECT_EQ(lat.size(), 3400u);
}

TEST(Lattice, IndexMatchesCenters) {
  const auto lat = build_lattice(case_roi());
  for (int ix : {0, 7, 33}) {
    for (int iy : {0, 9}) {
      for (int iz : {0, 4, 9}) {
        const Vec3 c = lat.centers[lat.index(ix, iy, iz)];
        EXPECT_DOUBLE_EQ(c.x(), -8.5 + 0.5 * (ix + 0.5));
        EXPECT_DOUBLE_EQ(c.y(), -2.5 + 0.5 * (iy + 0.5));
        EXPECT_DOUBLE_EQ(c.z(), 0.5 * (iz + 0.5));
      }
    }
  }
}

TEST(Lattice, CentersInsideRoi) {
  const Roi roi = case_roi();
  const auto lat = build_lattice(roi);
  for (const auto& c : lat.centers) {
    EXPECT_TRUE(roi.x.contains(c.x() - 0.25) && roi.x.contains(c.x() + 0.25));
    EXPECT_TRUE(roi.y.contains(c.y() - 0.25) && roi.y.contains(c.y() + 0.25));
    EXPECT_TRUE(roi.z.contains(c.z() - 0.25) && roi.z.contains(c.z() + 0.25));
  }
}

TEST(Lattice, SingleCellAxis) {
  const auto lat = build_lattice({{0.0, 4.0}, {0.0, 0.5}, {0.0, 2.0}, 0.5});
  EXPECT_EQ(lat.counts[1], 1);
  EXPECT_EQ(lat.size(), 8u * 1u * 4u);
}

TEST(Lattice, PartialCellsDropped) {
  const auto lat = build_lattice({{0.0, 1.2}, {0.0, 1.0}, {0.0, 1.0}, 0.5});
  EXPECT_EQ(lat.counts[0], 2);
}

TEST(Lattice, InvalidRoi) {
  EXPECT_THROW(build_lattice({{1.0, 0.0}, {0.0, 1.0}, {0.0, 1.0}, 0.5}), std::invalid_argument);
  EXPECT_THROW(build_lattice({{0.0, 1.0}, {0.0, 1.0}, {0.0, 1.0}, 0.0}), std::invalid_argument);
  EXPECT_THROW(build_lattice({{0.0, 0.2}, {0.0, 1.0}, {0.0, 1.0}, 0.5}), std::invalid_argument);
}

TEST(Cylinders, Radii) {
  EXPECT_EQ(build_cylinders(case_roi(), 8.5).radii, (std::vector<double>{8.5}));
  EXPECT_EQ(build_cylinders(case_roi(), 2.0).radii, (std::vector<double>{2, 4, 6, 8, 10}));
  EXPECT_EQ(build_cylinders(case_roi(), 1.0).count(), 9u);
}

TEST(Cylinders, NonPositiveGapThrows) {
  EXPECT_THROW(build_cylinders(case_roi(), 0.0), std::invalid_argument);
  EXPECT_THROW(build_cylinders(case_roi(), -1.0), std::invalid_argument);
}

TEST(Shells, Examples) {
  const auto lat = build_lattice({{0.5, 1.5}, {-0.5, 0.5}, {0.0, 1.0}, 1.0});
  const auto sh = assign_shells(lat, build_cylinders(lat.roi, 1.0));
  EXPECT_EQ(sh.shell_of_cube[0], 0);

  // footprint [2.1, 2.4] x [0, 0.3]: distances 2.1 .. 2.42, no radius in range
  const auto far = build_lattice({{2.1, 2.4}, {0.0, 0.3}, {0.0, 0.3}, 0.3});
  EXPECT_EQ(assign_shells(far, build_cylinders(far.roi, 1.0)).shell_of_cube[0], kNoShell);

  // footprint straddling the z axis reaches distance 0, so the first radius wins
  const auto mid = build_lattice({{-0.5, 0.5}, {-0.5, 0.5}, {0.0, 1.0}, 1.0});
  EXPECT_EQ(assign_shells(mid, build_cylinders(mid.roi, 0.5)).shell_of_cube[0], 0);
}

TEST(Shells, CaseAssignedCount) {
  const auto lat = build_lattice(case_roi());
  const auto sh = assign_shells(lat, build_cylinders(case_roi(), 1.0));
  EXPECT_EQ(sh.assigned_count(), 2200u);
  std::size_t total = 0;
  for (auto n : sh.cubes_per_shell()) total += n;
  EXPECT_EQ(total, sh.assigned_count());
}

TEST(Shells, MatchesSamplingOracle) {
  const auto lat = build_lattice(case_roi());
  const auto cyl = build_cylinders(case_roi(), 1.0);
  const auto sh = assign_shells(lat, cyl);
  const double h = lat.cube_edge() / 2.0;
  for (std::size_t c = 0; c < lat.size(); ++c) {
    const Vec3& p = lat.centers[c];
    int want = kNoShell;
    for (std::size_t k = 0; k < cyl.count(); ++k) {
      if (oracle::footprint_crosses(p.x(), p.y(), h, cyl.radii[k], 64)) {
        want = static_cast<int>(k);
        break;
      }
    }
    if (want != sh.shell_of_cube[c]) {
      // the grid may miss a radius that just grazes the nearest footprint point
      const int got = sh.shell_of_cube[c];
      ASSERT_NE(got, kNoShell) << "cube " << c;
      EXPECT_LT(cyl.radii[static_cast<std::size_t>(got)], oracle::sample_min_distance(p.x(), p.y(), h, 64))
          << "cube " << c;
    }
  }
}

TEST(Shells, MirrorSymmetric) {
  const auto lat = build_lattice(case_roi());
  const auto sh = assign_shells(lat, build_cylinders(case_roi(), 1.0));
  const auto [nx, ny, nz] = lat.counts;
  for (int ix = 0; ix < nx; ++ix) {
    for (int iy = 0; iy < ny; ++iy) {
      for (int iz = 0; iz < nz; ++iz) {
        const int s = sh.shell_of_cube[lat.index(ix, iy, iz)];
        EXPECT_EQ(s, sh.shell_of_cube[lat.index(nx - 1 - ix, iy, iz)]);
        EXPECT_EQ(s, sh.shell_of_cube[lat.index(ix, ny - 1 - iy, iz)]);
        EXPECT_EQ(s, sh.shell_of_cube[lat.index(ix, iy, 0)]);
      }
    }
  }
}

TEST(Shells, Deterministic) {
  const auto lat = build_lattice(case_roi());
  const auto cyl = build_cylinders(case_roi(), 1.0);
  EXPECT_EQ(assign_shells(lat, cyl).shell_of_cube, assign_shells(lat, cyl).shell_of_cube);
  EXPECT_EQ(lattice_fingerprint(lat, cyl), lattice_fingerprint(build_lattice(case_roi()), cyl));
  EXPECT_NE(lattice_fingerprint(lat, cyl), lattice_fingerprint(lat, build_cylinders(case_roi(), 2.0)));
}

TEST(Shells, FewerAssignedWithWiderGap) {
  const auto lat = build_lattice(case_roi());
  std::size_t prev = lat.size() + 1;
  for (double gap : {0.5, 1.0, 2.0, 4.0}) {
    const std::size_t n = assign_shells(lat, build_cylinders(case_roi(), gap)).assigned_count();
    EXPECT_LE(n, prev) << "gap " << gap;
    prev = n;
  }
}

}  // namespace
}  // namespace lidarconf
