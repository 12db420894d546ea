// Umbrella header for the LiDAR placement library.
#pragma once

#include "lidarconf/config.hpp"
#include "lidarconf/geometry.hpp"
#include "lidarconf/lattice.hpp"
#include "lidarconf/lp_format.hpp"
#include "lidarconf/milp.hpp"
#include "lidarconf/objective.hpp"
#include "lidarconf/run.hpp"
#include "lidarconf/search.hpp"
#include "lidarconf/segmentation.hpp"
