/*
 * config.hpp
 *
 * JSON run configuration (schema_version 1). Angles are given in degrees,
 * lengths in meters. See README.md for the full schema.
 */

#pragma once

#include "lidarconf/geometry.hpp"
#include "lidarconf/lattice.hpp"
#include "lidarconf/milp.hpp"
#include "lidarconf/search.hpp"
#include "lidarconf/segmentation.hpp"

#include <json.hpp>

#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace lidarconf {

/// Invalid or unreadable configuration. The message names the file and the
/// offending field (as a JSON pointer) or the line/column of a syntax error.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr int kConfigSchemaVersion = 1;

enum class StartPolicy { Origin, Poses };

struct SearchSettings {
  SearchConfig search;          ///< bounds and start are filled in by parse_config
  StartPolicy start_policy = StartPolicy::Origin;
};

struct RunConfig {
  std::vector<std::string> lidar_names;
  FleetSpec fleet;
  Roi roi;
  double radius_gap = 1.0;
  SideTest side;
  Configuration poses;
  PositionBounds pose_bounds;
  std::optional<SearchSettings> search;
  MilpParams milp;
  std::string output_dir = "out";
  nlohmann::json source;  ///< parsed document, used to emit derived configs

  bool angles_searchable() const { return search && !search->search.positions_only; }
};

namespace detail {

class ConfigReader {
 public:
  explicit ConfigReader(std::string origin) : origin_(std::move(origin)) {}

  [[noreturn]] void fail(const std::string& pointer, const std::string& what) const {
    throw ConfigError(origin_ + ": " + (pointer.empty() ? "/" : pointer) + ": " + what);
  }

  const nlohmann::json& field(const nlohmann::json& obj, const std::string& ptr, const char* key) const {
    if (!obj.contains(key)) fail(ptr + "/" + key, "missing required field");
    return obj.at(key);
  }

  void expect_object(const nlohmann::json& j, const std::string& ptr, std::initializer_list<const char*> allowed) const {
    if (!j.is_object()) fail(ptr, "expected an object");
    const std::set<std::string> keys(allowed.begin(), allowed.end());
    for (const auto& [k, v] : j.items()) {
      if (!keys.contains(k)) fail(ptr + "/" + k, "unknown field");
    }
  }

  double number(const nlohmann::json& j, const std::string& ptr) const {
    if (!j.is_number()) fail(ptr, "expected a number");
    const double v = j.get<double>();
    if (!std::isfinite(v)) fail(ptr, "expected a finite number");
    return v;
  }

  double number_or(const nlohmann::json& obj, const std::string& ptr, const char* key, double fallback) const {
    return obj.contains(key) ? number(obj.at(key), ptr + "/" + key) : fallback;
  }

  long integer(const nlohmann::json& j, const std::string& ptr) const {
    if (!j.is_number_integer()) fail(ptr, "expected an integer");
    return j.get<long>();
  }

  Interval interval(const nlohmann::json& j, const std::string& ptr) const {
    if (!j.is_array() || j.size() != 2) fail(ptr, "expected [lo, hi]");
    const Interval r{number(j[0], ptr + "/0"), number(j[1], ptr + "/1")};
    if (!(r.hi > r.lo)) fail(ptr, "interval must satisfy lo < hi");
    return r;
  }

  RunConfig parse(const nlohmann::json& doc) const {
    expect_object(doc, "", {"schema_version", "fleet", "roi", "cylinders", "mode", "poses", "pose_bounds", "search",
                            "milp", "output"});
    RunConfig cfg;
    cfg.source = doc;

    const long version = integer(field(doc, "", "schema_version"), "/schema_version");
    if (version != kConfigSchemaVersion) {
      fail("/schema_version", "unsupported version " + std::to_string(version));
    }

    // fleet
    const auto& fleet = field(doc, "", "fleet");
    if (!fleet.is_array() || fleet.empty()) fail("/fleet", "expected a nonempty array of LiDARs");
    std::vector<std::vector<double>> angles;
    for (std::size_t l = 0; l < fleet.size(); ++l) {
      const std::string p = "/fleet/" + std::to_string(l);
      expect_object(fleet[l], p, {"name", "beam_angles_deg"});
      std::string name = "lidar" + std::to_string(l);
      if (fleet[l].contains("name")) {
        if (!fleet[l]["name"].is_string()) fail(p + "/name", "expected a string");
        name = fleet[l]["name"].get<std::string>();
      }
      cfg.lidar_names.push_back(std::move(name));
      const auto& beams = field(fleet[l], p, "beam_angles_deg");
      if (!beams.is_array() || beams.empty()) fail(p + "/beam_angles_deg", "expected a nonempty array");
      std::vector<double> a;
      for (std::size_t r = 0; r < beams.size(); ++r) {
        const std::string bp = p + "/beam_angles_deg/" + std::to_string(r);
        const double deg = number(beams[r], bp);
        if (!(std::abs(deg) < 90.0)) fail(bp, "beam angle must satisfy |theta| < 90 degrees");
        a.push_back(deg_to_rad(deg));
      }
      angles.push_back(std::move(a));
    }
    try {
      cfg.fleet = FleetSpec(std::move(angles));
    } catch (const std::invalid_argument& e) {
      fail("/fleet", e.what());
    }

    // roi
    const auto& roi = field(doc, "", "roi");
    expect_object(roi, "/roi", {"x", "y", "z", "cube_edge"});
    cfg.roi.x = interval(field(roi, "/roi", "x"), "/roi/x");
    cfg.roi.y = interval(field(roi, "/roi", "y"), "/roi/y");
    cfg.roi.z = interval(field(roi, "/roi", "z"), "/roi/z");
    cfg.roi.cube_edge = number_or(roi, "/roi", "cube_edge", 0.5);
    if (!(cfg.roi.cube_edge > 0.0)) fail("/roi/cube_edge", "must be positive");
    try {
      cfg.roi.validate();
    } catch (const std::invalid_argument& e) {
      fail("/roi", e.what());
    }

    if (doc.contains("cylinders")) {
      const auto& cyl = doc["cylinders"];
      expect_object(cyl, "/cylinders", {"radius_gap"});
      cfg.radius_gap = number_or(cyl, "/cylinders", "radius_gap", 1.0);
    }
    if (!(cfg.radius_gap > 0.0)) fail("/cylinders/radius_gap", "must be positive");

    if (doc.contains("mode")) {
      const auto& m = doc["mode"];
      if (m == "exact") cfg.side.model = SideModel::ExactCone;
      else if (m == "pyramid") cfg.side.model = SideModel::Pyramid;
      else fail("/mode", "expected \"exact\" or \"pyramid\"");
    }

    if (doc.contains("milp")) {
      const auto& m = doc["milp"];
      expect_object(m, "/milp", {"big_m", "epsilon", "n_faces"});
      cfg.milp.big_m = number_or(m, "/milp", "big_m", cfg.milp.big_m);
      cfg.milp.epsilon = number_or(m, "/milp", "epsilon", cfg.milp.epsilon);
      if (m.contains("n_faces")) cfg.milp.n_faces = static_cast<int>(integer(m["n_faces"], "/milp/n_faces"));
      try {
        cfg.milp.validate();
      } catch (const std::invalid_argument& e) {
        fail("/milp", e.what());
      }
    }
    cfg.side.n_faces = cfg.milp.n_faces;

    // poses: default co-located at the origin with zero angles
    cfg.poses.assign(static_cast<std::size_t>(cfg.fleet.lidar_count()), LidarPose{});
    if (doc.contains("poses")) {
      const auto& poses = doc["poses"];
      if (!poses.is_array()) fail("/poses", "expected an array");
      if (poses.size() != cfg.poses.size()) {
        fail("/poses", "expected " + std::to_string(cfg.poses.size()) + " poses (one per LiDAR), got " +
                           std::to_string(poses.size()));
      }
      for (std::size_t l = 0; l < poses.size(); ++l) {
        const std::string p = "/poses/" + std::to_string(l);
        expect_object(poses[l], p, {"x", "y", "z", "pitch_deg", "roll_deg"});
        auto& pose = cfg.poses[l];
        pose.x = number_or(poses[l], p, "x", 0.0);
        pose.y = number_or(poses[l], p, "y", 0.0);
        pose.z = number_or(poses[l], p, "z", 0.0);
        const double pitch = number_or(poses[l], p, "pitch_deg", 0.0);
        const double roll = number_or(poses[l], p, "roll_deg", 0.0);
        if (std::abs(pitch) > 90.0) fail(p + "/pitch_deg", "must lie in [-90, 90]");
        if (std::abs(roll) > 90.0) fail(p + "/roll_deg", "must lie in [-90, 90]");
        pose.pitch = deg_to_rad(pitch);
        pose.roll = deg_to_rad(roll);
      }
    }

    cfg.pose_bounds = PositionBounds::from_roi(cfg.roi);
    if (doc.contains("pose_bounds")) {
      const auto& b = doc["pose_bounds"];
      expect_object(b, "/pose_bounds", {"x", "y", "z"});
      if (b.contains("x")) cfg.pose_bounds.x = interval(b["x"], "/pose_bounds/x");
      if (b.contains("y")) cfg.pose_bounds.y = interval(b["y"], "/pose_bounds/y");
      if (b.contains("z")) cfg.pose_bounds.z = interval(b["z"], "/pose_bounds/z");
    }

    if (doc.contains("search")) cfg.search = parse_search(doc["search"], cfg);

    if (doc.contains("output")) {
      const auto& o = doc["output"];
      expect_object(o, "/output", {"dir"});
      if (o.contains("dir")) {
        if (!o["dir"].is_string()) fail("/output/dir", "expected a string");
        cfg.output_dir = o["dir"].get<std::string>();
      }
    }
    return cfg;
  }

 private:
  SearchSettings parse_search(const nlohmann::json& s, const RunConfig& cfg) const {
    const std::string p = "/search";
    expect_object(s, p, {"positions_only", "start", "multistarts", "iterations", "initial_temperature", "decay",
                         "position_step", "angle_step_deg", "angle_bounds_deg", "refine_levels", "seed"});
    SearchSettings out;
    SearchConfig& sc = out.search;
    if (s.contains("positions_only")) {
      if (!s["positions_only"].is_boolean()) fail(p + "/positions_only", "expected true or false");
      sc.positions_only = s["positions_only"].get<bool>();
    }
    if (s.contains("start")) {
      if (s["start"] == "origin") out.start_policy = StartPolicy::Origin;
      else if (s["start"] == "poses") out.start_policy = StartPolicy::Poses;
      else fail(p + "/start", "expected \"origin\" or \"poses\"");
    }
    if (s.contains("multistarts")) sc.multistarts = static_cast<int>(integer(s["multistarts"], p + "/multistarts"));
    if (s.contains("iterations")) sc.iterations = static_cast<int>(integer(s["iterations"], p + "/iterations"));
    if (s.contains("refine_levels")) {
      sc.refine_levels = static_cast<int>(integer(s["refine_levels"], p + "/refine_levels"));
    }
    if (s.contains("seed")) {
      if (!s["seed"].is_number_unsigned() && !s["seed"].is_number_integer()) fail(p + "/seed", "expected an integer");
      sc.seed = s["seed"].get<std::uint64_t>();
    }
    sc.initial_temperature = number_or(s, p, "initial_temperature", sc.initial_temperature);
    sc.decay = number_or(s, p, "decay", sc.decay);
    sc.position_step = number_or(s, p, "position_step", sc.position_step);
    sc.angle_step = deg_to_rad(number_or(s, p, "angle_step_deg", rad_to_deg(sc.angle_step)));
    if (s.contains("angle_bounds_deg")) {
      const Interval a = interval(s["angle_bounds_deg"], p + "/angle_bounds_deg");
      if (a.lo < -90.0 || a.hi > 90.0) fail(p + "/angle_bounds_deg", "must lie within [-90, 90]");
      sc.bounds.pitch = sc.bounds.roll = {deg_to_rad(a.lo), deg_to_rad(a.hi)};
    }
    sc.bounds.x = cfg.pose_bounds.x;
    sc.bounds.y = cfg.pose_bounds.y;
    sc.bounds.z = cfg.pose_bounds.z;

    sc.start = cfg.poses;
    if (out.start_policy == StartPolicy::Origin) {
      for (auto& pose : sc.start) pose.x = pose.y = pose.z = 0.0;
    }
    try {
      sc.validate(cfg.fleet.lidar_count());
    } catch (const std::invalid_argument& e) {
      fail(p, e.what());
    }
    return out;
  }

  std::string origin_;
};

inline std::string line_and_column(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

}  // namespace detail

inline RunConfig parse_config_text(const std::string& text, const std::string& origin = "<config>") {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(origin + ": " + detail::line_and_column(text, e.byte == 0 ? 0 : e.byte - 1) +
                      ": malformed JSON (" + e.what() + ")");
  }
  return detail::ConfigReader(origin).parse(doc);
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream file(path, std::ios::binary);
  if (!file) throw ConfigError(path + ": cannot open config file");
  std::stringstream buf;
  buf << file.rdbuf();
  return parse_config_text(buf.str(), path);
}

}  // namespace lidarconf
