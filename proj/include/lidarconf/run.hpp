/*
 * run.hpp
 *
 * Orchestration of the three run modes and the files they emit:
 *   evaluate     -> report.json, cubes.csv
 *   optimize     -> best_config.json, trace.csv, report.json, cubes.csv
 *   export-milp  -> model.lp
 * plus readers for every emitted format.
 */

#pragma once

#include "lidarconf/config.hpp"
#include "lidarconf/lp_format.hpp"
#include "lidarconf/milp.hpp"
#include "lidarconf/objective.hpp"
#include "lidarconf/search.hpp"

#include <json.hpp>

#include <charconv>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace lidarconf {

/// export-milp was asked for a configuration whose angles are searchable.
class MilpRestrictionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr int kReportSchemaVersion = 1;

namespace detail {

inline std::string num(double v) {
  if (v == 0.0) return "0";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

// Degrees for files; rounding hides the deg -> rad -> deg wobble.
inline double file_degrees(double rad) {
  const double d = std::round(rad_to_deg(rad) * 1e9) / 1e9;
  return d == 0.0 ? 0.0 : d;
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << text;
  out.flush();
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

inline std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string() + " for reading");
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline std::filesystem::path prepare_dir(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create output directory " + dir + ": " + ec.message());
  return dir;
}

}  // namespace detail

inline nlohmann::json poses_to_json(const Configuration& config) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& p : config) {
    arr.push_back({{"x", p.x},
                   {"y", p.y},
                   {"z", p.z},
                   {"pitch_deg", detail::file_degrees(p.pitch)},
                   {"roll_deg", detail::file_degrees(p.roll)}});
  }
  return arr;
}

inline Configuration poses_from_json(const nlohmann::json& arr) {
  Configuration out;
  for (const auto& p : arr) {
    out.push_back({p.at("x").get<double>(), p.at("y").get<double>(), p.at("z").get<double>(),
                   deg_to_rad(p.at("pitch_deg").get<double>()), deg_to_rad(p.at("roll_deg").get<double>())});
  }
  return out;
}

inline nlohmann::json report_to_json(const ObjectiveReport& rep, const Scenario& scenario, SideTest side) {
  nlohmann::json counts = nlohmann::json::array();
  for (std::size_t s = 0; s < rep.per_subspace.size(); ++s) {
    nlohmann::json row = nlohmann::json::array();
    for (std::size_t k = 0; k < rep.shells; ++k) row.push_back(rep.shell_counts[s * rep.shells + k]);
    counts.push_back(std::move(row));
  }
  return {{"schema_version", kReportSchemaVersion},
          {"mode", to_string(side.model)},
          {"objective", rep.objective},
          {"approx_radius_m", rep.approx_radius},
          {"argmax_subspace", rep.argmax_subspace},
          {"per_subspace", rep.per_subspace},
          {"shell_counts", std::move(counts)},
          {"cube_edge_m", scenario.lattice.cube_edge()},
          {"radius_gap_m", scenario.cylinders.radius_gap},
          {"cube_count", scenario.lattice.size()},
          {"shell_assigned_cubes", scenario.shells.assigned_count()},
          {"configuration", poses_to_json(rep.config)}};
}

/// Report as read back from report.json.
struct ReportFile {
  std::string mode;
  std::size_t objective = 0;
  double approx_radius = 0.0;
  std::size_t argmax_subspace = 0;
  std::vector<std::size_t> per_subspace;
  std::vector<std::vector<std::size_t>> shell_counts;
  std::size_t cube_count = 0;
  std::size_t shell_assigned_cubes = 0;
  Configuration configuration;
};

inline ReportFile read_report(const std::filesystem::path& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(detail::read_text(path));
    if (j.at("schema_version").get<int>() != kReportSchemaVersion) {
      throw std::runtime_error("unsupported report schema_version");
    }
    ReportFile r;
    r.mode = j.at("mode").get<std::string>();
    r.objective = j.at("objective").get<std::size_t>();
    r.approx_radius = j.at("approx_radius_m").get<double>();
    r.argmax_subspace = j.at("argmax_subspace").get<std::size_t>();
    r.per_subspace = j.at("per_subspace").get<std::vector<std::size_t>>();
    r.shell_counts = j.at("shell_counts").get<std::vector<std::vector<std::size_t>>>();
    r.cube_count = j.at("cube_count").get<std::size_t>();
    r.shell_assigned_cubes = j.at("shell_assigned_cubes").get<std::size_t>();
    r.configuration = poses_from_json(j.at("configuration"));
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(path.string() + ": " + e.what());
  }
}

struct CubeRow {
  double x = 0, y = 0, z = 0;
  int shell = kNoShell;
  int subspace = -1;
};

inline std::string cubes_csv(const Scenario& scenario, const MembershipTensor& m) {
  std::string out = "x,y,z,shell,subspace\n";
  for (std::size_t c = 0; c < scenario.lattice.size(); ++c) {
    const Vec3& p = scenario.lattice.centers[c];
    out += detail::num(p.x()) + ',' + detail::num(p.y()) + ',' + detail::num(p.z()) + ',' +
           std::to_string(scenario.shells.shell_of_cube[c]) + ',' + std::to_string(m.subspace_of[c]) + '\n';
  }
  return out;
}

namespace detail {

inline std::vector<std::vector<std::string>> read_csv(const std::filesystem::path& path, const std::string& header) {
  std::istringstream in(read_text(path));
  std::string line;
  if (!std::getline(in, line) || line != header) {
    throw std::runtime_error(path.string() + ": expected header '" + header + "'");
  }
  std::vector<std::vector<std::string>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    rows.push_back(std::move(cells));
  }
  return rows;
}

template <typename T>
T parse_cell(const std::string& s, const std::filesystem::path& path) {
  T v{};
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw std::runtime_error(path.string() + ": bad CSV cell '" + s + "'");
  }
  return v;
}

}  // namespace detail

inline std::vector<CubeRow> read_cubes_csv(const std::filesystem::path& path) {
  std::vector<CubeRow> out;
  for (const auto& r : detail::read_csv(path, "x,y,z,shell,subspace")) {
    if (r.size() != 5) throw std::runtime_error(path.string() + ": expected 5 columns");
    out.push_back({detail::parse_cell<double>(r[0], path), detail::parse_cell<double>(r[1], path),
                   detail::parse_cell<double>(r[2], path), detail::parse_cell<int>(r[3], path),
                   detail::parse_cell<int>(r[4], path)});
  }
  return out;
}

struct TraceRow {
  std::size_t start = 0;
  int iteration = 0;
  std::size_t objective = 0;
  std::size_t best = 0;
};

inline std::string trace_csv(const SearchTrace& trace) {
  std::string out = "start,iteration,objective,best\n";
  for (std::size_t s = 0; s < trace.starts.size(); ++s) {
    const auto& st = trace.starts[s];
    for (std::size_t i = 0; i < st.best.size(); ++i) {
      out += std::to_string(s) + ',' + std::to_string(i) + ',' + std::to_string(st.current[i]) + ',' +
             std::to_string(st.best[i]) + '\n';
    }
    // polished result as the final row of the start
    out += std::to_string(s) + ',' + std::to_string(st.best.size()) + ',' + std::to_string(st.result.objective) +
           ',' + std::to_string(st.result.objective) + '\n';
  }
  return out;
}

inline std::vector<TraceRow> read_trace_csv(const std::filesystem::path& path) {
  std::vector<TraceRow> out;
  for (const auto& r : detail::read_csv(path, "start,iteration,objective,best")) {
    if (r.size() != 4) throw std::runtime_error(path.string() + ": expected 4 columns");
    out.push_back({detail::parse_cell<std::size_t>(r[0], path), detail::parse_cell<int>(r[1], path),
                   detail::parse_cell<std::size_t>(r[2], path), detail::parse_cell<std::size_t>(r[3], path)});
  }
  return out;
}

inline Scenario scenario_of(const RunConfig& cfg) { return Scenario::build(cfg.fleet, cfg.roi, cfg.radius_gap); }

struct EvaluateResult {
  ObjectiveReport report;
  std::filesystem::path report_path;
  std::filesystem::path cubes_path;
};

inline EvaluateResult run_evaluate(const RunConfig& cfg, const std::string& out_dir) {
  const Scenario scenario = scenario_of(cfg);
  const Evaluator eval(scenario, cfg.side);
  const auto dir = detail::prepare_dir(out_dir);
  EvaluateResult res;
  res.report = eval(cfg.poses);
  res.report_path = dir / "report.json";
  res.cubes_path = dir / "cubes.csv";
  detail::write_text(res.report_path, report_to_json(res.report, scenario, cfg.side).dump(2) + "\n");
  detail::write_text(res.cubes_path, cubes_csv(scenario, eval.membership(cfg.poses)));
  return res;
}

struct OptimizeResult {
  SearchTrace trace;
  std::filesystem::path best_config_path;
  std::filesystem::path trace_path;
  std::filesystem::path report_path;
  std::filesystem::path cubes_path;
};

inline OptimizeResult run_optimize(const RunConfig& cfg, const std::string& out_dir) {
  if (!cfg.search) throw ConfigError("config has no \"search\" section; optimize needs one");
  const Scenario scenario = scenario_of(cfg);
  const Evaluator eval(scenario, cfg.side);
  const auto dir = detail::prepare_dir(out_dir);
  OptimizeResult res;
  res.trace = optimize(eval, cfg.search->search);
  const auto& best = res.trace.final_report;

  nlohmann::json best_cfg = cfg.source;
  best_cfg["poses"] = poses_to_json(best.config);
  res.best_config_path = dir / "best_config.json";
  res.trace_path = dir / "trace.csv";
  res.report_path = dir / "report.json";
  res.cubes_path = dir / "cubes.csv";
  detail::write_text(res.best_config_path, best_cfg.dump(2) + "\n");
  detail::write_text(res.trace_path, trace_csv(res.trace));
  detail::write_text(res.report_path, report_to_json(best, scenario, cfg.side).dump(2) + "\n");
  detail::write_text(res.cubes_path, cubes_csv(scenario, eval.membership(best.config)));
  return res;
}

struct ExportResult {
  std::size_t variables = 0;
  std::size_t binaries = 0;
  std::size_t constraints = 0;
  std::filesystem::path model_path;
};

inline MilpModel model_of(const RunConfig& cfg) {
  if (cfg.angles_searchable()) {
    throw MilpRestrictionError(
        "the MILP export keeps mount angles fixed: the cone side tests are only linear in the LiDAR position once "
        "pitch and roll are constants. Set \"search\": {\"positions_only\": true} (or drop the search section) to "
        "export, or use `optimize` to search over angles.");
  }
  const Scenario scenario = scenario_of(cfg);
  return build_model(scenario.fleet, cfg.poses, scenario.lattice, scenario.shells, scenario.patterns, cfg.milp,
                     cfg.pose_bounds);
}

inline ExportResult run_export_milp(const RunConfig& cfg, const std::string& out_dir) {
  const MilpModel model = model_of(cfg);
  const auto dir = detail::prepare_dir(out_dir);
  ExportResult res;
  res.model_path = dir / "model.lp";
  export_model(model, res.model_path.string());
  res.variables = model.variables().size();
  res.constraints = model.constraints().size();
  for (const auto& v : model.variables()) res.binaries += v.kind == VarKind::Binary;
  return res;
}

}  // namespace lidarconf
