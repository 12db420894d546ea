// Command line front end: evaluate, optimize and export-milp.
//
// Exit codes: 0 success, 1 I/O or internal failure, 2 invalid config,
// 3 MILP export requested with searchable angles.

#include "lidarconf/lidarconf.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

namespace {

struct Options {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  std::optional<std::string> mode;
};

lidarconf::RunConfig load(const Options& opt) {
  auto cfg = lidarconf::load_config(opt.config_path);
  if (opt.mode) {
    cfg.side.model = *opt.mode == "pyramid" ? lidarconf::SideModel::Pyramid : lidarconf::SideModel::ExactCone;
  }
  if (opt.seed && cfg.search) cfg.search->search.seed = *opt.seed;
  if (opt.out_dir) cfg.output_dir = *opt.out_dir;
  return cfg;
}

void add_common(CLI::App* cmd, Options& opt) {
  cmd->add_option("config", opt.config_path, "JSON run configuration")->required();
  cmd->add_option("--seed", opt.seed, "Override the search seed");
  cmd->add_option("--out-dir", opt.out_dir, "Directory for emitted files");
  cmd->add_option("--mode", opt.mode, "Side test: exact cone or pyramid")
      ->check(CLI::IsMember({"exact", "pyramid"}));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-LiDAR mounting configuration: evaluate, optimize, export the MILP model"};
  app.require_subcommand(1);

  Options opt;
  auto* evaluate = app.add_subcommand("evaluate", "Score the configured poses; writes report.json and cubes.csv");
  auto* optimize = app.add_subcommand("optimize", "Search poses; writes best_config.json, trace.csv, report.json");
  auto* export_milp = app.add_subcommand("export-milp", "Write the big-M model for fixed angles as model.lp");
  for (auto* cmd : {evaluate, optimize, export_milp}) add_common(cmd, opt);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    const auto cfg = load(opt);
    if (evaluate->parsed()) {
      const auto res = lidarconf::run_evaluate(cfg, cfg.output_dir);
      std::cout << "objective " << res.report.objective << " (approx radius " << res.report.approx_radius
                << " m, subspace " << res.report.argmax_subspace << ")\n"
                << "wrote " << res.report_path.string() << "\n"
                << "wrote " << res.cubes_path.string() << "\n";
    } else if (optimize->parsed()) {
      const auto res = lidarconf::run_optimize(cfg, cfg.output_dir);
      const auto& best = res.trace.final_report;
      std::cout << "best objective " << best.objective << " from start " << res.trace.best_start << "\n";
      for (std::size_t l = 0; l < best.config.size(); ++l) {
        const auto& p = best.config[l];
        std::cout << "  " << cfg.lidar_names[l] << ": x=" << p.x << " y=" << p.y << " z=" << p.z
                  << " pitch=" << lidarconf::rad_to_deg(p.pitch) << "deg roll=" << lidarconf::rad_to_deg(p.roll)
                  << "deg\n";
      }
      std::cout << "wrote " << res.best_config_path.string() << ", " << res.trace_path.string() << ", "
                << res.report_path.string() << ", " << res.cubes_path.string() << "\n";
      std::cerr << "search took " << res.trace.wall_seconds << " s\n";
    } else if (export_milp->parsed()) {
      const auto res = lidarconf::run_export_milp(cfg, cfg.output_dir);
      std::cout << "variables " << res.variables << " (binary " << res.binaries << ")\n"
                << "constraints " << res.constraints << "\n"
                << "wrote " << res.model_path.string() << "\n";
    }
  } catch (const lidarconf::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const lidarconf::MilpRestrictionError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
