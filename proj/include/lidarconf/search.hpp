/*
 * search.hpp
 *
 * Derivative-free optimizer over full configurations (positions and mount
 * angles): multistart simulated annealing followed by a coordinate-descent
 * polish. The objective is piecewise constant and integer valued, so moves
 * are compared with the total order of objective::compare.
 */

#pragma once

#include "lidarconf/objective.hpp"

#include <chrono>
#include <cmath>
#include <cstdint>
#include <future>
#include <random>
#include <stdexcept>
#include <vector>

namespace lidarconf {

/// Box of the decision variables, shared by all LiDARs.
struct SearchBounds {
  Interval x;
  Interval y;
  Interval z;
  Interval pitch{deg_to_rad(-20.0), deg_to_rad(20.0)};
  Interval roll{deg_to_rad(-20.0), deg_to_rad(20.0)};

  const Interval& operator[](int dim) const {
    switch (dim) {
      case 0: return x;
      case 1: return y;
      case 2: return z;
      case 3: return pitch;
      default: return roll;
    }
  }
};

struct SearchConfig {
  SearchBounds bounds;
  bool positions_only = false;     ///< keep the angles of `start` fixed
  Configuration start;             ///< first multistart; supplies fixed angles
  int multistarts = 8;
  int iterations = 1500;           ///< annealing steps per start
  double initial_temperature = 2.0;  ///< in objective units (cube counts)
  double decay = 0.997;            ///< per-iteration factor on temperature and step
  double position_step = 2.0;      ///< initial step, meters
  double angle_step = deg_to_rad(5.0);  ///< initial step, radians
  int refine_levels = 3;
  std::uint64_t seed = 1;

  void validate(int lidar_count) const {
    for (int d = 0; d < 5; ++d) {
      const auto& b = bounds[d];
      if (!(b.lo <= b.hi) || !std::isfinite(b.lo) || !std::isfinite(b.hi)) {
        throw std::invalid_argument("search bounds must be finite nonempty intervals");
      }
    }
    constexpr double half_pi = std::numbers::pi / 2.0;
    if (bounds.pitch.lo < -half_pi || bounds.pitch.hi > half_pi || bounds.roll.lo < -half_pi ||
        bounds.roll.hi > half_pi) {
      throw std::invalid_argument("angle bounds must lie within [-90, 90] degrees");
    }
    if (iterations < 1) throw std::invalid_argument("iterations must be at least 1");
    if (multistarts < 1) throw std::invalid_argument("multistarts must be at least 1");
    if (!(decay > 0.0 && decay < 1.0)) throw std::invalid_argument("decay must lie in (0, 1)");
    if (!(initial_temperature > 0.0)) throw std::invalid_argument("initial temperature must be positive");
    if (!(position_step >= 0.0) || !(angle_step >= 0.0)) throw std::invalid_argument("steps must be >= 0");
    if (refine_levels < 0) throw std::invalid_argument("refine_levels must be >= 0");
    if (start.size() != static_cast<std::size_t>(lidar_count)) {
      throw std::invalid_argument("search start must give one pose per LiDAR");
    }
  }
};

struct AcceptedMove {
  int iteration = 0;
  std::size_t objective = 0;
};

struct StartTrace {
  std::vector<std::size_t> current;  ///< objective of the current state, index 0 = initial
  std::vector<std::size_t> best;     ///< best-so-far objective, index 0 = initial
  std::vector<AcceptedMove> accepted;
  ObjectiveReport result;            ///< after polish
};

struct SearchTrace {
  std::vector<StartTrace> starts;
  std::size_t best_start = 0;
  ObjectiveReport final_report;
  double wall_seconds = 0.0;
};

namespace detail {

// Flattened variable vector: per LiDAR [x, y, z, pitch, roll].
inline std::vector<double> flatten(const Configuration& config) {
  std::vector<double> v;
  v.reserve(config.size() * 5);
  for (const auto& p : config) v.insert(v.end(), {p.x, p.y, p.z, p.pitch, p.roll});
  return v;
}

inline Configuration unflatten(const std::vector<double>& v) {
  Configuration config(v.size() / 5);
  for (std::size_t l = 0; l < config.size(); ++l) {
    config[l] = {v[5 * l], v[5 * l + 1], v[5 * l + 2], v[5 * l + 3], v[5 * l + 4]};
  }
  return config;
}

inline std::vector<std::size_t> active_dims(std::size_t lidars, bool positions_only) {
  std::vector<std::size_t> dims;
  for (std::size_t l = 0; l < lidars; ++l) {
    for (std::size_t d = 0; d < (positions_only ? 3u : 5u); ++d) dims.push_back(5 * l + d);
  }
  return dims;
}

inline double reflect_into(double v, const Interval& b) {
  if (b.hi == b.lo) return b.lo;
  const double w = b.hi - b.lo;
  double u = std::fmod(v - b.lo, 2.0 * w);
  if (u < 0.0) u += 2.0 * w;
  return u <= w ? b.lo + u : b.hi - (u - w);
}

inline Configuration clamp_config(Configuration config, const SearchBounds& b, bool positions_only) {
  for (auto& p : config) {
    p.x = b.x.clamp(p.x);
    p.y = b.y.clamp(p.y);
    p.z = b.z.clamp(p.z);
    if (!positions_only) {
      p.pitch = b.pitch.clamp(p.pitch);
      p.roll = b.roll.clamp(p.roll);
    }
  }
  return config;
}

inline bool better(const ObjectiveReport& a, const ObjectiveReport& b) { return compare(a, b) < 0; }

}  // namespace detail

/// Coordinate descent: at each level the step halves; every active
/// coordinate is tried at +/- step and moves only on strict improvement
/// under compare(). Sweeps repeat until a sweep makes no move.
inline Configuration grid_refine(const Evaluator& eval, const Configuration& best, const std::vector<double>& radius,
                                 int levels, const SearchBounds& bounds, bool positions_only) {
  if (levels < 1) throw std::invalid_argument("levels must be at least 1");
  if (radius.size() != 5) throw std::invalid_argument("radius needs one step per pose dimension");
  std::vector<double> v = detail::flatten(best);
  ObjectiveReport current = eval(best);
  const auto dims = detail::active_dims(best.size(), positions_only);
  for (int level = 0; level < levels; ++level) {
    const double scale = std::ldexp(1.0, -level);
    for (int sweep = 0; sweep < 64; ++sweep) {
      bool moved = false;
      for (std::size_t d : dims) {
        const double step = radius[d % 5] * scale;
        if (step == 0.0) continue;
        for (double dir : {-1.0, 1.0}) {
          std::vector<double> trial = v;
          trial[d] = bounds[static_cast<int>(d % 5)].clamp(v[d] + dir * step);
          if (trial[d] == v[d]) continue;
          ObjectiveReport rep = eval(detail::unflatten(trial));
          if (detail::better(rep, current)) {
            v = std::move(trial);
            current = std::move(rep);
            moved = true;
            break;
          }
        }
      }
      if (!moved) break;
    }
  }
  return detail::unflatten(v);
}

namespace detail {

inline StartTrace anneal(const Evaluator& eval, const SearchConfig& cfg, Configuration initial, std::size_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(cfg.seed), static_cast<std::uint32_t>(cfg.seed >> 32),
                    static_cast<std::uint32_t>(index), 0x51ed2701u};
  std::mt19937_64 rng(seq);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  const auto dims = active_dims(initial.size(), cfg.positions_only);
  std::vector<double> v = flatten(initial);
  ObjectiveReport current = eval(initial);
  ObjectiveReport best = current;

  StartTrace trace;
  trace.current.push_back(current.objective);
  trace.best.push_back(best.objective);

  double temperature = cfg.initial_temperature;
  double scale = 1.0;
  for (int it = 1; it <= cfg.iterations; ++it) {
    std::vector<double> trial = v;
    const std::size_t d = dims[static_cast<std::size_t>(unit(rng) * dims.size()) % dims.size()];
    const double step = (d % 5 < 3 ? cfg.position_step : cfg.angle_step) * scale;
    trial[d] = reflect_into(v[d] + (2.0 * unit(rng) - 1.0) * step, cfg.bounds[static_cast<int>(d % 5)]);
    ObjectiveReport rep = eval(unflatten(trial));
    const double delta = static_cast<double>(rep.objective) - static_cast<double>(current.objective);
    const double u = unit(rng);
    if (delta <= 0.0 || u < std::exp(-delta / temperature)) {
      v = std::move(trial);
      current = std::move(rep);
      trace.accepted.push_back({it, current.objective});
      if (better(current, best)) best = current;
    }
    trace.current.push_back(current.objective);
    trace.best.push_back(best.objective);
    temperature *= cfg.decay;
    scale *= cfg.decay;
  }

  Configuration polished = best.config;
  if (cfg.refine_levels > 0) {
    const double ps = cfg.position_step * scale, as = cfg.angle_step * scale;
    polished = grid_refine(eval, best.config, {ps, ps, ps, as, as}, cfg.refine_levels, cfg.bounds, cfg.positions_only);
  }
  trace.result = eval(polished);
  return trace;
}

}  // namespace detail

/// Start 0 is cfg.start clamped into the bounds; the others are uniform in
/// the bounds (angles copied from cfg.start when positions_only). Each start
/// owns a random stream derived from (seed, start index), and the reduction
/// uses compare(), so the result does not depend on thread scheduling.
inline SearchTrace optimize(const Evaluator& eval, const SearchConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  const int nl = eval.scenario().fleet.lidar_count();
  cfg.validate(nl);

  std::vector<Configuration> starts;
  starts.push_back(detail::clamp_config(cfg.start, cfg.bounds, cfg.positions_only));
  {
    std::seed_seq seq{static_cast<std::uint32_t>(cfg.seed), static_cast<std::uint32_t>(cfg.seed >> 32), 0xa11u};
    std::mt19937_64 rng(seq);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    auto draw = [&](const Interval& b) { return b.lo + unit(rng) * (b.hi - b.lo); };
    for (int s = 1; s < cfg.multistarts; ++s) {
      Configuration c = cfg.start;
      for (auto& p : c) {
        p.x = draw(cfg.bounds.x);
        p.y = draw(cfg.bounds.y);
        p.z = draw(cfg.bounds.z);
        if (!cfg.positions_only) {
          p.pitch = draw(cfg.bounds.pitch);
          p.roll = draw(cfg.bounds.roll);
        }
      }
      starts.push_back(std::move(c));
    }
  }

  std::vector<std::future<StartTrace>> jobs;
  jobs.reserve(starts.size());
  for (std::size_t i = 0; i < starts.size(); ++i) {
    jobs.push_back(std::async(std::launch::async, [&, i] { return detail::anneal(eval, cfg, starts[i], i); }));
  }

  SearchTrace trace;
  for (auto& j : jobs) trace.starts.push_back(j.get());
  for (std::size_t i = 1; i < trace.starts.size(); ++i) {
    if (detail::better(trace.starts[i].result, trace.starts[trace.best_start].result)) trace.best_start = i;
  }
  trace.final_report = trace.starts[trace.best_start].result;
  trace.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return trace;
}

}  // namespace lidarconf
