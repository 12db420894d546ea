/*
 * milp.hpp
 *
 * Big-M mixed-integer encoding of the placement problem with fixed mount
 * angles and free LiDAR positions.
 *
 * Logic gates (M = big_M, e = epsilon, all literals binary):
 *   d = AND(d_1..d_n):  with delta = 1 - d, delta_i = 1 - d_i
 *       -sum delta_i + delta <= e,   sum delta_i - M delta <= e
 *   f = OR(f_1..f_n):   -sum f_i + f <= e,   sum f_i - M f <= e
 *   IF g(x) <= 0 THEN d = 1 ELSE d = 0:
 *       g(x) <= M (1 - d),   g(x) >= e - (M + e) d
 *
 * The IF-THEN-ELSE pair leaves no feasible d when 0 < g(x) < e; this band
 * is inherited as-is.
 *
 * Variable naming (stable, c is the lattice cube index):
 *   X{l} Y{l} Z{l}              LiDAR positions
 *   d_face_c{c}_l{l}_r{r}_f{i}  1 iff the cube is on the downward side of face i
 *   d_la_c{c}_l{l}_r{r}         1 iff the cube is above the pyramid of laser r
 *   d_seg_c{c}_l{l}_j{j}        1 iff the cube lies in slab j of LiDAR l
 *                               (below the first j lasers, above the rest)
 *   d_c_s{s}_c{c}               1 iff the cube lies in subspace s
 *   d_ss_s{s}_k{k}              number of shell-k cubes in subspace s
 *   t                           min-max bound, d_ss_s{s}_k{k} <= t
 */

#pragma once

#include "lidarconf/geometry.hpp"
#include "lidarconf/lattice.hpp"
#include "lidarconf/segmentation.hpp"

#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace lidarconf {

struct MilpParams {
  double big_m = 200.0;
  double epsilon = 0.01;
  int n_faces = 4;

  void validate() const {
    if (!(big_m > 0.0) || !std::isfinite(big_m)) throw std::invalid_argument("big_M must be positive");
    if (!(epsilon > 0.0 && epsilon < 1.0)) throw std::invalid_argument("epsilon must lie in (0, 1)");
    if (n_faces < 3) throw std::invalid_argument("n_faces must be at least 3");
  }
};

/// Raised when big_M cannot bound an encoded quantity.
class BigMError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using VarId = std::size_t;

enum class VarKind { Binary, Continuous };

enum class VarClass { Face, Laser, Segment, Cube, SubspaceCount, Position, Bound, Other };

inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct Variable {
  std::string name;
  VarKind kind = VarKind::Continuous;
  double lower = 0.0;
  double upper = kInf;

  bool operator==(const Variable&) const = default;
};

enum class Sense { LessEqual, GreaterEqual, Equal };

struct Term {
  VarId var = 0;
  double coeff = 0.0;

  bool operator==(const Term&) const = default;
};

struct Constraint {
  std::string name;
  std::vector<Term> terms;
  Sense sense = Sense::LessEqual;
  double rhs = 0.0;

  bool operator==(const Constraint&) const = default;
};

/// sum terms + constant
struct AffineExpr {
  std::vector<Term> terms;
  double constant = 0.0;
};

/// A binary variable or its complement (1 - var).
struct Literal {
  VarId var = 0;
  bool negated = false;
};

inline VarClass classify_variable(std::string_view name) {
  if (name.starts_with("d_face_")) return VarClass::Face;
  if (name.starts_with("d_la_")) return VarClass::Laser;
  if (name.starts_with("d_seg_")) return VarClass::Segment;
  if (name.starts_with("d_c_")) return VarClass::Cube;
  if (name.starts_with("d_ss_")) return VarClass::SubspaceCount;
  if (name == "t") return VarClass::Bound;
  if (name.size() >= 2 && (name[0] == 'X' || name[0] == 'Y' || name[0] == 'Z') &&
      name.find_first_not_of("0123456789", 1) == std::string_view::npos) {
    return VarClass::Position;
  }
  return VarClass::Other;
}

class MilpModel {
 public:
  VarId add_variable(std::string name, VarKind kind, double lower, double upper) {
    if (index_.contains(name)) throw std::invalid_argument("duplicate variable " + name);
    if (kind == VarKind::Binary) {
      lower = 0.0;
      upper = 1.0;
    }
    if (!(lower <= upper)) throw std::invalid_argument("empty bounds for variable " + name);
    const VarId id = variables_.size();
    index_.emplace(name, id);
    variables_.push_back({std::move(name), kind, lower, upper});
    return id;
  }

  VarId add_binary(std::string name) { return add_variable(std::move(name), VarKind::Binary, 0.0, 1.0); }

  void add_constraint(Constraint c) {
    for (const auto& t : c.terms) {
      if (t.var >= variables_.size()) {
        throw std::invalid_argument("constraint " + c.name + " references an undeclared variable");
      }
    }
    constraints_.push_back(std::move(c));
  }

  void add_constraints(std::vector<Constraint> cs) {
    for (auto& c : cs) add_constraint(std::move(c));
  }

  void set_objective(std::vector<Term> terms) {
    for (const auto& t : terms) {
      if (t.var >= variables_.size()) throw std::invalid_argument("objective references an undeclared variable");
    }
    objective_ = std::move(terms);
  }

  const std::vector<Variable>& variables() const { return variables_; }
  const std::vector<Constraint>& constraints() const { return constraints_; }
  const std::vector<Term>& objective() const { return objective_; }
  const Variable& variable(VarId id) const { return variables_.at(id); }

  std::optional<VarId> find(std::string_view name) const {
    const auto it = index_.find(std::string(name));
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  VarId at(std::string_view name) const {
    auto id = find(name);
    if (!id) throw std::out_of_range("no variable named " + std::string(name));
    return *id;
  }

  std::size_t count(VarClass cls) const {
    std::size_t n = 0;
    for (const auto& v : variables_) n += classify_variable(v.name) == cls;
    return n;
  }

  bool operator==(const MilpModel& o) const {
    return variables_ == o.variables_ && constraints_ == o.constraints_ && objective_ == o.objective_;
  }

 private:
  std::vector<Variable> variables_;
  std::vector<Constraint> constraints_;
  std::vector<Term> objective_;
  std::unordered_map<std::string, VarId> index_;
};

namespace detail {

// Accumulates a linear form with a constant, merging repeated variables.
struct LinearBuilder {
  std::vector<Term> terms;
  double constant = 0.0;

  void add(VarId v, double coeff) {
    for (auto& t : terms) {
      if (t.var == v) {
        t.coeff += coeff;
        return;
      }
    }
    terms.push_back({v, coeff});
  }

  // value of (1 - x) or x scaled by coeff
  void add_literal(const Literal& lit, double coeff) {
    if (lit.negated) {
      constant += coeff;
      add(lit.var, -coeff);
    } else {
      add(lit.var, coeff);
    }
  }

  void add_complement(const Literal& lit, double coeff) { add_literal({lit.var, !lit.negated}, coeff); }

  void add_expr(const AffineExpr& e, double scale) {
    for (const auto& t : e.terms) add(t.var, scale * t.coeff);
    constant += scale * e.constant;
  }

  Constraint finish(std::string name, Sense sense, double rhs) && {
    std::erase_if(terms, [](const Term& t) { return t.coeff == 0.0; });
    return {std::move(name), std::move(terms), sense, rhs - constant};
  }
};

}  // namespace detail

/// Two constraints forcing `output` = AND(inputs).
inline std::vector<Constraint> encode_and(std::span<const Literal> inputs, VarId output, const MilpParams& params,
                                          std::string_view tag) {
  if (inputs.empty()) throw std::invalid_argument("AND gate needs at least one input");
  if (static_cast<double>(inputs.size()) > params.big_m + params.epsilon) {
    throw BigMError("big_M = " + std::to_string(params.big_m) + " cannot bound an AND over " +
                    std::to_string(inputs.size()) + " inputs (" + std::string(tag) + ")");
  }
  const Literal out{output, false};
  detail::LinearBuilder a, b;
  for (const auto& in : inputs) {
    a.add_complement(in, -1.0);
    b.add_complement(in, 1.0);
  }
  a.add_complement(out, 1.0);
  b.add_complement(out, -params.big_m);
  std::vector<Constraint> cs;
  cs.push_back(std::move(a).finish(std::string(tag) + "_a", Sense::LessEqual, params.epsilon));
  cs.push_back(std::move(b).finish(std::string(tag) + "_b", Sense::LessEqual, params.epsilon));
  return cs;
}

/// Two constraints forcing `output` = OR(inputs).
inline std::vector<Constraint> encode_or(std::span<const Literal> inputs, VarId output, const MilpParams& params,
                                         std::string_view tag) {
  if (inputs.empty()) throw std::invalid_argument("OR gate needs at least one input");
  if (static_cast<double>(inputs.size()) > params.big_m + params.epsilon) {
    throw BigMError("big_M = " + std::to_string(params.big_m) + " cannot bound an OR over " +
                    std::to_string(inputs.size()) + " inputs (" + std::string(tag) + ")");
  }
  detail::LinearBuilder a, b;
  for (const auto& in : inputs) {
    a.add_literal(in, -1.0);
    b.add_literal(in, 1.0);
  }
  a.add(output, 1.0);
  b.add(output, -params.big_m);
  std::vector<Constraint> cs;
  cs.push_back(std::move(a).finish(std::string(tag) + "_a", Sense::LessEqual, params.epsilon));
  cs.push_back(std::move(b).finish(std::string(tag) + "_b", Sense::LessEqual, params.epsilon));
  return cs;
}

/// Interval of an affine expression over the model's variable bounds.
inline Interval expression_range(const MilpModel& model, const AffineExpr& f) {
  double lo = f.constant, hi = f.constant;
  for (const auto& t : f.terms) {
    const auto& v = model.variable(t.var);
    const double a = t.coeff * v.lower, b = t.coeff * v.upper;
    lo += std::min(a, b);
    hi += std::max(a, b);
  }
  return {lo, hi};
}

/// Two constraints forcing `indicator` = [f(x) <= 0]. Throws BigMError when
/// |f| can exceed big_M over the variable bounds of `model`.
inline std::vector<Constraint> encode_if_then_else(const MilpModel& model, const AffineExpr& f, VarId indicator,
                                                   const MilpParams& params, std::string_view tag) {
  const Interval range = expression_range(model, f);
  if (!std::isfinite(range.lo) || !std::isfinite(range.hi) || std::max(-range.lo, range.hi) > params.big_m) {
    throw BigMError(std::string(tag) + ": expression spans [" + std::to_string(range.lo) + ", " +
                    std::to_string(range.hi) + "] over the variable bounds, exceeding big_M = " +
                    std::to_string(params.big_m));
  }
  // f <= M - M d
  detail::LinearBuilder upper;
  upper.add_expr(f, 1.0);
  upper.add(indicator, params.big_m);
  // f + (M + e) d >= e
  detail::LinearBuilder lower;
  lower.add_expr(f, 1.0);
  lower.add(indicator, params.big_m + params.epsilon);
  std::vector<Constraint> cs;
  cs.push_back(std::move(upper).finish(std::string(tag) + "_a", Sense::LessEqual, params.big_m));
  cs.push_back(std::move(lower).finish(std::string(tag) + "_b", Sense::GreaterEqual, params.epsilon));
  return cs;
}

inline double row_activity(const Constraint& c, std::span<const double> values) {
  double s = 0.0;
  for (const auto& t : c.terms) s += t.coeff * values[t.var];
  return s;
}

inline bool satisfied(const Constraint& c, std::span<const double> values, double tol = 1e-9) {
  const double a = row_activity(c, values);
  switch (c.sense) {
    case Sense::LessEqual: return a <= c.rhs + tol;
    case Sense::GreaterEqual: return a >= c.rhs - tol;
    case Sense::Equal: return std::abs(a - c.rhs) <= tol;
  }
  return false;
}

/// Position bounds of the LiDARs in the model.
struct PositionBounds {
  Interval x;
  Interval y;
  Interval z;

  static PositionBounds from_roi(const Roi& roi) { return {roi.x, roi.y, roi.z}; }
};

/// Builds the model for fixed mount angles (only pitch/roll of `angles` are
/// used). Every cube with a shell gets face, laser, slab and subspace
/// indicators; per (s, k) the count of subspace-s cubes in shell k is bounded
/// by t, and t is minimized.
inline MilpModel build_model(const FleetSpec& fleet, const Configuration& angles, const CubeLattice& lattice,
                             const ShellAssignment& shells, const std::vector<SubspacePattern>& patterns,
                             const MilpParams& params, const PositionBounds& bounds) {
  params.validate();
  check_config_size(fleet, angles);
  const int nl = fleet.lidar_count();
  const int nr = fleet.lasers_per_lidar();
  const auto L = static_cast<std::size_t>(nl);
  const auto R = static_cast<std::size_t>(nr);
  const auto F = static_cast<std::size_t>(params.n_faces);

  MilpModel model;
  std::vector<VarId> xs, ys, zs;
  for (int l = 0; l < nl; ++l) {
    const auto s = std::to_string(l);
    xs.push_back(model.add_variable("X" + s, VarKind::Continuous, bounds.x.lo, bounds.x.hi));
    ys.push_back(model.add_variable("Y" + s, VarKind::Continuous, bounds.y.lo, bounds.y.hi));
    zs.push_back(model.add_variable("Z" + s, VarKind::Continuous, bounds.z.lo, bounds.z.hi));
  }

  // car-frame face normals per (l, r, i); they depend only on the fixed angles
  std::vector<Vec3> normals(L * R * F);
  for (std::size_t l = 0; l < L; ++l) {
    const Mat3 rot = build_pose_transform(LidarPose{0, 0, 0, angles[l].pitch, angles[l].roll}).rotation;
    for (std::size_t r = 0; r < R; ++r) {
      const auto faces = pyramid_planes(fleet.beam_angle(static_cast<int>(l), static_cast<int>(r)), params.n_faces);
      for (std::size_t i = 0; i < F; ++i) normals[(l * R + r) * F + i] = rot * faces[i].normal;
    }
  }

  std::vector<std::vector<VarId>> cube_vars(patterns.size());  // d_c per s, in cube order
  std::vector<std::vector<int>> cube_shell(patterns.size());
  std::vector<int> slab_of_pattern;  // j for (s, l) at s * L + l
  for (const auto& p : patterns) {
    for (int j : p.below_counts()) slab_of_pattern.push_back(j);
  }

  std::vector<Literal> lits;
  std::vector<VarId> d_la(R), d_seg(static_cast<std::size_t>(nr + 1) * L);
  for (std::size_t c = 0; c < lattice.size(); ++c) {
    const int k = shells.shell_of_cube[c];
    if (k == kNoShell) continue;
    const Vec3& center = lattice.centers[c];
    const std::string cs = "c" + std::to_string(c);

    for (std::size_t l = 0; l < L; ++l) {
      const std::string ls = cs + "_l" + std::to_string(l);
      for (std::size_t r = 0; r < R; ++r) {
        const std::string rs = ls + "_r" + std::to_string(r);
        lits.clear();
        for (std::size_t i = 0; i < F; ++i) {
          const Vec3& n = normals[(l * R + r) * F + i];
          // face margin n . (center - T), affine in T
          AffineExpr g;
          g.constant = n.dot(center);
          for (auto [var, coeff] : {std::pair{xs[l], -n.x()}, std::pair{ys[l], -n.y()}, std::pair{zs[l], -n.z()}}) {
            if (coeff != 0.0) g.terms.push_back({var, coeff});
          }
          const std::string fs = rs + "_f" + std::to_string(i);
          const VarId d = model.add_binary("d_face_" + fs);
          model.add_constraints(encode_if_then_else(model, g, d, params, "ite_" + fs));
          lits.push_back({d, true});  // upward side of face i
        }
        d_la[r] = model.add_binary("d_la_" + rs);
        const double theta = fleet.beam_angle(static_cast<int>(l), static_cast<int>(r));
        if (pyramid_upward_is_intersection(theta)) {
          model.add_constraints(encode_and(lits, d_la[r], params, "and_la_" + rs));
        } else {
          model.add_constraints(encode_or(lits, d_la[r], params, "or_la_" + rs));
        }
      }
      for (int j = 0; j <= nr; ++j) {
        const std::string js = ls + "_j" + std::to_string(j);
        lits.clear();
        for (std::size_t r = 0; r < R; ++r) lits.push_back({d_la[r], static_cast<int>(r) < j});
        const VarId d = model.add_binary("d_seg_" + js);
        model.add_constraints(encode_and(lits, d, params, "and_seg_" + js));
        d_seg[l * static_cast<std::size_t>(nr + 1) + static_cast<std::size_t>(j)] = d;
      }
    }

    for (std::size_t s = 0; s < patterns.size(); ++s) {
      const std::string ss = "s" + std::to_string(s) + "_" + cs;
      lits.clear();
      for (std::size_t l = 0; l < L; ++l) {
        const auto j = static_cast<std::size_t>(slab_of_pattern[s * L + l]);
        lits.push_back({d_seg[l * static_cast<std::size_t>(nr + 1) + j], false});
      }
      const VarId d = model.add_binary("d_c_" + ss);
      model.add_constraints(encode_and(lits, d, params, "and_c_" + ss));
      cube_vars[s].push_back(d);
      cube_shell[s].push_back(k);
    }
  }

  const VarId bound = model.add_variable("t", VarKind::Continuous, 0.0, kInf);
  for (std::size_t s = 0; s < patterns.size(); ++s) {
    for (std::size_t k = 0; k < shells.shell_count; ++k) {
      Constraint def;
      for (std::size_t i = 0; i < cube_vars[s].size(); ++i) {
        if (cube_shell[s][i] == static_cast<int>(k)) def.terms.push_back({cube_vars[s][i], -1.0});
      }
      if (def.terms.empty()) continue;
      const std::string name = "s" + std::to_string(s) + "_k" + std::to_string(k);
      const VarId count = model.add_variable("d_ss_" + name, VarKind::Continuous, 0.0, kInf);
      def.terms.insert(def.terms.begin(), Term{count, 1.0});
      def.name = "count_" + name;
      def.sense = Sense::Equal;
      def.rhs = 0.0;
      model.add_constraint(std::move(def));
      model.add_constraint({"minmax_" + name, {{count, 1.0}, {bound, -1.0}}, Sense::LessEqual, 0.0});
    }
  }
  model.set_objective({{bound, 1.0}});
  return model;
}

/// Result of fixing some variables and propagating the model's constraints.
struct Completion {
  std::vector<std::optional<double>> values;
  std::vector<VarId> ambiguous;   ///< binaries left with two feasible values
  std::vector<VarId> infeasible;  ///< binaries with no feasible value

  bool complete_for(const MilpModel& m, VarKind kind) const {
    for (VarId v = 0; v < m.variables().size(); ++v) {
      if (m.variable(v).kind == kind && !values[v]) return false;
    }
    return true;
  }
};

/// Fixes the given variables, then repeatedly resolves any binary whose
/// constraints are otherwise fully known (trying 0 and 1), and any
/// continuous variable that is the single unknown of an equality row.
/// Uses only the model's rows, not the geometry that produced them.
inline Completion propagate_fixed(const MilpModel& model, const std::map<VarId, double>& fixed, double tol = 1e-9) {
  const std::size_t n = model.variables().size();
  Completion out;
  out.values.assign(n, std::nullopt);
  for (const auto& [v, x] : fixed) out.values.at(v) = x;

  std::vector<std::vector<std::size_t>> rows_of(n);
  const auto& rows = model.constraints();
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (const auto& t : rows[i].terms) rows_of[t.var].push_back(i);
  }

  std::vector<char> stuck(n, 0);
  std::vector<double> scratch(n, 0.0);
  auto unknowns_besides = [&](const Constraint& c, VarId v) {
    for (const auto& t : c.terms) {
      if (t.var != v && !out.values[t.var]) return true;
    }
    return false;
  };
  auto load = [&](const Constraint& c) {
    for (const auto& t : c.terms) scratch[t.var] = out.values[t.var].value_or(0.0);
  };

  bool progress = true;
  while (progress) {
    progress = false;
    for (VarId v = 0; v < n; ++v) {
      if (out.values[v] || stuck[v]) continue;
      const auto& var = model.variable(v);
      if (var.kind == VarKind::Binary) {
        // decide v from the rows where it is the only unknown; rows of
        // downstream gates still wait on their own outputs
        std::vector<std::size_t> decisive;
        for (std::size_t i : rows_of[v]) {
          if (!unknowns_besides(rows[i], v)) decisive.push_back(i);
        }
        if (decisive.empty()) continue;
        int feasible = 0;
        double chosen = 0.0;
        for (double trial : {0.0, 1.0}) {
          bool ok = true;
          for (std::size_t i : decisive) {
            load(rows[i]);
            scratch[v] = trial;
            if (!satisfied(rows[i], scratch, tol)) {
              ok = false;
              break;
            }
          }
          if (ok) {
            ++feasible;
            chosen = trial;
          }
        }
        if (feasible == 1) {
          out.values[v] = chosen;
          progress = true;
        } else {
          stuck[v] = 1;
          (feasible == 0 ? out.infeasible : out.ambiguous).push_back(v);
        }
      } else {
        for (std::size_t i : rows_of[v]) {
          const auto& c = rows[i];
          if (c.sense != Sense::Equal || unknowns_besides(c, v)) continue;
          double rest = 0.0, own = 0.0;
          for (const auto& t : c.terms) {
            if (t.var == v) {
              own += t.coeff;
            } else {
              rest += t.coeff * *out.values[t.var];
            }
          }
          if (own == 0.0) continue;
          out.values[v] = (c.rhs - rest) / own;
          progress = true;
          break;
        }
      }
    }
  }
  return out;
}

}  // namespace lidarconf
