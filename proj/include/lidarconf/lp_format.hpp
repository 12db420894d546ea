/*
 * lp_format.hpp
 *
 * LP text format writer and the matching reader for MilpModel.
 *
 * Layout written:
 *   \ comment lines
 *   Minimize
 *    obj: <terms>
 *   Subject To
 *    <name>: <terms> <= | >= | = <rhs>     (long rows wrap onto indented lines)
 *   Bounds
 *    <lo> <= <var> <= <hi>                 (every variable, declaration order)
 *   Binaries
 *    <var>
 *   End
 *
 * Numbers use the shortest decimal form that round-trips to the same double,
 * so write -> read reproduces the model exactly.
 */

#pragma once

#include "lidarconf/milp.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <unordered_map>
#include <vector>

namespace lidarconf {

class LpFormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline std::string format_number(double v) {
  if (v == 0.0) return "0";
  if (v == kInf) return "+inf";
  if (v == -kInf) return "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

inline constexpr std::size_t kLpLineWidth = 200;

inline void write_terms(std::ostream& out, std::size_t& column, const std::vector<Term>& terms,
                        const MilpModel& model) {
  bool first = true;
  for (const auto& t : terms) {
    std::string piece;
    if (t.coeff < 0.0) {
      piece = first ? "- " : " - ";
    } else if (!first) {
      piece = " + ";
    }
    piece += format_number(std::abs(t.coeff)) + " " + model.variable(t.var).name;
    if (column + piece.size() > kLpLineWidth && !first) {
      out << "\n   ";
      column = 3;
      if (piece.front() == ' ') piece.erase(0, 1);
    }
    out << piece;
    column += piece.size();
    first = false;
  }
}

inline const char* sense_token(Sense s) {
  switch (s) {
    case Sense::LessEqual: return "<=";
    case Sense::GreaterEqual: return ">=";
    case Sense::Equal: return "=";
  }
  return "=";
}

}  // namespace detail

inline void write_lp(std::ostream& out, const MilpModel& model) {
  out << "\\ LiDAR placement min-max model\n";
  out << "\\ variables: " << model.variables().size() << ", constraints: " << model.constraints().size() << "\n";
  out << "Minimize\n obj:";
  std::size_t column = 5;
  if (!model.objective().empty()) {
    out << ' ';
    ++column;
    detail::write_terms(out, column, model.objective(), model);
  }
  out << "\nSubject To\n";
  for (const auto& c : model.constraints()) {
    out << ' ' << c.name << ": ";
    column = c.name.size() + 3;
    detail::write_terms(out, column, c.terms, model);
    if (c.terms.empty()) out << "0";
    const std::string tail = std::string(detail::sense_token(c.sense)) + ' ' + detail::format_number(c.rhs);
    if (column + tail.size() + 1 > detail::kLpLineWidth) {
      out << "\n   " << tail << '\n';
    } else {
      out << ' ' << tail << '\n';
    }
  }
  out << "Bounds\n";
  for (const auto& v : model.variables()) {
    out << ' ' << detail::format_number(v.lower) << " <= " << v.name << " <= " << detail::format_number(v.upper)
        << '\n';
  }
  bool any_binary = false;
  for (const auto& v : model.variables()) {
    if (v.kind != VarKind::Binary) continue;
    if (!any_binary) out << "Binaries\n";
    any_binary = true;
    out << ' ' << v.name << '\n';
  }
  out << "End\n";
}

inline std::string to_lp_string(const MilpModel& model) {
  std::ostringstream out;
  write_lp(out, model);
  return out.str();
}

inline void export_model(const MilpModel& model, const std::string& path) {
  std::ofstream file(path, std::ios::binary);
  if (!file) throw std::runtime_error("cannot open " + path + " for writing");
  write_lp(file, model);
  file.flush();
  if (!file) throw std::runtime_error("failed writing model to " + path);
}

namespace detail {

struct LpToken {
  std::string text;
  std::size_t line;
};

inline std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char ch) { return std::tolower(ch); });
  return out;
}

inline bool parse_number(const std::string& s, double& v) {
  if (s == "+inf" || s == "inf" || s == "+infinity" || s == "infinity") {
    v = kInf;
    return true;
  }
  if (s == "-inf" || s == "-infinity") {
    v = -kInf;
    return true;
  }
  const char* begin = s.data();
  if (!s.empty() && s.front() == '+') ++begin;
  const auto res = std::from_chars(begin, s.data() + s.size(), v);
  return res.ec == std::errc() && res.ptr == s.data() + s.size();
}

enum class Section { None, Objective, Constraints, Bounds, Binaries, Generals, End };

inline bool is_sense(const std::string& t) {
  return t == "<=" || t == ">=" || t == "=" || t == "=<" || t == "=>" || t == "<" || t == ">";
}

inline Sense to_sense(const std::string& t) {
  if (t == "<=" || t == "=<" || t == "<") return Sense::LessEqual;
  if (t == ">=" || t == "=>" || t == ">") return Sense::GreaterEqual;
  return Sense::Equal;
}

class LpReader {
 public:
  explicit LpReader(std::istream& in) { tokenize(in); }

  MilpModel read() {
    split_sections();
    // variable order comes from the bounds section
    for (std::size_t i = 0; i < bounds_.size();) i = read_bound(i);
    for (const auto& tok : binaries_) {
      const auto it = declared_.find(tok.text);
      if (it == declared_.end()) fail(tok, "binary variable without a bounds entry");
      vars_[it->second].kind = VarKind::Binary;
    }
    MilpModel model;
    for (const auto& v : vars_) model.add_variable(v.name, v.kind, v.lower, v.upper);

    std::vector<Term> objective;
    std::size_t i = 0;
    if (!objective_.empty() && objective_.front().text.back() == ':') ++i;
    read_terms(model, objective_, i, objective, false);
    model.set_objective(std::move(objective));

    for (std::size_t j = 0; j < rows_.size();) {
      Constraint c;
      if (rows_[j].text.back() != ':') fail(rows_[j], "constraint without a name");
      c.name = rows_[j].text.substr(0, rows_[j].text.size() - 1);
      ++j;
      read_terms(model, rows_, j, c.terms, true);
      if (j >= rows_.size() || !is_sense(rows_[j].text)) fail(rows_[std::min(j, rows_.size() - 1)], "expected sense");
      c.sense = to_sense(rows_[j].text);
      ++j;
      if (j >= rows_.size() || !parse_number(rows_[j].text, c.rhs)) {
        fail(rows_[std::min(j, rows_.size() - 1)], "expected right-hand side");
      }
      ++j;
      model.add_constraint(std::move(c));
    }
    return model;
  }

 private:
  [[noreturn]] static void fail(const LpToken& tok, const std::string& what) {
    throw LpFormatError("line " + std::to_string(tok.line) + ": " + what + " near '" + tok.text + "'");
  }

  void tokenize(std::istream& in) {
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
      ++n;
      if (const auto p = line.find('\\'); p != std::string::npos) line.erase(p);
      const std::string low = lower(line);
      const auto first = low.find_first_not_of(" \t\r");
      if (first == std::string::npos) continue;
      const std::string head = low.substr(first);
      auto keyword = [&](std::initializer_list<const char*> words) {
        for (const char* w : words) {
          if (head.rfind(w, 0) == 0 && head.find_first_not_of(" \t\r", std::string_view(w).size()) == std::string::npos) {
            return true;
          }
        }
        return false;
      };
      if (first == 0) {
        Section s = Section::None;
        if (keyword({"minimize", "minimise", "min"})) s = Section::Objective;
        else if (keyword({"subject to", "such that", "st", "s.t."})) s = Section::Constraints;
        else if (keyword({"bounds", "bound"})) s = Section::Bounds;
        else if (keyword({"binaries", "binary", "bin"})) s = Section::Binaries;
        else if (keyword({"generals", "general", "gen"})) s = Section::Generals;
        else if (keyword({"end"})) s = Section::End;
        else if (keyword({"maximize", "maximise", "max"})) throw LpFormatError("maximization models are not supported");
        if (s != Section::None) {
          tokens_.push_back({"\x01" + std::to_string(static_cast<int>(s)), n});
          continue;
        }
      }
      std::istringstream words(line);
      std::string w;
      while (words >> w) {
        // split a glued "name:term" into "name:" "term"
        const auto colon = w.find(':');
        if (colon != std::string::npos && colon + 1 < w.size()) {
          tokens_.push_back({w.substr(0, colon + 1), n});
          tokens_.push_back({w.substr(colon + 1), n});
        } else {
          tokens_.push_back({w, n});
        }
      }
    }
  }

  void split_sections() {
    Section current = Section::None;
    for (const auto& tok : tokens_) {
      if (tok.text.front() == '\x01') {
        current = static_cast<Section>(std::stoi(tok.text.substr(1)));
        continue;
      }
      switch (current) {
        case Section::Objective: objective_.push_back(tok); break;
        case Section::Constraints: rows_.push_back(tok); break;
        case Section::Bounds: bounds_.push_back(tok); break;
        case Section::Binaries: binaries_.push_back(tok); break;
        case Section::Generals: fail(tok, "general integer variables are not supported");
        case Section::None: fail(tok, "content before the objective section");
        case Section::End: fail(tok, "content after End");
      }
    }
  }

  // "lo <= name <= hi", "name >= lo", "name <= hi", "name free"
  std::size_t read_bound(std::size_t i) {
    auto at = [&](std::size_t j) -> const LpToken& {
      if (j >= bounds_.size()) fail(bounds_.back(), "truncated bound");
      return bounds_[j];
    };
    double lo = 0.0, hi = kInf;
    double v;
    if (parse_number(at(i).text, v)) {
      if (to_sense(at(i + 1).text) != Sense::LessEqual) fail(at(i + 1), "expected <=");
      lo = v;
      const std::string name = at(i + 2).text;
      std::size_t next = i + 3;
      if (next < bounds_.size() && is_sense(bounds_[next].text)) {
        if (!parse_number(at(next + 1).text, hi)) fail(at(next + 1), "expected upper bound");
        next += 2;
      }
      declare(name, lo, hi);
      return next;
    }
    const std::string name = at(i).text;
    if (i + 1 < bounds_.size() && lower(bounds_[i + 1].text) == "free") {
      declare(name, -kInf, kInf);
      return i + 2;
    }
    const Sense s = to_sense(at(i + 1).text);
    if (!parse_number(at(i + 2).text, v)) fail(at(i + 2), "expected bound value");
    if (s == Sense::LessEqual) hi = v;
    else if (s == Sense::GreaterEqual) lo = v;
    else lo = hi = v;
    declare(name, lo, hi);
    return i + 3;
  }

  void declare(const std::string& name, double lo, double hi) {
    if (!declared_.emplace(name, vars_.size()).second) {
      throw LpFormatError("variable " + name + " bounded twice");
    }
    vars_.push_back({name, VarKind::Continuous, lo, hi});
  }

  void read_terms(const MilpModel& model, const std::vector<LpToken>& toks, std::size_t& i, std::vector<Term>& out,
                  bool until_sense) {
    double sign = 1.0;
    double coeff = 1.0;
    bool have_coeff = false;
    while (i < toks.size()) {
      const auto& t = toks[i];
      if (until_sense && is_sense(t.text)) break;
      if (t.text == "+" || t.text == "-") {
        sign = t.text == "-" ? -1.0 : 1.0;
        ++i;
        continue;
      }
      double v;
      if (parse_number(t.text, v)) {
        coeff = v;
        have_coeff = true;
        ++i;
        continue;
      }
      const auto id = model.find(t.text);
      if (!id) fail(t, "unknown variable");
      out.push_back({*id, sign * (have_coeff ? coeff : 1.0)});
      sign = 1.0;
      coeff = 1.0;
      have_coeff = false;
      ++i;
    }
    if (have_coeff) {
      // bare "0" placeholder for an empty row
      if (coeff != 0.0) fail(toks[i - 1], "dangling coefficient");
    }
  }

  std::vector<LpToken> tokens_;
  std::vector<LpToken> objective_, rows_, bounds_, binaries_;
  std::vector<Variable> vars_;
  std::unordered_map<std::string, std::size_t> declared_;
};

}  // namespace detail

inline MilpModel read_lp(std::istream& in) { return detail::LpReader(in).read(); }

inline MilpModel read_lp_string(const std::string& text) {
  std::istringstream in(text);
  return read_lp(in);
}

inline MilpModel read_lp_file(const std::string& path) {
  std::ifstream file(path, std::ios::binary);
  if (!file) throw std::runtime_error("cannot open " + path + " for reading");
  try {
    return read_lp(file);
  } catch (const LpFormatError& e) {
    throw LpFormatError(path + ": " + e.what());
  }
}

}  // namespace lidarconf
