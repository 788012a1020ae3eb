// Copyright 2025 The memplan Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "memplan/lp_format.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>
#include <tuple>
#include <unordered_set>

#include "memplan/errors.hpp"

namespace memplan {

namespace {

std::string sanitize(const std::string& name) {
  std::string out;
  out.reserve(name.size());
  for (char c : name)
    out.push_back(std::isalnum(static_cast<unsigned char>(c)) ? c : '_');
  return out;
}

std::string trim(const std::string& line) {
  size_t b = line.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  size_t e = line.find_last_not_of(" \t\r");
  return line.substr(b, e - b + 1);
}

std::vector<std::string> split_tokens(const std::string& line) {
  std::vector<std::string> tokens;
  std::istringstream in(line);
  std::string tok;
  while (in >> tok) tokens.push_back(tok);
  return tokens;
}

bool parse_int(const std::string& tok, std::int64_t* value) {
  if (tok.empty()) return false;
  size_t i = (tok[0] == '+' || tok[0] == '-') ? 1 : 0;
  if (i == tok.size()) return false;
  for (size_t k = i; k < tok.size(); ++k)
    if (!std::isdigit(static_cast<unsigned char>(tok[k]))) return false;
  *value = std::stoll(tok);
  return true;
}

// Row names are c<index>_<tag>; the index exists only to keep names unique.
std::string tag_of_row_name(const std::string& name) {
  if (name.size() < 2 || name[0] != 'c') return name;
  size_t i = 1;
  while (i < name.size() && std::isdigit(static_cast<unsigned char>(name[i])))
    ++i;
  if (i == 1 || i >= name.size() || name[i] != '_') return name;
  return name.substr(i + 1);
}

}  // namespace

LpNames lp_names(const MilpModel& model) {
  LpNames names;
  names.by_var.reserve(model.vars.size());
  for (size_t v = 0; v < model.vars.size(); ++v) {
    std::string base = sanitize(model.vars[v].name);
    std::string candidate = base;
    for (int suffix = 2; names.to_var.count(candidate); ++suffix)
      candidate = base + "_" + std::to_string(suffix);
    names.to_var[candidate] = static_cast<int>(v);
    names.by_var.push_back(std::move(candidate));
  }
  return names;
}

std::string write_lp(const MilpModel& model) {
  if (model.objective < 0 ||
      model.objective >= static_cast<int>(model.vars.size()))
    throw Error("model has no objective variable");
  const LpNames names = lp_names(model);
  std::ostringstream out;
  out << "Minimize\n obj: " << names.by_var[model.objective] << "\n";
  out << "Subject To\n";
  for (size_t i = 0; i < model.constraints.size(); ++i) {
    const LinearConstraint& row = model.constraints[i];
    out << " c" << i << "_" << row.tag << ":";
    for (const LinearTerm& term : row.terms) {
      out << (term.coef < 0 ? " -" : " +") << std::abs(term.coef) << " "
          << names.by_var[term.var];
    }
    out << " " << to_string(row.rel) << " " << row.rhs << "\n";
  }
  out << "Bounds\n";
  for (size_t v = 0; v < model.vars.size(); ++v) {
    if (model.vars[v].kind != VarKind::kInteger) continue;
    out << " " << model.vars[v].lo << " <= " << names.by_var[v]
        << " <= " << model.vars[v].hi << "\n";
  }
  out << "Generals\n";
  for (size_t v = 0; v < model.vars.size(); ++v)
    if (model.vars[v].kind == VarKind::kInteger)
      out << " " << names.by_var[v] << "\n";
  out << "Binaries\n";
  for (size_t v = 0; v < model.vars.size(); ++v)
    if (model.vars[v].kind == VarKind::kBinary)
      out << " " << names.by_var[v] << "\n";
  out << "End\n";
  return out.str();
}

MilpModel parse_lp(const std::string& text) {
  enum class Section {
    kNone,
    kMinimize,
    kRows,
    kBounds,
    kGenerals,
    kBinaries,
    kEnd
  };
  struct RawRow {
    std::string tag;
    std::vector<std::pair<std::int64_t, std::string>> terms;
    Relation rel = Relation::kLe;
    std::int64_t rhs = 0;
  };
  struct RawBounds {
    std::int64_t lo = 0;
    std::int64_t hi = 0;
  };

  Section section = Section::kNone;
  std::string objective_name;
  std::vector<RawRow> rows;
  std::map<std::string, RawBounds> bounds;
  std::vector<std::string> generals;
  std::vector<std::string> binaries;

  std::istringstream in(text);
  std::string raw_line;
  while (std::getline(in, raw_line)) {
    const std::string line = trim(raw_line);
    if (line.empty()) continue;
    if (line == "Minimize") {
      section = Section::kMinimize;
      continue;
    }
    if (line == "Subject To") {
      section = Section::kRows;
      continue;
    }
    if (line == "Bounds") {
      section = Section::kBounds;
      continue;
    }
    if (line == "Generals") {
      section = Section::kGenerals;
      continue;
    }
    if (line == "Binaries") {
      section = Section::kBinaries;
      continue;
    }
    if (line == "End") {
      section = Section::kEnd;
      continue;
    }
    const std::vector<std::string> tokens = split_tokens(line);
    switch (section) {
      case Section::kMinimize: {
        if (tokens.size() != 2 || tokens[0] != "obj:")
          throw ParseError("bad objective line: " + line);
        objective_name = tokens[1];
        break;
      }
      case Section::kRows: {
        if (tokens.size() < 4 || tokens[0].back() != ':')
          throw ParseError("bad constraint row: " + line);
        RawRow row;
        row.tag = tag_of_row_name(tokens[0].substr(0, tokens[0].size() - 1));
        size_t i = 1;
        while (i < tokens.size()) {
          if (tokens[i] == "<=" || tokens[i] == ">=" || tokens[i] == "=") {
            row.rel = tokens[i] == "<=" ? Relation::kLe
                      : tokens[i] == ">=" ? Relation::kGe
                                          : Relation::kEq;
            if (i + 1 != tokens.size() - 1 ||
                !parse_int(tokens[i + 1], &row.rhs))
              throw ParseError("bad right-hand side in row: " + line);
            i += 2;
            break;
          }
          std::int64_t coef = 0;
          if (i + 1 >= tokens.size() || !parse_int(tokens[i], &coef))
            throw ParseError("bad term in row: " + line);
          row.terms.emplace_back(coef, tokens[i + 1]);
          i += 2;
        }
        if (i != tokens.size() || row.terms.empty())
          throw ParseError("bad constraint row: " + line);
        rows.push_back(std::move(row));
        break;
      }
      case Section::kBounds: {
        std::int64_t lo = 0;
        std::int64_t hi = 0;
        if (tokens.size() != 5 || tokens[1] != "<=" || tokens[3] != "<=" ||
            !parse_int(tokens[0], &lo) || !parse_int(tokens[4], &hi))
          throw ParseError("bad bounds line: " + line);
        bounds[tokens[2]] = {lo, hi};
        break;
      }
      case Section::kGenerals: {
        if (tokens.size() != 1)
          throw ParseError("bad variable declaration: " + line);
        generals.push_back(tokens[0]);
        break;
      }
      case Section::kBinaries: {
        if (tokens.size() != 1)
          throw ParseError("bad variable declaration: " + line);
        binaries.push_back(tokens[0]);
        break;
      }
      case Section::kNone:
      case Section::kEnd:
        throw ParseError("content outside any section: " + line);
    }
  }

  MilpModel model;
  std::unordered_set<std::string> seen;
  for (const std::string& name : generals) {
    if (!seen.insert(name).second)
      throw ParseError("variable declared twice: " + name);
    auto it = bounds.find(name);
    RawBounds b =
        it != bounds.end() ? it->second : RawBounds{0, std::int64_t{1} << 62};
    model.add_variable(name, VarKind::kInteger, b.lo, b.hi);
  }
  for (const std::string& name : binaries) {
    if (!seen.insert(name).second)
      throw ParseError("variable declared twice: " + name);
    model.add_variable(name, VarKind::kBinary, 0, 1);
  }
  for (const RawRow& raw : rows) {
    LinearConstraint row;
    row.tag = raw.tag;
    row.rel = raw.rel;
    row.rhs = raw.rhs;
    for (const auto& [coef, name] : raw.terms) {
      int var = model.var_index(name);
      if (var < 0)
        throw ParseError("row references undeclared variable " + name);
      row.terms.push_back({coef, var});
    }
    ++model.constraint_counts[row.tag];
    model.constraints.push_back(std::move(row));
  }
  if (objective_name.empty()) throw ParseError("missing objective");
  model.objective = model.var_index(objective_name);
  if (model.objective < 0)
    throw ParseError("objective references undeclared variable " +
                     objective_name);
  return model;
}

namespace {

struct CanonicalRow {
  std::string tag;
  Relation rel;
  std::int64_t rhs;
  std::vector<std::pair<std::string, std::int64_t>> terms;

  bool operator<(const CanonicalRow& o) const {
    return std::tie(tag, rel, rhs, terms) <
           std::tie(o.tag, o.rel, o.rhs, o.terms);
  }
  bool operator==(const CanonicalRow& o) const {
    return std::tie(tag, rel, rhs, terms) ==
           std::tie(o.tag, o.rel, o.rhs, o.terms);
  }
};

std::vector<CanonicalRow> canonical_rows(const MilpModel& model,
                                         const LpNames& names) {
  std::vector<CanonicalRow> rows;
  rows.reserve(model.constraints.size());
  for (const LinearConstraint& row : model.constraints) {
    CanonicalRow c{row.tag, row.rel, row.rhs, {}};
    for (const LinearTerm& term : row.terms)
      c.terms.emplace_back(names.by_var[term.var], term.coef);
    std::sort(c.terms.begin(), c.terms.end());
    rows.push_back(std::move(c));
  }
  std::sort(rows.begin(), rows.end());
  return rows;
}

}  // namespace

bool models_isomorphic(const MilpModel& a, const MilpModel& b) {
  const LpNames names_a = lp_names(a);
  const LpNames names_b = lp_names(b);
  std::map<std::string, std::tuple<VarKind, std::int64_t, std::int64_t>>
      vars_a, vars_b;
  for (size_t v = 0; v < a.vars.size(); ++v)
    vars_a[names_a.by_var[v]] = {a.vars[v].kind, a.vars[v].lo, a.vars[v].hi};
  for (size_t v = 0; v < b.vars.size(); ++v)
    vars_b[names_b.by_var[v]] = {b.vars[v].kind, b.vars[v].lo, b.vars[v].hi};
  if (vars_a != vars_b) return false;
  if (a.objective < 0 || b.objective < 0) return a.objective == b.objective;
  if (names_a.by_var[a.objective] != names_b.by_var[b.objective])
    return false;
  return canonical_rows(a, names_a) == canonical_rows(b, names_b);
}

}  // namespace memplan
