// Copyright 2026 The optpop Authors
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

#include "optpop_cli/scenario_file.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <vector>

#include "optpop/errors.hpp"
#include "optpop_cli/text_format.hpp"

namespace optpop::cli {

namespace {

struct Value {
  std::string text;
  bool quoted = false;
  int line = 0;
};

using Section = std::map<std::string, Value>;

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void fail(const std::string& origin, int line, const std::string& what) {
  std::ostringstream msg;
  msg << origin;
  if (line > 0) msg << ':' << line;
  msg << ": " << what;
  throw ConfigError(msg.str());
}

std::map<std::string, Section> tokenize(std::string_view text, const std::string& origin) {
  std::map<std::string, Section> doc;
  std::string section;
  doc[section];
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto eol = text.find('\n', pos);
    std::string_view raw = text.substr(pos, eol == std::string_view::npos ? text.size() - pos : eol - pos);
    pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
    ++line_no;

    // Strip a trailing comment, ignoring '#' inside a quoted string.
    bool in_string = false;
    for (std::size_t i = 0; i < raw.size(); ++i) {
      if (raw[i] == '"') in_string = !in_string;
      if (raw[i] == '#' && !in_string) {
        raw = raw.substr(0, i);
        break;
      }
    }
    const auto line = trim(raw);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') fail(origin, line_no, "malformed section header");
      section = std::string(trim(line.substr(1, line.size() - 2)));
      if (section.empty()) fail(origin, line_no, "empty section name");
      if (doc.count(section)) fail(origin, line_no, "duplicate section [" + section + "]");
      doc[section];
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) fail(origin, line_no, "expected key = value");
    const std::string key(trim(line.substr(0, eq)));
    auto value = trim(line.substr(eq + 1));
    if (key.empty()) fail(origin, line_no, "missing key");
    if (value.empty()) fail(origin, line_no, "missing value for '" + key + "'");
    Value v;
    v.line = line_no;
    if (value.front() == '"') {
      if (value.size() < 2 || value.back() != '"') fail(origin, line_no, "unterminated string for '" + key + "'");
      v.text = std::string(value.substr(1, value.size() - 2));
      v.quoted = true;
    } else {
      v.text = std::string(value);
    }
    auto& sec = doc[section];
    if (sec.count(key)) fail(origin, line_no, "duplicate key '" + key + "'");
    sec[key] = std::move(v);
  }
  return doc;
}

double as_double(const Value& v, const std::string& key, const std::string& origin) {
  if (v.quoted) fail(origin, v.line, "'" + key + "' must be a number");
  double out = 0.0;
  const char* end = v.text.data() + v.text.size();
  const auto [ptr, ec] = std::from_chars(v.text.data(), end, out);
  if (ec != std::errc() || ptr != end) fail(origin, v.line, "'" + key + "' is not a number: " + v.text);
  return out;
}

long long as_integer(const Value& v, const std::string& key, const std::string& origin) {
  if (v.quoted) fail(origin, v.line, "'" + key + "' must be an integer");
  long long out = 0;
  const char* end = v.text.data() + v.text.size();
  const auto [ptr, ec] = std::from_chars(v.text.data(), end, out);
  if (ec != std::errc() || ptr != end) fail(origin, v.line, "'" + key + "' is not an integer: " + v.text);
  return out;
}

int as_int(const Value& v, const std::string& key, const std::string& origin) {
  const auto x = as_integer(v, key, origin);
  if (x < -2147483647LL || x > 2147483647LL) fail(origin, v.line, "'" + key + "' is out of range");
  return static_cast<int>(x);
}

const std::vector<std::pair<const char*, double ScenarioFields::*>>& field_table() {
  static const std::vector<std::pair<const char*, double ScenarioFields::*>> table = {
      {"alpha", &ScenarioFields::alpha}, {"beta", &ScenarioFields::beta},
      {"gamma", &ScenarioFields::gamma}, {"delta", &ScenarioFields::delta},
      {"sigma", &ScenarioFields::sigma}, {"rho", &ScenarioFields::rho},
      {"theta", &ScenarioFields::theta}, {"mu", &ScenarioFields::mu},
      {"lambda_pop", &ScenarioFields::lambda_pop}, {"omega", &ScenarioFields::omega},
      {"R_bar", &ScenarioFields::R_bar}, {"k1", &ScenarioFields::k1},
      {"N1", &ScenarioFields::N1}, {"G1", &ScenarioFields::G1},
      {"H1", &ScenarioFields::H1},
  };
  return table;
}

void reject_unknown(const Section& sec, const std::set<std::string>& allowed, const std::string& where,
                    const std::string& origin) {
  for (const auto& [key, v] : sec) {
    if (!allowed.count(key)) fail(origin, v.line, "unknown key '" + key + "'" + where);
  }
}

}  // namespace

ScenarioFile parse_scenario(std::string_view text, const std::string& origin) {
  auto doc = tokenize(text, origin);
  for (const auto& [name, sec] : doc) {
    if (name.empty() || name == "solver" || name == "sweep" || name == "steady_state") continue;
    const int line = sec.empty() ? 0 : sec.begin()->second.line;
    fail(origin, line, "unknown section [" + name + "]");
  }

  ScenarioFile file;
  const auto& root = doc[""];
  std::set<std::string> allowed{"id"};
  for (const auto& [key, member] : field_table()) allowed.insert(key);
  reject_unknown(root, allowed, "", origin);

  std::vector<std::string> missing;
  if (auto it = root.find("id"); it != root.end()) {
    if (!it->second.quoted) fail(origin, it->second.line, "'id' must be a quoted string");
    file.id = it->second.text;
    if (file.id.empty()) fail(origin, it->second.line, "'id' must not be empty");
  } else {
    missing.push_back("id");
  }
  for (const auto& [key, member] : field_table()) {
    const auto it = root.find(key);
    if (it == root.end()) {
      missing.push_back(key);
      continue;
    }
    file.fields.*member = as_double(it->second, key, origin);
  }
  if (!missing.empty()) {
    std::string list;
    for (const auto& k : missing) list += (list.empty() ? "" : ", ") + k;
    fail(origin, 0, "missing keys: " + list);
  }
  try {
    (void)ScenarioParams(file.fields);
  } catch (const ConfigError& e) {
    fail(origin, 0, e.what());
  }

  if (auto it = doc.find("solver"); it != doc.end()) {
    const auto& sec = it->second;
    reject_unknown(sec,
                   {"max_outer_iterations", "max_inner_iterations", "initial_penalty", "penalty_growth",
                    "penalty_cap", "equality_tolerance", "stationarity_tolerance", "multistart_count", "seed",
                    "workers"},
                   " in [solver]", origin);
    auto& s = file.solver;
    for (const auto& [key, v] : sec) {
      if (key == "max_outer_iterations") s.max_outer_iterations = as_int(v, key, origin);
      else if (key == "max_inner_iterations") s.max_inner_iterations = as_int(v, key, origin);
      else if (key == "initial_penalty") s.initial_penalty = as_double(v, key, origin);
      else if (key == "penalty_growth") s.penalty_growth = as_double(v, key, origin);
      else if (key == "penalty_cap") s.penalty_cap = as_double(v, key, origin);
      else if (key == "equality_tolerance") s.equality_tolerance = as_double(v, key, origin);
      else if (key == "stationarity_tolerance") s.stationarity_tolerance = as_double(v, key, origin);
      else if (key == "multistart_count") s.multistart_count = as_int(v, key, origin);
      else if (key == "workers") s.workers = as_int(v, key, origin);
      else if (key == "seed") {
        const auto seed = as_integer(v, key, origin);
        if (seed < 0) fail(origin, v.line, "'seed' must be non-negative");
        s.seed = static_cast<std::uint64_t>(seed);
      }
    }
    try {
      s.validate();
    } catch (const ConfigError& e) {
      fail(origin, 0, e.what());
    }
  }

  if (auto it = doc.find("sweep"); it != doc.end()) {
    const auto& sec = it->second;
    reject_unknown(sec, {"t_min", "t_max", "step", "refine"}, " in [sweep]", origin);
    SweepRange r;
    for (const auto& [key, v] : sec) {
      if (key == "t_min") r.t_min = as_int(v, key, origin);
      else if (key == "t_max") r.t_max = as_int(v, key, origin);
      else if (key == "step") r.step = as_int(v, key, origin);
      else if (key == "refine") r.refine = as_int(v, key, origin);
    }
    if (r.t_min < 2 || r.t_max < r.t_min || r.step < 1 || r.refine < -1) fail(origin, 0, "invalid [sweep] range");
    file.sweep = r;
  }

  if (auto it = doc.find("steady_state"); it != doc.end()) {
    const auto& sec = it->second;
    reject_unknown(sec, {"k_min", "k_max", "points", "tolerance"}, " in [steady_state]", origin);
    auto& g = file.grid;
    for (const auto& [key, v] : sec) {
      if (key == "k_min") g.k_min = as_double(v, key, origin);
      else if (key == "k_max") g.k_max = as_double(v, key, origin);
      else if (key == "points") g.points = as_int(v, key, origin);
      else if (key == "tolerance") g.tolerance = as_double(v, key, origin);
    }
    if (!(g.k_min > 0.0 && g.k_max > g.k_min && g.points >= 3 && g.tolerance > 0.0)) {
      fail(origin, 0, "invalid [steady_state] grid");
    }
  }
  return file;
}

ScenarioFile load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open scenario file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str(), path.string());
}

std::string format_scenario(const ScenarioFile& file) {
  std::ostringstream out;
  out << "id = \"" << file.id << "\"\n";
  for (const auto& [key, member] : field_table()) out << key << " = " << format_double(file.fields.*member) << '\n';
  const auto& s = file.solver;
  out << "\n[solver]\n"
      << "max_outer_iterations = " << s.max_outer_iterations << '\n'
      << "max_inner_iterations = " << s.max_inner_iterations << '\n'
      << "initial_penalty = " << format_double(s.initial_penalty) << '\n'
      << "penalty_growth = " << format_double(s.penalty_growth) << '\n'
      << "penalty_cap = " << format_double(s.penalty_cap) << '\n'
      << "equality_tolerance = " << format_double(s.equality_tolerance) << '\n'
      << "stationarity_tolerance = " << format_double(s.stationarity_tolerance) << '\n'
      << "multistart_count = " << s.multistart_count << '\n'
      << "seed = " << s.seed << '\n'
      << "workers = " << s.workers << '\n';
  if (file.sweep) {
    out << "\n[sweep]\n"
        << "t_min = " << file.sweep->t_min << '\n'
        << "t_max = " << file.sweep->t_max << '\n'
        << "step = " << file.sweep->step << '\n'
        << "refine = " << file.sweep->refine << '\n';
  }
  out << "\n[steady_state]\n"
      << "k_min = " << format_double(file.grid.k_min) << '\n'
      << "k_max = " << format_double(file.grid.k_max) << '\n'
      << "points = " << file.grid.points << '\n'
      << "tolerance = " << format_double(file.grid.tolerance) << '\n';
  return out.str();
}

}  // namespace optpop::cli
