#include "ura/config.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

namespace ura {

using nlohmann::json;

namespace {

int64_t require_int(const json& v, const std::string& key) {
  if (!v.is_number_integer() && !v.is_number_unsigned())
    throw ConfigError("key '" + key + "' must be an integer");
  return v.get<int64_t>();
}

uint64_t require_uint(const json& v, const std::string& key) {
  if (v.is_number_unsigned()) return v.get<uint64_t>();
  if (v.is_number_integer()) {
    int64_t s = v.get<int64_t>();
    if (s < 0) throw ConfigError("key '" + key + "' must be nonnegative");
    return static_cast<uint64_t>(s);
  }
  throw ConfigError("key '" + key + "' must be an integer");
}

double require_num(const json& v, const std::string& key) {
  if (!v.is_number()) throw ConfigError("key '" + key + "' must be a number");
  return v.get<double>();
}

bool require_bool(const json& v, const std::string& key) {
  if (!v.is_boolean()) throw ConfigError("key '" + key + "' must be a boolean");
  return v.get<bool>();
}

std::string require_str(const json& v, const std::string& key) {
  if (!v.is_string()) throw ConfigError("key '" + key + "' must be a string");
  return v.get<std::string>();
}

template <typename T>
std::vector<T> require_array(const json& v, const std::string& key) {
  if (!v.is_array()) throw ConfigError("key '" + key + "' must be an array");
  std::vector<T> out;
  for (const auto& e : v) {
    if (!e.is_number())
      throw ConfigError("array '" + key + "' must hold numbers");
    out.push_back(e.get<T>());
  }
  return out;
}

void parse_harness(const json& v, HarnessOptions& h) {
  if (!v.is_object()) throw ConfigError("'harness' must be a table");
  for (const auto& [key, value] : v.items()) {
    if (key == "trials") {
      h.trials = require_int(value, key);
    } else if (key == "parallelism") {
      h.parallelism = static_cast<int>(require_int(value, key));
    } else if (key == "fresh_dict_per_trial") {
      h.fresh_dict_per_trial = require_bool(value, key);
    } else if (key == "support_threshold") {
      h.support_threshold = require_num(value, key);
    } else if (key == "allocation") {
      std::string s = require_str(value, key);
      if (s == "uniform_tail") {
        h.allocation = ParityAllocation::uniform_tail;
      } else if (s == "geometric") {
        h.allocation = ParityAllocation::geometric;
      } else {
        throw ConfigError("unknown allocation '" + s + "'");
      }
    } else if (key == "list_cap") {
      h.list_cap = require_int(value, key);
    } else if (key == "out_dir") {
      h.out_dir = require_str(value, key);
    } else if (key == "format") {
      h.format = require_str(value, key);
      if (h.format != "csv" && h.format != "json")
        throw ConfigError("format must be 'csv' or 'json'");
    } else {
      throw ConfigError("unknown harness key: " + key);
    }
  }
  if (h.trials < 1) throw ConfigError("trials must be at least 1");
  if (h.parallelism < 1) throw ConfigError("parallelism must be at least 1");
  if (!(h.support_threshold > 0.0 && h.support_threshold < 1.0))
    throw ConfigError("support_threshold must be in (0,1)");
  if (h.list_cap < 1) throw ConfigError("list_cap must be at least 1");
}

void parse_sweep(const json& v, SweepSpec& s) {
  if (!v.is_object()) throw ConfigError("'sweep' must be a table");
  for (const auto& [key, value] : v.items()) {
    if (key == "eb_n0_db") {
      s.eb_n0_db = require_array<double>(value, key);
    } else if (key == "K_a") {
      s.K_a = require_array<int64_t>(value, key);
    } else if (key == "J") {
      s.J = require_array<int>(value, key);
    } else if (key == "L") {
      s.L = require_array<int64_t>(value, key);
    } else if (key == "n") {
      s.n = require_array<int64_t>(value, key);
    } else if (key == "r_out") {
      s.r_out = require_array<double>(value, key);
    } else {
      throw ConfigError("unknown sweep key: " + key);
    }
  }
}

void throw_on_violations(const SystemConfig& config, const std::string& where) {
  auto violations = validate_config(config);
  if (violations.empty()) return;
  std::string msg = where.empty() ? "invalid config:" : where + ":";
  for (const auto& v : violations) msg += " [" + v.field + "] " + v.message + ";";
  throw ConfigError(msg);
}

LoadedConfig from_json_doc(const json& doc) {
  if (!doc.is_object()) throw ConfigError("config root must be an object");
  LoadedConfig lc;
  bool has_p = false;
  for (const auto& [key, value] : doc.items()) {
    if (key == "K_a") {
      lc.system.K_a = require_int(value, key);
    } else if (key == "n") {
      lc.system.n = require_int(value, key);
    } else if (key == "L") {
      lc.system.L = require_int(value, key);
    } else if (key == "J") {
      lc.system.J = static_cast<int>(require_int(value, key));
    } else if (key == "B") {
      lc.system.B = require_int(value, key);
    } else if (key == "N0_half") {
      lc.system.N0_half = require_num(value, key);
    } else if (key == "P") {
      lc.system.P = require_num(value, key);
      has_p = true;
    } else if (key == "eb_n0_db") {
      lc.eb_n0_db = require_num(value, key);
      lc.has_eb_n0_db = true;
    } else if (key == "master_seed") {
      lc.system.master_seed = require_uint(value, key);
    } else if (key == "harness") {
      parse_harness(value, lc.harness);
    } else if (key == "sweep") {
      parse_sweep(value, lc.sweep);
    } else {
      throw ConfigError("unknown key: " + key);
    }
  }
  if (has_p && lc.has_eb_n0_db)
    throw ConfigError("give either P or eb_n0_db, not both");
  if (lc.has_eb_n0_db) {
    lc.system.P = power_from_eb_n0_db(lc.eb_n0_db, lc.system.n, lc.system.B,
                                      lc.system.N0_half);
  }
  throw_on_violations(lc.system, "");
  return lc;
}

// --- minimal flat TOML subset -----------------------------------------------
// Supports: comments (#), [harness] / [sweep] section headers, and
// key = value lines with integer, float, boolean, quoted-string, or
// flat numeric-array values.  That covers every documented config key.

std::string strip_comment(const std::string& line) {
  bool in_str = false;
  for (size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (c == '"') in_str = !in_str;
    if (c == '#' && !in_str) return line.substr(0, i);
  }
  return line;
}

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

json toml_scalar(const std::string& text, int lineno) {
  std::string t = trim(text);
  if (t.empty())
    throw ConfigError("line " + std::to_string(lineno) + ": missing value");
  if (t.front() == '"') {
    if (t.size() < 2 || t.back() != '"')
      throw ConfigError("line " + std::to_string(lineno) +
                        ": unterminated string");
    return json(t.substr(1, t.size() - 2));
  }
  if (t == "true") return json(true);
  if (t == "false") return json(false);
  if (t.find_first_of(".eE") != std::string::npos &&
      t.find_first_not_of("+-0123456789.eE") == std::string::npos) {
    char* end = nullptr;
    double d = std::strtod(t.c_str(), &end);
    if (end != t.c_str() + t.size())
      throw ConfigError("line " + std::to_string(lineno) + ": bad number '" +
                        t + "'");
    return json(d);
  }
  if (t.find_first_not_of("+-0123456789") == std::string::npos) {
    char* end = nullptr;
    if (t.front() != '-') {
      uint64_t u = std::strtoull(t.c_str(), &end, 10);
      if (end == t.c_str() + t.size()) return json(u);
    }
    long long v = std::strtoll(t.c_str(), &end, 10);
    if (end == t.c_str() + t.size()) return json(v);
  }
  throw ConfigError("line " + std::to_string(lineno) + ": bad value '" + t +
                    "'");
}

json toml_value(const std::string& text, int lineno) {
  std::string t = trim(text);
  if (!t.empty() && t.front() == '[') {
    if (t.back() != ']')
      throw ConfigError("line " + std::to_string(lineno) +
                        ": unterminated array");
    json arr = json::array();
    std::string body = t.substr(1, t.size() - 2);
    std::stringstream ss(body);
    std::string item;
    while (std::getline(ss, item, ',')) {
      if (trim(item).empty()) continue;
      arr.push_back(toml_scalar(item, lineno));
    }
    return arr;
  }
  return toml_scalar(t, lineno);
}

json toml_to_json(const std::string& text) {
  json doc = json::object();
  json* section = &doc;
  std::istringstream in(text);
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    std::string line = trim(strip_comment(raw));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError("line " + std::to_string(lineno) +
                          ": malformed section header");
      std::string name = trim(line.substr(1, line.size() - 2));
      if (name != "harness" && name != "sweep")
        throw ConfigError("unknown section: " + name);
      doc[name] = json::object();
      section = &doc[name];
      continue;
    }
    size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    std::string key = trim(line.substr(0, eq));
    if (key.empty())
      throw ConfigError("line " + std::to_string(lineno) + ": empty key");
    if (section->contains(key))
      throw ConfigError("duplicate key: " + key);
    (*section)[key] = toml_value(line.substr(eq + 1), lineno);
  }
  return doc;
}

}  // namespace

LoadedConfig parse_config_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("JSON parse error: ") + e.what());
  }
  return from_json_doc(doc);
}

LoadedConfig parse_config_toml(const std::string& text) {
  return from_json_doc(toml_to_json(text));
}

LoadedConfig load_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  std::string text = buf.str();
  if (path.size() >= 5 && path.compare(path.size() - 5, 5, ".json") == 0)
    return parse_config_json(text);
  if (path.size() >= 5 && path.compare(path.size() - 5, 5, ".toml") == 0)
    return parse_config_toml(text);
  size_t first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{')
    return parse_config_json(text);
  return parse_config_toml(text);
}

double power_from_eb_n0_db(double eb_n0_db, int64_t n, int64_t B,
                           double N0_half) {
  double lin = std::pow(10.0, eb_n0_db / 10.0);
  return lin * static_cast<double>(B) * 2.0 * N0_half /
         static_cast<double>(n);
}

double eb_n0_db_from_power(const SystemConfig& config) {
  double lin = static_cast<double>(config.n) * config.P /
               (static_cast<double>(config.B) * 2.0 * config.N0_half);
  return 10.0 * std::log10(lin);
}

std::vector<CellSpec> expand_sweep(const LoadedConfig& loaded) {
  const SweepSpec& s = loaded.sweep;
  auto axis_len = [](size_t n) { return n == 0 ? size_t{1} : n; };
  size_t n_db = axis_len(s.eb_n0_db.size());
  size_t n_ka = axis_len(s.K_a.size());
  size_t n_j = axis_len(s.J.size());
  size_t n_l = axis_len(s.L.size());
  size_t n_n = axis_len(s.n.size());
  size_t n_r = axis_len(s.r_out.size());

  std::vector<CellSpec> cells;
  cells.reserve(n_db * n_ka * n_j * n_l * n_n * n_r);
  size_t cell_id = 0;
  for (size_t i_db = 0; i_db < n_db; ++i_db)
    for (size_t i_ka = 0; i_ka < n_ka; ++i_ka)
      for (size_t i_j = 0; i_j < n_j; ++i_j)
        for (size_t i_l = 0; i_l < n_l; ++i_l)
          for (size_t i_n = 0; i_n < n_n; ++i_n)
            for (size_t i_r = 0; i_r < n_r; ++i_r, ++cell_id) {
              CellSpec cell;
              cell.config = loaded.system;
              if (!s.K_a.empty()) cell.config.K_a = s.K_a[i_ka];
              if (!s.J.empty()) cell.config.J = s.J[i_j];
              if (!s.L.empty()) cell.config.L = s.L[i_l];
              if (!s.n.empty()) cell.config.n = s.n[i_n];
              if (!s.r_out.empty()) {
                double b = s.r_out[i_r] *
                           static_cast<double>(cell.config.L) * cell.config.J;
                cell.config.B = std::max<int64_t>(1, std::llround(b));
              }
              bool db_given = !s.eb_n0_db.empty() || loaded.has_eb_n0_db;
              if (db_given) {
                double db = !s.eb_n0_db.empty() ? s.eb_n0_db[i_db]
                                                : loaded.eb_n0_db;
                cell.config.P = power_from_eb_n0_db(
                    db, cell.config.n, cell.config.B, cell.config.N0_half);
              }
              throw_on_violations(cell.config,
                                  "sweep cell " + std::to_string(cell_id));
              cell.eb_n0_db = eb_n0_db_from_power(cell.config);
              cells.push_back(std::move(cell));
            }
  return cells;
}

}  // namespace ura
