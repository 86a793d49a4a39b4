// Configuration schema, rate-file parsing and CSV/JSON emission.
//
// Config file (JSON):
//   {
//     "command": "frontier",
//     "model": {"alphas": [0.25, 1.0], "power": 10, "probs": [0.5, 0.5]},
//     "p": 0.5,                       // ell = 2 shorthand for probs
//     "grid": 0.02,
//     "sweep": {"name": "alpha1", "start": 0.25, "stop": 1.0, "step": 0.05},
//     "output": {"path": "out.csv", "format": "csv"},
//     "seed": 1, "trials": 200000, "count": 200,
//     "allocation": [[0.25, 0.25], [0.25, 0.25]],
//     "rates": [[0.1, 0.05], [0.05, 0.2]],
//     "outer": false, "refine": true, "strict_j2": false, "threads": 1
//   }
// Every key is optional in the file; command-line flags override it.
//
// Numbers: CSV uses 9 significant digits, JSON uses the shortest decimal
// form that reads back to the identical double.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "bamac/core.hpp"
#include "bamac/monte_carlo.hpp"
#include "bamac/simplex.hpp"

namespace bamac::io {

using nlohmann::json;

/// Input error carrying a 1-based position (0 when unknown).
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, int line, int column)
      : std::runtime_error(position(line, column) + what), line_(line), column_(column) {}
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  static std::string position(int line, int column) {
    if (line <= 0) return "";
    return "line " + std::to_string(line) + ", column " + std::to_string(column) + ": ";
  }
  int line_;
  int column_;
};

// ---------------------------------------------------------------------------
// Run configuration

inline const std::vector<std::string>& known_commands() {
  static const std::vector<std::string> c = {"region",     "baseline", "outer", "frontier", "avgrate",
                                             "multistate", "simulate", "check", "reduce-check"};
  return c;
}

struct Sweep {
  std::string name;  // "alpha1" or "p"
  double start = 0.0;
  double stop = 0.0;
  double step = 0.0;

  /// start, start + step, ... up to stop (inclusive within 1e-9).
  std::vector<double> values() const {
    std::vector<double> out;
    const long n = static_cast<long>(std::floor((stop - start) / step + 1e-9));
    for (long i = 0; i <= n; ++i) out.push_back(start + step * static_cast<double>(i));
    return out;
  }
};

/// Model for one sweep value. A weak gain equal to (or above) the strong
/// gain is evaluated at the largest double below it, since gains must be
/// strictly increasing.
inline ChannelModel sweep_model(ChannelModel m, const std::string& name, double value) {
  if (name == "alpha1") {
    if (m.ell != 2) throw std::invalid_argument("alpha1 sweep requires ell = 2");
    m.alphas[0] = value >= m.alphas[1] ? std::nextafter(m.alphas[1], 0.0) : value;
  } else if (name == "p") {
    if (m.ell != 2) throw std::invalid_argument("p sweep requires ell = 2");
    const double pw = std::clamp(value, 0.0, 1.0);
    m.probs = {pw, 1.0 - pw};
  } else {
    throw std::invalid_argument("sweep name must be alpha1 or p");
  }
  return m;
}

inline Sweep parse_sweep(const std::string& spec) {
  std::vector<std::string> parts;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ':')) parts.push_back(item);
  if (parts.size() != 4) throw std::invalid_argument("sweep must be name:start:stop:step");
  try {
    return Sweep{parts[0], std::stod(parts[1]), std::stod(parts[2]), std::stod(parts[3])};
  } catch (const std::logic_error&) {
    throw std::invalid_argument("sweep bounds must be numbers: " + spec);
  }
}

struct RunConfig {
  std::string command;
  ChannelModel model{2, {0.25, 1.0}, 10.0, {0.5, 0.5}};
  double grid = 0.02;
  std::optional<Sweep> sweep;
  std::string output_path;
  std::string output_format = "csv";
  std::uint64_t seed = 1;
  std::uint64_t trials = 200000;
  int count = 200;
  unsigned threads = 1;
  bool outer = false;
  bool refine = true;
  bool strict_j2 = false;
  std::optional<LayerMap> allocation;
  std::optional<LayerMap> rates;
  std::string rates_file;
};

inline LayerMap matrix_from_json(const json& j, const char* what) {
  if (!j.is_array() || j.empty()) throw std::invalid_argument(std::string(what) + " must be a square matrix");
  std::vector<std::vector<double>> rows;
  for (const auto& r : j) {
    if (!r.is_array() || r.size() != j.size())
      throw std::invalid_argument(std::string(what) + " must be a square matrix");
    std::vector<double> row;
    for (const auto& x : r) {
      if (!x.is_number()) throw std::invalid_argument(std::string(what) + " entries must be numbers");
      row.push_back(x.get<double>());
    }
    rows.push_back(std::move(row));
  }
  return LayerMap::from_rows(rows);
}

inline json matrix_to_json(const LayerMap& m) { return json(m.rows()); }

inline json model_to_json(const ChannelModel& m) {
  return json{{"ell", m.ell}, {"alphas", m.alphas}, {"power", m.power}, {"probs", m.probs}};
}

inline ChannelModel model_from_json(const json& j) {
  ChannelModel m;
  if (!j.contains("alphas") || !j.contains("power"))
    throw std::invalid_argument("model needs alphas and power");
  m.alphas = j.at("alphas").get<std::vector<double>>();
  m.power = j.at("power").get<double>();
  m.ell = static_cast<int>(m.alphas.size());
  if (j.contains("probs")) m.probs = j.at("probs").get<std::vector<double>>();
  else m.probs.assign(m.alphas.size(), m.alphas.empty() ? 0.0 : 1.0 / m.alphas.size());
  if (j.contains("ell") && j.at("ell").get<int>() != m.ell)
    throw std::invalid_argument("model.ell disagrees with the number of alphas");
  return m;
}

/// Applies the keys present in j on top of cfg.
inline void apply_json(RunConfig& cfg, const json& j) {
  if (!j.is_object()) throw std::invalid_argument("config must be a JSON object");
  try {
    if (j.contains("command")) cfg.command = j.at("command").get<std::string>();
    if (j.contains("model")) cfg.model = model_from_json(j.at("model"));
    if (j.contains("p")) {
      const double p = j.at("p").get<double>();
      cfg.model.probs = {p, 1.0 - p};
    }
    if (j.contains("grid")) cfg.grid = j.at("grid").get<double>();
    if (j.contains("sweep")) {
      const auto& s = j.at("sweep");
      cfg.sweep = Sweep{s.at("name").get<std::string>(), s.at("start").get<double>(),
                        s.at("stop").get<double>(), s.at("step").get<double>()};
    }
    if (j.contains("output")) {
      const auto& o = j.at("output");
      if (o.contains("path")) cfg.output_path = o.at("path").get<std::string>();
      if (o.contains("format")) cfg.output_format = o.at("format").get<std::string>();
    }
    if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("trials")) cfg.trials = j.at("trials").get<std::uint64_t>();
    if (j.contains("count")) cfg.count = j.at("count").get<int>();
    if (j.contains("threads")) cfg.threads = j.at("threads").get<unsigned>();
    if (j.contains("outer")) cfg.outer = j.at("outer").get<bool>();
    if (j.contains("refine")) cfg.refine = j.at("refine").get<bool>();
    if (j.contains("strict_j2")) cfg.strict_j2 = j.at("strict_j2").get<bool>();
    if (j.contains("allocation")) cfg.allocation = matrix_from_json(j.at("allocation"), "allocation");
    if (j.contains("rates")) cfg.rates = matrix_from_json(j.at("rates"), "rates");
    if (j.contains("rates_file")) cfg.rates_file = j.at("rates_file").get<std::string>();
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("config: ") + e.what());
  }
}

namespace detail {

inline std::pair<int, int> line_col(const std::string& text, std::size_t offset) {
  int line = 1, col = 1;
  for (std::size_t i = 0; i < offset && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

inline json parse_json_text(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    const auto [l, c] = line_col(text, e.byte > 0 ? e.byte - 1 : 0);
    throw ParseError("invalid JSON", l, c);
  }
}

}  // namespace detail

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline RunConfig load_config(const std::string& path) {
  RunConfig cfg;
  apply_json(cfg, detail::parse_json_text(read_file(path)));
  return cfg;
}

/// Command-specific checks.
inline void validate_config(const RunConfig& cfg) {
  const auto& cmds = known_commands();
  if (std::find(cmds.begin(), cmds.end(), cfg.command) == cmds.end())
    throw std::invalid_argument("unknown command '" + cfg.command + "'");
  require_valid(cfg.model);
  if (cfg.output_format != "csv" && cfg.output_format != "json")
    throw std::invalid_argument("output format must be csv or json");
  simplex_steps(cfg.grid);
  if (cfg.sweep) {
    const Sweep& s = *cfg.sweep;
    if (s.name != "alpha1" && s.name != "p") throw std::invalid_argument("sweep name must be alpha1 or p");
    if (!(s.step > 0.0)) throw std::invalid_argument("sweep step must be > 0");
    if (!(s.start <= s.stop)) throw std::invalid_argument("sweep bounds must be ordered");
  }
  const bool needs_two = cfg.command == "region" || cfg.command == "baseline" || cfg.command == "outer" ||
                         cfg.command == "frontier" || cfg.command == "avgrate" ||
                         cfg.command == "reduce-check";
  if (needs_two && cfg.model.ell != 2) throw std::invalid_argument(cfg.command + " requires ell = 2");
  if (cfg.command == "simulate" && cfg.trials == 0) throw std::invalid_argument("trials must be >= 1");
  if (cfg.command == "reduce-check" && cfg.count < 1) throw std::invalid_argument("count must be >= 1");
}

inline json config_to_json(const RunConfig& cfg) {
  json j{{"command", cfg.command},
         {"model", model_to_json(cfg.model)},
         {"grid", cfg.grid},
         {"output", {{"path", cfg.output_path}, {"format", cfg.output_format}}},
         {"seed", cfg.seed},
         {"trials", cfg.trials},
         {"count", cfg.count},
         {"threads", cfg.threads},
         {"outer", cfg.outer},
         {"refine", cfg.refine},
         {"strict_j2", cfg.strict_j2}};
  if (cfg.sweep)
    j["sweep"] = {{"name", cfg.sweep->name}, {"start", cfg.sweep->start}, {"stop", cfg.sweep->stop},
                  {"step", cfg.sweep->step}};
  if (cfg.allocation) j["allocation"] = matrix_to_json(*cfg.allocation);
  if (cfg.rates) j["rates"] = matrix_to_json(*cfg.rates);
  if (!cfg.rates_file.empty()) j["rates_file"] = cfg.rates_file;
  return j;
}

// ---------------------------------------------------------------------------
// Rate files: a JSON matrix ({"rates": [[...]]} or [[...]]) or plain text,
// one row per line, entries separated by spaces or commas, '#' comments.

inline RateVector parse_rates(const std::string& text) {
  std::size_t first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && (text[first] == '{' || text[first] == '[')) {
    json j = detail::parse_json_text(text);
    if (j.is_object()) {
      if (!j.contains("rates")) throw ParseError("JSON rate file needs a \"rates\" key", 1, 1);
      j = j.at("rates");
    }
    try {
      return RateVector(matrix_from_json(j, "rates"));
    } catch (const std::invalid_argument& e) {
      throw ParseError(e.what(), 1, 1);
    }
  }

  std::vector<std::vector<double>> rows;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  int first_row_line = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    std::vector<double> row;
    std::size_t i = 0;
    while (i < line.size()) {
      if (line[i] == ' ' || line[i] == '\t' || line[i] == ',' || line[i] == '\r') {
        ++i;
        continue;
      }
      std::size_t j = i;
      while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != ',' && line[j] != '\r') ++j;
      const std::string tok = line.substr(i, j - i);
      char* end = nullptr;
      const double x = std::strtod(tok.c_str(), &end);
      if (end != tok.c_str() + tok.size() || tok.empty())
        throw ParseError("not a number: '" + tok + "'", lineno, static_cast<int>(i) + 1);
      if (!(x >= 0.0)) throw ParseError("rates must be >= 0", lineno, static_cast<int>(i) + 1);
      row.push_back(x);
      i = j;
    }
    if (row.empty()) continue;
    if (rows.empty()) first_row_line = lineno;
    if (!rows.empty() && row.size() != rows.front().size())
      throw ParseError("row has " + std::to_string(row.size()) + " entries, expected " +
                           std::to_string(rows.front().size()),
                       lineno, 1);
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ParseError("no rates found", lineno > 0 ? lineno : 1, 1);
  if (rows.size() != rows.front().size())
    throw ParseError("rate matrix must be square (" + std::to_string(rows.size()) + " rows of " +
                         std::to_string(rows.front().size()) + ")",
                     first_row_line, 1);
  return RateVector(LayerMap::from_rows(rows));
}

// ---------------------------------------------------------------------------
// Emission

inline std::string csv_number(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", x);
  return buf;
}

/// Minimal CSV table with a fixed header.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

  void add_row(std::vector<std::string> cells) {
    if (cells.size() != header_.size()) throw std::logic_error("CsvTable: row width differs from header");
    rows_.push_back(std::move(cells));
  }

  std::string str() const {
    std::string out;
    auto emit = [&out](const std::vector<std::string>& r) {
      for (std::size_t i = 0; i < r.size(); ++i) {
        if (i) out += ',';
        out += r[i];
      }
      out += '\n';
    };
    emit(header_);
    for (const auto& r : rows_) emit(r);
    return out;
  }

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

/// Writes to a sibling temporary and renames it over path.
inline void atomic_write(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) {
      out.close();
      fs::remove(tmp);
      throw std::runtime_error("write failed for " + tmp.string());
    }
  }
  fs::rename(tmp, target);
}

inline json sim_report_to_json(const SimReport& r) {
  json counts = json::array();
  for (const auto& [state, n] : r.per_state_counts)
    counts.push_back({{"h2_state", state.first}, {"h1_state", state.second}, {"count", n}});
  return json{{"empirical_mean", r.empirical_mean},
              {"std_error", r.std_error},
              {"formula_value", r.formula_value},
              {"z_score", r.z_score},
              {"per_state_counts", counts},
              {"generator", r.generator},
              {"trials", r.trials},
              {"seed", r.seed}};
}

inline SimReport sim_report_from_json(const json& j) {
  SimReport r;
  r.empirical_mean = j.at("empirical_mean").get<double>();
  r.std_error = j.at("std_error").get<double>();
  r.formula_value = j.at("formula_value").get<double>();
  r.z_score = j.at("z_score").get<double>();
  for (const auto& c : j.at("per_state_counts"))
    r.per_state_counts[{c.at("h2_state").get<int>(), c.at("h1_state").get<int>()}] =
        c.at("count").get<std::uint64_t>();
  r.generator = j.at("generator").get<std::string>();
  r.trials = j.at("trials").get<std::uint64_t>();
  r.seed = j.at("seed").get<std::uint64_t>();
  return r;
}

}  // namespace bamac::io
