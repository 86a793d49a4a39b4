// bamac_cli: rate regions, frontiers, average-rate sweeps and simulation for
// the layered two-user fading MAC.
//
// Exit codes: 0 success / feasible, 1 check failure, 2 config or parse error.

#include <cstdlib>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bamac/bamac.hpp"
#include "bamac/io.hpp"

using namespace bamac;
using bamac::io::json;

namespace {

constexpr int kOk = 0;
constexpr int kCheckFailed = 1;
constexpr int kConfigError = 2;

struct Flags {
  std::string config;
  std::vector<double> alphas;
  std::optional<double> power;
  std::vector<double> probs;
  std::optional<double> p;
  std::optional<double> grid;
  std::string out;
  std::string format;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> trials;
  std::string sweep;
  std::string rates;
  std::vector<double> allocation;
  std::optional<int> count;
  std::optional<unsigned> threads;
  bool strict_j2 = false;
  bool outer = false;
  bool no_refine = false;
};

LayerMap square_from_flat(const std::vector<double>& xs, const char* what) {
  const int ell = static_cast<int>(std::lround(std::sqrt(static_cast<double>(xs.size()))));
  if (ell < 1 || static_cast<std::size_t>(ell * ell) != xs.size())
    throw std::invalid_argument(std::string(what) + " needs ell^2 comma-separated values");
  LayerMap m(ell);
  m.flat() = xs;
  return m;
}

io::RunConfig resolve(const std::string& command, const Flags& f) {
  io::RunConfig cfg;
  if (!f.config.empty()) cfg = io::load_config(f.config);
  cfg.command = command;
  if (!f.alphas.empty()) {
    cfg.model.alphas = f.alphas;
    cfg.model.ell = static_cast<int>(f.alphas.size());
    if (f.probs.empty() && !f.p && cfg.model.probs.size() != f.alphas.size())
      cfg.model.probs.assign(f.alphas.size(), 1.0 / static_cast<double>(f.alphas.size()));
  }
  if (f.power) cfg.model.power = *f.power;
  if (!f.probs.empty()) cfg.model.probs = f.probs;
  if (f.p) cfg.model.probs = {*f.p, 1.0 - *f.p};
  if (f.grid) cfg.grid = *f.grid;
  if (!f.format.empty()) cfg.output_format = f.format;
  if (!f.out.empty()) cfg.output_path = f.out;
  if (f.seed) cfg.seed = *f.seed;
  if (f.trials) cfg.trials = *f.trials;
  if (!f.sweep.empty()) cfg.sweep = io::parse_sweep(f.sweep);
  if (!f.rates.empty()) cfg.rates_file = f.rates;
  if (!f.allocation.empty()) cfg.allocation = square_from_flat(f.allocation, "--allocation");
  if (f.count) cfg.count = *f.count;
  if (f.threads) cfg.threads = *f.threads;
  if (f.strict_j2) cfg.strict_j2 = true;
  if (f.outer) cfg.outer = true;
  if (f.no_refine) cfg.refine = false;

  if (cfg.output_path.empty()) {
    if (const char* dir = std::getenv("BAMAC_OUTPUT_DIR"); dir && *dir)
      cfg.output_path = std::string(dir) + "/" + command + "." + cfg.output_format;
  }
  if (cfg.command == "avgrate" && !cfg.sweep) cfg.sweep = io::Sweep{"alpha1", 0.25, 1.0, 0.05};
  io::validate_config(cfg);
  return cfg;
}

PowerAllocation allocation_for(const io::RunConfig& cfg) {
  const int ell = cfg.model.ell;
  if (!cfg.allocation) return PowerAllocation::symmetric(LayerMap(ell, 1.0 / (ell * ell)));
  if (cfg.allocation->ell() != ell) throw std::invalid_argument("allocation size differs from ell");
  return PowerAllocation::symmetric(*cfg.allocation);
}

RateVector rates_for(const io::RunConfig& cfg) {
  if (!cfg.rates_file.empty()) {
    std::string text;
    try {
      text = io::read_file(cfg.rates_file);
    } catch (const std::invalid_argument& e) {
      throw io::ParseError(e.what(), 0, 0);
    }
    try {
      return io::parse_rates(text);
    } catch (const io::ParseError&) {
      std::cerr << "in " << cfg.rates_file << '\n';
      throw;
    }
  }
  if (cfg.rates) return RateVector(*cfg.rates);
  throw std::invalid_argument("no rates given (use --rates or a \"rates\" config key)");
}

json allocation_json(const PowerAllocation& pa) { return io::matrix_to_json(pa.shared()); }

std::vector<std::string> allocation_cells(const PowerAllocation& pa) {
  std::vector<std::string> cells;
  for (double b : pa.shared().flat()) cells.push_back(io::csv_number(b));
  return cells;
}

std::vector<std::string> coefficient_header(int ell, const char* prefix) {
  std::vector<std::string> h;
  for (int u = 1; u <= ell; ++u)
    for (int v = 1; v <= ell; ++v) h.push_back(prefix + std::to_string(u) + std::to_string(v));
  return h;
}

json region_json(const RateRegion& r) {
  json rows = json::array();
  for (const auto& c : r.constraints())
    rows.push_back({{"tag", c.tag}, {"coefficients", c.coeffs.rows()}, {"bound", c.bound},
                    {"constraint", c.describe()}});
  return rows;
}

io::CsvTable region_csv(const RateRegion& r) {
  std::vector<std::string> h = {"tag"};
  for (auto& c : coefficient_header(r.ell(), "c")) h.push_back(c);
  h.push_back("bound");
  io::CsvTable t(h);
  for (const auto& c : r.constraints()) {
    std::vector<std::string> row = {c.tag};
    for (int k : c.coeffs.flat()) row.push_back(std::to_string(k));
    row.push_back(io::csv_number(c.bound));
    t.add_row(row);
  }
  return t;
}

struct Result {
  json data;
  std::optional<io::CsvTable> csv;
  std::string text;  // human-readable report for stdout
  int exit_code = kOk;
};

// ---------------------------------------------------------------------------

Result cmd_region(const io::RunConfig& cfg) {
  const PowerAllocation pa = allocation_for(cfg);
  const RateRegion r = two_state::inner_region(cfg.model, pa);
  const auto t = two_state::region_terms(cfg.model, pa);
  Result out;
  out.data = {{"allocation", allocation_json(pa)},
              {"terms",
               {{"r11", t.r11}, {"r12", t.r12}, {"r21", t.r21}, {"r1", t.r1}, {"r12'", t.r12p},
                {"r21'", t.r21p}, {"r22", t.r22}}},
              {"constraints", region_json(r)}};
  out.csv = region_csv(r);
  return out;
}

Result cmd_baseline(const io::RunConfig& cfg) {
  const int steps = simplex_steps(cfg.grid);
  io::CsvTable t({"b11", "b12", "weak_sum", "strong_sum"});
  json rows = json::array();
  for (int i = 0; i <= steps; ++i) {
    const double b11 = static_cast<double>(i) / steps;
    const auto pa = PowerAllocation::two_state(b11, 1.0 - b11, 0, 0);
    const auto b = two_state::two_layer_bounds(cfg.model, pa);
    t.add_row({io::csv_number(b11), io::csv_number(1.0 - b11), io::csv_number(b.weak_sum),
               io::csv_number(b.strong_sum)});
    rows.push_back({{"b11", b11}, {"b12", 1.0 - b11}, {"weak_sum", b.weak_sum}, {"strong_sum", b.strong_sum}});
  }
  Result out;
  out.data = {{"splits", rows}};
  out.csv = t;
  return out;
}

Result cmd_outer(const io::RunConfig& cfg) {
  const PowerAllocation pa = allocation_for(cfg);
  const auto o = two_state::outer_bound(cfg.model, pa);
  io::CsvTable t({"cap_r11", "cap_r12", "cap_r21", "cap_r22"});
  t.add_row({io::csv_number(o.cap_r11), io::csv_number(o.cap_r12), io::csv_number(o.cap_r21),
             io::csv_number(o.cap_r22)});
  Result out;
  out.data = {{"allocation", allocation_json(pa)},
              {"cap_r11", o.cap_r11}, {"cap_r12", o.cap_r12}, {"cap_r21", o.cap_r21}, {"cap_r22", o.cap_r22}};
  out.csv = t;
  return out;
}

Result cmd_frontier(const io::RunConfig& cfg) {
  FrontierOptions fo;
  fo.resolution = cfg.grid;
  std::vector<std::pair<const char*, Frontier>> curves;
  curves.emplace_back("proposed", trace_frontier_proposed(cfg.model, fo));
  curves.emplace_back("baseline", trace_frontier_baseline(cfg.model, fo));
  if (cfg.outer) curves.emplace_back("outer", trace_frontier_outer(cfg.model, fo));

  io::CsvTable t({"scheme", "x", "y", "b11", "b12", "b21", "b22"});
  Result out;
  out.data = json::object();
  for (const auto& [name, f] : curves) {
    json pts = json::array();
    for (const auto& p : f.sample(fo.ladder)) {
      std::vector<std::string> row = {name, io::csv_number(p.x), io::csv_number(p.y)};
      for (auto& c : allocation_cells(p.allocation)) row.push_back(c);
      t.add_row(row);
      pts.push_back({{"x", p.x}, {"y", p.y}, {"allocation", allocation_json(p.allocation)}});
    }
    out.data[name] = pts;
  }
  out.csv = t;
  const double slack = min_frontier_slack(curves[0].second, curves[1].second, fo.ladder);
  out.data["min_slack_proposed_minus_baseline"] = slack;
  std::ostringstream os;
  os << "min slack (proposed - baseline): " << slack << '\n';
  out.text = os.str();
  return out;
}

Result cmd_avgrate(const io::RunConfig& cfg) {
  SearchOptions opt;
  opt.resolution = cfg.grid;
  opt.refine = cfg.refine;
  const io::Sweep& s = *cfg.sweep;
  io::CsvTable t({"sweep-value", "proposed-max", "baseline-max", "gain", "baseline-closed-form-max"});
  json rows = json::array();
  for (double v : s.values()) {
    const ChannelModel m = io::sweep_model(cfg.model, s.name, v);
    const auto prop = maximize_average_rate(m, opt, Scheme::kProposed);
    const auto base = maximize_average_rate(m, opt, Scheme::kBaseline);
    const auto lit = maximize_average_rate(m, opt, Scheme::kBaselineClosedForm);
    t.add_row({io::csv_number(v), io::csv_number(prop.value), io::csv_number(base.value),
               io::csv_number(prop.value - base.value), io::csv_number(lit.value)});
    rows.push_back({{"sweep_value", v},
                    {"proposed_max", prop.value},
                    {"baseline_max", base.value},
                    {"gain", prop.value - base.value},
                    {"baseline_closed_form_max", lit.value},
                    {"proposed_allocation", allocation_json(prop.allocation)},
                    {"proposed_rates", io::matrix_to_json(prop.rates.map())},
                    {"baseline_allocation", allocation_json(base.allocation)}});
  }
  Result out;
  out.data = {{"sweep", s.name}, {"rows", rows}};
  out.csv = t;
  return out;
}

Result cmd_multistate(const io::RunConfig& cfg) {
  const PowerAllocation pa = allocation_for(cfg);
  const auto form = cfg.strict_j2 ? multi_state::SecondSetForm::kStrict : multi_state::SecondSetForm::kAmended;
  const RateRegion r = multi_state::general_region(cfg.model, pa, form);
  const multi_state::DecodeTable table(cfg.model.ell);
  const LayerMap w = average_rate_weights(cfg.model, table);
  const LinearOptimum best = maximize_linear(r, w);

  json decode = json::array();
  for (int p = 1; p <= cfg.model.ell; ++p)
    for (int q = 1; q <= cfg.model.ell; ++q) {
      json streams = json::array();
      for (const auto& st : table.at(p, q)) streams.push_back({{"user", st.user}, {"u", st.u}, {"v", st.v}});
      decode.push_back({{"h2_state", p}, {"h1_state", q}, {"streams", streams}});
    }
  Result out;
  out.data = {{"allocation", allocation_json(pa)},
              {"constraints", region_json(r)},
              {"decode_table", decode},
              {"average_rate_weights", io::matrix_to_json(w)},
              {"max_average_rate", best.value},
              {"max_average_rate_rates", io::matrix_to_json(best.arg.map())}};
  out.csv = region_csv(r);
  return out;
}

Result cmd_simulate(const io::RunConfig& cfg) {
  SimConfig sc;
  sc.model = cfg.model;
  sc.allocation = allocation_for(cfg);
  sc.rates = rates_for(cfg);
  sc.trials = cfg.trials;
  sc.seed = cfg.seed;
  sc.threads = cfg.threads;
  const SimReport r = run_sim(sc);
  io::CsvTable t({"empirical_mean", "std_error", "formula_value", "z_score", "trials", "seed", "generator"});
  t.add_row({io::csv_number(r.empirical_mean), io::csv_number(r.std_error), io::csv_number(r.formula_value),
             io::csv_number(r.z_score), std::to_string(r.trials), std::to_string(r.seed), r.generator});
  Result out;
  out.data = io::sim_report_to_json(r);
  out.csv = t;
  std::ostringstream os;
  os << "empirical mean " << r.empirical_mean << " +/- " << r.std_error << ", formula " << r.formula_value
     << ", z " << r.z_score << '\n';
  out.text = os.str();
  return out;
}

Result cmd_check(const io::RunConfig& cfg) {
  const PowerAllocation pa = allocation_for(cfg);
  const RateVector rv = rates_for(cfg);
  if (rv.ell() != cfg.model.ell) throw std::invalid_argument("rate matrix size differs from ell");
  const RateRegion region = achievable_region(cfg.model, pa);
  const auto violations = region.violations(rv);

  std::ostringstream os;
  json bad = json::array();
  for (const auto& v : violations) {
    os << "violated [" << v.tag << "] " << v.description << " (lhs " << v.lhs << ")\n";
    bad.push_back({{"tag", v.tag}, {"constraint", v.description}, {"lhs", v.lhs}, {"bound", v.bound}});
  }
  bool stages_ok = true;
  json stages = json::array();
  if (cfg.model.ell == 2) {
    const auto rep = two_state::check_stagewise_feasibility(cfg.model, pa, rv);
    stages_ok = rep.pass();
    for (const auto& s : rep.states) {
      json failed = json::array();
      for (const auto& c : s.checks)
        if (!c.ok) {
          failed.push_back({{"stage", c.stage}, {"label", c.label}, {"lhs", c.lhs}, {"bound", c.bound}});
          os << "state (" << s.p << "," << s.q << ") stage " << c.stage << " fails " << c.label << '\n';
        }
      stages.push_back({{"h2_state", s.p}, {"h1_state", s.q}, {"pass", s.pass()}, {"failed", failed}});
    }
  }
  const bool feasible = violations.empty() && stages_ok;
  os << (feasible ? "feasible\n" : "infeasible\n");

  io::CsvTable t({"tag", "constraint", "lhs", "bound"});
  for (const auto& v : violations)
    t.add_row({v.tag, v.description, io::csv_number(v.lhs), io::csv_number(v.bound)});
  Result out;
  out.data = {{"feasible", feasible}, {"violations", bad}, {"stages", stages},
              {"rates", io::matrix_to_json(rv.map())}, {"allocation", allocation_json(pa)}};
  out.csv = t;
  out.text = os.str();
  out.exit_code = feasible ? kOk : kCheckFailed;
  return out;
}

Result cmd_reduce_check(const io::RunConfig& cfg) {
  const auto form = cfg.strict_j2 ? multi_state::SecondSetForm::kStrict : multi_state::SecondSetForm::kAmended;
  std::mt19937_64 rng(cfg.seed);
  std::exponential_distribution<double> e(1.0);
  io::CsvTable t({"index", "b11", "b12", "b21", "b22", "max_deviation", "pass"});
  json rows = json::array();
  double worst = 0.0;
  for (int i = 0; i < cfg.count; ++i) {
    PowerAllocation pa = PowerAllocation::two_state(0, 0, 0, 1);
    if (i > 0) {
      double x[4], s = 0;
      for (double& v : x) s += (v = e(rng));
      pa = PowerAllocation::two_state(x[0] / s, x[1] / s, x[2] / s, 1.0 - (x[0] + x[1] + x[2]) / s);
    }
    const auto rep = multi_state::reduction_check(cfg.model, pa, form);
    worst = std::max(worst, rep.max_deviation);
    std::vector<std::string> row = {std::to_string(i)};
    for (auto& c : allocation_cells(pa)) row.push_back(c);
    row.push_back(io::csv_number(rep.max_deviation));
    row.push_back(rep.pass ? "1" : "0");
    t.add_row(row);
    json entries = json::array();
    for (const auto& en : rep.entries)
      entries.push_back({{"name", en.name},
                         {"deviation", std::isfinite(en.deviation) ? json(en.deviation) : json("inf")}});
    rows.push_back({{"allocation", allocation_json(pa)}, {"pass", rep.pass}, {"entries", entries}});
  }
  const bool pass = worst <= kTolerance;
  Result out;
  out.data = {{"count", cfg.count},
              {"max_deviation", std::isfinite(worst) ? json(worst) : json("inf")},
              {"pass", pass},
              {"allocations", rows}};
  out.csv = t;
  std::ostringstream os;
  os << "reduction over " << cfg.count << " allocations: max deviation " << worst << (pass ? " (pass)\n" : " (fail)\n");
  out.text = os.str();
  out.exit_code = pass ? kOk : kCheckFailed;
  return out;
}

Result dispatch(const io::RunConfig& cfg) {
  const std::string& c = cfg.command;
  if (c == "region") return cmd_region(cfg);
  if (c == "baseline") return cmd_baseline(cfg);
  if (c == "outer") return cmd_outer(cfg);
  if (c == "frontier") return cmd_frontier(cfg);
  if (c == "avgrate") return cmd_avgrate(cfg);
  if (c == "multistate") return cmd_multistate(cfg);
  if (c == "simulate") return cmd_simulate(cfg);
  if (c == "check") return cmd_check(cfg);
  if (c == "reduce-check") return cmd_reduce_check(cfg);
  throw std::invalid_argument("unknown command " + c);
}

void add_common(CLI::App* sub, Flags& f) {
  sub->add_option("--config", f.config, "JSON config file; flags override its keys");
  sub->add_option("--alphas", f.alphas, "Channel gains, strictly increasing")->delimiter(',');
  sub->add_option("--power", f.power, "Per-user power P (linear)");
  sub->add_option("--probs", f.probs, "State probabilities")->delimiter(',');
  sub->add_option("--p", f.p, "Probability of the weak state (two states)");
  sub->add_option("--grid", f.grid, "Allocation grid resolution");
  sub->add_option("--out", f.out, "Output file (default: stdout or $BAMAC_OUTPUT_DIR)");
  sub->add_option("--format", f.format, "csv or json");
  sub->add_option("--seed", f.seed, "Random seed");
  sub->add_option("--trials", f.trials, "Monte Carlo trials");
  sub->add_option("--sweep", f.sweep, "name:start:stop:step with name alpha1 or p");
  sub->add_option("--rates", f.rates, "Rate file (matrix text or JSON)");
  sub->add_option("--allocation", f.allocation, "Row-major power fractions")->delimiter(',');
  sub->add_option("--count", f.count, "Number of allocations for reduce-check");
  sub->add_option("--threads", f.threads, "Worker threads for simulate");
  sub->add_flag("--strict-j2", f.strict_j2, "Use the strict second index set");
  sub->add_flag("--outer", f.outer, "Include the outer-bound envelope");
  sub->add_flag("--no-refine", f.no_refine, "Skip the local refinement pass");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Rate regions and average rates for the layered two-user fading MAC"};
  app.require_subcommand(1);
  Flags flags;
  const std::vector<std::pair<std::string, std::string>> commands = {
      {"region", "Achievable region at one allocation"},
      {"baseline", "Two-layer baseline bounds over the power split"},
      {"outer", "Outer bound at one allocation"},
      {"frontier", "Weak/strong sum-rate frontiers"},
      {"avgrate", "Maximum average rate sweep"},
      {"multistate", "General-ell region and decode table"},
      {"simulate", "Monte Carlo average rate"},
      {"check", "Feasibility of a rate file"},
      {"reduce-check", "General region against the two-state region"}};
  for (const auto& [name, help] : commands) add_common(app.add_subcommand(name, help), flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kConfigError;
  }
  const std::string command = app.get_subcommands().front()->get_name();

  io::RunConfig cfg;
  try {
    cfg = resolve(command, flags);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfigError;
  }
  const json resolved = io::config_to_json(cfg);
  std::cerr << "config: " << resolved.dump() << '\n';

  Result res;
  try {
    res = dispatch(cfg);
  } catch (const io::ParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfigError;
  }

  std::string body;
  if (cfg.output_format == "json") {
    json doc = {{"command", command}, {"config", resolved}, {"data", res.data}};
    body = doc.dump(2) + "\n";
  } else if (res.csv) {
    body = res.csv->str();
  }
  std::cout << res.text;
  try {
    if (cfg.output_path.empty()) std::cout << body;
    else io::atomic_write(cfg.output_path, body);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfigError;
  }
  return res.exit_code;
}
