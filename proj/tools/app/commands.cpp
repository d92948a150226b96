// Copyright 2026 The mrea Authors.
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

#include "app/commands.hpp"

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>
#include <spdlog/sinks/ostream_sink.h>
#include <spdlog/spdlog.h>

#include "app/loader.hpp"
#include "app/report.hpp"
#include "mrea/config.hpp"
#include "mrea/errors.hpp"
#include "mrea/lp/lp_format.hpp"
#include "mrea/multi_region.hpp"
#include "mrea/simulation.hpp"
#include "mrea/single_region.hpp"

namespace mrea::app {

namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using Clock = std::chrono::steady_clock;

struct Options {
  std::string config;
  std::string out;
  bool omit_timing = false;
  std::string log_level = "warn";
  std::string model;
  std::string flow;
  std::string date;
  std::string from;
  std::string to;
  bool export_lp = false;
  std::vector<double> sweep;
  std::uint64_t seed = 1;
  std::size_t mc_runs = 0;
  double mc_sigma = 0.1;
  unsigned threads = 0;
};

// Shared state of one command invocation.
struct Run {
  std::string command;
  std::vector<std::string> arguments;
  fs::path config_path;
  RunConfig config;
  FlowScenario flow = FlowScenario::kNone;
  DateRange range;
  fs::path out_dir;
  json manifest;
  std::vector<std::string> outputs;
  Clock::time_point start = Clock::now();

  bool timing() const { return !config.output.omit_timing; }

  void save(const std::string& name, const Table& table) {
    table.save(out_dir / name);
    outputs.push_back(name);
  }
  void save(const std::string& name, const std::string& text) {
    write_text(out_dir / name, text);
    outputs.push_back(name);
  }
};

Run prepare(const std::string& command, const std::vector<std::string>& args, const Options& opt) {
  Run run;
  run.command = command;
  run.arguments.assign(args.begin() + 1, args.end());
  std::string path = opt.config;
  if (path.empty()) {
    const char* env = std::getenv("MREA_CONFIG");
    if (env != nullptr) path = env;
  }
  if (path.empty()) throw ConfigError("no configuration: pass --config PATH or set MREA_CONFIG");
  run.config_path = path;
  run.config = load_config(path);
  if (const char* data = std::getenv("MREA_DATA_DIR"); data != nullptr) run.config.data_dir = data;
  RunConfig& c = run.config;
  if (!opt.model.empty()) c.model.kind = parse_model_kind(opt.model);
  if (!opt.out.empty()) c.output.directory = opt.out;
  if (opt.omit_timing) c.output.omit_timing = true;
  if (opt.export_lp) c.output.export_lp = true;
  if (opt.threads > 0) c.output.threads = opt.threads;
  if (!opt.flow.empty()) {
    run.flow = parse_flow(opt.flow);
    c.interconnector.use_flow_envelopes = run.flow != FlowScenario::kNone;
  } else {
    run.flow = c.interconnector.use_flow_envelopes ? FlowScenario::kRecorded : FlowScenario::kNone;
  }
  c.validate();

  if (!opt.date.empty()) {
    if (!opt.from.empty() || !opt.to.empty()) throw ConfigError("--date excludes --from/--to");
    run.range = day_range(opt.date, opt.date);
  } else {
    run.range = day_range(opt.from, opt.to);
  }
  // Relative output directories are taken from the working directory.
  run.out_dir = fs::path(c.output.directory);
  std::error_code ec;
  fs::create_directories(run.out_dir, ec);
  if (ec) throw IoError("cannot create output directory " + run.out_dir.string() + ": " + ec.message());

  run.manifest["tool"] = "mrea";
  run.manifest["format_version"] = 1;
  run.manifest["command"] = command;
  run.manifest["arguments"] = run.arguments;
  run.manifest["config_file"] = run.config_path.string();
  run.manifest["config_sha256"] = sha256_hex(config_to_string(c));
  run.manifest["model"] = std::string(to_string(c.model.kind));
  run.manifest["flow"] = std::string(to_string(run.flow));
  json range;
  range["from"] = run.range.from ? json(format_iso8601(*run.range.from)) : json(nullptr);
  range["to"] = run.range.to ? json(format_iso8601(*run.range.to)) : json(nullptr);
  run.manifest["range"] = range;
  return run;
}

void finish(Run& run) {
  run.manifest["outputs"] = run.outputs;
  if (run.timing()) {
    run.manifest["timing"]["total_seconds"] =
        std::chrono::duration<double>(Clock::now() - run.start).count();
  }
  write_text(run.out_dir / "manifest.json", run.manifest.dump(2) + "\n");
}

BacktestOptions backtest_options(const Run& run) {
  const RunConfig& c = run.config;
  BacktestOptions o;
  o.model = c.model.kind;
  o.plan = c.horizon;
  o.solver = c.solver;
  o.use_flow_envelopes = run.flow != FlowScenario::kNone;
  o.dp = {c.model.dp_action_step, c.model.dp_state_step};
  o.dp_converge = c.model.dp_converge;
  o.cycles = c.model.cycles;
  o.continue_on_failure = c.output.continue_on_failure;
  o.threads = c.output.threads;
  return o;
}

// One model solved over the whole selected range.
struct SolveOutcome {
  std::string model;
  std::string flow;
  std::vector<std::string> market_ids;
  std::vector<std::vector<double>> x;
  std::vector<double> soc;  // level after each interval
  std::vector<std::pair<std::string, std::vector<int>>> binaries;
  PerformanceIndices indices;
  lp::SolveStatus status = lp::SolveStatus::kOptimal;
  std::optional<lp::LinearProgram> lp;
};

SolveOutcome solve_once(const Run& run, const BacktestData& data, ModelKind kind,
                        FlowScenario flow, bool want_lp) {
  const RunConfig& c = run.config;
  SolveOutcome out;
  out.model = std::string(to_string(kind));
  out.flow = std::string(to_string(flow));
  if (kind == ModelKind::kMrea) {
    if (data.remotes.empty()) throw ConfigError("the mrea model needs a [remote] market");
    const MreaInstance inst{data.params, data.home, data.remotes, 0};
    const bool envelopes = flow != FlowScenario::kNone;
    const MreaSolution sol = solve_mrea(inst, {c.solver, envelopes});
    out.market_ids.push_back(data.home.market_id);
    out.x.push_back(sol.x_home);
    for (std::size_t r = 0; r < data.remotes.size(); ++r) {
      out.market_ids.push_back(data.remotes[r].prices.market_id);
      out.x.push_back(sol.x_remote[r]);
    }
    out.binaries = {{"z_ch", sol.z_ch}, {"z_dis", sol.z_dis}};
    out.soc.assign(sol.soc.levels.begin() + 1, sol.soc.levels.end());
    out.indices = indices(sol, data.params, c.model.cycles);
    out.status = sol.status;
    if (want_lp) out.lp = build_mrea(inst, envelopes).lp;
    return out;
  }
  const SingleRegionInstance inst{data.params, data.home, 0};
  Dispatch d;
  switch (kind) {
    case ModelKind::kLp: d = solve_lp(inst, c.solver); break;
    case ModelKind::kMilp: d = solve_milp(inst, c.solver); break;
    case ModelKind::kNoDis: d = solve_nodis(inst, c.solver); break;
    case ModelKind::kDp: {
      const DpConfig dp{c.model.dp_action_step, c.model.dp_state_step};
      d = c.model.dp_converge ? solve_dp_converged(inst, dp) : solve_dp(inst, dp);
      break;
    }
    case ModelKind::kMrea: break;
  }
  out.market_ids.push_back(data.home.market_id);
  out.x.push_back(d.x);
  if (!d.z.empty()) out.binaries = {{"z", d.z}};
  out.soc.assign(d.soc.levels.begin() + 1, d.soc.levels.end());
  out.indices = indices(d, data.params, c.model.cycles);
  out.status = d.status;
  if (want_lp) {
    if (kind == ModelKind::kDp) {
      spdlog::warn("the dp model has no linear program to export");
    } else {
      const SingleModel sm = kind == ModelKind::kLp     ? SingleModel::kLp
                             : kind == ModelKind::kMilp ? SingleModel::kMilp
                                                        : SingleModel::kNoDis;
      out.lp = build_single_region(inst, sm).lp;
    }
  }
  return out;
}

std::vector<std::string> indices_header(const Run& run, std::vector<std::string> lead) {
  for (const char* h : {"revenue", "cycles", "revenue_per_cycle", "m_ind"}) lead.emplace_back(h);
  if (run.timing()) lead.emplace_back("wall_time");
  return lead;
}

void append_indices(const Run& run, std::vector<std::string>& row, const PerformanceIndices& p) {
  row.push_back(number(p.revenue));
  row.push_back(number(p.cycles));
  row.push_back(number(p.revenue_per_cycle));
  row.push_back(number(p.m_ind));
  if (run.timing()) row.push_back(number(p.wall_time));
}

Table dispatch_table(const std::vector<Timestamp>& stamps, const std::vector<std::string>& ids,
                     const std::vector<std::vector<double>>& x, const std::vector<double>& soc,
                     const std::vector<std::pair<std::string, std::vector<int>>>& binaries) {
  std::vector<std::string> header{"timestamp"};
  for (const auto& id : ids) header.push_back("x_" + id);
  header.emplace_back("soc");
  for (const auto& b : binaries) header.push_back(b.first);
  Table t(header);
  for (std::size_t i = 0; i < stamps.size(); ++i) {
    std::vector<std::string> row{format_iso8601(stamps[i])};
    for (const auto& series : x) row.push_back(number(series[i]));
    row.push_back(number(soc[i]));
    for (const auto& b : binaries) row.push_back(std::to_string(b.second[i]));
    t.add(std::move(row));
  }
  return t;
}

void cmd_solve(Run& run, std::ostream& out) {
  if (!run.range.from && !run.range.to) throw ConfigError("solve needs --date or --from/--to");
  const BacktestData data = load_data(run.config, run.range, run.flow);
  const SolveOutcome s =
      solve_once(run, data, run.config.model.kind, run.flow, run.config.output.export_lp);
  run.save("dispatch.csv", dispatch_table(data.home.timestamps, s.market_ids, s.x, s.soc, s.binaries));
  Table idx(indices_header(run, {"model", "flow", "eta_pseudo"}));
  std::vector<std::string> row{s.model, s.flow, number(data.params.eta_pseudo)};
  append_indices(run, row, s.indices);
  idx.add(std::move(row));
  run.save("indices.csv", idx);
  if (s.lp) run.save("model.lp", lp::to_lp_string(*s.lp));
  run.manifest["status"] = std::string(lp::to_string(s.status));
  idx.print(out);
}

void cmd_backtest(Run& run, const Options& opt, std::ostream& out) {
  BacktestData data = load_data(run.config, run.range, run.flow);
  const BacktestOptions options = backtest_options(run);
  std::vector<double> etas = opt.sweep;
  if (etas.empty()) etas.push_back(run.config.model.eta_pseudo);
  for (double eta : etas) {
    if (!(eta > 0.0 && eta <= 1.0)) {
      throw ConfigError("--sweep-eta-pseudo values must lie in (0, 1], got " + number(eta));
    }
  }

  std::vector<std::string> header{"eta_pseudo", "year"};
  const std::size_t markets = options.model == ModelKind::kMrea ? 1 + data.remotes.size() : 1;
  std::vector<std::string> ids{data.home.market_id};
  if (markets > 1) {
    for (const auto& r : data.remotes) ids.push_back(r.prices.market_id);
  }
  header = indices_header(run, header);
  header.emplace_back("mean_revenue_per_cycle");
  header.emplace_back("failures");
  for (const auto& id : ids) header.push_back("revenue_" + id);
  Table yearly(header);
  Table sweep(
      {"eta_pseudo", "revenue", "cycles", "revenue_per_cycle", "revenue_share", "cycles_share"});
  json runs = json::array();
  std::optional<PerformanceIndices> nominal;

  for (double eta : etas) {
    data.params.eta_pseudo = eta;
    const SimulationReport rep = run_backtest(data, options);
    std::size_t failures = 0;
    std::vector<double> market_total(markets, 0.0);
    for (const auto& y : rep.years) {
      std::vector<std::string> row{number(eta), std::to_string(y.year)};
      append_indices(run, row, y.indices);
      row.emplace_back();
      row.push_back(std::to_string(y.failures));
      for (std::size_t m = 0; m < markets; ++m) {
        row.push_back(number(y.market_revenue[m]));
        market_total[m] += y.market_revenue[m];
      }
      failures += y.failures;
      yearly.add(std::move(row));
    }
    std::vector<std::string> total{number(eta), "total"};
    append_indices(run, total, rep.total);
    total.push_back(number(rep.mean_yearly_revenue_per_cycle));
    total.push_back(std::to_string(failures));
    for (double v : market_total) total.push_back(number(v));
    yearly.add(std::move(total));

    if (!nominal) nominal = rep.total;
    auto share = [](double v, double base) {
      return base != 0.0 ? number(v / base) : std::string();
    };
    sweep.add({number(eta), number(rep.total.revenue), number(rep.total.cycles),
               number(rep.total.revenue_per_cycle), share(rep.total.revenue, nominal->revenue),
               share(rep.total.cycles, nominal->cycles)});

    json entry;
    entry["eta_pseudo"] = eta;
    entry["windows"] = rep.windows.size();
    entry["failed_windows"] = rep.failed_windows;
    runs.push_back(entry);

    if (opt.sweep.empty()) {
      run.save("dispatch.csv", dispatch_table(rep.timestamps, ids, rep.x, rep.soc, {}));
      std::vector<std::string> wh{"window", "start", "committed", "status", "failed", "revenue",
                                  "b_start", "b_end", "cycles", "m_ind"};
      if (run.timing()) wh.emplace_back("wall_time");
      Table windows(wh);
      for (const auto& w : rep.windows) {
        std::vector<std::string> row{std::to_string(w.index), format_iso8601(w.start),
                                     std::to_string(w.committed), std::string(lp::to_string(w.status)),
                                     w.failed ? "1" : "0", number(w.revenue), number(w.b_start),
                                     number(w.b_end), number(w.cycles), number(w.m_ind)};
        if (run.timing()) row.push_back(number(w.wall_time));
        windows.add(std::move(row));
      }
      run.save("windows.csv", windows);
    }
  }
  run.save("yearly.csv", yearly);
  if (!opt.sweep.empty()) run.save("sweep.csv", sweep);
  run.manifest["runs"] = runs;

  if (opt.mc_runs > 0) {
    data.params.eta_pseudo = etas.front();
    const MonteCarloReport mc = run_monte_carlo(
        data, options, {opt.mc_runs, {opt.mc_sigma, opt.seed}, run.config.output.threads});
    std::vector<std::string> mh{"run", "revenue", "cycles"};
    if (run.timing()) mh.emplace_back("wall_time");
    Table table(mh);
    for (std::size_t r = 0; r < opt.mc_runs; ++r) {
      std::vector<std::string> row{std::to_string(r), number(mc.revenues[r]), number(mc.cycles[r])};
      if (run.timing()) row.push_back(number(mc.wall_times[r]));
      table.add(std::move(row));
    }
    run.save("montecarlo.csv", table);
    json summary;
    summary["runs"] = opt.mc_runs;
    summary["sigma"] = opt.mc_sigma;
    summary["seed"] = opt.seed;
    summary["revenue"] = {{"mean", mc.revenue.mean}, {"p50", mc.revenue.p50}, {"p95", mc.revenue.p95}};
    if (run.timing()) {
      summary["runtime"] = {{"mean", mc.runtime.mean}, {"p50", mc.runtime.p50}, {"p95", mc.runtime.p95}};
    }
    run.manifest["monte_carlo"] = summary;
  }
  yearly.print(out);
}

void cmd_benchmark(Run& run, std::ostream& out) {
  if (!run.range.from && !run.range.to) throw ConfigError("benchmark needs --date or --from/--to");
  const BacktestData base = load_data(run.config, run.range, FlowScenario::kNone);
  Table table(indices_header(run, {"model", "flow"}));
  json statuses = json::array();
  auto add = [&](const SolveOutcome& s) {
    std::vector<std::string> row{s.model, s.flow};
    append_indices(run, row, s.indices);
    table.add(std::move(row));
    statuses.push_back({{"model", s.model}, {"flow", s.flow}, {"status", lp::to_string(s.status)}});
  };
  for (ModelKind k : {ModelKind::kLp, ModelKind::kNoDis, ModelKind::kDp, ModelKind::kMilp}) {
    add(solve_once(run, base, k, FlowScenario::kNone, false));
  }
  if (!base.remotes.empty()) {
    add(solve_once(run, base, ModelKind::kMrea, FlowScenario::kNone, false));
    if (!run.config.interconnector.flow_file.empty()) {
      for (FlowScenario f : {FlowScenario::kRecorded, FlowScenario::kReversed}) {
        add(solve_once(run, load_data(run.config, run.range, f), ModelKind::kMrea, f, false));
      }
    }
  }
  run.save("benchmark.csv", table);
  run.manifest["status"] = statuses;
  table.print(out);
}

std::vector<double> split_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::logic_error&) {
      throw ConfigError("--sweep-eta-pseudo: not a number: '" + item + "'");
    }
  }
  return out;
}

// Routes log output to `err` until destroyed.
class LoggingScope {
 public:
  LoggingScope(const std::string& level, std::ostream& err) : previous_(spdlog::default_logger()) {
    configure(level, err);
  }
  ~LoggingScope() { spdlog::set_default_logger(previous_); }
  LoggingScope(const LoggingScope&) = delete;
  LoggingScope& operator=(const LoggingScope&) = delete;

 private:
  static void configure(const std::string& level, std::ostream& err);
  std::shared_ptr<spdlog::logger> previous_;
};

void LoggingScope::configure(const std::string& level, std::ostream& err) {
  auto sink = std::make_shared<spdlog::sinks::ostream_sink_mt>(err);
  sink->set_pattern("%l: %v");
  auto logger = std::make_shared<spdlog::logger>("mrea", sink);
  const auto lvl = spdlog::level::from_str(level);
  if (lvl == spdlog::level::off && level != "off") {
    throw ConfigError("unknown log level '" + level + "'");
  }
  logger->set_level(lvl);
  spdlog::set_default_logger(logger);
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Battery energy arbitrage across interconnected day-ahead markets", "mrea"};
  app.require_subcommand(1);
  Options opt;
  std::string sweep;
  app.add_option("--config", opt.config, "Run configuration file (default: $MREA_CONFIG)");
  app.add_option("--out", opt.out, "Output directory (overrides [output] directory)");
  app.add_flag("--omit-timing", opt.omit_timing, "Leave wall times out of every output");
  app.add_option("--log-level", opt.log_level, "trace, debug, info, warn, err or off");
  app.fallthrough();

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--model", opt.model, "lp, milp, nodis, dp or mrea");
    sub->add_option("--flow", opt.flow, "none, file or reversed");
  };
  CLI::App* solve = app.add_subcommand("solve", "Solve one instance and write its dispatch");
  add_common(solve);
  solve->add_option("--date", opt.date, "Day to solve (YYYY-MM-DD, UTC)");
  solve->add_option("--from", opt.from, "First day (YYYY-MM-DD)");
  solve->add_option("--to", opt.to, "Last day, inclusive (YYYY-MM-DD)");
  solve->add_flag("--export-lp", opt.export_lp, "Also write the model in LP format");

  CLI::App* backtest = app.add_subcommand("backtest", "Rolling-horizon simulation with yearly report");
  add_common(backtest);
  backtest->add_option("--date", opt.date, "Single day (YYYY-MM-DD, UTC)");
  backtest->add_option("--from", opt.from, "First day (YYYY-MM-DD)");
  backtest->add_option("--to", opt.to, "Last day, inclusive (YYYY-MM-DD)");
  backtest->add_option("--sweep-eta-pseudo", sweep, "Comma-separated pseudo efficiencies");
  backtest->add_option("--mc-runs", opt.mc_runs, "Monte Carlo runs with perturbed prices");
  backtest->add_option("--mc-sigma", opt.mc_sigma, "Log-scale price noise for Monte Carlo");
  backtest->add_option("--seed", opt.seed, "Monte Carlo seed");
  backtest->add_option("--threads", opt.threads, "Worker threads");

  CLI::App* benchmark = app.add_subcommand("benchmark", "Compare all models on one instance");
  benchmark->add_option("--date", opt.date, "Day to solve (YYYY-MM-DD, UTC)");
  benchmark->add_option("--from", opt.from, "First day (YYYY-MM-DD)");
  benchmark->add_option("--to", opt.to, "Last day, inclusive (YYYY-MM-DD)");

  std::vector<char*> argv;
  std::vector<std::string> storage = args;
  for (auto& a : storage) argv.push_back(a.data());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    std::ostringstream cli_out, cli_err;
    const int code = app.exit(e, cli_out, cli_err);
    out << cli_out.str();
    err << cli_err.str();
    return code == 0 ? kOk : kConfigError;
  }

  try {
    const LoggingScope logging(opt.log_level, err);
    if (!sweep.empty()) opt.sweep = split_list(sweep);
    if (solve->parsed()) {
      Run run = prepare("solve", args, opt);
      cmd_solve(run, out);
      finish(run);
    } else if (backtest->parsed()) {
      Run run = prepare("backtest", args, opt);
      cmd_backtest(run, opt, out);
      finish(run);
    } else if (benchmark->parsed()) {
      Run run = prepare("benchmark", args, opt);
      cmd_benchmark(run, out);
      finish(run);
    }
  } catch (const InvalidArgument& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const DataError& e) {
    err << "data error: " << e.what() << '\n';
    return kDataError;
  } catch (const IoError& e) {
    err << "data error: " << e.what() << '\n';
    return kDataError;
  } catch (const SolverFailure& e) {
    err << "solver error: " << e.what() << '\n';
    return kSolverError;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kInternalError;
  }
  return kOk;
}

}  // namespace mrea::app
