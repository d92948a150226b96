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

#include "mrea/simulation.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <map>
#include <mutex>
#include <numeric>
#include <random>
#include <thread>

#include <spdlog/spdlog.h>

#include "model_util.hpp"
#include "mrea/errors.hpp"

namespace mrea {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

int year_of(Timestamp t) {
  const std::chrono::year_month_day ymd{std::chrono::floor<std::chrono::days>(t)};
  return static_cast<int>(ymd.year());
}

void check_finite(const PriceSeries& s) {
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (!std::isfinite(s.buy[i]) || !std::isfinite(s.sell[i])) {
      throw DataGap("series '" + s.market_id + "' has no usable price at " +
                    format_iso8601(s.timestamps[i]));
    }
  }
}

struct WindowSolve {
  std::vector<std::vector<double>> x;  // [market][interval], whole window
  std::vector<MarketPrices> prices;
  lp::SolveStatus status = lp::SolveStatus::kOptimal;
  double wall_time = 0.0;
  std::exception_ptr error;
};

WindowSolve solve_window(const BacktestData& data, const BacktestOptions& options,
                         std::size_t begin, std::size_t len, double b0) {
  WindowSolve out;
  BatteryParams params = data.params;
  params.b0 = std::clamp(b0, params.b_min, params.b_max);
  const auto start = Clock::now();
  try {
    if (options.model == ModelKind::kMrea) {
      MreaInstance inst;
      inst.params = params;
      inst.home = data.home.slice(begin, len);
      for (const auto& r : data.remotes) {
        inst.remotes.push_back({r.prices.slice(begin, len), r.interconnector.slice(begin, len)});
      }
      out.prices = market_prices(inst);
      const MreaSolution sol =
          solve_mrea(inst, MreaOptions{options.solver, options.use_flow_envelopes});
      out.x.push_back(sol.x_home);
      out.x.insert(out.x.end(), sol.x_remote.begin(), sol.x_remote.end());
      out.status = sol.status;
    } else {
      const SingleRegionInstance inst{params, data.home.slice(begin, len), 0};
      out.prices.push_back({inst.prices.buy, inst.prices.sell});
      Dispatch d;
      switch (options.model) {
        case ModelKind::kLp: d = solve_lp(inst, options.solver); break;
        case ModelKind::kMilp: d = solve_milp(inst, options.solver); break;
        case ModelKind::kNoDis: d = solve_nodis(inst, options.solver); break;
        case ModelKind::kDp:
          d = options.dp_converge ? solve_dp_converged(inst, options.dp)
                                  : solve_dp(inst, options.dp);
          break;
        case ModelKind::kMrea: break;
      }
      out.x.push_back(d.x);
      out.status = d.status;
    }
  } catch (const SolverFailure&) {
    out.error = std::current_exception();
  }
  out.wall_time = seconds_since(start);
  return out;
}

struct YearAccumulator {
  std::size_t windows = 0;
  std::size_t failures = 0;
  double revenue = 0.0;
  double window_cycles = 0.0;
  double m_ind = 0.0;
  bool any_m_ind = false;
  double wall_time = 0.0;
  std::vector<double> market_revenue;
  std::vector<double> levels;
};

}  // namespace

std::string_view to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::kLp: return "lp";
    case ModelKind::kMilp: return "milp";
    case ModelKind::kNoDis: return "nodis";
    case ModelKind::kDp: return "dp";
    case ModelKind::kMrea: return "mrea";
  }
  return "unknown";
}

ModelKind parse_model_kind(std::string_view text) {
  for (ModelKind k : {ModelKind::kLp, ModelKind::kMilp, ModelKind::kNoDis, ModelKind::kDp,
                      ModelKind::kMrea}) {
    if (to_string(k) == text) return k;
  }
  throw ConfigError("unknown model '" + std::string(text) +
                    "' (expected lp, milp, nodis, dp or mrea)");
}

void HorizonPlan::validate() const {
  if (horizon_length == 0) throw InvalidArgument("horizon length must be at least 1");
  if (step == 0 || step > horizon_length) {
    throw InvalidArgument("horizon step must lie in [1, horizon length]");
  }
}

void BacktestData::validate() const {
  params.validate();
  if (home.size() == 0) throw DataGap("no price data for market '" + home.market_id + "'");
  check_finite(home);
  try {
    home.validate();
  } catch (const GapError& e) {
    throw DataGap(e.what());
  }
  for (const auto& r : remotes) {
    if (r.prices.timestamps != home.timestamps) {
      std::size_t i = 0;
      while (i < r.prices.size() && i < home.size() &&
             r.prices.timestamps[i] == home.timestamps[i]) {
        ++i;
      }
      const std::string where =
          i < home.size() ? format_iso8601(home.timestamps[i]) : "end of data";
      throw DataGap("market '" + r.prices.market_id + "' is not aligned with '" +
                    home.market_id + "' at " + where);
    }
    if (r.prices.buy.size() != r.prices.size() || r.prices.sell.size() != r.prices.size()) {
      throw LengthMismatch("market '" + r.prices.market_id + "' has ragged columns");
    }
    check_finite(r.prices);
    r.interconnector.validate();
    const auto& ic = r.interconnector;
    if ((!ic.rent.empty() && ic.rent.size() != home.size()) ||
        (!ic.flow.empty() && ic.flow.size() != home.size())) {
      throw LengthMismatch("interconnector series for '" + r.prices.market_id +
                           "' do not match the price data length");
    }
  }
}

SimulationReport run_backtest(const BacktestData& data, const BacktestOptions& options) {
  data.validate();
  options.plan.validate();
  if (options.model == ModelKind::kMrea && data.remotes.empty()) {
    throw InvalidArgument("the mrea model needs at least one remote market");
  }
  const std::size_t n = data.home.size();
  const std::size_t step = options.plan.step;
  const std::size_t horizon = options.plan.horizon_length;
  const std::size_t count = (n + step - 1) / step;
  const std::size_t markets = options.model == ModelKind::kMrea ? 1 + data.remotes.size() : 1;
  const Efficiencies phys = physical_efficiencies(data.params);

  SimulationReport report;
  report.model = options.model;
  report.market_ids.push_back(data.home.market_id);
  if (markets > 1) {
    for (const auto& r : data.remotes) report.market_ids.push_back(r.prices.market_id);
  }
  report.x.assign(markets, {});

  auto window_len = [&](std::size_t w) { return std::min(horizon, n - w * step); };

  std::vector<WindowSolve> pre;
  if (!options.plan.soc_chaining && options.threads > 1 && count > 1) {
    pre.resize(count);
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    const unsigned workers = std::min<unsigned>(options.threads, static_cast<unsigned>(count));
    for (unsigned k = 0; k < workers; ++k) {
      pool.emplace_back([&] {
        for (std::size_t w = next++; w < count; w = next++) {
          pre[w] = solve_window(data, options, w * step, window_len(w), data.params.b0);
        }
      });
    }
    for (auto& t : pool) t.join();
  }

  std::map<int, YearAccumulator> years;
  double b = data.params.b0;
  for (std::size_t w = 0; w < count; ++w) {
    const std::size_t begin = w * step;
    const std::size_t len = window_len(w);
    const std::size_t commit = std::min(step, len);
    const double b_start = options.plan.soc_chaining ? b : data.params.b0;
    WindowSolve solved =
        pre.empty() ? solve_window(data, options, begin, len, b_start) : std::move(pre[w]);

    WindowRecord rec;
    rec.index = w;
    rec.start = data.home.timestamps[begin];
    rec.committed = commit;
    rec.status = solved.status;
    rec.wall_time = solved.wall_time;
    rec.b_start = std::clamp(b_start, data.params.b_min, data.params.b_max);
    if (solved.error) {
      std::string what;
      std::string status;
      try {
        std::rethrow_exception(solved.error);
      } catch (const SolverFailure& e) {
        what = e.what();
        status = e.status();
      }
      const std::string msg =
          "window " + std::to_string(w) + " (" + format_iso8601(rec.start) + "): " + what;
      if (!options.continue_on_failure) throw SolverFailure(msg, status);
      spdlog::warn("{}; battery idles for this window", msg);
      rec.failed = true;
      rec.error = what;
      solved.x.assign(markets, std::vector<double>(len, 0.0));
      report.failed_windows.push_back(w);
    }

    std::vector<double> total(commit, 0.0);
    std::vector<double> revenue_by_market(markets, 0.0);
    for (std::size_t m = 0; m < markets; ++m) {
      const std::span<const double> xs(solved.x[m].data(), commit);
      for (std::size_t i = 0; i < commit; ++i) total[i] += xs[i];
      if (!rec.failed) {
        revenue_by_market[m] = true_revenue(
            xs, std::span<const double>(solved.prices[m].buy.data(), commit),
            std::span<const double>(solved.prices[m].sell.data(), commit), phys);
      }
      report.x[m].insert(report.x[m].end(), xs.begin(), xs.end());
      rec.revenue += revenue_by_market[m];
    }
    if (markets > 1) {
      std::vector<std::vector<double>> remote;
      for (std::size_t m = 1; m < markets; ++m) {
        remote.emplace_back(solved.x[m].begin(), solved.x[m].begin() + static_cast<std::ptrdiff_t>(commit));
      }
      rec.m_ind = conflict_metric(
          std::vector<double>(solved.x[0].begin(), solved.x[0].begin() + static_cast<std::ptrdiff_t>(commit)),
          remote);
    }
    SocTrajectory traj = soc_levels(rec.b_start, total);
    // Round-off may leave the last level a hair outside the band; the next
    // window must start from the same value it reports.
    traj.levels.back() = std::clamp(traj.final(), data.params.b_min, data.params.b_max);
    rec.b_end = traj.final();
    rec.cycles = count_cycles(traj, data.params, options.cycles);
    b = rec.b_end;
    if (rec.b_start != b_start) {
      spdlog::debug("window {} start SOC {} clamped to {}", w, b_start, rec.b_start);
    }
    for (std::size_t i = 0; i < commit; ++i) {
      report.timestamps.push_back(data.home.timestamps[begin + i]);
      report.soc.push_back(traj.levels[i + 1]);
    }

    YearAccumulator& acc = years[year_of(rec.start)];
    acc.windows += 1;
    acc.failures += rec.failed ? 1 : 0;
    acc.revenue += rec.revenue;
    acc.window_cycles += rec.cycles;
    acc.wall_time += rec.wall_time;
    if (markets > 1) {
      acc.m_ind = acc.any_m_ind ? std::max(acc.m_ind, rec.m_ind) : rec.m_ind;
      acc.any_m_ind = true;
    }
    acc.market_revenue.resize(markets, 0.0);
    for (std::size_t m = 0; m < markets; ++m) acc.market_revenue[m] += revenue_by_market[m];
    if (acc.levels.empty()) acc.levels.push_back(rec.b_start);
    acc.levels.insert(acc.levels.end(), traj.levels.begin() + 1, traj.levels.end());
    report.windows.push_back(std::move(rec));
  }

  std::vector<PerformanceIndices> yearly;
  for (auto& [year, acc] : years) {
    YearReport yr;
    yr.year = year;
    yr.windows = acc.windows;
    yr.failures = acc.failures;
    // A chained year is one continuous trajectory; otherwise windows restart.
    const double cycles = options.plan.soc_chaining
                              ? count_cycles(SocTrajectory{acc.levels}, data.params, options.cycles)
                              : acc.window_cycles;
    yr.indices = make_indices(acc.revenue, cycles, acc.m_ind, acc.wall_time);
    yr.market_revenue = acc.market_revenue;
    yearly.push_back(yr.indices);
    report.years.push_back(std::move(yr));
  }
  report.total = total_indices(yearly);
  report.mean_yearly_revenue_per_cycle = mean_of_ratios(yearly);
  return report;
}

void ScenarioSet::validate() const {
  if (scenarios.empty()) throw InvalidArgument("a scenario set needs at least one scenario");
  const MreaInstance& first = scenarios.front();
  for (std::size_t s = 0; s < scenarios.size(); ++s) {
    const MreaInstance& inst = scenarios[s];
    inst.validate();
    const std::string tag = "scenario " + std::to_string(s);
    if (!(inst.params == first.params)) {
      throw InvalidArgument(tag + " has different battery parameters");
    }
    if (inst.markets() != first.markets()) {
      throw InvalidArgument(tag + " has a different number of markets");
    }
    if (inst.intervals() != first.intervals()) {
      throw LengthMismatch(tag + " has a different length");
    }
    if (inst.home.spacing() != first.home.spacing()) {
      throw InvalidArgument(tag + " has a different interval spacing");
    }
  }
}

SaaModel build_saa(const ScenarioSet& set, const HorizonPlan& plan, bool use_flow_envelopes) {
  set.validate();
  plan.validate();
  const std::size_t count = set.scenarios.size();
  const std::size_t n = std::min(plan.horizon_length, set.scenarios.front().intervals());
  const BatteryParams& params = set.scenarios.front().params;
  const double weight = 1.0 / static_cast<double>(count);
  auto prefix = [count](std::size_t s) {
    return count == 1 ? std::string() : "s" + std::to_string(s + 1) + "_";
  };

  SaaModel model;
  model.lp = lp::LinearProgram(count == 1 ? "mrea" : "saa");
  std::vector<std::vector<std::vector<RampBounds>>> bounds;
  for (const MreaInstance& full : set.scenarios) {
    MreaInstance inst = full;
    inst.horizon = n;
    model.prices.push_back(market_prices(inst));
    bounds.push_back(market_bounds(inst, use_flow_envelopes));
  }
  if (set.shared_dispatch) {
    auto common = bounds.front();
    for (const auto& b : bounds) {
      for (std::size_t m = 0; m < common.size(); ++m) {
        for (std::size_t i = 0; i < n; ++i) {
          common[m][i].x_min = std::max(common[m][i].x_min, b[m][i].x_min);
          common[m][i].x_max = std::min(common[m][i].x_max, b[m][i].x_max);
        }
      }
    }
    model.blocks.push_back(add_dispatch_block(model.lp, params, common));
    for (std::size_t s = 0; s < count; ++s) {
      model.t.push_back(add_epigraph_block(model.lp, params, model.blocks.front(),
                                           model.prices[s], weight, prefix(s)));
    }
  } else {
    for (std::size_t s = 0; s < count; ++s) {
      model.blocks.push_back(add_dispatch_block(model.lp, params, bounds[s], prefix(s)));
      model.t.push_back(
          add_epigraph_block(model.lp, params, model.blocks.back(), model.prices[s], weight, prefix(s)));
    }
  }
  return model;
}

SaaResult run_saa(const ScenarioSet& set, const HorizonPlan& plan, const MreaOptions& options) {
  const auto start = Clock::now();
  const SaaModel model = build_saa(set, plan, options.use_flow_envelopes);
  const BatteryParams& params = set.scenarios.front().params;
  SaaResult out;

  auto cost_of = [](const std::vector<std::vector<lp::VarId>>& t, const lp::SolveResult& r) {
    double sum = 0.0;
    for (const auto& row : t) {
      for (lp::VarId v : row) sum += r.value(v);
    }
    return sum;
  };

  if (set.shared_dispatch) {
    const lp::SolveResult result = lp::solve(model.lp, options.solver);
    if (!result.optimal()) detail::throw_solver_failure("SAA", result.status);
    for (std::size_t s = 0; s < set.scenarios.size(); ++s) {
      MreaSolution sol =
          extract_solution(params, model.blocks.front(), model.t[s], model.prices[s], result);
      sol.objective = cost_of(model.t[s], result);
      out.scenario_costs.push_back(sol.objective);
      out.scenarios.push_back(std::move(sol));
    }
    out.objective = result.objective_value;
    out.status = result.status;
  } else {
    // Recourse scenarios share no variables, so each one is solved on its own.
    double sum = 0.0;
    for (const MreaInstance& full : set.scenarios) {
      MreaInstance inst = full;
      inst.horizon = std::min(plan.horizon_length, full.intervals());
      MreaSolution sol = solve_mrea(inst, options);
      out.scenario_costs.push_back(sol.objective);
      sum += sol.objective;
      out.scenarios.push_back(std::move(sol));
    }
    out.objective = set.scenarios.size() == 1
                        ? sum
                        : sum / static_cast<double>(set.scenarios.size());
    out.status = lp::SolveStatus::kOptimal;
  }
  out.wall_time = seconds_since(start);
  for (auto& sol : out.scenarios) sol.wall_time = out.wall_time;
  return out;
}

BacktestData perturb(const BacktestData& data, const PerturbationSpec& spec, std::size_t run) {
  if (!(spec.sigma >= 0.0)) throw InvalidArgument("perturbation sigma must be nonnegative");
  BacktestData out = data;
  if (spec.sigma == 0.0) return out;
  std::seed_seq seq{static_cast<std::uint32_t>(spec.seed), static_cast<std::uint32_t>(spec.seed >> 32),
                    static_cast<std::uint32_t>(run), static_cast<std::uint32_t>(std::uint64_t{run} >> 32)};
  std::mt19937_64 rng(seq);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double shift = -0.5 * spec.sigma * spec.sigma;
  auto apply = [&](PriceSeries& s) {
    for (std::size_t i = 0; i < s.size(); ++i) {
      const double f = std::exp(spec.sigma * normal(rng) + shift);
      s.buy[i] *= f;
      s.sell[i] *= f;
    }
  };
  apply(out.home);
  for (auto& r : out.remotes) apply(r.prices);
  return out;
}

Distribution summarize(std::vector<double> values) {
  Distribution d;
  if (values.empty()) return d;
  std::sort(values.begin(), values.end());
  d.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
  auto quantile = [&](double q) {
    const double pos = q * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, values.size() - 1);
    return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
  };
  d.p50 = quantile(0.5);
  d.p95 = quantile(0.95);
  d.min = values.front();
  d.max = values.back();
  return d;
}

MonteCarloReport run_monte_carlo(const BacktestData& data, const BacktestOptions& options,
                                 const MonteCarloOptions& mc) {
  if (mc.runs == 0) throw InvalidArgument("Monte Carlo needs at least one run");
  MonteCarloReport out;
  out.revenues.resize(mc.runs);
  out.cycles.resize(mc.runs);
  out.wall_times.resize(mc.runs);
  BacktestOptions inner = options;
  inner.threads = 1;

  unsigned workers = mc.threads == 0 ? std::thread::hardware_concurrency() : mc.threads;
  workers = std::clamp<unsigned>(workers, 1, static_cast<unsigned>(std::min<std::size_t>(mc.runs, 1024)));
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&] {
    for (std::size_t r = next++; r < mc.runs; r = next++) {
      try {
        const auto start = Clock::now();
        const SimulationReport rep = run_backtest(perturb(data, mc.noise, r), inner);
        out.wall_times[r] = seconds_since(start);
        out.revenues[r] = rep.total.revenue;
        out.cycles[r] = rep.total.cycles;
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = mc.runs;
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned k = 1; k < workers; ++k) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
  out.revenue = summarize(out.revenues);
  out.runtime = summarize(out.wall_times);
  return out;
}

}  // namespace mrea
