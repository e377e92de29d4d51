#include "evfleet/cli/experiment.hpp"

#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>
#include <tuple>

#include <fmt/format.h>

namespace evfleet::cli {

namespace {

double WaitLimit(const std::string& key, const std::string& value) {
  if (value == "inf" || value == "none" || value == "no-limit") {
    return std::numeric_limits<double>::infinity();
  }
  try {
    std::size_t used = 0;
    const double v = std::stod(value, &used);
    if (used == value.size() && v >= 0) return v;
  } catch (const std::exception&) {
  }
  throw ConfigError(fmt::format("{}: '{}' is not a nonnegative number or inf", key, value));
}

bool Flag(const std::string& key, const std::string& value) {
  if (value == "1" || value == "true" || value == "on" || value == "yes") return true;
  if (value == "0" || value == "false" || value == "off" || value == "no") return false;
  throw ConfigError(fmt::format("{}: '{}' is not on/off", key, value));
}

int Count(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const int v = std::stoi(value, &used);
    if (used == value.size() && v > 0) return v;
  } catch (const std::exception&) {
  }
  throw ConfigError(fmt::format("{}: '{}' is not a positive integer", key, value));
}

}  // namespace

scenario::Scenario ScenarioFor(const scenario::ScenarioConfig& cfg, std::uint64_t seed) {
  scenario::ScenarioConfig c = cfg;
  c.seed = seed;
  return scenario::Generate(c);
}

planner::PlanParams EstimateParams(const PipelineConfig& cfg) {
  if (cfg.seeds.estimation_count <= 0) throw ConfigError("estimation needs at least one run");
  std::vector<scenario::Scenario> days;
  for (int i = 0; i < cfg.seeds.estimation_count; ++i) {
    days.push_back(ScenarioFor(cfg.scenario, cfg.seeds.estimation_first + static_cast<std::uint64_t>(i)));
  }
  return EstimateParams(cfg, days);
}

planner::PlanParams EstimateParams(const PipelineConfig& cfg, const std::vector<scenario::Scenario>& days) {
  if (days.empty()) throw ConfigError("estimation needs at least one dataset");
  const TimeGrid& grid = days.front().config.grid;
  std::vector<DayLog> dry;
  std::vector<DayLog> fastest;
  std::vector<double> arrivals(static_cast<std::size_t>(grid.NumEpochs()), 0.0);
  for (const scenario::Scenario& sc : days) {
    if (sc.config.grid.NumEpochs() != grid.NumEpochs() || sc.chargers.size() != days.front().chargers.size()) {
      throw ConfigError("estimation datasets disagree on the time grid or the charger network");
    }
    for (const auto& r : sc.requests) {
      const int h = grid.EpochOf(r.arrival_time);
      if (h >= 0 && h < grid.NumEpochs()) arrivals[h] += 1.0 / static_cast<double>(days.size());
    }
    sim::SimConfig s = cfg.sim;
    s.policy = policies::PolicyKind::kFastest;
    s.trace = false;
    s.seed = sc.config.seed;
    s.energy_unconstrained = true;
    dry.push_back(sim::RunDay(sc, s).log);
    s.energy_unconstrained = false;
    fastest.push_back(sim::RunDay(sc, s).log);
  }
  planner::PlanParams p;
  p.delta = planner::EstimateDelta(dry, grid, days.front().config.econ);
  planner::WaitAndGamma wg = planner::EstimateWaitAndGamma(fastest, grid);
  p.wait = std::move(wg.wait);
  p.gamma = wg.gamma;
  p.access_cost = days.front().config.econ.access_cost;
  p.price = days.front().prices.EpochPrices(grid);
  p.arrivals = std::move(arrivals);
  p.Validate();
  return p;
}

planner::DayAheadPlan PlanFor(const PipelineConfig& cfg, const planner::PlanParams& params) {
  const scenario::Scenario sc = ScenarioFor(cfg.scenario, cfg.seeds.estimation_first);
  return planner::SolvePlan(sc.fleet, sc.chargers, params, cfg.scenario.grid, cfg.plan);
}

Experiment::Experiment(PipelineConfig cfg) : cfg_(std::move(cfg)) {
  cfg_.scenario.Validate();
  cfg_.sim.Validate();
}

const planner::PlanParams& Experiment::Params() {
  if (!params_) params_ = EstimateParams(cfg_);
  return *params_;
}

void Experiment::SetParams(planner::PlanParams params) {
  params.Validate();
  params_ = std::move(params);
  plan_.reset();
}

const planner::DayAheadPlan& Experiment::Plan() {
  if (!plan_) plan_ = PlanFor(cfg_, Params());
  return *plan_;
}

void Experiment::SetPlan(planner::DayAheadPlan plan) { plan_ = std::move(plan); }

sim::DayResult Experiment::RunDay(policies::PolicyKind policy, std::uint64_t seed) {
  const scenario::Scenario sc = ScenarioFor(cfg_.scenario, seed);
  sim::SimConfig s = cfg_.sim;
  s.policy = policy;
  s.seed = seed;
  if (policy == policies::PolicyKind::kCongestionAware) {
    const planner::DayAheadPlan& plan = Plan();
    return sim::RunDay(sc, s, &plan, &Params());
  }
  return sim::RunDay(sc, s);
}

std::vector<RunRecord> Experiment::RunAll(const std::vector<policies::PolicyKind>& policies,
                                          const std::string& label) {
  if (cfg_.seeds.evaluation.empty()) throw ConfigError("no evaluation seeds");
  std::vector<RunRecord> out;
  for (auto policy : policies) {
    for (auto seed : cfg_.seeds.evaluation) {
      RunRecord rec;
      rec.label = label;
      rec.policy = policy;
      rec.queue = cfg_.sim.queue_behavior;
      rec.seed = seed;
      rec.kpi = RunDay(policy, seed).kpi;
      out.push_back(std::move(rec));
    }
  }
  return out;
}

sim::KpiReport Mean(const std::vector<sim::KpiReport>& reports) {
  sim::KpiReport m;
  if (reports.empty()) return m;
  m.sr = 0.0;
  double arrived = 0, served = 0, abandoned = 0, sessions = 0;
  for (const auto& r : reports) {
    m.pf += r.pf;
    m.tr += r.tr;
    m.ttc += r.ttc;
    m.cc += r.cc;
    m.eng += r.eng;
    m.sr += r.sr;
    m.kmt += r.kmt;
    m.tw += r.tw;
    m.tc += r.tc;
    m.access_cost += r.access_cost;
    m.mean_queue_wait += r.mean_queue_wait;
    m.max_queue_wait += r.max_queue_wait;
    arrived += r.arrived;
    served += r.served;
    abandoned += r.abandoned;
    sessions += r.sessions;
  }
  const double n = static_cast<double>(reports.size());
  for (double* f : {&m.pf, &m.tr, &m.ttc, &m.cc, &m.eng, &m.sr, &m.kmt, &m.tw, &m.tc, &m.access_cost,
                    &m.mean_queue_wait, &m.max_queue_wait}) {
    *f /= n;
  }
  m.arrived = static_cast<int>(std::lround(arrived / n));
  m.served = static_cast<int>(std::lround(served / n));
  m.abandoned = static_cast<int>(std::lround(abandoned / n));
  m.sessions = static_cast<int>(std::lround(sessions / n));
  return m;
}

namespace {

void KpiRow(std::ostream& out, const std::string& label, std::string_view policy, std::string_view queue,
            const std::string& seed, const sim::KpiReport& k) {
  out << fmt::format("{},{},{},{},{},{:.4f},{:.4f},{:.4f},{:.4f},{:.2f},{:.2f},{:.4f},{:.3f},{:.3f},{},{},{},{},{:.4f},{:.3f},{:.3f}\n",
                     kKpiSchema, label, policy, queue, seed, k.pf, k.tr, k.ttc, k.cc, k.eng, 100.0 * k.sr,
                     k.kmt, k.tw, k.tc, k.arrived, k.served, k.abandoned, k.sessions, k.access_cost,
                     k.mean_queue_wait, k.max_queue_wait);
}

}  // namespace

void WriteKpiCsv(std::ostream& out, const std::vector<RunRecord>& records) {
  out << "schema,label,policy,queue,seed,PF,TR,TTC,CC,ENG,SR,KMT,TW,TC,arrived,served,abandoned,"
         "sessions,AC,mean_queue_wait,max_queue_wait\n";
  using Key = std::tuple<std::string, int, int>;
  std::vector<Key> order;
  std::map<Key, std::vector<sim::KpiReport>> groups;
  for (const auto& r : records) {
    KpiRow(out, r.label, policies::ToString(r.policy), policies::ToString(r.queue), std::to_string(r.seed),
           r.kpi);
    const Key key{r.label, static_cast<int>(r.policy), static_cast<int>(r.queue)};
    if (!groups.count(key)) order.push_back(key);
    groups[key].push_back(r.kpi);
  }
  for (const auto& key : order) {
    KpiRow(out, std::get<0>(key), policies::ToString(static_cast<policies::PolicyKind>(std::get<1>(key))),
           policies::ToString(static_cast<policies::QueueBehavior>(std::get<2>(key))), "mean",
           Mean(groups[key]));
  }
}

void WriteSeriesCsv(std::ostream& out, const std::vector<RunRecord>& records) {
  out << "label,policy,queue,seed,epoch,charging,waiting\n";
  for (const auto& r : records) {
    for (std::size_t h = 0; h < r.kpi.charging_per_epoch.size(); ++h) {
      out << fmt::format("{},{},{},{},{},{},{}\n", r.label, policies::ToString(r.policy),
                         policies::ToString(r.queue), r.seed, h, r.kpi.charging_per_epoch[h],
                         r.kpi.waiting_per_epoch[h]);
    }
  }
}

void WriteSocCsv(std::ostream& out, const std::vector<RunRecord>& records) {
  out << "label,policy,queue,seed,vehicle_id,soc_kwh\n";
  for (const auto& r : records) {
    for (std::size_t v = 0; v < r.kpi.end_soc.size(); ++v) {
      out << fmt::format("{},{},{},{},{},{:.4f}\n", r.label, policies::ToString(r.policy),
                         policies::ToString(r.queue), r.seed, v, r.kpi.end_soc[v]);
    }
  }
}

void ApplySetting(PipelineConfig& cfg, const std::string& key, const std::string& value) {
  if (key == "policy") cfg.sim.policy = policies::ParsePolicy(value);
  else if (key == "queue_behavior") cfg.sim.queue_behavior = policies::ParseQueueBehavior(value);
  else if (key == "max_wait_at_charger_min") cfg.sim.max_wait_at_charger = WaitLimit(key, value);
  else if (key == "max_queue_wait") cfg.sim.max_queue_wait = WaitLimit(key, value);
  else if (key == "max_chasing_moves") cfg.sim.max_chasing_moves = Count(key, value);
  else if (key == "anticipate") cfg.sim.anticipate = Flag(key, value);
  else if (key == "randomized_target") cfg.sim.randomized_target = Flag(key, value);
  else if (key == "hour_mapping") cfg.sim.hour_mapping = policies::ParseHourMapping(value);
  else if (key == "plan_blocks") cfg.plan.blocks = value == "auto" ? 0 : Count(key, value);
  else if (key == "plan_node_limit") cfg.plan.solver.node_limit = Count(key, value);
  else if (key == "plan_gap") cfg.plan.solver.relative_gap_tol = WaitLimit(key, value);
  else if (key == "plan_time_limit") cfg.plan.solver.time_limit_seconds = WaitLimit(key, value);
  else if (key == "estimation_runs") cfg.seeds.estimation_count = Count(key, value);
  else if (key == "estimation_seed") cfg.seeds.estimation_first = static_cast<std::uint64_t>(Count(key, value));
  else cfg.scenario.Set(key, value);
}

std::pair<std::string, std::string> SplitSetting(const std::string& kv) {
  const auto eq = kv.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw ConfigError(fmt::format("setting '{}' is not key=value", kv));
  }
  return {kv.substr(0, eq), kv.substr(eq + 1)};
}

std::vector<SweepAxis> ParseGrid(const std::vector<std::string>& specs) {
  if (specs.empty()) throw ConfigError("sweep needs at least one --grid key=v1,v2,...");
  std::vector<SweepAxis> axes;
  for (const auto& spec : specs) {
    auto [key, values] = SplitSetting(spec);
    SweepAxis axis{key, {}};
    std::stringstream ss(values);
    std::string v;
    while (std::getline(ss, v, ',')) {
      if (!v.empty()) axis.values.push_back(v);
    }
    if (axis.values.empty()) throw ConfigError(fmt::format("grid axis '{}' has no values", key));
    axes.push_back(std::move(axis));
  }
  return axes;
}

std::vector<SweepCell> ExpandGrid(const PipelineConfig& base, const std::vector<SweepAxis>& axes) {
  std::size_t cells = 1;
  for (const auto& a : axes) cells *= a.values.size();
  std::vector<SweepCell> out;
  std::vector<std::size_t> idx(axes.size(), 0);
  for (std::size_t cell = 0; cell < cells; ++cell) {
    SweepCell c{{}, base};
    for (std::size_t a = 0; a < axes.size(); ++a) {
      const std::string& value = axes[a].values[idx[a]];
      ApplySetting(c.config, axes[a].key, value);
      c.label += fmt::format("{}{}={}", a ? ";" : "", axes[a].key, value);
    }
    c.config.scenario.Validate();
    c.config.sim.Validate();
    out.push_back(std::move(c));
    for (std::size_t a = axes.size(); a-- > 0;) {
      if (++idx[a] < axes[a].values.size()) break;
      idx[a] = 0;
    }
  }
  return out;
}

}  // namespace evfleet::cli
