// evfleet: run days, estimate planning parameters, sweep settings and check
// scenarios.
//
// Exit codes: 0 ok, 1 invalid input, 2 runtime failure.

#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "evfleet/cli/experiment.hpp"
#include "evfleet/core/csv.hpp"

namespace fs = std::filesystem;
using namespace evfleet;

namespace {

constexpr int kOk = 0;
constexpr int kInvalid = 1;
constexpr int kRuntime = 2;

constexpr std::size_t kLargeSweep = 200;

struct Common {
  std::string config;
  std::vector<std::string> sets;
  std::vector<std::uint64_t> seeds;
};

void AddCommon(CLI::App* app, Common& c) {
  app->add_option("-c,--config", c.config, "key = value settings file");
  app->add_option("-s,--set", c.sets, "override one setting, key=value (repeatable)");
  app->add_option("--seeds", c.seeds, "evaluation seeds")->delimiter(',');
}

cli::PipelineConfig Load(const Common& c) {
  cli::PipelineConfig cfg;
  if (!c.config.empty()) {
    std::ifstream in = csv::OpenOrThrow(c.config);
    std::string line;
    int n = 0;
    while (std::getline(in, line)) {
      ++n;
      const auto b = line.find_first_not_of(" \t\r");
      if (b == std::string::npos || line[b] == '#') continue;
      const auto eq = line.find('=');
      if (eq == std::string::npos) throw ConfigError(fmt::format("{}:{}: expected key = value", c.config, n));
      auto trim = [](std::string s) {
        const auto l = s.find_first_not_of(" \t\r");
        const auto r = s.find_last_not_of(" \t\r");
        return l == std::string::npos ? std::string() : s.substr(l, r - l + 1);
      };
      cli::ApplySetting(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
  }
  for (const auto& kv : c.sets) {
    const auto [k, v] = cli::SplitSetting(kv);
    cli::ApplySetting(cfg, k, v);
  }
  if (!c.seeds.empty()) cfg.seeds.evaluation = c.seeds;
  cfg.scenario.Validate();
  cfg.sim.Validate();
  return cfg;
}

std::vector<policies::PolicyKind> ParsePolicies(const std::vector<std::string>& names) {
  std::vector<policies::PolicyKind> out;
  for (const auto& n : names) {
    if (n == "all") {
      out.assign(policies::kBenchmarks.begin(), policies::kBenchmarks.end());
      out.push_back(policies::PolicyKind::kCongestionAware);
    } else {
      out.push_back(policies::ParsePolicy(n));
    }
  }
  return out;
}

std::ofstream Create(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw std::runtime_error(fmt::format("cannot write '{}'", path.string()));
  return out;
}

void WriteOutputs(const fs::path& dir, const std::string& kpi_name,
                  const std::vector<cli::RunRecord>& records) {
  {
    auto out = Create(dir / kpi_name);
    cli::WriteKpiCsv(out, records);
  }
  {
    auto out = Create(dir / "series.csv");
    cli::WriteSeriesCsv(out, records);
  }
  {
    auto out = Create(dir / "soc.csv");
    cli::WriteSocCsv(out, records);
  }
}

void PrepareCongestionAware(cli::Experiment& exp, const std::string& params_path,
                            const std::string& plan_path, const fs::path& out_dir) {
  if (!params_path.empty()) {
    exp.SetParams(planner::PlanParams::Load(params_path));
  } else {
    std::cerr << "estimating planning parameters\n";
    auto out = Create(out_dir / "params.csv");
    exp.Params().WriteCsv(out);
  }
  if (!plan_path.empty()) {
    exp.SetPlan(planner::DayAheadPlan::Load(plan_path));
  } else {
    std::cerr << "solving the day-ahead plan\n";
    auto out = Create(out_dir / "plan.csv");
    exp.Plan().WriteCsv(out);
  }
}

int CmdRun(const Common& c, const std::vector<std::string>& policy_names, const std::string& params_path,
           const std::string& plan_path, const std::string& out_dir, bool traces) {
  cli::PipelineConfig cfg = Load(c);
  cfg.sim.trace = traces;
  std::vector<policies::PolicyKind> pols =
      policy_names.empty() ? std::vector<policies::PolicyKind>{cfg.sim.policy} : ParsePolicies(policy_names);
  cli::Experiment exp(cfg);
  for (auto p : pols) {
    if (p == policies::PolicyKind::kCongestionAware) {
      PrepareCongestionAware(exp, params_path, plan_path, out_dir);
      break;
    }
  }
  std::vector<cli::RunRecord> records;
  for (auto p : pols) {
    for (auto seed : cfg.seeds.evaluation) {
      sim::DayResult day = exp.RunDay(p, seed);
      for (const auto& v : day.violations) std::cerr << "invariant: " << v << "\n";
      if (traces) {
        auto out = Create(fs::path(out_dir) / fmt::format("trace_{}_{}.csv", policies::ToString(p), seed));
        sim::WriteTrace(out, day.trace);
      }
      cli::RunRecord rec{"run", p, cfg.sim.queue_behavior, seed, std::move(day.kpi)};
      std::cout << fmt::format("{:<16} seed {:>3}  PF {:8.3f}  SR {:6.2f}%  TW {:7.2f} h\n",
                               policies::ToString(p), seed, rec.kpi.pf, 100.0 * rec.kpi.sr, rec.kpi.tw);
      records.push_back(std::move(rec));
    }
  }
  WriteOutputs(out_dir, "kpi.csv", records);
  return kOk;
}

int CmdEstimate(const Common& c, const std::vector<std::string>& datasets, const std::string& out_path) {
  cli::PipelineConfig cfg = Load(c);
  planner::PlanParams params;
  if (datasets.empty()) {
    params = cli::EstimateParams(cfg);
  } else {
    std::vector<scenario::Scenario> days;
    for (const auto& d : datasets) {
      if (!fs::is_directory(d)) throw ConfigError(fmt::format("dataset '{}' is not a directory", d));
      days.push_back(scenario::LoadBundle(d));
    }
    params = cli::EstimateParams(cfg, days);
  }
  auto out = Create(out_path);
  params.WriteCsv(out);
  std::cout << fmt::format("wrote {} ({} epochs, {} chargers, gamma {:.4f} USD/min)\n", out_path,
                           params.num_epochs(), params.num_chargers(), params.gamma);
  return kOk;
}

int CmdSweep(const Common& c, const std::vector<std::string>& grid, const std::vector<std::string>& policy_names,
             const std::string& out_dir, bool confirm) {
  const cli::PipelineConfig base = Load(c);
  const std::vector<cli::SweepCell> cells = cli::ExpandGrid(base, cli::ParseGrid(grid));
  std::vector<policies::PolicyKind> pols = ParsePolicies(policy_names.empty() ? std::vector<std::string>{"all"}
                                                                              : policy_names);
  const std::size_t runs = cells.size() * pols.size() * base.seeds.evaluation.size();
  if (runs > kLargeSweep && !confirm) {
    throw ConfigError(fmt::format("sweep of {} runs exceeds {}; pass --yes to run it", runs, kLargeSweep));
  }

  std::vector<cli::RunRecord> records;
  for (const auto& cell : cells) {
    std::cerr << "cell " << cell.label << "\n";
    cli::Experiment exp(cell.config);
    auto rows = exp.RunAll(pols, cell.label);
    records.insert(records.end(), rows.begin(), rows.end());
  }
  WriteOutputs(out_dir, "results.csv", records);
  std::cout << fmt::format("wrote {} rows to {}\n", records.size(), (fs::path(out_dir) / "results.csv").string());
  return kOk;
}

int CmdValidate(const Common& c, const std::string& bundle, const std::string& save) {
  scenario::Scenario sc;
  if (!bundle.empty()) {
    sc = scenario::LoadBundle(bundle);
  } else {
    const cli::PipelineConfig cfg = Load(c);
    sc = cli::ScenarioFor(cfg.scenario, cfg.seeds.evaluation.empty() ? cfg.scenario.seed
                                                                    : cfg.seeds.evaluation.front());
  }
  sc.Validate();
  int fast = 0;
  for (const auto& ch : sc.chargers) fast += ch.charger_class == ChargerClass::kFast;
  std::cout << fmt::format("ok: {} vehicles, {} chargers ({} fast, {} slow), {} requests, {} price steps\n",
                           sc.fleet.size(), sc.chargers.size(), fast, sc.chargers.size() - fast,
                           sc.requests.size(), sc.prices.steps().size());
  if (!save.empty()) scenario::SaveBundle(sc, save);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Electric ride-hailing fleet simulator"};
  app.require_subcommand(1);

  Common run_c, est_c, sweep_c, val_c;
  std::vector<std::string> run_policies, sweep_policies, sweep_grid, datasets;
  std::string params_path, plan_path, run_out = "out", est_out = "params.csv", sweep_out = "sweep";
  std::string bundle, save_bundle;
  bool traces = false;
  bool confirm = false;

  auto* run = app.add_subcommand("run", "simulate evaluation days for one or more policies");
  AddCommon(run, run_c);
  run->add_option("-p,--policy", run_policies, "policy names or 'all'")->delimiter(',');
  run->add_option("--params", params_path, "planning parameters file (estimated when absent)");
  run->add_option("--plan", plan_path, "day-ahead plan file (solved when absent)");
  run->add_option("-o,--out", run_out, "output directory");
  run->add_flag("--trace", traces, "write one event trace per run");

  auto* est = app.add_subcommand("estimate", "estimate planning parameters");
  AddCommon(est, est_c);
  est->add_option("-d,--dataset", datasets, "scenario bundle directory (repeatable); generated when absent");
  est->add_option("-o,--out", est_out, "output file");

  auto* sweep = app.add_subcommand("sweep", "cross product of settings, policies and seeds");
  AddCommon(sweep, sweep_c);
  sweep->add_option("-g,--grid", sweep_grid, "axis key=v1,v2,... (repeatable)");
  sweep->add_option("-p,--policy", sweep_policies, "policy names or 'all'")->delimiter(',');
  sweep->add_option("-o,--out", sweep_out, "output directory");
  sweep->add_flag("--yes", confirm, "allow large sweeps");

  auto* val = app.add_subcommand("validate-scenario", "generate or load a scenario and check it");
  AddCommon(val, val_c);
  val->add_option("-b,--bundle", bundle, "scenario bundle directory");
  val->add_option("--save", save_bundle, "write the scenario as a bundle");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInvalid;
  }

  try {
    if (*run) return CmdRun(run_c, run_policies, params_path, plan_path, run_out, traces);
    if (*est) return CmdEstimate(est_c, datasets, est_out);
    if (*sweep) return CmdSweep(sweep_c, sweep_grid, sweep_policies, sweep_out, confirm);
    if (*val) return CmdValidate(val_c, bundle, save_bundle);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInvalid;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kRuntime;
  }
  return kOk;
}
