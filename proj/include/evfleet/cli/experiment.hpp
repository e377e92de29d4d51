#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "evfleet/planner/params.hpp"
#include "evfleet/planner/plan.hpp"
#include "evfleet/policies/policies.hpp"
#include "evfleet/scenario/scenario.hpp"
#include "evfleet/sim/sim.hpp"

namespace evfleet::cli {

// Seeds of the estimation days and the evaluation days. Both are consecutive
// runs from their first seed.
struct SeedPlan {
  std::uint64_t estimation_first = 1;
  int estimation_count = 10;
  std::vector<std::uint64_t> evaluation = {11, 12, 13, 14, 15};
};

struct PipelineConfig {
  scenario::ScenarioConfig scenario;
  sim::SimConfig sim;
  planner::PlanConfig plan;
  SeedPlan seeds;
};

scenario::Scenario ScenarioFor(const scenario::ScenarioConfig& cfg, std::uint64_t seed);

// Demand for energy from runs that never charge, waits and opportunity cost
// from Fastest runs, prices from the scenario schedule.
planner::PlanParams EstimateParams(const PipelineConfig& cfg);
// Same from given days (for instance loaded bundles) instead of generated ones.
planner::PlanParams EstimateParams(const PipelineConfig& cfg, const std::vector<scenario::Scenario>& days);

// Plan for the fleet of `cfg`. The fleet does not depend on the seed beyond
// positions, which the plan ignores.
planner::DayAheadPlan PlanFor(const PipelineConfig& cfg, const planner::PlanParams& params);

struct RunRecord {
  std::string label;  // free-form cell key
  policies::PolicyKind policy = policies::PolicyKind::kNearest;
  policies::QueueBehavior queue = policies::QueueBehavior::kNaive;
  std::uint64_t seed = 0;
  sim::KpiReport kpi;
};

// Holds the estimated parameters and plan of one configuration so that
// several policies and seeds reuse them.
class Experiment {
 public:
  explicit Experiment(PipelineConfig cfg);

  const PipelineConfig& config() const { return cfg_; }

  // Estimated on first use unless supplied.
  const planner::PlanParams& Params();
  void SetParams(planner::PlanParams params);
  const planner::DayAheadPlan& Plan();
  void SetPlan(planner::DayAheadPlan plan);

  sim::DayResult RunDay(policies::PolicyKind policy, std::uint64_t seed);
  std::vector<RunRecord> RunAll(const std::vector<policies::PolicyKind>& policies,
                                const std::string& label = {});

 private:
  PipelineConfig cfg_;
  std::optional<planner::PlanParams> params_;
  std::optional<planner::DayAheadPlan> plan_;
};

// Field-wise mean of the scalar KPIs.
sim::KpiReport Mean(const std::vector<sim::KpiReport>& reports);

inline constexpr const char* kKpiSchema = "kpi_v1";

// One row per record, then a mean row per (label, policy, queue) group with
// seed "mean".
void WriteKpiCsv(std::ostream& out, const std::vector<RunRecord>& records);

// Per-epoch charging and waiting counts plus end-of-day levels, long format.
void WriteSeriesCsv(std::ostream& out, const std::vector<RunRecord>& records);
void WriteSocCsv(std::ostream& out, const std::vector<RunRecord>& records);

// Applies `key=value` to the pipeline: simulation keys (policy,
// queue_behavior, max_wait_at_charger_min, max_queue_wait, anticipate,
// randomized_target, hour_mapping, plan_blocks, plan_node_limit, plan_gap,
// plan_time_limit, estimation_runs, estimation_seed) or any scenario key.
// "inf" and "none" mean no limit for the wait keys; plan_blocks takes "auto". Throws ConfigError naming the key.
void ApplySetting(PipelineConfig& cfg, const std::string& key, const std::string& value);

// Splits "key=value"; throws ConfigError when there is no key.
std::pair<std::string, std::string> SplitSetting(const std::string& kv);

struct SweepAxis {
  std::string key;
  std::vector<std::string> values;
};

// Parses "key=v1,v2,..." axes. Throws ConfigError on an empty grid or axis.
std::vector<SweepAxis> ParseGrid(const std::vector<std::string>& specs);

struct SweepCell {
  std::string label;  // "k1=v1;k2=v2"
  PipelineConfig config;
};

// Cross product of the axes applied to `base`, last axis varying fastest.
std::vector<SweepCell> ExpandGrid(const PipelineConfig& base, const std::vector<SweepAxis>& axes);

}  // namespace evfleet::cli
