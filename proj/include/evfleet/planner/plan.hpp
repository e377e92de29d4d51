#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "evfleet/core/types.hpp"
#include "evfleet/milp/model.hpp"
#include "evfleet/milp/solver.hpp"
#include "evfleet/planner/params.hpp"

namespace evfleet::planner {

struct PlanWindow {
  bool open = false;
  int start = 0;     // first 0-based epoch of the window
  double e0 = 0.0;   // anticipated level at the start of that epoch
};

// The window opens at the first epoch whose anticipated starting level
// (initial level minus the consumption of all earlier epochs) is at most
// e_max, and runs to the end of the day.
PlanWindow ComputePlanWindow(double e_init, double e_max, std::span<const double> delta);

struct PlanEntry {
  int vehicle_id = 0;
  int epoch = 0;
  int charger_id = 0;
  double energy = 0.0;      // kWh charged in the epoch
  double soc_before = 0.0;  // planned level at the start of the epoch
  double target_soc = 0.0;  // planned level right after charging
};

struct VehiclePlan {
  int vehicle_id = 0;
  PlanWindow window;
  std::vector<double> soc;  // planned level at epochs start..num_epochs (inclusive)
};

struct DayAheadPlan {
  std::vector<PlanEntry> entries;  // sorted by (vehicle_id, epoch)
  std::vector<VehiclePlan> vehicles;
  double objective = 0.0;
  milp::SolveStatus status = milp::SolveStatus::kOptimal;
  double relative_gap = 0.0;

  std::vector<const PlanEntry*> EntriesAt(int epoch) const;
  const PlanEntry* Find(int vehicle_id, int epoch) const;

  void WriteCsv(std::ostream& out) const;
  static DayAheadPlan ReadCsv(std::istream& in);
  void Save(const std::filesystem::path& path) const;
  static DayAheadPlan Load(const std::filesystem::path& path);
};

struct PlanModel {
  milp::MilpModel model;
  struct VehicleVars {
    PlanWindow window;
    std::vector<int> e;               // epochs start..num_epochs
    std::vector<std::vector<int>> x;  // [epoch - start][charger]
    std::vector<std::vector<int>> y;
  };
  std::vector<VehicleVars> vehicles;  // parallel to the fleet
};

// Per-unit costs shared by the model and the independent objective check.
double EnergyUnitCost(const PlanParams& p, int epoch, const Charger& c);
double AccessUnitCost(const PlanParams& p, int epoch, int charger_index);

PlanModel BuildPlanModel(const std::vector<Vehicle>& fleet, const std::vector<Charger>& chargers,
                         const PlanParams& params, const TimeGrid& grid);

struct PlanConfig {
  milp::SolverConfig solver = DefaultSolverConfig();
  // 0 picks AutoBlocks.
  int blocks = 0;

  static milp::SolverConfig DefaultSolverConfig();
};

// Largest k splitting the fleet and both charger classes evenly with at least
// ten vehicles per block, 1 when there is none.
int AutoBlocks(std::size_t vehicles, std::size_t fast, std::size_t slow);

// Solves the plan. With blocks = k > 1 the fleet and each charger class are
// split into k equal blocks; block 0 is solved and its plan is copied to the
// other blocks by position. Throws std::runtime_error when no plan is found
// and ConfigError when the fleet or chargers do not split evenly.
DayAheadPlan SolvePlan(const std::vector<Vehicle>& fleet, const std::vector<Charger>& chargers,
                       const PlanParams& params, const TimeGrid& grid, const PlanConfig& cfg = {});

// Re-checks every plan constraint from the plan alone. Returns an empty string
// when the plan is consistent, otherwise the first violation found.
std::string AuditPlan(const DayAheadPlan& plan, const std::vector<Vehicle>& fleet,
                      const std::vector<Charger>& chargers, const PlanParams& params,
                      const TimeGrid& grid, double tol = 1e-6);

// Objective recomputed from the entries.
double PlanCost(const DayAheadPlan& plan, const std::vector<Charger>& chargers,
                const PlanParams& params);

}  // namespace evfleet::planner
