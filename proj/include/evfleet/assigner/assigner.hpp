#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "evfleet/core/charger_outlook.hpp"
#include "evfleet/core/types.hpp"
#include "evfleet/milp/model.hpp"
#include "evfleet/milp/solver.hpp"

namespace evfleet::assigner {

enum class PoolReason : std::uint8_t { kPlanned, kLowSoc, kDelayed };

std::string_view ToString(PoolReason r);

struct PoolEntry {
  int vehicle_id = 0;
  PoolReason reason = PoolReason::kLowSoc;
  double target = 0.0;  // kWh
};

// Go-charge pool in admission order; a vehicle is held at most once.
class ChargePool {
 public:
  // Returns false (and changes nothing) when the vehicle is already pooled.
  bool Add(int vehicle_id, PoolReason reason, double target);
  void Remove(int vehicle_id);
  bool Contains(int vehicle_id) const { return Find(vehicle_id) != nullptr; }
  const PoolEntry* Find(int vehicle_id) const;
  PoolEntry* Find(int vehicle_id);
  const std::vector<PoolEntry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

 private:
  std::vector<PoolEntry> entries_;
};

// Energy still needed until the end of the day beyond a reserve of about
// e_min: sum of delta from `epoch` to the last epoch minus m * delta[epoch],
// m the largest integer with m * delta[epoch] <= e_min. Never negative.
double RemainingNeed(std::span<const double> delta, int epoch, double e_min);

// Charge-to level for a low-SoC admission. With anticipation off the
// vehicle is charged to `cap`.
double TargetSoc(double soc, std::span<const double> delta, int epoch, double e_min, double cap,
                 bool anticipate = true);

// Upper level of the randomized policy, uniform in [0.5 B, e_max].
double DrawTargetCap(const Vehicle& v, std::mt19937_64& rng);

// Smallest charge worth a trip: the minimum session on the most powerful
// charger.
double MinChargeEnergy(const std::vector<Charger>& chargers);

bool Eligible(const Vehicle& v, double target, double min_energy);

struct Candidate {
  int vehicle_id = 0;
  Point location;
  double soc = 0.0;
  double target = 0.0;
};

struct AssignInstance {
  double now = 0.0;
  std::vector<Candidate> vehicles;
  std::vector<Charger> chargers;
  std::vector<std::vector<double>> wait;  // [vehicle][charger] minutes at arrival
  EconomicParams params;
};

// Predicted queue wait of each candidate at each charger if it leaves now.
std::vector<std::vector<double>> PredictWaits(const std::vector<Candidate>& vehicles,
                                              const std::vector<Charger>& chargers,
                                              const std::vector<ChargerOutlook>& outlooks,
                                              double now, const EconomicParams& p);

// Target used inside the model: the requested level, lowered to what one
// epoch of charging on the best reachable charger can deliver.
double EffectiveTarget(const Candidate& v, const std::vector<Charger>& chargers,
                       const EconomicParams& p);

struct AssignModel {
  milp::MilpModel model;
  std::vector<std::vector<int>> x;    // [vehicle][charger]
  std::vector<std::vector<int>> psi;  // [vehicle][charger]
};

// Every candidate goes to exactly one charger and each charger takes at
// most one candidate, so more candidates than chargers is infeasible.
AssignModel BuildAssignModel(const AssignInstance& inst);

struct Assignment {
  int vehicle_id = 0;
  int charger_id = 0;
  double energy = 0.0;          // kWh planned
  double access_minutes = 0.0;
  double wait_minutes = 0.0;
  bool delayed = false;
};

struct AssignConfig {
  double max_queue_wait = 30.0;  // minutes; infinity disables delays
  milp::SolverConfig solver;
};

struct AssignmentOutcome {
  std::vector<Assignment> assignments;  // dispatched now
  std::vector<Assignment> delayed;      // solved but held back by the wait limit
  std::vector<int> removed;             // dropped by the relaxation loop, highest SoC first
  double objective = 0.0;               // minutes, of the last feasible model
  int solves = 0;
};

// Solves, dropping the highest-SoC candidate after each infeasible attempt.
AssignmentOutcome SolveWithRelaxation(AssignInstance inst, const AssignConfig& cfg = {});

// Empty when every assignment (delayed ones included) meets reachability,
// target, minimum duration and cap rules, and no charger or vehicle is used
// twice.
std::string CheckAssignments(const AssignInstance& inst, const AssignmentOutcome& out,
                             double tol = 1e-6);

}  // namespace evfleet::assigner
