#pragma once

#include <vector>

#include "evfleet/core/types.hpp"
#include "evfleet/milp/model.hpp"
#include "evfleet/milp/solver.hpp"

namespace evfleet::dispatch {

// Pending requests and idle vehicles at one batch epoch.
struct DispatchInstance {
  double now = 0.0;
  std::vector<Request> requests;
  std::vector<Vehicle> vehicles;
  EconomicParams params;
};

struct Match {
  int request = 0;  // index into DispatchInstance::requests
  int vehicle = 0;  // index into DispatchInstance::vehicles
  double net_profit = 0.0;
};

struct DispatchResult {
  std::vector<Match> matches;
  std::vector<int> abandoned;  // request indices whose wait reached the limit
  double objective = 0.0;      // USD
  milp::SolveStatus status = milp::SolveStatus::kOptimal;
};

struct DispatchModel {
  milp::MilpModel model;
  struct Pair {
    int request;
    int vehicle;
  };
  std::vector<Pair> pairs;  // one per variable
};

// Fare minus travel cost to reach and serve the request.
double NetProfit(const Request& r, const Vehicle& v, const EconomicParams& p);
bool HasEnergyFor(const Request& r, const Vehicle& v, const EconomicParams& p);
bool WithinWaitLimit(const Request& r, const Vehicle& v, double now, const EconomicParams& p);

// One binary per (request, vehicle). Pairs failing the energy or wait test
// are fixed to zero; the big-M rows are still emitted for every pair. Names
// are only attached when `named` is set (for export).
DispatchModel BuildDispatchModel(const DispatchInstance& inst, bool named = true);

// Requests already at the wait limit are abandoned before the model is built.
DispatchResult SolveDispatch(const DispatchInstance& inst, const milp::SolverConfig& cfg = {});

// Empty when the matching is a feasible partial assignment; otherwise a
// description of the first violation.
std::string CheckMatching(const DispatchInstance& inst, const std::vector<Match>& matches);

}  // namespace evfleet::dispatch
