#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

#include "evfleet/core/day_log.hpp"
#include "evfleet/milp/solver.hpp"
#include "evfleet/planner/params.hpp"
#include "evfleet/planner/plan.hpp"
#include "evfleet/policies/policies.hpp"
#include "evfleet/scenario/scenario.hpp"

namespace evfleet::sim {

// Declaration order is the tie-break priority among events at equal times.
enum class EventKind : std::uint8_t {
  kChargingFinished,
  kTripCompleted,
  kVehicleArrivedPickup,
  kVehicleArrivedCharger,
  kRequeueDecision,
  kChargingStarted,
  kRequestArrival,
  kChargeEpochTick,
  kBatchTick,
  kDayEnd,
};

std::string_view ToString(EventKind k);
EventKind ParseEventKind(std::string_view s);

struct SimConfig {
  policies::PolicyKind policy = policies::PolicyKind::kCongestionAware;
  policies::QueueBehavior queue_behavior = policies::QueueBehavior::kNaive;
  double max_wait_at_charger = 15.0;  // minutes, chasing behaviors only
  int max_chasing_moves = 3;
  // Assigned vehicles facing a longer predicted wait are held back.
  double max_queue_wait = 30.0;
  bool anticipate = true;
  bool randomized_target = false;
  policies::HourMapping hour_mapping = policies::HourMapping::kClock;
  // Vehicles never charge and energy is not checked; used to measure demand
  // for energy.
  bool energy_unconstrained = false;
  milp::SolverConfig dispatch_solver;
  milp::SolverConfig assign_solver;
  bool trace = true;
  std::uint64_t seed = 1;

  void Validate() const;
};

struct TraceRecord {
  double time = 0.0;
  EventKind kind = EventKind::kBatchTick;
  int vehicle = -1;
  int charger = -1;
  int request = -1;
  std::string detail;  // key=value pairs separated by ';'

  friend bool operator==(const TraceRecord&, const TraceRecord&) = default;
};

void WriteTrace(std::ostream& out, const std::vector<TraceRecord>& trace);
std::vector<TraceRecord> ReadTrace(std::istream& in);

struct KpiReport {
  double pf = 0.0;   // kUSD, tr - ttc - cc
  double tr = 0.0;   // kUSD fares of served requests
  double ttc = 0.0;  // kUSD travel cost
  double cc = 0.0;   // kUSD energy cost
  double eng = 0.0;  // kWh charged
  double sr = 1.0;   // served / arrived
  double kmt = 0.0;  // 1000 km driven
  double tw = 0.0;   // hours of queue wait at chargers
  double tc = 0.0;   // hours of charger occupancy
  int arrived = 0;
  int served = 0;
  int abandoned = 0;
  int sessions = 0;
  double access_cost = 0.0;       // kUSD, sessions times the per-access cost
  double mean_queue_wait = 0.0;   // minutes per charging trip
  double max_queue_wait = 0.0;    // minutes
  std::vector<int> charging_per_epoch;  // sampled at each epoch start
  std::vector<int> waiting_per_epoch;
  std::vector<double> end_soc;          // kWh per vehicle at the end of the run
};

struct DayResult {
  KpiReport kpi;
  DayLog log;
  std::vector<TraceRecord> trace;
  std::vector<double> queue_waits;      // minutes, one per charging trip (unfinished ones included)
  std::vector<std::string> violations;  // empty when every invariant held
};

// Simulates one service day. CongestionAware needs the plan and the
// parameters it was built from; other policies ignore them. Throws
// ConfigError on an inconsistent scenario or configuration.
DayResult RunDay(const scenario::Scenario& sc, const SimConfig& cfg,
                 const planner::DayAheadPlan* plan = nullptr,
                 const planner::PlanParams* params = nullptr);

// Totals rebuilt from the trace alone: tr, ttc, cc, eng, kmt, tw, arrived,
// served, abandoned and sessions.
KpiReport KpisFromTrace(const std::vector<TraceRecord>& trace, const EconomicParams& econ);

}  // namespace evfleet::sim
