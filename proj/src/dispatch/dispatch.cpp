#include "evfleet/dispatch/dispatch.hpp"

#include <cmath>

#include <fmt/format.h>

#include "evfleet/core/arith.hpp"

namespace evfleet::dispatch {

namespace {

constexpr double kWaitBigM = 1440.0;

double PickupKm(const Request& r, const Vehicle& v, const EconomicParams& p) {
  return Distance(v.location, r.origin, p);
}

double TripKm(const Request& r, const EconomicParams& p) {
  return Distance(r.origin, r.destination, p);
}

}  // namespace

double NetProfit(const Request& r, const Vehicle& v, const EconomicParams& p) {
  return r.fare - p.cost_per_km * (TripKm(r, p) + PickupKm(r, v, p));
}

bool HasEnergyFor(const Request& r, const Vehicle& v, const EconomicParams& p) {
  return v.soc - EnergyFor(TripKm(r, p) + PickupKm(r, v, p), p) >= v.e_min;
}

bool WithinWaitLimit(const Request& r, const Vehicle& v, double now, const EconomicParams& p) {
  return r.WaitAt(now) + TravelTime(PickupKm(r, v, p), p) <= p.max_customer_wait;
}

DispatchModel BuildDispatchModel(const DispatchInstance& inst, bool named) {
  DispatchModel dm;
  auto& m = dm.model;
  m.SetObjectiveSense(milp::ObjectiveSense::kMaximize);
  const int nr = static_cast<int>(inst.requests.size());
  const int nv = static_cast<int>(inst.vehicles.size());
  const auto& p = inst.params;

  std::vector<std::vector<milp::Term>> by_request(static_cast<std::size_t>(nr));
  std::vector<std::vector<milp::Term>> by_vehicle(static_cast<std::size_t>(nv));
  for (int r = 0; r < nr; ++r) {
    const Request& req = inst.requests[r];
    for (int v = 0; v < nv; ++v) {
      const Vehicle& veh = inst.vehicles[v];
      const int var = m.AddBinary(NetProfit(req, veh, p),
                                  named ? fmt::format("m_r{}_v{}", req.id, veh.id) : std::string());
      dm.pairs.push_back({r, v});
      if (!HasEnergyFor(req, veh, p) || !WithinWaitLimit(req, veh, inst.now, p)) {
        m.SetBounds(var, 0.0, 0.0);
      }
      by_request[r].push_back({var, 1.0});
      by_vehicle[v].push_back({var, 1.0});

      // e - mu*d + M1 (1 - m) >= Emin   <=>   M1 m <= M1 + e - mu*d - Emin
      const double big_m1 = veh.battery_capacity;
      const double need = EnergyFor(TripKm(req, p) + PickupKm(req, veh, p), p);
      m.AddConstraint({{var, big_m1}}, milp::RowSense::kLessEqual,
                      big_m1 + veh.soc - need - veh.e_min,
                      named ? fmt::format("energy_r{}_v{}", req.id, veh.id) : std::string());
      // W + t m <= Wmax + M2 (1 - m)   <=>   (t + M2) m <= Wmax + M2 - W
      const double t = TravelTime(PickupKm(req, veh, p), p);
      m.AddConstraint({{var, t + kWaitBigM}}, milp::RowSense::kLessEqual,
                      p.max_customer_wait + kWaitBigM - req.WaitAt(inst.now),
                      named ? fmt::format("wait_r{}_v{}", req.id, veh.id) : std::string());
    }
  }
  for (int r = 0; r < nr; ++r) {
    m.AddConstraint(std::move(by_request[r]), milp::RowSense::kLessEqual, 1.0,
                    named ? fmt::format("req_{}", inst.requests[r].id) : std::string());
  }
  for (int v = 0; v < nv; ++v) {
    m.AddConstraint(std::move(by_vehicle[v]), milp::RowSense::kLessEqual, 1.0,
                    named ? fmt::format("veh_{}", inst.vehicles[v].id) : std::string());
  }
  return dm;
}

DispatchResult SolveDispatch(const DispatchInstance& inst, const milp::SolverConfig& cfg) {
  DispatchResult out;
  DispatchInstance live;
  live.now = inst.now;
  live.params = inst.params;
  live.vehicles = inst.vehicles;
  std::vector<int> live_index;
  for (int r = 0; r < static_cast<int>(inst.requests.size()); ++r) {
    if (inst.requests[r].WaitAt(inst.now) >= inst.params.max_customer_wait) {
      out.abandoned.push_back(r);
    } else {
      live.requests.push_back(inst.requests[r]);
      live_index.push_back(r);
    }
  }
  if (live.requests.empty() || live.vehicles.empty()) return out;

  const DispatchModel dm = BuildDispatchModel(live, false);
  const milp::MilpSolution sol = milp::Solve(dm.model, cfg);
  out.status = sol.status;
  if (!sol.has_solution()) {
    throw std::runtime_error(
        fmt::format("dispatch solve failed with status {}", milp::ToString(sol.status)));
  }
  for (std::size_t k = 0; k < dm.pairs.size(); ++k) {
    if (sol.values[k] < 0.5) continue;
    const auto& pr = dm.pairs[k];
    const double profit = NetProfit(live.requests[pr.request], live.vehicles[pr.vehicle], inst.params);
    out.matches.push_back({live_index[pr.request], pr.vehicle, profit});
    out.objective += profit;
  }
  return out;
}

std::string CheckMatching(const DispatchInstance& inst, const std::vector<Match>& matches) {
  std::vector<int> req_used(inst.requests.size(), 0);
  std::vector<int> veh_used(inst.vehicles.size(), 0);
  for (const Match& mt : matches) {
    if (mt.request < 0 || mt.request >= static_cast<int>(inst.requests.size()) || mt.vehicle < 0 ||
        mt.vehicle >= static_cast<int>(inst.vehicles.size())) {
      return "match index out of range";
    }
    if (++req_used[mt.request] > 1) return fmt::format("request {} matched twice", mt.request);
    if (++veh_used[mt.vehicle] > 1) return fmt::format("vehicle {} matched twice", mt.vehicle);
    const Request& r = inst.requests[mt.request];
    const Vehicle& v = inst.vehicles[mt.vehicle];
    if (!HasEnergyFor(r, v, inst.params)) {
      return fmt::format("vehicle {} lacks energy for request {}", mt.vehicle, mt.request);
    }
    if (!WithinWaitLimit(r, v, inst.now, inst.params)) {
      return fmt::format("request {} would wait beyond the limit", mt.request);
    }
  }
  return {};
}

}  // namespace evfleet::dispatch
