#include "evfleet/assigner/assigner.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include <fmt/format.h>

#include "evfleet/core/arith.hpp"

namespace evfleet::assigner {

std::string_view ToString(PoolReason r) {
  switch (r) {
    case PoolReason::kPlanned: return "Planned";
    case PoolReason::kLowSoc: return "LowSoC";
    case PoolReason::kDelayed: return "Delayed";
  }
  return "?";
}

bool ChargePool::Add(int vehicle_id, PoolReason reason, double target) {
  if (Contains(vehicle_id)) return false;
  entries_.push_back({vehicle_id, reason, target});
  return true;
}

void ChargePool::Remove(int vehicle_id) {
  std::erase_if(entries_, [&](const PoolEntry& e) { return e.vehicle_id == vehicle_id; });
}

const PoolEntry* ChargePool::Find(int vehicle_id) const {
  for (const auto& e : entries_) {
    if (e.vehicle_id == vehicle_id) return &e;
  }
  return nullptr;
}

PoolEntry* ChargePool::Find(int vehicle_id) {
  for (auto& e : entries_) {
    if (e.vehicle_id == vehicle_id) return &e;
  }
  return nullptr;
}

double RemainingNeed(std::span<const double> delta, int epoch, double e_min) {
  if (epoch < 0) epoch = 0;
  if (epoch >= static_cast<int>(delta.size())) return 0.0;
  double total = 0.0;
  for (std::size_t h = static_cast<std::size_t>(epoch); h < delta.size(); ++h) total += delta[h];
  const double d = delta[static_cast<std::size_t>(epoch)];
  const double m = d > 0 ? std::floor(e_min / d + 1e-12) : 0.0;
  return std::max(0.0, total - m * d);
}

double TargetSoc(double soc, std::span<const double> delta, int epoch, double e_min, double cap,
                 bool anticipate) {
  if (!anticipate) return cap;
  return std::min(cap, soc + RemainingNeed(delta, epoch, e_min));
}

double DrawTargetCap(const Vehicle& v, std::mt19937_64& rng) {
  const double lo = 0.5 * v.battery_capacity;
  if (lo >= v.e_max) return v.e_max;
  return std::uniform_real_distribution<double>(lo, v.e_max)(rng);
}

double MinChargeEnergy(const std::vector<Charger>& chargers) {
  const Charger* best = nullptr;
  for (const auto& c : chargers) {
    if (!best || c.power_kw > best->power_kw) best = &c;
  }
  return best ? best->MinSessionEnergy() : 0.0;
}

bool Eligible(const Vehicle& v, double target, double min_energy) {
  return v.state == VehicleState::kIdle && target - v.soc >= min_energy - 1e-9;
}

std::vector<std::vector<double>> PredictWaits(const std::vector<Candidate>& vehicles,
                                              const std::vector<Charger>& chargers,
                                              const std::vector<ChargerOutlook>& outlooks,
                                              double now, const EconomicParams& p) {
  if (outlooks.size() != chargers.size()) throw std::invalid_argument("one outlook per charger");
  std::vector<std::vector<double>> w(vehicles.size(), std::vector<double>(chargers.size(), 0.0));
  for (std::size_t v = 0; v < vehicles.size(); ++v) {
    for (std::size_t s = 0; s < chargers.size(); ++s) {
      const double eta = now + TravelTime(Distance(vehicles[v].location, chargers[s].location, p), p);
      w[v][s] = outlooks[s].PredictWait(now, eta);
    }
  }
  return w;
}

double EffectiveTarget(const Candidate& v, const std::vector<Charger>& chargers,
                       const EconomicParams& p) {
  std::optional<double> reach;
  for (const auto& c : chargers) {
    const double at = v.soc - EnergyFor(Distance(v.location, c.location, p), p);
    if (at >= 0) reach = std::max(reach.value_or(at), at + c.per_epoch_energy_cap);
  }
  return reach ? std::min(v.target, *reach) : v.target;
}

AssignModel BuildAssignModel(const AssignInstance& inst) {
  const auto& p = inst.params;
  const std::size_t nv = inst.vehicles.size();
  const std::size_t ns = inst.chargers.size();
  if (inst.wait.size() != nv) throw std::invalid_argument("wait matrix has the wrong row count");

  double big_m1 = 0.0;
  for (const auto& c : inst.chargers) {
    big_m1 = std::max({big_m1, c.min_charge_minutes, c.per_epoch_energy_cap});
  }
  std::vector<double> targets(nv);
  double big_m2 = 0.0;
  for (std::size_t v = 0; v < nv; ++v) {
    targets[v] = EffectiveTarget(inst.vehicles[v], inst.chargers, p);
    big_m2 = std::max(big_m2, targets[v]);
  }

  AssignModel am;
  auto& m = am.model;
  am.x.assign(nv, std::vector<int>(ns));
  am.psi.assign(nv, std::vector<int>(ns));
  for (std::size_t v = 0; v < nv; ++v) {
    const Candidate& cand = inst.vehicles[v];
    if (inst.wait[v].size() != ns) throw std::invalid_argument("wait matrix has the wrong width");
    for (std::size_t s = 0; s < ns; ++s) {
      const Charger& c = inst.chargers[s];
      const double km = Distance(cand.location, c.location, p);
      const double use = EnergyFor(km, p);
      const int x = m.AddBinary(TravelTime(km, p) + inst.wait[v][s],
                                fmt::format("x_v{}_s{}", cand.vehicle_id, c.id));
      const int psi = m.AddContinuous(0.0, c.per_epoch_energy_cap, 60.0 / c.power_kw,
                                      fmt::format("psi_v{}_s{}", cand.vehicle_id, c.id));
      am.x[v][s] = x;
      am.psi[v][s] = psi;
      if (cand.soc - use < 0 || cand.soc - use + c.per_epoch_energy_cap < targets[v]) {
        m.SetBounds(x, 0.0, 0.0);
      }
      // 0 <= e - mu d x + M2 (1 - x)
      m.AddConstraint({{x, use + big_m2}}, milp::RowSense::kLessEqual, cand.soc + big_m2,
                      fmt::format("reach_v{}_s{}", cand.vehicle_id, c.id));
      // target <= e - mu d x + psi + M2 (1 - x)
      m.AddConstraint({{psi, 1.0}, {x, -use - big_m2}}, milp::RowSense::kGreaterEqual,
                      targets[v] - cand.soc - big_m2,
                      fmt::format("target_v{}_s{}", cand.vehicle_id, c.id));
      // alpha <= 60 psi / phi + M1 (1 - x)
      m.AddConstraint({{psi, 60.0 / c.power_kw}, {x, -big_m1}}, milp::RowSense::kGreaterEqual,
                      c.min_charge_minutes - big_m1,
                      fmt::format("mindur_v{}_s{}", cand.vehicle_id, c.id));
      m.AddConstraint({{psi, 1.0}, {x, -big_m1}}, milp::RowSense::kLessEqual, 0.0,
                      fmt::format("link_v{}_s{}", cand.vehicle_id, c.id));
    }
  }
  for (std::size_t v = 0; v < nv; ++v) {
    std::vector<milp::Term> row;
    for (std::size_t s = 0; s < ns; ++s) row.push_back({am.x[v][s], 1.0});
    m.AddConstraint(row, milp::RowSense::kEqual, 1.0,
                    fmt::format("one_v{}", inst.vehicles[v].vehicle_id));
  }
  for (std::size_t s = 0; s < ns; ++s) {
    std::vector<milp::Term> row;
    for (std::size_t v = 0; v < nv; ++v) row.push_back({am.x[v][s], 1.0});
    m.AddConstraint(row, milp::RowSense::kLessEqual, 1.0, fmt::format("cap_s{}", inst.chargers[s].id));
  }
  return am;
}

AssignmentOutcome SolveWithRelaxation(AssignInstance inst, const AssignConfig& cfg) {
  AssignmentOutcome out;
  const auto drop_highest = [&] {
    std::size_t worst = 0;
    for (std::size_t v = 1; v < inst.vehicles.size(); ++v) {
      if (inst.vehicles[v].soc >= inst.vehicles[worst].soc) worst = v;
    }
    out.removed.push_back(inst.vehicles[worst].vehicle_id);
    inst.vehicles.erase(inst.vehicles.begin() + static_cast<std::ptrdiff_t>(worst));
    inst.wait.erase(inst.wait.begin() + static_cast<std::ptrdiff_t>(worst));
  };

  while (!inst.vehicles.empty()) {
    if (inst.vehicles.size() > inst.chargers.size()) {
      // Cannot give every candidate its own charger.
      drop_highest();
      continue;
    }
    const AssignModel am = BuildAssignModel(inst);
    const milp::MilpSolution sol = milp::Solve(am.model, cfg.solver);
    ++out.solves;
    if (sol.status == milp::SolveStatus::kInfeasible) {
      drop_highest();
      continue;
    }
    if (!sol.has_solution()) {
      throw std::runtime_error(
          fmt::format("charger assignment failed with status {}", milp::ToString(sol.status)));
    }
    out.objective = sol.objective;
    for (std::size_t v = 0; v < inst.vehicles.size(); ++v) {
      for (std::size_t s = 0; s < inst.chargers.size(); ++s) {
        if (sol.values[am.x[v][s]] < 0.5) continue;
        Assignment a;
        a.vehicle_id = inst.vehicles[v].vehicle_id;
        a.charger_id = inst.chargers[s].id;
        a.energy = sol.values[am.psi[v][s]];
        a.access_minutes = TravelTime(
            Distance(inst.vehicles[v].location, inst.chargers[s].location, inst.params), inst.params);
        a.wait_minutes = inst.wait[v][s];
        a.delayed = a.wait_minutes > cfg.max_queue_wait;
        (a.delayed ? out.delayed : out.assignments).push_back(a);
      }
    }
    break;
  }
  return out;
}

std::string CheckAssignments(const AssignInstance& inst, const AssignmentOutcome& out, double tol) {
  std::map<int, std::size_t> vindex;
  for (std::size_t v = 0; v < inst.vehicles.size(); ++v) vindex[inst.vehicles[v].vehicle_id] = v;
  std::map<int, std::size_t> sindex;
  for (std::size_t s = 0; s < inst.chargers.size(); ++s) sindex[inst.chargers[s].id] = s;
  std::map<int, int> v_used;
  std::map<int, int> s_used;
  std::vector<Assignment> all = out.assignments;
  all.insert(all.end(), out.delayed.begin(), out.delayed.end());
  for (const Assignment& a : all) {
    if (!vindex.count(a.vehicle_id) || !sindex.count(a.charger_id)) return "unknown vehicle or charger";
    if (std::find(out.removed.begin(), out.removed.end(), a.vehicle_id) != out.removed.end()) {
      return fmt::format("vehicle {} both removed and assigned", a.vehicle_id);
    }
    if (++v_used[a.vehicle_id] > 1) return fmt::format("vehicle {} assigned twice", a.vehicle_id);
    if (++s_used[a.charger_id] > 1) return fmt::format("charger {} assigned twice", a.charger_id);
    const Candidate& v = inst.vehicles[vindex[a.vehicle_id]];
    const Charger& c = inst.chargers[sindex[a.charger_id]];
    const double at = v.soc - EnergyFor(Distance(v.location, c.location, inst.params), inst.params);
    if (at < -tol) return fmt::format("vehicle {} cannot reach charger {}", a.vehicle_id, a.charger_id);
    if (at + a.energy < EffectiveTarget(v, inst.chargers, inst.params) - tol) {
      return fmt::format("vehicle {} ends below its target", a.vehicle_id);
    }
    if (60.0 * a.energy / c.power_kw < c.min_charge_minutes - tol) {
      return fmt::format("vehicle {} session shorter than the minimum", a.vehicle_id);
    }
    if (a.energy < -tol || a.energy > c.per_epoch_energy_cap + tol) {
      return fmt::format("vehicle {} energy {} outside the charger cap", a.vehicle_id, a.energy);
    }
  }
  const std::size_t kept = inst.vehicles.size() - out.removed.size();
  if (all.size() != kept) {
    return fmt::format("{} candidates kept but {} assigned", kept, all.size());
  }
  return {};
}

}  // namespace evfleet::assigner
