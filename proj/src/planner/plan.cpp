#include "evfleet/planner/plan.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <ostream>
#include <stdexcept>

#include <fmt/format.h>

#include "evfleet/core/csv.hpp"

namespace evfleet::planner {

PlanWindow ComputePlanWindow(double e_init, double e_max, std::span<const double> delta) {
  double level = e_init;
  for (std::size_t h = 0; h < delta.size(); ++h) {
    if (level <= e_max + 1e-9) return PlanWindow{true, static_cast<int>(h), level};
    level -= delta[h];
  }
  return PlanWindow{};
}

std::vector<const PlanEntry*> DayAheadPlan::EntriesAt(int epoch) const {
  std::vector<const PlanEntry*> out;
  for (const auto& e : entries) {
    if (e.epoch == epoch) out.push_back(&e);
  }
  return out;
}

const PlanEntry* DayAheadPlan::Find(int vehicle_id, int epoch) const {
  for (const auto& e : entries) {
    if (e.vehicle_id == vehicle_id && e.epoch == epoch) return &e;
  }
  return nullptr;
}

void DayAheadPlan::WriteCsv(std::ostream& out) const {
  out << "vehicle_id,epoch,charger_id,energy_kwh,target_soc_kwh\n";
  for (const auto& e : entries) {
    out << fmt::format("{},{},{},{},{}\n", e.vehicle_id, e.epoch, e.charger_id, e.energy,
                       e.target_soc);
  }
}

DayAheadPlan DayAheadPlan::ReadCsv(std::istream& in) {
  csv::Reader reader(in, {"vehicle_id", "epoch", "charger_id", "energy_kwh", "target_soc_kwh"});
  DayAheadPlan plan;
  std::vector<std::string> f;
  while (reader.Next(f)) {
    const int line = reader.line_number();
    PlanEntry e;
    e.vehicle_id = csv::ParseInt(f[0], "vehicle_id", line);
    e.epoch = csv::ParseInt(f[1], "epoch", line);
    e.charger_id = csv::ParseInt(f[2], "charger_id", line);
    e.energy = csv::ParseDouble(f[3], "energy_kwh", line);
    e.target_soc = csv::ParseDouble(f[4], "target_soc_kwh", line);
    if (e.epoch < 0 || e.energy < 0 || e.target_soc < 0) {
      throw ConfigError(fmt::format("line {}: negative plan value", line));
    }
    e.soc_before = e.target_soc - e.energy;
    plan.entries.push_back(e);
  }
  std::stable_sort(plan.entries.begin(), plan.entries.end(), [](const auto& a, const auto& b) {
    return std::tie(a.vehicle_id, a.epoch) < std::tie(b.vehicle_id, b.epoch);
  });
  return plan;
}

void DayAheadPlan::Save(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw ConfigError(fmt::format("cannot write '{}'", path.string()));
  WriteCsv(out);
}

DayAheadPlan DayAheadPlan::Load(const std::filesystem::path& path) {
  auto in = csv::OpenOrThrow(path);
  return ReadCsv(in);
}

double EnergyUnitCost(const PlanParams& p, int epoch, const Charger& c) {
  return p.price[epoch] + p.gamma * 60.0 / c.power_kw;
}

double AccessUnitCost(const PlanParams& p, int epoch, int charger_index) {
  return p.access_cost + p.gamma * p.wait[epoch][charger_index];
}

namespace {

void CheckShapes(const std::vector<Charger>& chargers, const PlanParams& params,
                 const TimeGrid& grid) {
  params.Validate();
  if (params.num_epochs() != grid.NumEpochs()) {
    throw ConfigError(fmt::format("plan parameters cover {} epochs, the day has {}",
                                  params.num_epochs(), grid.NumEpochs()));
  }
  if (params.num_chargers() != static_cast<int>(chargers.size())) {
    throw ConfigError(fmt::format("wait table has {} chargers, network has {}",
                                  params.num_chargers(), chargers.size()));
  }
}

DayAheadPlan Extract(const PlanModel& pm, const milp::MilpSolution& sol,
                     const std::vector<Vehicle>& fleet, const std::vector<Charger>& chargers) {
  DayAheadPlan plan;
  plan.status = sol.status;
  plan.objective = sol.objective;
  plan.relative_gap = sol.relative_gap;
  for (std::size_t v = 0; v < fleet.size(); ++v) {
    const auto& vv = pm.vehicles[v];
    VehiclePlan vp;
    vp.vehicle_id = fleet[v].id;
    vp.window = vv.window;
    for (int var : vv.e) vp.soc.push_back(sol.values[var]);
    for (std::size_t k = 0; k < vv.x.size(); ++k) {
      for (std::size_t s = 0; s < chargers.size(); ++s) {
        if (sol.values[vv.x[k][s]] < 0.5) continue;
        PlanEntry e;
        e.vehicle_id = fleet[v].id;
        e.epoch = vv.window.start + static_cast<int>(k);
        e.charger_id = chargers[s].id;
        e.energy = sol.values[vv.y[k][s]];
        e.soc_before = vp.soc[k];
        e.target_soc = e.soc_before + e.energy;
        plan.entries.push_back(e);
      }
    }
    plan.vehicles.push_back(std::move(vp));
  }
  return plan;
}

DayAheadPlan SolveDirect(const std::vector<Vehicle>& fleet, const std::vector<Charger>& chargers,
                         const PlanParams& params, const TimeGrid& grid,
                         const milp::SolverConfig& solver) {
  const PlanModel pm = BuildPlanModel(fleet, chargers, params, grid);
  const milp::MilpSolution sol = milp::Solve(pm.model, solver);
  if (!sol.has_solution()) {
    throw std::runtime_error(
        fmt::format("no charging plan found (solver status {})", milp::ToString(sol.status)));
  }
  return Extract(pm, sol, fleet, chargers);
}

}  // namespace

PlanModel BuildPlanModel(const std::vector<Vehicle>& fleet, const std::vector<Charger>& chargers,
                         const PlanParams& params, const TimeGrid& grid) {
  CheckShapes(chargers, params, grid);
  const int num_h = grid.NumEpochs();
  const int num_s = static_cast<int>(chargers.size());
  const double big_m3 = grid.epoch_interval;
  double big_m4 = 0.0;
  for (const auto& c : chargers) big_m4 = std::max(big_m4, c.per_epoch_energy_cap);

  PlanModel pm;
  auto& m = pm.model;
  std::vector<std::vector<std::vector<milp::Term>>> per_charger(
      num_h, std::vector<std::vector<milp::Term>>(num_s));

  for (const Vehicle& veh : fleet) {
    PlanModel::VehicleVars vv;
    vv.window = ComputePlanWindow(veh.e_init, veh.e_max, params.delta);
    if (!vv.window.open) {
      pm.vehicles.push_back(std::move(vv));
      continue;
    }
    const int start = vv.window.start;
    for (int h = start; h <= num_h; ++h) {
      vv.e.push_back(m.AddContinuous(veh.e_min, veh.e_max, 0.0, fmt::format("e_v{}_h{}", veh.id, h)));
    }
    m.AddConstraint({{vv.e.front(), 1.0}}, milp::RowSense::kEqual, vv.window.e0,
                    fmt::format("init_v{}", veh.id));
    for (int h = start; h < num_h; ++h) {
      std::vector<int> xs;
      std::vector<int> ys;
      for (int s = 0; s < num_s; ++s) {
        const Charger& c = chargers[s];
        xs.push_back(m.AddBinary(AccessUnitCost(params, h, s),
                                 fmt::format("x_v{}_h{}_s{}", veh.id, h, c.id)));
        ys.push_back(m.AddContinuous(0.0, c.per_epoch_energy_cap, EnergyUnitCost(params, h, c),
                                     fmt::format("y_v{}_h{}_s{}", veh.id, h, c.id)));
        per_charger[h][s].push_back({xs.back(), 1.0});
        // 60 y / phi - M3 x >= alpha - M3
        m.AddConstraint({{ys.back(), 60.0 / c.power_kw}, {xs.back(), -big_m3}},
                        milp::RowSense::kGreaterEqual, c.min_charge_minutes - big_m3,
                        fmt::format("mindur_v{}_h{}_s{}", veh.id, h, c.id));
        m.AddConstraint({{ys.back(), 1.0}, {xs.back(), -big_m4}}, milp::RowSense::kLessEqual, 0.0,
                        fmt::format("link_v{}_h{}_s{}", veh.id, h, c.id));
      }
      std::vector<milp::Term> one;
      for (int x : xs) one.push_back({x, 1.0});
      m.AddConstraint(one, milp::RowSense::kLessEqual, 1.0, fmt::format("one_v{}_h{}", veh.id, h));

      // e_{h+1} = e_h - delta_h (1 - sum x) + sum y
      const double d = params.delta[h];
      const int k = h - start;
      std::vector<milp::Term> bal{{vv.e[k + 1], 1.0}, {vv.e[k], -1.0}};
      for (int s = 0; s < num_s; ++s) {
        bal.push_back({xs[s], -d});
        bal.push_back({ys[s], -1.0});
      }
      m.AddConstraint(bal, milp::RowSense::kEqual, -d, fmt::format("soc_v{}_h{}", veh.id, h));
      vv.x.push_back(std::move(xs));
      vv.y.push_back(std::move(ys));
    }
    pm.vehicles.push_back(std::move(vv));
  }
  for (int h = 0; h < num_h; ++h) {
    for (int s = 0; s < num_s; ++s) {
      if (per_charger[h][s].size() > 1) {
        m.AddConstraint(per_charger[h][s], milp::RowSense::kLessEqual, 1.0,
                        fmt::format("excl_h{}_s{}", h, chargers[s].id));
      }
    }
  }
  return pm;
}

milp::SolverConfig PlanConfig::DefaultSolverConfig() {
  milp::SolverConfig c;
  c.node_selection = milp::NodeSelection::kDepthFirst;
  c.time_limit_seconds = 3600.0;
  c.node_limit = 2000;
  return c;
}

int AutoBlocks(std::size_t vehicles, std::size_t fast, std::size_t slow) {
  for (std::size_t k = vehicles / 10; k > 1; --k) {
    if (vehicles % k == 0 && fast % k == 0 && slow % k == 0) return static_cast<int>(k);
  }
  return 1;
}

DayAheadPlan SolvePlan(const std::vector<Vehicle>& fleet, const std::vector<Charger>& chargers,
                       const PlanParams& params, const TimeGrid& grid, const PlanConfig& cfg) {
  CheckShapes(chargers, params, grid);
  if (cfg.blocks < 0) throw ConfigError("block count must be nonnegative");
  std::vector<int> fast;
  std::vector<int> slow;
  for (int s = 0; s < static_cast<int>(chargers.size()); ++s) {
    (chargers[s].charger_class == ChargerClass::kFast ? fast : slow).push_back(s);
  }
  const int k = cfg.blocks == 0 ? AutoBlocks(fleet.size(), fast.size(), slow.size()) : cfg.blocks;
  if (k == 1) return SolveDirect(fleet, chargers, params, grid, cfg.solver);
  if (fleet.size() % k != 0 || fast.size() % k != 0 || slow.size() % k != 0) {
    throw ConfigError(fmt::format(
        "{} vehicles, {} fast and {} slow chargers do not split into {} equal blocks",
        fleet.size(), fast.size(), slow.size(), k));
  }
  const std::size_t nv = fleet.size() / k;
  const std::size_t nf = fast.size() / k;
  const std::size_t ns = slow.size() / k;
  auto block_chargers = [&](int b) {
    std::vector<int> idx;
    for (std::size_t i = 0; i < nf; ++i) idx.push_back(fast[b * nf + i]);
    for (std::size_t i = 0; i < ns; ++i) idx.push_back(slow[b * ns + i]);
    return idx;
  };

  const std::vector<int> idx0 = block_chargers(0);
  std::vector<Vehicle> fleet0(fleet.begin(), fleet.begin() + static_cast<std::ptrdiff_t>(nv));
  std::vector<Charger> chargers0;
  PlanParams params0 = params;
  for (auto& row : params0.wait) row.clear();
  for (int s : idx0) {
    chargers0.push_back(chargers[s]);
    for (int h = 0; h < params.num_epochs(); ++h) params0.wait[h].push_back(params.wait[h][s]);
  }
  const DayAheadPlan block = SolveDirect(fleet0, chargers0, params0, grid, cfg.solver);

  std::map<int, std::size_t> pos_of_vehicle;
  for (std::size_t j = 0; j < nv; ++j) pos_of_vehicle[fleet0[j].id] = j;
  std::map<int, std::size_t> pos_of_charger;
  for (std::size_t p = 0; p < chargers0.size(); ++p) pos_of_charger[chargers0[p].id] = p;

  DayAheadPlan plan;
  plan.status = block.status;
  plan.relative_gap = block.relative_gap;
  plan.objective = block.objective * k;
  for (int b = 0; b < k; ++b) {
    const std::vector<int> idx = block_chargers(b);
    for (std::size_t j = 0; j < nv; ++j) {
      VehiclePlan vp = block.vehicles[j];
      vp.vehicle_id = fleet[b * nv + j].id;
      plan.vehicles.push_back(std::move(vp));
    }
    for (const PlanEntry& e : block.entries) {
      PlanEntry c = e;
      c.vehicle_id = fleet[b * nv + pos_of_vehicle.at(e.vehicle_id)].id;
      c.charger_id = chargers[idx[pos_of_charger.at(e.charger_id)]].id;
      plan.entries.push_back(c);
    }
  }
  std::stable_sort(plan.entries.begin(), plan.entries.end(), [](const auto& a, const auto& b) {
    return std::tie(a.vehicle_id, a.epoch) < std::tie(b.vehicle_id, b.epoch);
  });
  return plan;
}

std::string AuditPlan(const DayAheadPlan& plan, const std::vector<Vehicle>& fleet,
                      const std::vector<Charger>& chargers, const PlanParams& params,
                      const TimeGrid& grid, double tol) {
  const int num_h = grid.NumEpochs();
  std::map<int, std::size_t> charger_index;
  for (std::size_t s = 0; s < chargers.size(); ++s) charger_index[chargers[s].id] = s;
  std::map<int, const Vehicle*> vehicle_by_id;
  for (const auto& v : fleet) vehicle_by_id[v.id] = &v;

  std::map<std::pair<int, int>, int> per_vehicle_epoch;
  std::map<std::pair<int, int>, int> per_charger_epoch;
  for (const auto& e : plan.entries) {
    if (!vehicle_by_id.count(e.vehicle_id)) return fmt::format("entry for unknown vehicle {}", e.vehicle_id);
    if (!charger_index.count(e.charger_id)) return fmt::format("entry for unknown charger {}", e.charger_id);
    if (e.epoch < 0 || e.epoch >= num_h) return fmt::format("entry epoch {} out of range", e.epoch);
    if (++per_vehicle_epoch[{e.vehicle_id, e.epoch}] > 1) {
      return fmt::format("vehicle {} uses two chargers in epoch {}", e.vehicle_id, e.epoch);
    }
    if (++per_charger_epoch[{e.charger_id, e.epoch}] > 1) {
      return fmt::format("charger {} has two vehicles in epoch {}", e.charger_id, e.epoch);
    }
    const Charger& c = chargers[charger_index[e.charger_id]];
    if (e.energy < -tol || e.energy > c.per_epoch_energy_cap + tol) {
      return fmt::format("vehicle {} epoch {}: energy {} outside [0, {}]", e.vehicle_id, e.epoch,
                         e.energy, c.per_epoch_energy_cap);
    }
    if (60.0 * e.energy / c.power_kw < c.min_charge_minutes - tol) {
      return fmt::format("vehicle {} epoch {}: session shorter than the minimum", e.vehicle_id, e.epoch);
    }
  }

  for (const Vehicle& v : fleet) {
    const auto it = std::find_if(plan.vehicles.begin(), plan.vehicles.end(),
                                 [&](const VehiclePlan& vp) { return vp.vehicle_id == v.id; });
    if (it == plan.vehicles.end()) return fmt::format("vehicle {} missing from plan", v.id);
    const PlanWindow w = ComputePlanWindow(v.e_init, v.e_max, params.delta);
    if (w.open != it->window.open || (w.open && w.start != it->window.start)) {
      return fmt::format("vehicle {}: window differs from its initial level", v.id);
    }
    if (!w.open) {
      if (!it->soc.empty()) return fmt::format("vehicle {}: trajectory without a window", v.id);
      continue;
    }
    if (it->soc.size() != static_cast<std::size_t>(num_h - w.start + 1)) {
      return fmt::format("vehicle {}: trajectory has the wrong length", v.id);
    }
    if (std::abs(it->soc.front() - w.e0) > tol) {
      return fmt::format("vehicle {}: initial level {} differs from {}", v.id, it->soc.front(), w.e0);
    }
    for (std::size_t k = 0; k < it->soc.size(); ++k) {
      if (it->soc[k] < v.e_min - tol || it->soc[k] > v.e_max + tol) {
        return fmt::format("vehicle {} epoch {}: level {} outside [{}, {}]", v.id, w.start + k,
                           it->soc[k], v.e_min, v.e_max);
      }
    }
    for (int h = w.start; h < num_h; ++h) {
      const std::size_t k = static_cast<std::size_t>(h - w.start);
      const PlanEntry* e = plan.Find(v.id, h);
      const double charged = e ? e->energy : 0.0;
      const double drawn = e ? 0.0 : params.delta[h];
      const double expect = it->soc[k] - drawn + charged;
      if (std::abs(it->soc[k + 1] - expect) > tol) {
        return fmt::format("vehicle {} epoch {}: level recursion broken ({} vs {})", v.id, h,
                           it->soc[k + 1], expect);
      }
      if (e && (std::abs(e->soc_before - it->soc[k]) > tol ||
                std::abs(e->target_soc - it->soc[k] - e->energy) > tol)) {
        return fmt::format("vehicle {} epoch {}: entry levels disagree with the trajectory", v.id, h);
      }
    }
    for (const auto& e : plan.entries) {
      if (e.vehicle_id == v.id && e.epoch < w.start) {
        return fmt::format("vehicle {}: entry before its window", v.id);
      }
    }
  }
  return {};
}

double PlanCost(const DayAheadPlan& plan, const std::vector<Charger>& chargers,
                const PlanParams& params) {
  std::map<int, int> charger_index;
  for (std::size_t s = 0; s < chargers.size(); ++s) charger_index[chargers[s].id] = static_cast<int>(s);
  double z = 0.0;
  for (const auto& e : plan.entries) {
    const int s = charger_index.at(e.charger_id);
    z += EnergyUnitCost(params, e.epoch, chargers[s]) * e.energy + AccessUnitCost(params, e.epoch, s);
  }
  return z;
}

}  // namespace evfleet::planner
