#pragma once

// Reference solvers written independently of the library models: plain
// enumeration over the decisions with the rules spelled out here.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <random>
#include <vector>

#include "evfleet/assigner/assigner.hpp"
#include "evfleet/core/arith.hpp"
#include "evfleet/dispatch/dispatch.hpp"
#include "evfleet/milp/model.hpp"
#include "evfleet/milp/solver.hpp"
#include "evfleet/planner/params.hpp"
#include "evfleet/planner/plan.hpp"

namespace evfleet::oracle {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Random pure-binary model: with probability 1/2 a maximisation, mixed-sign
// data, and a few >= rows.
inline milp::MilpModel RandomBinaryModel(std::mt19937_64& rng, int n, int rows) {
  using milp::RowSense;
  std::uniform_real_distribution<double> coef(-5.0, 10.0);
  std::uniform_int_distribution<int> sense(0, 5);
  milp::MilpModel m;
  m.SetObjectiveSense(rng() % 2 ? milp::ObjectiveSense::kMaximize : milp::ObjectiveSense::kMinimize);
  for (int j = 0; j < n; ++j) m.AddBinary(std::round(coef(rng) * 100) / 100);
  for (int i = 0; i < rows; ++i) {
    std::vector<milp::Term> t;
    double sum_pos = 0.0;
    for (int j = 0; j < n; ++j) {
      if (rng() % 3 == 0) continue;
      const double c = std::round(coef(rng) * 10) / 10;
      t.push_back({j, c});
      sum_pos += std::max(c, 0.0);
    }
    const int s = sense(rng);
    const double rhs = std::round(sum_pos * 0.4 * 10) / 10;
    m.AddConstraint(t, s == 0 ? RowSense::kGreaterEqual : RowSense::kLessEqual, s == 0 ? -rhs : rhs);
  }
  return m;
}

inline Request MakeRequest(int id, Point o, Point d, double arrival, const EconomicParams& p) {
  Request r;
  r.id = id;
  r.origin = o;
  r.destination = d;
  r.arrival_time = arrival;
  r.fare = Fare(Distance(o, d, p), p);
  return r;
}

inline Vehicle MakeVehicle(int id, Point at, double soc) {
  Vehicle v;
  v.id = id;
  v.location = at;
  v.soc = soc;
  return v;
}

// Best total profit over every partial matching that satisfies the energy
// and wait rules as written out here (default economics, Manhattan metric).
inline double DispatchBest(const dispatch::DispatchInstance& inst) {
  const int nr = static_cast<int>(inst.requests.size());
  const int nv = static_cast<int>(inst.vehicles.size());
  auto km = [](Point a, Point b) { return std::abs(a.x - b.x) + std::abs(a.y - b.y); };
  auto ok = [&](int r, int v) {
    const Request& q = inst.requests[r];
    const Vehicle& c = inst.vehicles[v];
    const double pickup = km(c.location, q.origin);
    const double trip = km(q.origin, q.destination);
    const bool energy = c.soc - 0.25 * (pickup + trip) >= c.e_min;
    const bool wait = (inst.now - q.arrival_time) + pickup / 30.0 * 60.0 <= 10.0;
    return energy && wait && inst.now - q.arrival_time < 10.0;
  };
  auto profit = [&](int r, int v) {
    const Request& q = inst.requests[r];
    const Vehicle& c = inst.vehicles[v];
    return q.fare - 0.53 * (km(c.location, q.origin) + km(q.origin, q.destination));
  };
  std::vector<bool> used(static_cast<std::size_t>(nv), false);
  std::function<double(int)> rec = [&](int r) -> double {
    if (r == nr) return 0.0;
    double best = rec(r + 1);
    for (int v = 0; v < nv; ++v) {
      if (used[v] || !ok(r, v)) continue;
      used[v] = true;
      best = std::max(best, profit(r, v) + rec(r + 1));
      used[v] = false;
    }
    return best;
  };
  return rec(0);
}

inline dispatch::DispatchInstance RandomDispatch(std::mt19937_64& rng, int nr, int nv) {
  std::uniform_real_distribution<double> ux(0.0, 4.0);
  std::uniform_real_distribution<double> uy(0.0, 20.0);
  std::uniform_real_distribution<double> soc(4.0, 20.0);
  std::uniform_real_distribution<double> age(0.0, 11.0);
  dispatch::DispatchInstance inst;
  inst.now = 700.0;
  for (int r = 0; r < nr; ++r) {
    const Point o{ux(rng), uy(rng)};
    const Point d{ux(rng), uy(rng)};
    inst.requests.push_back(MakeRequest(r, o, d, inst.now - age(rng), inst.params));
  }
  for (int v = 0; v < nv; ++v) inst.vehicles.push_back(MakeVehicle(v, {ux(rng), uy(rng)}, soc(rng)));
  return inst;
}

inline Charger FastCharger(int id, Point at) {
  return MakeCharger(id, 0, at, 50.0, ChargerClass::kFast, 10.0, TimeGrid{});
}
inline Charger SlowCharger(int id, Point at) {
  return MakeCharger(id, 1, at, 11.0, ChargerClass::kSlow, 10.0, TimeGrid{});
}

inline assigner::AssignInstance RandomAssign(std::mt19937_64& rng, int nv, int ns) {
  std::uniform_real_distribution<double> coord(0.0, 20.0);
  std::uniform_real_distribution<double> soc(1.0, 20.0);
  std::uniform_real_distribution<double> need(2.0, 30.0);
  std::uniform_real_distribution<double> wait(0.0, 40.0);
  assigner::AssignInstance inst;
  inst.now = 600.0;
  for (int v = 0; v < nv; ++v) {
    const double e = soc(rng);
    inst.vehicles.push_back({v, {coord(rng), coord(rng)}, e, e + need(rng)});
  }
  for (int s = 0; s < ns; ++s) {
    const Point at{coord(rng), coord(rng)};
    inst.chargers.push_back(s % 2 == 0 ? FastCharger(s, at) : SlowCharger(s, at));
  }
  inst.wait.assign(static_cast<std::size_t>(nv), std::vector<double>(static_cast<std::size_t>(ns)));
  for (auto& row : inst.wait) {
    for (double& w : row) w = wait(rng);
  }
  return inst;
}

struct AssignOracle {
  bool feasible = false;
  double objective = 0.0;
  std::vector<int> removed;
};

// Minutes of one vehicle at one charger with the cheapest valid session;
// `ok` is false when the pair cannot be used.
inline double AssignPairCost(const assigner::Candidate& v, const Charger& c, double wait,
                             const std::vector<Charger>& all, const EconomicParams& p, bool& ok) {
  const double km = Distance(v.location, c.location, p);
  const double at = v.soc - p.kwh_per_km * km;
  // Target capped by one epoch on the best reachable charger.
  double reach = -1.0;
  bool any = false;
  for (const auto& o : all) {
    const double a = v.soc - p.kwh_per_km * Distance(v.location, o.location, p);
    if (a >= 0) {
      reach = any ? std::max(reach, a + o.per_epoch_energy_cap) : a + o.per_epoch_energy_cap;
      any = true;
    }
  }
  const double target = any ? std::min(v.target, reach) : v.target;
  const double energy = std::max({target - at, c.power_kw * c.min_charge_minutes / 60.0, 0.0});
  ok = at >= 0 && energy <= c.per_epoch_energy_cap + 1e-9;
  return km * 60.0 / p.speed_kmh + wait + energy * 60.0 / c.power_kw;
}

// Every injective vehicle-to-charger map; on failure the highest-SoC vehicle
// (last one among ties) is dropped and the search repeated.
inline AssignOracle AssignBest(assigner::AssignInstance inst) {
  AssignOracle o;
  while (!inst.vehicles.empty()) {
    const std::size_t nv = inst.vehicles.size();
    const std::size_t ns = inst.chargers.size();
    double best = kInf;
    if (nv <= ns) {
      std::vector<int> perm(ns);
      std::iota(perm.begin(), perm.end(), 0);
      do {
        double total = 0.0;
        bool ok = true;
        for (std::size_t v = 0; v < nv && ok; ++v) {
          total += AssignPairCost(inst.vehicles[v], inst.chargers[perm[v]], inst.wait[v][perm[v]],
                                  inst.chargers, inst.params, ok);
        }
        if (ok) best = std::min(best, total);
      } while (std::next_permutation(perm.begin(), perm.end()));
    }
    if (best < kInf) {
      o.feasible = true;
      o.objective = best;
      return o;
    }
    std::size_t worst = 0;
    for (std::size_t v = 1; v < nv; ++v) {
      if (inst.vehicles[v].soc >= inst.vehicles[worst].soc) worst = v;
    }
    o.removed.push_back(inst.vehicles[worst].vehicle_id);
    inst.vehicles.erase(inst.vehicles.begin() + static_cast<std::ptrdiff_t>(worst));
    inst.wait.erase(inst.wait.begin() + static_cast<std::ptrdiff_t>(worst));
  }
  return o;
}

// Per-vehicle cheapest charge amounts for a fixed pattern of charging epochs,
// written as its own small LP.
inline double VehiclePatternCost(const Vehicle& v, const planner::PlanWindow& w,
                                 const std::vector<int>& pattern, const std::vector<Charger>& chargers,
                                 const planner::PlanParams& p) {
  milp::MilpModel m;
  const int n = static_cast<int>(pattern.size());
  std::vector<int> e;
  for (int k = 0; k <= n; ++k) e.push_back(m.AddContinuous(v.e_min, v.e_max, 0.0));
  m.AddConstraint({{e[0], 1.0}}, milp::RowSense::kEqual, w.e0);
  double fixed = 0.0;
  for (int k = 0; k < n; ++k) {
    const int h = w.start + k;
    if (pattern[k] < 0) {
      m.AddConstraint({{e[k + 1], 1.0}, {e[k], -1.0}}, milp::RowSense::kEqual, -p.delta[h]);
      continue;
    }
    const Charger& c = chargers[pattern[k]];
    const double lo = c.min_charge_minutes * c.power_kw / 60.0;
    const int y = m.AddContinuous(lo, c.power_kw * 0.5, p.price[h] + p.gamma * 60.0 / c.power_kw);
    m.AddConstraint({{e[k + 1], 1.0}, {e[k], -1.0}, {y, -1.0}}, milp::RowSense::kEqual, 0.0);
    fixed += p.access_cost + p.gamma * p.wait[h][pattern[k]];
  }
  const milp::MilpSolution s = milp::SolveRelaxation(m);
  return s.status == milp::SolveStatus::kOptimal ? s.objective + fixed : kInf;
}

// Enumerates every charger-or-idle choice per vehicle epoch and combines the
// vehicles under charger exclusivity. Infinity when nothing is feasible.
inline double PlanBest(const std::vector<Vehicle>& fleet, const std::vector<Charger>& chargers,
                       const planner::PlanParams& p, int num_epochs) {
  const int ns = static_cast<int>(chargers.size());
  struct Option {
    std::vector<int> pattern;  // absolute epoch -> charger or -1
    double cost;
  };
  std::vector<std::vector<Option>> options;
  for (const Vehicle& v : fleet) {
    const planner::PlanWindow w = planner::ComputePlanWindow(v.e_init, v.e_max, p.delta);
    std::vector<Option> opts;
    if (!w.open) {
      opts.push_back({std::vector<int>(num_epochs, -1), 0.0});
      options.push_back(opts);
      continue;
    }
    const int len = num_epochs - w.start;
    std::vector<int> pat(len, -1);
    std::function<void(int)> rec = [&](int k) {
      if (k == len) {
        const double c = VehiclePatternCost(v, w, pat, chargers, p);
        if (c < kInf) {
          std::vector<int> full(num_epochs, -1);
          for (int i = 0; i < len; ++i) full[w.start + i] = pat[i];
          opts.push_back({full, c});
        }
        return;
      }
      for (int s = -1; s < ns; ++s) {
        pat[k] = s;
        rec(k + 1);
      }
    };
    rec(0);
    options.push_back(opts);
  }
  double best = kInf;
  std::vector<std::vector<int>> busy(num_epochs, std::vector<int>(ns, 0));
  std::function<void(std::size_t, double)> combine = [&](std::size_t v, double acc) {
    if (acc >= best) return;
    if (v == options.size()) {
      best = acc;
      return;
    }
    for (const Option& o : options[v]) {
      bool clash = false;
      for (int h = 0; h < num_epochs && !clash; ++h) clash = o.pattern[h] >= 0 && busy[h][o.pattern[h]];
      if (clash) continue;
      for (int h = 0; h < num_epochs; ++h) {
        if (o.pattern[h] >= 0) busy[h][o.pattern[h]] = 1;
      }
      combine(v + 1, acc + o.cost);
      for (int h = 0; h < num_epochs; ++h) {
        if (o.pattern[h] >= 0) busy[h][o.pattern[h]] = 0;
      }
    }
  };
  combine(0, 0.0);
  return best;
}

}  // namespace evfleet::oracle
