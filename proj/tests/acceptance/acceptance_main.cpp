// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 when any
// criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "evfleet/assigner/assigner.hpp"
#include "evfleet/cli/experiment.hpp"
#include "evfleet/dispatch/dispatch.hpp"
#include "evfleet/milp/brute_force.hpp"
#include "evfleet/milp/solver.hpp"
#include "evfleet/planner/plan.hpp"
#include "evfleet/sim/sim.hpp"
#include "oracles.hpp"

namespace evfleet {
namespace {

// Tolerances and budgets.
constexpr double kObjTol = 1e-6;
constexpr double kFeasTol = 1e-6;
constexpr double kLedgerTol = 1e-6;
constexpr double kMilpBudgetSeconds = 10.0;
constexpr double kPlanBudgetSeconds = 5.0;
constexpr double kSimBudgetSeconds = 60.0;
constexpr int kAllowedInversions = 1;
constexpr double kNaiveLongWait = 60.0;
constexpr double kChasingShortWait = 30.0;

using Clock = std::chrono::steady_clock;

double Seconds(Clock::time_point since) {
  return std::chrono::duration<double>(Clock::now() - since).count();
}

struct Outcome {
  bool pass = true;
  std::string detail;

  void Fail(const std::string& why) {
    if (pass) detail = why;
    pass = false;
  }
};

// 1. Random MILPs against exhaustive enumeration.
milp::MilpModel MixedModel(std::mt19937_64& rng, int binaries, int rows) {
  std::uniform_real_distribution<double> coef(-4.0, 8.0);
  milp::MilpModel m;
  m.SetObjectiveSense(rng() % 2 ? milp::ObjectiveSense::kMaximize : milp::ObjectiveSense::kMinimize);
  for (int j = 0; j < binaries; ++j) m.AddBinary(std::round(coef(rng) * 100) / 100);
  const int y0 = m.AddContinuous(0.0, 3.0, std::round(coef(rng) * 100) / 100);
  const int y1 = m.AddContinuous(-2.0, 2.0, std::round(coef(rng) * 100) / 100);
  for (int i = 0; i < rows; ++i) {
    std::vector<milp::Term> t;
    double pos = 0.0;
    for (int j = 0; j < binaries; ++j) {
      if (rng() % 2) continue;
      const double c = std::round(coef(rng) * 10) / 10;
      t.push_back({j, c});
      pos += std::max(c, 0.0);
    }
    t.push_back({rng() % 2 ? y0 : y1, std::round(coef(rng) * 10) / 10});
    m.AddConstraint(t, milp::RowSense::kLessEqual, std::round(pos * 0.5 * 10) / 10 + 1.0);
  }
  return m;
}

Outcome MilpOracle() {
  Outcome o;
  std::mt19937_64 rng(9001);
  std::uniform_int_distribution<int> nb(1, 12);
  std::uniform_int_distribution<int> nr(1, 10);
  milp::SolverConfig cfg;
  cfg.relative_gap_tol = 1e-9;
  const auto t0 = Clock::now();
  int optimal = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const int b = nb(rng);
    const int r = nr(rng);
    const milp::MilpModel m = trial % 3 == 2 ? MixedModel(rng, std::min(b, 10), r)
                                             : oracle::RandomBinaryModel(rng, b, r);
    const milp::MilpSolution bf = milp::BruteForce(m);
    const milp::MilpSolution s = milp::Solve(m, cfg);
    if (s.status != bf.status) {
      o.Fail(fmt::format("model {}: status {} vs enumeration {}", trial, milp::ToString(s.status),
                         milp::ToString(bf.status)));
      continue;
    }
    if (s.status != milp::SolveStatus::kOptimal) continue;
    ++optimal;
    if (std::abs(s.objective - bf.objective) > kObjTol) {
      o.Fail(fmt::format("model {}: objective {} vs enumeration {}", trial, s.objective, bf.objective));
    }
    if (m.MaxViolation(s.values) > kFeasTol || m.MaxIntegralityViolation(s.values) > kFeasTol) {
      o.Fail(fmt::format("model {}: solution infeasible", trial));
    }
  }
  const double secs = Seconds(t0);
  if (secs >= kMilpBudgetSeconds) o.Fail(fmt::format("took {:.2f} s", secs));
  if (o.pass) o.detail = fmt::format("100 models ({} optimal, rest infeasible) in {:.2f} s", optimal, secs);
  return o;
}

// 2. Dispatch and charger assignment against enumeration, each solution
// re-checked from first principles.
std::string RecheckDispatch(const dispatch::DispatchInstance& inst, const dispatch::DispatchResult& res) {
  std::set<int> rs, vs;
  double total = 0.0;
  for (const auto& m : res.matches) {
    if (!rs.insert(m.request).second) return fmt::format("request {} matched twice", m.request);
    if (!vs.insert(m.vehicle).second) return fmt::format("vehicle {} matched twice", m.vehicle);
    const Request& q = inst.requests[m.request];
    const Vehicle& v = inst.vehicles[m.vehicle];
    const double pickup = std::abs(v.location.x - q.origin.x) + std::abs(v.location.y - q.origin.y);
    const double trip = std::abs(q.origin.x - q.destination.x) + std::abs(q.origin.y - q.destination.y);
    if (v.soc - 0.25 * (pickup + trip) < v.e_min - kFeasTol) return "match runs below the reserve";
    if (inst.now - q.arrival_time + pickup * 2.0 > 10.0 + kFeasTol) return "match exceeds the wait limit";
    total += q.fare - 0.53 * (pickup + trip);
  }
  if (std::abs(total - res.objective) > kObjTol) return "objective differs from the matched profits";
  return {};
}

std::string RecheckAssign(const assigner::AssignInstance& inst, const assigner::AssignmentOutcome& out) {
  std::set<int> vs, cs;
  std::map<int, std::size_t> vi, ci;
  for (std::size_t i = 0; i < inst.vehicles.size(); ++i) vi[inst.vehicles[i].vehicle_id] = i;
  for (std::size_t i = 0; i < inst.chargers.size(); ++i) ci[inst.chargers[i].id] = i;
  double total = 0.0;
  std::vector<assigner::Assignment> all = out.assignments;
  all.insert(all.end(), out.delayed.begin(), out.delayed.end());
  for (const auto& a : all) {
    if (!vs.insert(a.vehicle_id).second) return fmt::format("vehicle {} assigned twice", a.vehicle_id);
    if (!cs.insert(a.charger_id).second) return fmt::format("charger {} used twice", a.charger_id);
    const auto& v = inst.vehicles[vi.at(a.vehicle_id)];
    const Charger& c = inst.chargers[ci.at(a.charger_id)];
    bool ok = true;
    const double least = oracle::AssignPairCost(v, c, 0.0, inst.chargers, inst.params, ok);
    if (!ok) return fmt::format("vehicle {} cannot use charger {}", a.vehicle_id, a.charger_id);
    const double km = std::abs(v.location.x - c.location.x) + std::abs(v.location.y - c.location.y);
    const double least_energy = (least - km * 2.0) * c.power_kw / 60.0;
    if (a.energy < least_energy - kFeasTol) return fmt::format("vehicle {} ends below its target", a.vehicle_id);
    const double at = v.soc - 0.25 * km;
    if (at < -kFeasTol) return "charger out of reach";
    if (a.energy < c.power_kw * c.min_charge_minutes / 60.0 - kFeasTol) return "session below the minimum";
    if (a.energy > c.per_epoch_energy_cap + kFeasTol) return "session above the epoch cap";
    total += km * 2.0 + inst.wait[vi.at(a.vehicle_id)][ci.at(a.charger_id)] + a.energy * 60.0 / c.power_kw;
  }
  if (all.size() + out.removed.size() != inst.vehicles.size()) return "a candidate was neither assigned nor removed";
  if (!all.empty() && std::abs(total - out.objective) > kObjTol * std::max(1.0, total)) {
    return "objective differs from the assignment";
  }
  return {};
}

Outcome DispatchAndAssign() {
  Outcome o;
  std::mt19937_64 rng(4242);
  std::uniform_int_distribution<int> six(1, 6);
  for (int trial = 0; trial < 50; ++trial) {
    const auto inst = oracle::RandomDispatch(rng, six(rng), six(rng));
    const auto res = dispatch::SolveDispatch(inst);
    const double best = oracle::DispatchBest(inst);
    if (std::abs(res.objective - best) > kObjTol) {
      o.Fail(fmt::format("dispatch {}: {} vs enumeration {}", trial, res.objective, best));
    }
    if (const std::string why = RecheckDispatch(inst, res); !why.empty()) {
      o.Fail(fmt::format("dispatch {}: {}", trial, why));
    }
  }
  std::uniform_int_distribution<int> five(1, 5);
  int relaxed = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const auto inst = oracle::RandomAssign(rng, five(rng), five(rng));
    assigner::AssignConfig cfg;
    cfg.max_queue_wait = oracle::kInf;
    const auto out = assigner::SolveWithRelaxation(inst, cfg);
    const auto best = oracle::AssignBest(inst);
    relaxed += !best.removed.empty();
    if (out.removed != best.removed) o.Fail(fmt::format("assignment {}: different vehicles removed", trial));
    if (best.feasible && std::abs(out.objective - best.objective) > kObjTol * std::max(1.0, best.objective)) {
      o.Fail(fmt::format("assignment {}: {} vs enumeration {}", trial, out.objective, best.objective));
    }
    if (const std::string why = RecheckAssign(inst, out); !why.empty()) {
      o.Fail(fmt::format("assignment {}: {}", trial, why));
    }
  }
  if (o.pass) o.detail = fmt::format("50 dispatch + 50 assignment instances exact ({} needed removals)", relaxed);
  return o;
}

// 3. Day-ahead plan micro instances.
TimeGrid ShortDay(int epochs) {
  TimeGrid g;
  g.service_end = g.service_start + 30.0 * epochs;
  return g;
}

Vehicle PlanVehicle(int id, double e_init, double e_max, double e_min) {
  Vehicle v;
  v.id = id;
  v.e_init = e_init;
  v.soc = e_init;
  v.e_max = e_max;
  v.e_min = e_min;
  return v;
}

planner::PlanParams Flat(std::vector<double> delta, int chargers) {
  planner::PlanParams p;
  p.price.assign(delta.size(), 0.2);
  p.wait.assign(delta.size(), std::vector<double>(static_cast<std::size_t>(chargers), 0.0));
  p.delta = std::move(delta);
  return p;
}

std::string CheckPlan(const std::vector<Vehicle>& fleet, const std::vector<Charger>& chargers,
                      const planner::PlanParams& p, const TimeGrid& g, int epochs) {
  const planner::DayAheadPlan plan = planner::SolvePlan(fleet, chargers, p, g);
  const double best = oracle::PlanBest(fleet, chargers, p, epochs);
  if (plan.status != milp::SolveStatus::kOptimal) return "plan not proven optimal";
  if (std::abs(plan.objective - best) > kObjTol) {
    return fmt::format("objective {} vs enumeration {}", plan.objective, best);
  }
  if (const std::string why = planner::AuditPlan(plan, fleet, chargers, p, g); !why.empty()) return why;
  if (std::abs(planner::PlanCost(plan, chargers, p) - plan.objective) > kObjTol) return "cost recomputation differs";
  return {};
}

Outcome PlanMicro() {
  Outcome o;
  const auto t0 = Clock::now();
  {
    const TimeGrid g = ShortDay(2);
    const std::vector<Charger> cs{MakeCharger(0, 0, {0, 0}, 50.0, ChargerClass::kFast, 10.0, g)};
    const std::vector<Vehicle> fleet{PlanVehicle(0, 49.6, 49.6, 6.2)};
    const planner::PlanParams p = Flat({25.0, 25.0}, 1);
    if (const auto why = CheckPlan(fleet, cs, p, g, 2); !why.empty()) o.Fail("1 vehicle: " + why);
    const auto bf = milp::BruteForce(planner::BuildPlanModel(fleet, cs, p, g).model);
    const auto plan = planner::SolvePlan(fleet, cs, p, g);
    if (std::abs(bf.objective - plan.objective) > kObjTol) o.Fail("1 vehicle: differs from model enumeration");
  }
  {
    const TimeGrid g = ShortDay(4);
    const std::vector<Charger> cs{MakeCharger(0, 0, {0, 0}, 50.0, ChargerClass::kFast, 10.0, g),
                                  MakeCharger(1, 1, {0, 0}, 11.0, ChargerClass::kSlow, 10.0, g)};
    planner::PlanParams p = Flat({7.0, 9.0, 6.0, 8.0}, 2);
    p.price = {0.31, 0.12, 0.45, 0.2};
    p.wait = {{3.0, 0.0}, {12.0, 1.0}, {0.0, 0.0}, {5.0, 2.0}};
    p.gamma = 0.35;
    const std::vector<Vehicle> fleet{PlanVehicle(0, 30.0, 30.0, 6.0), PlanVehicle(1, 25.0, 30.0, 6.0),
                                     PlanVehicle(2, 36.0, 30.0, 6.0)};
    if (const auto why = CheckPlan(fleet, cs, p, g, 4); !why.empty()) o.Fail("3 vehicles: " + why);
  }
  const double secs = Seconds(t0);
  if (secs >= kPlanBudgetSeconds) o.Fail(fmt::format("took {:.2f} s", secs));
  if (o.pass) o.detail = fmt::format("both instances optimal and audited in {:.2f} s", secs);
  return o;
}

// 4. Simulator invariants rebuilt from the trace alone.
std::map<std::string, std::string> Fields(const std::string& detail) {
  std::map<std::string, std::string> f;
  std::istringstream in(detail);
  std::string kv;
  while (std::getline(in, kv, ';')) {
    const auto eq = kv.find('=');
    f[kv.substr(0, eq)] = eq == std::string::npos ? "" : kv.substr(eq + 1);
  }
  return f;
}

std::string AuditTrace(const scenario::Scenario& sc, const sim::DayResult& r) {
  using sim::EventKind;
  std::vector<double> soc;
  for (const auto& v : sc.fleet) soc.push_back(v.soc);
  std::map<int, double> charger_free;
  std::set<int> arrived;
  std::map<int, int> ended;
  double last = -1e300;
  for (const auto& t : r.trace) {
    if (t.time < last - 1e-9) return fmt::format("time goes back at {}", t.time);
    last = t.time;
    const auto f = Fields(t.detail);
    switch (t.kind) {
      case EventKind::kRequestArrival: arrived.insert(t.request); break;
      case EventKind::kVehicleArrivedPickup:
        if (std::stod(f.at("wait")) > sc.config.econ.max_customer_wait + sc.config.grid.batch_interval + 1e-9) {
          return fmt::format("request {} waited {} min", t.request, f.at("wait"));
        }
        [[fallthrough]];
      case EventKind::kVehicleArrivedCharger:
        soc[t.vehicle] -= 0.25 * std::stod(f.at("km"));
        break;
      case EventKind::kTripCompleted:
        soc[t.vehicle] -= 0.25 * std::stod(f.at("km"));
        if (t.request >= 0) ++ended[t.request];
        break;
      case EventKind::kChargingStarted: {
        const double end = std::stod(f.at("end"));
        auto it = charger_free.find(t.charger);
        if (it != charger_free.end() && t.time < it->second - 1e-9) {
          return fmt::format("charger {} overlaps at {}", t.charger, t.time);
        }
        charger_free[t.charger] = end;
        break;
      }
      case EventKind::kChargingFinished: soc[t.vehicle] += std::stod(f.at("energy")); break;
      default:
        if (f.count("abandoned") && t.request >= 0) ++ended[t.request];
        break;
    }
    if (t.vehicle >= 0 && (soc[t.vehicle] < -kLedgerTol ||
                           soc[t.vehicle] > sc.fleet[t.vehicle].battery_capacity + kLedgerTol)) {
      return fmt::format("vehicle {} soc {} out of bounds at {}", t.vehicle, soc[t.vehicle], t.time);
    }
  }
  for (std::size_t v = 0; v < soc.size(); ++v) {
    if (std::abs(soc[v] - r.kpi.end_soc[v]) > kLedgerTol) {
      return fmt::format("vehicle {} ledger {} vs reported {}", v, soc[v], r.kpi.end_soc[v]);
    }
  }
  if (arrived.size() != sc.requests.size()) return "not every request arrived";
  for (int q : arrived) {
    if (ended[q] != 1) return fmt::format("request {} ended {} times", q, ended[q]);
  }
  return {};
}

cli::PipelineConfig Desk(double demand, int chargers_per_station = 1) {
  cli::PipelineConfig cfg;
  cli::ApplySetting(cfg, "fleet_size", "20");
  cli::ApplySetting(cfg, "demand_total", fmt::format("{}", demand));
  cli::ApplySetting(cfg, "chargers_per_station", std::to_string(chargers_per_station));
  return cfg;
}

Outcome SimInvariants() {
  Outcome o;
  const auto t0 = Clock::now();
  cli::Experiment exp(Desk(600));
  const policies::PolicyKind kinds[] = {policies::PolicyKind::kCongestionAware, policies::PolicyKind::kNearest,
                                        policies::PolicyKind::kFastest, policies::PolicyKind::kMinChgOpT,
                                        policies::PolicyKind::kDynaThreshold};
  const policies::QueueBehavior queues[] = {policies::QueueBehavior::kNaive, policies::QueueBehavior::kChasingA,
                                            policies::QueueBehavior::kChasingB};
  for (int day = 0; day < 20; ++day) {
    const std::uint64_t seed = 101 + static_cast<std::uint64_t>(day);
    const scenario::Scenario sc = cli::ScenarioFor(exp.config().scenario, seed);
    sim::SimConfig s = exp.config().sim;
    s.policy = kinds[day % 5];
    s.queue_behavior = queues[day % 3];
    s.seed = seed;
    const bool ca = s.policy == policies::PolicyKind::kCongestionAware;
    const auto run = [&] {
      return ca ? sim::RunDay(sc, s, &exp.Plan(), &exp.Params()) : sim::RunDay(sc, s);
    };
    const sim::DayResult a = run();
    const sim::DayResult b = run();
    const std::string tag = fmt::format("day {} ({}, {})", seed, policies::ToString(s.policy),
                                        policies::ToString(s.queue_behavior));
    if (!a.violations.empty()) o.Fail(tag + ": " + a.violations.front());
    if (const std::string why = AuditTrace(sc, a); !why.empty()) o.Fail(tag + ": " + why);
    if (a.trace != b.trace) o.Fail(tag + ": replay differs");
  }
  const double secs = Seconds(t0);
  if (secs >= kSimBudgetSeconds) o.Fail(fmt::format("took {:.2f} s", secs));
  if (o.pass) o.detail = fmt::format("20 days clean and replayed identically in {:.2f} s", secs);
  return o;
}

// 5. Anticipated charge-to levels.
Outcome TargetLevels() {
  Outcome o;
  const std::vector<double> delta(10, 2.5);
  const double e_min = 6.2;
  const double e_max = 49.6;
  auto expect = [&](const char* what, double got, double want) {
    if (got != want) o.Fail(fmt::format("{}: {} instead of {}", what, got, want));
  };
  expect("soc 12 with 10 epochs left", assigner::TargetSoc(12.0, delta, 0, e_min, e_max), 32.0);
  expect("soc above the cap", assigner::TargetSoc(55.0, delta, 0, e_min, e_max), e_max);
  expect("no epochs left", assigner::TargetSoc(12.0, delta, 10, e_min, e_max), 12.0);
  for (double soc : {3.0, 12.0, 30.0, 55.0}) {
    for (int h : {0, 5, 10}) {
      expect("anticipation off", assigner::TargetSoc(soc, delta, h, e_min, e_max, false), e_max);
    }
  }
  Vehicle v;
  v.soc = 12.0;
  if (assigner::Eligible(v, 12.0, 50.0 / 6.0)) o.Fail("zero deficit passed the filter");
  if (o.pass) o.detail = "32 kWh, cap and end-of-day cases exact; anticipation off gives e_max";
  return o;
}

// 6. CongestionAware against each benchmark.
struct Cell {
  std::map<policies::PolicyKind, std::vector<sim::KpiReport>> runs;
};

Cell RunCell(cli::Experiment& exp, const std::vector<policies::PolicyKind>& kinds) {
  Cell c;
  for (const auto& rec : exp.RunAll(kinds)) c.runs[rec.policy].push_back(rec.kpi);
  return c;
}

Outcome Ordering() {
  Outcome o;
  std::vector<std::string> notes;
  std::vector<policies::PolicyKind> all(policies::kBenchmarks.begin(), policies::kBenchmarks.end());
  all.push_back(policies::PolicyKind::kCongestionAware);
  for (double demand : {600.0, 800.0}) {
    cli::Experiment exp(Desk(demand));
    const Cell c = RunCell(exp, all);
    const auto& ca = c.runs.at(policies::PolicyKind::kCongestionAware);
    const sim::KpiReport mca = cli::Mean(ca);
    int worst_inversions = 0;
    for (auto b : policies::kBenchmarks) {
      const auto& bench = c.runs.at(b);
      const sim::KpiReport mb = cli::Mean(bench);
      const std::string tag = fmt::format("{} at {:.0f}", policies::ToString(b), demand);
      if (mca.pf < mb.pf) o.Fail(fmt::format("{}: mean PF {:.3f} < {:.3f}", tag, mca.pf, mb.pf));
      if (mca.sr < mb.sr) o.Fail(fmt::format("{}: mean SR {:.4f} < {:.4f}", tag, mca.sr, mb.sr));
      if (mca.tw > mb.tw) o.Fail(fmt::format("{}: mean TW {:.2f} > {:.2f}", tag, mca.tw, mb.tw));
      int inv_pf = 0, inv_sr = 0, inv_tw = 0;
      for (std::size_t i = 0; i < ca.size(); ++i) {
        inv_pf += ca[i].pf < bench[i].pf;
        inv_sr += ca[i].sr < bench[i].sr;
        inv_tw += ca[i].tw > bench[i].tw;
      }
      for (auto [name, n] : {std::pair{"PF", inv_pf}, std::pair{"SR", inv_sr}, std::pair{"TW", inv_tw}}) {
        if (n > kAllowedInversions) o.Fail(fmt::format("{}: {} inverted on {} seeds", tag, name, n));
        worst_inversions = std::max(worst_inversions, n);
      }
    }
    notes.push_back(fmt::format("{:.0f} requests: PF {:.2f} SR {:.1f}% TW {:.1f} h, worst pair {} inverted",
                                demand, mca.pf, 100.0 * mca.sr, mca.tw, worst_inversions));
  }
  if (o.pass) o.detail = fmt::format("{}; {}", notes[0], notes[1]);
  return o;
}

// 7. Sensitivity trends over three seeds.
Outcome Trends() {
  Outcome o;
  const auto ca = policies::PolicyKind::kCongestionAware;
  auto three = [](cli::PipelineConfig cfg) {
    cfg.seeds.evaluation = {11, 12, 13};
    return cfg;
  };
  std::string note;
  {
    cli::Experiment limited(three(Desk(800)));
    cli::PipelineConfig open_cfg = three(Desk(800));
    cli::ApplySetting(open_cfg, "max_queue_wait", "inf");
    cli::Experiment open(open_cfg);
    open.SetParams(limited.Params());
    open.SetPlan(limited.Plan());
    const double pf30 = cli::Mean(RunCell(limited, {ca}).runs.at(ca)).pf;
    const double pf_inf = cli::Mean(RunCell(open, {ca}).runs.at(ca)).pf;
    if (pf_inf > pf30) o.Fail(fmt::format("no wait limit PF {:.3f} > 30 min PF {:.3f}", pf_inf, pf30));
    note += fmt::format("PF {:.2f} (inf) <= {:.2f} (30 min)", pf_inf, pf30);
  }
  {
    double prev = -1.0;
    std::string srs;
    for (const char* kwh : {"62", "72", "82"}) {
      cli::PipelineConfig cfg = three(Desk(600));
      cli::ApplySetting(cfg, "battery_kwh", kwh);
      cli::Experiment exp(cfg);
      const double sr = cli::Mean(RunCell(exp, {ca}).runs.at(ca)).sr;
      if (sr < prev) o.Fail(fmt::format("SR drops to {:.4f} at {} kWh", sr, kwh));
      prev = sr;
      srs += fmt::format("{}{:.1f}", srs.empty() ? "" : "/", 100.0 * sr);
    }
    note += fmt::format("; SR {}% over 62/72/82 kWh", srs);
  }
  {
    std::vector<policies::PolicyKind> bench(policies::kBenchmarks.begin(), policies::kBenchmarks.end());
    std::map<policies::PolicyKind, double> prev;
    for (const char* n : {"4", "6", "8"}) {
      cli::PipelineConfig cfg = three(Desk(600));
      cli::ApplySetting(cfg, "chargers", n);
      cli::Experiment exp(cfg);
      const Cell c = RunCell(exp, bench);
      for (auto b : bench) {
        const double tw = cli::Mean(c.runs.at(b)).tw;
        if (prev.count(b) && tw > prev[b]) {
          o.Fail(fmt::format("{} TW rises to {:.2f} h at {} chargers", policies::ToString(b), tw, n));
        }
        prev[b] = tw;
      }
    }
    note += "; benchmark TW nonincreasing over 4/6/8 chargers";
  }
  if (o.pass) o.detail = note;
  return o;
}

// 8. Queue behaviors on a congested instance: MinChgOpT charging with two
// chargers per station, so 20 vehicles share 4 fast and 4 slow chargers.
Outcome QueueBehaviors() {
  Outcome o;
  std::map<policies::QueueBehavior, std::vector<sim::KpiReport>> runs;
  for (auto q : {policies::QueueBehavior::kNaive, policies::QueueBehavior::kChasingA,
                 policies::QueueBehavior::kChasingB}) {
    cli::PipelineConfig cfg = Desk(600, 2);
    cfg.sim.queue_behavior = q;
    cli::Experiment exp(cfg);
    runs[q] = RunCell(exp, {policies::PolicyKind::kMinChgOpT}).runs.at(policies::PolicyKind::kMinChgOpT);
  }
  auto max_of = [](const std::vector<sim::KpiReport>& rs) {
    double m = 0.0;
    for (const auto& r : rs) m = std::max(m, r.max_queue_wait);
    return m;
  };
  const double naive_max = max_of(runs[policies::QueueBehavior::kNaive]);
  const double b_max = max_of(runs[policies::QueueBehavior::kChasingB]);
  const double a_mean = cli::Mean(runs[policies::QueueBehavior::kChasingA]).mean_queue_wait;
  const double b_mean = cli::Mean(runs[policies::QueueBehavior::kChasingB]).mean_queue_wait;
  if (!(naive_max > kNaiveLongWait)) o.Fail(fmt::format("naive longest wait only {:.1f} min", naive_max));
  if (!(b_max < kChasingShortWait)) o.Fail(fmt::format("ChasingB longest wait {:.1f} min", b_max));
  if (b_mean > a_mean) o.Fail(fmt::format("ChasingB mean {:.2f} > ChasingA mean {:.2f}", b_mean, a_mean));
  if (o.pass) {
    o.detail = fmt::format("naive max {:.1f} min, ChasingB max {:.1f} min, mean B {:.2f} <= A {:.2f}", naive_max,
                           b_max, b_mean, a_mean);
  }
  return o;
}

}  // namespace
}  // namespace evfleet

int main() {
  using evfleet::Outcome;
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"milp matches enumeration", evfleet::MilpOracle},
      {"dispatch and assignment exact", evfleet::DispatchAndAssign},
      {"day-ahead plan micro instances", evfleet::PlanMicro},
      {"simulator invariants and replay", evfleet::SimInvariants},
      {"charge-to level examples", evfleet::TargetLevels},
      {"CongestionAware ordering", evfleet::Ordering},
      {"sensitivity trends", evfleet::Trends},
      {"queue behaviors", evfleet::QueueBehaviors},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    failed += !o.pass;
    std::printf("%s %zu %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, o.detail.c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
