#include "evfleet/sim/sim.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <queue>
#include <random>
#include <sstream>

#include <fmt/format.h>

#include "evfleet/assigner/assigner.hpp"
#include "evfleet/core/arith.hpp"
#include "evfleet/core/csv.hpp"
#include "evfleet/dispatch/dispatch.hpp"

namespace evfleet::sim {

namespace {

constexpr double kEps = 1e-9;

constexpr std::string_view kKindNames[] = {
    "ChargingFinished", "TripCompleted",  "VehicleArrivedPickup", "VehicleArrivedCharger",
    "RequeueDecision",  "ChargingStarted", "RequestArrival",      "ChargeEpochTick",
    "BatchTick",        "DayEnd"};

struct Event {
  double time = 0.0;
  EventKind kind = EventKind::kBatchTick;
  std::uint64_t seq = 0;
  int vehicle = -1;
  int charger = -1;
  int request = -1;
};

struct Later {
  bool operator()(const Event& a, const Event& b) const {
    if (a.time != b.time) return a.time > b.time;
    if (a.kind != b.kind) return a.kind > b.kind;
    return a.seq > b.seq;
  }
};

struct Session {
  double start = 0.0;
  double end = 0.0;
  double energy = 0.0;
  double cost = 0.0;
  double arrival = 0.0;
};

struct VehicleAux {
  int request = -1;
  int charger = -1;  // destination or current charger
  double leg_start = 0.0;
  double leg_km = 0.0;
  Point leg_to;
  double target = 0.0;     // session target level
  double trip_wait = 0.0;  // queue minutes on the current charging trip
  double queue_join = 0.0;
  int moves = 0;
  Session session;
  double initial_soc = 0.0;
  double km = 0.0;
  double charged = 0.0;
};

struct ChargerAux {
  int vehicle = -1;  // the one charging, -1 when free
};

class Simulator {
 public:
  Simulator(const scenario::Scenario& sc, const SimConfig& cfg, const planner::DayAheadPlan* plan,
            const planner::PlanParams* params)
      : sc_(sc),
        cfg_(cfg),
        econ_(sc.config.econ),
        grid_(sc.config.grid),
        plan_(plan),
        params_(params),
        rng_(cfg.seed),
        vehicles_(sc.fleet),
        chargers_(sc.chargers),
        requests_(sc.requests),
        vaux_(vehicles_.size()),
        caux_(chargers_.size()) {
    for (std::size_t v = 0; v < vehicles_.size(); ++v) {
      if (vehicles_[v].id != static_cast<int>(v)) throw ConfigError("vehicle ids must be 0..n-1");
      vaux_[v].initial_soc = vehicles_[v].soc;
    }
    for (std::size_t s = 0; s < chargers_.size(); ++s) {
      if (chargers_[s].id != static_cast<int>(s)) throw ConfigError("charger ids must be 0..n-1");
      chargers_[s].queue.clear();
      chargers_[s].busy_until = 0.0;
    }
    if (ca() && !cfg_.energy_unconstrained) {
      if (!plan_ || !params_) throw ConfigError("CongestionAware needs a day-ahead plan and its parameters");
      if (params_->num_epochs() != grid_.NumEpochs()) {
        throw ConfigError("plan parameters do not match the time grid");
      }
    }
    min_energy_ = assigner::MinChargeEnergy(chargers_);
    trigger_.theta = econ_.low_soc_fraction;
    trigger_.mapping = cfg_.hour_mapping;
    trigger_.grid = grid_;
    result_.log.num_vehicles = static_cast<int>(vehicles_.size());
    result_.log.num_chargers = static_cast<int>(chargers_.size());
  }

  DayResult Run() {
    for (std::size_t r = 0; r < requests_.size(); ++r) {
      Push(requests_[r].arrival_time, EventKind::kRequestArrival, -1, -1, static_cast<int>(r));
    }
    for (int h = 0; h < grid_.NumEpochs(); ++h) {
      Push(grid_.EpochStart(h), EventKind::kChargeEpochTick);
    }
    Push(grid_.service_start, EventKind::kBatchTick);
    Push(grid_.service_end, EventKind::kDayEnd);

    while (!events_.empty()) {
      const Event e = events_.top();
      events_.pop();
      if (e.time < clock_ - kEps) {
        Violation(fmt::format("clock went back from {} to {}", clock_, e.time));
      }
      clock_ = std::max(clock_, e.time);
      Handle(e);
      if (e.vehicle >= 0) CheckSoc(e.vehicle);
    }
    Finish();
    return std::move(result_);
  }

 private:
  bool ca() const { return cfg_.policy == policies::PolicyKind::kCongestionAware; }
  bool charging_enabled() const { return !cfg_.energy_unconstrained; }

  void Push(double t, EventKind kind, int vehicle = -1, int charger = -1, int request = -1) {
    if (t < clock_ - kEps) Violation(fmt::format("event scheduled in the past at {}", t));
    events_.push({t, kind, seq_++, vehicle, charger, request});
  }

  void Trace(EventKind kind, int vehicle, int charger, int request, std::string detail = {}) {
    if (cfg_.trace) result_.trace.push_back({clock_, kind, vehicle, charger, request, std::move(detail)});
  }

  void Violation(std::string what) {
    if (result_.violations.size() < 100) {
      result_.violations.push_back(fmt::format("t={}: {}", clock_, what));
    }
  }

  void CheckSoc(int v) {
    if (cfg_.energy_unconstrained) return;
    const Vehicle& veh = vehicles_[v];
    if (veh.soc < -1e-9 || veh.soc > veh.battery_capacity + 1e-9) {
      Violation(fmt::format("vehicle {} soc {} outside [0, {}]", v, veh.soc, veh.battery_capacity));
    }
  }

  // Drive legs ---------------------------------------------------------

  void StartLeg(int v, Point to, VehicleState state, EventKind arrival_kind, int charger, int request) {
    Vehicle& veh = vehicles_[v];
    VehicleAux& a = vaux_[v];
    a.leg_start = clock_;
    a.leg_km = Distance(veh.location, to, econ_);
    a.leg_to = to;
    veh.state = state;
    veh.busy_until = clock_ + TravelTime(a.leg_km, econ_);
    Push(veh.busy_until, arrival_kind, v, charger, request);
  }

  // Applies the energy and position of the leg that just ended.
  double EndLeg(int v, LegKind kind) {
    Vehicle& veh = vehicles_[v];
    VehicleAux& a = vaux_[v];
    veh.soc -= EnergyFor(a.leg_km, econ_);
    veh.location = a.leg_to;
    a.km += a.leg_km;
    km_total_ += a.leg_km;
    result_.log.legs.push_back({v, a.leg_start, clock_, a.leg_km, kind});
    return a.leg_km;
  }

  // Charger state ------------------------------------------------------

  double SessionMinutes(double soc, double target, const Charger& c) const {
    return std::max(std::max(0.0, target - soc) * 60.0 / c.power_kw, c.min_charge_minutes);
  }

  std::vector<ChargerOutlook> Outlooks() const {
    std::vector<ChargerOutlook> out(chargers_.size());
    for (std::size_t s = 0; s < chargers_.size(); ++s) {
      const Charger& c = chargers_[s];
      if (caux_[s].vehicle >= 0) out[s].busy_until = c.busy_until;
      for (int v : c.queue) {
        out[s].queued_durations.push_back(
            SessionMinutes(vehicles_[v].soc, vaux_[v].target, c));
      }
    }
    for (std::size_t v = 0; v < vehicles_.size(); ++v) {
      const Vehicle& veh = vehicles_[v];
      if (veh.state != VehicleState::kToCharger) continue;
      const VehicleAux& a = vaux_[v];
      const Charger& c = chargers_[a.charger];
      const double at = veh.soc - EnergyFor(a.leg_km, econ_);
      out[a.charger].inbound.push_back({veh.busy_until, SessionMinutes(at, a.target, c)});
    }
    return out;
  }

  void SendToCharger(int v, int s, double target, std::string why) {
    VehicleAux& a = vaux_[v];
    a.charger = s;
    a.target = target;
    StartLeg(v, chargers_[s].location, VehicleState::kToCharger, EventKind::kVehicleArrivedCharger, s, -1);
    Trace(EventKind::kBatchTick, v, s, -1,
          fmt::format("send;target={};eta={};{}", target, vehicles_[v].busy_until, why));
  }

  void StartSession(int v, int s) {
    Vehicle& veh = vehicles_[v];
    VehicleAux& a = vaux_[v];
    Charger& c = chargers_[s];
    if (caux_[s].vehicle >= 0 || c.busy_until > clock_ + kEps) {
      Violation(fmt::format("charger {} started vehicle {} while busy", s, v));
    }
    const double minutes = SessionMinutes(veh.soc, a.target, c);
    double end = clock_ + minutes;
    // Sessions stop at the end of service.
    end = std::min(end, grid_.service_end);
    double energy = std::min(c.power_kw * minutes / 60.0, std::max(0.0, veh.e_max - veh.soc));
    energy = std::min(energy, c.power_kw * (end - clock_) / 60.0);
    a.session = {clock_, end, energy, 0.0, a.session.arrival};
    a.session.cost = sc_.prices.EnergyCost(clock_, clock_ + energy * 60.0 / c.power_kw, c.power_kw);
    veh.state = VehicleState::kCharging;
    veh.busy_until = end;
    caux_[s].vehicle = v;
    c.busy_until = end;
    Trace(EventKind::kChargingStarted, v, s, -1, fmt::format("end={};energy={}", end, energy));
    Push(end, EventKind::kChargingFinished, v, s);
  }

  void JoinOrStart(int v, int s) {
    Charger& c = chargers_[s];
    if (caux_[s].vehicle < 0 && c.queue.empty()) {
      StartSession(v, s);
      return;
    }
    vehicles_[v].state = VehicleState::kQueuedAtCharger;
    vaux_[v].queue_join = clock_;
    c.queue.push_back(v);
  }

  // Event handlers -----------------------------------------------------

  void Handle(const Event& e) {
    switch (e.kind) {
      case EventKind::kRequestArrival: OnRequestArrival(e.request); break;
      case EventKind::kChargeEpochTick: OnEpochTick(); break;
      case EventKind::kBatchTick: OnBatchTick(); break;
      case EventKind::kVehicleArrivedPickup: OnArrivedPickup(e.vehicle, e.request); break;
      case EventKind::kTripCompleted: OnTripCompleted(e.vehicle, e.request); break;
      case EventKind::kVehicleArrivedCharger: OnArrivedCharger(e.vehicle, e.charger); break;
      case EventKind::kChargingFinished: OnChargingFinished(e.vehicle, e.charger); break;
      case EventKind::kDayEnd: OnDayEnd(); break;
      case EventKind::kRequeueDecision:
      case EventKind::kChargingStarted: break;
    }
  }

  void OnRequestArrival(int r) {
    pending_.push_back(r);
    ++arrived_;
    Trace(EventKind::kRequestArrival, -1, -1, r, fmt::format("fare={}", requests_[r].fare));
  }

  void OnEpochTick() {
    const int h = grid_.EpochOf(clock_);
    int charging = 0;
    int waiting = 0;
    for (const auto& v : vehicles_) {
      charging += v.state == VehicleState::kCharging;
      waiting += v.state == VehicleState::kQueuedAtCharger;
    }
    result_.kpi.charging_per_epoch.push_back(charging);
    result_.kpi.waiting_per_epoch.push_back(waiting);
    Trace(EventKind::kChargeEpochTick, -1, -1, -1,
          fmt::format("epoch={};charging={};waiting={}", h, charging, waiting));
    if (!ca() || !charging_enabled()) return;
    for (const planner::PlanEntry* p : plan_->EntriesAt(h)) {
      if (p->vehicle_id < 0 || p->vehicle_id >= static_cast<int>(vehicles_.size())) continue;
      if (assigner::PoolEntry* existing = pool_.Find(p->vehicle_id)) {
        existing->reason = assigner::PoolReason::kPlanned;
        existing->target = p->target_soc;
      } else {
        pool_.Add(p->vehicle_id, assigner::PoolReason::kPlanned, p->target_soc);
      }
      Trace(EventKind::kChargeEpochTick, p->vehicle_id, p->charger_id, -1,
            fmt::format("pool=Planned;target={}", p->target_soc));
    }
  }

  void OnBatchTick() {
    if (clock_ < grid_.service_end - kEps) {
      const double next = clock_ + grid_.batch_interval;
      if (next < grid_.service_end - kEps) Push(next, EventKind::kBatchTick);
    }
    if (charging_enabled()) {
      if (ca()) AssignChargers();
      else BenchmarkCharging();
    }
    Dispatch();
    CheckConservation();
  }

  void AssignChargers() {
    const int h = std::min(grid_.EpochOf(clock_), grid_.NumEpochs() - 1);
    for (auto& veh : vehicles_) {
      if (veh.state != VehicleState::kIdle || pool_.Contains(veh.id)) continue;
      if (!(veh.soc < econ_.low_soc_fraction * veh.battery_capacity)) continue;
      const double cap = cfg_.randomized_target ? assigner::DrawTargetCap(veh, rng_) : veh.e_max;
      const double target =
          assigner::TargetSoc(veh.soc, params_->delta, h, veh.e_min, cap, cfg_.anticipate);
      pool_.Add(veh.id, assigner::PoolReason::kLowSoc, target);
      Trace(EventKind::kBatchTick, veh.id, -1, -1, fmt::format("pool=LowSoC;target={}", target));
    }

    std::vector<assigner::Candidate> cands;
    std::vector<int> drop;
    for (const auto& entry : pool_.entries()) {
      const Vehicle& veh = vehicles_[entry.vehicle_id];
      if (veh.state != VehicleState::kIdle) continue;
      if (!assigner::Eligible(veh, entry.target, min_energy_)) {
        drop.push_back(entry.vehicle_id);
        continue;
      }
      cands.push_back({veh.id, veh.location, veh.soc, entry.target});
    }
    for (int v : drop) {
      pool_.Remove(v);
      Trace(EventKind::kBatchTick, v, -1, -1, "pool=out");
    }
    if (cands.empty()) return;

    assigner::AssignInstance inst;
    inst.now = clock_;
    inst.chargers = chargers_;
    inst.params = econ_;
    inst.wait = assigner::PredictWaits(cands, chargers_, Outlooks(), clock_, econ_);
    inst.vehicles = std::move(cands);
    assigner::AssignConfig acfg;
    acfg.max_queue_wait = cfg_.max_queue_wait;
    acfg.solver = cfg_.assign_solver;
    const assigner::AssignmentOutcome out = assigner::SolveWithRelaxation(inst, acfg);

    for (const auto& a : out.assignments) {
      const Vehicle& veh = vehicles_[a.vehicle_id];
      const Charger& c = chargers_[a.charger_id];
      const double at = veh.soc - EnergyFor(Distance(veh.location, c.location, econ_), econ_);
      const double target = std::min(veh.e_max, at + a.energy);
      pool_.Remove(a.vehicle_id);
      SendToCharger(a.vehicle_id, a.charger_id, target,
                    fmt::format("wait={};psi={}", a.wait_minutes, a.energy));
    }
    for (const auto& a : out.delayed) {
      if (assigner::PoolEntry* e = pool_.Find(a.vehicle_id)) e->reason = assigner::PoolReason::kDelayed;
      Trace(EventKind::kBatchTick, a.vehicle_id, a.charger_id, -1,
            fmt::format("pool=Delayed;wait={}", a.wait_minutes));
    }
    for (int v : out.removed) Trace(EventKind::kBatchTick, v, -1, -1, "pool=Removed");
  }

  void BenchmarkCharging() {
    std::vector<ChargerOutlook> outlooks;
    for (auto& veh : vehicles_) {
      if (veh.state != VehicleState::kIdle) continue;
      if (!policies::ShouldTrigger(cfg_.policy, veh, clock_, trigger_)) continue;
      if (veh.soc >= veh.e_max) continue;
      // Refreshed per vehicle so that earlier decisions in this batch count.
      outlooks = Outlooks();
      const auto s = policies::SelectCharger(cfg_.policy, veh, chargers_, outlooks, clock_, econ_, rng_);
      if (!s) continue;
      SendToCharger(veh.id, *s, veh.e_max, "trigger");
    }
  }

  void Dispatch() {
    if (pending_.empty()) return;
    dispatch::DispatchInstance inst;
    inst.now = clock_;
    inst.params = econ_;
    for (int r : pending_) inst.requests.push_back(requests_[r]);
    for (const auto& veh : vehicles_) {
      if (veh.state != VehicleState::kIdle) continue;
      Vehicle copy = veh;
      if (cfg_.energy_unconstrained) {
        copy.soc = copy.battery_capacity;
      }
      inst.vehicles.push_back(copy);
    }

    std::vector<char> gone(pending_.size(), 0);
    if (inst.vehicles.empty()) {
      for (std::size_t i = 0; i < pending_.size(); ++i) {
        if (inst.requests[i].WaitAt(clock_) >= econ_.max_customer_wait) gone[i] = 1;
      }
      for (std::size_t i = 0; i < pending_.size(); ++i) {
        if (gone[i]) Abandon(pending_[i]);
      }
    } else {
      const dispatch::DispatchResult res = dispatch::SolveDispatch(inst, cfg_.dispatch_solver);
      for (int i : res.abandoned) {
        gone[i] = 1;
        Abandon(pending_[i]);
      }
      for (const auto& m : res.matches) {
        gone[m.request] = 1;
        const int r = pending_[m.request];
        const int v = inst.vehicles[m.vehicle].id;
        requests_[r].status = RequestStatus::kAssigned;
        vaux_[v].request = r;
        StartLeg(v, requests_[r].origin, VehicleState::kToPickup, EventKind::kVehicleArrivedPickup, -1, r);
        Trace(EventKind::kBatchTick, v, -1, r, fmt::format("match;profit={}", m.net_profit));
      }
    }
    std::vector<int> keep;
    for (std::size_t i = 0; i < pending_.size(); ++i) {
      if (!gone[i]) keep.push_back(pending_[i]);
    }
    pending_ = std::move(keep);
  }

  void Abandon(int r, EventKind when = EventKind::kBatchTick) {
    requests_[r].status = RequestStatus::kAbandoned;
    ++abandoned_;
    Trace(when, -1, -1, r, "abandoned");
  }

  void OnArrivedPickup(int v, int r) {
    const double km = EndLeg(v, LegKind::kToPickup);
    const double wait = clock_ - requests_[r].arrival_time;
    if (wait > econ_.max_customer_wait + grid_.batch_interval + 1e-9) {
      Violation(fmt::format("request {} waited {} min", r, wait));
    }
    Trace(EventKind::kVehicleArrivedPickup, v, -1, r, fmt::format("km={};wait={}", km, wait));
    StartLeg(v, requests_[r].destination, VehicleState::kServing, EventKind::kTripCompleted, -1, r);
  }

  void OnTripCompleted(int v, int r) {
    if (r < 0) {
      const double km = EndLeg(v, LegKind::kReturn);
      vehicles_[v].state = VehicleState::kIdle;
      Trace(EventKind::kTripCompleted, v, -1, -1, fmt::format("km={};return", km));
      return;
    }
    const double km = EndLeg(v, LegKind::kWithCustomer);
    requests_[r].status = RequestStatus::kServed;
    ++served_;
    revenue_ += requests_[r].fare;
    vehicles_[v].state = VehicleState::kIdle;
    vaux_[v].request = -1;
    Trace(EventKind::kTripCompleted, v, -1, r, fmt::format("km={};fare={}", km, requests_[r].fare));
    // Drop-offs outside the service area are followed by an empty drive back
    // to its nearest point.
    const auto& area = sc_.config.demand.area;
    const Point here = vehicles_[v].location;
    if (!area.Contains(here)) {
      const Point back{std::clamp(here.x, 0.0, area.width), std::clamp(here.y, 0.0, area.height)};
      StartLeg(v, back, VehicleState::kServing, EventKind::kTripCompleted, -1, -1);
    }
  }

  void OnArrivedCharger(int v, int s) {
    const double km = EndLeg(v, LegKind::kToCharger);
    Vehicle& veh = vehicles_[v];
    VehicleAux& a = vaux_[v];
    veh.state = VehicleState::kIdle;  // not inbound any more
    Trace(EventKind::kVehicleArrivedCharger, v, s, -1, fmt::format("km={}", km));
    if (clock_ >= grid_.service_end - kEps) {
      a.trip_wait = 0.0;
      a.moves = 0;
      return;
    }
    const auto outlooks = Outlooks();
    const double wait = outlooks[s].PredictWait(clock_, clock_);
    result_.log.charger_arrivals.push_back({v, s, clock_, wait});
    if (a.moves < cfg_.max_chasing_moves) {
      const auto act = policies::OnArrivalRequeue(cfg_.queue_behavior, veh, s, wait, chargers_, outlooks,
                                                  clock_, cfg_.max_wait_at_charger, econ_);
      if (act.move) {
        ++a.moves;
        if (cfg_.trace) {
          result_.trace.push_back({clock_, EventKind::kRequeueDecision, v, act.charger, -1,
                                   fmt::format("from={};wait={}", s, wait)});
        }
        SendToCharger(v, act.charger, a.target, "requeue");
        return;
      }
    }
    a.session.arrival = clock_;
    JoinOrStart(v, s);
  }

  void OnChargingFinished(int v, int s) {
    Vehicle& veh = vehicles_[v];
    VehicleAux& a = vaux_[v];
    Charger& c = chargers_[s];
    veh.soc += a.session.energy;
    a.charged += a.session.energy;
    veh.state = VehicleState::kIdle;
    veh.location = c.location;
    caux_[s].vehicle = -1;
    SessionRecord rec{v, s, a.session.arrival, a.session.start, a.session.end, a.session.energy,
                      a.session.cost, a.trip_wait};
    result_.log.sessions.push_back(rec);
    result_.queue_waits.push_back(a.trip_wait);
    Trace(EventKind::kChargingFinished, v, s, -1,
          fmt::format("energy={};cost={};wait={};minutes={}", rec.energy, rec.cost, rec.queue_wait,
                      rec.end - rec.start));
    a.trip_wait = 0.0;
    a.moves = 0;
    a.charger = -1;

    if (!c.queue.empty() && clock_ < grid_.service_end - kEps) {
      const int next = c.queue.front();
      c.queue.pop_front();
      vaux_[next].trip_wait += clock_ - vaux_[next].queue_join;
      StartSession(next, s);
    }
  }

  void OnDayEnd() {
    for (int r : pending_) Abandon(r, EventKind::kDayEnd);
    pending_.clear();
    for (std::size_t s = 0; s < chargers_.size(); ++s) {
      for (int v : chargers_[s].queue) {
        VehicleAux& a = vaux_[v];
        const double wait = a.trip_wait + clock_ - a.queue_join;
        result_.queue_waits.push_back(wait);
        vehicles_[v].state = VehicleState::kIdle;
        Trace(EventKind::kDayEnd, v, static_cast<int>(s), -1, fmt::format("queued;wait={}", wait));
      }
      chargers_[s].queue.clear();
    }
    Trace(EventKind::kDayEnd, -1, -1, -1);
  }

  void CheckConservation() {
    int assigned = 0;
    for (const auto& r : requests_) assigned += r.status == RequestStatus::kAssigned;
    const int pending = static_cast<int>(pending_.size());
    if (served_ + abandoned_ + pending + assigned != arrived_) {
      Violation(fmt::format("requests do not add up: {} served, {} abandoned, {} pending, {} assigned, {} arrived",
                            served_, abandoned_, pending, assigned, arrived_));
    }
  }

  void Finish() {
    KpiReport& k = result_.kpi;
    for (const auto& r : requests_) {
      if (r.status != RequestStatus::kServed && r.status != RequestStatus::kAbandoned) {
        Violation(fmt::format("request {} ended {}", r.id, ToString(r.status)));
      }
    }
    CheckConservation();
    double energy = 0.0;
    double cost = 0.0;
    double occupancy = 0.0;
    for (const auto& s : result_.log.sessions) {
      energy += s.energy;
      cost += s.cost;
      occupancy += s.end - s.start;
    }
    std::map<int, std::vector<std::pair<double, double>>> busy;
    for (const auto& s : result_.log.sessions) busy[s.charger].push_back({s.start, s.end});
    for (auto& [c, spans] : busy) {
      std::sort(spans.begin(), spans.end());
      for (std::size_t i = 1; i < spans.size(); ++i) {
        if (spans[i].first < spans[i - 1].second - 1e-9) {
          Violation(fmt::format("charger {} sessions overlap at {}", c, spans[i].first));
        }
      }
    }
    for (std::size_t v = 0; v < vehicles_.size(); ++v) {
      const VehicleAux& a = vaux_[v];
      const double expect = a.initial_soc - EnergyFor(a.km, econ_) + a.charged;
      if (std::abs(vehicles_[v].soc - expect) > 1e-6) {
        Violation(fmt::format("vehicle {} energy ledger off by {}", v, vehicles_[v].soc - expect));
      }
      k.end_soc.push_back(vehicles_[v].soc);
    }
    double queue_total = 0.0;
    for (double w : result_.queue_waits) queue_total += w;

    k.tr = revenue_ / 1000.0;
    k.kmt = km_total_ / 1000.0;
    k.ttc = econ_.cost_per_km * km_total_ / 1000.0;
    k.cc = cost / 1000.0;
    k.pf = k.tr - k.ttc - k.cc;
    k.eng = energy;
    k.arrived = arrived_;
    k.served = served_;
    k.abandoned = abandoned_;
    k.sr = arrived_ > 0 ? static_cast<double>(served_) / arrived_ : 1.0;
    k.sessions = static_cast<int>(result_.log.sessions.size());
    k.access_cost = econ_.access_cost * k.sessions / 1000.0;
    k.tw = queue_total / 60.0;
    k.tc = occupancy / 60.0;
    k.mean_queue_wait = result_.queue_waits.empty() ? 0.0 : queue_total / result_.queue_waits.size();
    k.max_queue_wait = result_.queue_waits.empty()
                           ? 0.0
                           : *std::max_element(result_.queue_waits.begin(), result_.queue_waits.end());
    result_.log.profit = k.pf * 1000.0;
  }

  const scenario::Scenario& sc_;
  const SimConfig& cfg_;
  const EconomicParams& econ_;
  const TimeGrid& grid_;
  const planner::DayAheadPlan* plan_;
  const planner::PlanParams* params_;
  std::mt19937_64 rng_;
  std::vector<Vehicle> vehicles_;
  std::vector<Charger> chargers_;
  std::vector<Request> requests_;
  std::vector<VehicleAux> vaux_;
  std::vector<ChargerAux> caux_;
  std::vector<int> pending_;
  assigner::ChargePool pool_;
  policies::TriggerContext trigger_;
  double min_energy_ = 0.0;
  std::priority_queue<Event, std::vector<Event>, Later> events_;
  std::uint64_t seq_ = 0;
  double clock_ = -std::numeric_limits<double>::infinity();
  int arrived_ = 0;
  int served_ = 0;
  int abandoned_ = 0;
  double revenue_ = 0.0;
  double km_total_ = 0.0;
  DayResult result_;
};

std::map<std::string, std::string> Fields(const std::string& detail) {
  std::map<std::string, std::string> out;
  std::stringstream ss(detail);
  std::string item;
  while (std::getline(ss, item, ';')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) out[item] = "";
    else out[item.substr(0, eq)] = item.substr(eq + 1);
  }
  return out;
}

double Num(const std::map<std::string, std::string>& f, const std::string& key) {
  const auto it = f.find(key);
  return it == f.end() ? 0.0 : std::stod(it->second);
}

}  // namespace

std::string_view ToString(EventKind k) { return kKindNames[static_cast<std::size_t>(k)]; }

EventKind ParseEventKind(std::string_view s) {
  for (std::size_t i = 0; i < std::size(kKindNames); ++i) {
    if (kKindNames[i] == s) return static_cast<EventKind>(i);
  }
  throw ConfigError(fmt::format("unknown event kind '{}'", s));
}

void SimConfig::Validate() const {
  if (!(max_wait_at_charger >= 0)) throw ConfigError("max_wait_at_charger must be nonnegative");
  if (!(max_queue_wait >= 0)) throw ConfigError("max_queue_wait must be nonnegative");
  if (max_chasing_moves < 0) throw ConfigError("max_chasing_moves must be nonnegative");
  dispatch_solver.Validate();
  assign_solver.Validate();
}

void WriteTrace(std::ostream& out, const std::vector<TraceRecord>& trace) {
  out << "time,event_kind,vehicle_id,charger_id,request_id,detail\n";
  for (const auto& r : trace) {
    out << fmt::format("{},{},{},{},{},{}\n", r.time, ToString(r.kind), r.vehicle, r.charger, r.request,
                       r.detail);
  }
}

std::vector<TraceRecord> ReadTrace(std::istream& in) {
  csv::Reader reader(in, {"time", "event_kind", "vehicle_id", "charger_id", "request_id", "detail"});
  std::vector<TraceRecord> out;
  std::vector<std::string> f;
  while (reader.Next(f)) {
    const int line = reader.line_number();
    TraceRecord r;
    r.time = csv::ParseDouble(f[0], "time", line);
    r.kind = ParseEventKind(f[1]);
    r.vehicle = csv::ParseInt(f[2], "vehicle_id", line);
    r.charger = csv::ParseInt(f[3], "charger_id", line);
    r.request = csv::ParseInt(f[4], "request_id", line);
    r.detail = f[5];
    out.push_back(std::move(r));
  }
  return out;
}

DayResult RunDay(const scenario::Scenario& sc, const SimConfig& cfg, const planner::DayAheadPlan* plan,
                 const planner::PlanParams* params) {
  sc.Validate();
  cfg.Validate();
  Simulator sim(sc, cfg, plan, params);
  return sim.Run();
}

KpiReport KpisFromTrace(const std::vector<TraceRecord>& trace, const EconomicParams& econ) {
  KpiReport k;
  double km = 0.0;
  double revenue = 0.0;
  double cost = 0.0;
  double wait = 0.0;
  for (const auto& r : trace) {
    const auto f = Fields(r.detail);
    switch (r.kind) {
      case EventKind::kRequestArrival: ++k.arrived; break;
      case EventKind::kVehicleArrivedPickup:
      case EventKind::kVehicleArrivedCharger: km += Num(f, "km"); break;
      case EventKind::kTripCompleted:
        km += Num(f, "km");
        if (r.request >= 0) {
          revenue += Num(f, "fare");
          ++k.served;
        }
        break;
      case EventKind::kChargingFinished:
        k.eng += Num(f, "energy");
        cost += Num(f, "cost");
        wait += Num(f, "wait");
        k.tc += Num(f, "minutes") / 60.0;
        ++k.sessions;
        break;
      case EventKind::kBatchTick:
        if (f.count("abandoned")) ++k.abandoned;
        break;
      case EventKind::kDayEnd:
        if (f.count("queued")) wait += Num(f, "wait");
        if (f.count("abandoned")) ++k.abandoned;
        break;
      default: break;
    }
  }
  k.tr = revenue / 1000.0;
  k.kmt = km / 1000.0;
  k.ttc = econ.cost_per_km * km / 1000.0;
  k.cc = cost / 1000.0;
  k.pf = k.tr - k.ttc - k.cc;
  k.tw = wait / 60.0;
  k.sr = k.arrived > 0 ? static_cast<double>(k.served) / k.arrived : 1.0;
  k.access_cost = econ.access_cost * k.sessions / 1000.0;
  return k;
}

}  // namespace evfleet::sim
