#include <map>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "evfleet/core/arith.hpp"
#include "evfleet/scenario/scenario.hpp"
#include "evfleet/sim/sim.hpp"

namespace evfleet::sim {
namespace {

using policies::PolicyKind;

Vehicle MakeVehicle(int id, Point at, double soc) {
  Vehicle v;
  v.id = id;
  v.location = at;
  v.soc = soc;
  return v;
}

Request MakeRequest(int id, Point o, Point d, double t, const EconomicParams& p) {
  Request r;
  r.id = id;
  r.origin = o;
  r.destination = d;
  r.arrival_time = t;
  r.fare = Fare(Distance(o, d, p), p);
  return r;
}

scenario::Scenario Tiny(std::vector<Vehicle> fleet, std::vector<Request> requests = {}) {
  scenario::Scenario sc;
  sc.config.fleet.size = static_cast<int>(fleet.size());
  sc.config.price_mode = scenario::PriceMode::kConstant;
  sc.fleet = std::move(fleet);
  sc.chargers = scenario::GenerateNetwork(scenario::DefaultStations(1), 10.0, sc.config.grid);
  sc.requests = std::move(requests);
  sc.prices = PriceSchedule::Constant(0.33);
  return sc;
}

SimConfig Benchmark(PolicyKind k) {
  SimConfig c;
  c.policy = k;
  return c;
}

std::map<std::string, std::string> Fields(const std::string& detail) {
  std::map<std::string, std::string> out;
  std::istringstream in(detail);
  std::string kv;
  while (std::getline(in, kv, ';')) {
    const auto eq = kv.find('=');
    if (eq != std::string::npos) out[kv.substr(0, eq)] = kv.substr(eq + 1);
  }
  return out;
}

std::vector<TraceRecord> OfKind(const DayResult& r, EventKind k) {
  std::vector<TraceRecord> out;
  for (const auto& t : r.trace) {
    if (t.kind == k) out.push_back(t);
  }
  return out;
}

TEST(SimTest, EventKindNamesRoundTrip) {
  for (int k = 0; k <= static_cast<int>(EventKind::kDayEnd); ++k) {
    const auto kind = static_cast<EventKind>(k);
    EXPECT_EQ(ParseEventKind(ToString(kind)), kind);
  }
}

TEST(SimTest, ZeroRequests) {
  const DayResult r = RunDay(Tiny({MakeVehicle(0, {1, 1}, 62.0)}), Benchmark(PolicyKind::kNearest));
  EXPECT_TRUE(r.violations.empty());
  EXPECT_EQ(r.kpi.arrived, 0);
  EXPECT_DOUBLE_EQ(r.kpi.sr, 1.0);
  EXPECT_DOUBLE_EQ(r.kpi.pf, 0.0);
  EXPECT_EQ(r.kpi.sessions, 0);
  EXPECT_DOUBLE_EQ(r.kpi.end_soc[0], 62.0);
  EXPECT_EQ(r.kpi.charging_per_epoch.size(), 36u);
}

TEST(SimTest, SingleTripHandTrace) {
  const EconomicParams econ;
  // 2 km deadhead (4 min) then a 5 km trip (10 min)
  const scenario::Scenario sc =
      Tiny({MakeVehicle(0, {2, 0}, 62.0)}, {MakeRequest(0, {0, 0}, {0, 5}, 600.0, econ)});
  const DayResult r = RunDay(sc, Benchmark(PolicyKind::kNearest));
  EXPECT_TRUE(r.violations.empty());
  EXPECT_EQ(r.kpi.served, 1);
  EXPECT_DOUBLE_EQ(r.kpi.sr, 1.0);
  EXPECT_NEAR(r.kpi.tr, 23.5 / 1000.0, 1e-12);
  EXPECT_NEAR(r.kpi.kmt, 7.0 / 1000.0, 1e-12);
  EXPECT_NEAR(r.kpi.ttc, 0.53 * 7.0 / 1000.0, 1e-12);
  EXPECT_NEAR(r.kpi.pf, (23.5 - 0.53 * 7.0) / 1000.0, 1e-12);
  EXPECT_NEAR(r.kpi.end_soc[0], 62.0 - 0.25 * 7.0, 1e-9);

  const auto pickup = OfKind(r, EventKind::kVehicleArrivedPickup);
  ASSERT_EQ(pickup.size(), 1u);
  EXPECT_DOUBLE_EQ(pickup[0].time, 604.0);
  const auto done = OfKind(r, EventKind::kTripCompleted);
  ASSERT_EQ(done.size(), 1u);
  EXPECT_DOUBLE_EQ(done[0].time, 614.0);
  EXPECT_EQ(done[0].request, 0);
}

TEST(SimTest, DropOffOutsideAreaDrivesBack) {
  const EconomicParams econ;
  // Drop-off at (7, 2) lies 3 km east of the 4 km wide area
  const scenario::Scenario sc =
      Tiny({MakeVehicle(0, {1, 2}, 62.0)}, {MakeRequest(0, {1, 2}, {7, 2}, 600.0, econ)});
  const DayResult r = RunDay(sc, Benchmark(PolicyKind::kNearest));
  EXPECT_TRUE(r.violations.empty());
  const auto done = OfKind(r, EventKind::kTripCompleted);
  ASSERT_EQ(done.size(), 2u);
  EXPECT_EQ(done[1].request, -1);
  EXPECT_DOUBLE_EQ(done[1].time, 600.0 + 12.0 + 6.0);
  EXPECT_NEAR(r.kpi.kmt, 9.0 / 1000.0, 1e-12);
}

TEST(SimTest, LateRequestAbandoned) {
  const EconomicParams econ;
  // 20 km away: 40 min pickup exceeds the 10 min limit
  const scenario::Scenario sc =
      Tiny({MakeVehicle(0, {4, 20}, 62.0)}, {MakeRequest(0, {0, 0}, {0, 6}, 600.0, econ)});
  const DayResult r = RunDay(sc, Benchmark(PolicyKind::kNearest));
  EXPECT_TRUE(r.violations.empty());
  EXPECT_EQ(r.kpi.abandoned, 1);
  EXPECT_DOUBLE_EQ(r.kpi.sr, 0.0);
}

TEST(SimTest, SessionLengthFromDeficit) {
  // Low threshold raised so a 24.6 kWh vehicle parked at the first fast charger triggers
  scenario::Scenario sc = Tiny({MakeVehicle(0, {2, 3}, 24.6)});
  sc.config.econ.low_soc_fraction = 0.5;
  const DayResult r = RunDay(sc, Benchmark(PolicyKind::kNearest));
  EXPECT_TRUE(r.violations.empty());
  const auto fin = OfKind(r, EventKind::kChargingFinished);
  ASSERT_EQ(fin.size(), 1u);
  const auto f = Fields(fin[0].detail);
  EXPECT_NEAR(std::stod(f.at("minutes")), 30.0, 1e-9);
  EXPECT_NEAR(std::stod(f.at("energy")), 25.0, 1e-9);
  EXPECT_NEAR(std::stod(f.at("cost")), 25.0 * 0.33, 1e-9);
  EXPECT_NEAR(r.kpi.cc, 25.0 * 0.33 / 1000.0, 1e-12);
  EXPECT_NEAR(r.kpi.tc, 0.5, 1e-12);
  EXPECT_NEAR(r.kpi.end_soc[0], 49.6, 1e-9);
}

TEST(SimTest, ShortSessionHeldToMinimum) {
  // 5 kWh deficit takes 6 min; the session lasts 10 and stops at e_max
  scenario::Scenario sc = Tiny({MakeVehicle(0, {2, 3}, 44.6)});
  sc.config.econ.low_soc_fraction = 0.75;
  const DayResult r = RunDay(sc, Benchmark(PolicyKind::kNearest));
  EXPECT_TRUE(r.violations.empty());
  const auto fin = OfKind(r, EventKind::kChargingFinished);
  ASSERT_EQ(fin.size(), 1u);
  const auto f = Fields(fin[0].detail);
  EXPECT_NEAR(std::stod(f.at("minutes")), 10.0, 1e-9);
  EXPECT_NEAR(std::stod(f.at("energy")), 5.0, 1e-9);
  EXPECT_NEAR(r.kpi.end_soc[0], 49.6, 1e-9);
}

TEST(SimTest, SecondVehicleQueues) {
  // Both park at the first fast charger; the second waits 30 min
  scenario::Scenario sc = Tiny({MakeVehicle(0, {2, 3}, 24.6), MakeVehicle(1, {2, 3}, 24.6)});
  sc.config.econ.low_soc_fraction = 0.5;
  const DayResult r = RunDay(sc, Benchmark(PolicyKind::kNearest));
  EXPECT_TRUE(r.violations.empty());
  ASSERT_EQ(r.queue_waits.size(), 2u);
  EXPECT_NEAR(r.queue_waits[0] + r.queue_waits[1], 30.0, 1e-9);
  EXPECT_NEAR(r.kpi.tw, 0.5, 1e-12);
  EXPECT_NEAR(r.kpi.max_queue_wait, 30.0, 1e-9);
}

scenario::Scenario Desk(std::uint64_t seed) {
  scenario::ScenarioConfig cfg;
  cfg.Set("fleet_size", "20");
  cfg.Set("demand_total", "600");
  cfg.Set("chargers_per_station", "1");
  cfg.seed = seed;
  return scenario::Generate(cfg);
}

TEST(SimTest, DeterministicReplay) {
  const scenario::Scenario sc = Desk(11);
  SimConfig cfg = Benchmark(PolicyKind::kFastest);
  cfg.seed = 11;
  const DayResult a = RunDay(sc, cfg);
  const DayResult b = RunDay(sc, cfg);
  EXPECT_EQ(a.trace, b.trace);
  EXPECT_EQ(a.kpi.pf, b.kpi.pf);
  EXPECT_EQ(a.kpi.tw, b.kpi.tw);
}

TEST(SimTest, TraceRoundTripAndRebuild) {
  const scenario::Scenario sc = Desk(12);
  for (auto k : policies::kBenchmarks) {
    SimConfig cfg = Benchmark(k);
    cfg.queue_behavior = policies::QueueBehavior::kChasingB;
    const DayResult r = RunDay(sc, cfg);
    EXPECT_TRUE(r.violations.empty()) << policies::ToString(k) << ": " << r.violations.front();
    EXPECT_NEAR(r.kpi.pf, r.kpi.tr - r.kpi.ttc - r.kpi.cc, 1e-9);
    EXPECT_NEAR(r.kpi.ttc, 0.53 * r.kpi.kmt, 1e-9);

    std::stringstream io;
    WriteTrace(io, r.trace);
    const auto back = ReadTrace(io);
    ASSERT_EQ(back.size(), r.trace.size());
    const KpiReport t = KpisFromTrace(back, sc.config.econ);
    EXPECT_NEAR(t.tr, r.kpi.tr, 1e-6);
    EXPECT_NEAR(t.ttc, r.kpi.ttc, 1e-6);
    EXPECT_NEAR(t.cc, r.kpi.cc, 1e-6);
    EXPECT_NEAR(t.eng, r.kpi.eng, 1e-4);
    EXPECT_NEAR(t.kmt, r.kpi.kmt, 1e-6);
    EXPECT_NEAR(t.tw, r.kpi.tw, 1e-6);
    EXPECT_EQ(t.arrived, r.kpi.arrived);
    EXPECT_EQ(t.served, r.kpi.served);
    EXPECT_EQ(t.abandoned, r.kpi.abandoned);
    EXPECT_EQ(t.sessions, r.kpi.sessions);
  }
}

TEST(SimTest, EnergyUnconstrainedNeverCharges) {
  const scenario::Scenario sc = Desk(13);
  SimConfig cfg = Benchmark(PolicyKind::kFastest);
  cfg.energy_unconstrained = true;
  const DayResult r = RunDay(sc, cfg);
  EXPECT_EQ(r.kpi.sessions, 0);
  EXPECT_GT(r.kpi.served, 0);
}

TEST(SimTest, CongestionAwareNeedsPlan) {
  EXPECT_THROW(RunDay(Desk(1), SimConfig{}), ConfigError);
}

}  // namespace
}  // namespace evfleet::sim
