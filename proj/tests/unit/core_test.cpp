#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "evfleet/core/arith.hpp"
#include "evfleet/core/charger_outlook.hpp"
#include "evfleet/core/csv.hpp"
#include "evfleet/core/price_schedule.hpp"
#include "evfleet/core/types.hpp"

namespace evfleet {
namespace {

TEST(DistanceTest, RectilinearExamples) {
  EXPECT_DOUBLE_EQ(Distance({0, 0}, {0, 0}), 0.0);
  EXPECT_DOUBLE_EQ(Distance({0, 0}, {3, 4}), 7.0);
  EXPECT_DOUBLE_EQ(Distance({1, 2}, {4, 2}), 3.0);
  EXPECT_DOUBLE_EQ(Distance({0, 0}, {3, 4}, DistanceMetric::kEuclidean), 5.0);
}

TEST(DistanceTest, MetricAxiomsOnRandomPoints) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-5.0, 25.0);
  for (auto metric : {DistanceMetric::kManhattan, DistanceMetric::kEuclidean}) {
    for (int i = 0; i < 2000; ++i) {
      const Point a{u(rng), u(rng)};
      const Point b{u(rng), u(rng)};
      const Point c{u(rng), u(rng)};
      EXPECT_GE(Distance(a, b, metric), 0.0);
      EXPECT_DOUBLE_EQ(Distance(a, b, metric), Distance(b, a, metric));
      EXPECT_LE(Distance(a, c, metric), Distance(a, b, metric) + Distance(b, c, metric) + 1e-12);
    }
  }
}

TEST(ArithTest, TravelFareEnergyExamples) {
  const EconomicParams p;
  EXPECT_DOUBLE_EQ(TravelTime(0.0, p), 0.0);
  EXPECT_DOUBLE_EQ(TravelTime(7.0, p), 14.0);
  EXPECT_DOUBLE_EQ(TravelTime(5.0, p), 10.0);
  EXPECT_DOUBLE_EQ(Fare(0.0, p), 8.0);
  EXPECT_DOUBLE_EQ(Fare(5.0, p), 23.5);
  EXPECT_DOUBLE_EQ(Fare(10.0, p), 39.0);
  EXPECT_DOUBLE_EQ(EnergyFor(0.0, p), 0.0);
  EXPECT_DOUBLE_EQ(EnergyFor(7.0, p), 1.75);
  EXPECT_DOUBLE_EQ(EnergyFor(20.0, p), 5.0);
}

TEST(ArithTest, LinearAndMonotone) {
  const EconomicParams p;
  for (double d = 0.0; d < 30.0; d += 0.7) {
    EXPECT_LT(Fare(d, p), Fare(d + 0.1, p));
    EXPECT_LT(EnergyFor(d, p), EnergyFor(d + 0.1, p));
    EXPECT_LT(TravelTime(d, p), TravelTime(d + 0.1, p));
    EXPECT_NEAR(Fare(2 * d, p) - Fare(d, p), Fare(d, p) - Fare(0, p), 1e-9);
    EXPECT_NEAR(EnergyFor(2 * d, p), 2 * EnergyFor(d, p), 1e-12);
  }
}

TEST(TimeGridTest, DefaultsAndEpochMapping) {
  const TimeGrid g;
  g.Validate();
  EXPECT_EQ(g.NumEpochs(), 36);
  EXPECT_EQ(g.NumBatches(), 1080);
  EXPECT_DOUBLE_EQ(g.EpochStart(0), 360.0);
  EXPECT_DOUBLE_EQ(g.EpochEnd(0), 390.0);
  EXPECT_EQ(g.EpochOf(360.0), 0);
  EXPECT_EQ(g.EpochOf(389.99), 0);
  EXPECT_EQ(g.EpochOf(390.0), 1);
  EXPECT_EQ(g.EpochOf(1440.0), 36);
  EXPECT_TRUE(g.IsEpochBoundary(420.0));
  EXPECT_FALSE(g.IsEpochBoundary(421.0));
}

TEST(TimeGridTest, RejectsInconsistentIntervals) {
  TimeGrid g;
  g.epoch_interval = 7.5;
  g.batch_interval = 2.0;
  EXPECT_THROW(g.Validate(), ConfigError);
  TimeGrid h;
  h.epoch_interval = 0.0;
  EXPECT_THROW(h.Validate(), ConfigError);
}

TEST(EconomicParamsTest, RejectsNonPositive) {
  EconomicParams p;
  p.Validate();
  p.speed_kmh = 0.0;
  EXPECT_THROW(p.Validate(), ConfigError);
}

TEST(ChargerTest, PerEpochCapFollowsPower) {
  const TimeGrid g;
  const Charger fast = MakeCharger(0, 0, {2, 3}, 50.0, ChargerClass::kFast, 10.0, g);
  const Charger slow = MakeCharger(1, 1, {1, 7}, 11.0, ChargerClass::kSlow, 10.0, g);
  EXPECT_DOUBLE_EQ(fast.per_epoch_energy_cap, 25.0);
  EXPECT_DOUBLE_EQ(slow.per_epoch_energy_cap, 5.5);
  EXPECT_NEAR(fast.MinSessionEnergy(), 50.0 / 6.0, 1e-12);
  EXPECT_EQ(ParseChargerClass("fast"), ChargerClass::kFast);
  EXPECT_EQ(ParseChargerClass("slow"), ChargerClass::kSlow);
  EXPECT_THROW(ParseChargerClass("medium"), ConfigError);
}

TEST(PriceScheduleTest, ConstantSchedule) {
  const auto s = PriceSchedule::Constant(0.33);
  const TimeGrid g;
  EXPECT_DOUBLE_EQ(s.PriceAt(0.0), 0.33);
  EXPECT_DOUBLE_EQ(s.PriceAt(777.7), 0.33);
  EXPECT_DOUBLE_EQ(s.PriceAt(1440.0), 0.33);
  for (int h = 0; h < g.NumEpochs(); ++h) EXPECT_NEAR(s.EpochPrice(h, g), 0.33, 1e-12);
}

TEST(PriceScheduleTest, EpochPriceIsMeanOfSteps) {
  TimeGrid g;
  g.service_start = 0.0;
  g.service_end = 30.0;
  const PriceSchedule s(0.0, 15.0, {0.10, 0.20});
  EXPECT_NEAR(s.EpochPrice(0, g), 0.15, 1e-12);
}

TEST(PriceScheduleTest, DefaultTimeOfUseRange) {
  const auto s = PriceSchedule::DefaultTimeOfUse();
  ASSERT_EQ(s.steps().size(), 96u);
  const auto [lo, hi] = std::minmax_element(s.steps().begin(), s.steps().end());
  EXPECT_DOUBLE_EQ(*lo, 0.09);
  EXPECT_DOUBLE_EQ(*hi, 0.58);
}

TEST(PriceScheduleTest, OutOfRangeQueryThrows) {
  const PriceSchedule s(360.0, 15.0, {0.2, 0.3});
  EXPECT_THROW(s.PriceAt(100.0), ConfigError);
  EXPECT_THROW(s.PriceAt(400.0), ConfigError);
  EXPECT_THROW(PriceSchedule(0.0, 15.0, {0.2, -0.1}), ConfigError);
}

TEST(PriceScheduleTest, EnergyCostIsPiecewise) {
  const PriceSchedule s(0.0, 15.0, {0.10, 0.20, 0.40});
  // 10 minutes in the first step and 5 in the second at 60 kW.
  EXPECT_NEAR(s.EnergyCost(5.0, 20.0, 60.0), 10.0 * 0.10 + 5.0 * 0.20, 1e-12);
  EXPECT_NEAR(s.EnergyCost(0.0, 45.0, 60.0), 15.0 * (0.1 + 0.2 + 0.4), 1e-12);
  EXPECT_DOUBLE_EQ(s.EnergyCost(10.0, 10.0, 60.0), 0.0);
}

TEST(PriceScheduleTest, CsvRoundTrip) {
  const auto s = PriceSchedule::DefaultTimeOfUse();
  std::stringstream ss;
  s.WriteCsv(ss);
  const auto r = PriceSchedule::ReadCsv(ss);
  EXPECT_EQ(r.steps(), s.steps());
  EXPECT_DOUBLE_EQ(r.resolution(), 15.0);
}

TEST(PriceScheduleTest, CsvRejectsGapsAndDisorder) {
  std::stringstream gap("start_minute,price_usd_per_kwh\n0,0.1\n15,0.2\n45,0.3\n");
  EXPECT_THROW(PriceSchedule::ReadCsv(gap), ConfigError);
  std::stringstream order("start_minute,price_usd_per_kwh\n15,0.1\n0,0.2\n");
  EXPECT_THROW(PriceSchedule::ReadCsv(order), ConfigError);
  std::stringstream header("minute,price\n0,0.1\n");
  EXPECT_THROW(PriceSchedule::ReadCsv(header), ConfigError);
}

TEST(CsvTest, ReaderSkipsCommentsAndChecksWidth) {
  std::stringstream in("# comment\na,b\n\n1,2\n# x\n3\n");
  csv::Reader r(in, {"a", "b"});
  std::vector<std::string> f;
  ASSERT_TRUE(r.Next(f));
  EXPECT_EQ(f, (std::vector<std::string>{"1", "2"}));
  EXPECT_EQ(r.line_number(), 4);
  EXPECT_THROW(r.Next(f), ConfigError);
}

TEST(CsvTest, ParseErrorsCarryLineNumbers) {
  try {
    csv::ParseDouble("abc", "x", 12);
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("line 12"), std::string::npos);
  }
  EXPECT_EQ(csv::ParseInt("42", "n", 1), 42);
  EXPECT_THROW(csv::ParseInt("4.2", "n", 1), ConfigError);
}

TEST(ChargerOutlookTest, FifoLookahead) {
  ChargerOutlook o;
  o.busy_until = 100.0;
  o.queued_durations = {20.0, 10.0};
  // Free at 130; arriving at 110 waits 20.
  EXPECT_DOUBLE_EQ(o.PredictWait(90.0, 110.0), 20.0);
  // Arriving after everything clears waits nothing.
  EXPECT_DOUBLE_EQ(o.PredictWait(90.0, 140.0), 0.0);
  o.inbound = {{125.0, 15.0}, {200.0, 30.0}};
  // Inbound at 125 is ahead of an arrival at 128: free at 145.
  EXPECT_DOUBLE_EQ(o.PredictWait(90.0, 128.0), 17.0);
  // The inbound at 200 is behind an arrival at 150.
  EXPECT_DOUBLE_EQ(o.PredictWait(90.0, 150.0), 0.0);
}

TEST(ChargerOutlookTest, IdleChargerHasNoWait) {
  ChargerOutlook o;
  EXPECT_DOUBLE_EQ(o.PredictWait(500.0, 510.0), 0.0);
}

TEST(VehicleTest, ValidateChecksReserveOrdering) {
  Vehicle v;
  v.soc = 30.0;
  v.Validate();
  v.e_min = 55.0;
  EXPECT_THROW(v.Validate(), ConfigError);
  Vehicle w;
  w.soc = 70.0;
  EXPECT_THROW(w.Validate(), ConfigError);
}

}  // namespace
}  // namespace evfleet
