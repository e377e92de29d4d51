#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <random>
#include <string>
#include <vector>

#include "evfleet/core/price_schedule.hpp"
#include "evfleet/core/types.hpp"

namespace evfleet::scenario {

struct Area {
  double width = 4.0;    // km
  double height = 20.0;  // km

  bool Contains(Point p) const { return p.x >= 0 && p.x <= width && p.y >= 0 && p.y <= height; }
};

struct StationSpec {
  int station_id = 0;
  Point location;
  double power_kw = 50.0;
  ChargerClass charger_class = ChargerClass::kFast;
  int count = 3;
};

// Two fast and two slow stations with `per_station` chargers each.
std::vector<StationSpec> DefaultStations(int per_station = 3);

// Chargers numbered from 0 in station order.
std::vector<Charger> GenerateNetwork(const std::vector<StationSpec>& stations,
                                     double min_charge_minutes, const TimeGrid& grid);

// Expected arrivals per bin, bins of `bin_minutes` from `start`.
struct DemandProfile {
  double start = 360.0;
  double bin_minutes = 10.0;
  std::vector<double> expected;

  double Total() const;
  // Peaks 8-10, 12-13 and 15-18 on a lower base, 108 ten-minute bins,
  // scaled to `total` expected arrivals.
  static DemandProfile Default(double total);
  static DemandProfile Flat(double total, int bins = 108);
};

struct DemandSpec {
  Area area;
  double destination_buffer = 5.0;  // km the destination box extends past the area
  double min_trip_km = 5.0;
};

// Poisson counts per bin, uniform times within the bin, uniform origins in
// the area and destinations in the buffered box resampled until the trip is
// long enough. Requests are numbered in arrival order.
std::vector<Request> GenerateDemand(const DemandProfile& profile, const DemandSpec& spec,
                                    const EconomicParams& econ, std::mt19937_64& rng);

struct FleetSpec {
  int size = 100;
  double battery_kwh = 62.0;
  double e_min_fraction = 0.10;
  double e_max_fraction = 0.80;
  double e_init_fraction = 1.0;
};

std::vector<Vehicle> GenerateFleet(const FleetSpec& spec, const Area& area, std::mt19937_64& rng);

enum class PriceMode : std::uint8_t { kTimeOfUse, kConstant };

// Everything needed to build a day. Also the key=value file of a bundle.
struct ScenarioConfig {
  TimeGrid grid;
  EconomicParams econ;
  FleetSpec fleet;
  DemandSpec demand;
  double demand_total = 3000.0;
  double min_charge_minutes = 10.0;
  std::vector<StationSpec> stations = DefaultStations();
  PriceMode price_mode = PriceMode::kTimeOfUse;
  double constant_price = 0.33;
  std::uint64_t seed = 1;

  // Throws ConfigError naming the key when the key is unknown or the value
  // does not parse.
  void Set(const std::string& key, const std::string& value);
  void Validate() const;
  void Write(std::ostream& out) const;
  static ScenarioConfig Read(std::istream& in);
};

// Adjusts the stations to the given fast and slow charger totals by spreading
// them over the stations of each class as evenly as possible.
void SetChargerCounts(ScenarioConfig& cfg, int fast, int slow);

struct Scenario {
  ScenarioConfig config;
  std::vector<Vehicle> fleet;
  std::vector<Charger> chargers;
  std::vector<Request> requests;
  PriceSchedule prices;

  // Throws ConfigError on broken invariants.
  void Validate() const;
};

// Pure function of the config (its seed included).
Scenario Generate(const ScenarioConfig& cfg);

// Trip file: header pickup_minute,origin_x,origin_y,dest_x,dest_y.
std::vector<Request> ReadTrips(std::istream& in, const EconomicParams& econ, const DemandSpec& spec);
std::vector<Request> LoadTrips(const std::filesystem::path& path, const EconomicParams& econ,
                               const DemandSpec& spec);
void WriteTrips(std::ostream& out, const std::vector<Request>& requests);

// Charger file: header station_id,x,y,power_kw,class,count.
std::vector<StationSpec> ReadStations(std::istream& in);
void WriteStations(std::ostream& out, const std::vector<StationSpec>& stations);

// Bundle directory: scenario.cfg, trips.csv, prices.csv, chargers.csv. The
// fleet is drawn from the config seed.
void SaveBundle(const Scenario& s, const std::filesystem::path& dir);
Scenario LoadBundle(const std::filesystem::path& dir);

}  // namespace evfleet::scenario
