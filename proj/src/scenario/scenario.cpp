#include "evfleet/scenario/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string_view>

#include <fmt/format.h>

#include "evfleet/core/arith.hpp"
#include "evfleet/core/csv.hpp"

namespace evfleet::scenario {

namespace {

// Relative demand per service hour starting at 6:00.
constexpr double kHourWeights[18] = {0.5, 0.8, 2.2, 2.4, 1.1, 1.0, 1.5, 1.1, 1.0,
                                     1.5, 2.2, 2.4, 1.2, 1.0, 0.9, 0.8, 0.7, 0.5};

std::mt19937_64 Stream(std::uint64_t seed, std::uint64_t salt) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(salt)};
  return std::mt19937_64(seq);
}

std::string Trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

double ToDouble(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const double v = std::stod(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw ConfigError(fmt::format("{}: '{}' is not a number", key, value));
  }
}

int ToInt(const std::string& key, const std::string& value) {
  const double v = ToDouble(key, value);
  if (v != std::floor(v)) throw ConfigError(fmt::format("{}: '{}' is not an integer", key, value));
  return static_cast<int>(v);
}

}  // namespace

std::vector<StationSpec> DefaultStations(int per_station) {
  return {
      {0, {2.0, 3.0}, 50.0, ChargerClass::kFast, per_station},
      {1, {3.5, 10.0}, 50.0, ChargerClass::kFast, per_station},
      {2, {1.0, 7.0}, 11.0, ChargerClass::kSlow, per_station},
      {3, {2.0, 16.0}, 11.0, ChargerClass::kSlow, per_station},
  };
}

std::vector<Charger> GenerateNetwork(const std::vector<StationSpec>& stations,
                                     double min_charge_minutes, const TimeGrid& grid) {
  std::vector<Charger> out;
  for (const auto& st : stations) {
    if (st.count < 0) throw ConfigError(fmt::format("station {}: negative count", st.station_id));
    for (int k = 0; k < st.count; ++k) {
      out.push_back(MakeCharger(static_cast<int>(out.size()), st.station_id, st.location,
                                st.power_kw, st.charger_class, min_charge_minutes, grid));
    }
  }
  return out;
}

double DemandProfile::Total() const {
  double t = 0.0;
  for (double e : expected) t += e;
  return t;
}

DemandProfile DemandProfile::Default(double total) {
  DemandProfile p;
  double sum = 0.0;
  for (double w : kHourWeights) sum += 6.0 * w;
  for (double w : kHourWeights) {
    for (int k = 0; k < 6; ++k) p.expected.push_back(total * w / sum);
  }
  return p;
}

DemandProfile DemandProfile::Flat(double total, int bins) {
  DemandProfile p;
  p.expected.assign(static_cast<std::size_t>(bins), bins > 0 ? total / bins : 0.0);
  return p;
}

std::vector<Request> GenerateDemand(const DemandProfile& profile, const DemandSpec& spec,
                                    const EconomicParams& econ, std::mt19937_64& rng) {
  const Area& a = spec.area;
  const double buf = spec.destination_buffer;
  const double reach = std::abs(a.width + 2 * buf) + std::abs(a.height + 2 * buf);
  if (spec.min_trip_km >= reach) throw ConfigError("minimum trip longer than the destination box allows");
  std::uniform_real_distribution<double> ox(0.0, a.width);
  std::uniform_real_distribution<double> oy(0.0, a.height);
  std::uniform_real_distribution<double> dx(-buf, a.width + buf);
  std::uniform_real_distribution<double> dy(-buf, a.height + buf);
  std::vector<Request> out;
  for (std::size_t b = 0; b < profile.expected.size(); ++b) {
    const double lam = profile.expected[b];
    if (lam < 0) throw ConfigError(fmt::format("demand bin {} is negative", b));
    if (lam == 0) continue;
    const int n = std::poisson_distribution<int>(lam)(rng);
    const double t0 = profile.start + static_cast<double>(b) * profile.bin_minutes;
    std::uniform_real_distribution<double> ut(t0, t0 + profile.bin_minutes);
    std::vector<Request> bin;
    for (int i = 0; i < n; ++i) {
      Request r;
      r.arrival_time = ut(rng);
      r.origin = {ox(rng), oy(rng)};
      do {
        r.destination = {dx(rng), dy(rng)};
      } while (Distance(r.origin, r.destination, econ) < spec.min_trip_km);
      r.fare = Fare(Distance(r.origin, r.destination, econ), econ);
      bin.push_back(r);
    }
    std::stable_sort(bin.begin(), bin.end(),
                     [](const Request& x, const Request& y) { return x.arrival_time < y.arrival_time; });
    out.insert(out.end(), bin.begin(), bin.end());
  }
  for (std::size_t i = 0; i < out.size(); ++i) out[i].id = static_cast<int>(i);
  return out;
}

std::vector<Vehicle> GenerateFleet(const FleetSpec& spec, const Area& area, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> ux(0.0, area.width);
  std::uniform_real_distribution<double> uy(0.0, area.height);
  std::vector<Vehicle> out;
  for (int i = 0; i < spec.size; ++i) {
    Vehicle v;
    v.id = i;
    v.location = {ux(rng), uy(rng)};
    v.battery_capacity = spec.battery_kwh;
    v.e_min = spec.e_min_fraction * spec.battery_kwh;
    v.e_max = spec.e_max_fraction * spec.battery_kwh;
    v.e_init = spec.e_init_fraction * spec.battery_kwh;
    v.soc = v.e_init;
    out.push_back(v);
  }
  return out;
}

void ScenarioConfig::Set(const std::string& key, const std::string& value) {
  auto num = [&] { return ToDouble(key, value); };
  if (key == "service_start") grid.service_start = num();
  else if (key == "service_end") grid.service_end = num();
  else if (key == "batch_interval") grid.batch_interval = num();
  else if (key == "epoch_interval") grid.epoch_interval = num();
  else if (key == "price_resolution") grid.price_resolution = num();
  else if (key == "base_fare") econ.base_fare = num();
  else if (key == "fare_per_km") econ.fare_per_km = num();
  else if (key == "cost_per_km") econ.cost_per_km = num();
  else if (key == "kwh_per_km") econ.kwh_per_km = num();
  else if (key == "speed_kmh") econ.speed_kmh = num();
  else if (key == "max_customer_wait") econ.max_customer_wait = num();
  else if (key == "low_soc_fraction") econ.low_soc_fraction = num();
  else if (key == "opportunity_cost") econ.opportunity_cost = num();
  else if (key == "access_cost") econ.access_cost = num();
  else if (key == "metric") {
    if (value == "manhattan") econ.metric = DistanceMetric::kManhattan;
    else if (value == "euclidean") econ.metric = DistanceMetric::kEuclidean;
    else throw ConfigError(fmt::format("metric: '{}' is not manhattan or euclidean", value));
  }
  else if (key == "fleet_size") fleet.size = ToInt(key, value);
  else if (key == "battery_kwh") fleet.battery_kwh = num();
  else if (key == "e_min_fraction") fleet.e_min_fraction = num();
  else if (key == "e_max_fraction") fleet.e_max_fraction = num();
  else if (key == "e_init_fraction") fleet.e_init_fraction = num();
  else if (key == "area_width") demand.area.width = num();
  else if (key == "area_height") demand.area.height = num();
  else if (key == "destination_buffer") demand.destination_buffer = num();
  else if (key == "min_trip_km") demand.min_trip_km = num();
  else if (key == "demand_total") demand_total = num();
  else if (key == "min_charge_minutes") min_charge_minutes = num();
  else if (key == "prices") {
    if (value == "tou") price_mode = PriceMode::kTimeOfUse;
    else if (value == "constant") price_mode = PriceMode::kConstant;
    else throw ConfigError(fmt::format("prices: '{}' is not tou or constant", value));
  }
  else if (key == "constant_price") constant_price = num();
  else if (key == "seed") seed = static_cast<std::uint64_t>(ToInt(key, value));
  else if (key == "chargers_per_station") {
    const int n = ToInt(key, value);
    for (auto& s : stations) s.count = n;
  }
  else if (key == "chargers") {
    // total split evenly between fast and slow
    const int n = ToInt(key, value);
    if (n % 2 != 0) throw ConfigError("chargers: total must be even");
    SetChargerCounts(*this, n / 2, n / 2);
  }
  else throw ConfigError(fmt::format("unknown scenario key '{}'", key));
}

void ScenarioConfig::Validate() const {
  grid.Validate();
  econ.Validate();
  if (fleet.size <= 0) throw ConfigError("fleet_size must be positive");
  if (!(fleet.battery_kwh > 0)) throw ConfigError("battery_kwh must be positive");
  if (!(fleet.e_min_fraction >= 0 && fleet.e_min_fraction < fleet.e_max_fraction &&
        fleet.e_max_fraction <= 1.0)) {
    throw ConfigError("need 0 <= e_min_fraction < e_max_fraction <= 1");
  }
  if (!(fleet.e_init_fraction > 0 && fleet.e_init_fraction <= 1.0)) {
    throw ConfigError("e_init_fraction must be in (0, 1]");
  }
  if (!(econ.low_soc_fraction > fleet.e_min_fraction)) {
    throw ConfigError("low_soc_fraction must exceed e_min_fraction");
  }
  if (!(demand.area.width > 0 && demand.area.height > 0)) throw ConfigError("area must be positive");
  if (demand.destination_buffer < 0 || demand.min_trip_km < 0) {
    throw ConfigError("destination_buffer and min_trip_km must be nonnegative");
  }
  if (!(demand_total >= 0)) throw ConfigError("demand_total must be nonnegative");
  if (!(min_charge_minutes > 0)) throw ConfigError("min_charge_minutes must be positive");
  if (!(constant_price > 0)) throw ConfigError("constant_price must be positive");
  int chargers = 0;
  for (const auto& s : stations) {
    if (s.count < 0 || !(s.power_kw > 0)) {
      throw ConfigError(fmt::format("station {}: bad count or power", s.station_id));
    }
    if (!demand.area.Contains(s.location)) {
      throw ConfigError(fmt::format("station {} lies outside the area", s.station_id));
    }
    chargers += s.count;
  }
  if (chargers == 0) throw ConfigError("the network has no chargers");
}

void ScenarioConfig::Write(std::ostream& out) const {
  out << "# evfleet scenario\n";
  auto kv = [&](std::string_view k, auto v) { out << fmt::format("{} = {}\n", k, v); };
  kv("service_start", grid.service_start);
  kv("service_end", grid.service_end);
  kv("batch_interval", grid.batch_interval);
  kv("epoch_interval", grid.epoch_interval);
  kv("price_resolution", grid.price_resolution);
  kv("base_fare", econ.base_fare);
  kv("fare_per_km", econ.fare_per_km);
  kv("cost_per_km", econ.cost_per_km);
  kv("kwh_per_km", econ.kwh_per_km);
  kv("speed_kmh", econ.speed_kmh);
  kv("max_customer_wait", econ.max_customer_wait);
  kv("low_soc_fraction", econ.low_soc_fraction);
  kv("opportunity_cost", econ.opportunity_cost);
  kv("access_cost", econ.access_cost);
  kv("metric", econ.metric == DistanceMetric::kManhattan ? "manhattan" : "euclidean");
  kv("fleet_size", fleet.size);
  kv("battery_kwh", fleet.battery_kwh);
  kv("e_min_fraction", fleet.e_min_fraction);
  kv("e_max_fraction", fleet.e_max_fraction);
  kv("e_init_fraction", fleet.e_init_fraction);
  kv("area_width", demand.area.width);
  kv("area_height", demand.area.height);
  kv("destination_buffer", demand.destination_buffer);
  kv("min_trip_km", demand.min_trip_km);
  kv("demand_total", demand_total);
  kv("min_charge_minutes", min_charge_minutes);
  kv("prices", price_mode == PriceMode::kTimeOfUse ? "tou" : "constant");
  kv("constant_price", constant_price);
  kv("seed", seed);
}

ScenarioConfig ScenarioConfig::Read(std::istream& in) {
  ScenarioConfig cfg;
  std::string line;
  int n = 0;
  while (std::getline(in, line)) {
    ++n;
    const std::string t = Trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) throw ConfigError(fmt::format("line {}: expected key = value", n));
    cfg.Set(Trim(std::string_view(t).substr(0, eq)), Trim(std::string_view(t).substr(eq + 1)));
  }
  return cfg;
}

void SetChargerCounts(ScenarioConfig& cfg, int fast, int slow) {
  for (auto cls : {ChargerClass::kFast, ChargerClass::kSlow}) {
    std::vector<StationSpec*> group;
    for (auto& s : cfg.stations) {
      if (s.charger_class == cls) group.push_back(&s);
    }
    const int total = cls == ChargerClass::kFast ? fast : slow;
    if (total < 0) throw ConfigError("charger counts must be nonnegative");
    if (group.empty()) {
      if (total > 0) throw ConfigError(fmt::format("no {} station to hold chargers", ToString(cls)));
      continue;
    }
    const int k = static_cast<int>(group.size());
    for (int i = 0; i < k; ++i) group[i]->count = total / k + (i < total % k ? 1 : 0);
  }
}

void Scenario::Validate() const {
  config.Validate();
  const auto& g = config.grid;
  if (fleet.empty()) throw ConfigError("scenario has no vehicles");
  for (const auto& v : fleet) v.Validate();
  if (chargers.empty()) throw ConfigError("scenario has no chargers");
  for (const auto& c : chargers) {
    if (!config.demand.area.Contains(c.location)) {
      throw ConfigError(fmt::format("charger {} lies outside the area", c.id));
    }
  }
  double prev = -1e300;
  for (const auto& r : requests) {
    if (r.arrival_time < prev) throw ConfigError(fmt::format("request {} out of time order", r.id));
    prev = r.arrival_time;
    if (r.arrival_time < g.service_start || r.arrival_time >= g.service_end) {
      throw ConfigError(fmt::format("request {} arrives outside service hours", r.id));
    }
    if (!config.demand.area.Contains(r.origin)) {
      throw ConfigError(fmt::format("request {} starts outside the area", r.id));
    }
    if (Distance(r.origin, r.destination, config.econ) < config.demand.min_trip_km - 1e-9) {
      throw ConfigError(fmt::format("request {} is shorter than the minimum trip", r.id));
    }
  }
  if (prices.steps().empty() || prices.start() > g.service_start || prices.end() < g.service_end) {
    throw ConfigError("price schedule does not cover the service hours");
  }
}

Scenario Generate(const ScenarioConfig& cfg) {
  cfg.Validate();
  Scenario s;
  s.config = cfg;
  auto fleet_rng = Stream(cfg.seed, 1);
  auto demand_rng = Stream(cfg.seed, 2);
  s.fleet = GenerateFleet(cfg.fleet, cfg.demand.area, fleet_rng);
  s.chargers = GenerateNetwork(cfg.stations, cfg.min_charge_minutes, cfg.grid);
  DemandProfile profile = DemandProfile::Default(cfg.demand_total);
  profile.start = cfg.grid.service_start;
  profile.bin_minutes = (cfg.grid.service_end - cfg.grid.service_start) /
                        static_cast<double>(profile.expected.size());
  s.requests = GenerateDemand(profile, cfg.demand, cfg.econ, demand_rng);
  s.prices = cfg.price_mode == PriceMode::kTimeOfUse
                 ? PriceSchedule::DefaultTimeOfUse()
                 : PriceSchedule::Constant(cfg.constant_price, cfg.grid.price_resolution);
  s.Validate();
  return s;
}

std::vector<Request> ReadTrips(std::istream& in, const EconomicParams& econ, const DemandSpec& spec) {
  csv::Reader reader(in, {"pickup_minute", "origin_x", "origin_y", "dest_x", "dest_y"});
  std::vector<Request> out;
  std::vector<std::string> f;
  while (reader.Next(f)) {
    const int line = reader.line_number();
    Request r;
    r.id = static_cast<int>(out.size());
    r.arrival_time = csv::ParseDouble(f[0], "pickup_minute", line);
    r.origin = {csv::ParseDouble(f[1], "origin_x", line), csv::ParseDouble(f[2], "origin_y", line)};
    r.destination = {csv::ParseDouble(f[3], "dest_x", line), csv::ParseDouble(f[4], "dest_y", line)};
    if (!out.empty() && r.arrival_time < out.back().arrival_time) {
      throw ConfigError(fmt::format("line {}: pickup_minute goes backwards", line));
    }
    if (!spec.area.Contains(r.origin)) {
      throw ConfigError(fmt::format("line {}: origin outside the {}x{} km area", line,
                                    spec.area.width, spec.area.height));
    }
    const double km = Distance(r.origin, r.destination, econ);
    if (km < spec.min_trip_km - 1e-9) {
      throw ConfigError(fmt::format("line {}: trip of {} km is shorter than the {} km minimum", line,
                                    km, spec.min_trip_km));
    }
    r.fare = Fare(km, econ);
    out.push_back(r);
  }
  return out;
}

std::vector<Request> LoadTrips(const std::filesystem::path& path, const EconomicParams& econ,
                               const DemandSpec& spec) {
  auto in = csv::OpenOrThrow(path);
  return ReadTrips(in, econ, spec);
}

void WriteTrips(std::ostream& out, const std::vector<Request>& requests) {
  out << "pickup_minute,origin_x,origin_y,dest_x,dest_y\n";
  for (const auto& r : requests) {
    out << fmt::format("{},{},{},{},{}\n", r.arrival_time, r.origin.x, r.origin.y, r.destination.x,
                       r.destination.y);
  }
}

std::vector<StationSpec> ReadStations(std::istream& in) {
  csv::Reader reader(in, {"station_id", "x", "y", "power_kw", "class", "count"});
  std::vector<StationSpec> out;
  std::vector<std::string> f;
  while (reader.Next(f)) {
    const int line = reader.line_number();
    StationSpec s;
    s.station_id = csv::ParseInt(f[0], "station_id", line);
    s.location = {csv::ParseDouble(f[1], "x", line), csv::ParseDouble(f[2], "y", line)};
    s.power_kw = csv::ParseDouble(f[3], "power_kw", line);
    try {
      s.charger_class = ParseChargerClass(f[4]);
    } catch (const ConfigError& e) {
      throw ConfigError(fmt::format("line {}: {}", line, e.what()));
    }
    s.count = csv::ParseInt(f[5], "count", line);
    if (!(s.power_kw > 0) || s.count < 0) {
      throw ConfigError(fmt::format("line {}: power must be positive and count nonnegative", line));
    }
    out.push_back(s);
  }
  return out;
}

void WriteStations(std::ostream& out, const std::vector<StationSpec>& stations) {
  out << "station_id,x,y,power_kw,class,count\n";
  for (const auto& s : stations) {
    out << fmt::format("{},{},{},{},{},{}\n", s.station_id, s.location.x, s.location.y, s.power_kw,
                       ToString(s.charger_class), s.count);
  }
}

void SaveBundle(const Scenario& s, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  auto open = [&](const char* name) {
    std::ofstream out(dir / name);
    if (!out) throw ConfigError(fmt::format("cannot write '{}'", (dir / name).string()));
    return out;
  };
  {
    auto out = open("scenario.cfg");
    s.config.Write(out);
  }
  {
    auto out = open("trips.csv");
    WriteTrips(out, s.requests);
  }
  {
    auto out = open("prices.csv");
    s.prices.WriteCsv(out);
  }
  {
    auto out = open("chargers.csv");
    WriteStations(out, s.config.stations);
  }
}

Scenario LoadBundle(const std::filesystem::path& dir) {
  Scenario s;
  {
    auto in = csv::OpenOrThrow(dir / "scenario.cfg");
    s.config = ScenarioConfig::Read(in);
  }
  {
    auto in = csv::OpenOrThrow(dir / "chargers.csv");
    s.config.stations = ReadStations(in);
  }
  s.config.Validate();
  auto fleet_rng = Stream(s.config.seed, 1);
  s.fleet = GenerateFleet(s.config.fleet, s.config.demand.area, fleet_rng);
  s.chargers = GenerateNetwork(s.config.stations, s.config.min_charge_minutes, s.config.grid);
  s.requests = LoadTrips(dir / "trips.csv", s.config.econ, s.config.demand);
  s.prices = PriceSchedule::LoadCsv(dir / "prices.csv");
  s.Validate();
  return s;
}

}  // namespace evfleet::scenario
