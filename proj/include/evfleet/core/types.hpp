#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace evfleet {

// Units used throughout: km, clock-minutes since midnight, kWh, kW, USD.

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Point {
  double x = 0.0;  // km
  double y = 0.0;  // km

  friend bool operator==(const Point&, const Point&) = default;
};

enum class DistanceMetric { kManhattan, kEuclidean };

// Service day discretization. Epoch indices are 0-based in code: epoch h
// covers [service_start + h*epoch_interval, service_start + (h+1)*epoch_interval).
struct TimeGrid {
  double service_start = 360.0;   // 6:00
  double service_end = 1440.0;    // 24:00
  double batch_interval = 1.0;
  double epoch_interval = 30.0;
  double price_resolution = 15.0;

  void Validate() const;
  int NumEpochs() const;
  int NumBatches() const;
  double EpochStart(int epoch) const { return service_start + epoch * epoch_interval; }
  double EpochEnd(int epoch) const { return EpochStart(epoch + 1); }
  // Epoch containing clock time t; clamps to [0, NumEpochs()] where
  // NumEpochs() means "at or after service end".
  int EpochOf(double t) const;
  bool IsEpochBoundary(double t) const;
};

struct EconomicParams {
  double base_fare = 8.0;          // beta_0, USD
  double fare_per_km = 3.1;        // beta_1, USD/km
  double cost_per_km = 0.53;       // pi, USD/km
  double kwh_per_km = 0.25;        // mu
  double speed_kmh = 30.0;
  double max_customer_wait = 10.0; // minutes
  double low_soc_fraction = 0.20;  // theta, fraction of battery capacity
  double opportunity_cost = 0.5;   // gamma, USD/minute
  double access_cost = 2.7;        // C, USD per charging access
  DistanceMetric metric = DistanceMetric::kManhattan;

  void Validate() const;
};

enum class VehicleState : std::uint8_t {
  kIdle,
  kToPickup,
  kServing,
  kToCharger,
  kQueuedAtCharger,
  kCharging,
};

std::string_view ToString(VehicleState s);

struct Vehicle {
  int id = 0;
  Point location;
  double soc = 0.0;               // kWh
  double battery_capacity = 62.0; // kWh
  double e_min = 6.2;
  double e_max = 49.6;
  double e_init = 62.0;
  VehicleState state = VehicleState::kIdle;
  std::optional<double> target_soc;
  double busy_until = 0.0;

  void Validate() const;
};

enum class RequestStatus : std::uint8_t { kPending, kAssigned, kServed, kAbandoned };

std::string_view ToString(RequestStatus s);

struct Request {
  int id = 0;
  Point origin;
  Point destination;
  double arrival_time = 0.0;  // clock-minutes
  double fare = 0.0;          // USD
  RequestStatus status = RequestStatus::kPending;

  double WaitAt(double now) const { return now - arrival_time; }
};

enum class ChargerClass : std::uint8_t { kFast, kSlow };

std::string_view ToString(ChargerClass c);
ChargerClass ParseChargerClass(std::string_view s);

struct Charger {
  int id = 0;
  int station_id = 0;
  Point location;
  double power_kw = 50.0;
  ChargerClass charger_class = ChargerClass::kFast;
  double min_charge_minutes = 10.0;  // alpha_s
  double per_epoch_energy_cap = 25.0; // Y_s^max = power * epoch_interval / 60
  std::deque<int> queue;             // vehicle ids, FIFO
  double busy_until = 0.0;

  // Energy deliverable during the minimum session length.
  double MinSessionEnergy() const { return power_kw * min_charge_minutes / 60.0; }
};

// Builds a charger whose per-epoch cap is consistent with the time grid.
Charger MakeCharger(int id, int station_id, Point location, double power_kw,
                    ChargerClass cls, double min_charge_minutes,
                    const TimeGrid& grid);

}  // namespace evfleet
