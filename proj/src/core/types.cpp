#include "evfleet/core/types.hpp"

#include <cmath>

#include <fmt/format.h>

namespace evfleet {
namespace {

bool IsMultiple(double value, double unit) {
  const double ratio = value / unit;
  return std::abs(ratio - std::round(ratio)) < 1e-9;
}

}  // namespace

void TimeGrid::Validate() const {
  if (!(batch_interval > 0 && epoch_interval > 0 && price_resolution > 0)) {
    throw ConfigError("time grid intervals must be positive");
  }
  if (!(service_end > service_start)) {
    throw ConfigError("service_end must be after service_start");
  }
  if (!IsMultiple(epoch_interval, batch_interval)) {
    throw ConfigError("epoch_interval must be a multiple of batch_interval");
  }
  if (!IsMultiple(service_end - service_start, epoch_interval)) {
    throw ConfigError("service window must be a multiple of epoch_interval");
  }
}

int TimeGrid::NumEpochs() const {
  return static_cast<int>(std::lround((service_end - service_start) / epoch_interval));
}

int TimeGrid::NumBatches() const {
  return static_cast<int>(std::lround((service_end - service_start) / batch_interval));
}

int TimeGrid::EpochOf(double t) const {
  if (t < service_start) return 0;
  const int h = static_cast<int>(std::floor((t - service_start) / epoch_interval + 1e-9));
  return std::min(h, NumEpochs());
}

bool TimeGrid::IsEpochBoundary(double t) const {
  const double k = (t - service_start) / epoch_interval;
  return std::abs(k - std::round(k)) < 1e-9;
}

void EconomicParams::Validate() const {
  const double values[] = {base_fare, fare_per_km, cost_per_km, kwh_per_km, speed_kmh,
                           max_customer_wait, low_soc_fraction, opportunity_cost,
                           access_cost};
  for (double v : values) {
    if (!(v > 0) || !std::isfinite(v)) {
      throw ConfigError("economic parameters must be finite and strictly positive");
    }
  }
  if (low_soc_fraction >= 1.0) throw ConfigError("low_soc_fraction must be below 1");
}

void Vehicle::Validate() const {
  if (!(battery_capacity > 0)) throw ConfigError(fmt::format("vehicle {}: capacity must be positive", id));
  if (!(e_min < e_max && e_max <= battery_capacity && e_min >= 0)) {
    throw ConfigError(fmt::format("vehicle {}: need 0 <= e_min < e_max <= capacity", id));
  }
  if (soc < 0 || soc > battery_capacity) {
    throw ConfigError(fmt::format("vehicle {}: soc outside [0, capacity]", id));
  }
}

std::string_view ToString(VehicleState s) {
  switch (s) {
    case VehicleState::kIdle: return "Idle";
    case VehicleState::kToPickup: return "ToPickup";
    case VehicleState::kServing: return "Serving";
    case VehicleState::kToCharger: return "ToCharger";
    case VehicleState::kQueuedAtCharger: return "QueuedAtCharger";
    case VehicleState::kCharging: return "Charging";
  }
  return "?";
}

std::string_view ToString(RequestStatus s) {
  switch (s) {
    case RequestStatus::kPending: return "Pending";
    case RequestStatus::kAssigned: return "Assigned";
    case RequestStatus::kServed: return "Served";
    case RequestStatus::kAbandoned: return "Abandoned";
  }
  return "?";
}

std::string_view ToString(ChargerClass c) {
  return c == ChargerClass::kFast ? "fast" : "slow";
}

ChargerClass ParseChargerClass(std::string_view s) {
  if (s == "fast") return ChargerClass::kFast;
  if (s == "slow") return ChargerClass::kSlow;
  throw ConfigError(fmt::format("unknown charger class '{}'", s));
}

Charger MakeCharger(int id, int station_id, Point location, double power_kw,
                    ChargerClass cls, double min_charge_minutes,
                    const TimeGrid& grid) {
  if (!(power_kw > 0)) throw ConfigError("charger power must be positive");
  Charger c;
  c.id = id;
  c.station_id = station_id;
  c.location = location;
  c.power_kw = power_kw;
  c.charger_class = cls;
  c.min_charge_minutes = min_charge_minutes;
  c.per_epoch_energy_cap = power_kw * grid.epoch_interval / 60.0;
  return c;
}

}  // namespace evfleet
