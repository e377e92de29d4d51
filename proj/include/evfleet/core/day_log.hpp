#pragma once

#include <cstdint>
#include <vector>

namespace evfleet {

enum class LegKind : std::uint8_t { kToPickup, kWithCustomer, kToCharger, kReturn };

struct DriveLeg {
  int vehicle = 0;
  double start = 0.0;
  double end = 0.0;
  double km = 0.0;
  LegKind kind = LegKind::kToPickup;
};

struct ChargerArrival {
  int vehicle = 0;
  int charger = 0;
  double time = 0.0;
  double predicted_wait = 0.0;  // lookahead value at the moment of arrival
};

struct SessionRecord {
  int vehicle = 0;
  int charger = 0;
  double arrival = 0.0;     // at the charger where the session happened
  double start = 0.0;
  double end = 0.0;
  double energy = 0.0;      // kWh delivered
  double cost = 0.0;        // USD
  double queue_wait = 0.0;  // minutes, summed over all queues joined on this charging trip
};

// Structured by-product of one simulated day. Estimation of planning
// parameters consumes these records.
struct DayLog {
  int num_vehicles = 0;
  int num_chargers = 0;
  std::vector<DriveLeg> legs;
  std::vector<ChargerArrival> charger_arrivals;
  std::vector<SessionRecord> sessions;
  double profit = 0.0;  // USD, revenue minus travel and charging costs
};

}  // namespace evfleet
