#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <random>
#include <string_view>
#include <vector>

#include "evfleet/core/charger_outlook.hpp"
#include "evfleet/core/types.hpp"

namespace evfleet::policies {

enum class PolicyKind : std::uint8_t {
  kNearest,
  kFastest,
  kMinChgOpT,
  kDynaThreshold,
  kCongestionAware,
};

enum class QueueBehavior : std::uint8_t { kNaive, kChasingA, kChasingB };

// Which clock interval "hour k" of the threshold table covers.
enum class HourMapping : std::uint8_t {
  kClock,         // hour k is [k-1, k) after midnight
  kServiceStart,  // hour k is the k-th hour after service start
};

std::string_view ToString(PolicyKind k);
std::string_view ToString(QueueBehavior b);
std::string_view ToString(HourMapping m);
// Case-insensitive; throws ConfigError listing the accepted names.
PolicyKind ParsePolicy(std::string_view s);
QueueBehavior ParseQueueBehavior(std::string_view s);
HourMapping ParseHourMapping(std::string_view s);

inline constexpr std::array<PolicyKind, 4> kBenchmarks = {
    PolicyKind::kNearest, PolicyKind::kFastest, PolicyKind::kMinChgOpT, PolicyKind::kDynaThreshold};

// Hourly SoC fractions that activate charging, hour 1 first.
inline constexpr std::array<double, 24> kDynaThresholds = {
    0.45, 0.6, 0.65, 0.62, 0.58, 0.55, 0.52, 0.5, 0.4, 0.4, 0.4, 0.4,
    0.38, 0.35, 0.32, 0.25, 0.25, 0.2, 0.2, 0.25, 0.27, 0.35, 0.35, 0.4};

// Table value of hour k in 1..24.
double DynaThreshold(int hour);

// Table value in force at clock time `now`.
double DynaThresholdAt(double now, HourMapping mapping, const TimeGrid& grid);

struct TriggerContext {
  double theta = 0.20;
  HourMapping mapping = HourMapping::kClock;
  TimeGrid grid;
};

bool ShouldTrigger(PolicyKind policy, const Vehicle& v, double now, const TriggerContext& ctx);

// Charger choice of a benchmark. Only chargers reachable without running the
// battery below zero are considered; nullopt when there is none. Nearest
// breaks distance ties by predicted wait. The Fastest and DynaThreshold
// selectors draw from `rng`.
std::optional<int> SelectCharger(PolicyKind policy, const Vehicle& v,
                                 const std::vector<Charger>& chargers,
                                 const std::vector<ChargerOutlook>& outlooks, double now,
                                 const EconomicParams& p, std::mt19937_64& rng);

// Access plus predicted wait plus time to charge to e_max at charger s.
double ChargingOperationMinutes(const Vehicle& v, const Charger& c, const ChargerOutlook& o,
                                double now, const EconomicParams& p);

struct RequeueAction {
  bool move = false;
  int charger = -1;  // index into the charger list when moving
};

// Decision of a vehicle standing at charger `current` facing
// `current_wait` minutes of queue. Chasing vehicles leave when the wait is
// above `max_wait` for the least-wait candidate (fast chargers only for A,
// any charger for B), or the nearest reachable charger when that candidate
// is out of range, and only when the move is quicker than staying.
RequeueAction OnArrivalRequeue(QueueBehavior behavior, const Vehicle& v, int current,
                               double current_wait, const std::vector<Charger>& chargers,
                               const std::vector<ChargerOutlook>& outlooks, double now,
                               double max_wait, const EconomicParams& p);

}  // namespace evfleet::policies
