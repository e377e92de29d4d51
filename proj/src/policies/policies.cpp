#include "evfleet/policies/policies.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <string>
#include <utility>

#include <fmt/format.h>

#include "evfleet/core/arith.hpp"

namespace evfleet::policies {

namespace {

std::string Lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

double SocAt(const Vehicle& v, const Charger& c, const EconomicParams& p) {
  return v.soc - EnergyFor(Distance(v.location, c.location, p), p);
}

double Eta(const Vehicle& v, const Charger& c, double now, const EconomicParams& p) {
  return now + TravelTime(Distance(v.location, c.location, p), p);
}

}  // namespace

std::string_view ToString(PolicyKind k) {
  switch (k) {
    case PolicyKind::kNearest: return "Nearest";
    case PolicyKind::kFastest: return "Fastest";
    case PolicyKind::kMinChgOpT: return "MinChgOpT";
    case PolicyKind::kDynaThreshold: return "DynaThreshold";
    case PolicyKind::kCongestionAware: return "CongestionAware";
  }
  return "?";
}

std::string_view ToString(QueueBehavior b) {
  switch (b) {
    case QueueBehavior::kNaive: return "Naive";
    case QueueBehavior::kChasingA: return "ChasingA";
    case QueueBehavior::kChasingB: return "ChasingB";
  }
  return "?";
}

std::string_view ToString(HourMapping m) {
  return m == HourMapping::kClock ? "clock" : "service";
}

PolicyKind ParsePolicy(std::string_view s) {
  const std::string l = Lower(s);
  for (auto k : {PolicyKind::kNearest, PolicyKind::kFastest, PolicyKind::kMinChgOpT,
                 PolicyKind::kDynaThreshold, PolicyKind::kCongestionAware}) {
    if (l == Lower(ToString(k))) return k;
  }
  throw ConfigError(fmt::format(
      "unknown policy '{}' (Nearest, Fastest, MinChgOpT, DynaThreshold, CongestionAware)", s));
}

QueueBehavior ParseQueueBehavior(std::string_view s) {
  const std::string l = Lower(s);
  for (auto b : {QueueBehavior::kNaive, QueueBehavior::kChasingA, QueueBehavior::kChasingB}) {
    if (l == Lower(ToString(b))) return b;
  }
  throw ConfigError(fmt::format("unknown queue behavior '{}' (Naive, ChasingA, ChasingB)", s));
}

HourMapping ParseHourMapping(std::string_view s) {
  const std::string l = Lower(s);
  if (l == "clock") return HourMapping::kClock;
  if (l == "service") return HourMapping::kServiceStart;
  throw ConfigError(fmt::format("unknown hour mapping '{}' (clock, service)", s));
}

double DynaThreshold(int hour) {
  if (hour < 1 || hour > 24) throw ConfigError(fmt::format("hour {} outside 1..24", hour));
  return kDynaThresholds[static_cast<std::size_t>(hour - 1)];
}

double DynaThresholdAt(double now, HourMapping mapping, const TimeGrid& grid) {
  const double origin = mapping == HourMapping::kClock ? 0.0 : grid.service_start;
  const int hour = static_cast<int>(std::floor((now - origin) / 60.0)) + 1;
  return DynaThreshold(std::clamp(hour, 1, 24));
}

bool ShouldTrigger(PolicyKind policy, const Vehicle& v, double now, const TriggerContext& ctx) {
  const double fraction =
      policy == PolicyKind::kDynaThreshold ? DynaThresholdAt(now, ctx.mapping, ctx.grid) : ctx.theta;
  return v.soc < fraction * v.battery_capacity;
}

double ChargingOperationMinutes(const Vehicle& v, const Charger& c, const ChargerOutlook& o,
                                double now, const EconomicParams& p) {
  const double eta = Eta(v, c, now, p);
  const double need = std::max(0.0, v.e_max - SocAt(v, c, p));
  return (eta - now) + o.PredictWait(now, eta) + need * 60.0 / c.power_kw;
}

std::optional<int> SelectCharger(PolicyKind policy, const Vehicle& v,
                                 const std::vector<Charger>& chargers,
                                 const std::vector<ChargerOutlook>& outlooks, double now,
                                 const EconomicParams& p, std::mt19937_64& rng) {
  std::vector<int> reachable;
  for (int s = 0; s < static_cast<int>(chargers.size()); ++s) {
    if (SocAt(v, chargers[s], p) >= 0) reachable.push_back(s);
  }
  if (reachable.empty()) return std::nullopt;

  switch (policy) {
    case PolicyKind::kNearest: {
      // Equally near chargers (one station) go by the shorter predicted wait.
      auto key = [&](int s) {
        const double km = Distance(v.location, chargers[s].location, p);
        return std::pair(km, outlooks[s].PredictWait(now, Eta(v, chargers[s], now, p)));
      };
      return *std::min_element(reachable.begin(), reachable.end(),
                               [&](int a, int b) { return key(a) < key(b); });
    }
    case PolicyKind::kMinChgOpT: {
      return *std::min_element(reachable.begin(), reachable.end(), [&](int a, int b) {
        return ChargingOperationMinutes(v, chargers[a], outlooks[a], now, p) <
               ChargingOperationMinutes(v, chargers[b], outlooks[b], now, p);
      });
    }
    case PolicyKind::kFastest:
    case PolicyKind::kDynaThreshold:
    case PolicyKind::kCongestionAware: {
      double top = 0.0;
      for (int s : reachable) top = std::max(top, chargers[s].power_kw);
      std::vector<int> fastest;
      for (int s : reachable) {
        if (chargers[s].power_kw == top) fastest.push_back(s);
      }
      std::uniform_int_distribution<std::size_t> pick(0, fastest.size() - 1);
      return fastest[pick(rng)];
    }
  }
  return std::nullopt;
}

RequeueAction OnArrivalRequeue(QueueBehavior behavior, const Vehicle& v, int current,
                               double current_wait, const std::vector<Charger>& chargers,
                               const std::vector<ChargerOutlook>& outlooks, double now,
                               double max_wait, const EconomicParams& p) {
  if (behavior == QueueBehavior::kNaive || current_wait <= max_wait) return {};

  auto cost = [&](int s) {
    const double eta = Eta(v, chargers[s], now, p);
    return (eta - now) + outlooks[s].PredictWait(now, eta);
  };
  int target = -1;
  double target_wait = 0.0;
  for (int s = 0; s < static_cast<int>(chargers.size()); ++s) {
    if (s == current) continue;
    if (behavior == QueueBehavior::kChasingA && chargers[s].charger_class != ChargerClass::kFast) {
      continue;
    }
    const double w = outlooks[s].PredictWait(now, Eta(v, chargers[s], now, p));
    if (target < 0 || w < target_wait) {
      target = s;
      target_wait = w;
    }
  }
  if (target >= 0 && SocAt(v, chargers[target], p) < 0) {
    target = -1;
    for (int s = 0; s < static_cast<int>(chargers.size()); ++s) {
      if (s == current || SocAt(v, chargers[s], p) < 0) continue;
      if (target < 0 || Distance(v.location, chargers[s].location, p) <
                            Distance(v.location, chargers[target].location, p)) {
        target = s;
      }
    }
  }
  if (target < 0 || cost(target) >= current_wait) return {};
  return {true, target};
}

}  // namespace evfleet::policies
