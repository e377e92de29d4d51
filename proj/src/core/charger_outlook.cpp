#include "evfleet/core/charger_outlook.hpp"

#include <algorithm>

namespace evfleet {

double ChargerOutlook::PredictWait(double now, double arrival) const {
  double free_at = std::max(busy_until, now);
  for (double d : queued_durations) free_at += d;

  std::vector<Inbound> ahead;
  for (const auto& in : inbound) {
    if (in.eta < arrival) ahead.push_back(in);
  }
  std::stable_sort(ahead.begin(), ahead.end(),
                   [](const Inbound& a, const Inbound& b) { return a.eta < b.eta; });
  for (const auto& in : ahead) free_at = std::max(free_at, in.eta) + in.duration;

  return std::max(0.0, free_at - arrival);
}

}  // namespace evfleet
