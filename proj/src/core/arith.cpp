#include "evfleet/core/arith.hpp"

#include <cmath>

namespace evfleet {

double Distance(Point a, Point b, DistanceMetric metric) {
  const double dx = std::abs(a.x - b.x);
  const double dy = std::abs(a.y - b.y);
  if (metric == DistanceMetric::kEuclidean) return std::hypot(dx, dy);
  return dx + dy;
}

double TravelTime(double km, const EconomicParams& p) { return km / p.speed_kmh * 60.0; }

double Fare(double km, const EconomicParams& p) { return p.base_fare + p.fare_per_km * km; }

double EnergyFor(double km, const EconomicParams& p) { return p.kwh_per_km * km; }

}  // namespace evfleet
