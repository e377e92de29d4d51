#pragma once

#include "evfleet/core/types.hpp"

namespace evfleet {

// Shortest-path proxy between two points on the plane.
double Distance(Point a, Point b, DistanceMetric metric = DistanceMetric::kManhattan);

inline double Distance(Point a, Point b, const EconomicParams& p) {
  return Distance(a, b, p.metric);
}

// Minutes needed to drive `km` at constant speed.
double TravelTime(double km, const EconomicParams& p);

// g = beta_0 + beta_1 * d
double Fare(double km, const EconomicParams& p);

// mu * d
double EnergyFor(double km, const EconomicParams& p);

}  // namespace evfleet
