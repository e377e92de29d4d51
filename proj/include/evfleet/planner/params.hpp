#pragma once

#include <filesystem>
#include <iosfwd>
#include <vector>

#include "evfleet/core/day_log.hpp"
#include "evfleet/core/price_schedule.hpp"
#include "evfleet/core/types.hpp"

namespace evfleet::planner {

// Inputs of the day-ahead plan, indexed by 0-based charging epoch.
struct PlanParams {
  std::vector<double> delta;              // kWh per vehicle per epoch
  std::vector<std::vector<double>> wait;  // [epoch][charger] minutes
  double gamma = 0.5;                     // USD per vehicle-minute
  double access_cost = 2.7;               // USD per charging access
  std::vector<double> price;              // USD/kWh per epoch
  std::vector<double> arrivals;           // requests per epoch, descriptive only

  int num_epochs() const { return static_cast<int>(delta.size()); }
  int num_chargers() const { return wait.empty() ? 0 : static_cast<int>(wait.front().size()); }

  // Throws ConfigError on inconsistent sizes or negative values.
  void Validate() const;

  void WriteCsv(std::ostream& out) const;
  static PlanParams ReadCsv(std::istream& in);
  void Save(const std::filesystem::path& path) const;
  static PlanParams Load(const std::filesystem::path& path);
};

// Mean energy drawn per vehicle in each epoch, from runs where vehicles never
// charge. Drive legs are spread uniformly over the time they span.
std::vector<double> EstimateDelta(const std::vector<DayLog>& logs, const TimeGrid& grid,
                                  const EconomicParams& econ);

struct WaitAndGamma {
  std::vector<std::vector<double>> wait;  // [epoch][charger]
  double gamma = 0.0;
};

// Mean queue wait per (epoch of arrival, charger), 0 where nobody arrived,
// and profit per vehicle-minute driven averaged over the runs.
WaitAndGamma EstimateWaitAndGamma(const std::vector<DayLog>& logs, const TimeGrid& grid);

}  // namespace evfleet::planner
