#pragma once

#include <filesystem>
#include <iosfwd>
#include <vector>

#include "evfleet/core/types.hpp"

namespace evfleet {

// Step function of clock time -> USD/kWh. Step k covers
// [start + k*resolution, start + (k+1)*resolution).
class PriceSchedule {
 public:
  PriceSchedule() = default;
  PriceSchedule(double start_minute, double resolution, std::vector<double> prices);

  static PriceSchedule Constant(double price, double resolution = 15.0);
  // Synthetic day-ahead shaped ToU day, 96 steps, spanning [0.09, 0.58].
  static PriceSchedule DefaultTimeOfUse();

  static PriceSchedule ReadCsv(std::istream& in);
  static PriceSchedule LoadCsv(const std::filesystem::path& path);
  void WriteCsv(std::ostream& out) const;

  double start() const { return start_; }
  double end() const { return start_ + resolution_ * static_cast<double>(prices_.size()); }
  double resolution() const { return resolution_; }
  const std::vector<double>& steps() const { return prices_; }

  // Throws ConfigError outside [start, end]. t == end maps to the last step.
  double PriceAt(double t) const;

  // Mean of the steps overlapping epoch `epoch` of `grid` (time weighted, so
  // it is the arithmetic mean when epochs align with steps).
  double EpochPrice(int epoch, const TimeGrid& grid) const;
  std::vector<double> EpochPrices(const TimeGrid& grid) const;

  // Cost of drawing `power_kw` continuously over [t0, t1].
  double EnergyCost(double t0, double t1, double power_kw) const;

 private:
  double start_ = 0.0;
  double resolution_ = 15.0;
  std::vector<double> prices_;
};

}  // namespace evfleet
