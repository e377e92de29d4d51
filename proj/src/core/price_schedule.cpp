#include "evfleet/core/price_schedule.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <ostream>

#include <fmt/format.h>

#include "evfleet/core/csv.hpp"

namespace evfleet {

PriceSchedule::PriceSchedule(double start_minute, double resolution, std::vector<double> prices)
    : start_(start_minute), resolution_(resolution), prices_(std::move(prices)) {
  if (!(resolution_ > 0)) throw ConfigError("price resolution must be positive");
  if (prices_.empty()) throw ConfigError("price schedule is empty");
  for (double p : prices_) {
    if (!(p > 0) || !std::isfinite(p)) throw ConfigError("prices must be positive");
  }
}

PriceSchedule PriceSchedule::Constant(double price, double resolution) {
  const auto steps = static_cast<std::size_t>(std::lround(1440.0 / resolution));
  return PriceSchedule(0.0, resolution, std::vector<double>(steps, price));
}

PriceSchedule PriceSchedule::DefaultTimeOfUse() {
  // Hourly anchors of a summer day-ahead curve: night trough, morning ramp,
  // midday solar dip, evening peak. Linear interpolation to 15-minute steps.
  static constexpr std::array<double, 25> kAnchors = {
      0.30, 0.26, 0.22, 0.18, 0.14, 0.09, 0.20, 0.35, 0.45, 0.42, 0.36, 0.30, 0.25,
      0.20, 0.18, 0.22, 0.30, 0.40, 0.50, 0.58, 0.55, 0.48, 0.40, 0.34, 0.30};
  std::vector<double> steps;
  steps.reserve(96);
  for (int k = 0; k < 96; ++k) {
    const int hour = k / 4;
    const double frac = (k % 4) / 4.0;
    const double v = kAnchors[hour] + frac * (kAnchors[hour + 1] - kAnchors[hour]);
    steps.push_back(std::round(v * 10000.0) / 10000.0);
  }
  return PriceSchedule(0.0, 15.0, std::move(steps));
}

PriceSchedule PriceSchedule::ReadCsv(std::istream& in) {
  csv::Reader reader(in, {"start_minute", "price_usd_per_kwh"});
  std::vector<double> starts;
  std::vector<double> prices;
  std::vector<std::string> f;
  while (reader.Next(f)) {
    const int line = reader.line_number();
    starts.push_back(csv::ParseDouble(f[0], "start_minute", line));
    const double price = csv::ParseDouble(f[1], "price_usd_per_kwh", line);
    if (!(price > 0)) throw ConfigError(fmt::format("line {}: price must be positive", line));
    prices.push_back(price);
    if (starts.size() >= 2 && starts.back() <= starts[starts.size() - 2]) {
      throw ConfigError(fmt::format("line {}: start_minute not increasing", line));
    }
  }
  if (prices.empty()) throw ConfigError("price file has no rows");
  double resolution = 15.0;
  if (starts.size() >= 2) {
    resolution = starts[1] - starts[0];
    for (std::size_t i = 1; i < starts.size(); ++i) {
      if (std::abs(starts[i] - starts[i - 1] - resolution) > 1e-9) {
        throw ConfigError(fmt::format("price row {}: steps are not gap-free", i + 1));
      }
    }
  }
  return PriceSchedule(starts.front(), resolution, std::move(prices));
}

PriceSchedule PriceSchedule::LoadCsv(const std::filesystem::path& path) {
  auto in = csv::OpenOrThrow(path);
  return ReadCsv(in);
}

void PriceSchedule::WriteCsv(std::ostream& out) const {
  out << "start_minute,price_usd_per_kwh\n";
  for (std::size_t k = 0; k < prices_.size(); ++k) {
    out << fmt::format("{},{}\n", start_ + resolution_ * static_cast<double>(k), prices_[k]);
  }
}

double PriceSchedule::PriceAt(double t) const {
  if (t < start_ - 1e-9 || t > end() + 1e-9) {
    throw ConfigError(fmt::format("price query at minute {} outside schedule [{}, {}]", t,
                                  start_, end()));
  }
  auto k = static_cast<std::ptrdiff_t>(std::floor((t - start_) / resolution_ + 1e-12));
  k = std::clamp<std::ptrdiff_t>(k, 0, static_cast<std::ptrdiff_t>(prices_.size()) - 1);
  return prices_[static_cast<std::size_t>(k)];
}

double PriceSchedule::EnergyCost(double t0, double t1, double power_kw) const {
  if (t1 <= t0) return 0.0;
  if (t0 < start_ - 1e-9 || t1 > end() + 1e-9) {
    throw ConfigError(fmt::format("billing window [{}, {}] outside schedule", t0, t1));
  }
  double cost = 0.0;
  double t = t0;
  while (t < t1 - 1e-12) {
    const auto k = std::min<std::size_t>(
        static_cast<std::size_t>(std::floor((t - start_) / resolution_ + 1e-12)),
        prices_.size() - 1);
    const double step_end = start_ + resolution_ * static_cast<double>(k + 1);
    const double seg_end = std::min(t1, k + 1 == prices_.size() ? t1 : step_end);
    cost += power_kw * (seg_end - t) / 60.0 * prices_[k];
    t = seg_end;
  }
  return cost;
}

double PriceSchedule::EpochPrice(int epoch, const TimeGrid& grid) const {
  const double t0 = grid.EpochStart(epoch);
  const double t1 = grid.EpochEnd(epoch);
  // Unit-power cost over the epoch divided by the energy is the time-weighted
  // mean price.
  return EnergyCost(t0, t1, 60.0) / (t1 - t0);
}

std::vector<double> PriceSchedule::EpochPrices(const TimeGrid& grid) const {
  std::vector<double> out(static_cast<std::size_t>(grid.NumEpochs()));
  for (int h = 0; h < grid.NumEpochs(); ++h) out[static_cast<std::size_t>(h)] = EpochPrice(h, grid);
  return out;
}

}  // namespace evfleet
