#include "evfleet/planner/params.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>

#include <fmt/format.h>

#include "evfleet/core/csv.hpp"

namespace evfleet::planner {

void PlanParams::Validate() const {
  const auto h = delta.size();
  if (h == 0) throw ConfigError("plan parameters have no epochs");
  if (wait.size() != h || price.size() != h) {
    throw ConfigError("plan parameters: delta, wait and price must cover the same epochs");
  }
  if (!arrivals.empty() && arrivals.size() != h) {
    throw ConfigError("plan parameters: arrivals must cover every epoch");
  }
  for (std::size_t k = 0; k < h; ++k) {
    if (!(delta[k] >= 0)) throw ConfigError(fmt::format("delta[{}] must be nonnegative", k));
    if (!(price[k] > 0)) throw ConfigError(fmt::format("price[{}] must be positive", k));
    if (wait[k].size() != wait.front().size()) throw ConfigError("ragged wait table");
    for (double w : wait[k]) {
      if (!(w >= 0)) throw ConfigError(fmt::format("wait at epoch {} must be nonnegative", k));
    }
  }
  if (!(gamma > 0) || !std::isfinite(gamma)) throw ConfigError("gamma must be positive");
  if (!(access_cost > 0)) throw ConfigError("access cost must be positive");
}

void PlanParams::WriteCsv(std::ostream& out) const {
  out << "key,epoch,charger,value\n";
  out << fmt::format("gamma,-1,-1,{}\n", gamma);
  out << fmt::format("access_cost,-1,-1,{}\n", access_cost);
  for (int h = 0; h < num_epochs(); ++h) {
    out << fmt::format("delta,{},-1,{}\n", h, delta[h]);
    out << fmt::format("price,{},-1,{}\n", h, price[h]);
    if (!arrivals.empty()) out << fmt::format("arrivals,{},-1,{}\n", h, arrivals[h]);
    for (std::size_t s = 0; s < wait[h].size(); ++s) {
      out << fmt::format("wait,{},{},{}\n", h, s, wait[h][s]);
    }
  }
}

PlanParams PlanParams::ReadCsv(std::istream& in) {
  csv::Reader reader(in, {"key", "epoch", "charger", "value"});
  PlanParams p;
  p.gamma = -1.0;
  p.access_cost = -1.0;
  std::vector<std::string> f;
  auto grow = [](auto& v, std::size_t n, auto fill) {
    if (v.size() < n) v.resize(n, fill);
  };
  while (reader.Next(f)) {
    const int line = reader.line_number();
    const int h = csv::ParseInt(f[1], "epoch", line);
    const int s = csv::ParseInt(f[2], "charger", line);
    const double value = csv::ParseDouble(f[3], "value", line);
    const std::string& key = f[0];
    if (key == "gamma") {
      p.gamma = value;
      continue;
    }
    if (key == "access_cost") {
      p.access_cost = value;
      continue;
    }
    if (h < 0) throw ConfigError(fmt::format("line {}: '{}' needs an epoch", line, key));
    const auto n = static_cast<std::size_t>(h) + 1;
    if (key == "delta") {
      grow(p.delta, n, std::nan(""));
      p.delta[h] = value;
    } else if (key == "price") {
      grow(p.price, n, std::nan(""));
      p.price[h] = value;
    } else if (key == "arrivals") {
      grow(p.arrivals, n, 0.0);
      p.arrivals[h] = value;
    } else if (key == "wait") {
      if (s < 0) throw ConfigError(fmt::format("line {}: wait needs a charger", line));
      grow(p.wait, n, std::vector<double>{});
      grow(p.wait[h], static_cast<std::size_t>(s) + 1, std::nan(""));
      p.wait[h][s] = value;
    } else {
      throw ConfigError(fmt::format("line {}: unknown key '{}'", line, key));
    }
  }
  if (p.gamma < 0 || p.access_cost < 0) throw ConfigError("params file lacks gamma or access_cost");
  p.Validate();
  return p;
}

void PlanParams::Save(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw ConfigError(fmt::format("cannot write '{}'", path.string()));
  WriteCsv(out);
}

PlanParams PlanParams::Load(const std::filesystem::path& path) {
  auto in = csv::OpenOrThrow(path);
  return ReadCsv(in);
}

std::vector<double> EstimateDelta(const std::vector<DayLog>& logs, const TimeGrid& grid,
                                  const EconomicParams& econ) {
  if (logs.empty()) throw ConfigError("delta estimation needs at least one run");
  const int n = grid.NumEpochs();
  std::vector<double> total(static_cast<std::size_t>(n), 0.0);
  double vehicle_runs = 0.0;
  for (const DayLog& log : logs) {
    vehicle_runs += log.num_vehicles;
    for (const DriveLeg& leg : log.legs) {
      const double energy = econ.kwh_per_km * leg.km;
      if (energy <= 0) continue;
      const double span = leg.end - leg.start;
      if (span <= 0) {
        const int h = grid.EpochOf(leg.start);
        if (h >= 0 && h < n) total[h] += energy;
        continue;
      }
      for (int h = std::max(0, grid.EpochOf(leg.start)); h < n; ++h) {
        const double lo = std::max(leg.start, grid.EpochStart(h));
        const double hi = std::min(leg.end, grid.EpochEnd(h));
        if (lo >= leg.end) break;
        if (hi > lo) total[h] += energy * (hi - lo) / span;
      }
    }
  }
  if (vehicle_runs <= 0) throw ConfigError("delta estimation needs vehicles");
  for (double& v : total) v /= vehicle_runs;
  return total;
}

WaitAndGamma EstimateWaitAndGamma(const std::vector<DayLog>& logs, const TimeGrid& grid) {
  if (logs.empty()) throw ConfigError("wait estimation needs at least one run");
  const int n = grid.NumEpochs();
  const int chargers = logs.front().num_chargers;
  std::vector<std::vector<double>> sum(n, std::vector<double>(chargers, 0.0));
  std::vector<std::vector<int>> count(n, std::vector<int>(chargers, 0));
  double gamma_sum = 0.0;
  int gamma_runs = 0;
  for (const DayLog& log : logs) {
    if (log.num_chargers != chargers) throw ConfigError("runs disagree on the charger count");
    for (const ChargerArrival& a : log.charger_arrivals) {
      const int h = grid.EpochOf(a.time);
      if (h < 0 || h >= n || a.charger < 0 || a.charger >= chargers) continue;
      sum[h][a.charger] += a.predicted_wait;
      ++count[h][a.charger];
    }
    double minutes = 0.0;
    for (const DriveLeg& leg : log.legs) minutes += leg.end - leg.start;
    if (minutes > 0) {
      gamma_sum += log.profit / minutes;
      ++gamma_runs;
    }
  }
  if (gamma_runs == 0) {
    throw ConfigError("opportunity cost is undefined without demand; estimation needs served trips");
  }
  WaitAndGamma out;
  out.wait.assign(n, std::vector<double>(chargers, 0.0));
  for (int h = 0; h < n; ++h) {
    for (int s = 0; s < chargers; ++s) {
      if (count[h][s] > 0) out.wait[h][s] = sum[h][s] / count[h][s];
    }
  }
  out.gamma = gamma_sum / gamma_runs;
  return out;
}

}  // namespace evfleet::planner
