#include "evfleet/milp/brute_force.hpp"

#include <chrono>
#include <cmath>

#include <fmt/format.h>

#include "evfleet/milp/solver.hpp"

namespace evfleet::milp {

MilpSolution BruteForce(const MilpModel& model, double feasibility_tol) {
  model.Validate();
  const auto start = std::chrono::steady_clock::now();
  std::vector<int> discrete;
  std::vector<long long> lo;
  std::vector<long long> count;
  long long points = 1;
  bool has_continuous = false;
  for (int j = 0; j < model.num_variables(); ++j) {
    const auto& v = model.variable(j);
    if (!v.is_discrete()) {
      has_continuous = true;
      continue;
    }
    if (!std::isfinite(v.lower) || !std::isfinite(v.upper)) {
      throw ModelError(fmt::format("brute force needs finite bounds on '{}'", model.VariableName(j)));
    }
    const auto l = static_cast<long long>(std::ceil(v.lower - 1e-9));
    const auto u = static_cast<long long>(std::floor(v.upper + 1e-9));
    discrete.push_back(j);
    lo.push_back(l);
    count.push_back(std::max(0LL, u - l + 1));
    points *= count.back();
    if (points > kBruteForceMaxPoints) throw ModelError("brute force: too many assignments");
  }
  if (static_cast<int>(discrete.size()) > kBruteForceMaxDiscrete) {
    throw ModelError("brute force: more than 20 discrete variables");
  }

  const double sign = model.objective_sense() == ObjectiveSense::kMaximize ? -1.0 : 1.0;
  MilpSolution best;
  best.status = SolveStatus::kInfeasible;
  double best_internal = kInfinity;
  bool unbounded = false;

  MilpModel sub = model;
  std::vector<double> x(static_cast<std::size_t>(model.num_variables()), 0.0);
  for (int j = 0; j < model.num_variables(); ++j) {
    if (!model.variable(j).is_discrete()) {
      x[j] = std::isfinite(model.variable(j).lower) ? model.variable(j).lower : 0.0;
    }
  }
  std::vector<long long> digit(discrete.size(), 0);
  for (long long p = 0; p < points; ++p) {
    long long rem = p;
    for (std::size_t k = 0; k < discrete.size(); ++k) {
      digit[k] = rem % count[k];
      rem /= count[k];
      x[discrete[k]] = static_cast<double>(lo[k] + digit[k]);
    }
    if (has_continuous) {
      for (std::size_t k = 0; k < discrete.size(); ++k) {
        sub.SetBounds(discrete[k], x[discrete[k]], x[discrete[k]]);
      }
      const MilpSolution lp = SolveRelaxation(sub);
      if (lp.status == SolveStatus::kUnbounded) {
        unbounded = true;
        continue;
      }
      if (lp.status != SolveStatus::kOptimal) continue;
      for (int j = 0; j < model.num_variables(); ++j) {
        if (!model.variable(j).is_discrete()) x[j] = lp.values[j];
      }
    } else if (model.MaxViolation(x) > feasibility_tol) {
      continue;
    }
    const double z = sign * model.Objective(x);
    if (z < best_internal - 1e-12) {
      best_internal = z;
      best.values = x;
    }
  }

  if (unbounded) {
    best.status = SolveStatus::kUnbounded;
    best.values.clear();
  } else if (!best.values.empty()) {
    best.status = SolveStatus::kOptimal;
    best.objective = model.Objective(best.values);
    best.best_bound = best.objective;
    best.relative_gap = 0.0;
  }
  best.node_count = points;
  best.elapsed_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return best;
}

}  // namespace evfleet::milp
