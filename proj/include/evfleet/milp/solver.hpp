#pragma once

#include <cstdint>
#include <functional>

#include "evfleet/milp/model.hpp"

namespace evfleet::milp {

enum class BranchingRule : std::uint8_t { kMostFractional, kFirstFractional };
enum class NodeSelection : std::uint8_t { kBestBound, kDepthFirst };

struct SolverConfig {
  double integrality_tol = 1e-6;
  double feasibility_tol = 1e-7;
  double relative_gap_tol = 1e-4;
  double time_limit_seconds = 3600.0;
  std::int64_t node_limit = 10'000'000;
  BranchingRule branching = BranchingRule::kMostFractional;
  NodeSelection node_selection = NodeSelection::kBestBound;

  // Throws ModelError on non-positive limits or tolerances.
  void Validate() const;
};

// Reported after each processed node, in the objective sense of the model.
// `incumbent` is NaN while no feasible point is known.
struct NodeReport {
  std::int64_t node = 0;
  double node_bound = 0.0;
  double global_bound = 0.0;
  double incumbent = 0.0;
};

using NodeObserver = std::function<void(const NodeReport&)>;

// LP-based branch and bound. Deterministic for a fixed model and config.
MilpSolution Solve(const MilpModel& model, const SolverConfig& config = {},
                   const NodeObserver& observer = {});

// Solves the LP relaxation (integrality dropped).
MilpSolution SolveRelaxation(const MilpModel& model, const SolverConfig& config = {});

}  // namespace evfleet::milp
