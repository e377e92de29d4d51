#pragma once

#include "evfleet/milp/model.hpp"

namespace evfleet::milp {

inline constexpr int kBruteForceMaxDiscrete = 20;
inline constexpr long long kBruteForceMaxPoints = 1LL << 20;

// Exhaustive reference solver. Every assignment of the discrete variables is
// enumerated; remaining continuous variables are optimised by LP for each
// assignment. Throws ModelError when there are more than 20 discrete
// variables, an unbounded integer range, or more than 2^20 assignments.
MilpSolution BruteForce(const MilpModel& model, double feasibility_tol = 1e-7);

}  // namespace evfleet::milp
