#pragma once

#include <chrono>
#include <cstdint>
#include <vector>

namespace evfleet::milp {

// min c'x  s.t.  row_lower <= A x <= row_upper,  col_lower <= x <= col_upper.
// A is stored column-wise. Infinite bounds are allowed.
struct LpProblem {
  int num_cols = 0;
  int num_rows = 0;
  std::vector<int> col_start{0};  // size num_cols + 1
  std::vector<int> row_index;
  std::vector<double> value;
  std::vector<double> cost;
  std::vector<double> col_lower, col_upper;
  std::vector<double> row_lower, row_upper;

  // Appends a column; entries are (row, coefficient) pairs.
  int AddColumn(double c, double lower, double upper,
                const std::vector<std::pair<int, double>>& entries);
};

enum class VarStatus : std::uint8_t { kBasic, kAtLower, kAtUpper, kFreeZero };

// Status of every structural column followed by every row logical.
struct LpBasis {
  std::vector<VarStatus> status;
};

enum class LpStatus : std::uint8_t {
  kOptimal,
  kInfeasible,
  kUnbounded,
  kIterationLimit,
  kTimeLimit,
  kNumericalFailure
};

struct LpOptions {
  double feasibility_tol = 1e-7;
  double optimality_tol = 1e-9;
  double pivot_tol = 1e-9;
  std::int64_t max_iterations = 1'000'000;
  int refactor_interval = 100;
  int degenerate_before_bland = 50;
  std::chrono::steady_clock::time_point deadline = std::chrono::steady_clock::time_point::max();
};

struct LpResult {
  LpStatus status = LpStatus::kNumericalFailure;
  std::vector<double> x;  // structural values
  double objective = 0.0;
  LpBasis basis;
  std::int64_t iterations = 0;
};

// Bounded-variable revised primal simplex with a composite phase one, so any
// starting basis (including one from a related problem) is acceptable.
LpResult SolveLp(const LpProblem& lp, const LpOptions& options = {},
                 const LpBasis* warm_start = nullptr);

}  // namespace evfleet::milp
