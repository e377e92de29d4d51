#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace evfleet::milp {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

enum class VarType : std::uint8_t { kContinuous, kBinary, kInteger };
enum class ObjectiveSense : std::uint8_t { kMinimize, kMaximize };
enum class RowSense : std::uint8_t { kLessEqual, kEqual, kGreaterEqual };

class ModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Term {
  int var = 0;
  double coef = 0.0;
};

struct Variable {
  double lower = 0.0;
  double upper = kInfinity;
  double objective = 0.0;
  VarType type = VarType::kContinuous;
  std::string name;

  bool is_discrete() const { return type != VarType::kContinuous; }
};

struct Constraint {
  std::vector<Term> terms;
  RowSense sense = RowSense::kLessEqual;
  double rhs = 0.0;
  std::string name;
};

// A mixed-integer linear program
//   min/max  c'x   s.t.  a_i'x (<=|=|>=) b_i,  l <= x <= u,  x_j integer for j in I.
class MilpModel {
 public:
  int AddVariable(double lower, double upper, double objective, VarType type,
                  std::string name = {});
  int AddContinuous(double lower, double upper, double objective, std::string name = {});
  int AddBinary(double objective, std::string name = {});
  int AddInteger(double lower, double upper, double objective, std::string name = {});

  // Terms on the same variable are merged; zero coefficients are dropped.
  int AddConstraint(std::vector<Term> terms, RowSense sense, double rhs, std::string name = {});

  void SetObjectiveSense(ObjectiveSense sense) { sense_ = sense; }
  void SetObjective(int var, double coef);
  void SetBounds(int var, double lower, double upper);

  ObjectiveSense objective_sense() const { return sense_; }
  int num_variables() const { return static_cast<int>(vars_.size()); }
  int num_constraints() const { return static_cast<int>(rows_.size()); }
  const Variable& variable(int j) const { return vars_.at(static_cast<std::size_t>(j)); }
  const Constraint& constraint(int i) const { return rows_.at(static_cast<std::size_t>(i)); }
  const std::vector<Variable>& variables() const { return vars_; }
  const std::vector<Constraint>& constraints() const { return rows_; }

  bool HasDiscrete() const;
  std::string VariableName(int j) const;
  std::string ConstraintName(int i) const;

  // Throws ModelError on NaN data, inverted bounds, or binaries outside [0, 1].
  void Validate() const;

  double Objective(std::span<const double> x) const;
  // Largest violation of any row or bound.
  double MaxViolation(std::span<const double> x) const;
  // Largest distance of a discrete variable from the nearest integer.
  double MaxIntegralityViolation(std::span<const double> x) const;

 private:
  void CheckVar(int j) const;

  ObjectiveSense sense_ = ObjectiveSense::kMinimize;
  std::vector<Variable> vars_;
  std::vector<Constraint> rows_;
};

enum class SolveStatus : std::uint8_t { kOptimal, kFeasible, kInfeasible, kUnbounded, kTimeLimit };

std::string ToString(SolveStatus s);

struct MilpSolution {
  SolveStatus status = SolveStatus::kInfeasible;
  std::vector<double> values;  // empty when no feasible point is known
  double objective = std::numeric_limits<double>::quiet_NaN();
  double best_bound = std::numeric_limits<double>::quiet_NaN();
  double relative_gap = std::numeric_limits<double>::quiet_NaN();
  std::int64_t node_count = 0;
  double elapsed_seconds = 0.0;

  bool has_solution() const { return !values.empty(); }
};

double RelativeGap(double objective, double bound);

}  // namespace evfleet::milp
