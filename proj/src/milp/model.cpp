#include "evfleet/milp/model.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

namespace evfleet::milp {

int MilpModel::AddVariable(double lower, double upper, double objective, VarType type,
                           std::string name) {
  if (std::isnan(lower) || std::isnan(upper) || !std::isfinite(objective)) {
    throw ModelError(fmt::format("variable '{}': NaN or infinite data", name));
  }
  if (lower > upper) {
    throw ModelError(fmt::format("variable '{}': lower bound {} above upper bound {}", name,
                                 lower, upper));
  }
  if (type == VarType::kBinary && (lower < 0.0 || upper > 1.0)) {
    throw ModelError(fmt::format("binary variable '{}' with bounds outside [0, 1]", name));
  }
  vars_.push_back(Variable{lower, upper, objective, type, std::move(name)});
  return static_cast<int>(vars_.size()) - 1;
}

int MilpModel::AddContinuous(double lower, double upper, double objective, std::string name) {
  return AddVariable(lower, upper, objective, VarType::kContinuous, std::move(name));
}

int MilpModel::AddBinary(double objective, std::string name) {
  return AddVariable(0.0, 1.0, objective, VarType::kBinary, std::move(name));
}

int MilpModel::AddInteger(double lower, double upper, double objective, std::string name) {
  return AddVariable(lower, upper, objective, VarType::kInteger, std::move(name));
}

int MilpModel::AddConstraint(std::vector<Term> terms, RowSense sense, double rhs,
                             std::string name) {
  if (!std::isfinite(rhs)) throw ModelError(fmt::format("row '{}': non-finite rhs", name));
  for (const Term& t : terms) {
    CheckVar(t.var);
    if (!std::isfinite(t.coef)) {
      throw ModelError(fmt::format("row '{}': non-finite coefficient", name));
    }
  }
  std::sort(terms.begin(), terms.end(), [](const Term& a, const Term& b) { return a.var < b.var; });
  Constraint row;
  row.sense = sense;
  row.rhs = rhs;
  row.name = std::move(name);
  for (const Term& t : terms) {
    if (!row.terms.empty() && row.terms.back().var == t.var) {
      row.terms.back().coef += t.coef;
    } else {
      row.terms.push_back(t);
    }
  }
  std::erase_if(row.terms, [](const Term& t) { return t.coef == 0.0; });
  rows_.push_back(std::move(row));
  return static_cast<int>(rows_.size()) - 1;
}

void MilpModel::SetObjective(int var, double coef) {
  CheckVar(var);
  if (!std::isfinite(coef)) throw ModelError("non-finite objective coefficient");
  vars_[static_cast<std::size_t>(var)].objective = coef;
}

void MilpModel::SetBounds(int var, double lower, double upper) {
  CheckVar(var);
  if (std::isnan(lower) || std::isnan(upper) || lower > upper) {
    throw ModelError(fmt::format("variable {}: invalid bounds [{}, {}]", var, lower, upper));
  }
  auto& v = vars_[static_cast<std::size_t>(var)];
  v.lower = lower;
  v.upper = upper;
}

bool MilpModel::HasDiscrete() const {
  return std::any_of(vars_.begin(), vars_.end(), [](const Variable& v) { return v.is_discrete(); });
}

std::string MilpModel::VariableName(int j) const {
  const auto& n = variable(j).name;
  return n.empty() ? fmt::format("x{}", j) : n;
}

std::string MilpModel::ConstraintName(int i) const {
  const auto& n = constraint(i).name;
  return n.empty() ? fmt::format("c{}", i) : n;
}

void MilpModel::Validate() const {
  for (int j = 0; j < num_variables(); ++j) {
    const auto& v = vars_[static_cast<std::size_t>(j)];
    if (std::isnan(v.lower) || std::isnan(v.upper) || v.lower > v.upper ||
        !std::isfinite(v.objective)) {
      throw ModelError(fmt::format("variable '{}' has invalid data", VariableName(j)));
    }
    if (v.type == VarType::kBinary && (v.lower < 0.0 || v.upper > 1.0)) {
      throw ModelError(fmt::format("binary '{}' outside [0, 1]", VariableName(j)));
    }
  }
  for (int i = 0; i < num_constraints(); ++i) {
    const auto& r = rows_[static_cast<std::size_t>(i)];
    if (!std::isfinite(r.rhs)) throw ModelError(fmt::format("row '{}' rhs", ConstraintName(i)));
    for (const auto& t : r.terms) {
      if (t.var < 0 || t.var >= num_variables() || !std::isfinite(t.coef)) {
        throw ModelError(fmt::format("row '{}' has an invalid term", ConstraintName(i)));
      }
    }
  }
}

double MilpModel::Objective(std::span<const double> x) const {
  double z = 0.0;
  for (std::size_t j = 0; j < vars_.size(); ++j) z += vars_[j].objective * x[j];
  return z;
}

double MilpModel::MaxViolation(std::span<const double> x) const {
  double worst = 0.0;
  for (std::size_t j = 0; j < vars_.size(); ++j) {
    worst = std::max({worst, vars_[j].lower - x[j], x[j] - vars_[j].upper});
  }
  for (const auto& r : rows_) {
    double act = 0.0;
    for (const auto& t : r.terms) act += t.coef * x[static_cast<std::size_t>(t.var)];
    switch (r.sense) {
      case RowSense::kLessEqual: worst = std::max(worst, act - r.rhs); break;
      case RowSense::kGreaterEqual: worst = std::max(worst, r.rhs - act); break;
      case RowSense::kEqual: worst = std::max(worst, std::abs(act - r.rhs)); break;
    }
  }
  return worst;
}

double MilpModel::MaxIntegralityViolation(std::span<const double> x) const {
  double worst = 0.0;
  for (std::size_t j = 0; j < vars_.size(); ++j) {
    if (vars_[j].is_discrete()) worst = std::max(worst, std::abs(x[j] - std::round(x[j])));
  }
  return worst;
}

void MilpModel::CheckVar(int j) const {
  if (j < 0 || j >= num_variables()) throw ModelError(fmt::format("unknown variable {}", j));
}

std::string ToString(SolveStatus s) {
  switch (s) {
    case SolveStatus::kOptimal: return "Optimal";
    case SolveStatus::kFeasible: return "Feasible";
    case SolveStatus::kInfeasible: return "Infeasible";
    case SolveStatus::kUnbounded: return "Unbounded";
    case SolveStatus::kTimeLimit: return "TimeLimit";
  }
  return "?";
}

double RelativeGap(double objective, double bound) {
  return std::abs(objective - bound) / std::max(std::abs(objective), 1e-10);
}

}  // namespace evfleet::milp
