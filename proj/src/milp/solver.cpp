#include "evfleet/milp/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <memory>
#include <queue>
#include <stdexcept>

#include <fmt/format.h>

#include "evfleet/milp/simplex.hpp"

namespace evfleet::milp {

void SolverConfig::Validate() const {
  if (!(integrality_tol > 0) || !(feasibility_tol > 0) || !(relative_gap_tol >= 0)) {
    throw ModelError("solver tolerances must be positive");
  }
  if (!(time_limit_seconds > 0)) throw ModelError("time limit must be positive");
  if (node_limit <= 0) throw ModelError("node limit must be positive");
}

namespace {

using Clock = std::chrono::steady_clock;

// Fixed columns and rows with at most one free term are folded into bounds
// before the LP sees them. In integral mode integer bounds are rounded.
struct Reduced {
  bool infeasible = false;
  LpProblem lp;
  std::vector<int> col_of_var;
  std::vector<double> fixed_value;
  std::vector<char> col_integer;
  double offset = 0.0;  // internal (minimisation) objective of fixed columns
  double sign = 1.0;

  std::vector<double> Expand(const std::vector<double>& cols) const {
    std::vector<double> x(fixed_value);
    for (std::size_t j = 0; j < col_of_var.size(); ++j) {
      if (col_of_var[j] >= 0) x[j] = cols[static_cast<std::size_t>(col_of_var[j])];
    }
    return x;
  }
};

Reduced Reduce(const MilpModel& model, bool integral, double feas_tol, double int_tol) {
  Reduced out;
  out.sign = model.objective_sense() == ObjectiveSense::kMaximize ? -1.0 : 1.0;
  const int n = model.num_variables();
  std::vector<double> lo(static_cast<std::size_t>(n));
  std::vector<double> hi(static_cast<std::size_t>(n));
  std::vector<char> is_int(static_cast<std::size_t>(n), 0);

  auto round_bounds = [&](int j) {
    if (!is_int[j]) return;
    if (std::isfinite(lo[j])) lo[j] = std::ceil(lo[j] - int_tol);
    if (std::isfinite(hi[j])) hi[j] = std::floor(hi[j] + int_tol);
  };
  for (int j = 0; j < n; ++j) {
    const auto& v = model.variable(j);
    lo[j] = v.lower;
    hi[j] = v.upper;
    is_int[j] = integral && v.is_discrete() ? 1 : 0;
    round_bounds(j);
    if (lo[j] > hi[j] + feas_tol) {
      out.infeasible = true;
      return out;
    }
  }
  auto is_fixed = [&](int j) { return hi[j] - lo[j] <= 1e-12; };

  const int m = model.num_constraints();
  std::vector<char> active(static_cast<std::size_t>(m), 1);
  std::vector<double> rlo(static_cast<std::size_t>(m));
  std::vector<double> rhi(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) {
    const auto& r = model.constraint(i);
    rlo[i] = r.sense == RowSense::kLessEqual ? -kInfinity : r.rhs;
    rhi[i] = r.sense == RowSense::kGreaterEqual ? kInfinity : r.rhs;
  }

  bool changed = true;
  while (changed) {
    changed = false;
    for (int i = 0; i < m; ++i) {
      if (!active[i]) continue;
      double fixed_part = 0.0;
      int free_count = 0;
      Term single;
      for (const Term& t : model.constraint(i).terms) {
        if (is_fixed(t.var)) {
          fixed_part += t.coef * lo[t.var];
        } else {
          ++free_count;
          single = t;
        }
      }
      if (free_count >= 2) continue;
      const double l = rlo[i] - fixed_part;
      const double u = rhi[i] - fixed_part;
      active[i] = 0;
      changed = true;
      if (free_count == 0) {
        if (l > feas_tol || u < -feas_tol) {
          out.infeasible = true;
          return out;
        }
        continue;
      }
      const int j = single.var;
      double nl = l / single.coef;
      double nu = u / single.coef;
      if (single.coef < 0) std::swap(nl, nu);
      lo[j] = std::max(lo[j], nl);
      hi[j] = std::min(hi[j], nu);
      round_bounds(j);
      if (lo[j] > hi[j] + feas_tol) {
        out.infeasible = true;
        return out;
      }
      if (lo[j] > hi[j]) hi[j] = lo[j];
    }
  }

  out.col_of_var.assign(static_cast<std::size_t>(n), -1);
  out.fixed_value.assign(static_cast<std::size_t>(n), 0.0);
  std::vector<std::vector<std::pair<int, double>>> entries(static_cast<std::size_t>(n));
  int rows = 0;
  for (int i = 0; i < m; ++i) {
    if (!active[i]) continue;
    double fixed_part = 0.0;
    for (const Term& t : model.constraint(i).terms) {
      if (is_fixed(t.var)) {
        fixed_part += t.coef * lo[t.var];
      } else {
        entries[t.var].emplace_back(rows, t.coef);
      }
    }
    out.lp.row_lower.push_back(rlo[i] - fixed_part);
    out.lp.row_upper.push_back(rhi[i] - fixed_part);
    ++rows;
  }
  out.lp.num_rows = rows;
  for (int j = 0; j < n; ++j) {
    const double c = out.sign * model.variable(j).objective;
    if (is_fixed(j)) {
      out.fixed_value[j] = lo[j];
      out.offset += c * lo[j];
      continue;
    }
    out.col_of_var[j] = out.lp.AddColumn(c, lo[j], hi[j], entries[j]);
    out.col_integer.push_back(is_int[j]);
  }
  return out;
}

struct Node {
  std::shared_ptr<const Node> parent;
  int col = -1;
  double lo = 0.0;
  double hi = 0.0;
  double bound = 0.0;  // internal, minimisation sense
  std::shared_ptr<const LpBasis> basis;
  std::int64_t id = 0;
};

using NodePtr = std::shared_ptr<const Node>;

struct WorseBound {
  bool operator()(const NodePtr& a, const NodePtr& b) const {
    if (a->bound != b->bound) return a->bound > b->bound;
    return a->id > b->id;
  }
};

class BranchAndBound {
 public:
  BranchAndBound(const MilpModel& model, const SolverConfig& cfg, const NodeObserver& observer)
      : model_(model), cfg_(cfg), observer_(observer) {}

  MilpSolution Run() {
    start_ = Clock::now();
    deadline_ = start_ + std::chrono::duration_cast<Clock::duration>(
                             std::chrono::duration<double>(cfg_.time_limit_seconds));
    MilpSolution sol;
    red_ = Reduce(model_, true, cfg_.feasibility_tol, cfg_.integrality_tol);
    if (red_.infeasible) return Finish(sol, SolveStatus::kInfeasible);
    work_ = red_.lp;
    lp_opt_.feasibility_tol = cfg_.feasibility_tol;
    lp_opt_.deadline = deadline_;

    const LpResult root = SolveLp(work_, lp_opt_);
    ++nodes_;
    switch (root.status) {
      case LpStatus::kInfeasible: return Finish(sol, SolveStatus::kInfeasible);
      case LpStatus::kUnbounded: return Finish(sol, SolveStatus::kUnbounded);
      case LpStatus::kTimeLimit:
      case LpStatus::kIterationLimit: return Finish(sol, SolveStatus::kTimeLimit);
      case LpStatus::kNumericalFailure: throw std::runtime_error("LP solver numerical failure");
      case LpStatus::kOptimal: break;
    }
    auto root_basis = std::make_shared<const LpBasis>(root.basis);
    RoundingHeuristic(root, *root_basis);

    auto root_node = std::make_shared<Node>();
    root_node->bound = root.objective;
    Branch(root_node, root, root_basis);

    SolveStatus status = SolveStatus::kOptimal;
    while (!Empty()) {
      const double global = GlobalBound();
      if (HasIncumbent() &&
          RelativeGap(Reported(incumbent_), Reported(global)) <= cfg_.relative_gap_tol) {
        break;
      }
      if (Clock::now() > deadline_) {
        status = SolveStatus::kTimeLimit;
        break;
      }
      if (nodes_ >= cfg_.node_limit) {
        status = HasIncumbent() ? SolveStatus::kFeasible : SolveStatus::kTimeLimit;
        break;
      }
      NodePtr node = Pop();
      if (node->bound >= incumbent_ - PruneSlack()) {
        pruned_min_ = std::min(pruned_min_, node->bound);
        continue;
      }
      SetBounds(*node);
      const LpResult lp = SolveLp(work_, lp_opt_, node->basis.get());
      ++nodes_;
      if (lp.status == LpStatus::kTimeLimit || lp.status == LpStatus::kIterationLimit) {
        Push(node);
        status = SolveStatus::kTimeLimit;
        break;
      }
      if (lp.status == LpStatus::kNumericalFailure) {
        throw std::runtime_error("LP solver numerical failure");
      }
      if (lp.status == LpStatus::kOptimal) {
        const double bound = std::max(lp.objective, node->bound);
        if (bound >= incumbent_ - PruneSlack()) {
          pruned_min_ = std::min(pruned_min_, bound);
        } else {
          auto basis = std::make_shared<const LpBasis>(lp.basis);
          Branch(node, lp, basis);
        }
      }
      Report(node->bound);
    }

    if (status == SolveStatus::kOptimal && !HasIncumbent()) status = SolveStatus::kInfeasible;
    return Finish(sol, status);
  }

 private:
  bool HasIncumbent() const { return has_incumbent_; }

  double PruneSlack() const {
    if (!HasIncumbent()) return 0.0;
    return std::max(1e-9, cfg_.relative_gap_tol * std::max(std::abs(Reported(incumbent_)), 1e-10));
  }

  double Reported(double internal) const { return red_.sign * (internal + red_.offset); }

  bool Empty() const { return cfg_.node_selection == NodeSelection::kBestBound ? heap_.empty() : stack_.empty(); }

  void Push(NodePtr n) {
    if (cfg_.node_selection == NodeSelection::kBestBound) {
      heap_.push(std::move(n));
    } else {
      stack_.push_back(std::move(n));
    }
  }

  NodePtr Pop() {
    NodePtr n;
    if (cfg_.node_selection == NodeSelection::kBestBound) {
      n = heap_.top();
      heap_.pop();
    } else {
      n = stack_.back();
      stack_.pop_back();
    }
    return n;
  }

  // Lower bound (internal sense) over everything not yet fathomed.
  double GlobalBound() const {
    double b = std::min(incumbent_, pruned_min_);
    if (cfg_.node_selection == NodeSelection::kBestBound) {
      if (!heap_.empty()) b = std::min(b, heap_.top()->bound);
    } else {
      for (const auto& n : stack_) b = std::min(b, n->bound);
    }
    return b;
  }

  void SetBounds(const Node& node) {
    work_.col_lower = red_.lp.col_lower;
    work_.col_upper = red_.lp.col_upper;
    for (const Node* p = &node; p != nullptr; p = p->parent.get()) {
      if (p->col < 0) continue;
      work_.col_lower[p->col] = std::max(work_.col_lower[p->col], p->lo);
      work_.col_upper[p->col] = std::min(work_.col_upper[p->col], p->hi);
    }
  }

  int PickBranchColumn(const std::vector<double>& x) const {
    int best = -1;
    double best_frac = 0.0;
    for (int j = 0; j < work_.num_cols; ++j) {
      if (!red_.col_integer[j]) continue;
      const double f = x[j] - std::floor(x[j]);
      const double dist = std::min(f, 1.0 - f);
      if (dist <= cfg_.integrality_tol) continue;
      if (cfg_.branching == BranchingRule::kFirstFractional) return j;
      if (dist > best_frac) {
        best_frac = dist;
        best = j;
      }
    }
    return best;
  }

  void Branch(const NodePtr& node, const LpResult& lp, const std::shared_ptr<const LpBasis>& basis) {
    const int j = PickBranchColumn(lp.x);
    if (j < 0) {
      Accept(lp.x);
      return;
    }
    const double v = lp.x[j];
    auto down = std::make_shared<Node>();
    down->parent = node;
    down->col = j;
    down->lo = -kInfinity;
    down->hi = std::floor(v);
    down->bound = lp.objective;
    down->basis = basis;
    down->id = next_id_++;
    auto up = std::make_shared<Node>(*down);
    up->lo = std::ceil(v);
    up->hi = kInfinity;
    up->id = next_id_++;
    // Depth-first explores the nearer side first.
    if (v - std::floor(v) >= 0.5) {
      Push(down);
      Push(up);
    } else {
      Push(up);
      Push(down);
    }
  }

  void Accept(std::vector<double> cols) {
    for (int j = 0; j < work_.num_cols; ++j) {
      if (red_.col_integer[j]) cols[j] = std::round(cols[j]);
    }
    double obj = 0.0;
    for (int j = 0; j < work_.num_cols; ++j) obj += work_.cost[j] * cols[j];
    if (obj < incumbent_) {
      incumbent_ = obj;
      incumbent_x_ = std::move(cols);
      has_incumbent_ = true;
    }
  }

  void RoundingHeuristic(const LpResult& root, const LpBasis& basis) {
    work_.col_lower = red_.lp.col_lower;
    work_.col_upper = red_.lp.col_upper;
    bool any = false;
    for (int j = 0; j < work_.num_cols; ++j) {
      if (!red_.col_integer[j]) continue;
      const double r = std::clamp(std::round(root.x[j]), work_.col_lower[j], work_.col_upper[j]);
      work_.col_lower[j] = r;
      work_.col_upper[j] = r;
      any = true;
    }
    if (!any) return;
    const LpResult lp = SolveLp(work_, lp_opt_, &basis);
    if (lp.status == LpStatus::kOptimal) Accept(lp.x);
  }

  void Report(double node_bound) {
    if (!observer_) return;
    NodeReport r;
    r.node = nodes_;
    r.node_bound = Reported(node_bound);
    r.global_bound = Reported(GlobalBound());
    r.incumbent = HasIncumbent() ? Reported(incumbent_) : std::numeric_limits<double>::quiet_NaN();
    observer_(r);
  }

  MilpSolution Finish(MilpSolution& sol, SolveStatus status) {
    sol.status = status;
    sol.node_count = nodes_;
    if (HasIncumbent()) {
      sol.values = red_.Expand(incumbent_x_);
      sol.objective = model_.Objective(sol.values);
      sol.best_bound = Reported(std::min(GlobalBound(), incumbent_));
      sol.relative_gap = RelativeGap(sol.objective, sol.best_bound);
    } else if (status == SolveStatus::kTimeLimit && !Empty()) {
      sol.best_bound = Reported(GlobalBound());
    }
    sol.elapsed_seconds = std::chrono::duration<double>(Clock::now() - start_).count();
    return sol;
  }

  const MilpModel& model_;
  const SolverConfig& cfg_;
  const NodeObserver& observer_;
  Clock::time_point start_;
  Clock::time_point deadline_;
  Reduced red_;
  LpProblem work_;
  LpOptions lp_opt_;

  std::priority_queue<NodePtr, std::vector<NodePtr>, WorseBound> heap_;
  std::vector<NodePtr> stack_;
  bool has_incumbent_ = false;
  std::int64_t next_id_ = 1;
  std::int64_t nodes_ = 0;
  double incumbent_ = kInfinity;
  std::vector<double> incumbent_x_;
  double pruned_min_ = kInfinity;
};

}  // namespace

MilpSolution Solve(const MilpModel& model, const SolverConfig& config, const NodeObserver& observer) {
  config.Validate();
  model.Validate();
  BranchAndBound bb(model, config, observer);
  return bb.Run();
}

MilpSolution SolveRelaxation(const MilpModel& model, const SolverConfig& config) {
  config.Validate();
  model.Validate();
  const auto start = Clock::now();
  MilpSolution sol;
  const Reduced red = Reduce(model, false, config.feasibility_tol, config.integrality_tol);
  auto finish = [&](SolveStatus s) {
    sol.status = s;
    sol.elapsed_seconds = std::chrono::duration<double>(Clock::now() - start).count();
    return sol;
  };
  if (red.infeasible) return finish(SolveStatus::kInfeasible);
  LpOptions opt;
  opt.feasibility_tol = config.feasibility_tol;
  opt.deadline = start + std::chrono::duration_cast<Clock::duration>(
                             std::chrono::duration<double>(config.time_limit_seconds));
  const LpResult lp = SolveLp(red.lp, opt);
  sol.node_count = 1;
  switch (lp.status) {
    case LpStatus::kInfeasible: return finish(SolveStatus::kInfeasible);
    case LpStatus::kUnbounded: return finish(SolveStatus::kUnbounded);
    case LpStatus::kOptimal: break;
    case LpStatus::kNumericalFailure: throw std::runtime_error("LP solver numerical failure");
    default: return finish(SolveStatus::kTimeLimit);
  }
  sol.values = red.Expand(lp.x);
  sol.objective = model.Objective(sol.values);
  sol.best_bound = sol.objective;
  sol.relative_gap = 0.0;
  return finish(SolveStatus::kOptimal);
}

}  // namespace evfleet::milp
