#include "evfleet/milp/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Dense>
#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

namespace evfleet::milp {

int LpProblem::AddColumn(double c, double lower, double upper,
                         const std::vector<std::pair<int, double>>& entries) {
  for (const auto& [row, coef] : entries) {
    row_index.push_back(row);
    value.push_back(coef);
  }
  col_start.push_back(static_cast<int>(row_index.size()));
  cost.push_back(c);
  col_lower.push_back(lower);
  col_upper.push_back(upper);
  return num_cols++;
}

namespace {

constexpr int kDenseLimit = 300;
constexpr int kMaxResets = 5;

// Columns are [A | -I] over x = (structurals, row activities), so every basis
// satisfies B x_B = -N x_N and the row bounds live on the logicals.
class Simplex {
 public:
  Simplex(const LpProblem& lp, const LpOptions& opt)
      : lp_(lp), opt_(opt), n_(lp.num_cols), m_(lp.num_rows), total_(n_ + m_) {
    lb_.resize(static_cast<std::size_t>(total_));
    ub_.resize(static_cast<std::size_t>(total_));
    c_.assign(static_cast<std::size_t>(total_), 0.0);
    for (int j = 0; j < n_; ++j) {
      lb_[j] = lp.col_lower[j];
      ub_[j] = lp.col_upper[j];
      c_[j] = lp.cost[j];
    }
    for (int i = 0; i < m_; ++i) {
      lb_[n_ + i] = lp.row_lower[i];
      ub_[n_ + i] = lp.row_upper[i];
    }
  }

  LpResult Run(const LpBasis* warm) {
    LpResult res;
    for (int j = 0; j < total_; ++j) {
      if (lb_[j] > ub_[j] + opt_.feasibility_tol) {
        res.status = LpStatus::kInfeasible;
        return res;
      }
    }
    if (!(warm != nullptr && LoadBasis(*warm) && Refactor())) {
      SlackBasis();
      Refactor();
    }
    ComputeBasics();
    res.status = Iterate(res.iterations);
    res.x.assign(x_.begin(), x_.begin() + n_);
    res.objective = 0.0;
    for (int j = 0; j < n_; ++j) res.objective += c_[j] * x_[j];
    res.basis.status = st_;
    return res;
  }

 private:
  LpStatus Iterate(std::int64_t& iters) {
    Eigen::VectorXd y(m_);
    Eigen::VectorXd alpha(m_);
    int degenerate = 0;
    int resets = 0;
    bool bland = false;
    const double tol = opt_.feasibility_tol;
    while (true) {
      if (iters >= opt_.max_iterations) return LpStatus::kIterationLimit;
      if ((iters & 31) == 0 && std::chrono::steady_clock::now() > opt_.deadline) {
        return LpStatus::kTimeLimit;
      }
      if (static_cast<int>(etas_.size()) >= opt_.refactor_interval) {
        if (!Refresh(resets)) return LpStatus::kNumericalFailure;
      }

      bool phase1 = false;
      for (int k = 0; k < m_; ++k) {
        const int j = head_[k];
        if (x_[j] < lb_[j] - tol) {
          y[k] = -1.0;
          phase1 = true;
        } else if (x_[j] > ub_[j] + tol) {
          y[k] = 1.0;
          phase1 = true;
        } else {
          y[k] = 0.0;
        }
      }
      if (!phase1) {
        for (int k = 0; k < m_; ++k) y[k] = c_[head_[k]];
      }
      Btran(y);

      int q = -1;
      double dq = 0.0;
      double best = 0.0;
      for (int j = 0; j < total_; ++j) {
        const VarStatus s = st_[j];
        if (s == VarStatus::kBasic || lb_[j] == ub_[j]) continue;
        const double d = (phase1 ? 0.0 : c_[j]) - ColumnDot(j, y);
        const bool eligible = (s == VarStatus::kAtLower && d < -opt_.optimality_tol) ||
                              (s == VarStatus::kAtUpper && d > opt_.optimality_tol) ||
                              (s == VarStatus::kFreeZero && std::abs(d) > opt_.optimality_tol);
        if (!eligible) continue;
        if (bland) {
          q = j;
          dq = d;
          break;
        }
        if (std::abs(d) > best) {
          best = std::abs(d);
          q = j;
          dq = d;
        }
      }

      if (q < 0) {
        // Confirm on a fresh factorization before declaring the outcome.
        if (!etas_.empty()) {
          if (!Refresh(resets)) return LpStatus::kNumericalFailure;
          continue;
        }
        return phase1 ? LpStatus::kInfeasible : LpStatus::kOptimal;
      }

      const double dir = dq < 0 ? 1.0 : -1.0;
      alpha.setZero();
      LoadColumn(q, alpha);
      Ftran(alpha);

      double t_max = ub_[q] - lb_[q];  // bound flip of the entering variable
      if (!std::isfinite(t_max)) t_max = std::numeric_limits<double>::infinity();
      int leave = -1;
      double leave_value = 0.0;
      VarStatus leave_status = VarStatus::kAtLower;
      for (int k = 0; k < m_; ++k) {
        const double a = alpha[k];
        if (std::abs(a) < opt_.pivot_tol) continue;
        const double rate = -dir * a;
        const int j = head_[k];
        const double xj = x_[j];
        double t = std::numeric_limits<double>::infinity();
        double bound = 0.0;
        VarStatus bs = VarStatus::kAtLower;
        if (xj < lb_[j] - tol) {
          if (rate > 0) {
            t = (lb_[j] - xj) / rate;
            bound = lb_[j];
          }
        } else if (xj > ub_[j] + tol) {
          if (rate < 0) {
            t = (xj - ub_[j]) / -rate;
            bound = ub_[j];
            bs = VarStatus::kAtUpper;
          }
        } else if (rate < 0) {
          if (std::isfinite(lb_[j])) {
            t = std::max(0.0, (xj - lb_[j]) / -rate);
            bound = lb_[j];
          }
        } else if (std::isfinite(ub_[j])) {
          t = std::max(0.0, (ub_[j] - xj) / rate);
          bound = ub_[j];
          bs = VarStatus::kAtUpper;
        }
        if (!std::isfinite(t)) continue;
        const bool better = t < t_max - 1e-12 ||
                            (leave >= 0 && t <= t_max + 1e-12 && std::abs(a) > std::abs(alpha[leave]));
        if (better) {
          t_max = t;
          leave = k;
          leave_value = bound;
          leave_status = bs;
        }
      }

      if (!std::isfinite(t_max)) {
        if (!phase1) return LpStatus::kUnbounded;
        // A phase-one ray cannot be unbounded; the factors have drifted.
        if (etas_.empty() || !Refresh(resets)) return LpStatus::kNumericalFailure;
        continue;
      }

      ++iters;
      if (t_max > 0) {
        for (int k = 0; k < m_; ++k) x_[head_[k]] -= dir * alpha[k] * t_max;
        x_[q] += dir * t_max;
      }
      if (t_max < 1e-12) {
        if (++degenerate >= opt_.degenerate_before_bland) bland = true;
      } else {
        degenerate = 0;
        bland = false;
      }

      if (leave < 0) {
        st_[q] = dir > 0 ? VarStatus::kAtUpper : VarStatus::kAtLower;
        x_[q] = dir > 0 ? ub_[q] : lb_[q];
        continue;
      }
      const int l = head_[leave];
      x_[l] = leave_value;
      st_[l] = leave_status;
      head_[leave] = q;
      st_[q] = VarStatus::kBasic;
      PushEta(alpha, leave);
    }
  }

  bool Refresh(int& resets) {
    if (!Refactor()) {
      if (++resets > kMaxResets) return false;
      SlackBasis();
      Refactor();
    }
    ComputeBasics();
    return true;
  }

  double ColumnDot(int j, const Eigen::VectorXd& y) const {
    if (j >= n_) return -y[j - n_];
    double s = 0.0;
    for (int p = lp_.col_start[j]; p < lp_.col_start[j + 1]; ++p) s += lp_.value[p] * y[lp_.row_index[p]];
    return s;
  }

  void LoadColumn(int j, Eigen::VectorXd& v) const {
    if (j >= n_) {
      v[j - n_] = -1.0;
      return;
    }
    for (int p = lp_.col_start[j]; p < lp_.col_start[j + 1]; ++p) v[lp_.row_index[p]] += lp_.value[p];
  }

  static double NonbasicValue(VarStatus s, double lb, double ub) {
    switch (s) {
      case VarStatus::kAtLower: return lb;
      case VarStatus::kAtUpper: return ub;
      default: return 0.0;
    }
  }

  VarStatus RestingStatus(int j) const {
    if (std::isfinite(lb_[j])) return VarStatus::kAtLower;
    if (std::isfinite(ub_[j])) return VarStatus::kAtUpper;
    return VarStatus::kFreeZero;
  }

  void SlackBasis() {
    st_.assign(static_cast<std::size_t>(total_), VarStatus::kBasic);
    x_.assign(static_cast<std::size_t>(total_), 0.0);
    head_.resize(static_cast<std::size_t>(m_));
    for (int j = 0; j < n_; ++j) {
      st_[j] = RestingStatus(j);
      x_[j] = NonbasicValue(st_[j], lb_[j], ub_[j]);
    }
    for (int i = 0; i < m_; ++i) head_[i] = n_ + i;
  }

  bool LoadBasis(const LpBasis& b) {
    if (static_cast<int>(b.status.size()) != total_) return false;
    st_ = b.status;
    x_.assign(static_cast<std::size_t>(total_), 0.0);
    head_.clear();
    for (int j = 0; j < total_; ++j) {
      VarStatus& s = st_[j];
      if (s == VarStatus::kBasic) {
        head_.push_back(j);
        continue;
      }
      if ((s == VarStatus::kAtLower && !std::isfinite(lb_[j])) ||
          (s == VarStatus::kAtUpper && !std::isfinite(ub_[j])) ||
          (s == VarStatus::kFreeZero && (std::isfinite(lb_[j]) || std::isfinite(ub_[j])))) {
        s = RestingStatus(j);
      }
      x_[j] = NonbasicValue(s, lb_[j], ub_[j]);
    }
    return static_cast<int>(head_.size()) == m_;
  }

  bool Refactor() {
    etas_.clear();
    if (m_ == 0) return true;
    if (m_ <= kDenseLimit) {
      dense_ = true;
      Eigen::MatrixXd b = Eigen::MatrixXd::Zero(m_, m_);
      for (int k = 0; k < m_; ++k) {
        const int j = head_[k];
        if (j >= n_) {
          b(j - n_, k) = -1.0;
        } else {
          for (int p = lp_.col_start[j]; p < lp_.col_start[j + 1]; ++p) {
            b(lp_.row_index[p], k) += lp_.value[p];
          }
        }
      }
      dense_lu_.compute(b);
      return dense_lu_.rcond() > 1e-11;
    }
    dense_ = false;
    std::vector<Eigen::Triplet<double>> trips;
    for (int k = 0; k < m_; ++k) {
      const int j = head_[k];
      if (j >= n_) {
        trips.emplace_back(j - n_, k, -1.0);
      } else {
        for (int p = lp_.col_start[j]; p < lp_.col_start[j + 1]; ++p) {
          trips.emplace_back(lp_.row_index[p], k, lp_.value[p]);
        }
      }
    }
    Eigen::SparseMatrix<double> b(m_, m_);
    b.setFromTriplets(trips.begin(), trips.end());
    b.makeCompressed();
    sparse_lu_.analyzePattern(b);
    sparse_lu_.factorize(b);
    return sparse_lu_.info() == Eigen::Success;
  }

  void ComputeBasics() {
    if (m_ == 0) return;
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m_);
    for (int j = 0; j < total_; ++j) {
      if (st_[j] == VarStatus::kBasic || x_[j] == 0.0) continue;
      if (j >= n_) {
        rhs[j - n_] += x_[j];
      } else {
        for (int p = lp_.col_start[j]; p < lp_.col_start[j + 1]; ++p) {
          rhs[lp_.row_index[p]] -= lp_.value[p] * x_[j];
        }
      }
    }
    Ftran(rhs);
    for (int k = 0; k < m_; ++k) x_[head_[k]] = rhs[k];
  }

  struct Eta {
    int row = 0;
    double pivot = 1.0;
    std::vector<int> idx;
    std::vector<double> val;
  };

  void PushEta(const Eigen::VectorXd& alpha, int r) {
    Eta e;
    e.row = r;
    e.pivot = alpha[r];
    for (int k = 0; k < m_; ++k) {
      if (k != r && alpha[k] != 0.0) {
        e.idx.push_back(k);
        e.val.push_back(alpha[k]);
      }
    }
    etas_.push_back(std::move(e));
  }

  void Ftran(Eigen::VectorXd& v) const {
    if (m_ == 0) return;
    if (dense_) {
      v = dense_lu_.solve(v);
    } else {
      Eigen::VectorXd w = sparse_lu_.solve(v);
      v = w;
    }
    for (const Eta& e : etas_) {
      const double t = v[e.row] / e.pivot;
      v[e.row] = t;
      if (t == 0.0) continue;
      for (std::size_t p = 0; p < e.idx.size(); ++p) v[e.idx[p]] -= e.val[p] * t;
    }
  }

  void Btran(Eigen::VectorXd& v) const {
    if (m_ == 0) return;
    for (auto it = etas_.rbegin(); it != etas_.rend(); ++it) {
      double s = v[it->row];
      for (std::size_t p = 0; p < it->idx.size(); ++p) s -= it->val[p] * v[it->idx[p]];
      v[it->row] = s / it->pivot;
    }
    if (dense_) {
      v = dense_lu_.transpose().solve(v);
    } else {
      Eigen::VectorXd w = sparse_lu_.transpose().solve(v);
      v = w;
    }
  }

  const LpProblem& lp_;
  LpOptions opt_;
  int n_;
  int m_;
  int total_;
  std::vector<double> lb_, ub_, c_;
  std::vector<VarStatus> st_;
  std::vector<double> x_;
  std::vector<int> head_;

  bool dense_ = true;
  Eigen::PartialPivLU<Eigen::MatrixXd> dense_lu_;
  mutable Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> sparse_lu_;
  std::vector<Eta> etas_;
};

}  // namespace

LpResult SolveLp(const LpProblem& lp, const LpOptions& options, const LpBasis* warm_start) {
  Simplex s(lp, options);
  return s.Run(warm_start);
}

}  // namespace evfleet::milp
