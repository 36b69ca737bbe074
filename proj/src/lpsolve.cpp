#include "sparselds/lpsolve.hpp"

#include <Eigen/LU>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "sparselds/errors.hpp"

namespace sparselds {

LinearProgram LinearProgram::nonnegative(Eigen::Index n) {
  LinearProgram lp;
  lp.c = Vector::Zero(n);
  lp.A_eq = Matrix(0, n);
  lp.b_eq = Vector(0);
  lp.A_ub = Matrix(0, n);
  lp.b_ub = Vector(0);
  lp.lower = Vector::Zero(n);
  lp.upper = Vector::Constant(n, kInf);
  return lp;
}

void LinearProgram::validate() const {
  const Eigen::Index n = c.size();
  if (A_eq.cols() != n || A_ub.cols() != n) throw DimensionError("LP: constraint column count != number of variables");
  if (A_eq.rows() != b_eq.size() || A_ub.rows() != b_ub.size()) throw DimensionError("LP: rhs length mismatch");
  if (lower.size() != n || upper.size() != n) throw DimensionError("LP: bound length mismatch");
  if (!c.allFinite() || !A_eq.allFinite() || !A_ub.allFinite() || !b_eq.allFinite() || !b_ub.allFinite()) {
    throw DimensionError("LP: non-finite coefficient");
  }
  for (Eigen::Index j = 0; j < n; ++j) {
    if (std::isnan(lower(j)) || std::isnan(upper(j)) || lower(j) > upper(j) || lower(j) == kInf || upper(j) == -kInf) {
      throw DimensionError("LP: invalid bounds on variable " + std::to_string(j));
    }
  }
}

double LinearProgram::max_violation(const Vector& x) const {
  double v = 0.0;
  if (A_eq.rows() > 0) v = std::max(v, (A_eq * x - b_eq).cwiseAbs().maxCoeff());
  if (A_ub.rows() > 0) v = std::max(v, (A_ub * x - b_ub).maxCoeff());
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    v = std::max({v, lower(j) - x(j), x(j) - upper(j)});
  }
  return v;
}

const char* to_string(LpStatus s) {
  switch (s) {
    case LpStatus::Optimal: return "Optimal";
    case LpStatus::Infeasible: return "Infeasible";
    case LpStatus::Unbounded: return "Unbounded";
  }
  return "?";
}

namespace {

enum class VarState : std::uint8_t { Basic, AtLower, AtUpper, FreeZero };

enum class PhaseStatus { Optimal, Unbounded };

// Works on  A x = b,  lo <= x <= hi  with an explicit basis inverse.
class RevisedSimplex {
 public:
  RevisedSimplex(Matrix a, Vector b, Vector lo, Vector hi, const LpOptions& opts)
      : a_(std::move(a)), b_(std::move(b)), lo_(std::move(lo)), hi_(std::move(hi)), opts_(opts) {
    rows_ = a_.rows();
    cols_ = a_.cols();
    max_iter_ = opts_.max_iterations > 0 ? opts_.max_iterations : static_cast<int>(50 * (rows_ + cols_) + 10000);
  }

  // The last `rows_` columns must be artificials (signed unit columns).
  void init_with_artificials(Eigen::Index first_artificial) {
    x_ = Vector::Zero(cols_);
    state_.assign(cols_, VarState::AtLower);
    for (Eigen::Index j = 0; j < first_artificial; ++j) {
      if (std::isfinite(lo_(j))) {
        x_(j) = lo_(j);
        state_[j] = VarState::AtLower;
      } else if (std::isfinite(hi_(j))) {
        x_(j) = hi_(j);
        state_[j] = VarState::AtUpper;
      } else {
        x_(j) = 0.0;
        state_[j] = VarState::FreeZero;
      }
    }
    const Vector resid = b_ - a_.leftCols(first_artificial) * x_.head(first_artificial);
    basis_.resize(rows_);
    for (Eigen::Index i = 0; i < rows_; ++i) {
      const Eigen::Index j = first_artificial + i;
      const double sign = resid(i) >= 0.0 ? 1.0 : -1.0;
      a_.col(j).setZero();
      a_(i, j) = sign;
      x_(j) = std::abs(resid(i));
      state_[j] = VarState::Basic;
      basis_[i] = j;
    }
    refactor();
  }

  PhaseStatus run(const Vector& cost, double stop_below = -kInf) {
    cost_ = cost;
    int degenerate_run = 0;
    bool bland = false;
    bool may_perturb = true;
    for (;;) {
      if (iterations_ >= max_iter_) throw SolverError("simplex iteration cap reached");
      if (since_refactor_ >= opts_.refactor_interval) refactor();

      bool done = cost_.dot(x_) <= stop_below;
      Eigen::Index q = -1;
      Vector d;
      if (!done) {
        d = cost_ - a_.transpose() * duals();
        q = choose_entering(d, bland);
        // Confirm against a fresh factorization before declaring optimality.
        if (q < 0 && since_refactor_ != 0) {
          refactor();
          continue;
        }
        done = q < 0;
      }
      if (done) {
        if (!perturbed_) return PhaseStatus::Optimal;
        restore_bounds();
        dual_cleanup();
        may_perturb = false;
        bland = false;
        degenerate_run = 0;
        continue;
      }

      const double dir = d(q) < 0.0 ? 1.0 : -1.0;
      const Vector alpha = binv_ * a_.col(q);

      double theta = 0.0;
      const Eigen::Index leave = bland ? ratio_test_bland(alpha, dir, q, theta) : ratio_test_harris(alpha, dir, q, theta);
      if (leave == kUnbounded) {
        if (perturbed_) restore_bounds();
        return PhaseStatus::Unbounded;
      }

      ++iterations_;
      if (theta <= 1e-12) {
        if (++degenerate_run >= opts_.degenerate_switch) {
          if (may_perturb && !perturbed_) {
            perturb_bounds();
            degenerate_run = 0;
          } else {
            bland = true;
          }
        }
      } else {
        degenerate_run = 0;
        bland = false;
      }

      x_(q) += dir * theta;
      for (Eigen::Index i = 0; i < rows_; ++i) x_(basis_[i]) -= dir * theta * alpha(i);

      if (leave == kBoundFlip) {
        state_[q] = dir > 0.0 ? VarState::AtUpper : VarState::AtLower;
        x_(q) = dir > 0.0 ? hi_(q) : lo_(q);
        continue;
      }
      const Eigen::Index out = basis_[leave];
      if (dir * alpha(leave) > 0.0) {
        state_[out] = VarState::AtLower;
        x_(out) = lo_(out);
      } else {
        state_[out] = VarState::AtUpper;
        x_(out) = hi_(out);
      }
      basis_[leave] = q;
      state_[q] = VarState::Basic;
      pivot(alpha, leave);
      if (!x_.allFinite()) throw SolverError("simplex iterate became non-finite");
    }
  }

  void set_upper(Eigen::Index j, double v) { hi_(j) = v; }

  // Row multipliers for the current basis and cost.
  Vector duals() const { return binv_.transpose() * basic_costs(); }

  double dual_infeasibility() const {
    const Vector d = cost_ - a_.transpose() * duals();
    double worst = 0.0;
    for (Eigen::Index j = 0; j < cols_; ++j) {
      switch (state_[j]) {
        case VarState::Basic: break;
        case VarState::AtLower: if (lo_(j) < hi_(j)) worst = std::max(worst, -d(j)); break;
        case VarState::AtUpper: if (lo_(j) < hi_(j)) worst = std::max(worst, d(j)); break;
        case VarState::FreeZero: worst = std::max(worst, std::abs(d(j))); break;
      }
    }
    return worst;
  }

  void refactor() {
    Matrix basis_cols(rows_, rows_);
    for (Eigen::Index i = 0; i < rows_; ++i) basis_cols.col(i) = a_.col(basis_[i]);
    binv_ = basis_cols.partialPivLu().inverse();
    if (!binv_.allFinite()) throw SolverError("simplex basis became singular");
    Vector rhs = b_;
    for (Eigen::Index j = 0; j < cols_; ++j) {
      if (state_[j] != VarState::Basic && x_(j) != 0.0) rhs -= a_.col(j) * x_(j);
    }
    const Vector xb = binv_ * rhs;
    for (Eigen::Index i = 0; i < rows_; ++i) x_(basis_[i]) = xb(i);
    since_refactor_ = 0;
  }

  const Vector& x() const { return x_; }
  int iterations() const { return iterations_; }

 private:
  static constexpr Eigen::Index kUnbounded = -1;
  static constexpr Eigen::Index kBoundFlip = -2;
  static constexpr double kPerturbation = 1e-7;

  // Widens the finite bounds of basic variables by small distinct amounts so
  // that degenerate basic variables get room to move.
  void perturb_bounds() {
    saved_lo_ = lo_;
    saved_hi_ = hi_;
    std::uint64_t state = 0x9e3779b97f4a7c15ULL;
    auto next_unit = [&state] {
      std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
      z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
      z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
      return static_cast<double>((z ^ (z >> 31)) >> 11) * 0x1.0p-53;
    };
    for (Eigen::Index i = 0; i < rows_; ++i) {
      const Eigen::Index j = basis_[i];
      if (std::isfinite(lo_(j))) lo_(j) -= kPerturbation * (1.0 + std::abs(lo_(j))) * (1.0 + next_unit());
      if (std::isfinite(hi_(j))) hi_(j) += kPerturbation * (1.0 + std::abs(hi_(j))) * (1.0 + next_unit());
    }
    perturbed_ = true;
  }

  void restore_bounds() {
    lo_ = saved_lo_;
    hi_ = saved_hi_;
    for (Eigen::Index j = 0; j < cols_; ++j) {
      if (state_[j] == VarState::AtLower) x_(j) = lo_(j);
      if (state_[j] == VarState::AtUpper) x_(j) = hi_(j);
    }
    perturbed_ = false;
    refactor();
  }

  // Dual simplex passes that drive basic variables back inside their bounds
  // while keeping reduced costs as close to optimal as the ratio test allows.
  void dual_cleanup() {
    for (;;) {
      if (iterations_ >= max_iter_) throw SolverError("simplex iteration cap reached");
      if (since_refactor_ >= opts_.refactor_interval) refactor();
      Eigen::Index r = -1;
      double worst = opts_.feasibility_tol;
      for (Eigen::Index i = 0; i < rows_; ++i) {
        const Eigen::Index j = basis_[i];
        const double v = std::max(lo_(j) - x_(j), x_(j) - hi_(j));
        if (v > worst) {
          worst = v;
          r = i;
        }
      }
      if (r < 0) return;

      const Eigen::Index out = basis_[r];
      const bool below = x_(out) < lo_(out);
      const double target = below ? lo_(out) : hi_(out);
      const Eigen::RowVectorXd row = binv_.row(r) * a_;
      const Vector d = cost_ - a_.transpose() * duals();
      // x_B(r) changes by -row(j) * dx_j and must move toward target.
      const double need = below ? 1.0 : -1.0;
      const double floor = opts_.pivot_tol * std::max(1.0, row.size() ? row.cwiseAbs().maxCoeff() : 0.0);
      Eigen::Index q = -1;
      double best = kInf, best_pivot = 0.0;
      for (Eigen::Index j = 0; j < cols_; ++j) {
        if (state_[j] == VarState::Basic || lo_(j) == hi_(j)) continue;
        const double a = row(j);
        if (std::abs(a) <= floor) continue;
        const double step = -need * a > 0.0 ? 1.0 : -1.0;
        if (state_[j] == VarState::AtLower && step < 0.0) continue;
        if (state_[j] == VarState::AtUpper && step > 0.0) continue;
        const double cost = state_[j] == VarState::FreeZero ? std::abs(d(j)) : std::max(0.0, step * d(j));
        const double ratio = cost / std::abs(a);
        if (ratio < best - 1e-12 || (ratio <= best + 1e-12 && std::abs(a) > best_pivot)) {
          best = std::min(best, ratio);
          best_pivot = std::abs(a);
          q = j;
        }
      }
      if (q < 0) throw SolverError("dual cleanup found no entering variable");

      const Vector alpha = binv_ * a_.col(q);
      const double t = (x_(out) - target) / alpha(r);
      x_(q) += t;
      for (Eigen::Index i = 0; i < rows_; ++i) x_(basis_[i]) -= t * alpha(i);
      x_(out) = target;
      state_[out] = below ? VarState::AtLower : VarState::AtUpper;
      basis_[r] = q;
      state_[q] = VarState::Basic;
      pivot(alpha, r);
      ++iterations_;
      if (!x_.allFinite()) throw SolverError("simplex iterate became non-finite");
    }
  }

  Vector basic_costs() const {
    Vector cb(rows_);
    for (Eigen::Index i = 0; i < rows_; ++i) cb(i) = cost_(basis_[i]);
    return cb;
  }

  Eigen::Index choose_entering(const Vector& d, bool bland) const {
    Eigen::Index best = -1;
    double best_score = 0.0;
    for (Eigen::Index j = 0; j < cols_; ++j) {
      const VarState s = state_[j];
      if (s == VarState::Basic || lo_(j) == hi_(j)) continue;
      const bool eligible = (s == VarState::AtLower && d(j) < -opts_.optimality_tol) ||
                            (s == VarState::AtUpper && d(j) > opts_.optimality_tol) ||
                            (s == VarState::FreeZero && std::abs(d(j)) > opts_.optimality_tol);
      if (!eligible) continue;
      if (bland) return j;
      if (std::abs(d(j)) > best_score) {
        best_score = std::abs(d(j));
        best = j;
      }
    }
    return best;
  }

  // Entries of alpha smaller than this are not pivot candidates.
  double pivot_floor(const Vector& alpha) const {
    return opts_.pivot_tol * std::max(1.0, alpha.size() ? alpha.cwiseAbs().maxCoeff() : 0.0);
  }

  // Step length allowed by basic variable in row i, or +inf.
  double row_limit(const Vector& alpha, double dir, Eigen::Index i, double slack) const {
    const double a = dir * alpha(i);
    const Eigen::Index j = basis_[i];
    if (a > 0.0 && std::isfinite(lo_(j))) return (x_(j) - lo_(j) + slack) / a;
    if (a < 0.0 && std::isfinite(hi_(j))) return (hi_(j) - x_(j) + slack) / -a;
    return kInf;
  }

  double flip_length(Eigen::Index q) const {
    return (std::isfinite(lo_(q)) && std::isfinite(hi_(q))) ? hi_(q) - lo_(q) : kInf;
  }

  // Two-pass Harris test: bound the step with a relaxed tolerance, then take
  // the largest pivot among rows blocking within that bound.
  Eigen::Index ratio_test_harris(const Vector& alpha, double dir, Eigen::Index q, double& theta) const {
    const double tol = 0.1 * opts_.feasibility_tol;
    const double floor = pivot_floor(alpha);
    double relaxed = kInf;
    for (Eigen::Index i = 0; i < rows_; ++i) {
      if (std::abs(alpha(i)) <= floor) continue;
      relaxed = std::min(relaxed, row_limit(alpha, dir, i, tol));
    }
    const double flip = flip_length(q);
    if (flip <= relaxed) {
      if (!std::isfinite(flip)) return kUnbounded;
      theta = flip;
      return kBoundFlip;
    }
    Eigen::Index leave = kUnbounded;
    double best_pivot = 0.0;
    for (Eigen::Index i = 0; i < rows_; ++i) {
      if (std::abs(alpha(i)) <= floor) continue;
      const double t = row_limit(alpha, dir, i, 0.0);
      if (t <= relaxed && std::abs(alpha(i)) > best_pivot) {
        best_pivot = std::abs(alpha(i));
        leave = i;
      }
    }
    if (leave == kUnbounded) return kUnbounded;
    theta = std::max(0.0, row_limit(alpha, dir, leave, 0.0));
    return leave;
  }

  // Minimum ratio with ties broken by smallest variable index. Tied rows
  // whose pivot is tiny next to the largest tied pivot are passed over.
  Eigen::Index ratio_test_bland(const Vector& alpha, double dir, Eigen::Index q, double& theta) const {
    const double floor = pivot_floor(alpha);
    double best = kInf;
    for (Eigen::Index i = 0; i < rows_; ++i) {
      if (std::abs(alpha(i)) <= floor) continue;
      best = std::min(best, std::max(0.0, row_limit(alpha, dir, i, 0.0)));
    }
    const double flip = flip_length(q);
    if (flip <= best) {
      if (!std::isfinite(flip)) return kUnbounded;
      theta = flip;
      return kBoundFlip;
    }
    if (!std::isfinite(best)) return kUnbounded;
    const double tie = 1e-12 * std::max(1.0, best);
    double tied_pivot = 0.0;
    for (Eigen::Index i = 0; i < rows_; ++i) {
      if (std::abs(alpha(i)) > floor && std::max(0.0, row_limit(alpha, dir, i, 0.0)) <= best + tie) {
        tied_pivot = std::max(tied_pivot, std::abs(alpha(i)));
      }
    }
    Eigen::Index leave = kUnbounded;
    for (Eigen::Index i = 0; i < rows_; ++i) {
      if (std::abs(alpha(i)) < 1e-3 * tied_pivot) continue;
      if (std::max(0.0, row_limit(alpha, dir, i, 0.0)) > best + tie) continue;
      if (leave == kUnbounded || basis_[i] < basis_[leave]) leave = i;
    }
    theta = best;
    return leave;
  }

  void pivot(const Vector& alpha, Eigen::Index r) {
    const Eigen::RowVectorXd prow = binv_.row(r) / alpha(r);
    binv_.noalias() -= alpha * prow;
    binv_.row(r) = prow;
    ++since_refactor_;
  }

  Matrix a_;
  Vector b_, lo_, hi_;
  LpOptions opts_;
  Eigen::Index rows_ = 0, cols_ = 0;
  int max_iter_ = 0;
  int iterations_ = 0;
  int since_refactor_ = 0;
  Vector x_;
  Vector cost_;
  Matrix binv_;
  std::vector<Eigen::Index> basis_;
  std::vector<VarState> state_;
  bool perturbed_ = false;
  Vector saved_lo_, saved_hi_;
};

}  // namespace

LpSolution solve_lp(const LinearProgram& lp, const LpOptions& opts) {
  lp.validate();
  const Eigen::Index n = lp.num_vars();
  const Eigen::Index me = lp.A_eq.rows();
  const Eigen::Index mu = lp.A_ub.rows();
  const Eigen::Index rows = me + mu;
  const Eigen::Index first_art = n + mu;
  const Eigen::Index cols = first_art + rows;

  Matrix a = Matrix::Zero(rows, cols);
  a.topLeftCorner(me, n) = lp.A_eq;
  a.block(me, 0, mu, n) = lp.A_ub;
  a.block(me, n, mu, mu).setIdentity();
  Vector b(rows);
  b << lp.b_eq, lp.b_ub;
  Vector lo(cols), hi(cols);
  lo << lp.lower, Vector::Zero(mu), Vector::Zero(rows);
  hi << lp.upper, Vector::Constant(mu, kInf), Vector::Constant(rows, kInf);

  LpSolution sol;
  RevisedSimplex simplex(std::move(a), b, std::move(lo), std::move(hi), opts);
  simplex.init_with_artificials(first_art);

  Vector phase1_cost = Vector::Zero(cols);
  phase1_cost.tail(rows).setOnes();
  const double infeas_tol = opts.feasibility_tol * std::max(1.0, b.size() ? b.cwiseAbs().maxCoeff() : 0.0);
  simplex.run(phase1_cost, 0.1 * opts.feasibility_tol);
  const double infeasibility = simplex.x().tail(rows).sum();
  sol.iterations = simplex.iterations();
  if (infeasibility > infeas_tol) {
    sol.status = LpStatus::Infeasible;
    sol.x = simplex.x().head(n);
    sol.max_constraint_violation = lp.max_violation(sol.x);
    return sol;
  }

  for (Eigen::Index i = 0; i < rows; ++i) simplex.set_upper(first_art + i, 0.0);
  Vector phase2_cost = Vector::Zero(cols);
  phase2_cost.head(n) = lp.c;
  const PhaseStatus st = simplex.run(phase2_cost);
  sol.iterations = simplex.iterations();
  sol.x = simplex.x().head(n);
  sol.objective_value = lp.c.dot(sol.x);
  sol.max_constraint_violation = lp.max_violation(sol.x);
  if (st == PhaseStatus::Unbounded) {
    sol.status = LpStatus::Unbounded;
    return sol;
  }
  sol.status = LpStatus::Optimal;
  sol.duals = simplex.duals();
  sol.dual_infeasibility = simplex.dual_infeasibility();
  return sol;
}

}  // namespace sparselds
