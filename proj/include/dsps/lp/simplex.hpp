#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/LU>

#include "dsps/error.hpp"

namespace dsps::lp {

enum class Relation { LE, EQ, GE };

enum class Status { Optimal, Infeasible, Unbounded, IterationLimit };

std::string_view to_string(Status s) noexcept;

/// minimize c'z  s.t.  rows(r,:) z  {<=,=,>=}  rhs(r),   lower <= z <= upper.
/// Bounds may be +-infinity.
template <typename Scalar>
struct Problem {
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

  Vector objective;
  Matrix rows;
  std::vector<Relation> relations;
  Vector rhs;
  Vector lower;
  Vector upper;

  Problem() = default;

  /// n_vars variables with box [lo, hi] and zero objective, no rows.
  static Problem box(Eigen::Index n_vars, Scalar lo, Scalar hi) {
    Problem p;
    p.objective = Vector::Zero(n_vars);
    p.rows.resize(0, n_vars);
    p.rhs.resize(0);
    p.lower = Vector::Constant(n_vars, lo);
    p.upper = Vector::Constant(n_vars, hi);
    return p;
  }

  Eigen::Index n_vars() const noexcept { return objective.size(); }
  Eigen::Index n_rows() const noexcept { return rows.rows(); }

  template <typename Derived>
  void add_row(const Eigen::MatrixBase<Derived>& coefficients, Relation rel, Scalar b) {
    if (coefficients.size() != n_vars())
      throw Error(ErrorCode::DimensionMismatch, "row length differs from the number of variables");
    const Eigen::Index r = rows.rows();
    rows.conservativeResize(r + 1, n_vars());
    rows.row(r) = coefficients.transpose();
    rhs.conservativeResize(r + 1);
    rhs[r] = b;
    relations.push_back(rel);
  }

  void validate() const {
    const Eigen::Index n = n_vars();
    if (lower.size() != n || upper.size() != n)
      throw Error(ErrorCode::DimensionMismatch, "bound vectors must have one entry per variable");
    if (rows.cols() != n && n_rows() > 0)
      throw Error(ErrorCode::DimensionMismatch, "constraint matrix column count differs from variable count");
    if (rhs.size() != n_rows() || static_cast<Eigen::Index>(relations.size()) != n_rows())
      throw Error(ErrorCode::DimensionMismatch, "rhs/relations must have one entry per row");
    for (Eigen::Index i = 0; i < n; ++i) {
      if (std::isnan(lower[i]) || std::isnan(upper[i]) || lower[i] > upper[i])
        throw Error(ErrorCode::DimensionMismatch, "invalid bounds for variable " + std::to_string(i));
      if (!std::isfinite(objective[i]))
        throw Error(ErrorCode::DimensionMismatch, "non-finite objective coefficient");
    }
    if (!rows.allFinite() || !rhs.allFinite())
      throw Error(ErrorCode::DimensionMismatch, "non-finite constraint data");
  }
};

template <typename Scalar>
struct Options {
  Scalar feasibility_tolerance = Scalar(1e-9);
  Scalar optimality_tolerance = Scalar(1e-9);
  /// Defaults to 50 * (n_vars + n_rows).
  std::optional<std::int64_t> max_iterations;
  int refactor_interval = 64;
};

template <typename Scalar>
struct Solution {
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  Status status = Status::Infeasible;
  Vector z;  // filled only when Optimal
  Scalar objective_value = std::numeric_limits<Scalar>::quiet_NaN();
  std::int64_t iterations = 0;
  Scalar max_residual = Scalar(0);
  /// Phase-1 minimum of the largest artificial; > tolerance proves infeasibility.
  Scalar infeasibility = Scalar(0);
};

/// Largest signed violation of rows and bounds at z (0 when feasible).
template <typename Scalar>
Scalar max_violation(const Problem<Scalar>& problem, const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& z) {
  Scalar worst(0);
  if (problem.n_rows() > 0) {
    const Eigen::Matrix<Scalar, Eigen::Dynamic, 1> lhs = problem.rows * z;
    for (Eigen::Index r = 0; r < problem.n_rows(); ++r) {
      const Scalar diff = lhs[r] - problem.rhs[r];
      switch (problem.relations[static_cast<std::size_t>(r)]) {
        case Relation::LE: worst = std::max(worst, diff); break;
        case Relation::GE: worst = std::max(worst, -diff); break;
        case Relation::EQ: worst = std::max(worst, std::abs(diff)); break;
      }
    }
  }
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    worst = std::max(worst, problem.lower[i] - z[i]);
    worst = std::max(worst, z[i] - problem.upper[i]);
  }
  return worst;
}

namespace detail {

/// Two-phase bounded-variable revised simplex on a dense explicit basis
/// inverse. Every row r becomes a_r z + s_r = b_r with the slack bounded by
/// its relation; rows whose starting slack is out of bounds get an artificial
/// column. Nonbasic variables sit at either bound (or at zero when free).
template <typename Scalar>
class RevisedSimplex {
 public:
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

  RevisedSimplex(const Problem<Scalar>& problem, const Options<Scalar>& options)
      : P_(problem), opt_(options), n_(problem.n_vars()), m_(problem.n_rows()) {
    const Eigen::Index total = n_ + 2 * m_;
    lo_.resize(total);
    up_.resize(total);
    x_ = Vector::Zero(total);
    state_.assign(static_cast<std::size_t>(total), NonBasic::AtLower);
    pos_.assign(static_cast<std::size_t>(total), -1);
    basis_.assign(static_cast<std::size_t>(m_), 0);
    art_sign_ = Vector::Ones(m_);
    max_iter_ = opt_.max_iterations.value_or(50 * (n_ + m_));
    b_norm_ = m_ > 0 ? P_.rhs.cwiseAbs().maxCoeff() : Scalar(0);
  }

  Solution<Scalar> run() {
    Solution<Scalar> sol;
    initialize();

    const Scalar feas_threshold = opt_.feasibility_tolerance * (Scalar(1) + b_norm_);
    if (largest_artificial() > opt_.feasibility_tolerance) {
      cost_ = Vector::Zero(n_ + 2 * m_);
      cost_.tail(m_).setOnes();
      const Outcome o = iterate(/*phase_one=*/true);
      sol.iterations = iter_;
      if (o == Outcome::IterationLimit) {
        sol.status = Status::IterationLimit;
        return sol;
      }
      if (o == Outcome::Unbounded)
        throw Error(ErrorCode::NumericalBreakdown, "phase 1 reported an unbounded ray");
      sol.infeasibility = largest_artificial();
      if (sol.infeasibility > feas_threshold) {
        sol.status = Status::Infeasible;
        return sol;
      }
    }
    for (Eigen::Index r = 0; r < m_; ++r) up_[n_ + m_ + r] = Scalar(0);

    cost_ = Vector::Zero(n_ + 2 * m_);
    cost_.head(n_) = P_.objective;
    const Outcome o = iterate(/*phase_one=*/false);
    sol.iterations = iter_;
    if (o == Outcome::IterationLimit) {
      sol.status = Status::IterationLimit;
      return sol;
    }
    if (o == Outcome::Unbounded) {
      sol.status = Status::Unbounded;
      return sol;
    }

    sol.status = Status::Optimal;
    sol.z = x_.head(n_).cwiseMax(P_.lower).cwiseMin(P_.upper);
    sol.objective_value = P_.objective.dot(sol.z);
    sol.max_residual = max_violation(P_, sol.z);
    return sol;
  }

 private:
  enum class NonBasic : std::uint8_t { AtLower, AtUpper, Free, Basic };
  enum class Outcome { Optimal, Unbounded, IterationLimit };

  static constexpr Scalar inf() { return std::numeric_limits<Scalar>::infinity(); }

  void initialize() {
    lo_.head(n_) = P_.lower;
    up_.head(n_) = P_.upper;
    for (Eigen::Index j = 0; j < n_; ++j) {
      const bool lo_fin = std::isfinite(lo_[j]);
      const bool up_fin = std::isfinite(up_[j]);
      // Start finite boxes at the bound the objective prefers.
      if (lo_fin && up_fin) {
        set_nonbasic(j, P_.objective[j] < Scalar(0) ? NonBasic::AtUpper : NonBasic::AtLower);
      } else if (lo_fin) {
        set_nonbasic(j, NonBasic::AtLower);
      } else if (up_fin) {
        set_nonbasic(j, NonBasic::AtUpper);
      } else {
        set_nonbasic(j, NonBasic::Free);
      }
    }
    for (Eigen::Index r = 0; r < m_; ++r) {
      const Eigen::Index s = n_ + r;
      switch (P_.relations[static_cast<std::size_t>(r)]) {
        case Relation::LE: lo_[s] = 0; up_[s] = inf(); break;
        case Relation::GE: lo_[s] = -inf(); up_[s] = 0; break;
        case Relation::EQ: lo_[s] = 0; up_[s] = 0; break;
      }
      lo_[n_ + m_ + r] = 0;
      up_[n_ + m_ + r] = inf();
    }

    const Vector residual = m_ > 0 ? Vector(P_.rhs - P_.rows * x_.head(n_)) : Vector(0);
    const Scalar tol = opt_.feasibility_tolerance;
    for (Eigen::Index r = 0; r < m_; ++r) {
      const Eigen::Index s = n_ + r;
      const Eigen::Index a = n_ + m_ + r;
      const Scalar rho = residual[r];
      if (rho >= lo_[s] - tol && rho <= up_[s] + tol) {
        make_basic(s, r, rho);
        set_nonbasic(a, NonBasic::AtLower);
      } else {
        const bool below = rho < lo_[s];
        set_nonbasic(s, below ? NonBasic::AtLower : NonBasic::AtUpper);
        const Scalar gap = rho - x_[s];
        art_sign_[r] = gap >= 0 ? Scalar(1) : Scalar(-1);
        make_basic(a, r, std::abs(gap));
      }
    }
    refactor();
  }

  void set_nonbasic(Eigen::Index j, NonBasic st) {
    state_[static_cast<std::size_t>(j)] = st;
    pos_[static_cast<std::size_t>(j)] = -1;
    switch (st) {
      case NonBasic::AtLower: x_[j] = lo_[j]; break;
      case NonBasic::AtUpper: x_[j] = up_[j]; break;
      case NonBasic::Free: x_[j] = 0; break;
      case NonBasic::Basic: break;
    }
  }

  void make_basic(Eigen::Index j, Eigen::Index r, Scalar value) {
    state_[static_cast<std::size_t>(j)] = NonBasic::Basic;
    pos_[static_cast<std::size_t>(j)] = r;
    basis_[static_cast<std::size_t>(r)] = j;
    x_[j] = value;
  }

  Scalar largest_artificial() const {
    Scalar worst(0);
    for (Eigen::Index r = 0; r < m_; ++r) worst = std::max(worst, x_[n_ + m_ + r]);
    return worst;
  }

  // Column j of [A  I  diag(art_sign)] written into out.
  void column(Eigen::Index j, Vector& out) const {
    if (j < n_) {
      out = P_.rows.col(j);
    } else {
      out.setZero(m_);
      const Eigen::Index r = j < n_ + m_ ? j - n_ : j - n_ - m_;
      out[r] = j < n_ + m_ ? Scalar(1) : art_sign_[r];
    }
  }

  void refactor() {
    if (m_ == 0) return;
    Matrix B(m_, m_);
    Vector col;
    for (Eigen::Index r = 0; r < m_; ++r) {
      column(basis_[static_cast<std::size_t>(r)], col);
      B.col(r) = col;
    }
    Eigen::FullPivLU<Matrix> lu(B);
    if (!lu.isInvertible()) throw Error(ErrorCode::NumericalBreakdown, "singular basis matrix");
    Binv_ = lu.inverse();

    // x_B = B^-1 (b - N x_N)
    Vector rhs = P_.rhs;
    Vector xs = x_.head(n_);
    for (Eigen::Index r = 0; r < m_; ++r) {
      const Eigen::Index j = basis_[static_cast<std::size_t>(r)];
      if (j < n_) xs[j] = 0;
    }
    rhs.noalias() -= P_.rows * xs;
    for (Eigen::Index r = 0; r < m_; ++r) {
      const Eigen::Index s = n_ + r;
      const Eigen::Index a = n_ + m_ + r;
      if (state_[static_cast<std::size_t>(s)] != NonBasic::Basic) rhs[r] -= x_[s];
      if (state_[static_cast<std::size_t>(a)] != NonBasic::Basic) rhs[r] -= art_sign_[r] * x_[a];
    }
    const Vector xb = Binv_ * rhs;
    for (Eigen::Index r = 0; r < m_; ++r) x_[basis_[static_cast<std::size_t>(r)]] = xb[r];
    pivots_since_refactor_ = 0;
  }

  bool fixed(Eigen::Index j) const { return lo_[j] == up_[j]; }

  Outcome iterate(bool phase_one) {
    const Scalar opt_tol = opt_.optimality_tolerance;
    const Scalar feas_tol = opt_.feasibility_tolerance;
    const Scalar pivot_tol = Scalar(1e-9);
    const Eigen::Index total = n_ + 2 * m_;
    const std::int64_t stall_limit = std::max<std::int64_t>(2 * m_, 1);

    Vector cb(m_), y(m_), d(total), w(m_), col(m_);
    std::int64_t stall = 0;
    bool bland = false;

    for (;;) {
      if (phase_one && largest_artificial() <= feas_tol) return Outcome::Optimal;
      if (iter_ >= max_iter_) return Outcome::IterationLimit;

      for (Eigen::Index r = 0; r < m_; ++r) cb[r] = cost_[basis_[static_cast<std::size_t>(r)]];
      if (m_ > 0) y.noalias() = Binv_.transpose() * cb;

      d.head(n_) = cost_.head(n_);
      if (m_ > 0) {
        d.head(n_).noalias() -= P_.rows.transpose() * y;
        d.segment(n_, m_) = cost_.segment(n_, m_) - y;
        d.tail(m_) = cost_.tail(m_) - art_sign_.cwiseProduct(y);
      }

      // Pricing: Dantzig, or Bland's smallest index while stalled.
      Eigen::Index entering = -1;
      Scalar dir = 0;
      Scalar best = 0;
      for (Eigen::Index j = 0; j < total; ++j) {
        const NonBasic st = state_[static_cast<std::size_t>(j)];
        if (st == NonBasic::Basic || fixed(j)) continue;
        Scalar score = 0;
        Scalar jdir = 0;
        if (st == NonBasic::AtLower && d[j] < -opt_tol) {
          score = -d[j];
          jdir = 1;
        } else if (st == NonBasic::AtUpper && d[j] > opt_tol) {
          score = d[j];
          jdir = -1;
        } else if (st == NonBasic::Free && std::abs(d[j]) > opt_tol) {
          score = std::abs(d[j]);
          jdir = d[j] < 0 ? 1 : -1;
        }
        if (jdir == 0) continue;
        if (bland) {
          entering = j;
          dir = jdir;
          break;
        }
        if (score > best) {
          best = score;
          entering = j;
          dir = jdir;
        }
      }
      if (entering < 0) return Outcome::Optimal;

      column(entering, col);
      if (m_ > 0) w.noalias() = Binv_ * col;

      const Scalar range = up_[entering] - lo_[entering];
      Eigen::Index leave_pos = -1;
      Scalar theta = inf();

      if (!bland) {
        // Harris two-pass ratio test.
        Scalar theta_max = inf();
        for (Eigen::Index i = 0; i < m_; ++i) {
          const Scalar g = dir * w[i];
          const Eigen::Index v = basis_[static_cast<std::size_t>(i)];
          if (g > pivot_tol && std::isfinite(lo_[v]))
            theta_max = std::min(theta_max, (x_[v] - lo_[v] + feas_tol) / g);
          else if (g < -pivot_tol && std::isfinite(up_[v]))
            theta_max = std::min(theta_max, (up_[v] - x_[v] + feas_tol) / -g);
        }
        if (range <= theta_max) {
          theta = range;
        } else if (std::isfinite(theta_max)) {
          Scalar best_pivot = 0;
          for (Eigen::Index i = 0; i < m_; ++i) {
            const Scalar g = dir * w[i];
            const Eigen::Index v = basis_[static_cast<std::size_t>(i)];
            Scalar ratio = inf();
            if (g > pivot_tol && std::isfinite(lo_[v]))
              ratio = (x_[v] - lo_[v]) / g;
            else if (g < -pivot_tol && std::isfinite(up_[v]))
              ratio = (up_[v] - x_[v]) / -g;
            if (ratio <= theta_max && std::abs(g) > best_pivot) {
              best_pivot = std::abs(g);
              leave_pos = i;
              theta = std::max(ratio, Scalar(0));
            }
          }
        }
      } else {
        Eigen::Index leave_var = -1;
        for (Eigen::Index i = 0; i < m_; ++i) {
          const Scalar g = dir * w[i];
          const Eigen::Index v = basis_[static_cast<std::size_t>(i)];
          Scalar ratio = inf();
          if (g > pivot_tol && std::isfinite(lo_[v]))
            ratio = std::max((x_[v] - lo_[v]) / g, Scalar(0));
          else if (g < -pivot_tol && std::isfinite(up_[v]))
            ratio = std::max((up_[v] - x_[v]) / -g, Scalar(0));
          if (!std::isfinite(ratio)) continue;
          if (ratio < theta || (ratio == theta && v < leave_var)) {
            theta = ratio;
            leave_pos = i;
            leave_var = v;
          }
        }
        if (range <= theta) {
          theta = range;
          leave_pos = -1;
        }
      }

      if (!std::isfinite(theta)) return Outcome::Unbounded;
      ++iter_;

      x_[entering] += dir * theta;
      for (Eigen::Index i = 0; i < m_; ++i) x_[basis_[static_cast<std::size_t>(i)]] -= theta * dir * w[i];

      if (leave_pos < 0) {
        // Bound flip, basis unchanged.
        state_[static_cast<std::size_t>(entering)] = dir > 0 ? NonBasic::AtUpper : NonBasic::AtLower;
        x_[entering] = dir > 0 ? up_[entering] : lo_[entering];
        stall = 0;
        bland = false;
        continue;
      }

      const Eigen::Index leaving = basis_[static_cast<std::size_t>(leave_pos)];
      const Scalar g = dir * w[leave_pos];
      set_nonbasic(leaving, g > 0 ? NonBasic::AtLower : NonBasic::AtUpper);
      make_basic(entering, leave_pos, x_[entering]);

      // Product-form update of the explicit inverse.
      const Scalar pivot = w[leave_pos];
      Binv_.row(leave_pos) /= pivot;
      for (Eigen::Index i = 0; i < m_; ++i) {
        if (i == leave_pos || w[i] == Scalar(0)) continue;
        Binv_.row(i) -= w[i] * Binv_.row(leave_pos);
      }
      if (++pivots_since_refactor_ >= opt_.refactor_interval) refactor();

      if (theta <= Scalar(1e-12)) {
        if (++stall > stall_limit) bland = true;
      } else {
        stall = 0;
        bland = false;
      }
    }
  }

  const Problem<Scalar>& P_;
  Options<Scalar> opt_;
  Eigen::Index n_;
  Eigen::Index m_;
  Vector lo_, up_, x_, cost_, art_sign_;
  std::vector<NonBasic> state_;
  std::vector<Eigen::Index> pos_;
  std::vector<Eigen::Index> basis_;
  Matrix Binv_;
  std::int64_t iter_ = 0;
  std::int64_t max_iter_ = 0;
  int pivots_since_refactor_ = 0;
  Scalar b_norm_ = 0;
};

}  // namespace detail

/// Solves the problem with the two-phase bounded revised simplex.
/// Throws DimensionMismatch for malformed input and NumericalBreakdown when
/// the basis becomes singular; infeasible/unbounded are statuses, not errors.
template <typename Scalar>
Solution<Scalar> solve(const Problem<Scalar>& problem, const Options<Scalar>& options = {}) {
  problem.validate();
  if (!(options.feasibility_tolerance > 0) || !(options.optimality_tolerance > 0))
    throw Error(ErrorCode::DimensionMismatch, "solver tolerances must be positive");
  if (options.max_iterations && *options.max_iterations < 1)
    throw Error(ErrorCode::DimensionMismatch, "max_iterations must be >= 1");
  detail::RevisedSimplex<Scalar> engine(problem, options);
  return engine.run();
}

using ProblemD = Problem<double>;
using OptionsD = Options<double>;
using SolutionD = Solution<double>;

extern template struct Problem<double>;
extern template class detail::RevisedSimplex<double>;

}  // namespace dsps::lp
