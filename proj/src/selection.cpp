#include "dsps/selection.hpp"

#include <algorithm>
#include <cmath>

#include "dsps/error.hpp"
#include "dsps/moments.hpp"

namespace dsps {

std::string_view to_string(Mode mode) noexcept {
  switch (mode) {
    case Mode::Max: return "max";
    case Mode::MaxStrict: return "max-strict";
    case Mode::Fixed: return "fixed";
    case Mode::Min: return "min";
  }
  return "unknown";
}

Mode parse_mode(std::string_view text) {
  if (text == "max") return Mode::Max;
  if (text == "max-strict") return Mode::MaxStrict;
  if (text == "fixed") return Mode::Fixed;
  if (text == "min") return Mode::Min;
  throw Error(ErrorCode::InvalidConfig, "unknown mode '" + std::string(text) + "' (max, max-strict, fixed, min)");
}

std::string RowLabel::to_string() const {
  if (is_size_row()) return "size";
  return feature + "^" + std::to_string(order);
}

double row_reference(const TargetSet& targets, std::size_t j, double epsilon) {
  const auto& c = targets.criteria().at(j);
  const double base = std::abs(c.value) + epsilon;
  if (c.order == 3) {
    const double var = targets.variance_of(c.feature);
    return base * var * std::sqrt(var);
  }
  if (c.order == 4) {
    const double var = targets.variance_of(c.feature);
    return base * var * var;
  }
  return base;
}

HyperParams auto_hyperparams(const TargetSet& targets, std::int64_t trial_size, double epsilon) {
  if (trial_size < 1) throw Error(ErrorCode::InvalidSampleSize, "trial size must be >= 1");
  if (!(epsilon > 0)) throw Error(ErrorCode::InvalidHyperParams, "epsilon must be > 0");
  HyperParams h;
  h.trial_size = trial_size;
  h.epsilon = epsilon;
  h.alpha = 0.05 * static_cast<double>(trial_size);
  const auto m = static_cast<Eigen::Index>(targets.size());
  Eigen::VectorXd beta(m), eta_max(m);
  for (Eigen::Index j = 0; j < m; ++j) {
    const double r = row_reference(targets, static_cast<std::size_t>(j), epsilon);
    beta[j] = 1.0 / r;
    eta_max[j] = *h.alpha * r;
  }
  h.beta = std::move(beta);
  h.eta_max = std::move(eta_max);
  return h;
}

HyperParams resolve_hyperparams(const HyperParams& hyper, const TargetSet& targets) {
  if (!(hyper.epsilon > 0)) throw Error(ErrorCode::InvalidHyperParams, "epsilon must be > 0");
  HyperParams h = hyper;
  if (!h.alpha) {
    if (!h.trial_size) throw Error(ErrorCode::InvalidHyperParams, "alpha is unset and no trial size was given");
    if (*h.trial_size < 1) throw Error(ErrorCode::InvalidSampleSize, "trial size must be >= 1");
    h.alpha = 0.05 * static_cast<double>(*h.trial_size);
  }
  if (!(*h.alpha > 0) || !std::isfinite(*h.alpha)) throw Error(ErrorCode::InvalidHyperParams, "alpha must be > 0");

  const auto m = static_cast<Eigen::Index>(targets.size());
  const auto check = [m](const Eigen::VectorXd& v, const char* what) {
    if (v.size() != m)
      throw Error(ErrorCode::InvalidHyperParams, std::string(what) + " needs " + std::to_string(m) + " entries, got " +
                                                     std::to_string(v.size()));
    for (Eigen::Index j = 0; j < m; ++j)
      if (!(v[j] >= 0) || !std::isfinite(v[j]))
        throw Error(ErrorCode::InvalidHyperParams, std::string(what) + " entries must be finite and >= 0");
  };
  if (h.beta) check(*h.beta, "beta");
  if (h.eta_max) check(*h.eta_max, "eta_max");
  if (!h.beta || !h.eta_max) {
    Eigen::VectorXd beta(m), eta_max(m);
    for (Eigen::Index j = 0; j < m; ++j) {
      const double r = row_reference(targets, static_cast<std::size_t>(j), h.epsilon);
      beta[j] = 1.0 / r;
      eta_max[j] = *h.alpha * r;
    }
    if (!h.beta) h.beta = std::move(beta);
    if (!h.eta_max) h.eta_max = std::move(eta_max);
  }
  return h;
}

namespace {

struct CriterionRow {
  Eigen::VectorXd centered_power;  // (x - M1)^k, or x for k = 1
  double value;
  double mean;
  double var;
};

CriterionRow criterion_row(const Population& pop, const TargetSet& targets, const TargetCriterion& c) {
  const Eigen::VectorXd x = feature_column(pop, c.feature);
  CriterionRow row;
  row.value = c.value;
  row.mean = targets.mean_of(c.feature);
  row.var = c.order >= 2 ? targets.value(c.feature, 2).value_or(0.0) : 0.0;
  if (c.order == 1) {
    row.centered_power = x;
  } else {
    row.centered_power = (x.array() - row.mean).unaryExpr([k = c.order](double d) { return detail::ipow(d, k); });
  }
  return row;
}

void check_features(const Population& pop, const TargetSet& targets) {
  for (const auto& c : targets)
    if (!pop.has_feature(c.feature))
      throw Error(ErrorCode::UnknownFeature, "target references unknown feature '" + c.feature + "'");
}

}  // namespace

ConstraintSystem build_lp_system(const Population& pop, const TargetSet& targets, double epsilon) {
  check_features(pop, targets);
  const auto m = static_cast<Eigen::Index>(targets.size());
  ConstraintSystem sys;
  sys.A.resize(m, pop.size());
  sys.rhs.resize(m);
  sys.row_scales.resize(m);
  for (Eigen::Index j = 0; j < m; ++j) {
    const auto& c = targets.criteria()[static_cast<std::size_t>(j)];
    const CriterionRow row = criterion_row(pop, targets, c);
    double shift = 0.0;
    double rhs = 0.0;
    switch (c.order) {
      case 1:
        shift = row.mean;
        break;
      case 2:
        shift = row.value;
        rhs = -row.value;
        break;
      case 3:
        shift = row.var * std::sqrt(row.var) * row.value;
        break;
      case 4:
        shift = row.var * row.var * (row.value + 3.0);
        break;
      default:
        shift = row.value;
        break;
    }
    sys.A.row(j) = (row.centered_power.array() - shift).matrix().transpose();
    sys.rhs[j] = rhs;
    sys.row_scales[j] = 1.0 / row_reference(targets, static_cast<std::size_t>(j), epsilon);
    sys.labels.push_back({c.feature, c.order});
  }
  return sys;
}

ConstraintSystem build_sle_system(const Population& pop, const TargetSet& targets, std::int64_t n_t, double epsilon) {
  check_features(pop, targets);
  if (n_t < 1 || n_t > pop.size())
    throw Error(ErrorCode::InvalidSampleSize, "sample size " + std::to_string(n_t) + " outside [1, " +
                                                  std::to_string(pop.size()) + "]");
  const auto m = static_cast<Eigen::Index>(targets.size());
  const double nt = static_cast<double>(n_t);
  ConstraintSystem sys;
  sys.A.resize(m + 1, pop.size());
  sys.rhs.resize(m + 1);
  sys.row_scales.resize(m + 1);
  sys.A.row(0).setOnes();
  sys.rhs[0] = nt;
  sys.row_scales[0] = 1.0 / (nt + epsilon);
  sys.labels.push_back({});
  for (Eigen::Index j = 0; j < m; ++j) {
    const auto& c = targets.criteria()[static_cast<std::size_t>(j)];
    const CriterionRow row = criterion_row(pop, targets, c);
    double rhs = 0.0;
    switch (c.order) {
      case 1: rhs = nt * row.value; break;
      case 2: rhs = (nt - 1.0) * row.value; break;
      case 3: rhs = nt * row.var * std::sqrt(row.var) * row.value; break;
      case 4: rhs = nt * row.var * row.var * (row.value + 3.0); break;
      default: rhs = nt * row.value; break;
    }
    sys.A.row(j + 1) = row.centered_power.transpose();
    sys.rhs[j + 1] = rhs;
    sys.row_scales[j + 1] = 1.0 / (nt * row_reference(targets, static_cast<std::size_t>(j), epsilon));
    sys.labels.push_back({c.feature, c.order});
  }
  return sys;
}

namespace {

// Solves over scaled rows. Relaxed form has variables [p; eta'] with
// eta'_j = s_j eta_j, rows s_j A_j p -/+ eta'_j {<=,>=} s_j C_j, eta' in [0, s_j eta_max_j].
SelectionProbabilities run_lp(const ConstraintSystem& sys, const Eigen::VectorXd& beta, const Eigen::VectorXd& eta_max,
                              double p_cost, bool relaxed, const lp::OptionsD& options) {
  const Eigen::Index n_p = sys.A.cols();
  const Eigen::Index m = sys.n_rows();
  const Eigen::MatrixXd S = sys.scaled_A();
  const Eigen::VectorXd c = sys.scaled_rhs();

  lp::ProblemD problem;
  if (relaxed) {
    const Eigen::Index n = n_p + m;
    problem.objective.resize(n);
    problem.objective.head(n_p).setConstant(p_cost);
    problem.objective.tail(m) = beta.cwiseQuotient(sys.row_scales);
    problem.lower = Eigen::VectorXd::Zero(n);
    problem.upper.resize(n);
    problem.upper.head(n_p).setOnes();
    problem.upper.tail(m) = eta_max.cwiseProduct(sys.row_scales);
    problem.rows = Eigen::MatrixXd::Zero(2 * m, n);
    problem.rhs.resize(2 * m);
    for (Eigen::Index j = 0; j < m; ++j) {
      problem.rows.row(2 * j).head(n_p) = S.row(j);
      problem.rows(2 * j, n_p + j) = -1.0;
      problem.rhs[2 * j] = c[j];
      problem.relations.push_back(lp::Relation::LE);
      problem.rows.row(2 * j + 1).head(n_p) = S.row(j);
      problem.rows(2 * j + 1, n_p + j) = 1.0;
      problem.rhs[2 * j + 1] = c[j];
      problem.relations.push_back(lp::Relation::GE);
    }
  } else {
    problem.objective = Eigen::VectorXd::Constant(n_p, p_cost);
    problem.lower = Eigen::VectorXd::Zero(n_p);
    problem.upper = Eigen::VectorXd::Ones(n_p);
    problem.rows = S;
    problem.rhs = c;
    problem.relations.assign(static_cast<std::size_t>(m), lp::Relation::EQ);
  }

  const lp::SolutionD sol = lp::solve(problem, options);
  switch (sol.status) {
    case lp::Status::Optimal: break;
    case lp::Status::Infeasible:
      throw Error(ErrorCode::Infeasible, relaxed ? "targets unreachable even with eta_max slack"
                                                 : "no probability vector satisfies the targets exactly");
    case lp::Status::Unbounded: throw Error(ErrorCode::NumericalBreakdown, "bounded problem reported unbounded");
    case lp::Status::IterationLimit:
      throw Error(ErrorCode::IterationLimit, "simplex stopped after " + std::to_string(sol.iterations) + " iterations");
  }

  SelectionProbabilities out;
  out.p = sol.z.head(n_p).cwiseMax(0.0).cwiseMin(1.0);
  out.rows = sys.labels;
  out.eta_max = relaxed ? eta_max : Eigen::VectorXd::Zero(m);
  if (relaxed) out.eta = (sys.A * out.p - sys.rhs).cwiseAbs().cwiseMin(eta_max);
  out.expected_size = out.p.sum();
  out.solver = {sol.status, sol.iterations, sol.objective_value, sol.max_residual};
  return out;
}

ConstraintSystem with_size_row(const ConstraintSystem& base, std::int64_t n_t, double epsilon) {
  const double nt = static_cast<double>(n_t);
  ConstraintSystem sys;
  const Eigen::Index m = base.n_rows();
  sys.A.resize(m + 1, base.A.cols());
  sys.A.row(0).setOnes();
  sys.A.bottomRows(m) = base.A;
  sys.rhs.resize(m + 1);
  sys.rhs << nt, base.rhs;
  sys.row_scales.resize(m + 1);
  sys.row_scales << 1.0 / (nt + epsilon), base.row_scales;
  sys.labels.push_back({});
  sys.labels.insert(sys.labels.end(), base.labels.begin(), base.labels.end());
  return sys;
}

}  // namespace

namespace {

// The homogeneous rows admit p = 0; a maximum of zero means no non-empty selection meets the targets.
void require_nonempty(const SelectionProbabilities& out, const TargetSet& targets) {
  if (!targets.empty() && out.expected_size <= 1e-6)
    throw Error(ErrorCode::Infeasible, "only the empty selection satisfies the targets");
}

}  // namespace

SelectionProbabilities solve_max_size(const Population& pop, const TargetSet& targets, const HyperParams& hyper,
                                      bool relaxed, const lp::OptionsD& options) {
  const ConstraintSystem sys = build_lp_system(pop, targets, hyper.epsilon);
  if (!relaxed) {
    HyperParams h = hyper;
    if (h.alpha || h.trial_size) h = resolve_hyperparams(hyper, targets);
    SelectionProbabilities out = run_lp(sys, {}, {}, -1.0, false, options);
    out.mode = Mode::MaxStrict;
    out.hyper = std::move(h);
    require_nonempty(out, targets);
    return out;
  }
  const HyperParams h = resolve_hyperparams(hyper, targets);
  SelectionProbabilities out = run_lp(sys, *h.beta, *h.eta_max, -1.0, true, options);
  out.mode = Mode::Max;
  out.hyper = h;
  require_nonempty(out, targets);
  return out;
}

SelectionProbabilities solve_fixed_size(const Population& pop, const TargetSet& targets, std::int64_t n_t,
                                        const HyperParams& hyper, const lp::OptionsD& options) {
  if (n_t < 1 || n_t > pop.size())
    throw Error(ErrorCode::InvalidSampleSize, "sample size " + std::to_string(n_t) + " outside [1, " +
                                                  std::to_string(pop.size()) + "]");
  if (targets.empty()) throw Error(ErrorCode::InvalidTarget, "fixed-size selection needs at least one target");
  HyperParams base = hyper;
  if (!base.alpha && !base.trial_size) base.trial_size = n_t;
  const HyperParams h = resolve_hyperparams(base, targets);

  const ConstraintSystem sys = with_size_row(build_lp_system(pop, targets, h.epsilon), n_t, h.epsilon);
  const Eigen::Index m = sys.n_rows();
  Eigen::VectorXd beta(m), eta_max(m);
  beta << 1.0 / (static_cast<double>(n_t) + h.epsilon), *h.beta;
  eta_max << *h.alpha, *h.eta_max;

  SelectionProbabilities out = run_lp(sys, beta, eta_max, 0.0, true, options);
  out.mode = Mode::Fixed;
  out.hyper = h;
  return out;
}

SelectionProbabilities solve_min_size(const Population& pop, const TargetSet& targets, const HyperParams& hyper,
                                      const lp::OptionsD& options) {
  const ConstraintSystem sys = build_lp_system(pop, targets, hyper.epsilon);
  const HyperParams h = resolve_hyperparams(hyper, targets);
  SelectionProbabilities out = run_lp(sys, *h.beta, *h.eta_max, 1.0, true, options);
  out.mode = Mode::Min;
  out.hyper = h;
  out.small_sample_warning = out.expected_size < kSmallSampleThreshold;
  return out;
}

SelectionProbabilities select(const Population& pop, const TargetSet& targets, Mode mode, const HyperParams& hyper,
                              std::optional<std::int64_t> n_t, const lp::OptionsD& options) {
  switch (mode) {
    case Mode::Max: return solve_max_size(pop, targets, hyper, true, options);
    case Mode::MaxStrict: return solve_max_size(pop, targets, hyper, false, options);
    case Mode::Fixed:
      if (!n_t) throw Error(ErrorCode::InvalidConfig, "fixed mode needs a target sample size");
      return solve_fixed_size(pop, targets, *n_t, hyper, options);
    case Mode::Min: return solve_min_size(pop, targets, hyper, options);
  }
  throw Error(ErrorCode::InvalidConfig, "unknown mode");
}

}  // namespace dsps
