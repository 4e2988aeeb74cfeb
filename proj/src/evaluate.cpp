#include "dsps/evaluate.hpp"

#include <cmath>

#include "dsps/error.hpp"
#include "dsps/moments.hpp"

namespace dsps {

namespace {

double denominator(double target, double epsilon, Eigen::Index j) {
  if (epsilon > 0) return std::abs(target) + epsilon;
  if (target == 0.0)
    throw Error(ErrorCode::ZeroTarget, "target " + std::to_string(j) + " is zero; drop it or pass an rsse epsilon");
  return std::abs(target);
}

Eigen::VectorXd target_values(const TargetSet& targets) {
  Eigen::VectorXd t(static_cast<Eigen::Index>(targets.size()));
  for (std::size_t j = 0; j < targets.size(); ++j) t[static_cast<Eigen::Index>(j)] = targets.criteria()[j].value;
  return t;
}

std::string label(const TargetCriterion& c) { return c.feature + "^" + std::to_string(c.order); }

EvaluationReport build_report(const TargetSet& targets, const Eigen::VectorXd& achieved, double rsse_epsilon) {
  EvaluationReport report;
  const auto m = static_cast<Eigen::Index>(targets.size());
  Eigen::VectorXd pe(m);
  for (Eigen::Index j = 0; j < m; ++j) {
    const auto& c = targets.criteria()[static_cast<std::size_t>(j)];
    try {
      pe[j] = percentage_error(achieved[j], c.value, rsse_epsilon);
    } catch (const Error& e) {
      throw Error(e.code(), "criterion " + label(c) + " has a zero target; drop it or pass an rsse epsilon");
    }
    report.criteria.push_back({c.feature, c.order, c.value, achieved[j], std::nullopt, pe[j]});
  }
  if (m > 0) {
    report.rsse = rsse(achieved, target_values(targets), rsse_epsilon);
    report.pe_mean = pe.mean();
    report.pe_sd = m > 1 ? std::sqrt((pe.array() - report.pe_mean).square().sum() / double(m - 1)) : 0.0;
  }
  return report;
}

}  // namespace

double rsse(const Eigen::Ref<const Eigen::VectorXd>& achieved, const Eigen::Ref<const Eigen::VectorXd>& targets,
            double epsilon) {
  if (achieved.size() != targets.size())
    throw Error(ErrorCode::LengthMismatch, "achieved and target vectors differ in length");
  if (targets.size() < 1) throw Error(ErrorCode::LengthMismatch, "rsse needs at least one criterion");
  double total = 0.0;
  for (Eigen::Index j = 0; j < targets.size(); ++j) {
    const double rel = (achieved[j] - targets[j]) / denominator(targets[j], epsilon, j);
    total += rel * rel;
  }
  return total;
}

double percentage_error(double achieved, double target, double epsilon) {
  return std::abs(achieved - target) / denominator(target, epsilon, 0) * 100.0;
}

double gmi(double mean_glucose_mg_dl) {
  if (!(mean_glucose_mg_dl > 0)) throw Error(ErrorCode::NonPositiveInput, "mean glucose must be > 0");
  return 3.31 + 0.02392 * mean_glucose_mg_dl;
}

Eigen::VectorXd realized_moments(const Population& pop, const TargetSet& targets, const SelectionMask& mask) {
  const Population sub = subset(pop, mask);
  Eigen::VectorXd out(static_cast<Eigen::Index>(targets.size()));
  for (std::size_t j = 0; j < targets.size(); ++j) {
    const auto& c = targets.criteria()[j];
    const Eigen::VectorXd x = feature_column(sub, c.feature);
    try {
      out[static_cast<Eigen::Index>(j)] = sample_moment(x, c.order);
    } catch (const Error& e) {
      throw Error(e.code(), label(c) + " on " + std::to_string(sub.size()) + " selected members: " + e.what());
    }
  }
  return out;
}

Eigen::VectorXd expected_moments(const Population& pop, const TargetSet& targets,
                                 const Eigen::Ref<const Eigen::VectorXd>& p) {
  if (p.size() != pop.size()) throw Error(ErrorCode::LengthMismatch, "probabilities and population differ in length");
  Eigen::VectorXd out(static_cast<Eigen::Index>(targets.size()));
  for (std::size_t j = 0; j < targets.size(); ++j) {
    const auto& c = targets.criteria()[j];
    const Eigen::VectorXd x = feature_column(pop, c.feature);
    const double mean = targets.mean_of(c.feature);
    const double var = targets.value(c.feature, 2).value_or(0.0);
    out[static_cast<Eigen::Index>(j)] = expected_moment(x, p, c.order, mean, var);
  }
  return out;
}

EvaluationReport evaluate_selection(const Population& pop, const TargetSet& targets, const SelectionMask& mask,
                                    double rsse_epsilon) {
  EvaluationReport report = build_report(targets, realized_moments(pop, targets, mask), rsse_epsilon);
  report.realized_size = mask.count();
  report.expected_size = static_cast<double>(mask.count());
  return report;
}

EvaluationReport evaluate_selection(const Population& pop, const TargetSet& targets,
                                    const Eigen::Ref<const Eigen::VectorXd>& p, double rsse_epsilon) {
  const double size = expected_size(p);
  if (!(size > 0)) throw Error(ErrorCode::EmptySelection, "all probabilities are zero");
  EvaluationReport report = build_report(targets, expected_moments(pop, targets, p), rsse_epsilon);
  for (auto& c : report.criteria) c.expected = c.achieved;
  report.expected_size = size;
  return report;
}

void attach_expected(EvaluationReport& report, const Population& pop, const TargetSet& targets,
                     const Eigen::Ref<const Eigen::VectorXd>& p) {
  report.expected_size = expected_size(p);
  for (std::size_t j = 0; j < targets.size() && j < report.criteria.size(); ++j) {
    const auto& c = targets.criteria()[j];
    try {
      report.criteria[j].expected =
          expected_moment(feature_column(pop, c.feature), p, c.order, targets.mean_of(c.feature),
                          targets.value(c.feature, 2).value_or(0.0));
    } catch (const Error&) {
      report.criteria[j].expected.reset();
    }
  }
}

}  // namespace dsps
