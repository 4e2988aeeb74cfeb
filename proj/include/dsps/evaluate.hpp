#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dsps/mask.hpp"
#include "dsps/population.hpp"
#include "dsps/targets.hpp"

namespace dsps {

/// sum_j ((achieved_j - t_j) / t_j)^2. A zero target throws ZeroTarget unless
/// epsilon > 0, in which case every denominator becomes |t_j| + epsilon.
double rsse(const Eigen::Ref<const Eigen::VectorXd>& achieved, const Eigen::Ref<const Eigen::VectorXd>& targets,
            double epsilon = 0.0);

/// |achieved - target| / |target| * 100, same epsilon rule as rsse.
double percentage_error(double achieved, double target, double epsilon = 0.0);

/// Glucose management indicator (%) from mean glucose in mg/dL.
double gmi(double mean_glucose_mg_dl);

struct CriterionReport {
  std::string feature;
  int order = 1;
  double target = 0.0;
  double achieved = 0.0;
  std::optional<double> expected;
  double percentage_error = 0.0;
};

struct EvaluationReport {
  std::vector<CriterionReport> criteria;
  double rsse = 0.0;
  double pe_mean = 0.0;
  double pe_sd = 0.0;
  double expected_size = 0.0;
  std::optional<Eigen::Index> realized_size;
};

/// Realized moments of the selected rows, one per criterion (own mean and
/// variance as center and scale).
Eigen::VectorXd realized_moments(const Population& pop, const TargetSet& targets, const SelectionMask& mask);

/// Probability-weighted moments centered on the target mean and variance.
Eigen::VectorXd expected_moments(const Population& pop, const TargetSet& targets,
                                 const Eigen::Ref<const Eigen::VectorXd>& p);

EvaluationReport evaluate_selection(const Population& pop, const TargetSet& targets, const SelectionMask& mask,
                                    double rsse_epsilon = 0.0);
EvaluationReport evaluate_selection(const Population& pop, const TargetSet& targets,
                                    const Eigen::Ref<const Eigen::VectorXd>& p, double rsse_epsilon = 0.0);

/// Adds the expected (probability-weighted) moments next to realized ones.
/// Criteria whose expected moment is undefined for this p are left empty.
void attach_expected(EvaluationReport& report, const Population& pop, const TargetSet& targets,
                     const Eigen::Ref<const Eigen::VectorXd>& p);

}  // namespace dsps
