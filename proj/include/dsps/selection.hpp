#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "dsps/lp/simplex.hpp"
#include "dsps/population.hpp"
#include "dsps/targets.hpp"

namespace dsps {

enum class Mode { Max, MaxStrict, Fixed, Min };

std::string_view to_string(Mode mode) noexcept;
Mode parse_mode(std::string_view text);

inline constexpr double kDefaultEpsilon = 1e-6;
/// Expected sizes below this are too small for sum(p) to approximate the
/// realized size.
inline constexpr double kSmallSampleThreshold = 30.0;

/// Trade-off weights. Unset optionals are resolved automatically from the
/// targets (alpha from trial_size, beta/eta_max from the target magnitudes).
/// beta and eta_max hold one entry per criterion row, in unscaled row units.
struct HyperParams {
  std::optional<double> alpha;
  std::optional<Eigen::VectorXd> beta;
  std::optional<Eigen::VectorXd> eta_max;
  double epsilon = kDefaultEpsilon;
  std::optional<std::int64_t> trial_size;

  bool resolved() const noexcept { return alpha && beta && eta_max; }
};

/// alpha = 0.05 * trial_size; per row j, beta_j = 1/r_j and eta_max_j = alpha * r_j
/// with r_j = row_reference(targets, j, epsilon).
HyperParams auto_hyperparams(const TargetSet& targets, std::int64_t trial_size, double epsilon = kDefaultEpsilon);

/// Fills every unset field of `hyper`. Needs alpha or trial_size.
HyperParams resolve_hyperparams(const HyperParams& hyper, const TargetSet& targets);

/// Magnitude of criterion j in its constraint row's units: |t|+eps, times
/// M2^(3/2) for skewness rows and M2^2 for kurtosis rows.
double row_reference(const TargetSet& targets, std::size_t j, double epsilon = kDefaultEpsilon);

struct RowLabel {
  std::string feature;  // empty for the size row
  int order = 0;        // 0 for the size row

  bool is_size_row() const noexcept { return order == 0; }
  std::string to_string() const;
  friend bool operator==(const RowLabel&, const RowLabel&) = default;
};

/// Unscaled constraint rows A p ~ rhs plus the per-row conditioning factors.
/// The solver works on diag(row_scales) * [A | rhs].
struct ConstraintSystem {
  Eigen::MatrixXd A;
  Eigen::VectorXd rhs;
  std::vector<RowLabel> labels;
  Eigen::VectorXd row_scales;

  Eigen::Index n_rows() const noexcept { return A.rows(); }
  Eigen::MatrixXd scaled_A() const { return row_scales.asDiagonal() * A; }
  Eigen::VectorXd scaled_rhs() const { return row_scales.cwiseProduct(rhs); }
};

/// Moment rows centered on the target mean, all with the size folded in:
///   k=1: x - M1 = 0;  k=2: (x-M1)^2 - M2 = -M2;  k=3: (x-M1)^3 - M2^1.5 M3 = 0;
///   k=4: (x-M1)^4 - M2^2 (M4+3) = 0;  k>=5: (x-M1)^k - Mk = 0.
ConstraintSystem build_lp_system(const Population& pop, const TargetSet& targets,
                                 double epsilon = kDefaultEpsilon);

/// Fixed-size linear system: a leading all-ones row with rhs n_t, then
///   k=1: x = n_t M1;  k=2: (x-M1)^2 = (n_t-1) M2;  k=3: (x-M1)^3 = n_t M2^1.5 M3;
///   k=4: (x-M1)^4 = n_t M2^2 (M4+3);  k>=5: (x-M1)^k = n_t Mk.
ConstraintSystem build_sle_system(const Population& pop, const TargetSet& targets, std::int64_t n_t,
                                  double epsilon = kDefaultEpsilon);

struct SolverSummary {
  lp::Status status = lp::Status::Optimal;
  std::int64_t iterations = 0;
  double objective_value = 0.0;
  double max_residual = 0.0;
};

struct SelectionProbabilities {
  Mode mode = Mode::Max;
  Eigen::VectorXd p;
  /// Slack |A_j p - C_j| per row in unscaled units; empty in strict mode.
  Eigen::VectorXd eta;
  Eigen::VectorXd eta_max;
  std::vector<RowLabel> rows;
  HyperParams hyper;  // fully resolved
  double expected_size = 0.0;
  bool small_sample_warning = false;
  SolverSummary solver;
};

/// Maximum expected size. relaxed=true allows |A p - C| <= eta <= eta_max with
/// penalty sum(beta eta); relaxed=false enforces A p = C exactly.
SelectionProbabilities solve_max_size(const Population& pop, const TargetSet& targets, const HyperParams& hyper,
                                      bool relaxed = true, const lp::OptionsD& options = {});

/// Relaxed system plus the size row sum(p) = n_t with slack bounded by alpha.
/// The objective only penalizes slack.
SelectionProbabilities solve_fixed_size(const Population& pop, const TargetSet& targets, std::int64_t n_t,
                                        const HyperParams& hyper, const lp::OptionsD& options = {});

/// Minimum expected size under the relaxed constraints. Sets
/// small_sample_warning when the result is below kSmallSampleThreshold.
SelectionProbabilities solve_min_size(const Population& pop, const TargetSet& targets, const HyperParams& hyper,
                                      const lp::OptionsD& options = {});

SelectionProbabilities select(const Population& pop, const TargetSet& targets, Mode mode, const HyperParams& hyper,
                              std::optional<std::int64_t> n_t = std::nullopt, const lp::OptionsD& options = {});

}  // namespace dsps
