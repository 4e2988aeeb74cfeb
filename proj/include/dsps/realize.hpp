#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "dsps/mask.hpp"
#include "dsps/population.hpp"
#include "dsps/targets.hpp"

namespace dsps {

/// One Bernoulli realization: r_i ~ U[0,1) from substream(seed, draw_index),
/// taken in member order, and b_i = 1 iff p_i > r_i.
SelectionMask draw(const Eigen::Ref<const Eigen::VectorXd>& p, std::uint64_t seed, std::uint64_t draw_index = 0);

struct RealizationResult {
  SelectionMask mask;
  Eigen::Index size = 0;
  Eigen::VectorXd realized_moments;
  double rsse = 0.0;
};

struct DrawDiagnostic {
  std::uint64_t draw_index = 0;
  Eigen::Index size = 0;
  double rsse = 0.0;  // +inf when the draw cannot be scored
};

struct BestDraw {
  RealizationResult best;
  std::vector<DrawDiagnostic> draws;
};

/// Scores draws 0..n_draws-1 by RSSE against the targets and keeps the
/// smallest (ties: larger size, then lower draw index). Draws whose subset is
/// too small for some criterion score +inf. Throws AllDrawsDegenerate.
BestDraw draw_best(const Eigen::Ref<const Eigen::VectorXd>& p, const Population& pop, const TargetSet& targets,
                   std::int64_t n_draws, std::uint64_t seed, double rsse_epsilon = 0.0);

}  // namespace dsps
