#include "dsps/realize.hpp"

#include <cmath>
#include <limits>

#include "dsps/error.hpp"
#include "dsps/evaluate.hpp"
#include "dsps/rng.hpp"

namespace dsps {

SelectionMask draw(const Eigen::Ref<const Eigen::VectorXd>& p, std::uint64_t seed, std::uint64_t draw_index) {
  SelectionMask mask;
  mask.seed = seed;
  mask.draw_index = draw_index;
  mask.bits.resize(static_cast<std::size_t>(p.size()));
  auto gen = rng::substream(seed, draw_index);
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    if (!(p[i] >= 0.0 && p[i] <= 1.0))
      throw Error(ErrorCode::OutOfRangeProbability, "probability at index " + std::to_string(i) + " outside [0, 1]");
    const double r = gen.uniform();
    mask.bits[static_cast<std::size_t>(i)] = p[i] > r ? 1 : 0;
  }
  return mask;
}

BestDraw draw_best(const Eigen::Ref<const Eigen::VectorXd>& p, const Population& pop, const TargetSet& targets,
                   std::int64_t n_draws, std::uint64_t seed, double rsse_epsilon) {
  if (n_draws < 1) throw Error(ErrorCode::InvalidConfig, "need at least one draw");
  if (p.size() != pop.size()) throw Error(ErrorCode::LengthMismatch, "probabilities and population differ in length");

  Eigen::VectorXd target_values(static_cast<Eigen::Index>(targets.size()));
  for (std::size_t j = 0; j < targets.size(); ++j)
    target_values[static_cast<Eigen::Index>(j)] = targets.criteria()[j].value;

  BestDraw out;
  bool have_best = false;
  for (std::int64_t d = 0; d < n_draws; ++d) {
    RealizationResult r;
    r.mask = draw(p, seed, static_cast<std::uint64_t>(d));
    r.size = r.mask.count();
    r.rsse = std::numeric_limits<double>::infinity();
    if (r.size > 0) {
      try {
        r.realized_moments = realized_moments(pop, targets, r.mask);
        r.rsse = rsse(r.realized_moments, target_values, rsse_epsilon);
      } catch (const Error& e) {
        // Too few members (or zero spread) for some moment: unscorable.
        if (e.code() != ErrorCode::InsufficientData && e.code() != ErrorCode::ZeroVariance) throw;
        r.realized_moments.resize(0);
      }
    }
    out.draws.push_back({static_cast<std::uint64_t>(d), r.size, r.rsse});
    if (!std::isfinite(r.rsse)) continue;
    const bool better = !have_best || r.rsse < out.best.rsse || (r.rsse == out.best.rsse && r.size > out.best.size);
    if (better) {
      out.best = std::move(r);
      have_best = true;
    }
  }
  if (!have_best)
    throw Error(ErrorCode::AllDrawsDegenerate, "none of the " + std::to_string(n_draws) + " draws could be scored");
  return out;
}

}  // namespace dsps
