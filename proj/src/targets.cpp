#include "dsps/targets.hpp"

#include <cmath>
#include <set>
#include <utility>

#include "dsps/error.hpp"

namespace dsps {

TargetSet::TargetSet(std::vector<TargetCriterion> criteria) : criteria_(std::move(criteria)) {
  std::set<std::pair<std::string, int>> seen;
  for (const auto& c : criteria_) {
    const std::string tag = c.feature + "^" + std::to_string(c.order);
    if (c.feature.empty()) throw Error(ErrorCode::InvalidTarget, "criterion without a feature name");
    if (c.order < 1) throw Error(ErrorCode::InvalidTarget, tag + ": order must be >= 1");
    if (!std::isfinite(c.value)) throw Error(ErrorCode::InvalidTarget, tag + ": value must be finite");
    if (c.order == 2 && c.value < 0) throw Error(ErrorCode::InvalidTarget, tag + ": variance target must be >= 0");
    if (!seen.emplace(c.feature, c.order).second) throw Error(ErrorCode::DuplicateTarget, tag + " given twice");
  }
  for (const auto& c : criteria_) {
    const std::string tag = c.feature + "^" + std::to_string(c.order);
    if (c.order >= 2 && !seen.contains({c.feature, 1}))
      throw Error(ErrorCode::MissingPrerequisiteTarget, tag + " needs a mean target for '" + c.feature + "'");
    if (c.order == 3 || c.order == 4) {
      const auto var = value(c.feature, 2);
      if (!var) throw Error(ErrorCode::MissingPrerequisiteTarget, tag + " needs a variance target for '" + c.feature + "'");
      if (!(*var > 0)) throw Error(ErrorCode::ZeroVariance, tag + " needs a positive variance target");
    }
  }
}

std::optional<double> TargetSet::value(std::string_view feature, int order) const noexcept {
  for (const auto& c : criteria_)
    if (c.order == order && c.feature == feature) return c.value;
  return std::nullopt;
}

double TargetSet::mean_of(std::string_view feature) const {
  if (auto v = value(feature, 1)) return *v;
  throw Error(ErrorCode::MissingPrerequisiteTarget, "no mean target for '" + std::string(feature) + "'");
}

double TargetSet::variance_of(std::string_view feature) const {
  if (auto v = value(feature, 2)) return *v;
  throw Error(ErrorCode::MissingPrerequisiteTarget, "no variance target for '" + std::string(feature) + "'");
}

bool TargetSet::has_order_at_least(int order) const noexcept {
  for (const auto& c : criteria_)
    if (c.order >= order) return true;
  return false;
}

}  // namespace dsps
