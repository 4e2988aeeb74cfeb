#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace dsps {

/// One moment target (feature, order k, value t). Order 1 is the mean,
/// 2 the unbiased variance, 3 standardized skewness, 4 excess kurtosis,
/// and k >= 5 the raw central moment.
struct TargetCriterion {
  std::string feature;
  int order = 1;
  double value = 0.0;

  friend bool operator==(const TargetCriterion&, const TargetCriterion&) = default;
};

/// Ordered list of criteria. Order of insertion is the constraint row order
/// used by every builder. Validated on construction:
///  - one criterion per (feature, order)
///  - order >= 2 needs the order-1 target of the same feature
///  - order 3 or 4 also needs the order-2 target, which must be > 0
class TargetSet {
 public:
  TargetSet() = default;
  explicit TargetSet(std::vector<TargetCriterion> criteria);

  const std::vector<TargetCriterion>& criteria() const noexcept { return criteria_; }
  std::size_t size() const noexcept { return criteria_.size(); }
  bool empty() const noexcept { return criteria_.empty(); }

  std::optional<double> value(std::string_view feature, int order) const noexcept;
  /// Throws MissingPrerequisiteTarget when absent.
  double mean_of(std::string_view feature) const;
  double variance_of(std::string_view feature) const;

  bool has_order_at_least(int order) const noexcept;

  auto begin() const noexcept { return criteria_.begin(); }
  auto end() const noexcept { return criteria_.end(); }

  friend bool operator==(const TargetSet&, const TargetSet&) = default;

 private:
  std::vector<TargetCriterion> criteria_;
};

}  // namespace dsps
