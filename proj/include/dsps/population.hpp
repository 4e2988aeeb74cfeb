#pragma once

#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace dsps {

struct SelectionMask;

/// Parent population: one row per member, one column per numeric feature.
/// Immutable after construction; the constructor enforces every invariant
/// (rectangular, finite, unique ids and names, at least one row and column).
class Population {
 public:
  Population(std::vector<std::string> member_ids, std::vector<std::string> feature_names,
             Eigen::MatrixXd data);

  Eigen::Index size() const noexcept { return data_.rows(); }
  Eigen::Index n_features() const noexcept { return data_.cols(); }

  const std::vector<std::string>& member_ids() const noexcept { return member_ids_; }
  const std::vector<std::string>& feature_names() const noexcept { return feature_names_; }
  const Eigen::MatrixXd& data() const noexcept { return data_; }

  /// Column position of `name`; throws UnknownFeature.
  Eigen::Index feature_index(std::string_view name) const;
  bool has_feature(std::string_view name) const noexcept;

  auto column(Eigen::Index j) const { return data_.col(j); }

  friend bool operator==(const Population&, const Population&) = default;

 private:
  std::vector<std::string> member_ids_;
  std::vector<std::string> feature_names_;
  Eigen::MatrixXd data_;
};

Population load_population(std::istream& source);
Population load_population_file(const std::string& path);

/// Writes the CSV form read by load_population, with round-trip precision.
void write_population(std::ostream& out, const Population& pop);

Eigen::VectorXd feature_column(const Population& pop, std::string_view name);

/// Rows with mask bit set, original order. Throws LengthMismatch or EmptySelection.
Population subset(const Population& pop, const SelectionMask& mask);

/// Rows at the given positions, in the given order.
Population subset_rows(const Population& pop, std::span<const Eigen::Index> rows);

}  // namespace dsps
