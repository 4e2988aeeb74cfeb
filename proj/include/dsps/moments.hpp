#pragma once

#include <cmath>
#include <optional>
#include <string>

#include <Eigen/Dense>

#include "dsps/error.hpp"

namespace dsps {

namespace detail {

template <typename Scalar>
constexpr Scalar ipow(Scalar base, int k) noexcept {
  Scalar r(1);
  while (k > 0) {
    if (k & 1) r *= base;
    base *= base;
    k >>= 1;
  }
  return r;
}

inline void require_order(int order) {
  if (order < 1) throw Error(ErrorCode::InvalidTarget, "moment order must be >= 1, got " + std::to_string(order));
}

}  // namespace detail

/// Realized moment of `values` under the per-order conventions:
///   k=1 mean, k=2 unbiased variance (divisor n-1), k=3 (1/n)sum(x-c)^3 / s^3,
///   k=4 (1/n)sum(x-c)^4 / s^4 - 3, k>=5 (1/n)sum(x-c)^k.
/// `center` defaults to the sample mean, `scale_var` to the unbiased variance
/// about that center.
template <typename Derived>
typename Derived::Scalar sample_moment(const Eigen::DenseBase<Derived>& values, int order,
                                       std::optional<typename Derived::Scalar> center = std::nullopt,
                                       std::optional<typename Derived::Scalar> scale_var = std::nullopt) {
  using Scalar = typename Derived::Scalar;
  detail::require_order(order);
  const Eigen::Index n = values.size();
  if (n < 1) throw Error(ErrorCode::InsufficientData, "moment of an empty vector");
  const Scalar mean = values.derived().mean();
  if (order == 1) return mean;

  const Scalar c = center.value_or(mean);
  const auto centered = (values.derived().array() - c);
  if (order == 2) {
    if (n < 2) throw Error(ErrorCode::InsufficientData, "variance needs at least 2 values");
    return centered.square().sum() / Scalar(n - 1);
  }

  const Scalar nn = Scalar(n);
  Scalar acc(0);
  for (Eigen::Index i = 0; i < n; ++i) acc += detail::ipow<Scalar>(centered[i], order);
  if (order >= 5) return acc / nn;

  Scalar var;
  if (scale_var) {
    var = *scale_var;
  } else {
    if (n < 2) throw Error(ErrorCode::InsufficientData, "standardized moment needs at least 2 values");
    var = centered.square().sum() / Scalar(n - 1);
  }
  if (!(var > Scalar(0))) throw Error(ErrorCode::ZeroVariance, "standardized moment with zero variance");
  if (order == 3) return acc / nn / (var * std::sqrt(var));
  return acc / nn / (var * var) - Scalar(3);
}

/// Sum of inclusion probabilities, the expected realized size.
template <typename Derived>
typename Derived::Scalar expected_size(const Eigen::DenseBase<Derived>& p) {
  using Scalar = typename Derived::Scalar;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    const Scalar v = p.derived()[i];
    if (!(v >= Scalar(0) && v <= Scalar(1)))
      throw Error(ErrorCode::OutOfRangeProbability, "probability " + std::to_string(double(v)) +
                                                        " at index " + std::to_string(i));
  }
  return p.derived().sum();
}

/// Probability-weighted moment with n_t = sum(p), centered on the target mean
/// exactly as the constraint rows are:
///   k=1 sum(p x)/n_t, k=2 sum(p (x-m)^2)/(n_t-1), k=3 sum(p (x-m)^3)/n_t / v^1.5,
///   k=4 sum(p (x-m)^4)/n_t / v^2 - 3, k>=5 sum(p (x-m)^k)/n_t.
template <typename DerivedX, typename DerivedP>
typename DerivedX::Scalar expected_moment(const Eigen::DenseBase<DerivedX>& values,
                                          const Eigen::DenseBase<DerivedP>& p, int order,
                                          typename DerivedX::Scalar target_mean,
                                          typename DerivedX::Scalar target_var) {
  using Scalar = typename DerivedX::Scalar;
  detail::require_order(order);
  if (values.size() != p.size())
    throw Error(ErrorCode::LengthMismatch, "values and probabilities differ in length");
  const Scalar nt = p.derived().sum();
  if (!(nt > Scalar(0))) throw Error(ErrorCode::DegenerateWeight, "sum of probabilities must be > 0");

  const auto& x = values.derived();
  const auto& w = p.derived();
  if (order == 1) return (w.array() * x.array()).sum() / nt;
  if (order == 2) {
    if (!(nt > Scalar(1))) throw Error(ErrorCode::DegenerateWeight, "variance needs sum of probabilities > 1");
    return (w.array() * (x.array() - target_mean).square()).sum() / (nt - Scalar(1));
  }
  Scalar acc(0);
  for (Eigen::Index i = 0; i < x.size(); ++i) acc += w[i] * detail::ipow<Scalar>(x[i] - target_mean, order);
  if (order >= 5) return acc / nt;
  if (!(target_var > Scalar(0))) throw Error(ErrorCode::ZeroVariance, "target variance must be > 0");
  if (order == 3) return acc / nt / (target_var * std::sqrt(target_var));
  return acc / nt / (target_var * target_var) - Scalar(3);
}

}  // namespace dsps
