#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace dsps {

/// Binary inclusion vector from one Bernoulli draw.
struct SelectionMask {
  std::vector<std::uint8_t> bits;
  std::uint64_t seed = 0;
  std::uint64_t draw_index = 0;

  Eigen::Index size() const noexcept { return static_cast<Eigen::Index>(bits.size()); }
  Eigen::Index count() const noexcept {
    Eigen::Index n = 0;
    for (auto b : bits) n += b;
    return n;
  }

  static SelectionMask all(Eigen::Index n, bool value) {
    return SelectionMask{std::vector<std::uint8_t>(static_cast<std::size_t>(n), value ? 1 : 0)};
  }

  /// Selection as 0/1 weights, usable wherever probabilities are.
  Eigen::VectorXd as_weights() const {
    Eigen::VectorXd w(size());
    for (Eigen::Index i = 0; i < size(); ++i) w[i] = bits[static_cast<std::size_t>(i)];
    return w;
  }
};

}  // namespace dsps
