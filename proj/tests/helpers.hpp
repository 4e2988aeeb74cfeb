#pragma once

#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dsps/error.hpp"
#include "dsps/population.hpp"

namespace testing {

inline dsps::Population make_population(const Eigen::MatrixXd& data, std::vector<std::string> names = {}) {
  std::vector<std::string> ids;
  for (Eigen::Index i = 0; i < data.rows(); ++i) ids.push_back("e" + std::to_string(i + 1));
  if (names.empty())
    for (Eigen::Index j = 0; j < data.cols(); ++j) names.push_back("f" + std::to_string(j + 1));
  return dsps::Population(std::move(ids), std::move(names), data);
}

inline dsps::Population column_population(std::initializer_list<double> values, const std::string& name = "f1") {
  Eigen::MatrixXd d(Eigen::Index(values.size()), 1);
  Eigen::Index i = 0;
  for (double v : values) d(i++, 0) = v;
  return make_population(d, {name});
}

inline Eigen::MatrixXd normal_matrix(std::mt19937_64& gen, Eigen::Index rows, Eigen::Index cols, double mu = 10.0,
                                     double sigma = 2.0) {
  std::normal_distribution<double> nd(mu, sigma);
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = nd(gen);
  return m;
}

inline std::vector<double> to_std(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

template <typename F>
dsps::ErrorCode code_of(F&& f) {
  try {
    f();
  } catch (const dsps::Error& e) {
    return e.code();
  }
  return dsps::ErrorCode::Io;  // sentinel: no error raised
}

}  // namespace testing
