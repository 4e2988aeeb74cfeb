#include <doctest.h>

#include <cmath>
#include <random>

#include "dsps/evaluate.hpp"
#include "dsps/moments.hpp"
#include "dsps/realize.hpp"
#include "helpers.hpp"
#include "oracles.hpp"

using namespace dsps;
using testing::code_of;

TEST_CASE("rsse") {
  CHECK(rsse(Eigen::Vector2d(2, 3), Eigen::Vector2d(2, 3)) == 0.0);
  CHECK(rsse(Eigen::VectorXd::Constant(1, 2.0), Eigen::VectorXd::Constant(1, 1.0)) == 1.0);
  CHECK(rsse(Eigen::Vector2d(1.1, 0.9), Eigen::Vector2d(1, 1)) == doctest::Approx(0.02).epsilon(1e-13));
  CHECK(code_of([] { rsse(Eigen::Vector2d(1, 1), Eigen::Vector2d(1, 0)); }) == ErrorCode::ZeroTarget);
  CHECK(rsse(Eigen::Vector2d(1, 0.5), Eigen::Vector2d(1, 0), 1e-6) == doctest::Approx(0.25 / 1e-12));
  CHECK(code_of([] { rsse(Eigen::Vector2d(1, 1), Eigen::VectorXd::Ones(3)); }) == ErrorCode::LengthMismatch);
}

TEST_CASE("percentage_error") {
  CHECK(percentage_error(105, 100) == doctest::Approx(5.0));
  CHECK(percentage_error(-2, -2) == 0.0);
  CHECK(percentage_error(0, 7) == 100.0);
  CHECK(percentage_error(95, -100) == doctest::Approx(195.0));
  CHECK(code_of([] { percentage_error(1, 0); }) == ErrorCode::ZeroTarget);
}

TEST_CASE("gmi") {
  CHECK(gmi(100) == doctest::Approx(5.702).epsilon(1e-12));
  CHECK(gmi(154) == doctest::Approx(6.99368).epsilon(1e-12));
  CHECK(code_of([] { gmi(0); }) == ErrorCode::NonPositiveInput);
  CHECK(code_of([] { gmi(-5); }) == ErrorCode::NonPositiveInput);
}

TEST_CASE("evaluate_selection: exact targets give zero error") {
  std::mt19937_64 gen(1);
  const Population pop = testing::make_population(testing::normal_matrix(gen, 40, 2));
  const SelectionMask all = SelectionMask::all(40, true);
  std::vector<TargetCriterion> crit;
  for (const char* f : {"f1", "f2"}) {
    const Eigen::VectorXd x = feature_column(pop, f);
    for (int k = 1; k <= 4; ++k) crit.push_back({f, k, oracle::moment(testing::to_std(x), k)});
  }
  const TargetSet t(crit);
  const EvaluationReport r = evaluate_selection(pop, t, all);
  CHECK(r.rsse <= 1e-24);
  CHECK(r.pe_mean <= 1e-10);
  CHECK(*r.realized_size == 40);
  CHECK(r.expected_size == 40.0);
}

TEST_CASE("evaluate_selection recomputes in a straight line") {
  std::mt19937_64 gen(2);
  std::bernoulli_distribution coin(0.4);
  for (int trial = 0; trial < 20; ++trial) {
    const Population pop = testing::make_population(testing::normal_matrix(gen, 30, 2));
    SelectionMask m = SelectionMask::all(30, false);
    for (auto& b : m.bits) b = coin(gen);
    m.bits[0] = m.bits[1] = m.bits[2] = 1;
    const TargetSet t({{"f1", 1, 9.0}, {"f1", 2, 3.5}, {"f1", 3, 0.1}, {"f2", 1, 11.0}, {"f2", 2, 5.0}, {"f2", 4, -0.5}});
    const EvaluationReport r = evaluate_selection(pop, t, m);

    std::vector<double> pes;
    double rs = 0;
    for (std::size_t j = 0; j < t.size(); ++j) {
      const auto& c = t.criteria()[j];
      std::vector<double> sel;
      const Eigen::VectorXd col = feature_column(pop, c.feature);
      for (std::size_t i = 0; i < 30; ++i)
        if (m.bits[i]) sel.push_back(col[Eigen::Index(i)]);
      const double a = oracle::moment(sel, c.order);
      CHECK(r.criteria[j].achieved == doctest::Approx(a).epsilon(1e-12));
      rs += std::pow((a - c.value) / c.value, 2);
      pes.push_back(std::abs(a - c.value) / std::abs(c.value) * 100);
    }
    double mean = 0;
    for (double v : pes) mean += v;
    mean /= double(pes.size());
    double ss = 0;
    for (double v : pes) ss += (v - mean) * (v - mean);
    CHECK(r.rsse == doctest::Approx(rs).epsilon(1e-11));
    CHECK(r.pe_mean == doctest::Approx(mean).epsilon(1e-11));
    CHECK(r.pe_sd == doctest::Approx(std::sqrt(ss / double(pes.size() - 1))).epsilon(1e-10));
    CHECK(*r.realized_size == Eigen::Index(m.count()));
  }
}

TEST_CASE("evaluate_selection on probabilities uses expected moments") {
  std::mt19937_64 gen(3);
  const Population pop = testing::make_population(testing::normal_matrix(gen, 25, 1));
  Eigen::VectorXd p = Eigen::VectorXd::Constant(25, 0.6);
  const TargetSet t({{"f1", 1, 10.0}, {"f1", 2, 4.0}, {"f1", 3, 0.2}});
  const EvaluationReport r = evaluate_selection(pop, t, p);
  CHECK(!r.realized_size);
  CHECK(r.expected_size == doctest::Approx(15.0));
  const Eigen::VectorXd x = pop.column(0);
  for (std::size_t j = 0; j < 3; ++j) {
    const auto& c = t.criteria()[j];
    const double ref = oracle::weighted_moment(testing::to_std(x), testing::to_std(p), c.order, 10.0, 4.0);
    CHECK(r.criteria[j].achieved == doctest::Approx(ref).epsilon(1e-12));
    CHECK(*r.criteria[j].expected == r.criteria[j].achieved);
  }
}

TEST_CASE("attach_expected and edge cases") {
  const Population pop = testing::column_population({1, 2, 3, 4});
  const TargetSet t({{"f1", 1, 2.5}});
  EvaluationReport r = evaluate_selection(pop, t, SelectionMask::all(4, true));
  attach_expected(r, pop, t, Eigen::Vector4d(1, 1, 1, 1));
  CHECK(*r.criteria[0].expected == doctest::Approx(2.5));
  CHECK(r.expected_size == 4.0);

  const EvaluationReport e = evaluate_selection(pop, TargetSet(), SelectionMask::all(4, true));
  CHECK(e.rsse == 0.0);
  CHECK(e.pe_mean == 0.0);

  CHECK(code_of([&] { evaluate_selection(pop, t, SelectionMask::all(3, true)); }) == ErrorCode::LengthMismatch);
  CHECK(code_of([&] { evaluate_selection(pop, t, SelectionMask::all(4, false)); }) == ErrorCode::EmptySelection);
  SelectionMask one = SelectionMask::all(4, false);
  one.bits[0] = 1;
  CHECK(code_of([&] { evaluate_selection(pop, TargetSet({{"f1", 1, 2.5}, {"f1", 2, 1.0}}), one); }) ==
        ErrorCode::InsufficientData);
}
