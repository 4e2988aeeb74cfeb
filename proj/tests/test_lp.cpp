#include <doctest.h>

#include <random>

#include "dsps/error.hpp"
#include "dsps/lp/simplex.hpp"
#include "oracles.hpp"

using namespace dsps;
using lp::Relation;
using lp::Status;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Eigen::VectorXd vec(std::initializer_list<double> v) {
  Eigen::VectorXd out(Eigen::Index(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

lp::ProblemD random_lp(std::mt19937_64& gen) {
  std::uniform_int_distribution<int> nv(1, 6), nr(0, 4), rel(0, 2);
  std::uniform_real_distribution<double> u(-1, 1);
  const int n = nv(gen);
  const int m = nr(gen);
  auto P = lp::ProblemD::box(n, 0.0, 1.0);
  for (int i = 0; i < n; ++i) P.objective[i] = u(gen);
  int eq = 0;
  for (int r = 0; r < m; ++r) {
    Eigen::VectorXd a(n);
    for (int i = 0; i < n; ++i) a[i] = u(gen);
    Relation R = rel(gen) == 0 ? Relation::LE : (rel(gen) == 0 ? Relation::GE : Relation::EQ);
    if (R == Relation::EQ && ++eq > n) R = Relation::LE;
    P.add_row(a, R, u(gen) * 0.5 * n);
  }
  return P;
}

}  // namespace

TEST_CASE("bound-active optimum with no rows") {
  auto P = lp::ProblemD::box(1, 0.0, 1.0);
  P.objective[0] = -1;
  const auto s = lp::solve(P);
  REQUIRE(s.status == Status::Optimal);
  CHECK(s.z[0] == 1.0);
  CHECK(s.objective_value == -1.0);
}

TEST_CASE("tight covering row") {
  auto P = lp::ProblemD::box(2, 0.0, 1.0);
  P.objective = vec({1, 1});
  P.add_row(vec({1, 1}), Relation::GE, 1.0);
  const auto s = lp::solve(P);
  REQUIRE(s.status == Status::Optimal);
  CHECK(s.objective_value == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(s.z.sum() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(s.max_residual <= 1e-9);
}

TEST_CASE("equality rows and free variables") {
  lp::ProblemD P;
  P.objective = vec({1, 2, 0});
  P.lower = vec({-kInf, 0, -kInf});
  P.upper = vec({kInf, 3, kInf});
  P.rows.resize(0, 3);
  P.add_row(vec({1, 1, 0}), Relation::EQ, 2.0);
  P.add_row(vec({1, 0, 1}), Relation::EQ, 0.0);
  P.add_row(vec({1, 0, 0}), Relation::GE, -1.0);
  const auto s = lp::solve(P);
  REQUIRE(s.status == Status::Optimal);
  // x = 2 - y, objective 2 - y + 2y = 2 + y, minimized by y = 0 -> x = 2, w = -2.
  CHECK(s.objective_value == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(s.z[0] == doctest::Approx(2.0));
  CHECK(s.z[2] == doctest::Approx(-2.0));
}

TEST_CASE("infeasible and unbounded are classified") {
  auto P = lp::ProblemD::box(2, 0.0, 1.0);
  P.objective = vec({1, 1});
  P.add_row(vec({1, 1}), Relation::GE, 3.0);
  const auto s = lp::solve(P);
  CHECK(s.status == Status::Infeasible);
  CHECK(s.infeasibility > 0.5);

  auto Q = lp::ProblemD::box(2, 0.0, 1.0);
  Q.add_row(vec({1, 0}), Relation::GE, 0.75);
  Q.add_row(vec({1, 0}), Relation::LE, 0.25);
  CHECK(lp::solve(Q).status == Status::Infeasible);

  lp::ProblemD U;
  U.objective = vec({-1, 0});
  U.lower = vec({0, 0});
  U.upper = vec({kInf, kInf});
  U.rows.resize(0, 2);
  U.add_row(vec({1, -1}), Relation::LE, 1.0);
  CHECK(lp::solve(U).status == Status::Unbounded);

  lp::ProblemD F;
  F.objective = vec({1});
  F.lower = vec({-kInf});
  F.upper = vec({kInf});
  F.rows.resize(0, 1);
  CHECK(lp::solve(F).status == Status::Unbounded);
}

TEST_CASE("dimension errors") {
  auto P = lp::ProblemD::box(2, 0.0, 1.0);
  CHECK_THROWS_AS(P.add_row(vec({1}), Relation::LE, 0.0), Error);
  P.lower[0] = 2.0;
  try {
    lp::solve(P);
    FAIL("expected DimensionMismatch");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DimensionMismatch);
  }
}

TEST_CASE("iteration limit is reported as a status") {
  auto P = lp::ProblemD::box(5, 0.0, 1.0);
  P.objective.setConstant(-1);
  P.add_row(Eigen::VectorXd::Ones(5), Relation::LE, 2.5);
  lp::OptionsD o;
  o.max_iterations = 1;
  CHECK(lp::solve(P, o).status == Status::IterationLimit);
}

TEST_CASE("random small LPs agree with vertex enumeration") {
  std::mt19937_64 gen(2024);
  int optimal = 0, infeasible = 0;
  for (int t = 0; t < 300; ++t) {
    const auto P = random_lp(gen);
    const auto ref = oracle::vertex_enumeration(P);
    const auto s = lp::solve(P);
    if (!ref) {
      CHECK(s.status == Status::Infeasible);
      ++infeasible;
      continue;
    }
    REQUIRE(s.status == Status::Optimal);
    CHECK(std::abs(s.objective_value - *ref) <= 1e-7);
    CHECK(lp::max_violation(P, s.z) <= 1e-9);
    ++optimal;
  }
  CHECK(optimal > 100);
  CHECK(infeasible > 5);
}

TEST_CASE("optimal points beat random feasible points and solves are deterministic") {
  std::mt19937_64 gen(99);
  std::uniform_real_distribution<double> u(0, 1);
  int checked = 0;
  for (int t = 0; t < 40; ++t) {
    const auto P = random_lp(gen);
    const auto s = lp::solve(P);
    const auto again = lp::solve(P);
    CHECK(s.status == again.status);
    if (s.status != Status::Optimal) continue;
    CHECK(s.objective_value == again.objective_value);
    int feasible = 0;
    for (int k = 0; k < 20000 && feasible < 1000; ++k) {
      Eigen::VectorXd z(P.n_vars());
      for (auto& v : z) v = u(gen);
      if (lp::max_violation(P, z) > 0) continue;
      ++feasible;
      CHECK(s.objective_value <= P.objective.dot(z) + 1e-9 * (1 + std::abs(s.objective_value)));
    }
    if (feasible > 0) ++checked;
  }
  CHECK(checked > 5);
}

TEST_CASE("degenerate problem with many tied rows terminates") {
  // Many identical rows through the same vertex invite cycling.
  const int n = 8;
  auto P = lp::ProblemD::box(n, 0.0, 1.0);
  P.objective.setConstant(-1);
  for (int r = 0; r < 12; ++r) {
    Eigen::VectorXd a = Eigen::VectorXd::Zero(n);
    a[r % n] = 1;
    a[(r + 1) % n] = -1;
    P.add_row(a, Relation::LE, 0.0);
    P.add_row(a, Relation::GE, 0.0);
  }
  P.add_row(Eigen::VectorXd::Ones(n), Relation::LE, 4.0);
  const auto s = lp::solve(P);
  REQUIRE(s.status == Status::Optimal);
  CHECK(s.objective_value == doctest::Approx(-4.0).epsilon(1e-12));
  CHECK((s.z.array() - 0.5).abs().maxCoeff() <= 1e-9);
}
