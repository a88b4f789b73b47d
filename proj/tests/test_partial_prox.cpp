#include <doctest.h>

#include <algorithm>
#include <numeric>

#include "oracles.hpp"
#include "partialreg/partial_prox.hpp"
#include "partialreg/rng.hpp"

using namespace partialreg;

namespace {

Eigen::VectorXd vec(std::initializer_list<double> v) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

Eigen::VectorXd random_vector(Rng& rng, Eigen::Index n, double scale = 10.0) {
  Eigen::VectorXd a(n);
  for (Eigen::Index i = 0; i < n; ++i) a(i) = rng.uniform(-scale, scale);
  return a;
}

}  // namespace

TEST_CASE("phi_partial_value examples") {
  CHECK(phi_partial_value({Regularizer::l1(), 2, 1.0}, vec({0, 0, 1, 2, 3})) == 1.0);
  CHECK(phi_partial_value({Regularizer::l1(), 0, 1.0}, vec({1, -2, 3})) == 6.0);
  for (auto kind : {RegKind::L1, RegKind::Lq, RegKind::Log, RegKind::CappedL1, RegKind::MCP, RegKind::SCAD})
    CHECK(phi_partial_value({Regularizer::with_defaults(kind), 2, 1.0}, vec({5, -7, 0})) == 0.0);
  CHECK(phi_partial_value({Regularizer::l1(), 1, 2.5}, vec({1, -2, 3})) == doctest::Approx(7.5));
  CHECK_THROWS_AS(phi_partial_value({Regularizer::l1(), 3, 1.0}, vec({1, 2, 3})), std::domain_error);
}

TEST_CASE("partial prox examples") {
  const PartialRegularizer l1r1{Regularizer::l1(), 1, 1.0};
  const auto sel = partial_prox(l1r1, vec({3, 1, 2}), 1.0);
  CHECK(sel.shrunk_indices == std::vector<std::size_t>{1, 2});
  CHECK(sel.kept_indices == std::vector<std::size_t>{0});
  CHECK((sel.solution - vec({3, 0, 1})).norm() < 1e-15);

  const auto big = partial_prox({Regularizer::l1(), 2, 1.0}, vec({5, 4, 0.1}), 10.0);
  CHECK((big.solution - vec({5, 4, 0})).norm() < 1e-15);

  Rng rng(3);
  const auto a = random_vector(rng, 6);
  const auto full = partial_prox({Regularizer::scad(), 0, 1.0}, a, 0.8);
  for (Eigen::Index i = 0; i < a.size(); ++i)
    CHECK(full.solution(i) == scalar_prox(Regularizer::scad(), a(i), 0.8).minimizer);

  CHECK_THROWS_AS(partial_prox({Regularizer::l1(), 3, 1.0}, vec({1, 2, 3}), 1.0), std::domain_error);
  CHECK_THROWS_AS(partial_prox(l1r1, vec({1, 2, 3}), -1.0), std::domain_error);
  CHECK(partial_prox(l1r1, vec({1, 2, 3}), 0.0).solution == vec({1, 2, 3}));
}

TEST_CASE("selection tie-break shrinks the smaller index") {
  const auto idx = smallest_magnitude_indices(vec({2, -2, 2, 1}), 2);
  CHECK(idx == std::vector<std::size_t>{0, 3});
}

TEST_CASE("partial prox matches subset enumeration") {
  Rng rng(77);
  for (auto kind : {RegKind::L1, RegKind::Lq, RegKind::Log, RegKind::CappedL1, RegKind::MCP, RegKind::SCAD}) {
    const Regularizer phi = Regularizer::with_defaults(kind);
    for (Eigen::Index n = 2; n <= 6; ++n) {
      for (std::size_t r = 0; r < static_cast<std::size_t>(n); ++r) {
        for (int s = 0; s < 5; ++s) {
          const auto a = random_vector(rng, n);
          const double step = 5.0 * rng.uniform_open();
          const auto sel = partial_prox({phi, r, 1.0}, a, step);
          const double got = oracle::partial_prox_objective(phi, r, step, a, sel.solution);
          CHECK(std::abs(got - oracle::partial_prox_bruteforce(phi, r, step, a)) <= 1e-10);

          // Objective consistency: equals the sum of ν over the shrunk set.
          double nu_sum = 0.0;
          for (auto i : sel.shrunk_indices)
            nu_sum += scalar_prox(phi, a(static_cast<Eigen::Index>(i)), step).value;
          CHECK(got == doctest::Approx(nu_sum).epsilon(1e-10));
        }
      }
    }
  }
}

TEST_CASE("partial prox equivariance and fixed points") {
  Rng rng(8);
  const PartialRegularizer preg{Regularizer::mcp(), 2, 1.0};
  for (int trial = 0; trial < 50; ++trial) {
    const auto a = random_vector(rng, 7);
    const double step = rng.uniform(0.1, 3.0);
    const auto base = partial_prox(preg, a, step).solution;

    std::vector<Eigen::Index> perm(7);
    std::iota(perm.begin(), perm.end(), 0);
    for (std::size_t i = perm.size() - 1; i > 0; --i)
      std::swap(perm[i], perm[rng.below(i + 1)]);
    Eigen::VectorXd pa(7);
    for (Eigen::Index i = 0; i < 7; ++i) pa(i) = a(perm[static_cast<std::size_t>(i)]);
    const auto permuted = partial_prox(preg, pa, step).solution;
    for (Eigen::Index i = 0; i < 7; ++i) CHECK(permuted(i) == base(perm[static_cast<std::size_t>(i)]));

    CHECK(partial_prox(preg, -a, step).solution == -base);
  }
  const auto sparse = vec({0, 3, 0, -4, 0});
  CHECK(partial_prox(preg, sparse, 2.0).solution == sparse);
}
