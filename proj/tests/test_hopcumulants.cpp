#include "doctest.h"

#include "khop/hop_cumulants.hpp"

#include <algorithm>
#include <cmath>
#include <map>

using namespace khop;

namespace {

const VarRegistry& R = registry();
Rational q(long a, long b = 1) { return make_rational(a, b); }
MultiPoly tau() { return MultiPoly::var(R.tau()); }
MultiPoly tau(int i) { return MultiPoly::var(R.tau(i)); }
MultiPoly lam(int i) { return MultiPoly::var(R.lambda(i)); }
MultiPoly u(int i) { return MultiPoly::var(R.bound(i)); }
MultiPoly t(unsigned e) { return pow(tau(), e); }

MultiPoly unit_lambdas(const MultiPoly& p) {
  MultiPoly out = p;
  for (int i = 1; i <= kMaxIndexed; ++i) out = substitute(out, R.lambda(i), 1);
  return out;
}

MultiPoly on_diagonal(const MultiPoly& p, int n) {
  std::vector<std::pair<Var, Var>> mapping;
  for (int i = 1; i <= n; ++i) mapping.emplace_back(R.tau(i), R.tau());
  return rename(p, mapping);
}

// Sum over flat partitions sigma with sigma v grouping = top, coefficient one each.
std::vector<FlatCumulantTerm> connected(const SetPartition& grouping) {
  std::vector<FlatCumulantTerm> out;
  for (const auto& sigma : set_partitions(grouping.n()))
    if (joins_to_top(sigma, grouping)) out.push_back({Integer(1), sigma.blocks()});
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.blocks < b.blocks; });
  return out;
}

}  // namespace

TEST_CASE("power reduction") {
  std::vector<int> sq{2};
  auto terms = power_reduce(sq);
  REQUIRE(terms.size() == 2);
  CHECK(terms[0] == FlatCumulantTerm{Integer(1), {{0}, {1}}});
  CHECK(terms[1] == FlatCumulantTerm{Integer(1), {{0, 1}}});
  for (int n = 1; n <= 6; ++n)
    for (const auto& grouping : set_partitions(n)) {
      auto got = power_reduce(grouping);
      std::sort(got.begin(), got.end(), [](const auto& a, const auto& b) { return a.blocks < b.blocks; });
      CHECK(got == connected(grouping));
    }
}

TEST_CASE("first cumulant of a power is the moment") {
  CumulantEngine e;
  MomentEngine& m = e.moments();
  for (int k = 1; k <= 4; ++k) {
    CHECK(e.cumulant(k, {2}) == m.moment(k, {2}));
    CHECK(e.cumulant(k, {3}) == m.moment(k, {3}));
    CHECK(e.cumulant(k, {1}) == m.moment(k, {1}));
  }
  MultiPoly lt = lam(1) * tau(1);
  CHECK(e.cumulant(2, {2}).poly == lt + lt * lt);
}

TEST_CASE("two-hop joint cumulants are the minimum") {
  CumulantEngine e;
  CHECK(e.cumulant(2, {1, 1}).poly == lam(1) * tau(1));
  for (int n = 1; n <= 5; ++n) CHECK(e.flat(2, n) == lam(1) * tau(1));
  CHECK(e.cumulant_from_moments(2, 4).poly == lam(1) * tau(1));
}

TEST_CASE("three-hop second cumulant by hand") {
  Var u1 = R.bound(1), u2 = R.bound(2);
  MultiPoly single = definite_integral((lam(1) * u(1) + pow(lam(1), 2) * pow(u(1), 2)) * lam(2), u1, 0, tau());
  MultiPoly min_square = 2 * definite_integral(definite_integral(u(1), u1, 0, u(2)), u2, 0, tau());
  MultiPoly expected = single + lam(1) * pow(lam(2), 2) * min_square;
  CHECK(expected == q(1, 2) * lam(1) * lam(2) * t(2) + q(1, 3) * pow(lam(1), 2) * lam(2) * t(3) +
                        q(1, 3) * lam(1) * pow(lam(2), 2) * t(3));
  CumulantEngine e;
  CHECK(on_diagonal(e.flat(3, 2), 2) == expected);
  CHECK(on_diagonal(e.diagonal(3, 2), 1) == expected);
}

TEST_CASE("three-hop cumulants at coincident arguments") {
  CumulantEngine e;
  std::vector<MultiPoly> three_hop{
      q(1, 2) * t(2),
      q(1, 2) * t(2) + q(2, 3) * t(3),
      q(1, 2) * t(2) + 2 * t(3) + q(7, 4) * t(4),
      q(1, 2) * t(2) + q(14, 3) * t(3) + q(23, 2) * t(4) + q(36, 5) * t(5),
      q(1, 2) * t(2) + 10 * t(3) + q(215, 4) * t(4) + 86 * t(5) + 41 * t(6),
  };
  for (int n = 1; n <= 5; ++n) {
    CHECK(unit_lambdas(on_diagonal(e.flat(3, n), n)) == three_hop[n - 1]);
    CHECK(unit_lambdas(on_diagonal(e.diagonal(3, n), 1)) == three_hop[n - 1]);
  }
}

TEST_CASE("four-hop cumulants at coincident arguments") {
  CumulantEngine e;
  std::vector<MultiPoly> four_hop{
      q(1, 6) * t(3),
      q(1, 6) * t(3) + q(1, 4) * t(4) + q(2, 15) * t(5),
      q(1, 6) * t(3) + q(3, 4) * t(4) + q(5, 4) * t(5) + q(9, 10) * t(6) + q(69, 280) * t(7),
  };
  for (int n = 1; n <= 3; ++n) CHECK(unit_lambdas(on_diagonal(e.diagonal(4, n), 1)) == four_hop[n - 1]);
  CHECK(unit_lambdas(on_diagonal(e.cumulant_from_moments(4, 2).poly, 2)) == four_hop[1]);
}

TEST_CASE("recursion agrees with moment inversion") {
  CumulantEngine e;
  for (int k = 1; k <= 3; ++k)
    for (int n = 1; n <= 4; ++n) {
      CAPTURE(k);
      CAPTURE(n);
      CHECK(e.cumulant(k, std::vector<int>(n, 1)) == e.cumulant_from_moments(k, n));
    }
  CHECK(e.cumulant_from_moments(3, 2).poly == e.flat(3, 2));
}

TEST_CASE("cumulants of powers against moment combinations") {
  CumulantEngine e;
  MomentEngine& m = e.moments();
  // kappa(X^2, Y) = E[X^2 Y] - E[X^2] E[Y] with X, Y at tau1 <= tau2.
  for (int k = 2; k <= 4; ++k) {
    MultiPoly mixed = m.moment(k, {2, 1}).poly;
    MultiPoly x2 = m.moment(k, {2}).poly;
    MultiPoly y = rename(m.moment(k, {1}).poly, std::vector<std::pair<Var, Var>>{{R.tau(1), R.tau(2)}});
    CHECK(e.cumulant(k, {2, 1}).poly == mixed - x2 * y);
  }
}

TEST_CASE("cumulant bound") {
  CHECK(cumulant_bound(2, 3, 1, 1) == 4);
  CHECK(cumulant_bound(3, 2, 1, 1) == 128);
  CHECK(cumulant_bound(4, 2, 5, 0) == 0);
  CHECK_THROWS_AS(cumulant_bound(1, 2, 1, 1), std::invalid_argument);
  CumulantEngine e;
  CHECK(diagonal_cumulant_at(e, 3, 2, 1, 1) == q(7, 6));
  CHECK(diagonal_cumulant_at(e, 3, 2, 1, 1) <= cumulant_bound(3, 2, 1, 1));
  CHECK(diagonal_cumulant_at(e, 2, 4, 3, q(1, 2)) == q(3, 2));
}

TEST_CASE("skewness and kurtosis") {
  CumulantEngine e;
  Skewness s2 = skewness(e, 2, 3, q(1, 2));
  CHECK(s2.c3_squared / s2.c2_cubed == q(2, 3));
  Skewness s3 = skewness(e, 3, 1, 1);
  CHECK(s3.c3_squared == q(17, 4) * q(17, 4));
  CHECK(s3.c2_cubed == q(7, 6) * q(7, 6) * q(7, 6));
  CHECK(s3.value == doctest::Approx(3.373).epsilon(1e-3));
  double ratio = skewness(e, 3, 10000, 1).value / skewness(e, 3, 40000, 1).value;
  CHECK(std::abs(ratio - 2) <= 0.1);
  CHECK(excess_kurtosis(e, 2, 4, 1).value == q(1, 4));
  CHECK_THROWS_AS(skewness(e, 3, 0, 1), std::domain_error);
}

TEST_CASE("cumulant limits") {
  CumulantEngine e;
  CHECK_THROWS_AS(e.cumulant(6, {1}), std::out_of_range);
  CHECK_THROWS_AS(e.cumulant(3, {4, 3}), std::out_of_range);
  CHECK_THROWS_AS(e.cumulant(3, {0}), std::invalid_argument);
}
