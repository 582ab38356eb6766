#include "doctest.h"

#include "khop/hop_cumulants.hpp"
#include "khop/oracles.hpp"

using namespace khop;

namespace {

const VarRegistry& R = registry();
Rational q(long a, long b = 1) { return make_rational(a, b); }
MultiPoly tau() { return MultiPoly::var(R.tau()); }
MultiPoly tau(int i) { return MultiPoly::var(R.tau(i)); }
MultiPoly lam(int i) { return MultiPoly::var(R.lambda(i)); }

MultiPoly unit_diagonal(const MultiPoly& p, int n) {
  std::vector<std::pair<Var, Var>> mapping;
  for (int i = 1; i <= n; ++i) mapping.emplace_back(R.tau(i), R.tau());
  MultiPoly out = rename(p, mapping);
  for (int i = 1; i <= kMaxIndexed; ++i) out = substitute(out, R.lambda(i), 1);
  return out;
}

std::vector<Var> ascending(int n) {
  std::vector<Var> out;
  for (int i = 1; i <= n; ++i) out.push_back(R.tau(i));
  return out;
}

}  // namespace

TEST_CASE("partition-tuple moments: worked cases") {
  CHECK(moment_via_partitions(3, 1) == q(1, 2) * lam(1) * lam(2) * pow(tau(1), 2));
  CHECK(moment_via_partitions(2, 2) == lam(1) * tau(1) + pow(lam(1), 2) * tau(1) * tau(2));
  CHECK(unit_diagonal(moment_via_partitions(3, 2), 2) ==
        q(1, 2) * pow(tau(), 2) + q(2, 3) * pow(tau(), 3) + q(1, 4) * pow(tau(), 4));
  CHECK(moment_via_partitions(1, 3) == MultiPoly(1));
  CHECK_THROWS_AS(moment_via_partitions(5, 1), std::out_of_range);
  CHECK_THROWS_AS(moment_via_partitions(2, 4), std::out_of_range);
}

TEST_CASE("partition-tuple moments match the recursion engine") {
  MomentEngine e;
  for (auto [k, n] : std::vector<std::pair<int, int>>{{2, 1}, {2, 2}, {2, 3}, {3, 1}, {3, 2}, {3, 3}, {4, 1}, {4, 2}}) {
    CAPTURE(k);
    CAPTURE(n);
    CHECK(moment_via_partitions(k, n) == e.flat(k, n));
  }
}

TEST_CASE("written-out moment steps") {
  MomentEngine e;
  for (int k = 2; k <= 3; ++k)
    for (int n = 1; n <= 3; ++n) {
      CAPTURE(k);
      CAPTURE(n);
      CHECK(explicit_moment_step(e, k, ascending(n)) == e.flat(k + 1, n));
    }
  std::vector<Var> same(4, R.tau(1));
  CHECK(explicit_moment_step(e, 2, same) == e.moment(3, {4}).poly);
  std::vector<Var> mixed{R.tau(1), R.tau(1), R.tau(2)};
  CHECK(explicit_moment_step(e, 2, mixed) == e.moment(3, {2, 1}).poly);
}

TEST_CASE("written-out cumulant steps") {
  CumulantEngine c;
  MomentEngine& e = c.moments();
  for (int n = 2; n <= 3; ++n) {
    CAPTURE(n);
    CHECK(explicit_cumulant_step(e, 2, ascending(n)) == c.flat(3, n));
  }
  std::vector<Var> same(4, R.tau(1));
  CHECK(explicit_cumulant_step(e, 2, same) == c.diagonal(3, 4));
  CHECK(explicit_cumulant_step(e, 3, ascending(2)) == c.flat(4, 2));
}

TEST_CASE("written-out steps reject bad arguments") {
  MomentEngine e;
  std::vector<Var> descending{R.tau(2), R.tau(1)};
  CHECK_THROWS_AS(explicit_moment_step(e, 2, descending), std::invalid_argument);
  CHECK_THROWS_AS(explicit_cumulant_step(e, 2, ascending(4)), std::invalid_argument);
  CHECK_THROWS_AS(explicit_moment_step(e, 2, ascending(5)), std::out_of_range);
  CHECK_THROWS_AS(explicit_cumulant_step(e, 2, ascending(1)), std::out_of_range);
}
