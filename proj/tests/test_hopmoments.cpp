#include "doctest.h"

#include "khop/hop_moments.hpp"
#include "khop/partitions.hpp"

#include <algorithm>
#include <numeric>
#include <random>

using namespace khop;

namespace {

const VarRegistry& R = registry();
Rational q(long a, long b = 1) { return make_rational(a, b); }
MultiPoly tau() { return MultiPoly::var(R.tau()); }
MultiPoly tau(int i) { return MultiPoly::var(R.tau(i)); }
MultiPoly lam(int i) { return MultiPoly::var(R.lambda(i)); }
MultiPoly t(unsigned e) { return pow(tau(), e); }

MultiPoly unit_lambdas(const MultiPoly& p) {
  MultiPoly out = p;
  for (int i = 1; i <= kMaxIndexed; ++i) out = substitute(out, R.lambda(i), 1);
  return out;
}

MultiPoly diagonal(const ChamberPoly& c) { return unit_lambdas(collapse(c, R.tau())); }

std::vector<std::vector<int>> compositions(int n) {
  if (n == 0) return {{}};
  std::vector<std::vector<int>> out;
  for (int first = 1; first <= n; ++first)
    for (auto rest : compositions(n - first)) {
      rest.insert(rest.begin(), first);
      out.push_back(rest);
    }
  return out;
}

}  // namespace

TEST_CASE("two-hop joint moments are Poisson moments of nested counts") {
  MomentEngine e;
  CHECK(e.moment(2, {1, 1}).poly == lam(1) * tau(1) + pow(lam(1), 2) * tau(1) * tau(2));
  CHECK(e.moment(2, {1, 1}).chain == std::vector<Var>{R.tau(1), R.tau(2)});
  CHECK(e.moment(1, {3}).poly == MultiPoly(1));
  std::vector<MultiPoly> two_hop{
      tau(1),
      tau(1) + tau(1) * tau(2),
      tau(1) + tau(1) * tau(3) + 2 * tau(1) * tau(2) + tau(1) * tau(2) * tau(3),
      tau(1) + tau(1) * tau(4) + 2 * tau(1) * tau(3) + 4 * tau(1) * tau(2) + tau(1) * tau(3) * tau(4) +
          2 * tau(1) * tau(2) * tau(4) + 3 * tau(1) * tau(2) * tau(3) + tau(1) * tau(2) * tau(3) * tau(4),
  };
  for (int n = 1; n <= 4; ++n) CHECK(unit_lambdas(e.flat(2, n)) == two_hop[n - 1]);
}

TEST_CASE("three-hop moments at coincident arguments") {
  MomentEngine e;
  std::vector<MultiPoly> three_hop{
      q(1, 2) * t(2),
      q(1, 2) * t(2) + q(2, 3) * t(3) + q(1, 4) * t(4),
      q(1, 2) * t(2) + 2 * t(3) + q(5, 2) * t(4) + t(5) + q(1, 8) * t(6),
      q(1, 2) * t(2) + q(14, 3) * t(3) + q(53, 4) * t(4) + q(66, 5) * t(5) + q(67, 12) * t(6) + t(7) + q(1, 16) * t(8),
  };
  for (int n = 1; n <= 4; ++n) CHECK(diagonal(e.moment(3, {n})) == three_hop[n - 1]);
}

TEST_CASE("four-hop moments") {
  MomentEngine e;
  CHECK(e.moment(4, {1}).poly == q(1, 6) * lam(1) * lam(2) * lam(3) * pow(tau(1), 3));
  std::vector<MultiPoly> four_hop{
      q(1, 6) * t(3),
      q(1, 6) * t(3) + q(1, 4) * t(4) + q(2, 15) * t(5) + q(1, 36) * t(6),
      q(1, 6) * t(3) + q(3, 4) * t(4) + q(5, 4) * t(5) + q(59, 60) * t(6) + q(13, 35) * t(7) + q(1, 15) * t(8) +
          q(1, 216) * t(9),
  };
  for (int n = 1; n <= 3; ++n) CHECK(diagonal(e.moment(4, {n})) == four_hop[n - 1]);
}

TEST_CASE("moment values") {
  MomentEngine e;
  std::vector<Rational> ones{1, 1, 1}, unit{1};
  CHECK(moment_at(e, 3, ones, unit).value == q(49, 8));
  std::vector<Rational> pair{q(1, 2), 1};
  MomentValue v = moment_at(e, 2, pair, unit);
  CHECK(v.value == 1);
  CHECK_FALSE(v.resorted);
  std::vector<Rational> swapped{1, q(1, 2)};
  v = moment_at(e, 2, swapped, unit);
  CHECK(v.value == 1);
  CHECK(v.resorted);
  for (int k = 2; k <= 4; ++k) {
    std::vector<Rational> zeros{0, 0};
    CHECK(moment_at(e, k, zeros, unit).value == 0);
  }
  std::vector<Rational> negative{q(-1, 2)};
  CHECK_THROWS_AS(moment_at(e, 3, negative, unit), std::invalid_argument);
  std::vector<Rational> bad_lambdas{1, 2, 3};
  CHECK_THROWS_AS(moment_at(e, 3, unit, bad_lambdas), std::invalid_argument);
}

TEST_CASE("moment bound") {
  MomentEngine e;
  Rational l = q(3, 2), x = q(2, 3);
  CHECK(moment_bound(2, 1, l, x) == l * x);
  auto poisson_third = [](std::span<const int>) { return Rational(1); };
  Rational third = cumulants_to_moments<Rational>(poisson_third, 3);
  CHECK(moment_bound(3, 3, 1, 1) == third * third);
  CHECK(moment_bound(3, 3, 1, 1) == 25);
  std::vector<Rational> ones{1, 1, 1}, unit{1};
  CHECK(moment_at(e, 3, ones, unit).value <= moment_bound(3, 3, 1, 1));
  CHECK(moment_bound(4, 0, 5, 5) == 1);
}

TEST_CASE("limits and bad keys are rejected") {
  MomentEngine e;
  CHECK_THROWS_AS(e.moment(6, {1}), std::out_of_range);
  CHECK_THROWS_AS(e.moment(3, {4, 3}), std::out_of_range);
  CHECK_THROWS_AS(e.moment(0, {1}), std::invalid_argument);
  CHECK_THROWS_AS(e.moment(3, {0}), std::invalid_argument);
  MomentEngine wide({6, 2});
  CHECK(wide.moment(6, {1}).poly.total_degree() == 5 + 5);
}

TEST_CASE("distinct-argument entries specialise to grouped keys") {
  MomentEngine e;
  for (int k = 1; k <= 4; ++k)
    for (int n = 1; n <= 4; ++n)
      for (const auto& mults : compositions(n)) {
        CAPTURE(k);
        CAPTURE(n);
        CHECK(e.moment(k, mults) == e.moment_by_substitution(k, mults));
      }
}

TEST_CASE("memoised entries respect the degree bound") {
  MomentEngine e;
  e.prepare(4, 4);
  e.moment(4, {2, 1});
  e.moment(3, {1, 3});
  auto entries = e.entries();
  CHECK(entries.size() > 10);
  for (const auto& [key, cp] : entries) {
    const auto& [k, mults] = key;
    unsigned total = 0;
    for (const auto& [m, c] : cp.poly.terms()) {
      unsigned d = 0;
      for (Var v : cp.chain) d += m[v];
      total = std::max(total, d);
    }
    CHECK(total == static_cast<unsigned>((k - 1) * std::accumulate(mults.begin(), mults.end(), 0)));
    // On the chamber, v_j also absorbs the mins with every later argument.
    for (std::size_t j = 0; j < mults.size(); ++j) {
      int tail = std::accumulate(mults.begin() + static_cast<long>(j), mults.end(), 0);
      CHECK(cp.poly.degree_in(cp.chain[j]) <= static_cast<unsigned>((k - 1) * tail));
    }
    CHECK(cp.poly.degree_in(cp.chain.back()) <= static_cast<unsigned>((k - 1) * mults.back()));
  }
}

TEST_CASE("moment values are symmetric and nonnegative") {
  MomentEngine e;
  std::mt19937_64 rng(31);
  std::uniform_int_distribution<int> num(0, 12);
  for (int trial = 0; trial < 40; ++trial) {
    int k = 2 + trial % 3;
    std::vector<Rational> taus;
    for (int i = 0; i < 4; ++i) taus.push_back(make_rational(num(rng), 12));
    std::vector<Rational> lambdas;
    for (int i = 1; i < k; ++i) lambdas.push_back(make_rational(1 + num(rng), 4));
    Rational base = moment_at(e, k, taus, lambdas).value;
    CHECK(base >= 0);
    std::shuffle(taus.begin(), taus.end(), rng);
    CHECK(moment_at(e, k, taus, lambdas).value == base);
  }
}
