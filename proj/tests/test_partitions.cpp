#include "doctest.h"

#include "khop/partitions.hpp"
#include "khop/poly.hpp"

#include <algorithm>
#include <random>
#include <set>

using namespace khop;

namespace {

Rational q(long a, long b = 1) { return make_rational(a, b); }
MultiPoly tau() { return MultiPoly::var(registry().tau()); }
MultiPoly tau(int i) { return MultiPoly::var(registry().tau(i)); }

}  // namespace

TEST_CASE("partition counts") {
  CHECK(set_partitions(1).size() == 1);
  CHECK(set_partitions(3).size() == 5);
  CHECK(set_partitions(4).size() == 15);
  CHECK(stirling2(3, 2) == 3);
  CHECK(stirling2(4, 2) == 7);
  CHECK(bell(5) == 52);
  CHECK_THROWS_AS(set_partitions(0), std::out_of_range);
  CHECK_THROWS_AS(set_partitions(9), std::out_of_range);
}

TEST_CASE("partition enumeration is canonical and complete") {
  for (int n = 1; n <= 8; ++n) {
    const auto& parts = set_partitions(n);
    Integer total = 0;
    for (int l = 1; l <= n; ++l) {
      total += stirling2(n, l);
      auto with_l = std::count_if(parts.begin(), parts.end(), [l](const SetPartition& p) { return static_cast<int>(p.size()) == l; });
      CHECK(Integer(with_l) == stirling2(n, l));
    }
    CHECK(total == bell(n));
    CHECK(Integer(parts.size()) == bell(n));
    std::set<std::vector<std::vector<int>>> seen;
    for (const auto& p : parts) {
      CHECK(p.n() == n);
      for (std::size_t j = 1; j < p.size(); ++j) CHECK(p.block(j - 1).front() < p.block(j).front());
      for (int i = 0; i < n; ++i) {
        const auto& b = p.block(p.block_of(i));
        CHECK(std::find(b.begin(), b.end(), i) != b.end());
      }
      seen.insert(p.blocks());
    }
    CHECK(seen.size() == parts.size());
  }
}

TEST_CASE("join with the top partition") {
  std::vector<int> a{0, 0, 1}, b{0, 1, 1}, c{0, 1, 0}, d{0, 1, 2};
  CHECK(joins_to_top(SetPartition::from_labels(a), SetPartition::from_labels(b)));
  CHECK_FALSE(joins_to_top(SetPartition::from_labels(a), SetPartition::from_labels(d)));
  CHECK_FALSE(joins_to_top(SetPartition::from_labels(a), SetPartition::from_labels(a)));
  CHECK(joins_to_top(SetPartition::from_labels(c), SetPartition::from_labels(b)));
}

TEST_CASE("Poisson moments and cumulants") {
  MultiPoly lam = MultiPoly::var(registry().lambda());
  auto constant = [&](std::span<const int>) { return lam; };
  CHECK(cumulants_to_moments<MultiPoly>(constant, 2) == lam + pow(lam, 2));
  CHECK(cumulants_to_moments<MultiPoly>(constant, 3) == lam + 3 * pow(lam, 2) + pow(lam, 3));
  auto poisson_moment = [&](std::span<const int> s) {
    switch (s.size()) {
      case 1: return lam;
      case 2: return lam + pow(lam, 2);
      default: return lam + 3 * pow(lam, 2) + pow(lam, 3);
    }
  };
  CHECK(moments_to_cumulants<MultiPoly>(poisson_moment, 3) == lam);
}

TEST_CASE("min cumulants give the two-point joint moment") {
  auto min_tau = [](std::span<const int> s) { return tau(*std::min_element(s.begin(), s.end()) + 1); };
  CHECK(cumulants_to_moments<MultiPoly>(min_tau, 2) == tau(1) + tau(1) * tau(2));
}

TEST_CASE("second moment at three hops inverts to the variance") {
  auto m = [](std::span<const int> s) {
    MultiPoly t = tau();
    if (s.size() == 1) return q(1, 2) * pow(t, 2);
    return q(1, 2) * pow(t, 2) + q(2, 3) * pow(t, 3) + q(1, 4) * pow(t, 4);
  };
  CHECK(moments_to_cumulants<MultiPoly>(m, 2) == q(1, 2) * pow(tau(), 2) + q(2, 3) * pow(tau(), 3));
}

TEST_CASE("moment-cumulant round trip on random providers") {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> num(-20, 20), den(1, 9);
  for (int n = 1; n <= 5; ++n) {
    for (int trial = 0; trial < 10; ++trial) {
      std::vector<Rational> kappa(1u << n);
      for (auto& k : kappa) k = q(num(rng), den(rng));
      auto moment = [&](std::span<const int> s) {
        std::vector<int> idx(s.begin(), s.end());
        auto sub = [&](std::span<const int> t) {
          unsigned m = 0;
          for (int j : t) m |= 1u << idx[j];
          return kappa[m];
        };
        return cumulants_to_moments<Rational>(sub, static_cast<int>(idx.size()));
      };
      CHECK(moments_to_cumulants<Rational>(moment, n) == kappa[(1u << n) - 1]);
    }
  }
}
