#include "doctest.h"

#include "khop/hop_cumulants.hpp"
#include "khop/variance.hpp"

using namespace khop;

namespace {

const VarRegistry& R = registry();
Rational q(long a, long b = 1) { return make_rational(a, b); }
MultiPoly L(int i) { return MultiPoly::var(R.lambda(i)); }
MultiPoly t(unsigned e) { return MultiPoly::var(R.tau(), e); }

MultiPoly at_unit_tau(const MultiPoly& p) { return substitute(p, R.tau(), 1); }
MultiPoly at_unit_lambda(const MultiPoly& p) { return substitute(p, R.lambda(), 1); }

MultiPoly swap_lambdas(const MultiPoly& p, int k) {
  std::vector<std::pair<Var, Var>> mapping;
  for (int i = 1; i < k; ++i) mapping.emplace_back(R.lambda(i), R.lambda(k - i));
  return rename(p, mapping);
}

MultiPoly cumulant_on_diagonal(CumulantEngine& e, int k) {
  std::vector<std::pair<Var, Var>> mapping{{R.tau(1), R.tau()}, {R.tau(2), R.tau()}};
  return rename(e.flat(k, 2), mapping);
}

}  // namespace

TEST_CASE("general-intensity variance at tau = 1") {
  CHECK(at_unit_tau(variance_general(2)) == L(1));
  CHECK(at_unit_tau(variance_general(3)) == q(1, 2) * L(1) * L(2) + q(2, 6) * (pow(L(1), 2) * L(2) + L(1) * pow(L(2), 2)));
  MultiPoly k4_low = q(1, 6) * L(1) * L(2) * L(3) +
                     q(2, 24) * (pow(L(1), 2) * L(2) * L(3) + L(1) * pow(L(2), 2) * L(3) + L(1) * L(2) * pow(L(3), 2));
  MultiPoly k4 = at_unit_tau(variance_general(4));
  MultiPoly top = k4 - k4_low;
  CHECK(top.total_degree() == 5);
  for (const auto& [m, c] : top.terms()) CHECK(m.degree() == 5);
  CHECK(eval(top, {{R.lambda(1), 1}, {R.lambda(2), 1}, {R.lambda(3), 1}}) == q(2, 15));
  Assignment probe{{R.lambda(1), 2}, {R.lambda(2), 3}, {R.lambda(3), 5}};
  // lambda1^2 lambda2 lambda3^2 and lambda1^2 lambda2^2 lambda3 carry 4/120 and 6/120; the
  // remaining lambda1 lambda2^2 lambda3^2 weight follows from the equal-intensity total 2/15.
  Rational rest = q(2, 15) - q(4, 120) - q(6, 120);
  CHECK(rest == q(6, 120));
  CHECK(eval(top, probe) == q(4, 120) * 4 * 3 * 25 + q(6, 120) * 4 * 9 * 5 + rest * 2 * 9 * 25);
  CHECK(variance_general(2) == L(1) * t(1));
  CHECK_THROWS_AS(variance_general(1), std::out_of_range);
  CHECK_THROWS_AS(variance_general(9), std::out_of_range);
}

TEST_CASE("equal-intensity variance at lambda = 1") {
  std::vector<MultiPoly> equal_rows{
      t(1),
      q(1, 2) * t(2) + q(2, 3) * t(3),
      q(1, 6) * t(3) + q(1, 4) * t(4) + q(2, 15) * t(5),
      q(1, 24) * t(4) + q(1, 15) * t(5) + q(1, 24) * t(6) + q(4, 315) * t(7),
      q(1, 120) * t(5) + q(1, 72) * t(6) + q(1, 105) * t(7) + q(1, 288) * t(8) + q(2, 2835) * t(9),
  };
  for (int k = 2; k <= 6; ++k) CHECK(at_unit_lambda(variance_equal(k)) == equal_rows[k - 2]);
  CHECK(variance_equal(5, 1, 1) == q(1, 24) + q(1, 15) + q(1, 24) + q(4, 315));
  CHECK_THROWS_AS(variance_equal(13), std::out_of_range);
}

TEST_CASE("general and equal forms agree") {
  for (int k = 2; k <= 8; ++k) CHECK(equal_lambdas(variance_general(k)) == variance_equal(k));
}

TEST_CASE("general form is symmetric under reversing the intensities") {
  for (int k = 2; k <= 6; ++k) CHECK(swap_lambdas(variance_general(k), k) == variance_general(k));
}

TEST_CASE("variance matches the cumulant recursion") {
  CumulantEngine e({6, 2});
  for (int k = 2; k <= 6; ++k) {
    CAPTURE(k);
    MultiPoly c2 = cumulant_on_diagonal(e, k);
    CHECK(equal_lambdas(c2) == variance_equal(k));
    CHECK(c2 == variance_general(k));
  }
}

TEST_CASE("second moment is variance plus squared mean") {
  for (int k = 2; k <= 10; ++k) {
    Rational l = q(3, 2), x = q(2, 5);
    Assignment at{{R.lambda(), l}, {R.tau(), x}};
    Rational mean = mean_equal(k, l, x);
    CHECK(eval(second_moment_equal(k), at) == eval(variance_equal(k), at) + mean * mean);
  }
  CumulantEngine e;
  MultiPoly m2 = collapse(e.moments().moment(3, {2}), R.tau());
  CHECK(equal_lambdas(m2) == second_moment_equal(3));
}

TEST_CASE("asymptotic variance") {
  for (int k = 2; k <= 12; ++k) {
    Rational lead = 0;
    MultiPoly v = variance_equal(k);
    for (const auto& [m, c] : v.terms())
      if (m.degree() == 2u * (2 * k - 3)) lead = c;
    CHECK(lead == pow(Rational(2), 2 * k - 3) / Rational(2 * factorial(2 * k - 3)));
  }
  CHECK(variance_asymptotic(2, 3, q(1, 2)) == q(3, 2));
  CHECK(variance_asymptotic(2, 3, q(1, 2)) == variance_equal(2, 3, q(1, 2)));
  CHECK(variance_asymptotic(3, 1, 1) == q(2, 3));
  Rational ratio = variance_equal(4, 10000, 1) / variance_asymptotic(4, 10000, 1);
  CHECK(abs(ratio - 1) <= q(1, 1000));
}
