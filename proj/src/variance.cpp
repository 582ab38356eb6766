#include "khop/variance.hpp"

#include <functional>
#include <stdexcept>
#include <vector>

namespace khop {

namespace {

void for_each_composition(int total, int parts, const std::function<void(const std::vector<int>&)>& visit) {
  std::vector<int> j(parts, 0);
  std::function<void(int, int)> rec = [&](int pos, int left) {
    if (pos == parts - 1) {
      j[pos] = left;
      visit(j);
      return;
    }
    for (int v = 0; v <= left; ++v) {
      j[pos] = v;
      rec(pos + 1, left - v);
    }
  };
  rec(0, total);
}

MultiPoly equal_sum(int k, int l_max) {
  const auto& reg = registry();
  MultiPoly x = MultiPoly::var(reg.lambda()) * MultiPoly::var(reg.tau());
  MultiPoly total;
  for (int l = 0; l <= l_max; ++l) {
    // Gamma((k-1-l)/2 + 1) / Gamma((k-1+l)/2 + 1) = 1 / prod_{i=1}^{l} ((k-1-l)/2 + i)
    Rational ratio = 1;
    for (int i = 1; i <= l; ++i) ratio /= make_rational(k - 1 - l, 2) + i;
    Rational coeff = Rational(binomial(k - 1, l)) * ratio / Rational(factorial(k - 1));
    total += pow(x, static_cast<unsigned>(k - 1 + l)) * coeff;
  }
  return total;
}

}  // namespace

MultiPoly variance_general(int k) {
  if (k < 2 || k > 8) throw std::out_of_range("variance_general needs 2 <= k <= 8");
  const auto& reg = registry();
  MultiPoly total;
  for (int l = 1; l <= k - 1; ++l) {
    std::vector<Term> inner;
    for_each_composition(k - 1 - l, l + 1, [&](const std::vector<int>& j) {
      Monomial m;
      for (int i = 1; i <= k - 1; ++i) m.exp[reg.lambda(i).id] = 2;
      int prefix = 0;
      Integer coeff = 1;
      for (int q = 1; q <= l; ++q) {
        prefix += j[q - 1];
        --m.exp[reg.lambda(prefix + q).id];
      }
      for (int p = 0; p <= l; ++p) coeff *= binomial(2 * j[p], j[p]);
      inner.emplace_back(m, Rational(coeff));
    });
    Rational scale = 1 / Rational(factorial(2 * k - 2 - l));
    total += MultiPoly::from_terms(std::move(inner)) * MultiPoly::var(reg.tau(), 2 * k - 2 - l) * scale;
  }
  return total;
}

MultiPoly variance_equal(int k) {
  if (k < 2 || k > 12) throw std::out_of_range("variance_equal needs 2 <= k <= 12");
  return equal_sum(k, k - 2);
}

Rational variance_equal(int k, const Rational& lambda, const Rational& tau) {
  return eval(variance_equal(k), {{registry().lambda(), lambda}, {registry().tau(), tau}});
}

MultiPoly second_moment_equal(int k) {
  if (k < 2 || k > 12) throw std::out_of_range("second_moment_equal needs 2 <= k <= 12");
  return equal_sum(k, k - 1);
}

Rational variance_asymptotic(int k, const Rational& lambda, const Rational& tau) {
  if (k < 2) throw std::out_of_range("variance_asymptotic needs k >= 2");
  return pow(2 * lambda * tau, static_cast<unsigned>(2 * k - 3)) / Rational(2 * factorial(2 * k - 3));
}

Rational mean_equal(int k, const Rational& lambda, const Rational& tau) {
  if (k < 1) throw std::out_of_range("mean_equal needs k >= 1");
  return pow(lambda * tau, static_cast<unsigned>(k - 1)) / Rational(factorial(k - 1));
}

}  // namespace khop
