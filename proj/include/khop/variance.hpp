#pragma once

#include "khop/poly.hpp"

namespace khop {

// Closed-form variance in tau and lambda1..lambda_{k-1}; 2 <= k <= 8.
MultiPoly variance_general(int k);

// Equal intensities, as a polynomial in lambda and tau; 2 <= k <= 12.
MultiPoly variance_equal(int k);
Rational variance_equal(int k, const Rational& lambda, const Rational& tau);

// Same sum carried to l = k-1; the extra term is the squared mean.
MultiPoly second_moment_equal(int k);

// Leading large-intensity term (2 lambda tau)^{2k-3} / (2 (2k-3)!).
Rational variance_asymptotic(int k, const Rational& lambda, const Rational& tau);

// lambda^{k-1} tau^{k-1} / (k-1)!
Rational mean_equal(int k, const Rational& lambda, const Rational& tau);

}  // namespace khop
