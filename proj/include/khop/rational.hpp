#pragma once

#include <gmpxx.h>

#include <string>
#include <string_view>

namespace khop {

// Always kept in canonical (reduced) form by gmp.
using Rational = mpq_class;
using Integer = mpz_class;

Rational make_rational(long num, long den = 1);

// Accepts "3", "-3/4", "0.25", "1.5e-3". Decimals are exact.
Rational parse_rational(std::string_view text);

std::string to_string(const Rational& q);
double to_double(const Rational& q);
// Shortest text that reads back to the same double.
std::string shortest_double(double x);
Rational pow(const Rational& base, unsigned exponent);
Integer factorial(unsigned n);
Integer binomial(unsigned n, unsigned k);

}  // namespace khop
