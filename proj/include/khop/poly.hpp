#pragma once

#include "khop/rational.hpp"

#include <array>
#include <compare>
#include <concepts>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace khop {

inline constexpr std::size_t kMaxVars = 32;
inline constexpr int kMaxIndexed = 8;

enum class VarRole : std::uint8_t { lambda, tau, bound };

struct Var {
  std::uint8_t id = 0;
  friend constexpr auto operator<=>(Var, Var) = default;
};

// Fixed symbol table. Layout: lambda, lambda1..8, tau, tau1..8, u1..8.
// tau1 < tau2 < ... is the declared order; plain "tau" stands alone.
class VarRegistry {
 public:
  static const VarRegistry& standard();

  Var lambda() const { return Var{0}; }
  Var lambda(int i) const;
  Var tau() const { return Var{9}; }
  Var tau(int i) const;
  Var bound(int i) const;

  std::size_t size() const { return names_.size(); }
  const std::string& name(Var v) const { return names_.at(v.id); }
  VarRole role(Var v) const { return roles_.at(v.id); }
  std::optional<Var> find(std::string_view name) const;

  // Position of v among tau1..tau8, or 0 for anything else.
  int tau_index(Var v) const;
  // True if a and b are taus with a declared relative order (or equal).
  bool tau_comparable(Var a, Var b) const;
  bool tau_less(Var a, Var b) const;

 private:
  VarRegistry();
  std::vector<std::string> names_;
  std::vector<VarRole> roles_;
};

const VarRegistry& registry();

struct Monomial {
  std::array<std::uint8_t, kMaxVars> exp{};

  unsigned degree() const;
  unsigned operator[](Var v) const { return exp[v.id]; }
  friend auto operator<=>(const Monomial&, const Monomial&) = default;
};

using Term = std::pair<Monomial, Rational>;

// Sparse polynomial: sorted by monomial, no zero coefficients.
class MultiPoly {
 public:
  MultiPoly() = default;
  MultiPoly(const Rational& c);  // NOLINT: constants convert implicitly
  MultiPoly(long c) : MultiPoly(Rational(c)) {}

  static MultiPoly var(Var v, unsigned power = 1);
  // Sorts and combines like terms; zeros dropped.
  static MultiPoly from_terms(std::vector<Term> terms);

  const std::vector<Term>& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }
  bool is_zero() const { return terms_.empty(); }
  bool is_constant() const;
  bool contains(Var v) const;
  unsigned degree_in(Var v) const;
  unsigned total_degree() const;
  Rational constant_term() const;

  MultiPoly& operator+=(const MultiPoly& o);
  MultiPoly& operator-=(const MultiPoly& o);
  MultiPoly& operator*=(const MultiPoly& o);
  MultiPoly& operator*=(const Rational& c);

  friend MultiPoly operator+(MultiPoly a, const MultiPoly& b) { return a += b; }
  friend MultiPoly operator-(MultiPoly a, const MultiPoly& b) { return a -= b; }
  friend MultiPoly operator*(const MultiPoly& a, const MultiPoly& b);
  friend MultiPoly operator*(MultiPoly a, const Rational& c) { return a *= c; }
  friend MultiPoly operator*(const Rational& c, MultiPoly a) { return a *= c; }
  template <std::integral I>
  friend MultiPoly operator*(I c, MultiPoly a) { return a *= Rational(static_cast<long>(c)); }
  template <std::integral I>
  friend MultiPoly operator*(MultiPoly a, I c) { return a *= Rational(static_cast<long>(c)); }
  template <std::integral I>
  friend MultiPoly operator+(MultiPoly a, I c) { return a += MultiPoly(static_cast<long>(c)); }
  template <std::integral I>
  friend MultiPoly operator-(MultiPoly a, I c) { return a -= MultiPoly(static_cast<long>(c)); }
  MultiPoly operator-() const;
  friend bool operator==(const MultiPoly&, const MultiPoly&) = default;

 private:
  std::vector<Term> terms_;
};

MultiPoly pow(const MultiPoly& p, unsigned exponent);

MultiPoly substitute(const MultiPoly& p, Var v, const MultiPoly& q);

// Simultaneous variable renaming; several sources may map to one target.
MultiPoly rename(const MultiPoly& p, std::span<const std::pair<Var, Var>> mapping);

MultiPoly derivative(const MultiPoly& p, Var v);

// Throws std::invalid_argument if lo or hi mentions v.
MultiPoly definite_integral(const MultiPoly& p, Var v, const MultiPoly& lo, const MultiPoly& hi);

// Fast path: lo is 0 (nullopt) or a variable, hi a variable; neither may be v.
MultiPoly integrate_between(const MultiPoly& p, Var v, std::optional<Var> lo, Var hi);

using Assignment = std::map<Var, Rational>;
using FloatAssignment = std::map<Var, double>;

// Throws std::invalid_argument on a missing symbol.
Rational eval(const MultiPoly& p, const Assignment& at);
// Long-double accumulation; ~1e-12 relative for positive-coefficient polynomials of degree <= 20.
double eval_float(const MultiPoly& p, const FloatAssignment& at);

// Degree-major, then lexicographic in registry order: "1/2*tau^2 + 2/3*tau^3".
std::string to_string(const MultiPoly& p);
MultiPoly parse_poly(std::string_view text);

// A polynomial valid on the chamber chain[0] <= chain[1] <= ...
struct ChamberPoly {
  MultiPoly poly;
  std::vector<Var> chain;

  friend bool operator==(const ChamberPoly&, const ChamberPoly&) = default;
};

// Replaces every chain variable by v (the all-equal diagonal).
MultiPoly collapse(const ChamberPoly& c, Var v);

}  // namespace khop
