#pragma once

#include "khop/poly.hpp"

#include <map>
#include <mutex>
#include <span>
#include <utility>
#include <vector>

namespace khop {

// Soft limits on the hop count k and the total argument count sum(mults).
struct EngineLimits {
  int max_k = 5;
  int max_n = 6;
};

// Joint moments E[prod_j sigma_k(kr - v_j)^{n_j}] on the chamber v_1 <= ... <= v_p.
// Results use tau1..taup for v_1..v_p and lambda1..lambda_{k-1} for the
// intensities. lambda_l is the intensity integrated at recursion level l, i.e.
// the innermost (smallest) chain coordinate; in the lens picture it belongs to
// cell k - l.
class MomentEngine {
 public:
  explicit MomentEngine(EngineLimits limits = {});

  ChamberPoly moment(int k, std::span<const int> mults);
  ChamberPoly moment(int k, std::initializer_list<int> mults) { return moment(k, std::span<const int>(mults.begin(), mults.size())); }
  // Same value via the distinct-argument entry and diagonal substitution.
  ChamberPoly moment_by_substitution(int k, std::span<const int> mults);
  // Distinct arguments tau1..taun.
  MultiPoly flat(int k, int n);

  void prepare(int k_max, int n_max);
  const EngineLimits& limits() const { return limits_; }
  std::vector<std::pair<std::pair<int, std::vector<int>>, ChamberPoly>> entries() const;

 private:
  void check(int k, std::span<const int> mults) const;
  MultiPoly compute(int k, const std::vector<int>& mults);
  MultiPoly step(int k, std::span<const Var> arg_caps);

  EngineLimits limits_;
  mutable std::recursive_mutex mutex_;
  std::map<std::pair<int, std::vector<int>>, MultiPoly> memo_;
};

// Chain tau1..taup for the multiplicity vector.
std::vector<Var> chain_for(std::size_t p);

// lambda_i -> lambda for every indexed intensity.
MultiPoly equal_lambdas(const MultiPoly& p);
// lambdas: one value for all cells, or one per index lambda_1..lambda_{k-1}.
Assignment lambda_assignment(int k, std::span<const Rational> lambdas);

struct MomentValue {
  Rational value;
  bool resorted = false;
};

// Groups equal taus, sorts them ascending (flagging the result) and evaluates.
MomentValue moment_at(MomentEngine& engine, int k, std::span<const Rational> taus, std::span<const Rational> lambdas);

// (E[N^n])^{k-1} for N ~ Poisson(lambda * tau).
Rational moment_bound(int k, int n, const Rational& lambda, const Rational& tau);

}  // namespace khop
