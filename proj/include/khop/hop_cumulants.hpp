#pragma once

#include "khop/hop_moments.hpp"
#include "khop/partitions.hpp"

#include <map>
#include <mutex>
#include <span>
#include <vector>

namespace khop {

// One term coefficient * prod_{B in blocks} kappa(X_B) of a flat expansion.
struct FlatCumulantTerm {
  Integer coefficient;
  std::vector<std::vector<int>> blocks;

  friend bool operator==(const FlatCumulantTerm&, const FlatCumulantTerm&) = default;
};

// kappa(prod_{i in G_1} X_i, ..., prod_{i in G_p} X_i) over flat joint cumulants,
// by repeatedly applying kappa(..., X Y) = kappa(..., X, Y) + sum kappa(S, X) kappa(S', Y).
// Terms come back sorted by their block lists.
std::vector<FlatCumulantTerm> power_reduce(const SetPartition& grouping);
// Groups are consecutive runs of the given sizes.
std::vector<FlatCumulantTerm> power_reduce(std::span<const int> mults);

// Joint cumulants kappa(sigma_k(kr - v_1)^{n_1}, ..., sigma_k(kr - v_p)^{n_p}) on the
// chamber v_1 <= ... <= v_p, with the same symbol conventions as MomentEngine.
class CumulantEngine {
 public:
  explicit CumulantEngine(EngineLimits limits = {});

  ChamberPoly cumulant(int k, std::span<const int> mults);
  ChamberPoly cumulant(int k, std::initializer_list<int> mults) { return cumulant(k, std::span<const int>(mults.begin(), mults.size())); }
  // Distinct arguments tau1..taun.
  MultiPoly flat(int k, int n);
  // kappa(X, ..., X) with n copies of X = sigma_k(kr - tau1), computed directly.
  MultiPoly diagonal(int k, int n);
  // Moebius inversion of the moment engine; slower, kept as an independent path.
  ChamberPoly cumulant_from_moments(int k, int n);

  void prepare(int k_max, int n_max);
  MomentEngine& moments() { return moments_; }
  const EngineLimits& limits() const { return limits_; }

 private:
  void check(int k, int n) const;
  MultiPoly step(int k, std::span<const Var> arg_caps);
  const std::vector<FlatCumulantTerm>& reduced(int n, std::size_t partition_index);

  EngineLimits limits_;
  MomentEngine moments_;
  mutable std::recursive_mutex mutex_;
  std::map<std::pair<int, int>, MultiPoly> flat_memo_;
  std::map<std::pair<int, int>, MultiPoly> diagonal_memo_;
  std::map<std::pair<int, std::size_t>, std::vector<FlatCumulantTerm>> reduce_memo_;
};

// (2 (lambda + 1) tau)^{1 + (k-2) n} B_n^{k-2}
Rational cumulant_bound(int k, int n, const Rational& lambda, const Rational& tau);

// Cumulant value at equal intensities and coincident arguments.
Rational diagonal_cumulant_at(CumulantEngine& engine, int k, int n, const Rational& lambda, const Rational& tau);

struct Skewness {
  Rational c3_squared;
  Rational c2_cubed;
  double value = 0;
};
Skewness skewness(CumulantEngine& engine, int k, const Rational& lambda, const Rational& tau);

struct ExcessKurtosis {
  Rational value;
  double approx = 0;
};
ExcessKurtosis excess_kurtosis(CumulantEngine& engine, int k, const Rational& lambda, const Rational& tau);

}  // namespace khop
