#pragma once

#include "khop/rational.hpp"

#include <nlohmann/json.hpp>

#include <array>
#include <cstdint>
#include <iosfwd>
#include <random>
#include <vector>

namespace khop {

// Cells ((l-1) r, l r] for l = 1..k. lambdas holds one value or one per cell.
struct SimConfig {
  int k = 2;
  Rational r = 1;
  Rational t = 1;
  std::vector<Rational> lambdas{Rational(1)};
  std::uint64_t n_samples = 0;
  std::uint64_t seed = 0;
  unsigned threads = 1;  // 0: hardware concurrency

  Rational tau() const { return k * r - t; }
  const Rational& lambda_of_cell(int l) const;
  // Throws std::invalid_argument unless k >= 2, r > 0, lambdas >= 0 and t in [(k-1) r, k r).
  void validate() const;
};

// Engine lambda vector (lambda_1..lambda_{k-1}) matching the cell intensities:
// lambda_l is the intensity of cell k - l.
std::vector<Rational> engine_lambdas(const SimConfig& config);

struct GraphSample {
  std::vector<std::vector<double>> cells;  // cells[l-1], sorted ascending

  std::size_t total() const;
};

// stream(seed, index): SplitMix64 finalizer over seed + (index + 1) * golden gamma,
// used as the mt19937_64 seed.
std::mt19937_64 stream(std::uint64_t seed, std::uint64_t index);
// (x >> 11) * 2^-53, in [0, 1).
double uniform01(std::mt19937_64& rng);
// Inversion below mean 30, PTRS transformed rejection above.
std::uint64_t sample_poisson(double mean, std::mt19937_64& rng);

GraphSample sample_points(const SimConfig& config, std::mt19937_64& rng);

inline constexpr std::size_t kBruteForceGuard = 1000;

// Ordered tuples of distinct points with t - r < s_{k-1} < (k-1) r and
// s_{j+1} - r < s_j < j r. Throws std::length_error above kBruteForceGuard points.
std::uint64_t count_khops_bruteforce(const GraphSample& sample, int k, double r, double t);

// Lens j holds points in (j r - tau, j r), shifted to y = x - (j r - tau); counts chains
// y_1 > y_2 > ... > y_{k-1}. Valid for tau in (0, r].
std::uint64_t count_khops_lens(const GraphSample& sample, int k, double r, double tau);

class SampleStats {
 public:
  void add(std::uint64_t count);
  void merge(const SampleStats& other);

  std::uint64_t n() const { return n_; }
  const std::array<Integer, 7>& power_sums() const { return power_sums_; }
  // In sample order.
  const std::vector<std::uint64_t>& counts() const { return counts_; }
  std::vector<std::uint64_t> sorted_counts() const;

  Rational mean() const;
  // Population central moment of order j <= 6.
  Rational central_moment(int j) const;
  // Unbiased cumulant estimates k_1..k_4.
  Rational k_statistic(int j) const;
  double skewness() const;
  double ex_kurtosis() const;

  // Large-sample standard errors of the mean, k_2 and k_3.
  double se_mean() const;
  double se_variance() const;
  double se_k3() const;

  nlohmann::json to_json() const;
  static SampleStats from_json(const nlohmann::json& j);

  friend bool operator==(const SampleStats&, const SampleStats&) = default;

 private:
  std::uint64_t n_ = 0;
  std::array<Integer, 7> power_sums_{};
  std::vector<std::uint64_t> counts_;
};

inline constexpr std::uint64_t kBatchSize = 4096;

// Batch b covers samples [b * kBatchSize, (b+1) * kBatchSize) and draws from stream(seed, b).
// Batches merge in index order, so the result does not depend on the thread count.
SampleStats run_simulation(const SimConfig& config);

// "# khop k=<k> r=<r> t=<t> lambda=<l1,...> seed=<s> n=<n>" then one count per line.
void write_raw_counts(std::ostream& out, const SimConfig& config, const SampleStats& stats);

}  // namespace khop
