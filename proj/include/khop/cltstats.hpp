#pragma once

#include "khop/rational.hpp"

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

namespace khop {

// 0.5 erfc(-x / sqrt 2)
double normal_cdf(double x);
double normal_quantile(double p);

struct NormalizedSample {
  std::vector<double> values;  // ascending
  int k = 0;
  Rational lambda;
  Rational tau;
  std::uint64_t seed = 0;
  Rational mean;      // subtracted
  Rational variance;  // sqrt divided out
};

// sup |F_n - Phi|. Throws std::invalid_argument on an empty sample.
double ks_distance(std::span<const double> sorted);
double ks_distance(const NormalizedSample& s);

// Integral of |F_n - Phi|, piecewise exact through x Phi(x) + phi(x).
double wasserstein1(std::span<const double> sorted);
double wasserstein1(const NormalizedSample& s);

// (count - mean) / sqrt(variance) with the exact equal-intensity constants at tau = k r - t.
// Throws std::domain_error when the variance vanishes.
NormalizedSample normalize(std::span<const std::uint64_t> counts, int k, const Rational& lambda, const Rational& tau,
                           std::uint64_t seed = 0);

struct LinearFit {
  double slope = 0;
  double intercept = 0;
};

// Least squares of log d on log lambda. Needs >= 3 points and positive values.
LinearFit rate_fit(std::span<const double> lambdas, std::span<const double> distances);

struct RatePoint {
  double lambda = 0;
  double ks = 0;
  double w1 = 0;
  std::uint64_t n_samples = 0;
};

struct RateSeries {
  std::vector<RatePoint> points;  // lambda strictly increasing
  LinearFit ks_fit;
  LinearFit w1_fit;
};

// Fills both fits from the points.
void fit(RateSeries& series);

struct RateExperiment {
  int k = 3;
  Rational r = 1;
  Rational t = 2;
  std::vector<Rational> lambdas;
  std::uint64_t n_samples = 0;
  std::uint64_t seed = 0;
  unsigned threads = 1;
};

// The lambda at position i is simulated with seed + i.
RateSeries run_rate_experiment(const RateExperiment& experiment);

// Columns lambda,n_samples,ks,w1 and a final "# slope_ks=<v> slope_w1=<v>" line.
void write_rate_csv(std::ostream& out, const RateSeries& series);

}  // namespace khop
