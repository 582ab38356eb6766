#include "khop/cltstats.hpp"

#include "khop/simulator.hpp"
#include "khop/variance.hpp"

#include <boost/math/special_functions/erf.hpp>

#include <algorithm>
#include <string>
#include <cmath>
#include <numbers>
#include <ostream>
#include <stdexcept>

namespace khop {

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double normal_quantile(double p) {
  if (!(p > 0 && p < 1)) throw std::domain_error("quantile needs p in (0, 1)");
  return -std::numbers::sqrt2 * boost::math::erfc_inv(2 * p);
}

namespace {

double normal_pdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2 * std::numbers::pi); }

// Antiderivative of Phi vanishing at -infinity.
double phi_integral(double x) { return x * normal_cdf(x) + normal_pdf(x); }

// Integral of |p - Phi| over [a, b].
double gap_integral(double p, double a, double b) {
  if (b <= a) return 0;
  auto signed_part = [p](double lo, double hi) { return p * (hi - lo) - (phi_integral(hi) - phi_integral(lo)); };
  if (p <= 0) return -signed_part(a, b);
  if (p >= 1) return signed_part(a, b);
  double z = normal_quantile(p);
  if (z <= a) return -signed_part(a, b);
  if (z >= b) return signed_part(a, b);
  return signed_part(a, z) - signed_part(z, b);
}

void require_nonempty(std::span<const double> s) {
  if (s.empty()) throw std::invalid_argument("empty sample");
}

}  // namespace

double ks_distance(std::span<const double> sorted) {
  require_nonempty(sorted);
  const double n = static_cast<double>(sorted.size());
  double d = 0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    double f = normal_cdf(sorted[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  return d;
}

double ks_distance(const NormalizedSample& s) { return ks_distance(s.values); }

double wasserstein1(std::span<const double> sorted) {
  require_nonempty(sorted);
  const std::size_t n = sorted.size();
  // left tail integral of Phi, right tail integral of 1 - Phi
  double total = phi_integral(sorted.front()) + phi_integral(-sorted.back());
  for (std::size_t i = 0; i + 1 < n; ++i)
    total += gap_integral(static_cast<double>(i + 1) / static_cast<double>(n), sorted[i], sorted[i + 1]);
  return total;
}

double wasserstein1(const NormalizedSample& s) { return wasserstein1(s.values); }

NormalizedSample normalize(std::span<const std::uint64_t> counts, int k, const Rational& lambda, const Rational& tau,
                           std::uint64_t seed) {
  NormalizedSample out;
  out.k = k;
  out.lambda = lambda;
  out.tau = tau;
  out.seed = seed;
  out.mean = mean_equal(k, lambda, tau);
  out.variance = variance_equal(k, lambda, tau);
  if (out.variance <= 0) throw std::domain_error("zero variance");
  const double mu = to_double(out.mean), sd = std::sqrt(to_double(out.variance));
  out.values.reserve(counts.size());
  for (auto c : counts) out.values.push_back((static_cast<double>(c) - mu) / sd);
  std::sort(out.values.begin(), out.values.end());
  return out;
}

LinearFit rate_fit(std::span<const double> lambdas, std::span<const double> distances) {
  if (lambdas.size() != distances.size()) throw std::invalid_argument("size mismatch");
  if (lambdas.size() < 3) throw std::invalid_argument("need at least 3 points");
  const double n = static_cast<double>(lambdas.size());
  double sx = 0, sy = 0;
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    if (!(lambdas[i] > 0) || !(distances[i] > 0)) throw std::invalid_argument("rate fit needs positive values");
    xs.push_back(std::log(lambdas[i]));
    ys.push_back(std::log(distances[i]));
    sx += xs.back();
    sy += ys.back();
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  if (sxx == 0) throw std::invalid_argument("rate fit needs distinct lambdas");
  LinearFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  return f;
}

void fit(RateSeries& series) {
  std::vector<double> l, ks, w1;
  for (std::size_t i = 0; i < series.points.size(); ++i) {
    const auto& p = series.points[i];
    if (i > 0 && !(p.lambda > series.points[i - 1].lambda)) throw std::invalid_argument("lambdas must increase");
    l.push_back(p.lambda);
    ks.push_back(p.ks);
    w1.push_back(p.w1);
  }
  series.ks_fit = rate_fit(l, ks);
  series.w1_fit = rate_fit(l, w1);
}

RateSeries run_rate_experiment(const RateExperiment& e) {
  RateSeries series;
  for (std::size_t i = 0; i < e.lambdas.size(); ++i) {
    SimConfig c;
    c.k = e.k;
    c.r = e.r;
    c.t = e.t;
    c.lambdas = {e.lambdas[i]};
    c.n_samples = e.n_samples;
    c.seed = e.seed + i;
    c.threads = e.threads;
    auto stats = run_simulation(c);
    auto sample = normalize(stats.counts(), e.k, e.lambdas[i], c.tau(), c.seed);
    series.points.push_back({to_double(e.lambdas[i]), ks_distance(sample), wasserstein1(sample), stats.n()});
  }
  fit(series);
  return series;
}

void write_rate_csv(std::ostream& out, const RateSeries& series) {
  out << "lambda,n_samples,ks,w1\n";
  for (const auto& p : series.points)
    out << shortest_double(p.lambda) << ',' << p.n_samples << ',' << shortest_double(p.ks) << ',' << shortest_double(p.w1) << '\n';
  out << "# slope_ks=" << shortest_double(series.ks_fit.slope) << " slope_w1=" << shortest_double(series.w1_fit.slope) << '\n';
}

}  // namespace khop
