#include "khop/simulator.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <mutex>
#include <ostream>
#include <stdexcept>
#include <thread>

namespace khop {

const Rational& SimConfig::lambda_of_cell(int l) const {
  if (l < 1 || l > k) throw std::out_of_range("cell index out of range");
  return lambdas.size() == 1 ? lambdas[0] : lambdas.at(static_cast<std::size_t>(l - 1));
}

void SimConfig::validate() const {
  if (k < 2) throw std::invalid_argument("k must be at least 2");
  if (r <= 0) throw std::invalid_argument("r must be positive");
  if (lambdas.size() != 1 && lambdas.size() != static_cast<std::size_t>(k))
    throw std::invalid_argument("need one intensity or one per cell");
  for (const auto& l : lambdas)
    if (l < 0) throw std::invalid_argument("intensities must be nonnegative");
  if (t < (k - 1) * r || t >= k * r) throw std::invalid_argument("t must lie in [(k-1) r, k r)");
}

std::vector<Rational> engine_lambdas(const SimConfig& config) {
  std::vector<Rational> out;
  for (int l = 1; l <= config.k - 1; ++l) out.push_back(config.lambda_of_cell(config.k - l));
  return out;
}

std::size_t GraphSample::total() const {
  std::size_t n = 0;
  for (const auto& c : cells) n += c.size();
  return n;
}

namespace {

std::uint64_t splitmix_finalize(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t poisson_inversion(double mean, std::mt19937_64& rng) {
  double p = std::exp(-mean), cdf = p, u = uniform01(rng);
  std::uint64_t k = 0;
  while (u > cdf && k < 10000) {
    ++k;
    p *= mean / static_cast<double>(k);
    cdf += p;
  }
  return k;
}

// Hormann's PTRS.
std::uint64_t poisson_ptrs(double lam, std::mt19937_64& rng) {
  const double slam = std::sqrt(lam), loglam = std::log(lam);
  const double b = 0.931 + 2.53 * slam;
  const double a = -0.059 + 0.02483 * b;
  const double invalpha = 1.1239 + 1.1328 / (b - 3.4);
  const double vr = 0.9277 - 3.6224 / (b - 2);
  for (;;) {
    double U = uniform01(rng) - 0.5;
    double V = uniform01(rng);
    double us = 0.5 - std::fabs(U);
    double k = std::floor((2 * a / us + b) * U + lam + 0.43);
    if (us >= 0.07 && V <= vr) return static_cast<std::uint64_t>(k);
    if (k < 0 || (us < 0.013 && V > us)) continue;
    if (std::log(V) + std::log(invalpha) - std::log(a / (us * us) + b) <= -lam + k * loglam - std::lgamma(k + 1))
      return static_cast<std::uint64_t>(k);
  }
}

}  // namespace

std::mt19937_64 stream(std::uint64_t seed, std::uint64_t index) {
  return std::mt19937_64(splitmix_finalize(seed + (index + 1) * 0x9E3779B97F4A7C15ULL));
}

double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

std::uint64_t sample_poisson(double mean, std::mt19937_64& rng) {
  if (!(mean >= 0)) throw std::invalid_argument("Poisson mean must be nonnegative");
  if (mean == 0) return 0;
  return mean < 30 ? poisson_inversion(mean, rng) : poisson_ptrs(mean, rng);
}

GraphSample sample_points(const SimConfig& config, std::mt19937_64& rng) {
  const double r = to_double(config.r);
  GraphSample out;
  out.cells.resize(static_cast<std::size_t>(config.k));
  for (int l = 1; l <= config.k; ++l) {
    auto& cell = out.cells[static_cast<std::size_t>(l - 1)];
    std::uint64_t count = sample_poisson(to_double(config.lambda_of_cell(l)) * r, rng);
    cell.reserve(count);
    const double left = (l - 1) * r;
    for (std::uint64_t i = 0; i < count; ++i) cell.push_back(left + r * (1.0 - uniform01(rng)));
    std::sort(cell.begin(), cell.end());
  }
  return out;
}

std::uint64_t count_khops_bruteforce(const GraphSample& sample, int k, double r, double t) {
  if (k < 2) throw std::invalid_argument("k must be at least 2");
  if (sample.total() > kBruteForceGuard) throw std::length_error("too many points for brute force");
  std::vector<double> pts;
  for (const auto& c : sample.cells) pts.insert(pts.end(), c.begin(), c.end());
  std::sort(pts.begin(), pts.end());

  std::vector<std::size_t> used;
  // Places s_j given the upper neighbour value; j counts down to 1.
  auto place = [&](auto&& self, int j, double lower, double upper) -> std::uint64_t {
    std::uint64_t total = 0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      if (!(pts[i] > lower && pts[i] < upper)) continue;
      if (std::find(used.begin(), used.end(), i) != used.end()) continue;
      if (j == 1) {
        ++total;
        continue;
      }
      used.push_back(i);
      total += self(self, j - 1, pts[i] - r, (j - 1) * r);
      used.pop_back();
    }
    return total;
  };
  return place(place, k - 1, t - r, (k - 1) * r);
}

std::uint64_t count_khops_lens(const GraphSample& sample, int k, double r, double tau) {
  if (k < 2) throw std::invalid_argument("k must be at least 2");
  if (!(tau > 0 && tau <= r)) throw std::invalid_argument("tau must lie in (0, r]");
  if (sample.cells.size() < static_cast<std::size_t>(k - 1)) throw std::invalid_argument("sample has too few cells");
  using Wide = unsigned __int128;
  std::vector<double> prev_y;
  std::vector<Wide> prev_suffix;  // prev_suffix[i] = sum of chain counts over prev_y[i..]
  for (int j = 1; j <= k - 1; ++j) {
    const double shift = j * r - tau;
    std::vector<double> ys;
    for (double x : sample.cells[static_cast<std::size_t>(j - 1)])
      if (x > shift && x < j * r) ys.push_back(x - shift);
    std::vector<Wide> ways(ys.size(), 1);
    if (j > 1)
      for (std::size_t i = 0; i < ys.size(); ++i) {
        auto it = std::upper_bound(prev_y.begin(), prev_y.end(), ys[i]);
        ways[i] = prev_suffix[static_cast<std::size_t>(it - prev_y.begin())];
      }
    std::vector<Wide> suffix(ys.size() + 1, 0);
    for (std::size_t i = ys.size(); i-- > 0;) suffix[i] = suffix[i + 1] + ways[i];
    prev_y = std::move(ys);
    prev_suffix = std::move(suffix);
  }
  Wide total = prev_suffix.front();
  if (total > std::numeric_limits<std::uint64_t>::max()) throw std::overflow_error("k-hop count overflows 64 bits");
  return static_cast<std::uint64_t>(total);
}

void SampleStats::add(std::uint64_t count) {
  ++n_;
  Integer c(static_cast<unsigned long>(count)), p(1);
  for (auto& s : power_sums_) {
    s += p;
    p *= c;
  }
  counts_.push_back(count);
}

void SampleStats::merge(const SampleStats& other) {
  n_ += other.n_;
  for (std::size_t j = 0; j < power_sums_.size(); ++j) power_sums_[j] += other.power_sums_[j];
  counts_.insert(counts_.end(), other.counts_.begin(), other.counts_.end());
}

std::vector<std::uint64_t> SampleStats::sorted_counts() const {
  auto out = counts_;
  std::sort(out.begin(), out.end());
  return out;
}

Rational SampleStats::mean() const {
  if (n_ == 0) throw std::domain_error("empty sample");
  Rational m(power_sums_[1], Integer(static_cast<unsigned long>(n_)));
  m.canonicalize();
  return m;
}

Rational SampleStats::central_moment(int j) const {
  if (j < 0 || j > 6) throw std::out_of_range("central moments up to order 6");
  const Rational m = mean();
  Rational total;
  for (int i = 0; i <= j; ++i)
    total += Rational(binomial(static_cast<unsigned>(j), static_cast<unsigned>(i))) * Rational(power_sums_[static_cast<std::size_t>(i)]) *
             pow(Rational(-m), static_cast<unsigned>(j - i));
  Rational out = total / Rational(static_cast<unsigned long>(n_));
  out.canonicalize();
  return out;
}

Rational SampleStats::k_statistic(int j) const {
  const Rational n(static_cast<unsigned long>(n_));
  const Rational S1(power_sums_[1]), S2(power_sums_[2]), S3(power_sums_[3]), S4(power_sums_[4]);
  Rational out;
  switch (j) {
    case 1:
      return mean();
    case 2:
      if (n_ < 2) throw std::domain_error("k_2 needs two samples");
      out = (n * S2 - S1 * S1) / (n * (n - 1));
      break;
    case 3:
      if (n_ < 3) throw std::domain_error("k_3 needs three samples");
      out = (2 * S1 * S1 * S1 - 3 * n * S1 * S2 + n * n * S3) / (n * (n - 1) * (n - 2));
      break;
    case 4:
      if (n_ < 4) throw std::domain_error("k_4 needs four samples");
      out = (-6 * S1 * S1 * S1 * S1 + 12 * n * S1 * S1 * S2 - 3 * n * (n - 1) * S2 * S2 - 4 * n * (n + 1) * S1 * S3 +
             n * n * (n + 1) * S4) /
            (n * (n - 1) * (n - 2) * (n - 3));
      break;
    default:
      throw std::out_of_range("k-statistics of order 1..4");
  }
  out.canonicalize();
  return out;
}

double SampleStats::skewness() const {
  const double k2 = to_double(k_statistic(2));
  if (k2 <= 0) throw std::domain_error("zero sample variance");
  return to_double(k_statistic(3)) / std::pow(k2, 1.5);
}

double SampleStats::ex_kurtosis() const {
  const double k2 = to_double(k_statistic(2));
  if (k2 <= 0) throw std::domain_error("zero sample variance");
  return to_double(k_statistic(4)) / (k2 * k2);
}

double SampleStats::se_mean() const { return std::sqrt(to_double(central_moment(2)) / static_cast<double>(n_)); }

double SampleStats::se_variance() const {
  const Rational m2 = central_moment(2);
  return std::sqrt(to_double(central_moment(4) - m2 * m2) / static_cast<double>(n_));
}

double SampleStats::se_k3() const {
  const Rational m2 = central_moment(2), m3 = central_moment(3), m4 = central_moment(4), m6 = central_moment(6);
  return std::sqrt(to_double(m6 - m3 * m3 - 6 * m2 * m4 + 9 * m2 * m2 * m2) / static_cast<double>(n_));
}

nlohmann::json SampleStats::to_json() const {
  nlohmann::json j;
  j["n"] = n_;
  auto sums = nlohmann::json::array();
  for (const auto& s : power_sums_) sums.push_back(s.get_str());
  j["power_sums"] = sums;
  j["counts"] = counts_;
  return j;
}

SampleStats SampleStats::from_json(const nlohmann::json& j) {
  SampleStats s;
  s.n_ = j.at("n").get<std::uint64_t>();
  const auto& sums = j.at("power_sums");
  if (sums.size() != s.power_sums_.size()) throw std::invalid_argument("expected 7 power sums");
  for (std::size_t i = 0; i < sums.size(); ++i) s.power_sums_[i] = Integer(sums[i].get<std::string>());
  s.counts_ = j.at("counts").get<std::vector<std::uint64_t>>();
  if (s.counts_.size() != s.n_ || s.power_sums_[0] != Integer(static_cast<unsigned long>(s.n_)))
    throw std::invalid_argument("inconsistent sample stats");
  return s;
}

SampleStats run_simulation(const SimConfig& config) {
  config.validate();
  const std::uint64_t batches = (config.n_samples + kBatchSize - 1) / kBatchSize;
  std::vector<SampleStats> results(batches);
  const double r = to_double(config.r), tau = to_double(config.tau());
  std::atomic<std::uint64_t> next{0};
  std::mutex error_mutex;
  std::exception_ptr error;
  auto worker = [&] {
    try {
      for (std::uint64_t b; (b = next.fetch_add(1)) < batches;) {
        auto rng = stream(config.seed, b);
        const std::uint64_t end = std::min(config.n_samples, (b + 1) * kBatchSize);
        for (std::uint64_t i = b * kBatchSize; i < end; ++i)
          results[b].add(count_khops_lens(sample_points(config, rng), config.k, r, tau));
      }
    } catch (...) {
      std::lock_guard lock(error_mutex);
      if (!error) error = std::current_exception();
      next.store(batches);
    }
  };
  unsigned threads = config.threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : config.threads;
  threads = static_cast<unsigned>(std::min<std::uint64_t>(threads, std::max<std::uint64_t>(batches, 1)));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned i = 0; i < threads; ++i) pool.emplace_back(worker);
  }
  if (error) std::rethrow_exception(error);
  SampleStats out;
  for (const auto& b : results) out.merge(b);
  return out;
}

void write_raw_counts(std::ostream& out, const SimConfig& config, const SampleStats& stats) {
  out << "# khop k=" << config.k << " r=" << to_string(config.r) << " t=" << to_string(config.t) << " lambda=";
  for (std::size_t i = 0; i < config.lambdas.size(); ++i) out << (i ? "," : "") << to_string(config.lambdas[i]);
  out << " seed=" << config.seed << " n=" << stats.n() << '\n';
  for (auto c : stats.counts()) out << c << '\n';
}

}  // namespace khop
