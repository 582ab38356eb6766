#include "khop/hop_cumulants.hpp"

#include "khop/box_integral.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace khop {

namespace {

using Group = std::vector<int>;
using Factor = std::vector<Group>;

struct Product {
  Integer coefficient;
  std::vector<Factor> factors;
};

bool is_flat(const Factor& f) {
  return std::all_of(f.begin(), f.end(), [](const Group& g) { return g.size() == 1; });
}

}  // namespace

std::vector<FlatCumulantTerm> power_reduce(const SetPartition& grouping) {
  std::vector<Product> work{{Integer(1), {grouping.blocks()}}};
  std::map<std::vector<std::vector<int>>, Integer> done;
  while (!work.empty()) {
    Product p = std::move(work.back());
    work.pop_back();
    auto it = std::find_if(p.factors.begin(), p.factors.end(), [](const Factor& f) { return !is_flat(f); });
    if (it == p.factors.end()) {
      std::vector<std::vector<int>> blocks;
      for (const auto& f : p.factors) {
        std::vector<int> b;
        for (const auto& g : f) b.push_back(g.front());
        std::sort(b.begin(), b.end());
        blocks.push_back(std::move(b));
      }
      std::sort(blocks.begin(), blocks.end());
      done[blocks] += p.coefficient;
      continue;
    }
    const std::size_t fi = static_cast<std::size_t>(it - p.factors.begin());
    Factor f = *it;
    auto gi = static_cast<std::size_t>(std::find_if(f.begin(), f.end(), [](const Group& g) { return g.size() > 1; }) - f.begin());
    Group head = f[gi];
    Group tail{head.back()};
    head.pop_back();
    std::vector<Group> others;
    for (std::size_t j = 0; j < f.size(); ++j)
      if (j != gi) others.push_back(f[j]);

    Product split = p;
    split.factors[fi] = others;
    split.factors[fi].push_back(head);
    split.factors[fi].push_back(tail);
    work.push_back(std::move(split));

    for (unsigned mask = 0; mask < (1u << others.size()); ++mask) {
      Factor left{head}, right{tail};
      for (std::size_t j = 0; j < others.size(); ++j) ((mask >> j) & 1u ? left : right).push_back(others[j]);
      Product q = p;
      q.factors[fi] = std::move(left);
      q.factors.push_back(std::move(right));
      work.push_back(std::move(q));
    }
  }
  std::vector<FlatCumulantTerm> out;
  for (auto& [blocks, c] : done)
    if (c != 0) out.push_back({c, blocks});
  return out;
}

std::vector<FlatCumulantTerm> power_reduce(std::span<const int> mults) {
  std::vector<int> labels;
  for (std::size_t j = 0; j < mults.size(); ++j)
    for (int c = 0; c < mults[j]; ++c) labels.push_back(static_cast<int>(j));
  return power_reduce(SetPartition::from_labels(labels));
}

CumulantEngine::CumulantEngine(EngineLimits limits) : limits_(limits), moments_(limits) {}

void CumulantEngine::check(int k, int n) const {
  if (k < 1) throw std::invalid_argument("hop count must be at least 1");
  if (n < 1) throw std::invalid_argument("need at least one argument");
  if (k > limits_.max_k || n > limits_.max_n)
    throw std::out_of_range("limits exceeded: k=" + std::to_string(k) + " n=" + std::to_string(n));
}

const std::vector<FlatCumulantTerm>& CumulantEngine::reduced(int n, std::size_t partition_index) {
  auto key = std::make_pair(n, partition_index);
  auto it = reduce_memo_.find(key);
  if (it == reduce_memo_.end()) it = reduce_memo_.emplace(key, power_reduce(set_partitions(n)[partition_index])).first;
  return it->second;
}

MultiPoly CumulantEngine::flat(int k, int n) {
  check(k, n);
  if (k == 1) return n == 1 ? MultiPoly(1) : MultiPoly();
  std::lock_guard lock(mutex_);
  auto key = std::make_pair(k, n);
  if (auto it = flat_memo_.find(key); it != flat_memo_.end()) return it->second;
  MultiPoly result = step(k - 1, chain_for(n));
  flat_memo_.emplace(key, result);
  return result;
}

MultiPoly CumulantEngine::diagonal(int k, int n) {
  check(k, n);
  if (k == 1) return n == 1 ? MultiPoly(1) : MultiPoly();
  std::lock_guard lock(mutex_);
  auto key = std::make_pair(k, n);
  if (auto it = diagonal_memo_.find(key); it != diagonal_memo_.end()) return it->second;
  std::vector<Var> caps(n, registry().tau(1));
  MultiPoly result = step(k - 1, caps);
  diagonal_memo_.emplace(key, result);
  return result;
}

// c_{k+1} at flat arguments with the given (nondecreasing) caps.
MultiPoly CumulantEngine::step(int k, std::span<const Var> arg_caps) {
  const auto& reg = registry();
  const int n = static_cast<int>(arg_caps.size());
  std::vector<MultiPoly> inner(n + 1);
  for (int m = 1; m <= n; ++m) inner[m] = flat(k, m);
  const MultiPoly lam = MultiPoly::var(reg.lambda(k));
  const auto& parts = set_partitions(n);
  MultiPoly total;
  for (std::size_t pi_index = 0; pi_index < parts.size(); ++pi_index) {
    const auto& pi = parts[pi_index];
    const auto& terms = reduced(n, pi_index);
    std::vector<BoxBlock> blocks;
    for (const auto& b : pi.blocks()) blocks.push_back({static_cast<int>(b.size()), arg_caps[b.front()]});
    auto evaluator = [&](std::span<const int> order) {
      std::vector<int> rank(order.size());
      for (std::size_t r = 0; r < order.size(); ++r) rank[order[r]] = static_cast<int>(r);
      MultiPoly sum;
      for (const auto& term : terms) {
        MultiPoly product(Rational(term.coefficient));
        for (const auto& b : term.blocks) {
          if (inner[b.size()].is_zero()) {
            product = MultiPoly();
            break;
          }
          std::vector<int> args = b;
          std::stable_sort(args.begin(), args.end(), [&](int x, int y) { return rank[pi.block_of(x)] < rank[pi.block_of(y)]; });
          std::vector<std::pair<Var, Var>> mapping;
          for (std::size_t pos = 0; pos < args.size(); ++pos)
            mapping.emplace_back(reg.tau(static_cast<int>(pos) + 1), reg.bound(pi.block_of(args[pos]) + 1));
          product *= rename(inner[b.size()], mapping);
        }
        sum += product;
      }
      return sum;
    };
    total += box_integral(blocks, evaluator) * pow(lam, static_cast<unsigned>(pi.size()));
  }
  return total;
}

ChamberPoly CumulantEngine::cumulant(int k, std::span<const int> mults) {
  if (mults.empty()) throw std::invalid_argument("empty multiplicity vector");
  for (int m : mults)
    if (m < 1) throw std::invalid_argument("multiplicities must be positive");
  const int n = std::accumulate(mults.begin(), mults.end(), 0);
  check(k, n);
  std::vector<int> arg_group;
  for (std::size_t j = 0; j < mults.size(); ++j)
    for (int c = 0; c < mults[j]; ++c) arg_group.push_back(static_cast<int>(j));
  const auto& reg = registry();
  MultiPoly total;
  for (const auto& term : power_reduce(mults)) {
    MultiPoly product(Rational(term.coefficient));
    for (const auto& b : term.blocks) {
      std::vector<std::pair<Var, Var>> mapping;
      for (std::size_t pos = 0; pos < b.size(); ++pos)
        mapping.emplace_back(reg.tau(static_cast<int>(pos) + 1), reg.tau(arg_group[b[pos]] + 1));
      product *= rename(flat(k, static_cast<int>(b.size())), mapping);
    }
    total += product;
  }
  return {total, chain_for(mults.size())};
}

ChamberPoly CumulantEngine::cumulant_from_moments(int k, int n) {
  check(k, n);
  const auto& reg = registry();
  auto block_moment = [&](std::span<const int> subset) {
    std::vector<std::pair<Var, Var>> mapping;
    for (std::size_t pos = 0; pos < subset.size(); ++pos)
      mapping.emplace_back(reg.tau(static_cast<int>(pos) + 1), reg.tau(subset[pos] + 1));
    return rename(moments_.flat(k, static_cast<int>(subset.size())), mapping);
  };
  return {moments_to_cumulants<MultiPoly>(block_moment, n), chain_for(n)};
}

void CumulantEngine::prepare(int k_max, int n_max) {
  std::lock_guard lock(mutex_);
  for (int k = 1; k <= k_max; ++k)
    for (int n = 1; n <= n_max; ++n) flat(k, n);
}

Rational cumulant_bound(int k, int n, const Rational& lambda, const Rational& tau) {
  if (k < 2) throw std::invalid_argument("cumulant_bound needs k >= 2");
  if (n < 1) throw std::invalid_argument("cumulant_bound needs n >= 1");
  Rational base = 2 * (lambda + 1) * tau;
  return pow(base, static_cast<unsigned>(1 + (k - 2) * n)) * pow(Rational(bell(n)), static_cast<unsigned>(k - 2));
}

Rational diagonal_cumulant_at(CumulantEngine& engine, int k, int n, const Rational& lambda, const Rational& tau) {
  std::vector<Rational> lambdas{lambda};
  Assignment at = lambda_assignment(k, lambdas);
  at[registry().tau(1)] = tau;
  return eval(engine.diagonal(k, n), at);
}

Skewness skewness(CumulantEngine& engine, int k, const Rational& lambda, const Rational& tau) {
  Rational c2 = diagonal_cumulant_at(engine, k, 2, lambda, tau);
  if (c2 == 0) throw std::domain_error("zero variance");
  Rational c3 = diagonal_cumulant_at(engine, k, 3, lambda, tau);
  Skewness s{c3 * c3, c2 * c2 * c2, 0};
  s.value = to_double(c3) / std::pow(to_double(c2), 1.5);
  return s;
}

ExcessKurtosis excess_kurtosis(CumulantEngine& engine, int k, const Rational& lambda, const Rational& tau) {
  Rational c2 = diagonal_cumulant_at(engine, k, 2, lambda, tau);
  if (c2 == 0) throw std::domain_error("zero variance");
  Rational value = diagonal_cumulant_at(engine, k, 4, lambda, tau) / (c2 * c2);
  return {value, to_double(value)};
}

}  // namespace khop
