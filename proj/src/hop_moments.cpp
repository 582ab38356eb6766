#include "khop/hop_moments.hpp"

#include "khop/box_integral.hpp"
#include "khop/partitions.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace khop {

MomentEngine::MomentEngine(EngineLimits limits) : limits_(limits) {
  if (limits_.max_k + 1 > kMaxIndexed + 1 || limits_.max_n > kMaxIndexed)
    throw std::out_of_range("engine limits exceed the symbol table");
}

void MomentEngine::check(int k, std::span<const int> mults) const {
  if (k < 1) throw std::invalid_argument("hop count must be at least 1");
  if (mults.empty()) throw std::invalid_argument("empty multiplicity vector");
  int n = 0;
  for (int m : mults) {
    if (m < 1) throw std::invalid_argument("multiplicities must be positive");
    n += m;
  }
  if (k > limits_.max_k || n > limits_.max_n)
    throw std::out_of_range("limits exceeded: k=" + std::to_string(k) + " n=" + std::to_string(n));
}

std::vector<Var> chain_for(std::size_t p) {
  std::vector<Var> chain;
  for (std::size_t j = 0; j < p; ++j) chain.push_back(registry().tau(static_cast<int>(j) + 1));
  return chain;
}

ChamberPoly MomentEngine::moment(int k, std::span<const int> mults) {
  check(k, mults);
  std::vector<int> key(mults.begin(), mults.end());
  return {compute(k, key), chain_for(key.size())};
}

MultiPoly MomentEngine::flat(int k, int n) {
  std::vector<int> ones(n, 1);
  check(k, ones);
  return compute(k, ones);
}

ChamberPoly MomentEngine::moment_by_substitution(int k, std::span<const int> mults) {
  check(k, mults);
  const int n = std::accumulate(mults.begin(), mults.end(), 0);
  std::vector<std::pair<Var, Var>> mapping;
  int i = 1;
  for (std::size_t j = 0; j < mults.size(); ++j)
    for (int c = 0; c < mults[j]; ++c) mapping.emplace_back(registry().tau(i++), registry().tau(static_cast<int>(j) + 1));
  return {rename(flat(k, n), mapping), chain_for(mults.size())};
}

MultiPoly MomentEngine::compute(int k, const std::vector<int>& mults) {
  if (k == 1) return MultiPoly(1);
  std::lock_guard lock(mutex_);
  auto key = std::make_pair(k, mults);
  if (auto it = memo_.find(key); it != memo_.end()) return it->second;
  std::vector<Var> caps;
  for (std::size_t j = 0; j < mults.size(); ++j)
    for (int c = 0; c < mults[j]; ++c) caps.push_back(registry().tau(static_cast<int>(j) + 1));
  MultiPoly result = step(k - 1, caps);
  memo_.emplace(std::move(key), result);
  return result;
}

// m_{k+1} at arguments whose caps are arg_caps (nondecreasing).
MultiPoly MomentEngine::step(int k, std::span<const Var> arg_caps) {
  const auto& reg = registry();
  const int n = static_cast<int>(arg_caps.size());
  const MultiPoly inner = flat(k, n);
  const MultiPoly lam = MultiPoly::var(reg.lambda(k));
  MultiPoly total;
  for (const auto& pi : set_partitions(n)) {
    std::vector<BoxBlock> blocks;
    for (const auto& b : pi.blocks()) blocks.push_back({static_cast<int>(b.size()), arg_caps[b.front()]});
    auto evaluator = [&](std::span<const int> order) {
      std::vector<std::pair<Var, Var>> mapping;
      int pos = 1;
      for (int blk : order)
        for (std::size_t c = 0; c < pi.block(blk).size(); ++c) mapping.emplace_back(reg.tau(pos++), reg.bound(blk + 1));
      return rename(inner, mapping);
    };
    total += box_integral(blocks, evaluator) * pow(lam, static_cast<unsigned>(pi.size()));
  }
  return total;
}

void MomentEngine::prepare(int k_max, int n_max) {
  std::lock_guard lock(mutex_);
  for (int k = 1; k <= k_max; ++k)
    for (int n = 1; n <= n_max; ++n) flat(k, n);
}

std::vector<std::pair<std::pair<int, std::vector<int>>, ChamberPoly>> MomentEngine::entries() const {
  std::lock_guard lock(mutex_);
  std::vector<std::pair<std::pair<int, std::vector<int>>, ChamberPoly>> out;
  for (const auto& [key, poly] : memo_) out.push_back({key, ChamberPoly{poly, chain_for(key.second.size())}});
  return out;
}

MultiPoly equal_lambdas(const MultiPoly& p) {
  std::vector<std::pair<Var, Var>> mapping;
  for (int i = 1; i <= kMaxIndexed; ++i) mapping.emplace_back(registry().lambda(i), registry().lambda());
  return rename(p, mapping);
}

Assignment lambda_assignment(int k, std::span<const Rational> lambdas) {
  Assignment at;
  if (lambdas.size() != 1 && static_cast<int>(lambdas.size()) != k - 1)
    throw std::invalid_argument("expected 1 or " + std::to_string(k - 1) + " intensities");
  for (const auto& l : lambdas)
    if (l < 0) throw std::invalid_argument("intensities must be nonnegative");
  for (int i = 1; i < k; ++i) at[registry().lambda(i)] = lambdas.size() == 1 ? lambdas[0] : lambdas[i - 1];
  if (!lambdas.empty()) at[registry().lambda()] = lambdas[0];
  return at;
}

MomentValue moment_at(MomentEngine& engine, int k, std::span<const Rational> taus, std::span<const Rational> lambdas) {
  if (taus.empty()) throw std::invalid_argument("no tau values");
  for (const auto& t : taus)
    if (t < 0) throw std::invalid_argument("tau values must be nonnegative");
  std::vector<Rational> sorted(taus.begin(), taus.end());
  MomentValue out;
  out.resorted = !std::is_sorted(sorted.begin(), sorted.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<int> mults;
  std::vector<Rational> distinct;
  for (const auto& t : sorted) {
    if (!distinct.empty() && distinct.back() == t) {
      ++mults.back();
    } else {
      distinct.push_back(t);
      mults.push_back(1);
    }
  }
  Assignment at = lambda_assignment(k, lambdas);
  for (std::size_t j = 0; j < distinct.size(); ++j) at[registry().tau(static_cast<int>(j) + 1)] = distinct[j];
  out.value = eval(engine.moment(k, mults).poly, at);
  return out;
}

Rational moment_bound(int k, int n, const Rational& lambda, const Rational& tau) {
  if (k < 1 || n < 0) throw std::invalid_argument("moment_bound needs k >= 1 and n >= 0");
  if (lambda < 0 || tau < 0) throw std::invalid_argument("moment_bound needs nonnegative lambda and tau");
  if (n == 0) return 1;
  Rational x = lambda * tau, poisson = 0;
  for (int l = 1; l <= n; ++l) poisson += Rational(stirling2(n, l)) * pow(x, l);
  return pow(poisson, static_cast<unsigned>(k - 1));
}

}  // namespace khop
