#include "khop/oracles.hpp"

#include "khop/box_integral.hpp"
#include "khop/partitions.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

namespace khop {

namespace {

struct ChainVar {
  int level;     // 1..k-1
  int cap;       // tau index, 1-based
  unsigned preds = 0;
};

// Integral of prod lambda over the order polytope cut by the caps, as a DP over
// placed-variable subsets: each placed variable either closes at its interval
// cap or stays open below the next one (carried in slot Y).
MultiPoly chain_volume(const std::vector<ChainVar>& vars) {
  const auto& reg = registry();
  const Var Y = reg.bound(1), X = reg.bound(2);
  const int V = static_cast<int>(vars.size());
  int levels = 0;
  for (const auto& v : vars) levels = std::max(levels, v.cap);
  auto cap_var = [&](int a) { return reg.tau(a); };

  // state: (mask, interval a, open) -> polynomial
  std::vector<std::map<std::pair<int, bool>, MultiPoly>> dp(1u << V);
  dp[0][{0, false}] = MultiPoly(1);
  MultiPoly total;
  for (unsigned mask = 0; mask < (1u << V); ++mask) {
    for (const auto& [state, poly] : dp[mask]) {
      const auto [a, open] = state;
      if (poly.is_zero()) continue;
      if (mask == (1u << V) - 1) {
        if (!open) total += poly;
        continue;
      }
      for (int v = 0; v < V; ++v) {
        if ((mask >> v) & 1u) continue;
        if ((vars[v].preds & mask) != vars[v].preds) continue;
        MultiPoly body = (open ? rename(poly, std::vector<std::pair<Var, Var>>{{Y, X}}) : poly) *
                         MultiPoly::var(reg.lambda(vars[v].level));
        int lo_a = open ? a : a + 1, hi_a = open ? a : vars[v].cap;
        for (int b = lo_a; b <= hi_a && b <= vars[v].cap; ++b) {
          std::optional<Var> lo;
          if (b > 1) lo = cap_var(b - 1);
          unsigned next = mask | (1u << v);
          dp[next][{b, true}] += integrate_between(body, X, lo, Y);
          dp[next][{b, false}] += integrate_between(body, X, lo, cap_var(b));
        }
      }
    }
    dp[mask].clear();
  }
  return total;
}

// E[prod_i X_{u(block_i)}] at level k, arguments sorted by the chamber ranks.
MultiPoly joint_moment(MomentEngine& engine, int k, std::vector<int> blocks, std::span<const int> rank) {
  std::sort(blocks.begin(), blocks.end(), [&](int x, int y) { return rank[x] < rank[y]; });
  std::vector<int> mults;
  std::vector<std::pair<Var, Var>> mapping;
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    if (i > 0 && blocks[i] == blocks[i - 1]) {
      ++mults.back();
    } else {
      mults.push_back(1);
      mapping.emplace_back(registry().tau(static_cast<int>(mults.size())), registry().bound(blocks[i] + 1));
    }
  }
  return rename(engine.moment(k, mults).poly, mapping);
}

std::vector<int> ranks_of(std::span<const int> order) {
  std::vector<int> rank(order.size());
  for (std::size_t r = 0; r < order.size(); ++r) rank[order[r]] = static_cast<int>(r);
  return rank;
}

// lambda_k^{|caps|} times the box integral of f over the given caps.
MultiPoly level_integral(int k, std::vector<Var> caps, const std::function<MultiPoly(std::span<const int>)>& f) {
  std::vector<BoxBlock> blocks;
  for (Var c : caps) blocks.push_back({1, c});
  auto evaluator = [&](std::span<const int> order) { return f(ranks_of(order)); };
  return box_integral(blocks, evaluator) * pow(MultiPoly::var(registry().lambda(k)), static_cast<unsigned>(caps.size()));
}

void check_taus(std::span<const Var> taus, bool allow_four) {
  const auto& reg = registry();
  for (std::size_t i = 1; i < taus.size(); ++i)
    if (reg.tau_less(taus[i], taus[i - 1])) throw std::invalid_argument("taus must be ascending");
  if (taus.size() == 4) {
    if (!allow_four || !std::all_of(taus.begin(), taus.end(), [&](Var v) { return v == taus[0]; }))
      throw std::invalid_argument("the four-argument expansion needs equal taus");
  }
}

}  // namespace

MultiPoly moment_via_partitions(int k, int n) {
  if (k < 1 || k > 4 || n < 1 || n > 3) throw std::out_of_range("moment_via_partitions needs k <= 4, n <= 3");
  if (k == 1) return MultiPoly(1);
  const auto& parts = set_partitions(n);
  const int levels = k - 1;
  std::vector<std::size_t> choice(levels, 0);
  MultiPoly total;
  for (;;) {
    std::vector<ChainVar> vars;
    std::vector<std::vector<int>> var_of(levels);  // [level][block] -> variable id
    for (int l = 0; l < levels; ++l) {
      const auto& pi = parts[choice[l]];
      for (const auto& b : pi.blocks()) {
        var_of[l].push_back(static_cast<int>(vars.size()));
        vars.push_back({l + 1, b.front() + 1, 0});
      }
    }
    for (int l = 1; l < levels; ++l)
      for (int i = 0; i < n; ++i) {
        int below = var_of[l - 1][parts[choice[l - 1]].block_of(i)];
        int above = var_of[l][parts[choice[l]].block_of(i)];
        vars[above].preds |= 1u << below;
      }
    total += chain_volume(vars);
    int l = 0;
    while (l < levels && ++choice[l] == parts.size()) choice[l++] = 0;
    if (l == levels) break;
  }
  return total;
}

MultiPoly explicit_moment_step(MomentEngine& engine, int k, std::span<const Var> taus) {
  check_taus(taus, true);
  auto m = [&](std::vector<int> args) {
    return [&engine, k, args](std::span<const int> rank) { return joint_moment(engine, k, args, rank); };
  };
  const auto t = [&](int i) { return taus[i - 1]; };
  switch (taus.size()) {
    case 1:
      return level_integral(k, {t(1)}, m({0}));
    case 2:
      return level_integral(k, {t(1)}, m({0, 0})) + level_integral(k, {t(1), t(2)}, m({0, 1}));
    case 3:
      return level_integral(k, {t(1)}, m({0, 0, 0})) + level_integral(k, {t(1), t(3)}, m({0, 0, 1})) +
             level_integral(k, {t(1), t(2)}, m({0, 1, 0})) + level_integral(k, {t(1), t(2)}, m({0, 1, 1})) +
             level_integral(k, {t(1), t(2), t(3)}, m({0, 1, 2}));
    case 4: {
      Var c = t(1);
      return level_integral(k, {c}, m({0, 0, 0, 0})) + 4 * level_integral(k, {c, c}, m({0, 1, 1, 1})) +
             3 * level_integral(k, {c, c}, m({0, 0, 1, 1})) + 6 * level_integral(k, {c, c, c}, m({0, 1, 2, 2})) +
             level_integral(k, {c, c, c, c}, m({0, 1, 2, 3}));
    }
    default:
      throw std::out_of_range("explicit_moment_step needs 1 <= n <= 4");
  }
}

MultiPoly explicit_cumulant_step(MomentEngine& engine, int k, std::span<const Var> taus) {
  check_taus(taus, true);
  const auto t = [&](int i) { return taus[i - 1]; };
  auto E = [&](std::vector<int> args, std::span<const int> rank) { return joint_moment(engine, k, std::move(args), rank); };
  switch (taus.size()) {
    case 2:
      return level_integral(k, {t(1)}, [&](std::span<const int> r) { return E({0, 0}, r); }) +
             level_integral(k, {t(1), t(2)}, [&](std::span<const int> r) { return E({0, 1}, r) - E({0}, r) * E({1}, r); });
    case 3: {
      // kappa(A^2; B) with A on block 0 and B on block 1
      auto square_with = [&](std::span<const int> r) { return E({0, 0, 1}, r) - E({0, 0}, r) * E({1}, r); };
      auto with_square = [&](std::span<const int> r) { return E({0, 1, 1}, r) - E({0}, r) * E({1, 1}, r); };
      auto triple = [&](std::span<const int> r) {
        return E({0, 1, 2}, r) - E({0, 1}, r) * E({2}, r) - E({0, 2}, r) * E({1}, r) - E({1, 2}, r) * E({0}, r) +
               2 * E({0}, r) * E({1}, r) * E({2}, r);
      };
      return level_integral(k, {t(1)}, [&](std::span<const int> r) { return E({0, 0, 0}, r); }) +
             level_integral(k, {t(1), t(3)}, square_with) + level_integral(k, {t(1), t(2)}, square_with) +
             level_integral(k, {t(1), t(2)}, with_square) + level_integral(k, {t(1), t(2), t(3)}, triple);
    }
    case 4: {
      std::vector<MultiPoly> M(5);
      for (std::size_t j = 1; j <= 4; ++j) {
        std::vector<Var> same(j, t(1));
        M[j] = explicit_moment_step(engine, k, same);
      }
      return M[4] - 4 * M[1] * M[3] - 3 * M[2] * M[2] + 12 * M[1] * M[1] * M[2] - 6 * pow(M[1], 4);
    }
    default:
      throw std::out_of_range("explicit_cumulant_step needs 2 <= n <= 4");
  }
}

}  // namespace khop
