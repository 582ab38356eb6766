#include "khop/box_integral.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace khop {

namespace {

// Walks the cap intervals (c_{a-1}, c_a] assigned to the sorted variables.
// Each variable closes at its interval's cap or stays open below the next variable.
class RegionWalk {
 public:
  RegionWalk(std::vector<Var> levels, std::vector<int> cap_level)
      : levels_(std::move(levels)), cap_level_(std::move(cap_level)) {}

  void run(std::span<const int> order, const MultiPoly& integrand, std::vector<Term>& sink) {
    order_ = order;
    sink_ = &sink;
    step(0, 1, false, integrand);
  }

 private:
  Var var_at(std::size_t rank) const { return registry().bound(order_[rank] + 1); }

  void step(std::size_t rank, int amin, bool forced, const MultiPoly& poly) {
    const std::size_t l = order_.size();
    const Var x = var_at(rank);
    const int amax = forced ? amin : cap_level_[order_[rank]];
    for (int a = amin; a <= amax; ++a) {
      std::optional<Var> lo;
      if (a > 1) lo = levels_[a - 2];
      if (rank + 1 < l && cap_level_[order_[rank + 1]] >= a)
        step(rank + 1, a, true, integrate_between(poly, x, lo, var_at(rank + 1)));
      if (rank + 1 == l) {
        MultiPoly closed = integrate_between(poly, x, lo, levels_[a - 1]);
        for (const auto& t : closed.terms()) sink_->push_back(t);
      } else if (a + 1 <= cap_level_[order_[rank + 1]]) {
        step(rank + 1, a + 1, false, integrate_between(poly, x, lo, levels_[a - 1]));
      }
    }
  }

  std::vector<Var> levels_;
  std::vector<int> cap_level_;
  std::span<const int> order_;
  std::vector<Term>* sink_ = nullptr;
};

}  // namespace

MultiPoly box_integral(std::span<const BoxBlock> blocks, const ChamberEvaluator& integrand) {
  const auto& reg = registry();
  const std::size_t l = blocks.size();
  if (l > static_cast<std::size_t>(kMaxIndexed)) throw std::out_of_range("too many blocks for box_integral");
  for (const auto& b : blocks) {
    if (b.multiplicity < 1) throw std::invalid_argument("block multiplicity must be positive");
    if (reg.role(b.cap) != VarRole::tau) throw std::invalid_argument("box cap must be a tau symbol");
    for (const auto& c : blocks)
      if (!reg.tau_comparable(b.cap, c.cap))
        throw std::invalid_argument("undeclared order between caps " + reg.name(b.cap) + " and " + reg.name(c.cap));
  }
  if (l == 0) return integrand({});

  std::vector<Var> levels;
  for (const auto& b : blocks) levels.push_back(b.cap);
  std::sort(levels.begin(), levels.end(), [&](Var a, Var b) { return reg.tau_less(a, b); });
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
  std::vector<int> cap_level;
  for (const auto& b : blocks)
    cap_level.push_back(static_cast<int>(std::find(levels.begin(), levels.end(), b.cap) - levels.begin()) + 1);

  RegionWalk walk(levels, cap_level);
  std::vector<Term> sink;
  std::vector<int> order(l);
  std::iota(order.begin(), order.end(), 0);
  do {
    MultiPoly f = integrand(order);
    if (!f.is_zero()) walk.run(order, f, sink);
  } while (std::next_permutation(order.begin(), order.end()));
  return MultiPoly::from_terms(std::move(sink));
}

}  // namespace khop
