#include "khop/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <numeric>
#include <stdexcept>

namespace khop {

namespace {

constexpr double kBudget = 1 << 22;

double midpoint(const PointFunction& f, std::span<const double> caps, int grid) {
  const std::size_t d = caps.size();
  std::vector<int> idx(d, 0);
  std::vector<double> x(d);
  double cell = 1;
  for (double c : caps) cell *= c / grid;
  double sum = 0;
  for (;;) {
    for (std::size_t j = 0; j < d; ++j) x[j] = (idx[j] + 0.5) * caps[j] / grid;
    sum += f(x);
    std::size_t j = 0;
    while (j < d && ++idx[j] == grid) idx[j++] = 0;
    if (j == d) break;
  }
  return sum * cell;
}

}  // namespace

double quadrature(const PointFunction& f, std::span<const double> caps, int grid) {
  if (grid < 2) throw std::invalid_argument("quadrature grid must be at least 2");
  if (caps.size() > 4) throw std::invalid_argument("quadrature supports at most 4 dimensions");
  if (caps.empty()) return f({});
  const double dim = static_cast<double>(caps.size());
  double prev = midpoint(f, caps, grid);
  while (std::pow(2.0 * grid, dim) <= kBudget) {
    grid *= 2;
    double next = midpoint(f, caps, grid);
    double scale = std::max(std::abs(next), 1e-300);
    bool done = std::abs(next - prev) < 1e-4 * scale;
    prev = next;
    if (done) break;
  }
  return prev;
}

PointFunction chamber_function(const ChamberEvaluator& integrand, std::size_t blocks) {
  auto cache = std::make_shared<std::map<std::vector<int>, MultiPoly>>();
  return [integrand, blocks, cache](std::span<const double> x) {
    std::vector<int> order(blocks);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) { return x[a] < x[b]; });
    auto it = cache->find(order);
    if (it == cache->end()) it = cache->emplace(order, integrand(order)).first;
    FloatAssignment at;
    for (std::size_t j = 0; j < blocks; ++j) at[registry().bound(static_cast<int>(j) + 1)] = x[j];
    return eval_float(it->second, at);
  };
}

}  // namespace khop
