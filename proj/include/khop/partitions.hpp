#pragma once

#include "khop/rational.hpp"

#include <span>
#include <vector>

namespace khop {

inline constexpr int kMaxPartitionSize = 8;

// Blocks of 0-based indices, each sorted, ordered by smallest element.
class SetPartition {
 public:
  explicit SetPartition(std::vector<std::vector<int>> blocks);
  static SetPartition from_labels(std::span<const int> labels);

  int n() const { return static_cast<int>(block_of_.size()); }
  std::size_t size() const { return blocks_.size(); }
  const std::vector<std::vector<int>>& blocks() const { return blocks_; }
  const std::vector<int>& block(std::size_t j) const { return blocks_[j]; }
  int block_of(int i) const { return block_of_[i]; }

  friend bool operator==(const SetPartition&, const SetPartition&) = default;

 private:
  std::vector<std::vector<int>> blocks_;
  std::vector<int> block_of_;
};

// Restricted-growth-string order; cached, so the reference stays valid.
const std::vector<SetPartition>& set_partitions(int n);

Integer stirling2(int n, int l);
Integer bell(int n);

// True when the join of a and b is the one-block partition.
bool joins_to_top(const SetPartition& a, const SetPartition& b);

// provider(subset) returns the joint cumulant (resp. moment) of the indexed variables.
template <class T, class Provider>
T cumulants_to_moments(Provider&& kappa, int n) {
  T total{};
  for (const auto& pi : set_partitions(n)) {
    T term = kappa(std::span<const int>(pi.block(0)));
    for (std::size_t j = 1; j < pi.size(); ++j) term = term * kappa(std::span<const int>(pi.block(j)));
    total = total + term;
  }
  return total;
}

template <class T, class Provider>
T moments_to_cumulants(Provider&& m, int n) {
  T total{};
  for (const auto& pi : set_partitions(n)) {
    const auto l = static_cast<unsigned>(pi.size());
    Rational weight(factorial(l - 1));
    if (l % 2 == 0) weight = -weight;
    T term = m(std::span<const int>(pi.block(0)));
    for (std::size_t j = 1; j < pi.size(); ++j) term = term * m(std::span<const int>(pi.block(j)));
    total = total + term * weight;
  }
  return total;
}

}  // namespace khop
