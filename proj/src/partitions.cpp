#include "khop/partitions.hpp"

#include <algorithm>
#include <array>
#include <mutex>
#include <numeric>
#include <stdexcept>

namespace khop {

SetPartition::SetPartition(std::vector<std::vector<int>> blocks) : blocks_(std::move(blocks)) {
  int n = 0;
  for (auto& b : blocks_) {
    if (b.empty()) throw std::invalid_argument("empty block");
    std::sort(b.begin(), b.end());
    n += static_cast<int>(b.size());
  }
  std::sort(blocks_.begin(), blocks_.end(), [](const auto& a, const auto& b) { return a.front() < b.front(); });
  block_of_.assign(n, -1);
  for (std::size_t j = 0; j < blocks_.size(); ++j)
    for (int i : blocks_[j]) {
      if (i < 0 || i >= n || block_of_[i] != -1) throw std::invalid_argument("blocks do not partition 0..n-1");
      block_of_[i] = static_cast<int>(j);
    }
}

SetPartition SetPartition::from_labels(std::span<const int> labels) {
  std::vector<std::vector<int>> blocks;
  std::vector<int> slot;
  for (int i = 0; i < static_cast<int>(labels.size()); ++i) {
    int lab = labels[i];
    if (lab < 0) throw std::invalid_argument("negative block label");
    if (static_cast<int>(slot.size()) <= lab) slot.resize(lab + 1, -1);
    if (slot[lab] == -1) {
      slot[lab] = static_cast<int>(blocks.size());
      blocks.emplace_back();
    }
    blocks[slot[lab]].push_back(i);
  }
  return SetPartition(std::move(blocks));
}

namespace {

std::vector<SetPartition> enumerate(int n) {
  std::vector<SetPartition> out;
  std::vector<int> rgs(n, 0), maxima(n, 0);
  for (;;) {
    out.push_back(SetPartition::from_labels(rgs));
    int i = n - 1;
    while (i > 0 && rgs[i] == maxima[i - 1] + 1) --i;
    if (i == 0) break;
    ++rgs[i];
    maxima[i] = std::max(maxima[i - 1], rgs[i]);
    for (int j = i + 1; j < n; ++j) {
      rgs[j] = 0;
      maxima[j] = maxima[i];
    }
  }
  return out;
}

void check_range(int n) {
  if (n < 1 || n > kMaxPartitionSize)
    throw std::out_of_range("partition size must be in 1.." + std::to_string(kMaxPartitionSize));
}

}  // namespace

const std::vector<SetPartition>& set_partitions(int n) {
  check_range(n);
  static std::array<std::vector<SetPartition>, kMaxPartitionSize + 1> cache;
  static std::array<std::once_flag, kMaxPartitionSize + 1> flags;
  std::call_once(flags[n], [n] { cache[n] = enumerate(n); });
  return cache[n];
}

Integer stirling2(int n, int l) {
  if (n < 0 || l < 0) throw std::out_of_range("stirling2 arguments must be nonnegative");
  if (l > n) return 0;
  std::vector<Integer> row(l + 1, 0);
  row[0] = 1;
  for (int i = 1; i <= n; ++i)
    for (int j = std::min(i, l); j >= 0; --j) row[j] = j == 0 ? Integer(0) : Integer(j * row[j] + row[j - 1]);
  return row[l];
}

Integer bell(int n) {
  if (n < 0) throw std::out_of_range("bell argument must be nonnegative");
  Integer total = n == 0 ? 1 : 0;
  for (int l = 1; l <= n; ++l) total += stirling2(n, l);
  return total;
}

bool joins_to_top(const SetPartition& a, const SetPartition& b) {
  const int n = a.n();
  if (b.n() != n) throw std::invalid_argument("partitions of different sets");
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  int components = n;
  for (const auto* p : {&a, &b})
    for (const auto& blk : p->blocks())
      for (std::size_t i = 1; i < blk.size(); ++i) {
        int x = find(blk[0]), y = find(blk[i]);
        if (x != y) {
          parent[x] = y;
          --components;
        }
      }
  return components == 1;
}

}  // namespace khop
