#pragma once

#include <numeric>
#include <vector>

namespace holocheck {

class UnionFind {
 public:
  UnionFind() = default;
  explicit UnionFind(std::size_t n) : parent_(n) {
    std::iota(parent_.begin(), parent_.end(), std::size_t{0});
  }

  std::size_t add() {
    parent_.push_back(parent_.size());
    return parent_.size() - 1;
  }

  std::size_t find(std::size_t x) const {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent_[std::max(a, b)] = std::min(a, b);  // smallest id wins, deterministic
  }

  std::size_t size() const { return parent_.size(); }

 private:
  mutable std::vector<std::size_t> parent_;
};

}  // namespace holocheck
