#pragma once

#include <cstdint>
#include <vector>

namespace tc {

// Fixed-universe bit set over variables 1..n. Property checks keep one of
// these per circuit node, so the layout stays flat.
class VarSet {
 public:
  VarSet() = default;
  explicit VarSet(int universe) : n_(universe), words_((universe + 64) / 64, 0) {}

  int universe() const { return n_; }

  void add(int var) { words_[var >> 6] |= 1ull << (var & 63); }
  bool contains(int var) const { return (words_[var >> 6] >> (var & 63)) & 1; }

  VarSet& operator|=(const VarSet& o) {
    for (std::size_t i = 0; i < words_.size(); ++i) words_[i] |= o.words_[i];
    return *this;
  }

  bool disjoint(const VarSet& o) const {
    for (std::size_t i = 0; i < words_.size(); ++i)
      if (words_[i] & o.words_[i]) return false;
    return true;
  }

  bool subset_of(const VarSet& o) const {
    for (std::size_t i = 0; i < words_.size(); ++i)
      if (words_[i] & ~o.words_[i]) return false;
    return true;
  }

  bool operator==(const VarSet& o) const { return words_ == o.words_; }
  bool operator!=(const VarSet& o) const { return !(*this == o); }

  bool empty() const {
    for (auto w : words_)
      if (w) return false;
    return true;
  }

  int count() const {
    int c = 0;
    for (auto w : words_) c += __builtin_popcountll(w);
    return c;
  }

  std::vector<int> to_vector() const {
    std::vector<int> out;
    for (int v = 1; v <= n_; ++v)
      if (contains(v)) out.push_back(v);
    return out;
  }

  static VarSet intersection(const VarSet& a, const VarSet& b) {
    VarSet r(a.n_);
    for (std::size_t i = 0; i < r.words_.size(); ++i) r.words_[i] = a.words_[i] & b.words_[i];
    return r;
  }

  static VarSet difference(const VarSet& a, const VarSet& b) {
    VarSet r(a.n_);
    for (std::size_t i = 0; i < r.words_.size(); ++i) r.words_[i] = a.words_[i] & ~b.words_[i];
    return r;
  }

 private:
  int n_ = 0;
  std::vector<std::uint64_t> words_;
};

}  // namespace tc
