#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <vector>

#include "accsim/map.h"

namespace accsim {

// Set of edges as a bit vector over a map's dense edge index.
class EdgeSet {
 public:
  EdgeSet() = default;
  explicit EdgeSet(std::size_t edge_count)
      : size_(edge_count), words_((edge_count + 63) / 64, 0) {}
  EdgeSet(std::size_t edge_count, std::initializer_list<EdgeIndex> members)
      : EdgeSet(edge_count) {
    for (EdgeIndex e : members) insert(e);
  }

  // Resolves ids against `map`; unknown ids throw Error.
  static EdgeSet from_ids(const Map& map,
                          std::initializer_list<std::string_view> ids) {
    EdgeSet set(map.edge_count());
    for (std::string_view id : ids) set.insert(map.edge_index(id));
    return set;
  }

  std::size_t universe_size() const { return size_; }

  bool contains(EdgeIndex e) const {
    return e < size_ && ((words_[e >> 6] >> (e & 63)) & 1U) != 0;
  }
  void insert(EdgeIndex e) { words_[e >> 6] |= std::uint64_t{1} << (e & 63); }
  void erase(EdgeIndex e) { words_[e >> 6] &= ~(std::uint64_t{1} << (e & 63)); }
  void clear() { std::fill(words_.begin(), words_.end(), 0); }
  // Clears and resizes in one step, reusing storage.
  void reset(std::size_t edge_count) {
    size_ = edge_count;
    words_.assign((edge_count + 63) / 64, 0);
  }

  std::size_t count() const {
    std::size_t n = 0;
    for (std::uint64_t w : words_) n += static_cast<std::size_t>(std::popcount(w));
    return n;
  }
  bool empty() const {
    for (std::uint64_t w : words_) {
      if (w != 0) return false;
    }
    return true;
  }

  std::vector<EdgeIndex> members() const {
    std::vector<EdgeIndex> out;
    for (std::size_t w = 0; w < words_.size(); ++w) {
      for (std::uint64_t bits = words_[w]; bits != 0; bits &= bits - 1) {
        out.push_back(static_cast<EdgeIndex>(w * 64 + std::countr_zero(bits)));
      }
    }
    return out;
  }

  bool is_subset_of(const EdgeSet& other) const {
    for (std::size_t w = 0; w < words_.size(); ++w) {
      std::uint64_t theirs = w < other.words_.size() ? other.words_[w] : 0;
      if ((words_[w] & ~theirs) != 0) return false;
    }
    return true;
  }

  std::span<const std::uint64_t> words() const { return words_; }

  friend bool operator==(const EdgeSet&, const EdgeSet&) = default;

 private:
  std::size_t size_ = 0;
  std::vector<std::uint64_t> words_;
};

}  // namespace accsim
