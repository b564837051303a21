#pragma once

#include <bit>
#include <cstdint>
#include <vector>

namespace opdyn {

/// Fixed-size bitset over [0, size) with the word-level operations the
/// progression searches need.
class Bitset {
 public:
  Bitset() = default;
  explicit Bitset(std::int64_t size) : size_(size), words_(static_cast<std::size_t>((size + 63) / 64), 0) {}

  std::int64_t size() const { return size_; }
  bool test(std::int64_t i) const {
    return i >= 0 && i < size_ && ((words_[static_cast<std::size_t>(i >> 6)] >> (i & 63)) & 1u);
  }
  void set(std::int64_t i) { words_[static_cast<std::size_t>(i >> 6)] |= std::uint64_t{1} << (i & 63); }
  void reset(std::int64_t i) { words_[static_cast<std::size_t>(i >> 6)] &= ~(std::uint64_t{1} << (i & 63)); }

  std::int64_t count() const {
    std::int64_t c = 0;
    for (auto w : words_) c += std::popcount(w);
    return c;
  }
  bool any() const {
    for (auto w : words_) {
      if (w) return true;
    }
    return false;
  }
  /// Smallest set index >= from, or -1.
  std::int64_t next(std::int64_t from) const {
    if (from < 0) from = 0;
    if (from >= size_) return -1;
    std::size_t wi = static_cast<std::size_t>(from >> 6);
    std::uint64_t w = words_[wi] & (~std::uint64_t{0} << (from & 63));
    while (true) {
      if (w) {
        const std::int64_t i = static_cast<std::int64_t>(wi) * 64 + std::countr_zero(w);
        return i < size_ ? i : -1;
      }
      if (++wi >= words_.size()) return -1;
      w = words_[wi];
    }
  }

  /// this[i] &= other[i + shift] (bits shifted in from beyond the end are 0).
  void and_shifted(const Bitset& other, std::int64_t shift) {
    const std::int64_t ws = shift >> 6;
    const int bs = static_cast<int>(shift & 63);
    const std::int64_t n = static_cast<std::int64_t>(words_.size());
    const std::int64_t on = static_cast<std::int64_t>(other.words_.size());
    for (std::int64_t i = 0; i < n; ++i) {
      const std::int64_t s = i + ws;
      std::uint64_t v = 0;
      if (s < on) {
        v = other.words_[static_cast<std::size_t>(s)] >> bs;
        if (bs != 0 && s + 1 < on) v |= other.words_[static_cast<std::size_t>(s + 1)] << (64 - bs);
      }
      words_[static_cast<std::size_t>(i)] &= v;
    }
  }

  void or_with(const Bitset& other) {
    for (std::size_t i = 0; i < words_.size() && i < other.words_.size(); ++i) words_[i] |= other.words_[i];
  }

  friend bool operator==(const Bitset&, const Bitset&) = default;

 private:
  std::int64_t size_ = 0;
  std::vector<std::uint64_t> words_;
};

}  // namespace opdyn
