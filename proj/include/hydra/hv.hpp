#pragma once

// MAP hypervector algebra over packed binary hypervectors.
//
// Bit convention: bit 0 <-> bipolar +1, bit 1 <-> bipolar -1. Under this
// mapping elementwise multiplication is XOR and the Hamming distance is the
// similarity metric. Dimensions are bank aligned: a multiple of 128 and at
// most 2048 (16 banks of 128 columns).

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hydra/rng.hpp"

namespace hydra {

inline constexpr std::size_t kBankWidth = 128;
inline constexpr std::size_t kMaxBanks = 16;
inline constexpr std::size_t kMaxDim = kBankWidth * kMaxBanks;

// Seed of the per-index tie-break used by binarize().
inline constexpr std::uint64_t kTieBreakSeed = 0x48594452412D5442ULL;

// Throws Errc::alignment unless dim is a positive multiple of 128 and <= 2048.
void check_dim(std::size_t dim);

class BipolarHV {
 public:
  using word_type = std::uint64_t;
  static constexpr std::size_t kWordBits = 64;

  // All-zero (all +1) hypervector.
  explicit BipolarHV(std::size_t dim);

  // Parses a '0'/'1' string; shorter strings are zero-padded up to dim.
  static BipolarHV from_string(std::string_view bits, std::size_t dim);

  [[nodiscard]] std::size_t dim() const noexcept { return dim_; }
  [[nodiscard]] bool bit(std::size_t i) const noexcept {
    return (words_[i / kWordBits] >> (i % kWordBits)) & 1U;
  }
  void set(std::size_t i, bool value) noexcept {
    const word_type mask = word_type{1} << (i % kWordBits);
    if (value) {
      words_[i / kWordBits] |= mask;
    } else {
      words_[i / kWordBits] &= ~mask;
    }
  }
  void flip(std::size_t i) noexcept { words_[i / kWordBits] ^= word_type{1} << (i % kWordBits); }

  // Bipolar value 1 - 2*bit.
  [[nodiscard]] int value(std::size_t i) const noexcept { return bit(i) ? -1 : 1; }

  [[nodiscard]] std::size_t popcount() const noexcept;
  [[nodiscard]] BipolarHV complement() const;
  [[nodiscard]] std::string to_string() const;

  [[nodiscard]] std::span<const word_type> words() const noexcept { return words_; }
  [[nodiscard]] std::span<word_type> words() noexcept { return words_; }

  friend bool operator==(const BipolarHV&, const BipolarHV&) = default;

 private:
  std::size_t dim_;
  std::vector<word_type> words_;
};

// Bundling workspace: int16 counters, one per dimension, counting how many
// bundled hypervectors carried a 1 at that index.
class AccumulatorHV {
 public:
  explicit AccumulatorHV(std::size_t dim);

  // Builds an accumulator from explicit counts (test fixtures, config).
  AccumulatorHV(std::vector<std::int16_t> counts, std::int64_t n_bundled);

  [[nodiscard]] std::size_t dim() const noexcept { return counts_.size(); }
  [[nodiscard]] std::int64_t n_bundled() const noexcept { return n_bundled_; }
  [[nodiscard]] std::span<const std::int16_t> counts() const noexcept { return counts_; }
  [[nodiscard]] std::int16_t count(std::size_t i) const noexcept { return counts_[i]; }

  // Half-adder update: +1 exactly where hv has a 1. Throws Errc::saturation
  // (leaving *this unchanged) if any counter would leave the int16 range.
  void add(const BipolarHV& hv);
  void sub(const BipolarHV& hv);

  // Elementwise accumulator sum, used for multibit class memories.
  void add(const AccumulatorHV& other);
  void sub(const AccumulatorHV& other);

  friend bool operator==(const AccumulatorHV&, const AccumulatorHV&) = default;

 private:
  std::vector<std::int16_t> counts_;
  std::int64_t n_bundled_ = 0;
};

BipolarHV random_hv(std::size_t dim, Rng& rng);

BipolarHV bind(const BipolarHV& a, const BipolarHV& b);

AccumulatorHV bundle_add(AccumulatorHV acc, const BipolarHV& hv);
AccumulatorHV bundle_sub(AccumulatorHV acc, const BipolarHV& hv);

// Majority vote at threshold n_bundled/2; exact ties take a pseudo-random bit
// derived from (tie_seed, index).
BipolarHV binarize(const AccumulatorHV& acc, std::uint64_t tie_seed = kTieBreakSeed);

// Tie-break bit for index i.
bool tie_bit(std::uint64_t tie_seed, std::size_t i) noexcept;

// Circular shift: result[i] = hv[(i + s) mod dim], 0 <= s < dim.
BipolarHV permute_shift(const BipolarHV& hv, std::size_t s);

// Batch-drop permutation: result[i] = hv[i + s] for i < dim - s and the last
// s positions are fresh random bits. s must be 0, 8 or 16.
BipolarHV permute_drop(const BipolarHV& hv, std::size_t s, Rng& rng);

std::size_t hamming(const BipolarHV& a, const BipolarHV& b);

// Bipolar dot product. An accumulator contributes its bipolar sum per index,
// n_bundled - 2*count (proportional to count - n_bundled/2), so a binary
// operand is the one-element case and dot(x, x) == dim.
std::int64_t dot_bipolar(const BipolarHV& a, const BipolarHV& b);
std::int64_t dot_bipolar(const AccumulatorHV& a, const BipolarHV& b);
std::int64_t dot_bipolar(const BipolarHV& a, const AccumulatorHV& b);
std::int64_t dot_bipolar(const AccumulatorHV& a, const AccumulatorHV& b);

}  // namespace hydra
