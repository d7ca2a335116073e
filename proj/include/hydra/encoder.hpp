#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "hydra/cost.hpp"
#include "hydra/hv.hpp"
#include "hydra/rng.hpp"

namespace hydra {

// Random basis hypervectors indexed by symbol id (feature position for
// record encoding, alphabet symbol for n-gram encoding).
class ItemMemory {
 public:
  ItemMemory(std::size_t dim, std::vector<BipolarHV> symbols);

  [[nodiscard]] std::size_t dim() const noexcept { return dim_; }
  [[nodiscard]] std::size_t size() const noexcept { return symbols_.size(); }
  [[nodiscard]] const BipolarHV& at(std::size_t id) const;
  [[nodiscard]] std::span<const BipolarHV> symbols() const noexcept { return symbols_; }

 private:
  std::size_t dim_;
  std::vector<BipolarHV> symbols_;
};

// Ordered level hypervectors; hamming(levels[i], levels[j]) grows with |i - j|
// and the two extremes are exactly dim/2 apart.
class LevelMemory {
 public:
  LevelMemory(std::vector<BipolarHV> levels, double value_min, double value_max);

  [[nodiscard]] std::size_t dim() const noexcept { return levels_.front().dim(); }
  [[nodiscard]] std::size_t size() const noexcept { return levels_.size(); }
  [[nodiscard]] const BipolarHV& at(std::size_t level) const { return levels_.at(level); }
  [[nodiscard]] double value_min() const noexcept { return min_; }
  [[nodiscard]] double value_max() const noexcept { return max_; }

 private:
  std::vector<BipolarHV> levels_;
  double min_;
  double max_;
};

enum class Scheme { record, ngram };
enum class PermuteMode { shift, drop };

std::string_view to_string(Scheme s) noexcept;
std::string_view to_string(PermuteMode m) noexcept;
Scheme parse_scheme(std::string_view name);
PermuteMode parse_permute_mode(std::string_view name);

struct EncodingConfig {
  Scheme scheme = Scheme::record;
  std::size_t n = 3;          // n-gram width
  std::size_t levels = 16;    // level count for record encoding
  PermuteMode permute_mode = PermuteMode::shift;
  std::size_t drop_width = 8;  // 8 or 16, drop mode only
  // Rotation per n-gram position in shift mode. 1 is the usual rho^k; setting
  // it to drop_width makes shift and drop mode move operands by equal amounts.
  std::size_t shift_step = 1;
  std::size_t dim = 2048;

  // Throws Errc::configuration / Errc::alignment.
  void validate() const;
};

// Pairwise hamming of generated entries must lie within dim/2 +- 4*sqrt(dim);
// one regeneration is attempted before raising Errc::generation.
ItemMemory build_item_memory(std::size_t num_symbols, std::size_t dim, Rng& rng);

// Progressive disjoint flips: level k flips a further block of the shared
// random position order, block sizes summing to dim/2.
LevelMemory build_level_memory(std::size_t num_levels, std::size_t dim, Rng& rng,
                               double value_min = 0.0, double value_max = 1.0);

std::size_t quantize(double x, const LevelMemory& lm);

// sum_f bind(basis_f, level(x_f)); n_bundled == features.size().
AccumulatorHV encode_record(std::span<const double> features, const ItemMemory& im,
                            const LevelMemory& lm, CostLedger* ledger = nullptr);

// Permutation of `hv` by k positions of the n-gram window under cfg.
BipolarHV permute_for_position(const BipolarHV& hv, std::size_t k, const EncodingConfig& cfg,
                               Rng& rng);

// One gram: bind over k of permute^k(basis of window[n - 1 - k]).
BipolarHV encode_gram(std::span<const std::uint32_t> window, const ItemMemory& im,
                      const EncodingConfig& cfg, Rng& rng, CostLedger* ledger = nullptr);

// Bundles every window of width n. Drop mode draws its fill bits from rng.
AccumulatorHV encode_ngram(std::span<const std::uint32_t> sequence, std::size_t n,
                           const ItemMemory& im, const EncodingConfig& cfg, Rng& rng,
                           CostLedger* ledger = nullptr);

}  // namespace hydra
