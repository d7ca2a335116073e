#include "hydra/encoder.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "hydra/error.hpp"

namespace hydra {

ItemMemory::ItemMemory(std::size_t dim, std::vector<BipolarHV> symbols)
    : dim_(dim), symbols_(std::move(symbols)) {
  check_dim(dim);
  for (const auto& hv : symbols_) {
    if (hv.dim() != dim) throw Error(Errc::dimension_mismatch, "item memory entry dimension");
  }
}

const BipolarHV& ItemMemory::at(std::size_t id) const {
  if (id >= symbols_.size()) {
    throw Error(Errc::precondition, "symbol id " + std::to_string(id) + " out of range");
  }
  return symbols_[id];
}

LevelMemory::LevelMemory(std::vector<BipolarHV> levels, double value_min, double value_max)
    : levels_(std::move(levels)), min_(value_min), max_(value_max) {
  if (levels_.size() < 2) throw Error(Errc::precondition, "level memory needs at least 2 levels");
  if (!(value_min <= value_max)) throw Error(Errc::precondition, "value_min > value_max");
}

std::string_view to_string(Scheme s) noexcept { return s == Scheme::record ? "record" : "ngram"; }

std::string_view to_string(PermuteMode m) noexcept {
  return m == PermuteMode::shift ? "shift" : "drop";
}

Scheme parse_scheme(std::string_view name) {
  if (name == "record") return Scheme::record;
  if (name == "ngram") return Scheme::ngram;
  throw Error(Errc::configuration, "unknown encoding scheme '" + std::string(name) + "'");
}

PermuteMode parse_permute_mode(std::string_view name) {
  if (name == "shift") return PermuteMode::shift;
  if (name == "drop") return PermuteMode::drop;
  throw Error(Errc::configuration, "unknown permute mode '" + std::string(name) + "'");
}

void EncodingConfig::validate() const {
  check_dim(dim);
  if (scheme == Scheme::ngram && n < 2) {
    throw Error(Errc::configuration, "n-gram encoding requires n >= 2");
  }
  if (levels < 2) throw Error(Errc::configuration, "level count must be >= 2");
  if (drop_width != 8 && drop_width != 16) {
    throw Error(Errc::configuration, "drop width must be 8 or 16");
  }
  if (shift_step == 0 || shift_step >= dim) {
    throw Error(Errc::configuration, "shift step must be in [1, dim)");
  }
}

ItemMemory build_item_memory(std::size_t num_symbols, std::size_t dim, Rng& rng) {
  check_dim(dim);
  if (num_symbols == 0) throw Error(Errc::precondition, "item memory needs at least one symbol");
  const double half = static_cast<double>(dim) / 2.0;
  const double band = 4.0 * std::sqrt(static_cast<double>(dim));
  for (int attempt = 0; attempt < 2; ++attempt) {
    std::vector<BipolarHV> hvs;
    hvs.reserve(num_symbols);
    for (std::size_t s = 0; s < num_symbols; ++s) hvs.push_back(random_hv(dim, rng));
    bool ok = true;
    for (std::size_t i = 0; i < hvs.size() && ok; ++i) {
      for (std::size_t j = i + 1; j < hvs.size(); ++j) {
        const double h = static_cast<double>(hamming(hvs[i], hvs[j]));
        if (h < half - band || h > half + band) {
          ok = false;
          break;
        }
      }
    }
    if (ok) return ItemMemory(dim, std::move(hvs));
  }
  throw Error(Errc::generation, "item memory failed the quasi-orthogonality check twice");
}

LevelMemory build_level_memory(std::size_t num_levels, std::size_t dim, Rng& rng,
                               double value_min, double value_max) {
  check_dim(dim);
  if (num_levels < 2) throw Error(Errc::precondition, "level memory needs at least 2 levels");
  const std::size_t steps = num_levels - 1;
  const std::size_t half = dim / 2;
  if (half / steps < 1) {
    throw Error(Errc::precondition, "too many levels: " + std::to_string(num_levels) +
                                        " for dimension " + std::to_string(dim));
  }
  // Random flip order shared by all levels.
  std::vector<std::size_t> order(dim);
  std::iota(order.begin(), order.end(), 0);
  for (std::size_t i = dim - 1; i > 0; --i) {
    std::swap(order[i], order[rng.below(i + 1)]);
  }

  std::vector<BipolarHV> levels;
  levels.reserve(num_levels);
  levels.push_back(random_hv(dim, rng));
  // Block k has half/steps positions, the first half%steps blocks one more.
  std::size_t pos = 0;
  for (std::size_t k = 0; k < steps; ++k) {
    const std::size_t block = half / steps + (k < half % steps ? 1 : 0);
    BipolarHV next = levels.back();
    for (std::size_t b = 0; b < block; ++b) next.flip(order[pos++]);
    levels.push_back(std::move(next));
  }
  return LevelMemory(std::move(levels), value_min, value_max);
}

std::size_t quantize(double x, const LevelMemory& lm) {
  const double span = lm.value_max() - lm.value_min();
  const auto top = static_cast<std::ptrdiff_t>(lm.size()) - 1;
  if (!(span > 0.0)) return 0;
  const double scaled = std::floor((x - lm.value_min()) / span * static_cast<double>(lm.size()));
  if (!(scaled > 0.0)) return 0;  // also catches NaN
  if (scaled >= static_cast<double>(top)) return static_cast<std::size_t>(top);
  return static_cast<std::size_t>(scaled);
}

AccumulatorHV encode_record(std::span<const double> features, const ItemMemory& im,
                            const LevelMemory& lm, CostLedger* ledger) {
  if (features.size() != im.size()) {
    throw Error(Errc::dimension_mismatch, "record has " + std::to_string(features.size()) +
                                              " features, item memory " +
                                              std::to_string(im.size()));
  }
  if (im.dim() != lm.dim()) throw Error(Errc::dimension_mismatch, "item vs level memory dim");
  AccumulatorHV acc(im.dim());
  for (std::size_t f = 0; f < features.size(); ++f) {
    acc.add(bind(im.at(f), lm.at(quantize(features[f], lm))));
  }
  if (ledger != nullptr) {
    ledger->tally(OpKind::multiplication, features.size(), im.dim());
    ledger->tally(OpKind::addition, features.size(), im.dim());
  }
  return acc;
}

BipolarHV permute_for_position(const BipolarHV& hv, std::size_t k, const EncodingConfig& cfg,
                               Rng& rng) {
  if (k == 0) return hv;
  if (cfg.permute_mode == PermuteMode::shift) {
    return permute_shift(hv, (k * cfg.shift_step) % hv.dim());
  }
  // k successive batch drops: the operand moves by k * drop_width and every
  // pass refills the vacated tail.
  BipolarHV out = hv;
  for (std::size_t r = 0; r < k; ++r) out = permute_drop(out, cfg.drop_width, rng);
  return out;
}

BipolarHV encode_gram(std::span<const std::uint32_t> window, const ItemMemory& im,
                      const EncodingConfig& cfg, Rng& rng, CostLedger* ledger) {
  const std::size_t n = window.size();
  if (n == 0) throw Error(Errc::precondition, "empty n-gram window");
  // Newest symbol unpermuted, older symbols permuted more.
  BipolarHV gram = im.at(window[n - 1]);
  for (std::size_t k = 1; k < n; ++k) {
    gram = bind(gram, permute_for_position(im.at(window[n - 1 - k]), k, cfg, rng));
  }
  // One permutation per older operand, whichever mode moved it.
  if (ledger != nullptr) {
    ledger->tally(OpKind::permutation, n - 1, im.dim());
    ledger->tally(OpKind::multiplication, n - 1, im.dim());
  }
  return gram;
}

AccumulatorHV encode_ngram(std::span<const std::uint32_t> sequence, std::size_t n,
                           const ItemMemory& im, const EncodingConfig& cfg, Rng& rng,
                           CostLedger* ledger) {
  if (n == 0) throw Error(Errc::precondition, "n-gram width must be >= 1");
  if (sequence.size() < n) {
    throw Error(Errc::precondition, "sequence of length " + std::to_string(sequence.size()) +
                                        " shorter than n=" + std::to_string(n));
  }
  AccumulatorHV acc(im.dim());
  for (std::size_t t = 0; t + n <= sequence.size(); ++t) {
    acc.add(encode_gram(sequence.subspan(t, n), im, cfg, rng, ledger));
  }
  if (ledger != nullptr) ledger->tally(OpKind::addition, sequence.size() - n + 1, im.dim());
  return acc;
}

}  // namespace hydra
