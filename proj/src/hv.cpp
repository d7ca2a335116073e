#include "hydra/hv.hpp"

#include <bit>
#include <limits>
#include <string>

#include "hydra/error.hpp"

namespace hydra {
namespace {

constexpr std::int32_t kCountMax = std::numeric_limits<std::int16_t>::max();
constexpr std::int32_t kCountMin = std::numeric_limits<std::int16_t>::min();

void require_same_dim(std::size_t a, std::size_t b, const char* op) {
  if (a != b) {
    throw Error(Errc::dimension_mismatch,
                std::string(op) + ": " + std::to_string(a) + " vs " + std::to_string(b));
  }
}

// Bipolar sum represented by an accumulator counter.
inline std::int64_t centered(const AccumulatorHV& acc, std::size_t i) {
  return acc.n_bundled() - 2 * static_cast<std::int64_t>(acc.count(i));
}

}  // namespace

void check_dim(std::size_t dim) {
  if (dim == 0 || dim % kBankWidth != 0 || dim > kMaxDim) {
    throw Error(Errc::alignment, "dimension " + std::to_string(dim) +
                                     " is not a multiple of 128 in [128, 2048]");
  }
}

BipolarHV::BipolarHV(std::size_t dim) : dim_(dim) {
  check_dim(dim);
  words_.assign(dim / kWordBits, 0);
}

BipolarHV BipolarHV::from_string(std::string_view bits, std::size_t dim) {
  if (bits.size() > dim) {
    throw Error(Errc::dimension_mismatch, "bit string longer than dimension");
  }
  BipolarHV hv(dim);
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (bits[i] == '1') {
      hv.set(i, true);
    } else if (bits[i] != '0') {
      throw Error(Errc::parse, "bit string may only contain '0' and '1'");
    }
  }
  return hv;
}

std::size_t BipolarHV::popcount() const noexcept {
  std::size_t n = 0;
  for (const auto w : words_) n += static_cast<std::size_t>(std::popcount(w));
  return n;
}

BipolarHV BipolarHV::complement() const {
  BipolarHV out(*this);
  for (auto& w : out.words_) w = ~w;
  return out;
}

std::string BipolarHV::to_string() const {
  std::string s(dim_, '0');
  for (std::size_t i = 0; i < dim_; ++i) {
    if (bit(i)) s[i] = '1';
  }
  return s;
}

AccumulatorHV::AccumulatorHV(std::size_t dim) {
  check_dim(dim);
  counts_.assign(dim, 0);
}

AccumulatorHV::AccumulatorHV(std::vector<std::int16_t> counts, std::int64_t n_bundled)
    : counts_(std::move(counts)), n_bundled_(n_bundled) {
  check_dim(counts_.size());
  if (n_bundled_ < 0) throw Error(Errc::precondition, "n_bundled must be non-negative");
}

void AccumulatorHV::add(const BipolarHV& hv) {
  require_same_dim(dim(), hv.dim(), "bundle_add");
  for (std::size_t i = 0; i < counts_.size(); ++i) {
    if (hv.bit(i) && counts_[i] == kCountMax) {
      throw Error(Errc::saturation, "counter " + std::to_string(i) + " at +32767");
    }
  }
  for (std::size_t i = 0; i < counts_.size(); ++i) {
    counts_[i] = static_cast<std::int16_t>(counts_[i] + (hv.bit(i) ? 1 : 0));
  }
  ++n_bundled_;
}

void AccumulatorHV::sub(const BipolarHV& hv) {
  require_same_dim(dim(), hv.dim(), "bundle_sub");
  if (n_bundled_ == 0) {
    throw Error(Errc::empty_bundle, "cannot subtract from an empty bundle");
  }
  for (std::size_t i = 0; i < counts_.size(); ++i) {
    if (hv.bit(i) && counts_[i] == kCountMin) {
      throw Error(Errc::saturation, "counter " + std::to_string(i) + " at -32768");
    }
  }
  for (std::size_t i = 0; i < counts_.size(); ++i) {
    counts_[i] = static_cast<std::int16_t>(counts_[i] - (hv.bit(i) ? 1 : 0));
  }
  --n_bundled_;
}

void AccumulatorHV::add(const AccumulatorHV& other) {
  require_same_dim(dim(), other.dim(), "bundle_add");
  for (std::size_t i = 0; i < counts_.size(); ++i) {
    const std::int32_t v = std::int32_t{counts_[i]} + other.counts_[i];
    if (v > kCountMax || v < kCountMin) {
      throw Error(Errc::saturation, "counter " + std::to_string(i) + " leaves int16 range");
    }
  }
  for (std::size_t i = 0; i < counts_.size(); ++i) {
    counts_[i] = static_cast<std::int16_t>(counts_[i] + other.counts_[i]);
  }
  n_bundled_ += other.n_bundled_;
}

void AccumulatorHV::sub(const AccumulatorHV& other) {
  require_same_dim(dim(), other.dim(), "bundle_sub");
  if (other.n_bundled_ > n_bundled_) {
    throw Error(Errc::empty_bundle, "subtraction would make n_bundled negative");
  }
  for (std::size_t i = 0; i < counts_.size(); ++i) {
    const std::int32_t v = std::int32_t{counts_[i]} - other.counts_[i];
    if (v > kCountMax || v < kCountMin) {
      throw Error(Errc::saturation, "counter " + std::to_string(i) + " leaves int16 range");
    }
  }
  for (std::size_t i = 0; i < counts_.size(); ++i) {
    counts_[i] = static_cast<std::int16_t>(counts_[i] - other.counts_[i]);
  }
  n_bundled_ -= other.n_bundled_;
}

BipolarHV random_hv(std::size_t dim, Rng& rng) {
  BipolarHV hv(dim);
  for (auto& w : hv.words()) w = rng.next();
  return hv;
}

BipolarHV bind(const BipolarHV& a, const BipolarHV& b) {
  require_same_dim(a.dim(), b.dim(), "bind");
  BipolarHV out(a.dim());
  auto dst = out.words();
  const auto wa = a.words();
  const auto wb = b.words();
  for (std::size_t k = 0; k < dst.size(); ++k) dst[k] = wa[k] ^ wb[k];
  return out;
}

AccumulatorHV bundle_add(AccumulatorHV acc, const BipolarHV& hv) {
  acc.add(hv);
  return acc;
}

AccumulatorHV bundle_sub(AccumulatorHV acc, const BipolarHV& hv) {
  acc.sub(hv);
  return acc;
}

bool tie_bit(std::uint64_t tie_seed, std::size_t i) noexcept {
  return (splitmix64(tie_seed ^ (static_cast<std::uint64_t>(i) * 0xD1B54A32D192ED03ULL)) >> 63) != 0;
}

BipolarHV binarize(const AccumulatorHV& acc, std::uint64_t tie_seed) {
  if (acc.n_bundled() == 0) throw Error(Errc::empty_bundle, "binarize of an empty bundle");
  BipolarHV out(acc.dim());
  const std::int64_t n = acc.n_bundled();
  for (std::size_t i = 0; i < acc.dim(); ++i) {
    const std::int64_t twice = 2 * static_cast<std::int64_t>(acc.count(i));
    if (twice > n) {
      out.set(i, true);
    } else if (twice == n) {
      out.set(i, tie_bit(tie_seed, i));
    }
  }
  return out;
}

BipolarHV permute_shift(const BipolarHV& hv, std::size_t s) {
  const std::size_t dim = hv.dim();
  if (s >= dim) {
    throw Error(Errc::precondition, "shift " + std::to_string(s) + " must be < dim");
  }
  BipolarHV out(dim);
  for (std::size_t i = 0; i < dim; ++i) {
    const std::size_t src = i + s < dim ? i + s : i + s - dim;
    if (hv.bit(src)) out.set(i, true);
  }
  return out;
}

BipolarHV permute_drop(const BipolarHV& hv, std::size_t s, Rng& rng) {
  if (s != 0 && s != 8 && s != 16) {
    throw Error(Errc::configuration, "drop width must be 0, 8 or 16, got " + std::to_string(s));
  }
  const std::size_t dim = hv.dim();
  BipolarHV out(dim);
  for (std::size_t i = 0; i + s < dim; ++i) {
    if (hv.bit(i + s)) out.set(i, true);
  }
  if (s > 0) {
    std::uint64_t fill = rng.next();
    for (std::size_t i = dim - s; i < dim; ++i) {
      out.set(i, (fill & 1U) != 0);
      fill >>= 1;
    }
  }
  return out;
}

std::size_t hamming(const BipolarHV& a, const BipolarHV& b) {
  require_same_dim(a.dim(), b.dim(), "hamming");
  std::size_t n = 0;
  const auto wa = a.words();
  const auto wb = b.words();
  for (std::size_t k = 0; k < wa.size(); ++k) {
    n += static_cast<std::size_t>(std::popcount(wa[k] ^ wb[k]));
  }
  return n;
}

std::int64_t dot_bipolar(const BipolarHV& a, const BipolarHV& b) {
  return static_cast<std::int64_t>(a.dim()) - 2 * static_cast<std::int64_t>(hamming(a, b));
}

std::int64_t dot_bipolar(const AccumulatorHV& a, const BipolarHV& b) {
  require_same_dim(a.dim(), b.dim(), "dot_bipolar");
  std::int64_t sum = 0;
  for (std::size_t i = 0; i < a.dim(); ++i) sum += centered(a, i) * b.value(i);
  return sum;
}

std::int64_t dot_bipolar(const BipolarHV& a, const AccumulatorHV& b) { return dot_bipolar(b, a); }

std::int64_t dot_bipolar(const AccumulatorHV& a, const AccumulatorHV& b) {
  require_same_dim(a.dim(), b.dim(), "dot_bipolar");
  std::int64_t sum = 0;
  for (std::size_t i = 0; i < a.dim(); ++i) sum += centered(a, i) * centered(b, i);
  return sum;
}

}  // namespace hydra
