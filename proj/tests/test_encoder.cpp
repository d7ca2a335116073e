#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "hydra/encoder.hpp"
#include "hydra/error.hpp"

using namespace hydra;

namespace {

template <typename F>
Errc error_code(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected hydra::Error";
  return Errc::precondition;
}

// Elementwise bipolar sum computed directly from bits.
std::vector<int> bit_sums(const std::vector<BipolarHV>& hvs) {
  std::vector<int> out(hvs.front().dim(), 0);
  for (const auto& hv : hvs) {
    for (std::size_t i = 0; i < hv.dim(); ++i) out[i] += hv.bit(i) ? 1 : 0;
  }
  return out;
}

BipolarHV rotate_left(const BipolarHV& hv, std::size_t s) {
  BipolarHV out(hv.dim());
  for (std::size_t i = 0; i < hv.dim(); ++i) out.set(i, hv.bit((i + s) % hv.dim()));
  return out;
}

BipolarHV xor_all(const std::vector<BipolarHV>& hvs) {
  BipolarHV out(hvs.front().dim());
  for (const auto& hv : hvs) {
    for (std::size_t i = 0; i < hv.dim(); ++i) out.set(i, out.bit(i) != hv.bit(i));
  }
  return out;
}

EncodingConfig ngram_config(std::size_t dim, PermuteMode mode = PermuteMode::shift) {
  EncodingConfig cfg;
  cfg.scheme = Scheme::ngram;
  cfg.dim = dim;
  cfg.permute_mode = mode;
  return cfg;
}

}  // namespace

TEST(ItemMemory, TwentySixSymbolsInsideBand) {
  Rng rng(1);
  const ItemMemory im = build_item_memory(26, 2048, rng);
  ASSERT_EQ(im.size(), 26U);
  for (std::size_t i = 0; i < 26; ++i) {
    for (std::size_t j = i + 1; j < 26; ++j) {
      const auto h = hamming(im.at(i), im.at(j));
      EXPECT_GE(h, 843U);
      EXPECT_LE(h, 1205U);
    }
  }
}

TEST(ItemMemory, EdgeCases) {
  Rng rng(2);
  EXPECT_EQ(build_item_memory(1, 128, rng).size(), 1U);
  EXPECT_EQ(error_code([&] { build_item_memory(0, 128, rng); }), Errc::precondition);
  EXPECT_EQ(error_code([&] { build_item_memory(3, 100, rng); }), Errc::alignment);
}

TEST(LevelMemory, ExactDistances) {
  Rng rng(3);
  const LevelMemory two = build_level_memory(2, 2048, rng);
  EXPECT_EQ(hamming(two.at(0), two.at(1)), 1024U);
  const LevelMemory five = build_level_memory(5, 2048, rng);
  EXPECT_EQ(hamming(five.at(0), five.at(4)), 1024U);
  EXPECT_EQ(hamming(five.at(0), five.at(2)), 512U);
  EXPECT_EQ(error_code([&] { build_level_memory(2049, 2048, rng); }), Errc::precondition);
  EXPECT_EQ(error_code([&] { build_level_memory(1, 2048, rng); }), Errc::precondition);
}

TEST(LevelMemory, DistanceGrowsWithLevelGap) {
  Rng rng(4);
  const LevelMemory lm = build_level_memory(16, 1024, rng);
  for (std::size_t i = 0; i < lm.size(); ++i) {
    for (std::size_t j = i; j + 1 < lm.size(); ++j) {
      EXPECT_LE(hamming(lm.at(i), lm.at(j)), hamming(lm.at(i), lm.at(j + 1)));
    }
  }
  EXPECT_EQ(hamming(lm.at(0), lm.at(15)), 512U);
}

TEST(Quantize, Examples) {
  Rng rng(5);
  const LevelMemory lm = build_level_memory(4, 128, rng, -1.0, 3.0);
  EXPECT_EQ(quantize(-1.0, lm), 0U);
  EXPECT_EQ(quantize(3.0, lm), 3U);
  EXPECT_EQ(quantize(1.0, lm), 2U);
  EXPECT_EQ(quantize(-50.0, lm), 0U);
  EXPECT_EQ(quantize(50.0, lm), 3U);
}

TEST(Quantize, Monotone) {
  Rng rng(6);
  const LevelMemory lm = build_level_memory(16, 256, rng);
  std::size_t prev = 0;
  for (int i = -20; i <= 120; ++i) {
    const std::size_t q = quantize(i / 100.0, lm);
    EXPECT_GE(q, prev);
    EXPECT_LT(q, 16U);
    prev = q;
  }
}

TEST(EncodeRecord, SingleFeatureEqualsBoundVector) {
  Rng rng(7);
  const ItemMemory im = build_item_memory(1, 256, rng);
  const LevelMemory lm = build_level_memory(4, 256, rng);
  const std::vector<double> x{0.6};
  const AccumulatorHV acc = encode_record(x, im, lm);
  const BipolarHV bound = bind(im.at(0), lm.at(2));
  EXPECT_EQ(acc.n_bundled(), 1);
  for (std::size_t i = 0; i < 256; ++i) EXPECT_EQ(acc.count(i), bound.bit(i) ? 1 : 0);
}

TEST(EncodeRecord, DuplicatedFeatureGivesEvenCounts) {
  Rng rng(8);
  const BipolarHV basis = random_hv(128, rng);
  const ItemMemory im(128, {basis, basis});
  const LevelMemory lm = build_level_memory(4, 128, rng);
  const std::vector<double> x{0.3, 0.3};
  const AccumulatorHV acc = encode_record(x, im, lm);
  for (const auto c : acc.counts()) EXPECT_TRUE(c == 0 || c == 2);
}

TEST(EncodeRecord, ThreeFeaturesMatchBruteForce) {
  Rng rng(9);
  const ItemMemory im = build_item_memory(3, 384, rng);
  const LevelMemory lm = build_level_memory(8, 384, rng);
  const std::vector<double> x{0.05, 0.55, 0.99};
  const std::vector<std::size_t> level{0, 4, 7};
  std::vector<BipolarHV> bound;
  for (std::size_t f = 0; f < 3; ++f) {
    BipolarHV b(384);
    for (std::size_t i = 0; i < 384; ++i) b.set(i, im.at(f).bit(i) != lm.at(level[f]).bit(i));
    bound.push_back(b);
  }
  const auto expect = bit_sums(bound);
  CostLedger ledger;
  const AccumulatorHV acc = encode_record(x, im, lm, &ledger);
  EXPECT_EQ(acc.n_bundled(), 3);
  for (std::size_t i = 0; i < 384; ++i) EXPECT_EQ(acc.count(i), expect[i]);
  EXPECT_EQ(ledger.count(OpKind::multiplication), 3U);
  EXPECT_EQ(ledger.count(OpKind::addition), 3U);
}

TEST(EncodeRecord, ArityMismatch) {
  Rng rng(10);
  const ItemMemory im = build_item_memory(3, 128, rng);
  const LevelMemory lm = build_level_memory(4, 128, rng);
  const std::vector<double> x{0.1, 0.2};
  EXPECT_EQ(error_code([&] { encode_record(x, im, lm); }), Errc::dimension_mismatch);
}

TEST(EncodeRecord, FeatureOrderMatters) {
  // Each position has its own basis, so swapping values changes the encoding
  // while re-ordering the bundling sum does not.
  Rng rng(11);
  const ItemMemory im = build_item_memory(2, 512, rng);
  const LevelMemory lm = build_level_memory(8, 512, rng);
  const std::vector<double> x{0.1, 0.9}, swapped{0.9, 0.1};
  const AccumulatorHV a = encode_record(x, im, lm);
  EXPECT_NE(a, encode_record(swapped, im, lm));
  AccumulatorHV reordered(512);
  reordered.add(bind(im.at(1), lm.at(quantize(0.9, lm))));
  reordered.add(bind(im.at(0), lm.at(quantize(0.1, lm))));
  EXPECT_EQ(a, reordered);
}

TEST(EncodeNgram, UnigramIsPlainBundling) {
  Rng rng(12);
  const ItemMemory im = build_item_memory(5, 256, rng);
  const std::vector<std::uint32_t> seq{0, 3, 3, 1};
  Rng fill(1);
  const AccumulatorHV acc = encode_ngram(seq, 1, im, ngram_config(256), fill);
  const auto expect = bit_sums({im.at(0), im.at(3), im.at(3), im.at(1)});
  for (std::size_t i = 0; i < 256; ++i) EXPECT_EQ(acc.count(i), expect[i]);
}

TEST(EncodeNgram, BigramSingleWindow) {
  Rng rng(13);
  const ItemMemory im = build_item_memory(2, 256, rng);
  const std::vector<std::uint32_t> seq{0, 1};
  Rng fill(1);
  const AccumulatorHV acc = encode_ngram(seq, 2, im, ngram_config(256), fill);
  const BipolarHV gram = xor_all({rotate_left(im.at(0), 1), im.at(1)});
  EXPECT_EQ(acc.n_bundled(), 1);
  for (std::size_t i = 0; i < 256; ++i) EXPECT_EQ(acc.count(i), gram.bit(i) ? 1 : 0);
}

TEST(EncodeNgram, TrigramShiftMatchesBruteForce) {
  Rng rng(14);
  const ItemMemory im = build_item_memory(4, 512, rng);
  const std::vector<std::uint32_t> seq{2, 0, 3, 3, 1};
  std::vector<BipolarHV> grams;
  for (std::size_t t = 0; t + 3 <= seq.size(); ++t) {
    grams.push_back(xor_all({rotate_left(im.at(seq[t]), 2), rotate_left(im.at(seq[t + 1]), 1),
                             im.at(seq[t + 2])}));
  }
  const auto expect = bit_sums(grams);
  Rng fill(1);
  CostLedger ledger;
  const AccumulatorHV acc = encode_ngram(seq, 3, im, ngram_config(512), fill, &ledger);
  EXPECT_EQ(acc.n_bundled(), 3);
  for (std::size_t i = 0; i < 512; ++i) EXPECT_EQ(acc.count(i), expect[i]);
  EXPECT_EQ(ledger.count(OpKind::permutation), 6U);
  EXPECT_EQ(ledger.count(OpKind::multiplication), 6U);
  EXPECT_EQ(ledger.count(OpKind::addition), 3U);
}

TEST(EncodeNgram, OrderSensitivity) {
  Rng rng(15);
  const ItemMemory im = build_item_memory(5, 512, rng);
  std::vector<std::uint32_t> seq{0, 1, 2, 3, 4, 1};
  std::vector<std::uint32_t> rev(seq.rbegin(), seq.rend());
  Rng f1(1), f2(1);
  EXPECT_NE(encode_ngram(seq, 3, im, ngram_config(512), f1),
            encode_ngram(rev, 3, im, ngram_config(512), f2));
  EXPECT_EQ(encode_ngram(seq, 1, im, ngram_config(512), f1),
            encode_ngram(rev, 1, im, ngram_config(512), f2));
}

TEST(EncodeNgram, ShortSequenceIsAnError) {
  Rng rng(16);
  const ItemMemory im = build_item_memory(2, 128, rng);
  const std::vector<std::uint32_t> seq{0, 1};
  Rng fill(1);
  EXPECT_EQ(error_code([&] { encode_ngram(seq, 3, im, ngram_config(128), fill); }),
            Errc::precondition);
}

TEST(EncodeNgram, DropChangesEachGramInBoundedPositions) {
  Rng rng(17);
  const ItemMemory im = build_item_memory(27, 2048, rng);
  for (std::size_t width : {8U, 16U}) {
    EncodingConfig shift = ngram_config(2048, PermuteMode::shift);
    shift.shift_step = width;
    EncodingConfig drop = ngram_config(2048, PermuteMode::drop);
    drop.drop_width = width;
    for (std::size_t n : {2U, 3U, 4U}) {
      for (int trial = 0; trial < 20; ++trial) {
        std::vector<std::uint32_t> window(n);
        for (auto& s : window) s = static_cast<std::uint32_t>(rng.below(27));
        Rng fill(static_cast<std::uint64_t>(trial));
        const BipolarHV a = encode_gram(window, im, shift, fill);
        const BipolarHV b = encode_gram(window, im, drop, fill);
        EXPECT_LE(hamming(a, b), n * width);
      }
    }
  }
}

TEST(EncodingConfig, Validation) {
  EncodingConfig cfg;
  EXPECT_NO_THROW(cfg.validate());
  cfg.scheme = Scheme::ngram;
  cfg.n = 1;
  EXPECT_EQ(error_code([&] { cfg.validate(); }), Errc::configuration);
  cfg.n = 3;
  cfg.drop_width = 4;
  EXPECT_EQ(error_code([&] { cfg.validate(); }), Errc::configuration);
  cfg.drop_width = 16;
  cfg.dim = 1000;
  EXPECT_EQ(error_code([&] { cfg.validate(); }), Errc::alignment);
  EXPECT_EQ(parse_scheme("ngram"), Scheme::ngram);
  EXPECT_EQ(error_code([] { parse_permute_mode("rotate"); }), Errc::configuration);
}
