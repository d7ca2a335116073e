#pragma once

#include <cstddef>
#include <cstdint>
#include <istream>
#include <string>
#include <string_view>
#include <vector>

#include "hydra/hv.hpp"
#include "hydra/rng.hpp"

namespace hydra {

enum class DatasetKind { feature_csv, text_corpus, synthetic_blobs };

std::string_view to_string(DatasetKind k) noexcept;
// Throws Errc::parse for an unknown name.
DatasetKind parse_dataset_kind(std::string_view name);

// Text symbols: 'a'..'z' -> 0..25, everything else (space, punctuation,
// digits) -> 26.
inline constexpr std::size_t kAlphabetSize = 27;
std::uint32_t symbol_of(char c) noexcept;
std::vector<std::uint32_t> to_symbols(std::string_view text);

struct Dataset {
  DatasetKind kind = DatasetKind::feature_csv;
  std::vector<std::vector<double>> features;        // feature_csv
  std::vector<std::vector<std::uint32_t>> sequences;  // text_corpus
  std::vector<BipolarHV> points;                    // synthetic_blobs
  std::vector<std::size_t> labels;                  // empty when unlabeled
  std::vector<std::string> label_names;             // id -> name
  std::vector<double> feature_min;
  std::vector<double> feature_max;

  [[nodiscard]] std::size_t size() const noexcept;
  [[nodiscard]] std::size_t arity() const noexcept { return feature_min.size(); }
  [[nodiscard]] std::size_t num_classes() const noexcept { return label_names.size(); }
  [[nodiscard]] bool labeled() const noexcept { return !labels.empty(); }

  // Recomputes feature_min / feature_max from `features`.
  void compute_ranges();
};

// Comma-separated features with the label in the last column.
Dataset parse_feature_csv(std::istream& in);
// One "label<TAB>text" sample per line.
Dataset parse_text_corpus(std::istream& in);
// One '0'/'1' string per line, optionally followed by ",label". All lines
// must have the same bank-aligned length.
Dataset parse_blobs(std::istream& in);

// Parse failures raise Errc::parse naming the line; a file without samples
// raises Errc::empty_dataset.
Dataset ingest(const std::string& path, DatasetKind kind);

struct RecordSpec {
  std::size_t classes = 8;
  std::size_t features = 32;
  std::size_t samples = 1000;
  double noise = 0.35;  // Gaussian sigma around unit-box class prototypes
};

struct LanguageSpec {
  std::size_t languages = 4;
  std::size_t samples = 400;
  std::size_t min_length = 80;
  std::size_t max_length = 120;
  double spread = 1.5;  // log-normal sigma of transition weights
};

struct BlobSpec {
  std::size_t blobs = 2;
  std::size_t per_blob = 50;
  std::size_t dim = 2048;
  std::size_t max_flips = 0;  // at most dim/16; 0 means dim/16
};

// Class prototypes plus Gaussian noise, labels round robin.
Dataset generate_records(const RecordSpec& spec, Rng& rng);
// Each language is a first-order Markov chain over the 27 symbols.
Dataset generate_language_corpus(const LanguageSpec& spec, Rng& rng);
// Points within max_flips bit flips of planted random centers; labels name
// the source blob.
Dataset generate_blobs(const BlobSpec& spec, Rng& rng);

}  // namespace hydra
