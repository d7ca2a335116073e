#include "hydra/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>

#include "hydra/error.hpp"

namespace hydra {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

[[noreturn]] void parse_error(std::size_t line, const std::string& what) {
  throw Error(Errc::parse, "line " + std::to_string(line) + ": " + what);
}

double parse_number(std::string_view field, std::size_t line) {
  field = trim(field);
  double value = 0.0;
  const auto* end = field.data() + field.size();
  const auto [ptr, ec] = std::from_chars(field.data(), end, value);
  if (field.empty() || ec != std::errc() || ptr != end || !std::isfinite(value)) {
    parse_error(line, "non-numeric feature '" + std::string(field) + "'");
  }
  return value;
}

class LabelTable {
 public:
  std::size_t id(std::string_view name, Dataset& ds) {
    const auto [it, inserted] = ids_.try_emplace(std::string(name), ds.label_names.size());
    if (inserted) ds.label_names.emplace_back(name);
    return it->second;
  }

 private:
  std::map<std::string, std::size_t, std::less<>> ids_;
};

void require_samples(const Dataset& ds) {
  if (ds.size() == 0) throw Error(Errc::empty_dataset, "no samples");
}

}  // namespace

std::string_view to_string(DatasetKind k) noexcept {
  switch (k) {
    case DatasetKind::feature_csv: return "feature_csv";
    case DatasetKind::text_corpus: return "text_corpus";
    case DatasetKind::synthetic_blobs: return "synthetic_blobs";
  }
  return "?";
}

DatasetKind parse_dataset_kind(std::string_view name) {
  if (name == "feature_csv") return DatasetKind::feature_csv;
  if (name == "text_corpus") return DatasetKind::text_corpus;
  if (name == "synthetic_blobs") return DatasetKind::synthetic_blobs;
  throw Error(Errc::parse, "unknown dataset kind '" + std::string(name) + "'");
}

std::uint32_t symbol_of(char c) noexcept {
  if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  if (c >= 'a' && c <= 'z') return static_cast<std::uint32_t>(c - 'a');
  return 26;
}

std::vector<std::uint32_t> to_symbols(std::string_view text) {
  std::vector<std::uint32_t> out;
  out.reserve(text.size());
  for (const char c : text) out.push_back(symbol_of(c));
  return out;
}

std::size_t Dataset::size() const noexcept {
  switch (kind) {
    case DatasetKind::feature_csv: return features.size();
    case DatasetKind::text_corpus: return sequences.size();
    case DatasetKind::synthetic_blobs: return points.size();
  }
  return 0;
}

void Dataset::compute_ranges() {
  feature_min.clear();
  feature_max.clear();
  if (features.empty()) return;
  feature_min = features.front();
  feature_max = features.front();
  for (const auto& row : features) {
    for (std::size_t f = 0; f < row.size(); ++f) {
      feature_min[f] = std::min(feature_min[f], row[f]);
      feature_max[f] = std::max(feature_max[f], row[f]);
    }
  }
}

Dataset parse_feature_csv(std::istream& in) {
  Dataset ds;
  ds.kind = DatasetKind::feature_csv;
  LabelTable labels;
  std::string line;
  std::size_t line_no = 0;
  std::size_t arity = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    std::vector<std::string_view> fields;
    std::string_view rest(line);
    for (;;) {
      const auto comma = rest.find(',');
      fields.push_back(rest.substr(0, comma));
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (fields.size() < 2) parse_error(line_no, "expected at least one feature and a label");
    if (ds.features.empty()) {
      arity = fields.size() - 1;
    } else if (fields.size() - 1 != arity) {
      parse_error(line_no, "ragged row: " + std::to_string(fields.size() - 1) +
                               " features, expected " + std::to_string(arity));
    }
    std::vector<double> row;
    row.reserve(arity);
    for (std::size_t f = 0; f < arity; ++f) row.push_back(parse_number(fields[f], line_no));
    const auto label = trim(fields.back());
    if (label.empty()) parse_error(line_no, "missing label");
    ds.labels.push_back(labels.id(label, ds));
    ds.features.push_back(std::move(row));
  }
  require_samples(ds);
  ds.compute_ranges();
  return ds;
}

Dataset parse_text_corpus(std::istream& in) {
  Dataset ds;
  ds.kind = DatasetKind::text_corpus;
  LabelTable labels;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) parse_error(line_no, "expected label<TAB>text");
    const auto label = trim(std::string_view(line).substr(0, tab));
    if (label.empty()) parse_error(line_no, "missing label");
    auto text = std::string_view(line).substr(tab + 1);
    if (!text.empty() && text.back() == '\r') text.remove_suffix(1);
    if (text.empty()) parse_error(line_no, "empty text");
    ds.labels.push_back(labels.id(label, ds));
    ds.sequences.push_back(to_symbols(text));
  }
  require_samples(ds);
  return ds;
}

Dataset parse_blobs(std::istream& in) {
  Dataset ds;
  ds.kind = DatasetKind::synthetic_blobs;
  LabelTable labels;
  std::string line;
  std::size_t line_no = 0;
  std::size_t dim = 0;
  bool labeled = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto comma = line.find(',');
    const auto bits = trim(std::string_view(line).substr(0, comma));
    if (bits.find_first_not_of("01") != std::string_view::npos) {
      parse_error(line_no, "point must be a 0/1 string");
    }
    if (ds.points.empty()) {
      dim = bits.size();
      labeled = comma != std::string::npos;
      try {
        check_dim(dim);
      } catch (const Error& e) {
        parse_error(line_no, e.what());
      }
    } else if (bits.size() != dim) {
      parse_error(line_no, "point has " + std::to_string(bits.size()) + " bits, expected " +
                               std::to_string(dim));
    } else if (labeled != (comma != std::string::npos)) {
      parse_error(line_no, "labels must be given for all points or none");
    }
    if (labeled) {
      const auto label = trim(std::string_view(line).substr(comma + 1));
      if (label.empty()) parse_error(line_no, "missing label");
      ds.labels.push_back(labels.id(label, ds));
    }
    ds.points.push_back(BipolarHV::from_string(bits, dim));
  }
  require_samples(ds);
  return ds;
}

Dataset ingest(const std::string& path, DatasetKind kind) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::parse, "cannot open '" + path + "'");
  switch (kind) {
    case DatasetKind::feature_csv: return parse_feature_csv(in);
    case DatasetKind::text_corpus: return parse_text_corpus(in);
    case DatasetKind::synthetic_blobs: return parse_blobs(in);
  }
  throw Error(Errc::parse, "unknown dataset kind");
}

Dataset generate_records(const RecordSpec& spec, Rng& rng) {
  if (spec.classes < 2 || spec.features == 0 || spec.samples < spec.classes || spec.noise < 0.0) {
    throw Error(Errc::configuration, "record generator needs >= 2 classes, >= 1 feature, "
                                     "samples >= classes, noise >= 0");
  }
  Dataset ds;
  ds.kind = DatasetKind::feature_csv;
  std::vector<std::vector<double>> prototypes(spec.classes, std::vector<double>(spec.features));
  for (auto& p : prototypes) {
    for (auto& v : p) v = rng.uniform();
  }
  for (std::size_t c = 0; c < spec.classes; ++c) ds.label_names.push_back("c" + std::to_string(c));
  for (std::size_t s = 0; s < spec.samples; ++s) {
    const std::size_t c = s % spec.classes;
    std::vector<double> row(spec.features);
    for (std::size_t f = 0; f < spec.features; ++f) {
      row[f] = prototypes[c][f] + spec.noise * rng.normal();
    }
    ds.features.push_back(std::move(row));
    ds.labels.push_back(c);
  }
  ds.compute_ranges();
  return ds;
}

Dataset generate_language_corpus(const LanguageSpec& spec, Rng& rng) {
  if (spec.languages < 2 || spec.samples < spec.languages || spec.min_length < 3 ||
      spec.max_length < spec.min_length) {
    throw Error(Errc::configuration, "language generator needs >= 2 languages, samples >= "
                                     "languages and 3 <= min_length <= max_length");
  }
  using Row = std::vector<double>;
  std::vector<std::vector<Row>> cumulative(spec.languages);
  for (auto& lang : cumulative) {
    lang.assign(kAlphabetSize, Row(kAlphabetSize));
    for (auto& row : lang) {
      double total = 0.0;
      for (auto& w : row) {
        total += std::exp(spec.spread * rng.normal());
        w = total;
      }
      for (auto& w : row) w /= total;
    }
  }
  auto draw = [&rng](const Row& cdf) {
    const double u = rng.uniform();
    const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    return static_cast<std::uint32_t>(std::min<std::ptrdiff_t>(it - cdf.begin(), kAlphabetSize - 1));
  };

  Dataset ds;
  ds.kind = DatasetKind::text_corpus;
  for (std::size_t l = 0; l < spec.languages; ++l) ds.label_names.push_back("lang" + std::to_string(l));
  const std::size_t span = spec.max_length - spec.min_length + 1;
  for (std::size_t s = 0; s < spec.samples; ++s) {
    const std::size_t lang = s % spec.languages;
    const std::size_t length = spec.min_length + rng.below(span);
    std::vector<std::uint32_t> seq;
    seq.reserve(length);
    seq.push_back(static_cast<std::uint32_t>(rng.below(kAlphabetSize)));
    while (seq.size() < length) seq.push_back(draw(cumulative[lang][seq.back()]));
    ds.sequences.push_back(std::move(seq));
    ds.labels.push_back(lang);
  }
  return ds;
}

Dataset generate_blobs(const BlobSpec& spec, Rng& rng) {
  check_dim(spec.dim);
  if (spec.blobs < 2 || spec.per_blob == 0) {
    throw Error(Errc::configuration, "blob generator needs >= 2 blobs and >= 1 point per blob");
  }
  if (spec.max_flips > spec.dim / 16) {
    throw Error(Errc::configuration, "max_flips exceeds dim/16");
  }
  const std::size_t max_flips = spec.max_flips == 0 ? spec.dim / 16 : spec.max_flips;
  Dataset ds;
  ds.kind = DatasetKind::synthetic_blobs;
  std::vector<BipolarHV> centers;
  for (std::size_t b = 0; b < spec.blobs; ++b) {
    centers.push_back(random_hv(spec.dim, rng));
    ds.label_names.push_back("blob" + std::to_string(b));
  }
  std::vector<std::size_t> order(spec.dim);
  for (std::size_t p = 0; p < spec.blobs * spec.per_blob; ++p) {
    const std::size_t b = p % spec.blobs;
    BipolarHV point = centers[b];
    const std::size_t flips = rng.below(max_flips + 1);
    std::iota(order.begin(), order.end(), std::size_t{0});
    for (std::size_t i = 0; i < flips; ++i) {
      std::swap(order[i], order[i + rng.below(spec.dim - i)]);
      point.flip(order[i]);
    }
    ds.points.push_back(std::move(point));
    ds.labels.push_back(b);
  }
  return ds;
}

}  // namespace hydra
