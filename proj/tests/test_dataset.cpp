#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <functional>
#include <fstream>
#include <set>
#include <sstream>

#include "hydra/dataset.hpp"
#include "hydra/error.hpp"

using namespace hydra;

namespace {

Error parse_failure(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e;
  }
  ADD_FAILURE() << "expected hydra::Error";
  return Error(Errc::precondition, "none");
}

}  // namespace

TEST(FeatureCsv, ThreeLines) {
  std::istringstream in("0.5,1.0,a\n-1,2,b\n\n3,0.25,a\n");
  const Dataset ds = parse_feature_csv(in);
  EXPECT_EQ(ds.size(), 3U);
  EXPECT_EQ(ds.arity(), 2U);
  EXPECT_EQ(ds.num_classes(), 2U);
  EXPECT_EQ(ds.labels, (std::vector<std::size_t>{0, 1, 0}));
  EXPECT_EQ(ds.label_names, (std::vector<std::string>{"a", "b"}));
  EXPECT_EQ(ds.feature_min, (std::vector<double>{-1, 0.25}));
  EXPECT_EQ(ds.feature_max, (std::vector<double>{3, 2}));
}

TEST(FeatureCsv, RaggedRowNamesTheLine) {
  std::istringstream in("1,2,a\n1,2,3,b\n");
  const Error e = parse_failure([&] { parse_feature_csv(in); });
  EXPECT_EQ(e.code(), Errc::parse);
  EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos);
}

TEST(FeatureCsv, NonNumericAndEmpty) {
  std::istringstream bad("1,x,a\n");
  EXPECT_EQ(parse_failure([&] { parse_feature_csv(bad); }).code(), Errc::parse);
  std::istringstream empty("");
  EXPECT_EQ(parse_failure([&] { parse_feature_csv(empty); }).code(), Errc::empty_dataset);
}

TEST(TextCorpus, ParsesAndMapsSymbols) {
  std::istringstream in("en\tHi, yo\nfr\tbon\n");
  const Dataset ds = parse_text_corpus(in);
  ASSERT_EQ(ds.size(), 2U);
  EXPECT_EQ(ds.sequences[0], (std::vector<std::uint32_t>{7, 8, 26, 26, 24, 14}));
  EXPECT_EQ(ds.label_names[1], "fr");
  std::istringstream bad("no tab here\n");
  EXPECT_EQ(parse_failure([&] { parse_text_corpus(bad); }).code(), Errc::parse);
}

TEST(Blobs, ParsesLabeledAndChecksLength) {
  const std::string row(128, '1');
  std::istringstream in(row + ",x\n" + std::string(128, '0') + ",y\n");
  const Dataset ds = parse_blobs(in);
  EXPECT_EQ(ds.size(), 2U);
  EXPECT_EQ(ds.points[0].popcount(), 128U);
  EXPECT_EQ(ds.labels, (std::vector<std::size_t>{0, 1}));
  std::istringstream ragged(row + "\n" + std::string(256, '0') + "\n");
  EXPECT_EQ(parse_failure([&] { parse_blobs(ragged); }).code(), Errc::parse);
  std::istringstream unaligned(std::string(100, '0') + "\n");
  EXPECT_EQ(parse_failure([&] { parse_blobs(unaligned); }).code(), Errc::parse);
}

TEST(Ingest, ReadsFilesAndRejectsMissing) {
  const auto path = std::filesystem::temp_directory_path() / "hydra_ingest_test.csv";
  {
    std::ofstream out(path);
    out << "1,2,a\n3,4,b\n";
  }
  EXPECT_EQ(ingest(path.string(), DatasetKind::feature_csv).size(), 2U);
  std::filesystem::remove(path);
  EXPECT_EQ(parse_failure([&] { ingest(path.string(), DatasetKind::feature_csv); }).code(),
            Errc::parse);
  EXPECT_EQ(parse_dataset_kind("text_corpus"), DatasetKind::text_corpus);
  EXPECT_EQ(parse_failure([] { parse_dataset_kind("audio"); }).code(), Errc::parse);
}

TEST(Generators, RecordsAreBalancedAndDeterministic) {
  RecordSpec spec;
  spec.samples = 80;
  Rng a(1), b(1);
  const Dataset x = generate_records(spec, a), y = generate_records(spec, b);
  EXPECT_EQ(x.features, y.features);
  EXPECT_EQ(x.size(), 80U);
  EXPECT_EQ(x.arity(), 32U);
  std::vector<int> per(8, 0);
  for (const auto l : x.labels) ++per[l];
  for (const int n : per) EXPECT_EQ(n, 10);
}

TEST(Generators, LanguageCorpusShape) {
  LanguageSpec spec;
  spec.samples = 40;
  Rng rng(2);
  const Dataset ds = generate_language_corpus(spec, rng);
  EXPECT_EQ(ds.size(), 40U);
  EXPECT_EQ(ds.num_classes(), 4U);
  for (const auto& s : ds.sequences) {
    EXPECT_GE(s.size(), 80U);
    EXPECT_LE(s.size(), 120U);
    for (const auto sym : s) EXPECT_LT(sym, kAlphabetSize);
  }
}

TEST(Generators, BlobsStayNearTheirCenter) {
  BlobSpec spec;
  spec.blobs = 3;
  spec.per_blob = 20;
  spec.dim = 1024;
  Rng rng(3);
  const Dataset ds = generate_blobs(spec, rng);
  ASSERT_EQ(ds.size(), 60U);
  // Two points of one blob are within 2 * dim/16 of each other.
  for (std::size_t p = 0; p < ds.size(); ++p) {
    for (std::size_t q = p + 1; q < ds.size(); ++q) {
      if (ds.labels[p] == ds.labels[q]) {
        EXPECT_LE(hamming(ds.points[p], ds.points[q]), 128U);
      } else {
        EXPECT_GT(hamming(ds.points[p], ds.points[q]), 256U);
      }
    }
  }
  spec.max_flips = 65;
  EXPECT_EQ(parse_failure([&] { generate_blobs(spec, rng); }).code(), Errc::configuration);
}
