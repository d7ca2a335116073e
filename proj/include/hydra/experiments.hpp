#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "hydra/config.hpp"
#include "hydra/cost.hpp"
#include "hydra/dataset.hpp"
#include "hydra/learner.hpp"

namespace hydra {

// Sub-seeds derived from the master seed, one independent stream per use.
struct Seeds {
  std::uint64_t master = 0;
  std::uint64_t items = 0;
  std::uint64_t levels = 0;
  std::uint64_t split = 0;
  std::uint64_t drop = 0;
  std::uint64_t lta = 0;
  std::uint64_t cluster = 0;
  std::uint64_t data = 0;

  static Seeds derive(std::uint64_t master);
};

// Seeded shuffle, then the first round(n * train_fraction) indices train.
// Pure function of (n, train_fraction, seed).
std::pair<std::vector<std::size_t>, std::vector<std::size_t>> split_indices(
    std::size_t n, double train_fraction, std::uint64_t seed);

// Builds a synthetic dataset by name: "record", "language" or "blobs".
Dataset synthetic_dataset(const std::string& name, const ExperimentConfig& cfg);

// Resolves a --data argument: "synthetic:<name>" or a file path whose
// extension picks the kind (.tsv/.txt text corpus, .bits blobs, else CSV).
Dataset load_dataset(const std::string& spec, const ExperimentConfig& cfg);

// Item / level memories for one dataset at cfg.dim.
class SampleEncoder {
 public:
  SampleEncoder(const ExperimentConfig& cfg, const Dataset& ds, const Seeds& seeds);

  [[nodiscard]] LabeledSample encode(const Dataset& ds, std::size_t index,
                                     CostLedger* ledger = nullptr) const;
  [[nodiscard]] const EncodingConfig& config() const noexcept { return enc_; }

 private:
  EncodingConfig enc_;
  std::optional<ItemMemory> items_;
  std::optional<LevelMemory> levels_;
  std::uint64_t drop_seed_ = 0;
};

VoltageProfile resolve_profile(const ExperimentConfig& cfg);
SimilarityBackend make_backend(const ExperimentConfig& cfg, const Seeds& seeds);

struct QueryRecord {
  std::size_t sample = 0;
  std::size_t label = 0;
  std::size_t predicted = 0;
  double score = 0.0;
  std::size_t ambiguous_flags = 0;
};

struct ClassifyResult {
  double accuracy = 0.0;
  std::size_t train_size = 0;
  std::vector<QueryRecord> queries;
  CostLedger train_ledger;   // training encodes, bundling, retraining
  CostLedger encode_ledger;  // test query encoding
  CostLedger search_ledger;  // test query search
  std::optional<VoltageProfile> profile;
  std::size_t ambiguous_total = 0;
};

// Train on the seeded split, optionally retrain, evaluate the held-out part.
ClassifyResult run_classify(const ExperimentConfig& cfg, const Dataset& ds);

struct ClusterResult {
  ClusterState state;
  std::optional<double> purity;  // only for labeled data
  std::size_t restart = 0;       // which initialization was kept
  CostLedger ledger;             // all restarts
};

ClusterResult run_cluster(const ExperimentConfig& cfg, const Dataset& ds);

// Fraction of points whose cluster's majority label matches their own.
double purity(std::span<const std::size_t> assignments, std::span<const std::size_t> labels);

struct DimSweepRow {
  std::size_t dim = 0;
  double accuracy = 0.0;
  double search_energy_pj_per_query = 0.0;
  double energy_pj_per_query = 0.0;  // encoding plus search
  double latency_ns_per_query = 0.0;
  double cmos_net_energy_pj_per_query = 0.0;
};

std::vector<DimSweepRow> run_dim_sweep(const ExperimentConfig& cfg, const Dataset& ds);

struct ProfileCurve {
  std::string profile_id;
  VoltageProfile profile;
  std::vector<CurvePoint> curve;
  LinearityFit fit;
};

struct TransferResult {
  CalibrationResult calibration;
  std::vector<ProfileCurve> curves;  // "uniform", then "calibrated"
};

TransferResult run_transfer_curve(const ExperimentConfig& cfg);

// CSV writers. Each output starts with a '#' comment block holding the
// resolved config, the derived seeds and run metrics.
void write_header(std::ostream& os, const std::string& verb, const ExperimentConfig& cfg,
                  const std::vector<std::pair<std::string, std::string>>& metrics = {});
void write_classify_csv(std::ostream& os, const ExperimentConfig& cfg, const ClassifyResult& r);
void write_cluster_csv(std::ostream& os, const ExperimentConfig& cfg, const ClusterResult& r);
void write_cluster_epochs_csv(std::ostream& os, const ExperimentConfig& cfg,
                              const ClusterResult& r);
void write_dim_sweep_csv(std::ostream& os, const ExperimentConfig& cfg,
                         const std::vector<DimSweepRow>& rows);
void write_transfer_csv(std::ostream& os, const ExperimentConfig& cfg, const TransferResult& r);
void write_calibration_csv(std::ostream& os, const ExperimentConfig& cfg,
                           const CalibrationResult& r);
void write_cost_csv(std::ostream& os, const ExperimentConfig& cfg, const CostSummary& summary);
void write_ratio_csv(std::ostream& os, const ExperimentConfig& cfg);

}  // namespace hydra
