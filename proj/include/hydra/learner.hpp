#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "hydra/cam.hpp"
#include "hydra/cost.hpp"
#include "hydra/hv.hpp"
#include "hydra/lta.hpp"
#include "hydra/rng.hpp"

namespace hydra {

enum class HvMode { binary, multibit };
enum class BackendKind { ideal_hamming, ideal_dot, analog_cam };

std::string_view to_string(HvMode m) noexcept;
std::string_view to_string(BackendKind k) noexcept;
HvMode parse_mode(std::string_view name);

// An encoded sample: the int16 accumulator and its binarization.
struct LabeledSample {
  AccumulatorHV encoding;
  BipolarHV binary;
  std::size_t label = 0;

  LabeledSample(AccumulatorHV acc, std::size_t label_);
};

class ClassMemory {
 public:
  static constexpr std::size_t kMaxClasses = 128;

  // Throws Errc::capacity beyond 128 classes.
  ClassMemory(std::size_t num_classes, std::size_t dim, HvMode mode);

  [[nodiscard]] std::size_t size() const noexcept { return accumulators_.size(); }
  [[nodiscard]] std::size_t dim() const noexcept { return dim_; }
  [[nodiscard]] HvMode mode() const noexcept { return mode_; }
  [[nodiscard]] bool deployed() const noexcept { return deployed_; }

  [[nodiscard]] const AccumulatorHV& accumulator(std::size_t c) const { return accumulators_.at(c); }
  AccumulatorHV& accumulator(std::size_t c) { return accumulators_.at(c); }

  // Binary class hypervectors; valid after deploy().
  [[nodiscard]] std::span<const BipolarHV> deployed_hvs() const noexcept { return deployed_hvs_; }
  [[nodiscard]] const BipolarHV& deployed_hv(std::size_t c) const { return deployed_hvs_.at(c); }

  // Binarizes every accumulator. A class that never received a sample
  // binarizes as all ties.
  void deploy();

  friend bool operator==(const ClassMemory&, const ClassMemory&) = default;

 private:
  std::size_t dim_;
  HvMode mode_;
  std::vector<AccumulatorHV> accumulators_;
  std::vector<BipolarHV> deployed_hvs_;
  bool deployed_ = false;
};

struct AnalogSetup {
  VoltageProfile profile;
  AnalogParams params;
  SensingSpec sensing;
  std::uint64_t seed = 0;  // LTA coin flips, mixed with a hash of each query
};

class SimilarityBackend {
 public:
  static SimilarityBackend ideal_hamming() { return SimilarityBackend(BackendKind::ideal_hamming); }
  static SimilarityBackend ideal_dot() { return SimilarityBackend(BackendKind::ideal_dot); }
  static SimilarityBackend analog_cam(AnalogSetup setup);

  [[nodiscard]] BackendKind kind() const noexcept { return kind_; }
  [[nodiscard]] const AnalogSetup& analog() const;

 private:
  explicit SimilarityBackend(BackendKind kind) : kind_(kind) {}
  BackendKind kind_;
  std::optional<AnalogSetup> analog_;
};

struct Prediction {
  std::size_t label = 0;
  double score = 0.0;  // hamming, dot, or ML current (amperes) of the winner
  std::size_t ambiguous_flags = 0;
};

// Nearest stored row to a binary query. Ideal backends break ties toward the
// lower index; the analog backend solves every ML and runs the LTA.
Prediction nearest_row(const BipolarHV& query, std::span<const BipolarHV> rows,
                       const SimilarityBackend& backend, CostLedger* ledger = nullptr);

// Throws Errc::precondition if cm is empty or not deployed.
Prediction predict(const BipolarHV& query, const ClassMemory& cm, const SimilarityBackend& backend,
                   CostLedger* ledger = nullptr);

// Mode-aware: a multibit memory with the ideal_dot backend compares the
// sample accumulator against class accumulators; otherwise the binary forms.
Prediction predict(const LabeledSample& sample, const ClassMemory& cm,
                   const SimilarityBackend& backend, CostLedger* ledger = nullptr);

// Bundles each sample into its class (binary sample in binary mode, the
// accumulator in multibit mode) and deploys.
ClassMemory train(std::span<const LabeledSample> samples, std::size_t num_classes, std::size_t dim,
                  HvMode mode, CostLedger* ledger = nullptr);

// Per epoch, predicts every sample with the epoch-start memory; each miss is
// subtracted from the predicted class and added to the true class. The
// memory is re-deployed at the end of each epoch. epochs == 0 is a no-op.
ClassMemory retrain(ClassMemory cm, std::span<const LabeledSample> samples, std::size_t epochs,
                    const SimilarityBackend& backend, CostLedger* ledger = nullptr);

struct ClusterState {
  std::vector<BipolarHV> centers;
  std::vector<std::size_t> assignments;
  std::size_t epoch = 0;
  std::size_t threshold = 0;
  bool converged = false;
  // Sum of point-to-assigned-center hamming after each assign step.
  std::vector<std::uint64_t> objective;
  // max over centers of hamming(old, new) after each update step.
  std::vector<std::size_t> center_shift;
};

// HDC k-means: random initial centers, nearest-center assignment, centers
// re-bundled and binarized, stop once every center moves less than
// `threshold` bits or after max_epochs. A cluster left empty by an assign
// step is re-seeded from the point farthest from its own center.
ClusterState cluster(std::span<const BipolarHV> points, std::size_t k, std::size_t threshold,
                     std::size_t max_epochs, Rng& rng, const SimilarityBackend& backend,
                     CostLedger* ledger = nullptr);

}  // namespace hydra
