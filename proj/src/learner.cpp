#include "hydra/learner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "hydra/error.hpp"

namespace hydra {
namespace {

std::uint64_t hash_hv(const BipolarHV& hv) {
  std::uint64_t h = 0x51A7E0C3D2B19F47ULL;
  for (const auto w : hv.words()) h = splitmix64(h ^ w);
  return h;
}

BipolarHV deploy_one(const AccumulatorHV& acc) {
  if (acc.n_bundled() > 0) return binarize(acc);
  BipolarHV out(acc.dim());
  for (std::size_t i = 0; i < acc.dim(); ++i) out.set(i, tie_bit(kTieBreakSeed, i));
  return out;
}

void check_labels(std::span<const LabeledSample> samples, std::size_t num_classes,
                  std::size_t dim) {
  for (const auto& s : samples) {
    if (s.label >= num_classes) {
      throw Error(Errc::precondition, "label " + std::to_string(s.label) + " outside " +
                                          std::to_string(num_classes) + " classes");
    }
    if (s.encoding.dim() != dim) throw Error(Errc::dimension_mismatch, "sample dimension");
  }
}

}  // namespace

std::string_view to_string(HvMode m) noexcept { return m == HvMode::binary ? "binary" : "multibit"; }

std::string_view to_string(BackendKind k) noexcept {
  switch (k) {
    case BackendKind::ideal_hamming: return "ideal_hamming";
    case BackendKind::ideal_dot: return "ideal_dot";
    case BackendKind::analog_cam: return "analog_cam";
  }
  return "?";
}

HvMode parse_mode(std::string_view name) {
  if (name == "binary") return HvMode::binary;
  if (name == "multibit") return HvMode::multibit;
  throw Error(Errc::configuration, "unknown mode '" + std::string(name) + "'");
}

LabeledSample::LabeledSample(AccumulatorHV acc, std::size_t label_)
    : encoding(std::move(acc)), binary(binarize(encoding)), label(label_) {}

ClassMemory::ClassMemory(std::size_t num_classes, std::size_t dim, HvMode mode)
    : dim_(dim), mode_(mode) {
  check_dim(dim);
  if (num_classes == 0) throw Error(Errc::precondition, "class memory needs at least one class");
  if (num_classes > kMaxClasses) {
    throw Error(Errc::capacity, std::to_string(num_classes) + " classes exceed 128 CAM rows");
  }
  accumulators_.assign(num_classes, AccumulatorHV(dim));
}

void ClassMemory::deploy() {
  deployed_hvs_.clear();
  deployed_hvs_.reserve(accumulators_.size());
  for (const auto& acc : accumulators_) deployed_hvs_.push_back(deploy_one(acc));
  deployed_ = true;
}

SimilarityBackend SimilarityBackend::analog_cam(AnalogSetup setup) {
  setup.profile.validate();
  setup.params.validate();
  setup.sensing.validate();
  SimilarityBackend b(BackendKind::analog_cam);
  b.analog_ = std::move(setup);
  return b;
}

const AnalogSetup& SimilarityBackend::analog() const {
  if (!analog_) throw Error(Errc::configuration, "backend has no analog setup");
  return *analog_;
}

Prediction nearest_row(const BipolarHV& query, std::span<const BipolarHV> rows,
                       const SimilarityBackend& backend, CostLedger* ledger) {
  if (rows.empty()) throw Error(Errc::precondition, "no rows to search");
  if (ledger != nullptr) ledger->tally(OpKind::search, 1, query.dim());
  Prediction best;
  switch (backend.kind()) {
    case BackendKind::ideal_hamming: {
      std::size_t best_d = std::numeric_limits<std::size_t>::max();
      for (std::size_t r = 0; r < rows.size(); ++r) {
        const std::size_t d = hamming(rows[r], query);
        if (d < best_d) {
          best_d = d;
          best.label = r;
        }
      }
      best.score = static_cast<double>(best_d);
      return best;
    }
    case BackendKind::ideal_dot: {
      std::int64_t best_dot = std::numeric_limits<std::int64_t>::min();
      for (std::size_t r = 0; r < rows.size(); ++r) {
        const std::int64_t d = dot_bipolar(rows[r], query);
        if (d > best_dot) {
          best_dot = d;
          best.label = r;
        }
      }
      best.score = static_cast<double>(best_dot);
      return best;
    }
    case BackendKind::analog_cam: {
      const AnalogSetup& setup = backend.analog();
      const BankLayout layout = load_rows(rows);
      const auto readings = search_analog(layout, query, setup.profile, setup.params);
      std::vector<double> currents;
      currents.reserve(readings.size());
      for (const auto& r : readings) currents.push_back(r.current);
      Rng rng(splitmix64(setup.seed ^ hash_hv(query)));
      const LtaDecision decision = argmin_serial(currents, setup.sensing, rng);
      best.label = decision.winner;
      best.score = currents[decision.winner];
      best.ambiguous_flags = decision.ambiguous_flags;
      return best;
    }
  }
  return best;
}

Prediction predict(const BipolarHV& query, const ClassMemory& cm, const SimilarityBackend& backend,
                   CostLedger* ledger) {
  if (cm.size() == 0) throw Error(Errc::precondition, "empty class memory");
  if (!cm.deployed()) throw Error(Errc::precondition, "class memory is not deployed");
  if (query.dim() != cm.dim()) throw Error(Errc::dimension_mismatch, "query dimension");
  return nearest_row(query, cm.deployed_hvs(), backend, ledger);
}

Prediction predict(const LabeledSample& sample, const ClassMemory& cm,
                   const SimilarityBackend& backend, CostLedger* ledger) {
  if (cm.mode() == HvMode::multibit && backend.kind() == BackendKind::ideal_dot) {
    if (cm.size() == 0) throw Error(Errc::precondition, "empty class memory");
    if (sample.encoding.dim() != cm.dim()) throw Error(Errc::dimension_mismatch, "query dimension");
    if (ledger != nullptr) ledger->tally(OpKind::search, 1, cm.dim());
    // Scores are divided by the class accumulator norm so that classes with
    // more bundled samples do not win on magnitude alone.
    Prediction best;
    double best_score = -std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < cm.size(); ++c) {
      const AccumulatorHV& acc = cm.accumulator(c);
      const auto norm2 = dot_bipolar(acc, acc);
      const double score = norm2 > 0 ? static_cast<double>(dot_bipolar(acc, sample.encoding)) /
                                           std::sqrt(static_cast<double>(norm2))
                                     : 0.0;
      if (score > best_score) {
        best_score = score;
        best.label = c;
      }
    }
    best.score = best_score;
    return best;
  }
  return predict(sample.binary, cm, backend, ledger);
}

ClassMemory train(std::span<const LabeledSample> samples, std::size_t num_classes, std::size_t dim,
                  HvMode mode, CostLedger* ledger) {
  ClassMemory cm(num_classes, dim, mode);
  check_labels(samples, num_classes, dim);
  for (const auto& s : samples) {
    if (mode == HvMode::binary) {
      cm.accumulator(s.label).add(s.binary);
    } else {
      cm.accumulator(s.label).add(s.encoding);
    }
  }
  if (ledger != nullptr) ledger->tally(OpKind::addition, samples.size(), dim);
  cm.deploy();
  return cm;
}

ClassMemory retrain(ClassMemory cm, std::span<const LabeledSample> samples, std::size_t epochs,
                    const SimilarityBackend& backend, CostLedger* ledger) {
  if (epochs == 0) return cm;
  if (!cm.deployed()) throw Error(Errc::precondition, "retrain requires a trained class memory");
  check_labels(samples, cm.size(), cm.dim());
  for (std::size_t e = 0; e < epochs; ++e) {
    const ClassMemory snapshot = cm;
    std::uint64_t updates = 0;
    for (const auto& s : samples) {
      const std::size_t predicted = predict(s, snapshot, backend, ledger).label;
      if (predicted == s.label) continue;
      if (cm.mode() == HvMode::binary) {
        cm.accumulator(predicted).sub(s.binary);
        cm.accumulator(s.label).add(s.binary);
      } else {
        cm.accumulator(predicted).sub(s.encoding);
        cm.accumulator(s.label).add(s.encoding);
      }
      updates += 2;
    }
    if (ledger != nullptr) ledger->tally(OpKind::addition, updates, cm.dim());
    cm.deploy();
    if (updates == 0) break;
  }
  return cm;
}

ClusterState cluster(std::span<const BipolarHV> points, std::size_t k, std::size_t threshold,
                     std::size_t max_epochs, Rng& rng, const SimilarityBackend& backend,
                     CostLedger* ledger) {
  if (k < 2) throw Error(Errc::precondition, "clustering needs K >= 2");
  if (k > ClassMemory::kMaxClasses) throw Error(Errc::capacity, "K exceeds 128 CAM rows");
  if (points.size() < k) throw Error(Errc::precondition, "fewer points than clusters");
  if (max_epochs == 0) throw Error(Errc::precondition, "max_epochs must be >= 1");
  const std::size_t dim = points.front().dim();
  for (const auto& p : points) {
    if (p.dim() != dim) throw Error(Errc::dimension_mismatch, "points must share one dimension");
  }

  ClusterState state;
  state.threshold = threshold;
  state.centers.reserve(k);
  for (std::size_t c = 0; c < k; ++c) state.centers.push_back(random_hv(dim, rng));
  state.assignments.assign(points.size(), 0);

  for (std::size_t epoch = 1; epoch <= max_epochs; ++epoch) {
    state.epoch = epoch;
    std::vector<std::size_t> members(k, 0);
    for (std::size_t p = 0; p < points.size(); ++p) {
      state.assignments[p] = nearest_row(points[p], state.centers, backend, ledger).label;
      ++members[state.assignments[p]];
    }
    // Re-seed empty clusters farthest-first: take the point farthest from
    // every occupied cluster's member bundle (the centers themselves are
    // still random in epoch 1), from a cluster that can spare one.
    if (std::find(members.begin(), members.end(), 0U) != members.end()) {
      std::vector<AccumulatorHV> sums(k, AccumulatorHV(dim));
      for (std::size_t p = 0; p < points.size(); ++p) sums[state.assignments[p]].add(points[p]);
      std::vector<BipolarHV> anchors;
      for (std::size_t c = 0; c < k; ++c) {
        if (members[c] != 0) anchors.push_back(binarize(sums[c]));
      }
      for (std::size_t c = 0; c < k; ++c) {
        if (members[c] != 0) continue;
        std::size_t worst = points.size();
        std::size_t worst_d = 0;
        for (std::size_t p = 0; p < points.size(); ++p) {
          if (members[state.assignments[p]] < 2) continue;
          std::size_t d = dim;
          for (const auto& a : anchors) d = std::min(d, hamming(points[p], a));
          if (worst == points.size() || d > worst_d) {
            worst = p;
            worst_d = d;
          }
        }
        --members[state.assignments[worst]];
        state.assignments[worst] = c;
        members[c] = 1;
        state.centers[c] = points[worst];
        anchors.push_back(points[worst]);
      }
    }
    std::uint64_t objective = 0;
    for (std::size_t p = 0; p < points.size(); ++p) {
      objective += hamming(points[p], state.centers[state.assignments[p]]);
    }
    state.objective.push_back(objective);

    std::vector<AccumulatorHV> sums(k, AccumulatorHV(dim));
    for (std::size_t p = 0; p < points.size(); ++p) sums[state.assignments[p]].add(points[p]);
    if (ledger != nullptr) ledger->tally(OpKind::addition, points.size(), dim);
    std::size_t shift = 0;
    for (std::size_t c = 0; c < k; ++c) {
      BipolarHV updated = binarize(sums[c]);
      shift = std::max(shift, hamming(updated, state.centers[c]));
      state.centers[c] = std::move(updated);
    }
    state.center_shift.push_back(shift);
    if (shift < threshold) {
      state.converged = true;
      break;
    }
  }
  return state;
}

}  // namespace hydra
