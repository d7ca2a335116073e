#pragma once

// Loser-takes-all sensing over match-line currents.
//
// One comparator block sees up to `batch` currents at a time. Rows are fed
// serially: the first batch holds up to 8 rows, every later batch holds the
// buffered winner plus the next 7 rows. Currents below the floor read as
// zero. Candidates within `resolution` of the batch minimum (boundary
// included) cannot be told apart; the block then picks one of them with a
// seeded coin and flags the batch as ambiguous.

#include <cstddef>
#include <span>
#include <vector>

#include "hydra/rng.hpp"

namespace hydra {

struct SensingSpec {
  double resolution = 0.2e-6;  // amperes
  double floor = 1e-9;         // amperes
  std::size_t batch = 8;

  // Throws Errc::configuration unless resolution > floor > 0 and batch >= 2.
  void validate() const;
};

struct BatchOutcome {
  std::size_t index = 0;  // position within the batch
  bool ambiguous = false;
};

struct BatchRecord {
  std::vector<std::size_t> rows;  // row ids compared, winner candidate first after batch 0
  std::size_t winner = 0;         // row id
  bool ambiguous = false;
};

struct LtaDecision {
  std::size_t winner = 0;
  std::vector<BatchRecord> trace;
  std::size_t ambiguous_flags = 0;  // number of ambiguous batches
};

// 2 <= currents.size() <= spec.batch, else Errc::precondition.
BatchOutcome compare_batch(std::span<const double> currents, const SensingSpec& spec, Rng& rng);

// Serial carry-forward argmin over all rows; a single row wins with an empty
// trace.
LtaDecision argmin_serial(std::span<const double> currents, const SensingSpec& spec, Rng& rng);

}  // namespace hydra
