#include "hydra/lta.hpp"

#include <algorithm>
#include <string>

#include "hydra/error.hpp"

namespace hydra {

void SensingSpec::validate() const {
  if (!(floor > 0.0 && resolution > floor && batch >= 2)) {
    throw Error(Errc::configuration, "sensing spec requires resolution > floor > 0, batch >= 2");
  }
}

BatchOutcome compare_batch(std::span<const double> currents, const SensingSpec& spec, Rng& rng) {
  spec.validate();
  if (currents.size() < 2 || currents.size() > spec.batch) {
    throw Error(Errc::precondition, "batch of " + std::to_string(currents.size()) +
                                        " currents; expected 2.." + std::to_string(spec.batch));
  }
  auto sensed = [&spec](double i) { return i < spec.floor ? 0.0 : i; };
  double lowest = sensed(currents[0]);
  for (const double i : currents) lowest = std::min(lowest, sensed(i));

  std::vector<std::size_t> candidates;
  for (std::size_t k = 0; k < currents.size(); ++k) {
    if (sensed(currents[k]) - lowest <= spec.resolution) candidates.push_back(k);
  }
  if (candidates.size() == 1) return {candidates.front(), false};
  return {candidates[rng.below(candidates.size())], true};
}

LtaDecision argmin_serial(std::span<const double> currents, const SensingSpec& spec, Rng& rng) {
  spec.validate();
  if (currents.empty()) throw Error(Errc::precondition, "argmin over zero rows");
  LtaDecision decision;
  if (currents.size() == 1) return decision;

  std::vector<std::size_t> rows;
  std::vector<double> batch;
  std::size_t next = 0;
  bool have_winner = false;
  while (next < currents.size()) {
    rows.clear();
    if (have_winner) rows.push_back(decision.winner);
    while (rows.size() < spec.batch && next < currents.size()) rows.push_back(next++);

    batch.clear();
    for (const auto r : rows) batch.push_back(currents[r]);
    const BatchOutcome outcome = compare_batch(batch, spec, rng);
    decision.winner = rows[outcome.index];
    have_winner = true;
    if (outcome.ambiguous) ++decision.ambiguous_flags;
    decision.trace.push_back({rows, decision.winner, outcome.ambiguous});
  }
  return decision;
}

}  // namespace hydra
