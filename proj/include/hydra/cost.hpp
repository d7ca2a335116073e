#pragma once

// Operation cost accounting against the measured HyDra / all-CMOS table.
//
// HyDra energy scales with the number of active banks (dim / reference_dim);
// latency does not, since banks operate in parallel. CMOS figures are charged
// as measured at the reference dimension.

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <ostream>
#include <string>
#include <string_view>
#include <utility>

namespace hydra {

enum class OpKind : std::uint8_t { addition = 0, permutation = 1, multiplication = 2, search = 3 };

inline constexpr std::array<OpKind, 4> kAllOps = {OpKind::addition, OpKind::permutation,
                                                 OpKind::multiplication, OpKind::search};

std::string_view to_string(OpKind op) noexcept;
// Throws Errc::unknown_op.
OpKind parse_op_kind(std::string_view name);

struct OpCost {
  double hydra_latency_ns = 0.0;
  double hydra_energy_pj = 0.0;
  double cmos_cycles = 0.0;
  double cmos_energy_pj = 0.0;
  // CMOS energy including the off-memory operand traffic.
  double cmos_net_energy_pj = 0.0;
};

struct CostTable {
  std::array<OpCost, 4> ops{};
  double mem_read_energy_nj = 0.411;
  double cmos_cycle_ns = 0.5;
  std::size_t reference_dim = 2048;

  // Table 1 values at 7nm, 2048-bit hypervectors.
  static CostTable defaults();

  [[nodiscard]] const OpCost& operator[](OpKind op) const noexcept {
    return ops[static_cast<std::size_t>(op)];
  }
  OpCost& operator[](OpKind op) noexcept { return ops[static_cast<std::size_t>(op)]; }

  // Throws Errc::configuration unless every entry is positive.
  void validate() const;
};

struct OpRatio {
  double energy_ratio = 0.0;      // cmos_energy / hydra_energy
  double net_energy_ratio = 0.0;  // cmos_net_energy / hydra_energy
};

std::array<OpRatio, 4> ratios_vs_cmos(const CostTable& table);

// Operation counts keyed by (kind, active dimension). Energies and latencies
// are derived on demand, so merging ledgers is exact integer addition.
class CostLedger {
 public:
  // Throws Errc::alignment for a dimension that is not bank aligned.
  void tally(OpKind op, std::uint64_t count, std::size_t dim);
  void merge(const CostLedger& other);

  [[nodiscard]] std::uint64_t count(OpKind op) const;
  [[nodiscard]] bool empty() const noexcept { return counts_.empty(); }

  [[nodiscard]] double hydra_energy_pj(const CostTable& table) const;
  [[nodiscard]] double hydra_energy_pj(const CostTable& table, OpKind op) const;
  [[nodiscard]] double hydra_latency_ns(const CostTable& table) const;
  [[nodiscard]] double hydra_latency_ns(const CostTable& table, OpKind op) const;
  [[nodiscard]] double cmos_energy_pj(const CostTable& table) const;
  [[nodiscard]] double cmos_net_energy_pj(const CostTable& table) const;
  [[nodiscard]] double cmos_net_energy_pj(const CostTable& table, OpKind op) const;
  [[nodiscard]] double cmos_latency_ns(const CostTable& table) const;

  [[nodiscard]] const std::map<std::pair<OpKind, std::size_t>, std::uint64_t>& entries()
      const noexcept {
    return counts_;
  }

  friend bool operator==(const CostLedger&, const CostLedger&) = default;

 private:
  std::map<std::pair<OpKind, std::size_t>, std::uint64_t> counts_;
};

// Value-returning form; unknown op names raise Errc::unknown_op.
CostLedger tally(CostLedger ledger, OpKind op, std::uint64_t count, std::size_t dim);
CostLedger tally(CostLedger ledger, std::string_view op, std::uint64_t count, std::size_t dim);

struct CostRow {
  OpKind op{};
  std::uint64_t count = 0;
  double hydra_energy_pj = 0.0;
  double hydra_latency_ns = 0.0;
  double cmos_energy_pj = 0.0;
  double cmos_net_energy_pj = 0.0;
  double cmos_latency_ns = 0.0;
};

struct CostSummary {
  std::array<CostRow, 4> rows{};
  CostRow total{};
  std::uint64_t queries = 0;
  double hydra_queries_per_second = 0.0;
  double cmos_queries_per_second = 0.0;
  double energy_reduction = 0.0;  // cmos_net / hydra, 0 when empty
};

CostSummary report(const CostLedger& ledger, const CostTable& table, std::uint64_t queries = 0);

void write_csv(std::ostream& os, const CostSummary& summary);
std::string to_text(const CostSummary& summary);

}  // namespace hydra
