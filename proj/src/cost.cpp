#include "hydra/cost.hpp"

#include <iomanip>
#include <sstream>

#include "hydra/error.hpp"
#include "hydra/hv.hpp"

namespace hydra {

std::string_view to_string(OpKind op) noexcept {
  switch (op) {
    case OpKind::addition: return "addition";
    case OpKind::permutation: return "permutation";
    case OpKind::multiplication: return "multiplication";
    case OpKind::search: return "search";
  }
  return "?";
}

OpKind parse_op_kind(std::string_view name) {
  for (const auto op : kAllOps) {
    if (name == to_string(op)) return op;
  }
  throw Error(Errc::unknown_op, std::string(name));
}

CostTable CostTable::defaults() {
  CostTable t;
  t[OpKind::addition] = {0.462, 41.08, 385, 61.9, 883.9};
  t[OpKind::permutation] = {15.36, 0.752, 193, 4.66, 415.66};
  t[OpKind::multiplication] = {1.548, 569.0, 385, 3.235, 828.47};
  t[OpKind::search] = {0.985, 14.65, 1922, 29.65, 4139.7};
  return t;
}

void CostTable::validate() const {
  for (const auto op : kAllOps) {
    const OpCost& c = (*this)[op];
    if (!(c.hydra_latency_ns > 0 && c.hydra_energy_pj > 0 && c.cmos_cycles > 0 &&
          c.cmos_energy_pj > 0 && c.cmos_net_energy_pj > 0)) {
      throw Error(Errc::configuration,
                  "cost table entry '" + std::string(to_string(op)) + "' must be positive");
    }
  }
  if (!(mem_read_energy_nj > 0 && cmos_cycle_ns > 0)) {
    throw Error(Errc::configuration, "cost table memory/cycle constants must be positive");
  }
  check_dim(reference_dim);
}

std::array<OpRatio, 4> ratios_vs_cmos(const CostTable& table) {
  table.validate();
  std::array<OpRatio, 4> out{};
  for (const auto op : kAllOps) {
    const OpCost& c = table[op];
    out[static_cast<std::size_t>(op)] = {c.cmos_energy_pj / c.hydra_energy_pj,
                                         c.cmos_net_energy_pj / c.hydra_energy_pj};
  }
  return out;
}

void CostLedger::tally(OpKind op, std::uint64_t count, std::size_t dim) {
  check_dim(dim);
  if (count == 0) return;
  counts_[{op, dim}] += count;
}

void CostLedger::merge(const CostLedger& other) {
  for (const auto& [key, n] : other.counts_) counts_[key] += n;
}

std::uint64_t CostLedger::count(OpKind op) const {
  std::uint64_t n = 0;
  for (const auto& [key, c] : counts_) {
    if (key.first == op) n += c;
  }
  return n;
}

double CostLedger::hydra_energy_pj(const CostTable& table, OpKind op) const {
  double e = 0.0;
  for (const auto& [key, c] : counts_) {
    if (key.first != op) continue;
    const double scale = static_cast<double>(key.second) / static_cast<double>(table.reference_dim);
    e += static_cast<double>(c) * table[op].hydra_energy_pj * scale;
  }
  return e;
}

double CostLedger::hydra_energy_pj(const CostTable& table) const {
  double e = 0.0;
  for (const auto op : kAllOps) e += hydra_energy_pj(table, op);
  return e;
}

double CostLedger::hydra_latency_ns(const CostTable& table, OpKind op) const {
  return static_cast<double>(count(op)) * table[op].hydra_latency_ns;
}

double CostLedger::hydra_latency_ns(const CostTable& table) const {
  double t = 0.0;
  for (const auto op : kAllOps) t += hydra_latency_ns(table, op);
  return t;
}

double CostLedger::cmos_energy_pj(const CostTable& table) const {
  double e = 0.0;
  for (const auto op : kAllOps) e += static_cast<double>(count(op)) * table[op].cmos_energy_pj;
  return e;
}

double CostLedger::cmos_net_energy_pj(const CostTable& table, OpKind op) const {
  return static_cast<double>(count(op)) * table[op].cmos_net_energy_pj;
}

double CostLedger::cmos_net_energy_pj(const CostTable& table) const {
  double e = 0.0;
  for (const auto op : kAllOps) e += cmos_net_energy_pj(table, op);
  return e;
}

double CostLedger::cmos_latency_ns(const CostTable& table) const {
  double t = 0.0;
  for (const auto op : kAllOps) {
    t += static_cast<double>(count(op)) * table[op].cmos_cycles * table.cmos_cycle_ns;
  }
  return t;
}

CostLedger tally(CostLedger ledger, OpKind op, std::uint64_t count, std::size_t dim) {
  ledger.tally(op, count, dim);
  return ledger;
}

CostLedger tally(CostLedger ledger, std::string_view op, std::uint64_t count, std::size_t dim) {
  ledger.tally(parse_op_kind(op), count, dim);
  return ledger;
}

CostSummary report(const CostLedger& ledger, const CostTable& table, std::uint64_t queries) {
  CostSummary s;
  s.queries = queries;
  for (const auto op : kAllOps) {
    CostRow& row = s.rows[static_cast<std::size_t>(op)];
    row.op = op;
    row.count = ledger.count(op);
    row.hydra_energy_pj = ledger.hydra_energy_pj(table, op);
    row.hydra_latency_ns = ledger.hydra_latency_ns(table, op);
    row.cmos_energy_pj = static_cast<double>(row.count) * table[op].cmos_energy_pj;
    row.cmos_net_energy_pj = ledger.cmos_net_energy_pj(table, op);
    row.cmos_latency_ns = static_cast<double>(row.count) * table[op].cmos_cycles * table.cmos_cycle_ns;
    s.total.count += row.count;
    s.total.hydra_energy_pj += row.hydra_energy_pj;
    s.total.hydra_latency_ns += row.hydra_latency_ns;
    s.total.cmos_energy_pj += row.cmos_energy_pj;
    s.total.cmos_net_energy_pj += row.cmos_net_energy_pj;
    s.total.cmos_latency_ns += row.cmos_latency_ns;
  }
  if (queries > 0 && s.total.hydra_latency_ns > 0) {
    s.hydra_queries_per_second = static_cast<double>(queries) / (s.total.hydra_latency_ns * 1e-9);
    s.cmos_queries_per_second = static_cast<double>(queries) / (s.total.cmos_latency_ns * 1e-9);
  }
  if (s.total.hydra_energy_pj > 0) {
    s.energy_reduction = s.total.cmos_net_energy_pj / s.total.hydra_energy_pj;
  }
  return s;
}

void write_csv(std::ostream& os, const CostSummary& summary) {
  os << "op,count,hydra_energy_pj,hydra_latency_ns,cmos_energy_pj,cmos_net_energy_pj,"
        "cmos_latency_ns\n";
  auto line = [&os](std::string_view name, const CostRow& r) {
    os << name << ',' << r.count << ',' << std::setprecision(12) << r.hydra_energy_pj << ','
       << r.hydra_latency_ns << ',' << r.cmos_energy_pj << ',' << r.cmos_net_energy_pj << ','
       << r.cmos_latency_ns << '\n';
  };
  for (const auto& r : summary.rows) line(to_string(r.op), r);
  line("total", summary.total);
}

std::string to_text(const CostSummary& summary) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(3);
  os << std::left << std::setw(16) << "op" << std::right << std::setw(10) << "count"
     << std::setw(18) << "hydra pJ" << std::setw(16) << "hydra ns" << std::setw(18)
     << "cmos net pJ" << std::setw(16) << "cmos ns" << '\n';
  auto line = [&os](std::string_view name, const CostRow& r) {
    os << std::left << std::setw(16) << name << std::right << std::setw(10) << r.count
       << std::setw(18) << r.hydra_energy_pj << std::setw(16) << r.hydra_latency_ns
       << std::setw(18) << r.cmos_net_energy_pj << std::setw(16) << r.cmos_latency_ns << '\n';
  };
  for (const auto& r : summary.rows) line(to_string(r.op), r);
  line("total", summary.total);
  if (summary.queries > 0) {
    os << "queries: " << summary.queries << "  hydra q/s: " << std::setprecision(1)
       << summary.hydra_queries_per_second << "  cmos q/s: " << summary.cmos_queries_per_second
       << '\n';
  }
  if (summary.energy_reduction > 0) {
    os << "net energy reduction vs CMOS: " << std::setprecision(2) << summary.energy_reduction
       << "x\n";
  }
  return os.str();
}

}  // namespace hydra
