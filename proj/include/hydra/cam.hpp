#pragma once

// Behavioral model of the SOT-CAM fabric.
//
// Each bank row is a 128-cell match line (ML). Column 0 sits next to the
// sensing block; column 127 is the far end. The ML is a resistive ladder with
// r_segment ohms between neighbouring cells. The sensing node is held at
// 0 V and a bias current i_bias enters at the far end, giving the ML an
// approximately linear potential gradient. A mismatching cell at column j
// injects
//
//     i_j = g_cell * max(0, gamma * V_search(j) - v_ml(j) - v_th)^2
//
// where v_ml(j) is the local ladder potential, so IR drop reduces the driver
// overdrive of far cells. The node potentials are solved by damped fixed-point
// iteration. A row's reading is the total injected cell current (sensing node
// current minus bias), summed over active banks.

#include <array>
#include <bitset>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hydra/hv.hpp"

namespace hydra {

inline constexpr std::size_t kVoltageLevels = 4;
inline constexpr std::size_t kSegmentWidth = kBankWidth / kVoltageLevels;  // 32 columns

// Device constants; they do not enter the ladder solve.
inline constexpr double kMtjParallelOhms = 1.25e6;
inline constexpr double kMtjAntiParallelOhms = 3.44e6;

using BankBits = std::bitset<kBankWidth>;

// Search voltage per 32-column segment. levels[0] drives columns 0-31
// (nearest the sensing block), levels[3] columns 96-127.
struct VoltageProfile {
  std::array<double, kVoltageLevels> levels{1.0, 1.0, 1.0, 1.0};
  double base_voltage = 1.0;

  static VoltageProfile uniform(double volts = 1.0);

  [[nodiscard]] double voltage_at(std::size_t column) const noexcept {
    return levels[column / kSegmentWidth];
  }

  // Throws Errc::configuration unless levels are in (0, 1.2] and do not
  // increase toward the sensing block.
  void validate() const;

  friend bool operator==(const VoltageProfile&, const VoltageProfile&) = default;
};

struct AnalogParams {
  double r_segment = 1.0;        // ohms per cell pitch of ML interconnect
  double gamma = 0.9;            // mismatch node voltage / search voltage
  double v_th = 0.35;            // driver threshold, volts
  double i_cell_nominal = 1e-6;  // amperes per mismatch at base voltage, no IR drop
  double i_bias = 2e-3;          // ML bias current entering at the far end
  double i_floor = 1e-9;         // smallest sensable current
  double i_operating_max = 150e-6;  // declared per-bank sensing range
  double tolerance = 1e-9;       // relative fixed-point tolerance
  double damping = 0.5;
  int max_iterations = 10000;

  // Square-law scale implied by i_cell_nominal at the base search voltage.
  [[nodiscard]] double g_cell(double base_voltage = 1.0) const noexcept {
    const double ov = gamma * base_voltage - v_th;
    return i_cell_nominal / (ov * ov);
  }

  // Throws Errc::configuration.
  void validate() const;

  friend bool operator==(const AnalogParams&, const AnalogParams&) = default;
};

struct MLReading {
  std::size_t row = 0;
  double current = 0.0;  // amperes, sum of bank_currents
  std::vector<double> bank_currents;
};

struct BankSolution {
  double current = 0.0;
  int iterations = 0;
  std::array<double, kBankWidth> node_voltage{};
  std::array<double, kBankWidth> cell_current{};
};

// Rows of up to 16 banks x 128 columns. Column c of bank k holds bit 128k + c.
class BankLayout {
 public:
  static constexpr std::size_t kMaxRows = 128;

  [[nodiscard]] std::size_t dim() const noexcept { return dim_; }
  [[nodiscard]] std::size_t active_banks() const noexcept { return dim_ / kBankWidth; }
  [[nodiscard]] std::size_t rows() const noexcept { return rows_.size(); }
  [[nodiscard]] std::size_t row_of(std::size_t class_id) const { return row_map_.at(class_id); }
  [[nodiscard]] const BipolarHV& row(std::size_t r) const { return rows_.at(r); }
  [[nodiscard]] bool bit(std::size_t bank, std::size_t r, std::size_t column) const;
  [[nodiscard]] BankBits bank_bits(std::size_t r, std::size_t bank) const;

 private:
  friend BankLayout load_rows(std::span<const BipolarHV> class_hvs);
  std::size_t dim_ = 0;
  std::vector<BipolarHV> rows_;
  std::vector<std::size_t> row_map_;
};

// Places class i in row i. Throws Errc::capacity beyond 128 rows.
BankLayout load_rows(std::span<const BipolarHV> class_hvs);

// Slice of bank `bank` from a hypervector.
BankBits bank_slice(const BipolarHV& hv, std::size_t bank);

std::vector<std::size_t> search_ideal(const BankLayout& layout, const BipolarHV& query);

// Solves one bank ML for the given mismatch pattern. Throws Errc::solver
// (with the tail of the residual history) if the iteration does not settle.
BankSolution solve_bank(const BankBits& mismatch, const VoltageProfile& profile,
                        const AnalogParams& params);

MLReading solve_ml(const BipolarHV& row_bits, const BipolarHV& query_bits,
                   const VoltageProfile& profile, const AnalogParams& params);

std::vector<MLReading> search_analog(const BankLayout& layout, const BipolarHV& query,
                                     const VoltageProfile& profile, const AnalogParams& params);

enum class Placement { nearest_first, farthest_first, random_seeded };
std::string_view to_string(Placement p) noexcept;
Placement parse_placement(std::string_view name);

// Column order in which mismatches are added for transfer curves.
std::array<std::size_t, kBankWidth> placement_order(Placement rule, std::uint64_t seed);

struct CurvePoint {
  std::size_t hamming = 0;
  double current = 0.0;
};

// Single-bank ML current for h = 0..128 mismatches, each step adding the next
// column of the placement order.
std::vector<CurvePoint> transfer_curve(const VoltageProfile& profile, const AnalogParams& params,
                                       Placement rule, std::uint64_t seed = 0);

struct LinearityFit {
  double slope = 0.0;      // amperes per mismatch
  double intercept = 0.0;  // amperes
  double max_deviation = 0.0;       // amperes
  double max_deviation_bits = 0.0;  // max_deviation / slope
  double min_step = 0.0;            // smallest current increase between adjacent h
};

// Least-squares line through the curve and the worst residual.
LinearityFit fit_line(std::span<const CurvePoint> curve);

struct CalibrationOptions {
  double v_min = 0.8;
  double v_max = 1.2;
  double step = 0.01;
  double coarse_step = 0.05;
  std::uint64_t placement_seed = 1;
  // Candidates whose curve has an adjacent-h increase below this fraction of
  // i_cell_nominal are rejected.
  double min_step_fraction = 0.5;
};

struct CalibrationResult {
  VoltageProfile profile;
  LinearityFit uniform;
  LinearityFit calibrated;
  std::size_t evaluations = 0;
  std::string warning;  // non-empty when no profile beat the uniform one
};

// Searches non-increasing-toward-sensing 4-level profiles with the nearest
// segment held at the base voltage. Minimizes the worst deviation from the
// best-fit line, in mismatch units, on the random-seeded transfer curve.
// Deterministic given (params, options).
CalibrationResult calibrate_profile(const AnalogParams& params,
                                    const CalibrationOptions& options = {});

}  // namespace hydra
