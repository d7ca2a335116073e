#include "hydra/cam.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "hydra/error.hpp"
#include "hydra/rng.hpp"

namespace hydra {

VoltageProfile VoltageProfile::uniform(double volts) {
  VoltageProfile p;
  p.levels.fill(volts);
  return p;
}

void VoltageProfile::validate() const {
  for (std::size_t k = 0; k < kVoltageLevels; ++k) {
    if (!(levels[k] > 0.0 && levels[k] <= 1.2 + 1e-12)) {
      throw Error(Errc::configuration, "search voltage level out of (0, 1.2] V");
    }
    if (k > 0 && levels[k] < levels[k - 1]) {
      throw Error(Errc::configuration,
                  "search voltages must not increase toward the sensing block");
    }
  }
  if (!(base_voltage > 0.0)) throw Error(Errc::configuration, "base voltage must be positive");
}

void AnalogParams::validate() const {
  if (!(r_segment >= 0.0 && gamma > 0.0 && v_th > 0.0 && i_cell_nominal > 0.0 &&
        i_bias >= 0.0 && i_floor > 0.0 && i_operating_max > 0.0)) {
    throw Error(Errc::configuration, "analog parameters must be positive");
  }
  if (!(i_floor < 0.01 * i_cell_nominal)) {
    throw Error(Errc::configuration, "i_floor must be well below i_cell_nominal");
  }
  if (!(gamma > v_th)) {
    throw Error(Errc::configuration, "gamma * 1 V must exceed v_th (driver would be off)");
  }
  if (!(tolerance > 0.0 && damping > 0.0 && damping <= 1.0 && max_iterations > 0)) {
    throw Error(Errc::configuration, "invalid solver settings");
  }
}

bool BankLayout::bit(std::size_t bank, std::size_t r, std::size_t column) const {
  return rows_.at(r).bit(bank * kBankWidth + column);
}

BankBits bank_slice(const BipolarHV& hv, std::size_t bank) {
  const auto words = hv.words();
  const BankBits lo(words[2 * bank]);
  const BankBits hi(words[2 * bank + 1]);
  return lo | (hi << 64);
}

BankBits BankLayout::bank_bits(std::size_t r, std::size_t bank) const {
  return bank_slice(rows_.at(r), bank);
}

BankLayout load_rows(std::span<const BipolarHV> class_hvs) {
  if (class_hvs.empty()) throw Error(Errc::precondition, "no rows to load");
  if (class_hvs.size() > BankLayout::kMaxRows) {
    throw Error(Errc::capacity, std::to_string(class_hvs.size()) + " rows exceed 128");
  }
  BankLayout layout;
  layout.dim_ = class_hvs.front().dim();
  check_dim(layout.dim_);
  for (std::size_t i = 0; i < class_hvs.size(); ++i) {
    if (class_hvs[i].dim() != layout.dim_) {
      throw Error(Errc::dimension_mismatch, "rows must share one dimension");
    }
    layout.rows_.push_back(class_hvs[i]);
    layout.row_map_.push_back(i);
  }
  return layout;
}

std::vector<std::size_t> search_ideal(const BankLayout& layout, const BipolarHV& query) {
  std::vector<std::size_t> out;
  out.reserve(layout.rows());
  for (std::size_t r = 0; r < layout.rows(); ++r) out.push_back(hamming(layout.row(r), query));
  return out;
}

BankSolution solve_bank(const BankBits& mismatch, const VoltageProfile& profile,
                        const AnalogParams& params) {
  BankSolution sol;
  if (mismatch.none()) return sol;

  const double g = params.g_cell(profile.base_voltage);
  std::array<double, kBankWidth> gate{};
  for (std::size_t c = 0; c < kBankWidth; ++c) {
    gate[c] = params.gamma * profile.voltage_at(c) - params.v_th;
  }
  auto inject = [&](const std::array<double, kBankWidth>& v, std::array<double, kBankWidth>& out) {
    for (std::size_t c = 0; c < kBankWidth; ++c) {
      const double ov = gate[c] - v[c];
      out[c] = (mismatch[c] && ov > 0.0) ? g * ov * ov : 0.0;
    }
  };

  auto& v = sol.node_voltage;
  std::array<double, kBankWidth> inj{};
  std::array<double, kBankWidth> next{};
  std::array<double, 8> history{};
  for (int it = 1; it <= params.max_iterations; ++it) {
    inject(v, inj);
    // Segment c carries the bias plus every injection at columns >= c.
    double segment = params.i_bias;
    std::array<double, kBankWidth> seg{};
    for (std::size_t c = kBankWidth; c-- > 0;) {
      segment += inj[c];
      seg[c] = segment;
    }
    double potential = 0.0;
    double diff = 0.0;
    double scale = 0.0;
    for (std::size_t c = 0; c < kBankWidth; ++c) {
      potential += params.r_segment * seg[c];
      next[c] = potential;
      diff = std::max(diff, std::abs(next[c] - v[c]));
      scale = std::max(scale, std::abs(next[c]));
    }
    history[static_cast<std::size_t>(it) % history.size()] = diff;
    sol.iterations = it;
    if (diff <= params.tolerance * scale) {
      v = next;
      inject(v, sol.cell_current);
      sol.current = std::accumulate(sol.cell_current.begin(), sol.cell_current.end(), 0.0);
      return sol;
    }
    for (std::size_t c = 0; c < kBankWidth; ++c) {
      v[c] = (1.0 - params.damping) * v[c] + params.damping * next[c];
    }
  }
  std::ostringstream msg;
  msg << "ML fixed point did not converge in " << params.max_iterations
      << " iterations; last residuals:";
  for (const double d : history) msg << ' ' << d;
  throw Error(Errc::solver, msg.str());
}

MLReading solve_ml(const BipolarHV& row_bits, const BipolarHV& query_bits,
                   const VoltageProfile& profile, const AnalogParams& params) {
  if (row_bits.dim() != query_bits.dim()) {
    throw Error(Errc::dimension_mismatch, "row and query dimensions differ");
  }
  MLReading reading;
  const std::size_t banks = row_bits.dim() / kBankWidth;
  reading.bank_currents.reserve(banks);
  for (std::size_t b = 0; b < banks; ++b) {
    const BankBits mismatch = bank_slice(row_bits, b) ^ bank_slice(query_bits, b);
    reading.bank_currents.push_back(solve_bank(mismatch, profile, params).current);
    reading.current += reading.bank_currents.back();
  }
  return reading;
}

std::vector<MLReading> search_analog(const BankLayout& layout, const BipolarHV& query,
                                     const VoltageProfile& profile, const AnalogParams& params) {
  if (query.dim() != layout.dim()) {
    throw Error(Errc::dimension_mismatch, "query dimension differs from layout");
  }
  std::vector<MLReading> out;
  out.reserve(layout.rows());
  for (std::size_t r = 0; r < layout.rows(); ++r) {
    out.push_back(solve_ml(layout.row(r), query, profile, params));
    out.back().row = r;
  }
  return out;
}

std::string_view to_string(Placement p) noexcept {
  switch (p) {
    case Placement::nearest_first: return "nearest-first";
    case Placement::farthest_first: return "farthest-first";
    case Placement::random_seeded: return "random-seeded";
  }
  return "?";
}

Placement parse_placement(std::string_view name) {
  for (const auto p : {Placement::nearest_first, Placement::farthest_first,
                       Placement::random_seeded}) {
    if (name == to_string(p)) return p;
  }
  throw Error(Errc::configuration, "unknown placement rule '" + std::string(name) + "'");
}

std::array<std::size_t, kBankWidth> placement_order(Placement rule, std::uint64_t seed) {
  std::array<std::size_t, kBankWidth> order{};
  std::iota(order.begin(), order.end(), 0);
  switch (rule) {
    case Placement::nearest_first:
      break;
    case Placement::farthest_first:
      std::reverse(order.begin(), order.end());
      break;
    case Placement::random_seeded: {
      Rng rng(seed);
      for (std::size_t i = kBankWidth - 1; i > 0; --i) {
        std::swap(order[i], order[rng.below(i + 1)]);
      }
      break;
    }
  }
  return order;
}

std::vector<CurvePoint> transfer_curve(const VoltageProfile& profile, const AnalogParams& params,
                                       Placement rule, std::uint64_t seed) {
  const auto order = placement_order(rule, seed);
  std::vector<CurvePoint> curve;
  curve.reserve(kBankWidth + 1);
  curve.push_back({0, 0.0});
  BankBits mismatch;
  for (std::size_t h = 1; h <= kBankWidth; ++h) {
    mismatch.set(order[h - 1]);
    curve.push_back({h, solve_bank(mismatch, profile, params).current});
  }
  return curve;
}

LinearityFit fit_line(std::span<const CurvePoint> curve) {
  LinearityFit fit;
  const auto n = static_cast<double>(curve.size());
  if (curve.size() < 2) return fit;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& p : curve) {
    const auto x = static_cast<double>(p.hamming);
    sx += x;
    sy += p.current;
    sxx += x * x;
    sxy += x * p.current;
  }
  const double denom = n * sxx - sx * sx;
  fit.slope = denom != 0.0 ? (n * sxy - sx * sy) / denom : 0.0;
  fit.intercept = (sy - fit.slope * sx) / n;
  fit.min_step = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < curve.size(); ++i) {
    const double predicted = fit.intercept + fit.slope * static_cast<double>(curve[i].hamming);
    fit.max_deviation = std::max(fit.max_deviation, std::abs(curve[i].current - predicted));
    if (i > 0) fit.min_step = std::min(fit.min_step, curve[i].current - curve[i - 1].current);
  }
  fit.max_deviation_bits = fit.slope > 0.0 ? fit.max_deviation / fit.slope
                                           : std::numeric_limits<double>::infinity();
  return fit;
}

namespace {

// Levels stored as integer step counts above the anchored base voltage.
using StepLevels = std::array<int, kVoltageLevels>;

VoltageProfile to_profile(const StepLevels& steps, double base, double step) {
  VoltageProfile p;
  p.base_voltage = base;
  for (std::size_t k = 0; k < kVoltageLevels; ++k) {
    p.levels[k] = base + step * static_cast<double>(steps[k]);
  }
  return p;
}

}  // namespace

CalibrationResult calibrate_profile(const AnalogParams& params, const CalibrationOptions& options) {
  params.validate();
  if (!(options.step > 0.0 && options.coarse_step >= options.step && options.v_min > 0.0 &&
        options.v_max <= 1.2 + 1e-12 && options.v_min <= 1.0 && options.v_max >= 1.0)) {
    throw Error(Errc::configuration, "invalid calibration options");
  }
  constexpr double kBase = 1.0;
  const int max_steps = static_cast<int>(std::floor((options.v_max - kBase) / options.step + 1e-9));
  const int coarse = std::max(1, static_cast<int>(std::lround(options.coarse_step / options.step)));

  CalibrationResult result;
  auto evaluate = [&](const StepLevels& s) {
    ++result.evaluations;
    const auto curve = transfer_curve(to_profile(s, kBase, options.step), params,
                                      Placement::random_seeded, options.placement_seed);
    return fit_line(curve);
  };
  auto objective = [&](const LinearityFit& fit) {
    if (fit.min_step < options.min_step_fraction * params.i_cell_nominal) {
      return std::numeric_limits<double>::infinity();
    }
    return fit.max_deviation_bits;
  };

  const StepLevels uniform{0, 0, 0, 0};
  result.uniform = evaluate(uniform);
  StepLevels best = uniform;
  LinearityFit best_fit = result.uniform;
  double best_obj = objective(best_fit);

  auto consider = [&](const StepLevels& s) {
    const LinearityFit fit = evaluate(s);
    const double obj = objective(fit);
    if (obj < best_obj - 1e-12) {
      best_obj = obj;
      best = s;
      best_fit = fit;
      return true;
    }
    return false;
  };

  // Coarse monotone grid over the three non-anchored segments.
  for (int a = 0; a <= max_steps; a += coarse) {
    for (int b = a; b <= max_steps; b += coarse) {
      for (int c = b; c <= max_steps; c += coarse) {
        if (a == 0 && b == 0 && c == 0) continue;
        consider({0, a, b, c});
      }
    }
  }

  // Fine coordinate refinement; a move shifts a contiguous run of segments.
  bool improved = true;
  while (improved) {
    improved = false;
    for (std::size_t first = 1; first < kVoltageLevels; ++first) {
      for (std::size_t last = first; last < kVoltageLevels; ++last) {
        for (const int delta : {1, -1}) {
          StepLevels s = best;
          for (std::size_t k = first; k <= last; ++k) s[k] += delta;
          bool valid = true;
          for (std::size_t k = 1; k < kVoltageLevels; ++k) {
            if (s[k] < s[k - 1] || s[k] > max_steps) valid = false;
          }
          if (valid && consider(s)) improved = true;
        }
      }
    }
  }

  result.profile = to_profile(best, kBase, options.step);
  result.calibrated = best_fit;
  if (best == uniform) {
    result.warning = "no profile improved on the uniform search voltage; parameters may be "
                     "degenerate";
  }
  return result;
}

}  // namespace hydra
