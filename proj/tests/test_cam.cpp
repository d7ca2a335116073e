#include <gtest/gtest.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

#include "hydra/cam.hpp"
#include "hydra/error.hpp"
#include "hydra/lta.hpp"

using namespace hydra;

namespace {

template <typename F>
Errc error_code(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected hydra::Error";
  return Errc::precondition;
}

// Independent nodal solve of the ML ladder by Newton's method.
//
// Node c (c = 0..127) connects to node c-1 through r (node -1 is the grounded
// sensing node) and to node c+1 through r. KCL at node c:
//   (2 v_c - v_{c-1} - v_{c+1}) / r = f_c(v_c) + bias [c == 127]
// with the last node having only its left neighbour. The Jacobian is
// tridiagonal and solved with the Thomas algorithm.
double newton_bank_current(const BankBits& mismatch, const VoltageProfile& profile,
                           const AnalogParams& p) {
  constexpr std::size_t n = kBankWidth;
  const double ov0 = p.gamma * profile.base_voltage - p.v_th;
  const double g = p.i_cell_nominal / (ov0 * ov0);
  auto f = [&](std::size_t c, double v) {
    const double ov = p.gamma * profile.voltage_at(c) - p.v_th - v;
    return mismatch[c] && ov > 0 ? g * ov * ov : 0.0;
  };
  auto df = [&](std::size_t c, double v) {
    const double ov = p.gamma * profile.voltage_at(c) - p.v_th - v;
    return mismatch[c] && ov > 0 ? -2.0 * g * ov : 0.0;
  };
  const double G = 1.0 / p.r_segment;
  std::vector<double> v(n, 0.0);
  for (int it = 0; it < 100; ++it) {
    std::vector<double> res(n), lower(n, 0.0), diag(n), upper(n, 0.0);
    for (std::size_t c = 0; c < n; ++c) {
      const double left = c == 0 ? 0.0 : v[c - 1];
      double kcl = G * (v[c] - left);
      diag[c] = G - df(c, v[c]);
      if (c + 1 < n) {
        kcl += G * (v[c] - v[c + 1]);
        diag[c] += G;
        upper[c] = -G;
      }
      if (c > 0) lower[c] = -G;
      res[c] = kcl - f(c, v[c]) - (c + 1 == n ? p.i_bias : 0.0);
    }
    // Thomas algorithm for J dx = -res.
    std::vector<double> cp(n), dp(n);
    cp[0] = upper[0] / diag[0];
    dp[0] = -res[0] / diag[0];
    for (std::size_t c = 1; c < n; ++c) {
      const double m = diag[c] - lower[c] * cp[c - 1];
      cp[c] = upper[c] / m;
      dp[c] = (-res[c] - lower[c] * dp[c - 1]) / m;
    }
    std::vector<double> dx(n);
    dx[n - 1] = dp[n - 1];
    for (std::size_t c = n - 1; c-- > 0;) dx[c] = dp[c] - cp[c] * dx[c + 1];
    double step = 0.0;
    for (std::size_t c = 0; c < n; ++c) {
      v[c] += dx[c];
      step = std::max(step, std::abs(dx[c]));
    }
    if (step < 1e-15) break;
  }
  double total = 0.0;
  for (std::size_t c = 0; c < n; ++c) total += f(c, v[c]);
  return total;
}

BipolarHV row_with_mismatches(const BipolarHV& query, const std::vector<std::size_t>& cols) {
  BipolarHV row = query;
  for (const auto c : cols) row.flip(c);
  return row;
}

AnalogParams ideal_wire() {
  AnalogParams p;
  p.r_segment = 0.0;
  return p;
}

}  // namespace

TEST(Layout, PlacementAndCapacity) {
  Rng rng(1);
  const std::vector<BipolarHV> one{random_hv(128, rng)};
  const BankLayout small = load_rows(one);
  EXPECT_EQ(small.rows(), 1U);
  EXPECT_EQ(small.active_banks(), 1U);

  std::vector<BipolarHV> rows;
  for (int i = 0; i < 3; ++i) rows.push_back(random_hv(2048, rng));
  const BankLayout layout = load_rows(rows);
  EXPECT_EQ(layout.active_banks(), 16U);
  for (std::size_t r = 0; r < 3; ++r) {
    EXPECT_EQ(layout.row_of(r), r);
    for (std::size_t k = 0; k < 16; ++k) {
      for (std::size_t c = 0; c < 128; c += 7) {
        EXPECT_EQ(layout.bit(k, r, c), rows[r].bit(128 * k + c));
        EXPECT_EQ(layout.bank_bits(r, k)[c], rows[r].bit(128 * k + c));
      }
    }
  }

  std::vector<BipolarHV> many(129, BipolarHV(128));
  EXPECT_EQ(error_code([&] { load_rows(many); }), Errc::capacity);
  many.pop_back();
  EXPECT_NO_THROW(load_rows(many));
}

TEST(SearchIdeal, Examples) {
  Rng rng(2);
  const BipolarHV q = random_hv(512, rng);
  const std::vector<BipolarHV> rows{q, q.complement(), random_hv(512, rng)};
  const auto d = search_ideal(load_rows(rows), q);
  EXPECT_EQ(d[0], 0U);
  EXPECT_EQ(d[1], 512U);
  EXPECT_EQ(d[2], hamming(rows[2], q));
}

TEST(SolveMl, ZeroMismatchesGiveZero) {
  Rng rng(3);
  const BipolarHV q = random_hv(256, rng);
  EXPECT_EQ(solve_ml(q, q, VoltageProfile::uniform(), AnalogParams{}).current, 0.0);
}

TEST(SolveMl, NearestColumnWithoutWireResistance) {
  Rng rng(4);
  const BipolarHV q = random_hv(128, rng);
  const MLReading r = solve_ml(row_with_mismatches(q, {0}), q, VoltageProfile::uniform(),
                               ideal_wire());
  EXPECT_NEAR(r.current, 1e-6, 1e-18);
}

TEST(SolveMl, MatchesNewtonOracle) {
  const AnalogParams p;
  Rng rng(5);
  const VoltageProfile scaled{{1.0, 1.05, 1.12, 1.2}, 1.0};
  for (const auto& profile : {VoltageProfile::uniform(), scaled}) {
    for (int trial = 0; trial < 12; ++trial) {
      BankBits m;
      const std::size_t h = trial == 0 ? 128 : rng.below(129);
      const auto order = placement_order(Placement::random_seeded, rng.next());
      for (std::size_t i = 0; i < h; ++i) m.set(order[i]);
      const double got = solve_bank(m, profile, p).current;
      const double want = newton_bank_current(m, profile, p);
      EXPECT_NEAR(got, want, 1e-7 * std::max(want, 1e-6)) << "h=" << h;
    }
  }
}

TEST(SolveMl, FullMismatchUniformIsCompressedAndNonlinear) {
  const AnalogParams p;
  const auto curve = transfer_curve(VoltageProfile::uniform(), p, Placement::random_seeded, 1);
  EXPECT_LT(curve.back().current, 128 * p.i_cell_nominal);
  EXPECT_NEAR(curve.back().current,
              newton_bank_current(BankBits().set(), VoltageProfile::uniform(), p),
              1e-7 * curve.back().current);
  double lo = 1.0, hi = 0.0;
  for (std::size_t h = 1; h < curve.size(); ++h) {
    const double step = curve[h].current - curve[h - 1].current;
    lo = std::min(lo, step);
    hi = std::max(hi, step);
  }
  EXPECT_GT(hi - lo, 0.1 * p.i_cell_nominal);
}

TEST(SolveMl, BankAdditivity) {
  const AnalogParams p;
  Rng rng(6);
  const BipolarHV q = random_hv(1024, rng);
  const BipolarHV row = random_hv(1024, rng);
  const MLReading r = solve_ml(row, q, VoltageProfile::uniform(), p);
  ASSERT_EQ(r.bank_currents.size(), 8U);
  double sum = 0.0;
  for (std::size_t k = 0; k < 8; ++k) {
    const double alone =
        solve_bank(bank_slice(row, k) ^ bank_slice(q, k), VoltageProfile::uniform(), p).current;
    EXPECT_EQ(r.bank_currents[k], alone);
    sum += alone;
  }
  EXPECT_DOUBLE_EQ(r.current, sum);
}

TEST(SolveMl, DimensionMismatchAndDeterminism) {
  Rng rng(7);
  const BipolarHV a = random_hv(256, rng), b = random_hv(128, rng);
  EXPECT_EQ(error_code([&] { solve_ml(a, b, VoltageProfile::uniform(), AnalogParams{}); }),
            Errc::dimension_mismatch);
  const std::vector<BipolarHV> rows{a, random_hv(256, rng)};
  const BankLayout layout = load_rows(rows);
  const BipolarHV q = random_hv(256, rng);
  const auto r1 = search_analog(layout, q, VoltageProfile::uniform(), AnalogParams{});
  const auto r2 = search_analog(layout, q, VoltageProfile::uniform(), AnalogParams{});
  for (std::size_t i = 0; i < r1.size(); ++i) EXPECT_EQ(r1[i].current, r2[i].current);
}

TEST(SolveMl, SolverFailureCarriesTrace) {
  AnalogParams p;
  p.max_iterations = 2;
  EXPECT_EQ(error_code([&] { solve_bank(BankBits().set(), VoltageProfile::uniform(), p); }),
            Errc::solver);
  try {
    solve_bank(BankBits().set(), VoltageProfile::uniform(), p);
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("residuals"), std::string::npos);
  }
}

TEST(TransferCurve, StrictlyIncreasingForEveryRule) {
  const AnalogParams p;
  for (const auto rule : {Placement::nearest_first, Placement::farthest_first,
                          Placement::random_seeded}) {
    const auto curve = transfer_curve(VoltageProfile::uniform(), p, rule, 3);
    ASSERT_EQ(curve.size(), 129U);
    EXPECT_EQ(curve[0].current, 0.0);
    for (std::size_t h = 1; h < curve.size(); ++h) {
      EXPECT_GT(curve[h].current, curve[h - 1].current) << to_string(rule) << " h=" << h;
    }
  }
}

TEST(TransferCurve, NoWireResistanceIsExactlyLinear) {
  const auto curve =
      transfer_curve(VoltageProfile::uniform(), ideal_wire(), Placement::random_seeded, 9);
  for (const auto& pt : curve) {
    EXPECT_NEAR(pt.current, 1e-6 * static_cast<double>(pt.hamming), 1e-15);
  }
}

TEST(TransferCurve, NoWireResistanceAnalogArgminIsIdeal) {
  Rng rng(10);
  SensingSpec sensing;
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<BipolarHV> rows;
    for (int r = 0; r < 6; ++r) rows.push_back(random_hv(256, rng));
    const BipolarHV q = random_hv(256, rng);
    const BankLayout layout = load_rows(rows);
    const auto ideal = search_ideal(layout, q);
    const auto readings = search_analog(layout, q, VoltageProfile::uniform(), ideal_wire());
    std::vector<double> currents;
    for (const auto& r : readings) currents.push_back(r.current);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      EXPECT_NEAR(currents[i], 1e-6 * static_cast<double>(ideal[i]), 1e-13);
    }
    const auto best = static_cast<std::size_t>(
        std::min_element(ideal.begin(), ideal.end()) - ideal.begin());
    if (std::count(ideal.begin(), ideal.end(), ideal[best]) == 1) {
      EXPECT_EQ(argmin_serial(currents, sensing, rng).winner, best);
    }
  }
}

TEST(Placement, OrdersArePermutations) {
  for (const auto rule : {Placement::nearest_first, Placement::farthest_first,
                          Placement::random_seeded}) {
    auto order = placement_order(rule, 4);
    std::sort(order.begin(), order.end());
    for (std::size_t i = 0; i < 128; ++i) EXPECT_EQ(order[i], i);
  }
  EXPECT_EQ(placement_order(Placement::nearest_first, 0)[0], 0U);
  EXPECT_EQ(placement_order(Placement::farthest_first, 0)[0], 127U);
  EXPECT_EQ(parse_placement("random-seeded"), Placement::random_seeded);
  EXPECT_EQ(error_code([] { parse_placement("middle"); }), Errc::configuration);
}

TEST(FitLine, ExactLineHasNoDeviation) {
  std::vector<CurvePoint> pts;
  for (std::size_t h = 0; h <= 10; ++h) pts.push_back({h, 2.0 + 0.5 * static_cast<double>(h)});
  const LinearityFit fit = fit_line(pts);
  EXPECT_NEAR(fit.slope, 0.5, 1e-12);
  EXPECT_NEAR(fit.intercept, 2.0, 1e-12);
  EXPECT_NEAR(fit.max_deviation, 0.0, 1e-12);
  EXPECT_NEAR(fit.min_step, 0.5, 1e-12);
}

TEST(FitLine, KnownResidual) {
  // y = 0, 0, 3 over x = 0, 1, 2: line y = 1.5x - 0.5, worst residual 1.0.
  const std::vector<CurvePoint> pts{{0, 0.0}, {1, 0.0}, {2, 3.0}};
  const LinearityFit fit = fit_line(pts);
  EXPECT_NEAR(fit.slope, 1.5, 1e-12);
  EXPECT_NEAR(fit.intercept, -0.5, 1e-12);
  EXPECT_NEAR(fit.max_deviation, 1.0, 1e-12);
}

TEST(Profiles, Validation) {
  EXPECT_NO_THROW(VoltageProfile::uniform().validate());
  EXPECT_EQ(error_code([] { VoltageProfile{{1.1, 1.0, 1.0, 1.0}, 1.0}.validate(); }),
            Errc::configuration);
  EXPECT_EQ(error_code([] { VoltageProfile{{1.0, 1.0, 1.0, 1.3}, 1.0}.validate(); }),
            Errc::configuration);
  AnalogParams p;
  p.i_floor = p.i_cell_nominal;
  EXPECT_EQ(error_code([&] { p.validate(); }), Errc::configuration);
}

TEST(Calibration, NoWireResistanceKeepsUniform) {
  const CalibrationResult r = calibrate_profile(ideal_wire());
  for (const double v : r.profile.levels) EXPECT_DOUBLE_EQ(v, 1.0);
  EXPECT_FALSE(r.warning.empty());
}

class CalibrationDefaults : public ::testing::Test {
 protected:
  static void SetUpTestSuite() { result_ = new CalibrationResult(calibrate_profile(AnalogParams{})); }
  static void TearDownTestSuite() {
    delete result_;
    result_ = nullptr;
  }
  static CalibrationResult* result_;
};
CalibrationResult* CalibrationDefaults::result_ = nullptr;

TEST_F(CalibrationDefaults, StrictlyDecreasingTowardSensing) {
  const auto& lv = result_->profile.levels;
  EXPECT_DOUBLE_EQ(lv[0], 1.0);
  for (std::size_t k = 1; k < lv.size(); ++k) EXPECT_GT(lv[k], lv[k - 1]);
  EXPECT_NO_THROW(result_->profile.validate());
  EXPECT_TRUE(result_->warning.empty());
}

TEST_F(CalibrationDefaults, Deterministic) {
  EXPECT_EQ(calibrate_profile(AnalogParams{}).profile, result_->profile);
}

TEST_F(CalibrationDefaults, ReducesDeviationAndMatchesRecomputedCurves) {
  const AnalogParams p;
  const LinearityFit u =
      fit_line(transfer_curve(VoltageProfile::uniform(), p, Placement::random_seeded, 1));
  const LinearityFit c =
      fit_line(transfer_curve(result_->profile, p, Placement::random_seeded, 1));
  EXPECT_EQ(u.max_deviation, result_->uniform.max_deviation);
  EXPECT_EQ(c.max_deviation, result_->calibrated.max_deviation);
  EXPECT_LT(c.max_deviation, u.max_deviation);
}

TEST_F(CalibrationDefaults, IncrementsStayResolvable) {
  const AnalogParams p;
  const auto curve = transfer_curve(result_->profile, p, Placement::random_seeded, 1);
  for (std::size_t a = 0; a < curve.size(); ++a) {
    for (std::size_t b = a + 1; b < curve.size(); ++b) {
      ASSERT_GE(curve[b].current - curve[a].current,
                0.5 * p.i_cell_nominal * static_cast<double>(b - a))
          << a << ' ' << b;
    }
  }
  EXPECT_LE(curve.back().current, p.i_operating_max);
}
