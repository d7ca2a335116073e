#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "hydra/cost.hpp"
#include "hydra/error.hpp"

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

}  // namespace

TEST(CostTable, DefaultConstants) {
  const CostTable t = CostTable::defaults();
  EXPECT_DOUBLE_EQ(t[OpKind::addition].hydra_energy_pj, 41.08);
  EXPECT_DOUBLE_EQ(t[OpKind::addition].cmos_net_energy_pj, 883.9);
  EXPECT_DOUBLE_EQ(t[OpKind::permutation].hydra_energy_pj, 0.752);
  EXPECT_DOUBLE_EQ(t[OpKind::multiplication].hydra_energy_pj, 569.0);
  EXPECT_DOUBLE_EQ(t[OpKind::search].hydra_energy_pj, 14.65);
  EXPECT_DOUBLE_EQ(t[OpKind::search].cmos_net_energy_pj, 4139.7);
  EXPECT_DOUBLE_EQ(t.mem_read_energy_nj, 0.411);
  EXPECT_DOUBLE_EQ(t.cmos_cycle_ns, 0.5);
  EXPECT_EQ(t.reference_dim, 2048U);
  EXPECT_NO_THROW(t.validate());
}

TEST(CostTable, NetRatiosMatchPublishedFigures) {
  const auto r = ratios_vs_cmos(CostTable::defaults());
  const auto within = [](double got, double want, double rel) {
    return std::abs(got - want) <= rel * want;
  };
  EXPECT_TRUE(within(r[0].net_energy_ratio, 21.5, 0.005)) << r[0].net_energy_ratio;
  EXPECT_TRUE(within(r[1].net_energy_ratio, 552.74, 0.005)) << r[1].net_energy_ratio;
  EXPECT_TRUE(within(r[2].net_energy_ratio, 1.45, 0.005)) << r[2].net_energy_ratio;
  EXPECT_TRUE(within(r[3].net_energy_ratio, 282.57, 0.005)) << r[3].net_energy_ratio;
  EXPECT_TRUE(within(r[0].energy_ratio, 1.51, 0.01)) << r[0].energy_ratio;
  EXPECT_TRUE(within(r[1].energy_ratio, 6.19, 0.01)) << r[1].energy_ratio;
  EXPECT_TRUE(within(r[3].energy_ratio, 2.02, 0.01)) << r[3].energy_ratio;
  EXPECT_NEAR(r[0].net_energy_ratio, 883.9 / 41.08, 1e-12);
}

TEST(CostTable, InvalidEntryRejected) {
  CostTable t = CostTable::defaults();
  t[OpKind::search].hydra_energy_pj = 0.0;
  EXPECT_EQ(error_code([&] { ratios_vs_cmos(t); }), Errc::configuration);
}

TEST(CostLedger, TallyExamples) {
  const CostTable t = CostTable::defaults();
  CostLedger full;
  full.tally(OpKind::addition, 1, 2048);
  EXPECT_DOUBLE_EQ(full.hydra_energy_pj(t), 41.08);
  CostLedger half;
  half.tally(OpKind::addition, 1, 1024);
  EXPECT_DOUBLE_EQ(half.hydra_energy_pj(t), 20.54);
  EXPECT_DOUBLE_EQ(half.hydra_latency_ns(t), full.hydra_latency_ns(t));

  CostLedger zero;
  zero.tally(OpKind::search, 0, 2048);
  EXPECT_TRUE(zero.empty());
  EXPECT_EQ(error_code([&] { zero.tally(OpKind::search, 1, 100); }), Errc::alignment);
  EXPECT_EQ(error_code([] { tally(CostLedger{}, "divide", 1, 2048); }), Errc::unknown_op);
  EXPECT_EQ(tally(CostLedger{}, "search", 2, 2048).count(OpKind::search), 2U);
}

TEST(CostLedger, EnergyScalesExactlyWithDimension) {
  const CostTable t = CostTable::defaults();
  for (std::size_t dim = 128; dim <= 2048; dim += 128) {
    CostLedger a, ref;
    for (const auto op : kAllOps) {
      a.tally(op, 37, dim);
      ref.tally(op, 37, 2048);
    }
    double expect = 0;
    for (const auto op : kAllOps) expect += 37 * t[op].hydra_energy_pj * dim / 2048.0;
    EXPECT_NEAR(a.hydra_energy_pj(t), expect, 1e-9 * expect);
    EXPECT_NEAR(a.hydra_energy_pj(t), ref.hydra_energy_pj(t) * dim / 2048.0, 1e-9 * expect);
    EXPECT_DOUBLE_EQ(a.hydra_latency_ns(t), ref.hydra_latency_ns(t));
    EXPECT_DOUBLE_EQ(a.cmos_net_energy_pj(t), ref.cmos_net_energy_pj(t));
  }
  CostLedger l1024, l2048;
  l1024.tally(OpKind::search, 10, 1024);
  l2048.tally(OpKind::search, 10, 2048);
  EXPECT_EQ(l1024.hydra_energy_pj(t) / l2048.hydra_energy_pj(t), 0.5);
}

TEST(CostLedger, MergeIsAdditive) {
  CostLedger a, b, both;
  a.tally(OpKind::addition, 3, 512);
  b.tally(OpKind::addition, 4, 512);
  b.tally(OpKind::search, 1, 2048);
  both.tally(OpKind::addition, 7, 512);
  both.tally(OpKind::search, 1, 2048);
  a.merge(b);
  EXPECT_EQ(a, both);
}

TEST(Report, OneOfEachOperation) {
  const CostTable t = CostTable::defaults();
  CostLedger l;
  for (const auto op : kAllOps) l.tally(op, 1, 2048);
  const CostSummary s = report(l, t, 1);
  EXPECT_NEAR(s.total.hydra_energy_pj, 41.08 + 0.752 + 569 + 14.65, 1e-9);
  EXPECT_NEAR(s.total.cmos_latency_ns, (385 + 193 + 385 + 1922) * 0.5, 1e-9);
  EXPECT_NEAR(s.energy_reduction, (883.9 + 415.66 + 828.47 + 4139.7) / (41.08 + 0.752 + 569 + 14.65),
              1e-9);
  EXPECT_GT(s.hydra_queries_per_second, 0.0);

  const CostSummary empty = report(CostLedger{}, t);
  EXPECT_EQ(empty.total.count, 0U);
  EXPECT_EQ(empty.total.hydra_energy_pj, 0.0);
  EXPECT_EQ(empty.energy_reduction, 0.0);
}

TEST(Report, CsvLayout) {
  CostLedger l;
  l.tally(OpKind::search, 2, 2048);
  std::ostringstream os;
  write_csv(os, report(l, CostTable::defaults()));
  std::istringstream in(os.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line,
            "op,count,hydra_energy_pj,hydra_latency_ns,cmos_energy_pj,cmos_net_energy_pj,"
            "cmos_latency_ns");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  EXPECT_EQ(rows, 5);
  EXPECT_NE(os.str().find("search,2,29.3,"), std::string::npos);
  EXPECT_NE(to_text(report(l, CostTable::defaults(), 2)).find("queries: 2"), std::string::npos);
}
