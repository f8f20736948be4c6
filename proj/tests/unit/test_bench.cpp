#include <gtest/gtest.h>

#include <filesystem>
#include <sstream>

#include "cipherflow/bench/bench.hpp"
#include "cipherflow/error.hpp"

using namespace cipherflow;
using namespace cipherflow::bench;

namespace {

algebra::ContextPtr ctx() {
  static auto c = algebra::BilinearContext::setup();
  return c;
}

}  // namespace

TEST(Generator, SeedStableAndInRange) {
  const auto a = generate_stream(3, 200, 7);
  EXPECT_EQ(a, generate_stream(3, 200, 7));
  EXPECT_NE(a, generate_stream(3, 200, 8));
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].ts, i);
    EXPECT_EQ(a[i].stock_id, 3u);
    EXPECT_LT(a[i].hour, 24u);
    EXPECT_LT(a[i].price, 100u);
    EXPECT_LT(a[i].volume, 100u);
  }
  std::ostringstream os;
  write_tuples(os, {a[0]});
  EXPECT_EQ(ops::DataTuple::parse(os.str().substr(0, os.str().size() - 1)), a[0].to_tuple());
}

TEST(Policies, EveryTypeFitsItsStreams) {
  for (int t = 1; t <= 6; ++t)
    for (int v = 1; v <= (t == 5 ? 3 : 1); ++v) {
      const auto type = static_cast<PolicyType>(t);
      PolicyParams p;
      p.low = 10;
      p.high = 50;
      p.agg_variant = v;
      const auto policy = build_policy(type, p);
      const auto c1 = stock_config("stock0", encodings_for(type, v));
      const auto c2 = stock_config("stock1", encodings_for(type, v));
      EXPECT_NO_THROW(policy.validate(c1, type == PolicyType::t6 ? &c2 : nullptr)) << type_name(type, v);
    }
}

TEST(Percentiles, NearestRank) {
  std::vector<double> s;
  for (int i = 1; i <= 100; ++i) s.push_back(101 - i);
  const auto p = percentiles(s);
  EXPECT_EQ(p.p50, 50);
  EXPECT_EQ(p.p95, 95);
  EXPECT_EQ(p.p99, 99);
  EXPECT_EQ(percentiles({}).p50, 0);
}

TEST(Measure, AggregateTransformCounts) {
  const auto pts = measure_aggregates(ctx(), {2, 4}, 1);
  ASSERT_EQ(pts.size(), 2u);
  for (const auto& p : pts) {
    EXPECT_EQ(p.transforms[0], p.ws);
    EXPECT_EQ(p.transforms[1], 1);
    EXPECT_GT(p.encrypt_mean_ms[2], 0);
  }
}

TEST(Measure, FilterAndJoinTypes) {
  const auto t1 = measure_type(ctx(), PolicyType::t1, 0, 12, 1, 6);
  EXPECT_EQ(t1.outputs, 12u);  // every tuple carries stockId 0
  EXPECT_GT(t1.throughput, 0);
  EXPECT_EQ(t1.cloud_ops.transforms, 1u);
  EXPECT_GT(t1.latency_ms.p50, 0);

  const auto t2 = measure_type(ctx(), PolicyType::t2, 0, 16, 1, 4);
  EXPECT_EQ(t2.outputs, 7u);  // 4 < ts < 12

  const auto t6 = measure_type(ctx(), PolicyType::t6, 0, 40, 3, 4);
  EXPECT_EQ(t6.name, "T6");
  EXPECT_GT(t6.tuple_bytes, t1.tuple_bytes);
}

TEST(Report, JsonRoundTripAndPlots) {
  BenchReport r;
  r.tuples_per_stream = 5;
  TypeReport t;
  t.name = "T1";
  t.throughput = 12.5;
  t.latency_ms = {1, 2, 3};
  t.cloud_ops.pairings = 4;
  r.types.push_back(t);
  AggPoint a;
  a.ws = 8;
  a.transforms[2] = 9;
  r.aggregates.push_back(a);
  r.scaling.push_back({2, 30});
  r.init.push_back({64, 0.5});
  const auto back = BenchReport::from_json(r.to_json());
  EXPECT_EQ(back.to_json(), r.to_json());
  EXPECT_NE(r.to_table().find("T1"), std::string::npos);
  EXPECT_THROW(BenchReport::from_json("{}"), DecodeError);

  const auto dir = std::filesystem::temp_directory_path() / "cf_bench_plots";
  const auto paths = plot(r, dir.string());
  EXPECT_EQ(paths.size(), 5u);
  for (const auto& p : paths) EXPECT_GT(std::filesystem::file_size(p), 100u);
  std::filesystem::remove_all(dir);
}

TEST(Measure, ScalingAndInitRun) {
  EXPECT_GT(measure_scaling(ctx(), 2, 3, 4, 1), 0);
  EXPECT_GT(measure_init(16, 1), 0);
}
