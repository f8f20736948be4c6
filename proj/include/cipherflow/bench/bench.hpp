#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "cipherflow/algebra/op_counts.hpp"
#include "cipherflow/operators/owner.hpp"
#include "cipherflow/operators/types.hpp"

namespace cipherflow::bench {

// One stock market event; each stream carries a single stockId.
struct StockEvent {
  std::uint64_t ts = 0;
  std::uint64_t hour = 0;     // [0, 24)
  std::uint64_t stock_id = 0;
  std::uint64_t price = 0;    // [0, 100)
  std::uint64_t volume = 0;   // [0, 100)

  ops::DataTuple to_tuple() const;
  bool operator==(const StockEvent&) const = default;
};

constexpr unsigned kHourWidth = 5;
constexpr unsigned kStockWidth = 8;
constexpr unsigned kValueWidth = 7;
constexpr unsigned kTsWidth = 16;

// Deterministic per (seed, stock id); ts runs 0..n-1.
std::vector<StockEvent> generate_stream(std::uint64_t stock_id, std::size_t n, std::uint64_t seed);
std::vector<std::vector<StockEvent>> generate(std::size_t streams, std::size_t n, std::uint64_t seed);
// One "ts,attr=value,..." record per line.
void write_tuples(std::ostream& os, const std::vector<StockEvent>& events);

enum class PolicyType { t1 = 1, t2, t3, t4, t5, t6 };

std::string type_name(PolicyType t, int agg_variant = 0);

struct PolicyParams {
  std::uint32_t id = 1;
  std::string stream = "stock0";
  std::string stream2 = "stock1";
  std::uint64_t stock = 0;   // x in stockId = x
  std::uint64_t low = 0;     // y in y < ts|hour < z
  std::uint64_t high = 0;    // z
  std::uint64_t modulus = 4; // ts % modulus = residue
  std::uint64_t residue = 1;
  std::uint32_t ws = 4;
  int agg_variant = 1;       // T5: 1, 2 or 3
  std::uint32_t l1 = 8, l2 = 8;
  std::uint64_t stock2 = 1;  // T6: stockId filter of the second stream
};

// T1 filter stockId=x; T2 + y<ts<z; T3 + y<hour<z; T4 + ts%x=y; T5
// aggregate over price (Agg-1/2/3 by variant); T6 map-filter-join on price
// with a T2-style filter per side.
ops::OperatorPolicy build_policy(PolicyType t, const PolicyParams& p);

// Stream description with the encodings policy type `t` needs.
ops::StreamConfig stock_config(const std::string& id, const ops::Encodings& enc,
                               std::vector<std::uint32_t> windows = {2, 4, 8, 16, 32, 64, 128, 256});
ops::Encodings encodings_for(PolicyType t, int agg_variant = 1);

// ---- measurement ----

struct Percentiles {
  double p50 = 0, p95 = 0, p99 = 0;
};
Percentiles percentiles(std::vector<double> samples);

struct TypeReport {
  std::string name;
  std::size_t tuples = 0;
  std::size_t outputs = 0;
  double throughput = 0;       // tuples/s (T6: join outputs/s)
  Percentiles latency_ms;      // open-loop at half the saturation rate
  double tuple_bytes = 0;      // mean serialized SecureTuple
  double encrypt_ms = 0;       // owner, per tuple
  double transform_ms = 0;     // cloud, per output
  double decrypt_ms = 0;       // user, per output
  algebra::OpCounts cloud_ops; // per output
  algebra::OpCounts user_ops;  // per output
};

struct AggPoint {
  std::uint32_t ws = 0;
  double transforms[3] = {0, 0, 0};      // per output, Agg-1/2/3
  double encrypt_mean_ms[3] = {0, 0, 0}; // per tuple, amortized
  double encrypt_max_ms[3] = {0, 0, 0};  // worst tuple
};

struct ScalingPoint {
  unsigned workers = 0;
  double throughput = 0;
};

struct InitPoint {
  std::size_t attributes = 0;
  double seconds = 0;
};

struct BenchReport {
  std::size_t tuples_per_stream = 0;
  std::vector<TypeReport> types;
  std::vector<AggPoint> aggregates;
  std::vector<ScalingPoint> scaling;
  std::vector<InitPoint> init;

  std::string to_json() const;
  std::string to_table() const;
  static BenchReport from_json(const std::string& text);
};

struct RunOptions {
  std::size_t tuples = 200;                 // per stream, per policy type
  std::uint64_t seed = 1;
  std::vector<std::uint32_t> windows = {2, 4, 8, 16, 32, 64, 128, 256};
  std::size_t scaling_streams = 16;
  std::size_t scaling_tuples = 40;          // per stream
  std::vector<unsigned> scaling_workers = {1, 2, 4};
  std::vector<std::size_t> init_sizes = {64, 256, 1024};
  std::size_t latency_tuples = 40;
};

// Single-worker run of one policy type over fresh streams.
TypeReport measure_type(algebra::ContextPtr ctx, PolicyType t, int agg_variant, std::size_t tuples,
                        std::uint64_t seed, std::size_t latency_tuples);
std::vector<AggPoint> measure_aggregates(algebra::ContextPtr ctx, const std::vector<std::uint32_t>& windows,
                                         std::uint64_t seed);
// T1 throughput with `workers` engine workers over `streams` streams
// (one T1 policy each), fed by one producer thread per worker.
double measure_scaling(algebra::ContextPtr ctx, unsigned workers, std::size_t streams, std::size_t tuples,
                       std::uint64_t seed);
// Context setup plus abe_gen over a universe of `attributes` names.
double measure_init(std::size_t attributes, std::uint64_t seed);

BenchReport run(const RunOptions& opt);

// SVG charts: throughput per type, latency percentiles, aggregate
// transforms and encryption cost vs ws, scaling. Returns file paths.
std::vector<std::string> plot(const BenchReport& r, const std::string& out_dir);

}  // namespace cipherflow::bench
