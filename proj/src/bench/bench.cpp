#include "cipherflow/bench/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>
#include <thread>

#include "cipherflow/algebra/dlog.hpp"
#include "cipherflow/engine/engine.hpp"
#include "cipherflow/error.hpp"
#include "cipherflow/operators/cloud.hpp"
#include "cipherflow/operators/user.hpp"
#include "json.hpp"

namespace cipherflow::bench {
namespace {

using Clock = std::chrono::steady_clock;
using algebra::OpCounter;
using algebra::OpCounts;
using algebra::Rng;

double ms_since(Clock::time_point t0) { return std::chrono::duration<double, std::milli>(Clock::now() - t0).count(); }

OpCounts per(const OpCounts& c, std::size_t n) {
  if (n == 0) return {};
  auto d = [&](std::uint64_t v) { return static_cast<std::uint64_t>(std::llround(double(v) / double(n))); };
  return {d(c.pairings), d(c.final_exps), d(c.gt_exps), d(c.g1_exps), d(c.g2_exps), d(c.gt_muls), d(c.transforms), d(c.dlogs)};
}

std::string stream_id(std::size_t i) { return "stock" + std::to_string(i); }

}  // namespace

// ---- data ----

ops::DataTuple StockEvent::to_tuple() const {
  return {ts, {{"hour", hour}, {"stockId", stock_id}, {"price", price}, {"volume", volume}}};
}

std::vector<StockEvent> generate_stream(std::uint64_t stock_id, std::size_t n, std::uint64_t seed) {
  Rng rng = Rng::seeded(seed * 1000003 + stock_id);
  std::vector<StockEvent> out(n);
  for (std::size_t i = 0; i < n; ++i)
    out[i] = {i, rng.uniform(24), stock_id, rng.uniform(100), rng.uniform(100)};
  return out;
}

std::vector<std::vector<StockEvent>> generate(std::size_t streams, std::size_t n, std::uint64_t seed) {
  std::vector<std::vector<StockEvent>> out;
  for (std::size_t s = 0; s < streams; ++s) out.push_back(generate_stream(s, n, seed));
  return out;
}

void write_tuples(std::ostream& os, const std::vector<StockEvent>& events) {
  for (const auto& e : events) os << e.to_tuple().to_string() << '\n';
}

// ---- policies ----

std::string type_name(PolicyType t, int agg_variant) {
  std::string s = "T" + std::to_string(static_cast<int>(t));
  if (t == PolicyType::t5) s += "/Agg-" + std::to_string(agg_variant);
  return s;
}

ops::OperatorPolicy build_policy(PolicyType t, const PolicyParams& p) {
  using policy::Op;
  ops::OperatorPolicy out;
  out.id = p.id;
  out.stream = p.stream;
  const policy::Predicate stock{"stockId", p.stock, Op::eq, 0};
  const policy::Predicate after{ops::kTs, p.low + 1, Op::ge, 0};    // low < ts
  const policy::Predicate before{ops::kTs, p.high - 1, Op::le, 0};  // ts < high
  switch (t) {
    case PolicyType::t1:
      out.kind = ops::OperatorKind::filter;
      out.filters = {stock};
      break;
    case PolicyType::t2:
      out.kind = ops::OperatorKind::filter;
      out.filters = {stock, after, before};
      break;
    case PolicyType::t3:
      out.kind = ops::OperatorKind::filter;
      out.filters = {stock, {"hour", p.low + 1, Op::ge, 0}, {"hour", p.high - 1, Op::le, 0}};
      break;
    case PolicyType::t4:
      out.kind = ops::OperatorKind::filter;
      out.filters = {stock, {ops::kTs, p.residue, Op::mod, p.modulus}};
      break;
    case PolicyType::t5:
      out.kind = p.agg_variant == 1   ? ops::OperatorKind::agg1
                 : p.agg_variant == 2 ? ops::OperatorKind::agg2
                                      : ops::OperatorKind::agg3;
      out.agg_attr = "price";
      out.ws = p.ws;
      break;
    case PolicyType::t6:
      out.kind = ops::OperatorKind::map_filter_join;
      out.stream2 = p.stream2;
      out.map_attrs = {"hour", "stockId", "price", "volume"};
      out.join_attr = "price";
      out.buffer1 = p.l1;
      out.buffer2 = p.l2;
      out.filters = {stock, after, before};
      out.filters2 = {{"stockId", p.stock2, Op::eq, 0}, after, before};
      break;
  }
  return out;
}

ops::StreamConfig stock_config(const std::string& id, const ops::Encodings& enc, std::vector<std::uint32_t> windows) {
  ops::StreamConfig c;
  c.id = id;
  c.schema = {{"hour", kHourWidth}, {"stockId", kStockWidth}, {"price", kValueWidth}, {"volume", kValueWidth}};
  c.ts_width = kTsWidth;
  c.bases = {2, 3};
  c.filter_attrs = {ops::kTs, "hour", "stockId"};
  c.windows = std::move(windows);
  c.agg_attrs = {"price", "volume"};
  c.join_attrs = {"price"};
  c.enc = enc;
  return c;
}

ops::Encodings encodings_for(PolicyType t, int agg_variant) {
  ops::Encodings e;
  switch (t) {
    case PolicyType::t5:
      (agg_variant == 1 ? e.agg1 : agg_variant == 2 ? e.agg2 : e.agg3) = true;
      break;
    case PolicyType::t6:
      e.map_filter = true;
      e.join = true;
      break;
    default:
      e.filter = true;
  }
  return e;
}

Percentiles percentiles(std::vector<double> s) {
  if (s.empty()) return {};
  std::sort(s.begin(), s.end());
  auto at = [&](double q) {
    const auto rank = static_cast<std::size_t>(std::ceil(q * double(s.size())));
    return s[std::clamp<std::size_t>(rank, 1, s.size()) - 1];
  };
  return {at(0.50), at(0.95), at(0.99)};
}

// ---- single policy type ----

namespace {

struct Deployment {
  std::vector<ops::OwnerKeys> owners;
  std::vector<std::vector<ops::SecureTuple>> secure;
  ops::IssuedKeys keys;
  double encrypt_ms = 0;
  double tuple_bytes = 0;
};

Deployment deploy(algebra::ContextPtr ctx, PolicyType t, int variant, std::size_t n, std::uint64_t seed) {
  Deployment d;
  Rng rng = Rng::seeded(seed);
  const std::size_t streams = t == PolicyType::t6 ? 2 : 1;
  const auto enc = encodings_for(t, variant);
  for (std::size_t s = 0; s < streams; ++s) {
    std::optional<algebra::Scalar> k1;
    if (s > 0) k1 = d.owners[0].det.k1;
    d.owners.push_back(ops::owner_setup(ctx, stock_config(stream_id(s), enc), rng, k1));
  }
  std::size_t count = 0;
  double total_ms = 0, total_bytes = 0;
  for (std::size_t s = 0; s < streams; ++s) {
    ops::StreamEncryptor encryptor(ctx, d.owners[s]);
    d.secure.emplace_back();
    for (const auto& e : generate_stream(s, n, seed)) {
      const auto t0 = Clock::now();
      d.secure[s].push_back(encryptor.encrypt(e.to_tuple(), rng));
      total_ms += ms_since(t0);
      total_bytes += double(d.secure[s].back().to_bytes().size());
      ++count;
    }
  }
  d.encrypt_ms = total_ms / double(count);
  d.tuple_bytes = total_bytes / double(count);

  PolicyParams p;
  p.low = n / 4;
  p.high = 3 * n / 4;
  p.agg_variant = variant;
  if (t == PolicyType::t3) {
    p.low = 6;
    p.high = 18;
  }
  const auto policy = build_policy(t, p);
  d.keys = ops::issue_policy(policy, d.owners[0], streams > 1 ? &d.owners[1] : nullptr, rng);
  return d;
}

struct Engine {
  engine::CloudEngine cloud;
  std::vector<ops::OutputRecord> outputs;
  std::vector<double> latencies;
  Clock::time_point current;

  Engine(algebra::ContextPtr ctx, const Deployment& d, Rng& rng) : cloud(ctx, 0) {
    for (const auto& o : d.owners) cloud.register_stream(o.config);
    cloud.register_policy(d.keys.cloud);
    std::optional<det::JoinToken> token;
    if (ops::is_join(d.keys.user.policy.kind)) token = ops::UserDecryptor(ctx, d.keys.user).join_token(rng);
    cloud.subscribe(
        d.keys.user.policy.id,
        [this](const ops::OutputRecord& r) {
          outputs.push_back(r);
          latencies.push_back(ms_since(current));
        },
        token);
  }
};

}  // namespace

TypeReport measure_type(algebra::ContextPtr ctx, PolicyType t, int agg_variant, std::size_t tuples, std::uint64_t seed,
                        std::size_t latency_tuples) {
  TypeReport r;
  r.name = type_name(t, agg_variant);
  auto d = deploy(ctx, t, agg_variant, tuples, seed);
  r.tuples = tuples;
  r.encrypt_ms = d.encrypt_ms;
  r.tuple_bytes = d.tuple_bytes;
  Rng rng = Rng::seeded(seed + 1);

  // Saturation: back-to-back ingestion.
  double input_rate = 1;
  {
    Engine e(ctx, d, rng);
    OpCounter ops;
    const auto t0 = Clock::now();
    for (std::size_t i = 0; i < tuples; ++i)
      for (std::size_t s = 0; s < d.secure.size(); ++s) {
        e.current = Clock::now();
        e.cloud.ingest(stream_id(s), d.secure[s][i]);
      }
    const double secs = ms_since(t0) / 1000.0;
    input_rate = double(tuples * d.secure.size()) / secs;
    r.outputs = e.outputs.size();
    r.throughput = (t == PolicyType::t6 ? double(r.outputs) : double(tuples)) / secs;
    r.transform_ms = r.outputs ? secs * 1000.0 / double(r.outputs) : 0;
    r.cloud_ops = per(ops.delta(), r.outputs);

    ops::UserDecryptor user(ctx, d.keys.user);
    const std::size_t sample = std::min<std::size_t>(e.outputs.size(), 50);
    OpCounter uops;
    const auto u0 = Clock::now();
    for (std::size_t i = 0; i < sample; ++i) user.decrypt(e.outputs[i]);
    r.decrypt_ms = sample ? ms_since(u0) / double(sample) : 0;
    r.user_ops = per(uops.delta(), sample);
  }

  // Latency: open loop at half the saturation input rate.
  {
    Engine e(ctx, d, rng);
    const auto gap = std::chrono::duration<double>(1.0 / (0.5 * input_rate));
    const auto start = Clock::now();
    std::size_t k = 0;
    for (std::size_t i = 0; i < std::min(latency_tuples, tuples); ++i)
      for (std::size_t s = 0; s < d.secure.size(); ++s, ++k) {
        const auto due = start + std::chrono::duration_cast<Clock::duration>(gap * double(k));
        std::this_thread::sleep_until(due);
        e.current = due;  // queuing delay counts when the loop falls behind
        e.cloud.ingest(stream_id(s), d.secure[s][i]);
      }
    r.latency_ms = percentiles(e.latencies);
  }
  return r;
}

// ---- aggregate series ----

std::vector<AggPoint> measure_aggregates(algebra::ContextPtr ctx, const std::vector<std::uint32_t>& windows,
                                         std::uint64_t seed) {
  std::vector<AggPoint> points;
  for (auto ws : windows) points.push_back({ws, {}, {}, {}});
  const std::uint32_t n = *std::max_element(windows.begin(), windows.end());
  for (int v = 1; v <= 3; ++v) {
    Rng rng = Rng::seeded(seed + v);
    const auto owner = ops::owner_setup(ctx, stock_config(stream_id(0), encodings_for(PolicyType::t5, v), windows), rng);
    ops::StreamEncryptor encryptor(ctx, owner);
    std::vector<ops::SecureTuple> cts;
    double total = 0, worst = 0;
    for (const auto& e : generate_stream(0, n, seed)) {
      const auto t0 = Clock::now();
      cts.push_back(encryptor.encrypt(e.to_tuple(), rng));
      const double ms = ms_since(t0);
      total += ms;
      worst = std::max(worst, ms);
    }
    for (auto& pt : points) {
      pt.encrypt_mean_ms[v - 1] = total / n;
      pt.encrypt_max_ms[v - 1] = worst;
      PolicyParams p;
      p.agg_variant = v;
      p.ws = pt.ws;
      const auto keys = ops::issue_policy(build_policy(PolicyType::t5, p), owner, nullptr, rng);
      auto q = ops::make_query(ctx, keys.cloud, owner.config, nullptr);
      OpCounter ops;
      std::size_t outputs = 0;
      for (const auto& st : cts) outputs += q->on_tuple(0, st).size();
      pt.transforms[v - 1] = outputs ? double(ops.delta().transforms) / double(outputs) : 0;
    }
  }
  return points;
}

// ---- scaling ----

double measure_scaling(algebra::ContextPtr ctx, unsigned workers, std::size_t streams, std::size_t tuples,
                       std::uint64_t seed) {
  Rng rng = Rng::seeded(seed);
  // One owner's keys serve every stream (same schema); only ids differ.
  const auto owner = ops::owner_setup(ctx, stock_config(stream_id(0), encodings_for(PolicyType::t1)), rng);
  ops::StreamEncryptor encryptor(ctx, owner);
  std::vector<ops::SecureTuple> cts;
  for (const auto& e : generate_stream(0, tuples, seed)) cts.push_back(encryptor.encrypt(e.to_tuple(), rng));

  engine::CloudEngine cloud(ctx, workers);
  for (std::size_t s = 0; s < streams; ++s) {
    auto c = owner.config;
    c.id = stream_id(s);
    cloud.register_stream(c);
    PolicyParams p;
    p.id = static_cast<std::uint32_t>(s + 1);
    auto policy = build_policy(PolicyType::t1, p);  // issued against the shared owner's stream id
    auto keys = ops::issue_policy(policy, owner, nullptr, rng);
    keys.cloud.policy.stream = c.id;
    cloud.register_policy(keys.cloud);
  }
  std::vector<std::thread> producers;
  const auto t0 = Clock::now();
  for (unsigned w = 0; w < std::max(1u, workers); ++w) {
    producers.emplace_back([&, w] {
      for (std::size_t i = 0; i < tuples; ++i)
        for (std::size_t s = w; s < streams; s += std::max(1u, workers)) cloud.ingest(stream_id(s), cts[i]);
    });
  }
  for (auto& p : producers) p.join();
  return double(streams * tuples) / (ms_since(t0) / 1000.0);
}

double measure_init(std::size_t attributes, std::uint64_t seed) {
  const auto t0 = Clock::now();
  auto ctx = algebra::BilinearContext::setup();
  algebra::DLogTable<algebra::Gt> table(ctx->gt(), 1 << 16);
  std::vector<std::string> universe;
  for (std::size_t i = 0; i < attributes; ++i) universe.push_back("attr" + std::to_string(i));
  Rng rng = Rng::seeded(seed);
  auto keys = abe::abe_gen(ctx, universe, rng);
  (void)keys;
  return ms_since(t0) / 1000.0;
}

BenchReport run(const RunOptions& opt) {
  auto ctx = algebra::BilinearContext::setup();
  BenchReport r;
  r.tuples_per_stream = opt.tuples;
  for (auto t : {PolicyType::t1, PolicyType::t2, PolicyType::t3, PolicyType::t4})
    r.types.push_back(measure_type(ctx, t, 0, opt.tuples, opt.seed, opt.latency_tuples));
  for (int v = 1; v <= 3; ++v) r.types.push_back(measure_type(ctx, PolicyType::t5, v, opt.tuples, opt.seed, opt.latency_tuples));
  r.types.push_back(measure_type(ctx, PolicyType::t6, 0, opt.tuples, opt.seed, opt.latency_tuples));
  r.aggregates = measure_aggregates(ctx, opt.windows, opt.seed);
  for (auto w : opt.scaling_workers)
    r.scaling.push_back({w, measure_scaling(ctx, w, opt.scaling_streams, opt.scaling_tuples, opt.seed)});
  for (auto n : opt.init_sizes) r.init.push_back({n, measure_init(n, opt.seed)});
  return r;
}

}  // namespace cipherflow::bench

// ---- reporting ----

namespace cipherflow::bench {
namespace {

using nlohmann::json;

json ops_json(const algebra::OpCounts& c) {
  return {{"pairings", c.pairings}, {"final_exps", c.final_exps}, {"gt_exps", c.gt_exps},  {"g1_exps", c.g1_exps},
          {"g2_exps", c.g2_exps},   {"gt_muls", c.gt_muls},       {"transforms", c.transforms}, {"dlogs", c.dlogs}};
}

algebra::OpCounts ops_from(const json& j) {
  algebra::OpCounts c;
  c.pairings = j.at("pairings");
  c.final_exps = j.at("final_exps");
  c.gt_exps = j.at("gt_exps");
  c.g1_exps = j.at("g1_exps");
  c.g2_exps = j.at("g2_exps");
  c.gt_muls = j.at("gt_muls");
  c.transforms = j.at("transforms");
  c.dlogs = j.at("dlogs");
  return c;
}

std::string fixed(double v, int digits = 2) {
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(digits);
  os << v;
  return os.str();
}

// Minimal SVG bar/line chart. Series share the x categories.
struct Series {
  std::string name;
  std::vector<double> values;
};

std::string svg_chart(const std::string& title, const std::string& ylabel, const std::vector<std::string>& xs,
                      const std::vector<Series>& series, bool lines) {
  static const char* colors[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd"};
  const double w = 640, h = 360, left = 70, right = 20, top = 40, bottom = 50;
  double ymax = 0;
  for (const auto& s : series)
    for (double v : s.values) ymax = std::max(ymax, v);
  if (ymax <= 0) ymax = 1;
  ymax *= 1.1;
  const double pw = w - left - right, ph = h - top - bottom;
  const double slot = xs.empty() ? pw : pw / double(xs.size());
  auto y = [&](double v) { return top + ph - ph * v / ymax; };

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h
     << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  os << "<text x=\"" << w / 2 << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">" << title << "</text>\n";
  os << "<text x=\"14\" y=\"" << top + ph / 2 << "\" transform=\"rotate(-90 14 " << top + ph / 2
     << ")\" text-anchor=\"middle\">" << ylabel << "</text>\n";
  os << "<line x1=\"" << left << "\" y1=\"" << top + ph << "\" x2=\"" << left + pw << "\" y2=\"" << top + ph
     << "\" stroke=\"black\"/>\n";
  os << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\"" << top + ph
     << "\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double v = ymax * i / 4;
    os << "<text x=\"" << left - 4 << "\" y=\"" << y(v) + 4 << "\" text-anchor=\"end\">" << fixed(v, v < 10 ? 2 : 0)
       << "</text>\n";
  }
  for (std::size_t i = 0; i < xs.size(); ++i)
    os << "<text x=\"" << left + slot * (double(i) + 0.5) << "\" y=\"" << top + ph + 16
       << "\" text-anchor=\"middle\">" << xs[i] << "</text>\n";
  const double bar = slot * 0.8 / double(std::max<std::size_t>(series.size(), 1));
  for (std::size_t k = 0; k < series.size(); ++k) {
    const char* c = colors[k % 5];
    const auto& vs = series[k].values;
    if (lines) {
      os << "<polyline fill=\"none\" stroke=\"" << c << "\" stroke-width=\"2\" points=\"";
      for (std::size_t i = 0; i < vs.size(); ++i) os << left + slot * (double(i) + 0.5) << ',' << y(vs[i]) << ' ';
      os << "\"/>\n";
    } else {
      for (std::size_t i = 0; i < vs.size(); ++i)
        os << "<rect x=\"" << left + slot * double(i) + slot * 0.1 + bar * double(k) << "\" y=\"" << y(vs[i])
           << "\" width=\"" << bar << "\" height=\"" << top + ph - y(vs[i]) << "\" fill=\"" << c << "\"/>\n";
    }
    os << "<rect x=\"" << left + 10 + 120 * double(k) << "\" y=\"" << h - 16 << "\" width=\"10\" height=\"10\" fill=\""
       << c << "\"/><text x=\"" << left + 24 + 120 * double(k) << "\" y=\"" << h - 7 << "\">" << series[k].name
       << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace

std::string BenchReport::to_json() const {
  json j;
  j["tuples_per_stream"] = tuples_per_stream;
  j["types"] = json::array();
  for (const auto& t : types)
    j["types"].push_back({{"name", t.name},
                          {"tuples", t.tuples},
                          {"outputs", t.outputs},
                          {"throughput", t.throughput},
                          {"latency_ms", {{"p50", t.latency_ms.p50}, {"p95", t.latency_ms.p95}, {"p99", t.latency_ms.p99}}},
                          {"tuple_bytes", t.tuple_bytes},
                          {"encrypt_ms", t.encrypt_ms},
                          {"transform_ms", t.transform_ms},
                          {"decrypt_ms", t.decrypt_ms},
                          {"cloud_ops", ops_json(t.cloud_ops)},
                          {"user_ops", ops_json(t.user_ops)}});
  j["aggregates"] = json::array();
  for (const auto& a : aggregates)
    j["aggregates"].push_back({{"ws", a.ws},
                               {"transforms", {a.transforms[0], a.transforms[1], a.transforms[2]}},
                               {"encrypt_mean_ms", {a.encrypt_mean_ms[0], a.encrypt_mean_ms[1], a.encrypt_mean_ms[2]}},
                               {"encrypt_max_ms", {a.encrypt_max_ms[0], a.encrypt_max_ms[1], a.encrypt_max_ms[2]}}});
  j["scaling"] = json::array();
  for (const auto& s : scaling) j["scaling"].push_back({{"workers", s.workers}, {"throughput", s.throughput}});
  j["init"] = json::array();
  for (const auto& i : init) j["init"].push_back({{"attributes", i.attributes}, {"seconds", i.seconds}});
  return j.dump(2);
}

BenchReport BenchReport::from_json(const std::string& text) {
  BenchReport r;
  try {
    const auto j = json::parse(text);
    r.tuples_per_stream = j.at("tuples_per_stream");
    for (const auto& t : j.at("types")) {
      TypeReport x;
      x.name = t.at("name");
      x.tuples = t.at("tuples");
      x.outputs = t.at("outputs");
      x.throughput = t.at("throughput");
      x.latency_ms = {t.at("latency_ms").at("p50"), t.at("latency_ms").at("p95"), t.at("latency_ms").at("p99")};
      x.tuple_bytes = t.at("tuple_bytes");
      x.encrypt_ms = t.at("encrypt_ms");
      x.transform_ms = t.at("transform_ms");
      x.decrypt_ms = t.at("decrypt_ms");
      x.cloud_ops = ops_from(t.at("cloud_ops"));
      x.user_ops = ops_from(t.at("user_ops"));
      r.types.push_back(x);
    }
    for (const auto& a : j.at("aggregates")) {
      AggPoint p;
      p.ws = a.at("ws");
      for (int v = 0; v < 3; ++v) {
        p.transforms[v] = a.at("transforms").at(v);
        p.encrypt_mean_ms[v] = a.at("encrypt_mean_ms").at(v);
        p.encrypt_max_ms[v] = a.at("encrypt_max_ms").at(v);
      }
      r.aggregates.push_back(p);
    }
    for (const auto& s : j.at("scaling")) r.scaling.push_back({s.at("workers"), s.at("throughput")});
    for (const auto& i : j.at("init")) r.init.push_back({i.at("attributes"), i.at("seconds")});
  } catch (const json::exception& e) {
    throw DecodeError(std::string("bench report: ") + e.what());
  }
  return r;
}

std::string BenchReport::to_table() const {
  std::ostringstream os;
  os << "policy      tuples outputs  tput/s   p50ms   p95ms   p99ms  bytes/tuple  enc_ms  trans_ms  dec_ms  "
        "pairings/out\n";
  for (const auto& t : types) {
    char line[256];
    std::snprintf(line, sizeof line, "%-10s %7zu %7zu %7.1f %7.2f %7.2f %7.2f %12.0f %7.2f %9.3f %7.3f %13llu\n",
                  t.name.c_str(), t.tuples, t.outputs, t.throughput, t.latency_ms.p50, t.latency_ms.p95,
                  t.latency_ms.p99, t.tuple_bytes, t.encrypt_ms, t.transform_ms, t.decrypt_ms,
                  static_cast<unsigned long long>(t.cloud_ops.pairings));
    os << line;
  }
  if (!aggregates.empty()) {
    os << "\nws     transforms/output (Agg-1 Agg-2 Agg-3)   encrypt mean ms (Agg-1 Agg-2 Agg-3)\n";
    for (const auto& a : aggregates) {
      char line[256];
      std::snprintf(line, sizeof line, "%-6u %10.1f %6.1f %6.1f %24.2f %6.2f %6.2f\n", a.ws, a.transforms[0],
                    a.transforms[1], a.transforms[2], a.encrypt_mean_ms[0], a.encrypt_mean_ms[1],
                    a.encrypt_mean_ms[2]);
      os << line;
    }
  }
  if (!scaling.empty()) {
    os << "\nworkers  T1 tuples/s\n";
    for (const auto& s : scaling) os << s.workers << "        " << fixed(s.throughput, 1) << '\n';
  }
  if (!init.empty()) {
    os << "\nattributes  init s\n";
    for (const auto& i : init) os << i.attributes << "        " << fixed(i.seconds, 3) << '\n';
  }
  return os.str();
}

std::vector<std::string> plot(const BenchReport& r, const std::string& out_dir) {
  std::filesystem::create_directories(out_dir);
  std::vector<std::string> paths;
  auto write = [&](const std::string& name, const std::string& svg) {
    const auto path = (std::filesystem::path(out_dir) / name).string();
    std::ofstream f(path);
    if (!f) throw Error("cannot write " + path);
    f << svg;
    paths.push_back(path);
  };
  std::vector<std::string> names;
  Series tput{"tuples/s", {}}, p50{"p50", {}}, p95{"p95", {}}, p99{"p99", {}};
  for (const auto& t : r.types) {
    names.push_back(t.name);
    tput.values.push_back(t.throughput);
    p50.values.push_back(t.latency_ms.p50);
    p95.values.push_back(t.latency_ms.p95);
    p99.values.push_back(t.latency_ms.p99);
  }
  write("throughput.svg", svg_chart("Throughput per policy type", "tuples/s", names, {tput}, false));
  write("latency.svg", svg_chart("Latency at half saturation", "ms", names, {p50, p95, p99}, false));
  if (!r.aggregates.empty()) {
    std::vector<std::string> ws;
    std::vector<Series> tr{{"Agg-1", {}}, {"Agg-2", {}}, {"Agg-3", {}}}, enc = tr;
    for (const auto& a : r.aggregates) {
      ws.push_back(std::to_string(a.ws));
      for (int v = 0; v < 3; ++v) {
        tr[v].values.push_back(a.transforms[v]);
        enc[v].values.push_back(a.encrypt_mean_ms[v]);
      }
    }
    write("agg_transforms.svg", svg_chart("Cloud transforms per output vs window", "transforms", ws, tr, true));
    write("agg_encrypt.svg", svg_chart("Owner encryption per tuple", "ms", ws, enc, false));
  }
  if (!r.scaling.empty()) {
    std::vector<std::string> ws;
    Series s{"T1", {}};
    for (const auto& p : r.scaling) {
      ws.push_back(std::to_string(p.workers));
      s.values.push_back(p.throughput);
    }
    write("scaling.svg", svg_chart("Throughput vs workers", "tuples/s", ws, {s}, true));
  }
  return paths;
}

}  // namespace cipherflow::bench
