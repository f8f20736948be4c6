// Command-line front end: owner, cloud, user and benchmark roles.
#include <atomic>
#include <chrono>
#include <csignal>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"

#include "cipherflow/bench/bench.hpp"
#include "cipherflow/engine/engine.hpp"
#include "cipherflow/engine/server.hpp"
#include "cipherflow/engine/wire.hpp"
#include "cipherflow/error.hpp"
#include "cipherflow/operators/owner.hpp"
#include "cipherflow/operators/reference.hpp"
#include "cipherflow/operators/user.hpp"

using namespace cipherflow;
using nlohmann::json;

namespace {

std::atomic<bool> g_stop{false};

Bytes read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error("cannot read " + path);
  return Bytes(std::istreambuf_iterator<char>(f), {});
}

std::string read_text(const std::string& path) {
  const auto b = read_file(path);
  return std::string(b.begin(), b.end());
}

void write_file(const std::string& path, std::span<const std::uint8_t> bytes) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error("cannot write " + path);
  f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

void write_text(const std::string& path, const std::string& text) {
  write_file(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

std::vector<ops::DataTuple> read_tuples(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw Error("cannot read " + path);
  std::vector<ops::DataTuple> out;
  for (std::string line; std::getline(f, line);)
    if (!line.empty() && line[0] != '#') out.push_back(ops::DataTuple::parse(line));
  return out;
}

// {"id": "s1", "schema": [{"name": "price", "width": 8}], "ts_width": 16,
//  "bases": [2, 3], "filter_attrs": ["TS"], "windows": [2, 4],
//  "agg_attrs": [...], "join_attrs": [...], "join_domain": 65536,
//  "encodings": ["map", "filter", "map-filter", "join", "agg1", "agg2", "agg3"]}
ops::StreamConfig config_from_json(const std::string& text) {
  try {
    const auto j = json::parse(text);
    ops::StreamConfig c;
    c.id = j.at("id");
    for (const auto& a : j.at("schema")) c.schema.push_back({a.at("name"), a.value("width", policy::kDefaultWidth)});
    c.ts_width = j.value("ts_width", c.ts_width);
    c.bases = j.value("bases", c.bases);
    c.filter_attrs = j.value("filter_attrs", c.filter_attrs);
    c.windows = j.value("windows", c.windows);
    c.agg_attrs = j.value("agg_attrs", c.agg_attrs);
    c.join_attrs = j.value("join_attrs", c.join_attrs);
    c.join_domain = j.value("join_domain", c.join_domain);
    for (const std::string& e : j.value("encodings", std::vector<std::string>{})) {
      if (e == "map") c.enc.map = true;
      else if (e == "filter") c.enc.filter = true;
      else if (e == "map-filter") c.enc.map_filter = true;
      else if (e == "join") c.enc.join = true;
      else if (e == "agg1") c.enc.agg1 = true;
      else if (e == "agg2") c.enc.agg2 = true;
      else if (e == "agg3") c.enc.agg3 = true;
      else throw PolicyError("unknown encoding '" + e + "'");
    }
    return c;
  } catch (const json::exception& e) {
    throw DecodeError(std::string("stream config: ") + e.what());
  }
}

Bytes config_bytes(const ops::StreamConfig& c) {
  ByteWriter w;
  c.write(w);
  return std::move(w).bytes();
}

int owner_init(const std::string& config_path, const std::string& share, const std::string& out) {
  auto ctx = algebra::BilinearContext::setup();
  auto rng = algebra::Rng::system();
  std::optional<algebra::Scalar> k1;
  if (!share.empty()) k1 = ops::owner_keys_from_bytes(ctx, read_file(share)).det.k1;
  const auto keys = ops::owner_setup(ctx, config_from_json(read_text(config_path)), rng, k1);
  write_file(out, ops::owner_keys_to_bytes(keys));
  std::cout << "stream " << keys.config.id << ": " << keys.config.universe().size() << " attributes\n";
  return 0;
}

int owner_register(const std::string& keys_path, const std::string& addr) {
  auto ctx = algebra::BilinearContext::setup();
  const auto keys = ops::owner_keys_from_bytes(ctx, read_file(keys_path));
  engine::Connection::connect(addr).request(engine::MsgType::register_stream, config_bytes(keys.config));
  return 0;
}

int owner_encrypt(const std::string& stream, const std::string& keys_path, const std::string& in,
                  const std::string& addr) {
  auto ctx = algebra::BilinearContext::setup();
  const auto keys = ops::owner_keys_from_bytes(ctx, read_file(keys_path));
  if (keys.config.id != stream) throw KeyError("keys belong to stream '" + keys.config.id + "'");
  auto conn = engine::Connection::connect(addr);
  conn.request(engine::MsgType::register_stream, config_bytes(keys.config));
  ops::StreamEncryptor enc(ctx, keys);
  auto rng = algebra::Rng::system();
  std::size_t n = 0;
  for (const auto& t : read_tuples(in)) {
    ByteWriter w;
    w.str(stream);
    w.blob(enc.encrypt(t, rng).to_bytes());
    conn.request(engine::MsgType::tuple, w.bytes());
    ++n;
  }
  std::cout << "sent " << n << " tuples\n";
  return 0;
}

int cloud_serve(const std::string& listen, unsigned workers, const std::string& port_file) {
  auto ctx = algebra::BilinearContext::setup();
  engine::CloudEngine eng(ctx, workers);
  engine::Server server(eng, listen);
  server.start();
  if (!port_file.empty()) write_text(port_file, std::to_string(server.port()) + "\n");
  std::cout << "listening on port " << server.port() << std::endl;
  std::signal(SIGINT, [](int) { g_stop = true; });
  std::signal(SIGTERM, [](int) { g_stop = true; });
  while (!g_stop) std::this_thread::sleep_for(std::chrono::milliseconds(50));
  server.stop();
  return 0;
}

int register_policy(const std::string& keys_path, const std::string& addr) {
  const auto bytes = read_file(keys_path);
  const auto ack = engine::Connection::connect(addr).request(engine::MsgType::register_policy, bytes);
  ByteReader r(ack);
  std::cout << "registered policy " << r.u32() << '\n';
  return 0;
}

int issue_policy(const std::string& spec, const std::vector<std::string>& masters, const std::string& out_user,
                 const std::string& out_cloud) {
  auto ctx = algebra::BilinearContext::setup();
  auto rng = algebra::Rng::system();
  const auto p = ops::OperatorPolicy::parse(read_text(spec));
  std::vector<ops::OwnerKeys> owners;
  for (const auto& m : masters) owners.push_back(ops::owner_keys_from_bytes(ctx, read_file(m)));
  auto owner_of = [&](const std::string& id) -> const ops::OwnerKeys* {
    for (const auto& o : owners)
      if (o.config.id == id) return &o;
    return nullptr;
  };
  const auto* o1 = owner_of(p.stream);
  const auto* o2 = ops::is_join(p.kind) ? owner_of(p.stream2) : nullptr;
  if (!o1 || (ops::is_join(p.kind) && !o2)) throw KeyError("no master key for the policy's stream(s)");
  const auto keys = ops::issue_policy(p, *o1, o2, rng);
  write_file(out_user, keys.user.to_bytes());
  write_file(out_cloud, keys.cloud.to_bytes());
  return 0;
}

int user_subscribe(std::uint32_t policy_id, const std::string& keys_path, const std::string& addr,
                   const std::string& out, std::size_t max_records, int timeout_ms, const std::string& ready_file) {
  auto ctx = algebra::BilinearContext::setup();
  const ops::UserDecryptor user(ctx, ops::UserBundle::from_bytes(read_file(keys_path)));
  if (user.keys().policy.id != policy_id) throw KeyError("bundle is for policy " + std::to_string(user.keys().policy.id));
  auto rng = algebra::Rng::system();
  std::optional<det::JoinToken> token;
  if (ops::is_join(user.keys().policy.kind)) token = user.join_token(rng);
  auto conn = engine::Connection::connect(addr);
  conn.request(engine::MsgType::subscribe, engine::subscribe_payload(policy_id, token));
  if (!ready_file.empty()) write_text(ready_file, "ready\n");
  std::ofstream f(out, std::ios::trunc);
  if (!f) throw Error("cannot write " + out);
  std::size_t n = 0;
  while ((max_records == 0 || n < max_records) && conn.wait_readable(timeout_ms)) {
    auto frame = conn.receive();
    if (!frame) break;
    if (frame->type != static_cast<std::uint8_t>(engine::MsgType::output))
      throw ProtocolError("unexpected frame type " + std::to_string(frame->type));
    f << user.decrypt(ops::OutputRecord::from_bytes(frame->payload)).to_string() << '\n' << std::flush;
    ++n;
  }
  std::cout << "received " << n << " records\n";
  return 0;
}

// Plaintext outputs of a policy over the given streams, ingested file by
// file in argument order (the order owner-encrypt runs in).
int reference(const std::string& keys_path, const std::vector<std::string>& inputs, const std::string& out) {
  const auto bundle = ops::UserBundle::from_bytes(read_file(keys_path));
  const auto& p = bundle.policy;
  ops::ReferenceQuery ref = bundle.streams.size() > 1 ? ops::ReferenceQuery(p, bundle.streams[0], bundle.streams[1])
                                                      : ops::ReferenceQuery(p, bundle.streams[0]);
  std::ofstream f(out, std::ios::trunc);
  if (!f) throw Error("cannot write " + out);
  for (const auto& in : inputs) {
    const auto eq = in.find('=');
    if (eq == std::string::npos) throw Error("--in expects STREAM=FILE");
    const auto stream = in.substr(0, eq);
    // Same side order as the engine: a self-join sees each tuple on side 0, then side 1.
    std::vector<int> sides;
    if (stream == p.stream) sides.push_back(0);
    if (ops::is_join(p.kind) && stream == p.stream2) sides.push_back(1);
    for (const auto& t : read_tuples(in.substr(eq + 1)))
      for (int side : sides)
        for (const auto& r : ref.on_tuple(side, t)) f << r.to_string() << '\n';
  }
  return 0;
}

std::string ordering_notes(const bench::BenchReport& r) {
  std::ostringstream os;
  const bench::TypeReport* t1 = nullptr;
  bool fastest = true, cheapest = true, t2_slow = false;
  double max_bytes = 0;
  for (const auto& t : r.types) {
    if (t.name == "T1") t1 = &t;
    max_bytes = std::max(max_bytes, t.tuple_bytes);
  }
  for (const auto& t : r.types) {
    if (!t1 || &t == t1 || t.name == "T6") continue;
    fastest &= t1->throughput >= t.throughput;
    if (t.name <= "T4") cheapest &= t1->transform_ms <= t.transform_ms;
    if (t.name == "T2") t2_slow = t.throughput < t1->throughput;
  }
  if (t1) {
    os << "T1 highest throughput among T1..T5: " << (fastest ? "yes" : "no") << '\n';
    os << "T1 lowest cloud cost per output among filters: " << (cheapest ? "yes" : "no") << '\n';
    os << "T2 slower than T1: " << (t2_slow ? "yes" : "no") << '\n';
  }
  os << "largest mean tuple ciphertext: " << max_bytes << " bytes (expected order 1e4..1e5)\n";
  if (!r.aggregates.empty()) {
    const auto& a = r.aggregates.front();
    os << "owner encryption Agg-1 >= Agg-3 >= Agg-2 (amortized): "
       << (a.encrypt_mean_ms[0] >= a.encrypt_mean_ms[2] && a.encrypt_mean_ms[2] >= a.encrypt_mean_ms[1] ? "yes" : "no")
       << '\n';
  }
  if (r.scaling.size() > 1)
    os << "throughput ratio " << r.scaling.back().workers << " vs " << r.scaling.front().workers
       << " workers: " << r.scaling.back().throughput / r.scaling.front().throughput << '\n';
  return os.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Encrypted stream processing with fine-grained access control"};
  app.require_subcommand(1);

  std::string config, share, out, keys, in, addr = "127.0.0.1:7700", stream, spec, out_user, out_cloud, port_file,
                                                ready_file;
  std::vector<std::string> masters, inputs;
  unsigned workers = 1;
  std::uint32_t policy_id = 0;
  std::size_t max_records = 0;
  int timeout_ms = 5000;

  auto* init = app.add_subcommand("owner-init", "Generate a stream owner's key material");
  init->add_option("--config", config, "Stream description (JSON)")->required();
  init->add_option("--share-k1-from", share, "Owner keys whose join PRP key to reuse");
  init->add_option("--out", out, "Owner key file")->required();

  auto* reg = app.add_subcommand("owner-register", "Register a stream description with the cloud");
  reg->add_option("--keys", keys, "Owner key file")->required();
  reg->add_option("--connect", addr, "Cloud address host:port");

  auto* enc = app.add_subcommand("owner-encrypt", "Encrypt tuple records and send them to the cloud");
  enc->add_option("--stream", stream)->required();
  enc->add_option("--keys", keys, "Owner key file")->required();
  enc->add_option("--in", in, "One \"ts,attr=value,...\" record per line")->required();
  enc->add_option("--connect", addr, "Cloud address host:port");

  auto* serve = app.add_subcommand("cloud-serve", "Run the cloud engine");
  serve->add_option("--listen", addr, "host:port (port 0 picks one)");
  serve->add_option("--workers", workers, "Engine workers (0 runs inline)");
  serve->add_option("--port-file", port_file, "Write the bound port here");

  auto* regp = app.add_subcommand("register-policy", "Register a cloud key bundle");
  regp->add_option("--keys", keys, "Cloud bundle")->required();
  regp->add_option("--connect", addr, "Cloud address host:port");

  auto* issue = app.add_subcommand("issue-policy", "Generate the key material of one policy");
  issue->add_option("--spec", spec, "Policy text")->required();
  issue->add_option("--master", masters, "Owner key file (repeat for joins)")->required();
  issue->add_option("--out-user", out_user)->required();
  issue->add_option("--out-cloud", out_cloud)->required();

  auto* sub = app.add_subcommand("user-subscribe", "Receive and decrypt a policy's outputs");
  sub->add_option("--policy", policy_id)->required();
  sub->add_option("--keys", keys, "User bundle")->required();
  sub->add_option("--connect", addr, "Cloud address host:port");
  sub->add_option("--out", out, "Decrypted records, one per line")->required();
  sub->add_option("--max-records", max_records, "Stop after this many records (0: until idle)");
  sub->add_option("--timeout-ms", timeout_ms, "Stop after this long without output");
  sub->add_option("--ready-file", ready_file, "Written once the subscription is acknowledged");

  auto* ref = app.add_subcommand("reference", "Plaintext outputs of a policy (for comparison)");
  ref->add_option("--keys", keys, "User bundle")->required();
  ref->add_option("--in", inputs, "STREAM=FILE, in ingestion order")->required();
  ref->add_option("--out", out)->required();

  auto* bench_cmd = app.add_subcommand("bench", "Stock-market benchmark");
  bench_cmd->require_subcommand(1);
  std::size_t streams = 100, tuples = 10000;
  std::uint64_t seed = 1;
  std::string out_dir = "bench-data", json_path = "bench.json";
  auto* gen = bench_cmd->add_subcommand("generate", "Write StockEvent tuple files");
  gen->add_option("--streams", streams);
  gen->add_option("--tuples", tuples);
  gen->add_option("--seed", seed);
  gen->add_option("--out-dir", out_dir);
  bench::RunOptions ro;
  auto* run = bench_cmd->add_subcommand("run", "Measure T1..T6, aggregates, scaling and setup");
  run->add_option("--tuples", ro.tuples, "Tuples per stream per policy type");
  run->add_option("--seed", ro.seed);
  run->add_option("--windows", ro.windows);
  run->add_option("--scaling-streams", ro.scaling_streams);
  run->add_option("--scaling-tuples", ro.scaling_tuples);
  run->add_option("--scaling-workers", ro.scaling_workers);
  run->add_option("--init-sizes", ro.init_sizes);
  run->add_option("--latency-tuples", ro.latency_tuples);
  run->add_option("--json", json_path, "Machine-readable report");
  auto* plot = bench_cmd->add_subcommand("plot", "Render a report's charts as SVG");
  plot->add_option("--json", json_path)->required();
  plot->add_option("--out-dir", out_dir);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*init) return owner_init(config, share, out);
    if (*reg) return owner_register(keys, addr);
    if (*enc) return owner_encrypt(stream, keys, in, addr);
    if (*serve) return cloud_serve(addr, workers, port_file);
    if (*regp) return register_policy(keys, addr);
    if (*issue) return issue_policy(spec, masters, out_user, out_cloud);
    if (*sub) return user_subscribe(policy_id, keys, addr, out, max_records, timeout_ms, ready_file);
    if (*ref) return reference(keys, inputs, out);
    if (*gen) {
      std::filesystem::create_directories(out_dir);
      const auto data = bench::generate(streams, tuples, seed);
      for (std::size_t s = 0; s < data.size(); ++s) {
        std::ofstream f(std::filesystem::path(out_dir) / ("stock" + std::to_string(s) + ".txt"));
        bench::write_tuples(f, data[s]);
      }
      std::cout << "wrote " << streams << " streams of " << tuples << " tuples to " << out_dir << '\n';
      return 0;
    }
    if (*run) {
      const auto report = bench::run(ro);
      write_text(json_path, report.to_json());
      std::cout << report.to_table() << '\n' << ordering_notes(report);
      return 0;
    }
    if (*plot) {
      for (const auto& p : bench::plot(bench::BenchReport::from_json(read_text(json_path)), out_dir))
        std::cout << p << '\n';
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
