#include <gtest/gtest.h>
#include <sys/socket.h>
#include <unistd.h>

#include <atomic>
#include <chrono>
#include <thread>

#include "cipherflow/engine/engine.hpp"
#include "cipherflow/engine/server.hpp"
#include "cipherflow/engine/wire.hpp"
#include "cipherflow/error.hpp"
#include "cipherflow/operators/reference.hpp"
#include "cipherflow/operators/user.hpp"

using namespace cipherflow;
using namespace cipherflow::engine;
using namespace cipherflow::ops;
using algebra::Rng;

namespace {

algebra::ContextPtr ctx() {
  static auto c = algebra::BilinearContext::setup();
  return c;
}

StreamConfig config(const std::string& id) {
  StreamConfig c;
  c.id = id;
  c.schema = {{"stockId", 4}, {"price", 8}};
  c.ts_width = 8;
  c.bases = {2, 3};
  c.filter_attrs = {kTs, "stockId"};
  c.windows = {2, 4};
  c.agg_attrs = {"price"};
  c.join_attrs = {"stockId"};
  c.enc = {true, true, true, true, true, true, true};
  return c;
}

struct Fixture {
  OwnerKeys o1, o2;
  std::vector<DataTuple> plain[2];
  std::vector<SecureTuple> secure[2];

  explicit Fixture(std::size_t n) {
    Rng rng = Rng::seeded(77);
    o1 = owner_setup(ctx(), config("s1"), rng);
    o2 = owner_setup(ctx(), config("s2"), rng, o1.det.k1);
    for (int side = 0; side < 2; ++side) {
      StreamEncryptor enc(ctx(), side ? o2 : o1);
      for (std::uint64_t ts = 0; ts < n; ++ts) {
        plain[side].push_back({ts, {{"stockId", rng.uniform(5)}, {"price", rng.uniform(100)}}});
        secure[side].push_back(enc.encrypt(plain[side].back(), rng));
      }
    }
  }

  static Fixture& get() {
    static Fixture f(24);
    return f;
  }

  IssuedKeys issue(const std::string& text, std::uint64_t seed = 1) {
    Rng rng = Rng::seeded(seed);
    const auto p = OperatorPolicy::parse(text);
    if (is_join(p.kind)) return issue_policy(p, o1, &o2, rng);
    return issue_policy(p, p.stream == "s1" ? o1 : o2, nullptr, rng);
  }
};

// Six policies covering every operator kind over the two streams.
const std::vector<std::string> kScenario = {
    "policy 1\nkind map\nstream s1\nmap price\n",
    "policy 2\nkind filter\nstream s1\nstockId = 2\nTS > 3\nTS < 20\n",
    "policy 3\nkind join\nstream s1\nstream2 s2\njoin stockId\nbuffers 3 3\n",
    "policy 4\nkind agg1\nstream s1\naggregate price\nwindow 4\n",
    "policy 5\nkind agg2\nstream s2\naggregate price\nwindow 2\n",
    "policy 6\nkind agg3\nstream s2\naggregate price\nwindow 3\n",
    "policy 7\nkind map-filter\nstream s2\nmap price stockId\nstockId <= 2\n",
    "policy 8\nkind map-filter-join\nstream s1\nstream2 s2\nmap price\njoin stockId\nbuffers 4 4\nstockId >= 1\n",
    "policy 9\nkind filter-agg\nstream s1\naggregate price\nwindow 2\nvariant 3\nTS >= 5\n",
    "policy 10\nkind filter-agg\nstream s2\naggregate price\nwindow 4\nvariant 2\nTS >= 4\n",
};

// Reference outputs per policy for the whole fixture, ingesting s1 then s2
// tuple by tuple (interleaved by index).
std::map<std::uint32_t, std::vector<PlainRecord>> reference(Fixture& f, const std::vector<std::string>& texts) {
  std::map<std::uint32_t, std::vector<PlainRecord>> out;
  for (const auto& text : texts) {
    const auto p = OperatorPolicy::parse(text);
    ReferenceQuery ref = is_join(p.kind) ? ReferenceQuery(p, f.o1.config, f.o2.config)
                                         : ReferenceQuery(p, p.stream == "s1" ? f.o1.config : f.o2.config);
    auto& recs = out[p.id];
    for (std::size_t i = 0; i < f.plain[0].size(); ++i)
      for (int s = 0; s < 2; ++s) {
        const std::string stream = s ? "s2" : "s1";
        const int side = is_join(p.kind) ? s : (p.stream == stream ? 0 : -1);
        if (side < 0) continue;
        for (auto& r : ref.on_tuple(side, f.plain[s][i])) recs.push_back(std::move(r));
      }
  }
  return out;
}

}  // namespace

TEST(Engine, RegistrationErrors) {
  auto& f = Fixture::get();
  CloudEngine engine(ctx(), 0);
  engine.register_stream(f.o1.config);
  engine.register_stream(f.o1.config);  // identical: idempotent
  auto changed = f.o1.config;
  changed.windows = {2};
  EXPECT_THROW(engine.register_stream(changed), ProtocolError);

  const auto keys = f.issue(kScenario[0]);
  EXPECT_EQ(engine.register_policy(keys.cloud), 1u);
  EXPECT_THROW(engine.register_policy(keys.cloud), ProtocolError);  // duplicate id
  EXPECT_THROW(engine.register_policy(f.issue(kScenario[2]).cloud), ProtocolError);  // s2 unknown
  EXPECT_THROW(engine.ingest("nope", f.secure[0][0]), ProtocolError);
  EXPECT_THROW(engine.subscribe(42, [](const auto&) {}), ProtocolError);
}

TEST(Engine, RejectsNonIncreasingTimestamps) {
  auto& f = Fixture::get();
  CloudEngine engine(ctx(), 1);
  engine.register_stream(f.o1.config);
  EXPECT_EQ(engine.ingest("s1", f.secure[0][1]), 0u);  // no policies: ack, no output
  EXPECT_THROW(engine.ingest("s1", f.secure[0][1]), ProtocolError);
  EXPECT_THROW(engine.ingest("s1", f.secure[0][0]), ProtocolError);
  EXPECT_EQ(engine.ingest("s1", f.secure[0][2]), 0u);
}

TEST(Engine, HundredPoliciesOnOneStream) {
  auto& f = Fixture::get();
  CloudEngine engine(ctx(), 1);
  engine.register_stream(f.o1.config);
  std::atomic<int> delivered{0};
  for (std::uint32_t id = 1; id <= 100; ++id) {
    auto keys = f.issue("policy " + std::to_string(id) + "\nkind map\nstream s1\nmap price\n", id);
    engine.register_policy(keys.cloud);
    engine.subscribe(id, [&](const OutputRecord&) { ++delivered; });
  }
  EXPECT_EQ(engine.policy_count(), 100u);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(engine.ingest("s1", f.secure[0][i]), 100u);
  EXPECT_EQ(delivered.load(), 300);
}

TEST(Engine, ScenarioMatchesReferenceWithWorkers) {
  auto& f = Fixture::get();
  const auto expected = reference(f, kScenario);
  for (unsigned workers : {0u, 1u, 4u}) {
    CloudEngine engine(ctx(), workers);
    engine.register_stream(f.o1.config);
    engine.register_stream(f.o2.config);
    std::map<std::uint32_t, std::vector<PlainRecord>> got;
    std::mutex mu;
    std::vector<std::unique_ptr<UserDecryptor>> users;
    Rng rng = Rng::seeded(5);
    for (const auto& text : kScenario) {
      auto keys = f.issue(text);
      engine.register_policy(keys.cloud);
      users.push_back(std::make_unique<UserDecryptor>(ctx(), keys.user));
      auto* user = users.back().get();
      std::optional<det::JoinToken> token;
      if (is_join(keys.user.policy.kind)) token = user->join_token(rng);
      engine.subscribe(
          keys.user.policy.id,
          [&, user](const OutputRecord& rec) {
            auto plain = user->decrypt(rec);
            std::lock_guard lock(mu);
            got[rec.policy_id].push_back(std::move(plain));
          },
          token);
    }
    // Both streams ingest concurrently; the interleaving is fixed per index
    // so join outputs are deterministic.
    for (std::size_t i = 0; i < f.secure[0].size(); ++i) {
      engine.ingest("s1", f.secure[0][i]);
      engine.ingest("s2", f.secure[1][i]);
    }
    for (const auto& [id, recs] : expected) EXPECT_EQ(got[id], recs) << "policy " << id << " workers " << workers;
  }
}

TEST(Engine, ParallelStreamsAreIndependent) {
  auto& f = Fixture::get();
  CloudEngine engine(ctx(), 4);
  engine.register_stream(f.o1.config);
  engine.register_stream(f.o2.config);
  std::atomic<int> outputs{0};
  for (std::uint32_t id : {1u, 2u}) {
    auto keys = f.issue("policy " + std::to_string(id) + "\nkind map\nstream s" + std::to_string(id) + "\nmap price\n");
    engine.register_policy(keys.cloud);
    engine.subscribe(id, [&](const OutputRecord&) { ++outputs; });
  }
  std::thread a([&] {
    for (const auto& st : f.secure[0]) engine.ingest("s1", st);
  });
  std::thread b([&] {
    for (const auto& st : f.secure[1]) engine.ingest("s2", st);
  });
  a.join();
  b.join();
  EXPECT_EQ(outputs.load(), static_cast<int>(2 * f.secure[0].size()));
}

TEST(Engine, HoldsNoSecretMaterial) {
  auto& f = Fixture::get();
  CloudEngine engine(ctx(), 0);
  engine.register_stream(f.o1.config);
  engine.register_stream(f.o2.config);
  std::vector<Scalar> secrets{f.o1.mk.y, f.o2.mk.y, f.o1.det.k1, f.o1.det.k2, f.o2.det.k2};
  for (const auto& text : kScenario) {
    auto keys = f.issue(text);
    engine.register_policy(keys.cloud);
    secrets.insert(secrets.end(), keys.user.z.begin(), keys.user.z.end());
    if (keys.user.agg1_secret) secrets.push_back(*keys.user.agg1_secret);
  }
  for (const auto& [a, m] : f.o1.agg1_secrets)
    for (const auto& [ws, s] : m) secrets.push_back(s);
  for (const auto& bytes : engine.registered_material())
    for (const auto& s : secrets) {
      const auto b = s.to_bytes();
      EXPECT_EQ(std::search(bytes.begin(), bytes.end(), b.begin(), b.end()), bytes.end());
    }
}

// ---- wire protocol ----

TEST(Wire, FrameRoundTripOverSocketPair) {
  int fds[2];
  ASSERT_EQ(::socketpair(AF_UNIX, SOCK_STREAM, 0, fds), 0);
  const Bytes payload{1, 2, 3};
  write_frame(fds[0], MsgType::ack, payload);
  write_frame(fds[0], MsgType::error, error_payload(ErrorCode::protocol, "boom"));
  auto f1 = read_frame(fds[1]);
  ASSERT_TRUE(f1);
  EXPECT_EQ(f1->type, 5);
  EXPECT_EQ(f1->payload, payload);
  auto f2 = read_frame(fds[1]);
  auto [code, msg] = parse_error(f2->payload);
  EXPECT_EQ(code, ErrorCode::protocol);
  EXPECT_EQ(msg, "boom");
  // Length field is big-endian and counts payload bytes only.
  const std::uint8_t raw[] = {3, 0, 0, 0, 2, 9, 9};
  ASSERT_EQ(::write(fds[0], raw, sizeof raw), 7);
  auto f3 = read_frame(fds[1]);
  EXPECT_EQ(f3->payload, (Bytes{9, 9}));
  ::close(fds[0]);
  EXPECT_FALSE(read_frame(fds[1]));
  ::close(fds[1]);
}

TEST(Wire, TruncatedFrameIsAnError) {
  int fds[2];
  ASSERT_EQ(::socketpair(AF_UNIX, SOCK_STREAM, 0, fds), 0);
  const std::uint8_t raw[] = {3, 0, 0, 0, 9, 1};
  ASSERT_EQ(::write(fds[0], raw, sizeof raw), 6);
  ::close(fds[0]);
  EXPECT_THROW(read_frame(fds[1]), ProtocolError);
  ::close(fds[1]);
}

TEST(Server, EndToEndOverTcp) {
  auto& f = Fixture::get();
  CloudEngine engine(ctx(), 2);
  Server server(engine, "127.0.0.1:0");
  server.start();
  const std::string addr = "127.0.0.1:" + std::to_string(server.port());

  auto owner = Connection::connect(addr);
  for (const auto* c : {&f.o1.config, &f.o2.config}) {
    ByteWriter w;
    c->write(w);
    owner.request(MsgType::register_stream, w.bytes());
  }

  // User bundles are refused by the cloud before any parsing.
  auto admin = Connection::connect(addr);
  const auto join_keys = f.issue(kScenario[2]);
  EXPECT_THROW(admin.request(MsgType::register_policy, join_keys.user.to_bytes()), KeyError);
  const std::uint8_t junk[] = {1};
  EXPECT_THROW(admin.request(static_cast<MsgType>(42), junk), ProtocolError);

  const auto expected = reference(f, kScenario);
  std::vector<std::thread> readers;
  std::map<std::uint32_t, std::vector<PlainRecord>> got;
  std::vector<std::unique_ptr<Connection>> subs;
  Rng rng = Rng::seeded(8);
  for (const auto& text : kScenario) {
    auto keys = f.issue(text);
    const auto ack = admin.request(MsgType::register_policy, keys.cloud.to_bytes());
    ByteReader r(ack);
    EXPECT_EQ(r.u32(), keys.cloud.policy.id);
    auto user = std::make_shared<UserDecryptor>(ctx(), keys.user);
    std::optional<det::JoinToken> token;
    if (is_join(keys.user.policy.kind)) token = user->join_token(rng);
    subs.push_back(std::make_unique<Connection>(Connection::connect(addr)));
    subs.back()->request(MsgType::subscribe, subscribe_payload(keys.user.policy.id, token));
    const auto n = expected.at(keys.user.policy.id).size();
    auto* conn = subs.back().get();
    auto& sink = got[keys.user.policy.id];
    readers.emplace_back([conn, user, n, &sink] {
      while (sink.size() < n) {
        if (!conn->wait_readable(20000)) break;
        auto frame = conn->receive();
        if (!frame) break;
        ASSERT_EQ(frame->type, static_cast<std::uint8_t>(MsgType::output));
        sink.push_back(user->decrypt(OutputRecord::from_bytes(frame->payload)));
      }
    });
  }

  for (std::size_t i = 0; i < f.secure[0].size(); ++i)
    for (int s = 0; s < 2; ++s) {
      ByteWriter w;
      w.str(s ? "s2" : "s1");
      w.blob(f.secure[s][i].to_bytes());
      owner.request(MsgType::tuple, w.bytes());
    }
  // Out-of-order tuples are rejected with an ERROR frame.
  ByteWriter w;
  w.str("s1");
  w.blob(f.secure[0][0].to_bytes());
  EXPECT_THROW(owner.request(MsgType::tuple, w.bytes()), ProtocolError);

  for (auto& t : readers) t.join();
  for (const auto& [id, recs] : expected) EXPECT_EQ(got[id], recs) << "policy " << id;
  server.stop();
}
