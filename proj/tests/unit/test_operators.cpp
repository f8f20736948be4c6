#include <gtest/gtest.h>

#include <algorithm>

#include "cipherflow/algebra/op_counts.hpp"
#include "cipherflow/error.hpp"
#include "cipherflow/operators/cloud.hpp"
#include "cipherflow/operators/owner.hpp"
#include "cipherflow/operators/reference.hpp"
#include "cipherflow/operators/user.hpp"

using namespace cipherflow;
using namespace cipherflow::ops;
using algebra::Rng;

namespace {

algebra::ContextPtr ctx() {
  static auto c = algebra::BilinearContext::setup();
  return c;
}

StreamConfig full_config(const std::string& id) {
  StreamConfig c;
  c.id = id;
  c.schema = {{"a", 8}, {"b", 8}, {"j", 4}};
  c.ts_width = 8;
  c.bases = {2, 3};
  c.filter_attrs = {kTs, "a"};
  c.windows = {2, 4};
  c.agg_attrs = {"a", "b"};
  c.join_attrs = {"j"};
  c.enc = {true, true, true, true, true, true, true};
  return c;
}

DataTuple tuple(std::uint64_t ts, std::uint64_t a, std::uint64_t b, std::uint64_t j) {
  return {ts, {{"a", a}, {"b", b}, {"j", j}}};
}

OperatorPolicy parse(const std::string& text) { return OperatorPolicy::parse(text); }

// Two owners with every encoding on, sharing the join PRP key, and one
// encrypted random stream each.
struct World {
  static constexpr std::size_t kTuples = 48;
  OwnerKeys o1, o2;
  std::vector<DataTuple> plain[2];
  std::vector<SecureTuple> secure[2];

  World() : o1(make(full_config("s1"), 1, std::nullopt)), o2(make(full_config("s2"), 2, o1.det.k1)) {
    Rng rng = Rng::seeded(7);
    for (int side = 0; side < 2; ++side) {
      StreamEncryptor enc(ctx(), side ? o2 : o1);
      for (std::uint64_t ts = 0; ts < kTuples; ++ts) {
        plain[side].push_back(tuple(ts, rng.uniform(256), rng.uniform(256), rng.uniform(6)));
        secure[side].push_back(enc.encrypt(plain[side].back(), rng));
      }
    }
  }

  static OwnerKeys make(StreamConfig c, std::uint64_t seed, std::optional<Scalar> k1) {
    Rng rng = Rng::seeded(seed);
    return owner_setup(ctx(), std::move(c), rng, k1);
  }

  static World& get() {
    static World w;
    return w;
  }
};

// Runs the secure pipeline and the reference side by side; returns the
// number of output records compared.
std::size_t check_equivalence(const OperatorPolicy& p, std::size_t n = World::kTuples) {
  auto& w = World::get();
  const bool joins = is_join(p.kind);
  Rng rng = Rng::seeded(p.id);
  auto keys = issue_policy(p, w.o1, joins ? &w.o2 : nullptr, rng);
  auto cloud = make_query(ctx(), keys.cloud, w.o1.config, joins ? &w.o2.config : nullptr);
  UserDecryptor user(ctx(), keys.user);
  if (joins) cloud->set_join_token(user.join_token(rng));
  ReferenceQuery ref(p, w.o1.config, joins ? std::optional(w.o2.config) : std::nullopt);

  std::size_t compared = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (int side = 0; side < (joins ? 2 : 1); ++side) {
      const auto expected = ref.on_tuple(side, w.plain[side][i]);
      std::vector<PlainRecord> got;
      for (const auto& rec : cloud->on_tuple(side, w.secure[side][i])) got.push_back(user.decrypt(rec));
      EXPECT_EQ(got, expected) << "policy " << p.id << " ts " << i << " side " << side;
      compared += expected.size();
    }
  }
  return compared;
}

}  // namespace

// ---- policy text ----

TEST(OperatorPolicyText, RoundTrip) {
  const auto p = parse(
      "policy 9\nkind map-filter-join\nstream s1\nstream2 s2\nmap a b\njoin j\nbuffers 4 5\n"
      "a >= 10  # comment\nTS mod 1 3\nwhere2 a < 20\n");
  EXPECT_EQ(p.kind, OperatorKind::map_filter_join);
  EXPECT_EQ(p.buffer2, 5u);
  ASSERT_EQ(p.filters.size(), 2u);
  EXPECT_EQ(p.filters2[0].op, policy::Op::le);
  EXPECT_EQ(p.filters2[0].constant, 19u);
  EXPECT_EQ(OperatorPolicy::parse(p.to_text()), p);
  ByteWriter w;
  p.write(w);
  ByteReader r(w.bytes());
  EXPECT_EQ(OperatorPolicy::read(r), p);
}

TEST(OperatorPolicyText, FilterAggStartFromPredicate) {
  const auto p = parse("kind filter-agg\nstream s\naggregate a\nwindow 2\nvariant 3\nTS >= 4\n");
  EXPECT_EQ(p.start, 4u);
  EXPECT_TRUE(p.filters.empty());
  EXPECT_THROW(parse("kind filter-agg\nstream s\naggregate a\nwindow 2\nvariant 3\na >= 4\n"), PolicyError);
  EXPECT_THROW(parse("stream s\n"), PolicyError);
  EXPECT_THROW(parse("kind nope\n"), PolicyError);
}

TEST(OperatorPolicyText, ValidationRejectsBadPolicies) {
  const auto c = full_config("s1");
  auto bad = [&](const std::string& text) { EXPECT_THROW(parse(text).validate(c, nullptr), PolicyError) << text; };
  bad("kind map\nstream s1\nmap zz\n");
  bad("kind map\nstream other\nmap a\n");
  bad("kind filter\nstream s1\nb >= 3\n");  // b not in FA
  bad("kind agg1\nstream s1\naggregate a\nwindow 3\n");  // 3 not in W
  bad("kind agg3\nstream s1\naggregate a\nwindow 7\n");  // 7 not smooth over {2,3}
  bad("kind agg3\nstream s1\naggregate j\nwindow 2\n");  // j not aggregatable
  bad("kind join\nstream s1\njoin j\nbuffers 1 1\n");    // no second stream
  bad("kind filter-agg\nstream s1\naggregate a\nwindow 1\nvariant 2\n");
  parse("kind agg3\nstream s1\naggregate a\nwindow 6\n").validate(c, nullptr);  // 6 = 2*3, not in W
}

// ---- wire records ----

TEST(OperatorWire, TupleTextAndBytes) {
  const auto t = DataTuple::parse("12,a=5,b=7");
  EXPECT_EQ(t.ts, 12u);
  EXPECT_EQ(t.value("b"), 7u);
  EXPECT_EQ(t.value(kTs), 12u);
  EXPECT_EQ(DataTuple::parse(t.to_string()), t);
  EXPECT_EQ(DataTuple::from_bytes(t.to_bytes()), t);
  EXPECT_THROW(DataTuple::parse("x,a=1"), DecodeError);
  EXPECT_THROW(DataTuple::parse("1,a"), DecodeError);
}

TEST(OperatorWire, SecureTupleRoundTripAndDuplicateLabels) {
  auto& w = World::get();
  const auto& st = w.secure[0][3];
  const auto bytes = st.to_bytes();
  const auto back = SecureTuple::from_bytes(bytes);
  EXPECT_EQ(back.to_bytes(), bytes);
  EXPECT_EQ(back.components.size(), st.components.size());

  SecureTuple dup;
  dup.components.push_back(st.components[0]);
  dup.components.push_back(st.components[0]);
  EXPECT_THROW(SecureTuple::from_bytes(dup.to_bytes()), DecodeError);
}

TEST(OperatorWire, HintsOnlyForFilterAttributes) {
  auto& w = World::get();
  for (const auto& st : w.secure[0]) {
    ASSERT_EQ(st.hints.size(), 1u);
    EXPECT_EQ(st.hints[0].first, "a");
  }
}

TEST(OperatorWire, StreamConfigRoundTrip) {
  auto& w = World::get();
  ByteWriter bw;
  w.o1.config.write(bw);
  ByteReader r(bw.bytes());
  const auto back = StreamConfig::read(r);
  EXPECT_EQ(back.universe(), w.o1.config.universe());
  EXPECT_EQ(back.agg3_offsets.at("a"), w.o1.config.agg3_offsets.at("a"));
}

TEST(OperatorWire, EncryptorEnforcesSchemaAndOrder) {
  auto& w = World::get();
  Rng rng = Rng::seeded(3);
  StreamEncryptor enc(ctx(), w.o1);
  EXPECT_THROW(enc.encrypt({0, {{"a", 1}, {"b", 2}}}, rng), DomainError);
  EXPECT_THROW(enc.encrypt(tuple(0, 256, 0, 0), rng), DomainError);
  EXPECT_THROW(enc.encrypt(tuple(0, 1, 1, 16), rng), DomainError);
  EXPECT_THROW(enc.encrypt(tuple(1, 1, 1, 1), rng), ProtocolError);  // must start at 0
  enc.encrypt(tuple(0, 1, 1, 1), rng);
  EXPECT_THROW(enc.encrypt(tuple(0, 1, 1, 1), rng), ProtocolError);
  EXPECT_THROW(enc.encrypt(tuple(2, 1, 1, 1), rng), ProtocolError);  // gap
  // Attribute order in the input does not matter.
  enc.encrypt({1, {{"j", 1}, {"b", 2}, {"a", 3}}}, rng);
}

// ---- worked examples ----

namespace {

struct Small {
  OwnerKeys owner;
  StreamEncryptor enc;
  Rng rng;

  explicit Small(StreamConfig c, std::uint64_t seed = 11)
      : owner(World::make(std::move(c), seed, std::nullopt)), enc(ctx(), owner), rng(Rng::seeded(seed + 1)) {}

  // Full pipeline for a single-stream policy over the given tuples.
  std::vector<PlainRecord> run(const OperatorPolicy& p, const std::vector<DataTuple>& tuples) {
    auto keys = issue_policy(p, owner, nullptr, rng);
    auto cloud = make_query(ctx(), keys.cloud, owner.config, nullptr);
    UserDecryptor user(ctx(), keys.user);
    std::vector<PlainRecord> out;
    for (const auto& st : cts(tuples))
      for (const auto& rec : cloud->on_tuple(0, st)) out.push_back(user.decrypt(rec));
    return out;
  }

  std::vector<SecureTuple> cts(const std::vector<DataTuple>& tuples) {
    while (cache.size() < tuples.size()) cache.push_back(enc.encrypt(tuples[cache.size()], rng));
    return {cache.begin(), cache.begin() + static_cast<std::ptrdiff_t>(tuples.size())};
  }

  std::vector<SecureTuple> cache;
};

StreamConfig price_config(bool agg1, bool agg2, bool agg3, std::vector<unsigned> bases = {2, 3}) {
  StreamConfig c;
  c.id = "prices";
  c.schema = {{"price", 8}};
  c.ts_width = 8;
  c.bases = std::move(bases);
  c.windows = {2, 3, 4};
  c.agg_attrs = {"price"};
  c.enc.agg1 = agg1;
  c.enc.agg2 = agg2;
  c.enc.agg3 = agg3;
  return c;
}

std::vector<DataTuple> prices(std::initializer_list<std::uint64_t> v) {
  std::vector<DataTuple> out;
  for (auto p : v) out.push_back({out.size(), {{"price", p}}});
  return out;
}

std::vector<std::uint64_t> sums(const std::vector<PlainRecord>& recs) {
  std::vector<std::uint64_t> out;
  for (const auto& r : recs) out.push_back(r.field("sum"));
  return out;
}

OperatorPolicy agg(const std::string& kind, std::uint32_t ws, const std::string& extra = "") {
  return parse("policy 1\nkind " + kind + "\nstream prices\naggregate price\nwindow " + std::to_string(ws) + "\n" + extra);
}

}  // namespace

TEST(OperatorMap, ProjectsAndHidesOtherAttributes) {
  StreamConfig c;
  c.id = "m";
  c.schema = {{"A1", 8}, {"A2", 8}};
  c.enc.map = true;
  Small s(c);
  const std::vector<DataTuple> in{{1, {{"A1", 5}, {"A2", 7}}}};
  // Map streams have no window encodings, so timestamps need not start at 0.
  const auto p = parse("policy 1\nkind map\nstream m\nmap A1\n");
  const auto out = s.run(p, in);
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0], (PlainRecord{{{"ts", 1}, {"A1", 5}}}));

  Rng rng = Rng::seeded(5);
  auto keys = issue_policy(p, s.owner, nullptr, rng);
  const auto st = s.cts(in)[0];
  EXPECT_EQ(st.components.size(), 2u);  // one component per schema attribute
  EXPECT_FALSE(abe::abe_trans(keys.cloud.keys[0], *st.abe(map_label("A2"))));

  const auto all = s.run(parse("policy 2\nkind map\nstream m\nmap A1 A2\n"), in);
  EXPECT_EQ(all[0], (PlainRecord{{{"ts", 1}, {"A1", 5}, {"A2", 7}}}));
}

TEST(OperatorFilter, ExhaustiveTimestampPredicates) {
  StreamConfig c;
  c.id = "f";
  c.schema = {{"x", 4}};
  c.ts_width = 5;
  c.bases = {2};
  c.filter_attrs = {kTs};
  c.enc.filter = true;
  Small s(c);
  std::vector<DataTuple> in;
  for (std::uint64_t ts = 0; ts < 32; ++ts) in.push_back({ts, {{"x", ts % 16}}});
  auto admitted = [&](const std::string& preds, std::uint32_t id) {
    std::vector<std::uint64_t> ts;
    for (const auto& r : s.run(parse("policy " + std::to_string(id) + "\nkind filter\nstream f\n" + preds), in)) {
      EXPECT_EQ(r.field("x"), r.field("ts") % 16);
      ts.push_back(r.field("ts"));
    }
    return ts;
  };
  auto oracle = [](auto pred) {
    std::vector<std::uint64_t> ts;
    for (std::uint64_t t = 0; t < 32; ++t)
      if (pred(t)) ts.push_back(t);
    return ts;
  };
  EXPECT_EQ(admitted("TS >= 10\n", 1), oracle([](auto t) { return t >= 10; }));
  EXPECT_EQ(admitted("TS >= 4\nTS <= 8\n", 2), oracle([](auto t) { return t >= 4 && t <= 8; }));
  StreamConfig c3 = c;
  c3.bases = {2, 3};
  c3.id = "f";
  Small s3(c3);
  std::vector<std::uint64_t> got;
  for (const auto& r : s3.run(parse("policy 3\nkind filter\nstream f\nTS mod 3 4\n"), in)) got.push_back(r.field("ts"));
  EXPECT_EQ(got, oracle([](auto t) { return t % 4 == 3; }));
}

TEST(OperatorAgg1, SpecExampleSumsAndAverages) {
  Small s(price_config(true, false, false));
  const auto out = s.run(agg("agg1", 2), prices({1, 2, 3, 4}));
  EXPECT_EQ(sums(out), (std::vector<std::uint64_t>{3, 7}));
  EXPECT_EQ(out[0].field("count"), 2u);
  EXPECT_EQ(out[1].field("start"), 2u);
  EXPECT_EQ(out[1].field("end"), 3u);
  EXPECT_EQ(sums(s.run(agg("agg1", 1), prices({1, 2, 3, 4}))), (std::vector<std::uint64_t>{1, 2, 3, 4}));
}

TEST(OperatorAgg1, TransformAndMultiplyCounts) {
  Small s(price_config(true, false, false));
  const auto in = prices({5, 6, 7, 8, 9, 10, 11, 12});
  for (std::uint32_t ws : {2u, 4u}) {
    Rng rng = Rng::seeded(ws);
    auto keys = issue_policy(agg("agg1", ws), s.owner, nullptr, rng);
    auto cloud = make_query(ctx(), keys.cloud, s.owner.config, nullptr);
    const auto cts = s.cts(in);
    std::size_t i = 0;
    for (std::uint64_t window = 0; window < in.size() / ws; ++window) {
      algebra::OpCounter ops;
      std::vector<OutputRecord> out;
      for (std::uint32_t k = 0; k < ws; ++k) out = cloud->on_tuple(0, cts[i++]);
      ASSERT_EQ(out.size(), 1u);
      EXPECT_EQ(ops.delta().transforms, ws);
      EXPECT_EQ(ops.delta().gt_muls, 2 * (ws - 1));  // tct_mul multiplies both halves
    }
  }
}

TEST(OperatorAgg2, MatchesAgg1AndOneTransformPerOutput) {
  Small s(price_config(true, true, false));
  const auto in = prices({9, 1, 4, 4, 200, 3, 17, 0, 8, 8, 1, 2});
  for (std::uint32_t ws : {2u, 3u, 4u}) {
    EXPECT_EQ(sums(s.run(agg("agg2", ws), in)), sums(s.run(agg("agg1", ws), in)));
    Rng rng = Rng::seeded(ws);
    auto keys = issue_policy(agg("agg2", ws), s.owner, nullptr, rng);
    auto cloud = make_query(ctx(), keys.cloud, s.owner.config, nullptr);
    for (const auto& st : s.cts(in)) {
      algebra::OpCounter ops;
      const auto out = cloud->on_tuple(0, st);
      EXPECT_EQ(ops.delta().transforms, out.size());
    }
  }
}

TEST(OperatorAgg2, WorstCaseTupleCarriesOneComponentPerWindow) {
  Small s(price_config(false, true, false));
  const auto cts = s.cts(prices({1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1}));
  auto count = [](const SecureTuple& st) {
    return std::count_if(st.components.begin(), st.components.end(),
                         [](const auto& c) { return c.label.starts_with("agg2:"); });
  };
  EXPECT_EQ(count(cts[0]), 0);
  EXPECT_EQ(count(cts[1]), 1);    // ws 2
  EXPECT_EQ(count(cts[11]), 3);   // ts 11 closes windows 2, 3 and 4
}

TEST(OperatorAgg3, SpecExamples) {
  Small s(price_config(false, false, true));
  EXPECT_EQ(sums(s.run(agg("agg3", 3), prices({1, 2, 3, 4, 5, 6}))), (std::vector<std::uint64_t>{6, 15}));
  // 6 = 2 * 3 is smooth over {2, 3} though 6 is not in W.
  Small s6(price_config(false, false, true));
  EXPECT_EQ(sums(s6.run(agg("agg3", 6), prices({1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12}))),
            (std::vector<std::uint64_t>{21, 57}));
}

TEST(OperatorAgg3, FirstWindowTelescopes) {
  Small s(price_config(false, false, true));
  Rng rng = Rng::seeded(2);
  auto keys = issue_policy(agg("agg3", 2), s.owner, nullptr, rng);
  auto cloud = make_query(ctx(), keys.cloud, s.owner.config, nullptr);
  const auto cts = s.cts(prices({3, 4}));
  EXPECT_TRUE(cloud->on_tuple(0, cts[0]).empty());
  const auto out = cloud->on_tuple(0, cts[1]);
  ASSERT_EQ(out.size(), 1u);
  const abe::UserSecret z{keys.user.z[0]};
  const Gt u = abe::abe_dec(z, std::get<abe::TransformedCiphertext>(out[0].find("u")->body));
  const Gt v = abe::abe_dec(z, std::get<abe::TransformedCiphertext>(out[0].find("v")->body));
  // u = gt^(3 + 4 + r0 + r1), v = gt^(r0 + r1).
  EXPECT_EQ(u / v, ctx()->gt_pow(7));
  // The non-boundary cumulative does not transform.
  EXPECT_FALSE(abe::abe_trans(keys.cloud.keys[0], *cts[0].abe(agg3v_label("price"))));
}

TEST(OperatorFilterAgg, StartIndexExamples) {
  Small s(price_config(false, true, true));
  const auto in = prices({1, 2, 3, 4, 5, 6, 7, 8});
  for (int variant : {2, 3}) {
    const auto extra = "variant " + std::to_string(variant) + "\n";
    const auto out = s.run(agg("filter-agg", 2, extra + "TS >= 4\n"), in);
    EXPECT_EQ(sums(out), (std::vector<std::uint64_t>{11, 15})) << variant;
    EXPECT_EQ(out.front().field("start"), 4u);
    EXPECT_EQ(sums(s.run(agg("filter-agg", 2, extra + "start 0\n"), in)), sums(s.run(agg("agg3", 2), in)));
  }
  // Variant 3 starts windows at x itself; variant 2 keeps aligned windows.
  EXPECT_EQ(sums(s.run(agg("filter-agg", 2, "variant 3\nstart 3\n"), in)), (std::vector<std::uint64_t>{9, 13}));
  EXPECT_EQ(sums(s.run(agg("filter-agg", 2, "variant 2\nstart 3\n"), in)), (std::vector<std::uint64_t>{11, 15}));
}

TEST(OperatorJoin, TokenMatchesOnlyEqualValues) {
  auto& w = World::get();
  Rng rng = Rng::seeded(9);
  const auto p = parse("policy 4\nkind join\nstream s1\nstream2 s2\njoin j\nbuffers 3 3\n");
  auto keys = issue_policy(p, w.o1, &w.o2, rng);
  UserDecryptor user(ctx(), keys.user);
  for (int session = 0; session < 3; ++session) {
    const auto token = user.join_token(rng);
    for (std::size_t i = 0; i < 16; ++i)
      for (std::size_t k = 0; k < 16; ++k) {
        const auto& d1 = *w.secure[0][i].det(det_label("j"));
        const auto& d2 = *w.secure[1][k].det(det_label("j"));
        EXPECT_EQ(det::join_match(d1, d2, token), w.plain[0][i].value("j") == w.plain[1][k].value("j"));
      }
  }
}

TEST(OperatorJoin, SelfJoinMatchesSameTimestamp) {
  auto& w = World::get();
  Rng rng = Rng::seeded(10);
  const auto p = parse("policy 5\nkind join\nstream s1\nstream2 s1\njoin j\nbuffers 1 1\n");
  auto keys = issue_policy(p, w.o1, &w.o1, rng);
  auto cloud = make_query(ctx(), keys.cloud, w.o1.config, &w.o1.config);
  UserDecryptor user(ctx(), keys.user);
  cloud->set_join_token(user.join_token(rng));
  for (std::size_t i = 0; i < 8; ++i) {
    EXPECT_TRUE(cloud->on_tuple(0, w.secure[0][i]).empty() || i > 0);
    const auto out = cloud->on_tuple(1, w.secure[0][i]);
    ASSERT_EQ(out.size(), 1u);
    EXPECT_EQ(out[0].ts, (std::vector<std::uint64_t>{i, i}));
  }
}

TEST(OperatorJoin, BufferedBeforeTokenAndKeyMismatch) {
  auto& w = World::get();
  Rng rng = Rng::seeded(12);
  const auto p = parse("policy 6\nkind join\nstream s1\nstream2 s2\njoin j\nbuffers 8 8\n");
  auto keys = issue_policy(p, w.o1, &w.o2, rng);
  auto cloud = make_query(ctx(), keys.cloud, w.o1.config, &w.o2.config);
  for (std::size_t i = 0; i < 4; ++i) EXPECT_TRUE(cloud->on_tuple(0, w.secure[0][i]).empty());
  UserDecryptor user(ctx(), keys.user);
  cloud->set_join_token(user.join_token(rng));
  ReferenceQuery ref(p, w.o1.config, w.o2.config);
  for (std::size_t i = 0; i < 4; ++i) ref.on_tuple(0, w.plain[0][i]);
  for (std::size_t i = 0; i < 8; ++i) {
    std::vector<PlainRecord> got;
    for (const auto& r : cloud->on_tuple(1, w.secure[1][i])) got.push_back(user.decrypt(r));
    EXPECT_EQ(got, ref.on_tuple(1, w.plain[1][i]));
  }
  // Owners without a shared PRP key cannot be joined.
  const auto lone = World::make(full_config("s2"), 99, std::nullopt);
  EXPECT_THROW(issue_policy(p, w.o1, &lone, rng), KeyError);
}

// ---- oracle equivalence for every kind ----

class OracleEquivalence : public ::testing::TestWithParam<std::string> {};

TEST_P(OracleEquivalence, SecureEqualsReference) {
  const auto p = parse(GetParam());
  const auto n = check_equivalence(p);
  EXPECT_GT(n, 0u);
}

INSTANTIATE_TEST_SUITE_P(
    AllKinds, OracleEquivalence,
    ::testing::Values("policy 11\nkind map\nstream s1\nmap b j\n",
                      "policy 12\nkind filter\nstream s1\na >= 60\nTS mod 2 3\n",
                      "policy 13\nkind join\nstream s1\nstream2 s2\njoin j\nbuffers 4 6\n",
                      "policy 14\nkind agg1\nstream s1\naggregate a\nwindow 4\n",
                      "policy 15\nkind agg1\nstream s1\naggregate b\nwindow 1\n",
                      "policy 16\nkind agg2\nstream s1\naggregate b\nwindow 2\n",
                      "policy 17\nkind agg3\nstream s1\naggregate a\nwindow 3\n",
                      "policy 18\nkind agg3\nstream s1\naggregate b\nwindow 8\n",
                      "policy 19\nkind map-filter\nstream s1\nmap a b\na <= 150\nTS > 5\n",
                      "policy 20\nkind map-filter-join\nstream s1\nstream2 s2\nmap a j\njoin j\nbuffers 5 5\n"
                      "a >= 40\nwhere2 a <= 200\n",
                      "policy 21\nkind filter-agg\nstream s1\naggregate a\nwindow 4\nvariant 2\nTS >= 9\n",
                      "policy 22\nkind filter-agg\nstream s1\naggregate b\nwindow 6\nvariant 3\nTS >= 7\n"));

// ---- unauthorized opacity ----

TEST(OperatorOpacity, AggregateKeysNeverYieldIndividualValues) {
  auto& w = World::get();
  Rng rng = Rng::seeded(31);
  for (const char* kind : {"agg1", "agg2", "agg3"}) {
    const auto p = parse(std::string("policy 30\nkind ") + kind + "\nstream s1\naggregate a\nwindow 4\n");
    auto keys = issue_policy(p, w.o1, nullptr, rng);
    const auto& tk = keys.cloud.keys[0];
    const abe::UserSecret z{keys.user.z[0]};
    int recovered = 0, transformed = 0;
    for (std::size_t i = 0; i < 16; ++i) {
      const auto& st = w.secure[0][i];
      const Gt truth = ctx()->gt_pow(w.plain[0][i].value("a"));
      for (const auto& c : st.components) {
        const auto* ct = std::get_if<abe::AbeCiphertext>(&c.body);
        if (!ct) continue;
        auto t = abe::abe_trans(tk, *ct);
        if (!t) continue;
        ++transformed;
        recovered += abe::abe_dec(z, *t) == truth;
      }
      // Filter and join payloads carry whole tuples: never transformable.
      EXPECT_FALSE(abe::abe_trans_hybrid(tk, *st.hybrid(kFilterLabel)));
      EXPECT_FALSE(abe::abe_trans_hybrid(tk, *st.hybrid(join_label("j"))));
    }
    EXPECT_GT(transformed, 0) << kind;
    EXPECT_EQ(recovered, 0) << kind;
  }
}

TEST(OperatorOpacity, FilterKeyFailsOnFailingTuplesAndOtherFamilies) {
  auto& w = World::get();
  Rng rng = Rng::seeded(32);
  const auto p = parse("policy 33\nkind filter\nstream s1\nTS >= 20\n");
  auto keys = issue_policy(p, w.o1, nullptr, rng);
  const auto& tk = keys.cloud.keys[0];
  for (std::size_t i = 0; i < World::kTuples; ++i) {
    const auto& st = w.secure[0][i];
    EXPECT_EQ(abe::abe_trans_hybrid(tk, *st.hybrid(kFilterLabel)).has_value(), i >= 20);
    // The TS-only predicate must not open aggregate components that carry
    // the TS bag of bits.
    for (const auto& c : st.components)
      if (const auto* ct = std::get_if<abe::AbeCiphertext>(&c.body)) {
        EXPECT_FALSE(abe::abe_trans(tk, *ct)) << c.label;
      }
  }
}

TEST(OperatorOpacity, WrongUserCannotDecrypt) {
  auto& w = World::get();
  Rng rng = Rng::seeded(34);
  const auto p = parse("policy 35\nkind filter\nstream s1\na >= 0\n");
  auto k1 = issue_policy(p, w.o1, nullptr, rng);
  auto k2 = issue_policy(p, w.o1, nullptr, rng);
  auto cloud = make_query(ctx(), k1.cloud, w.o1.config, nullptr);
  UserDecryptor other(ctx(), k2.user);
  const auto out = cloud->on_tuple(0, w.secure[0][0]);
  ASSERT_EQ(out.size(), 1u);
  EXPECT_THROW(other.decrypt(out[0]), KeyError);
}

// ---- work asymmetry ----

TEST(OperatorWork, CloudPairingsExceedUserExponentiations) {
  auto& w = World::get();
  Rng rng = Rng::seeded(40);
  for (const char* text : {"policy 41\nkind filter\nstream s1\nTS >= 3\na <= 200\n",
                           "policy 42\nkind map-filter\nstream s1\nmap a\nTS >= 3\na <= 200\n"}) {
    const auto p = parse(text);
    auto keys = issue_policy(p, w.o1, nullptr, rng);
    auto cloud = make_query(ctx(), keys.cloud, w.o1.config, nullptr);
    UserDecryptor user(ctx(), keys.user);
    for (std::size_t i = 3; i < 12; ++i) {
      if (w.plain[0][i].value("a") > 200) continue;
      algebra::OpCounter cloud_ops;
      const auto out = cloud->on_tuple(0, w.secure[0][i]);
      const auto c = cloud_ops.delta();
      ASSERT_EQ(out.size(), 1u);
      algebra::OpCounter user_ops;
      user.decrypt(out[0]);
      const auto u = user_ops.delta();
      EXPECT_EQ(u.pairings, 0u);
      EXPECT_GT(c.pairings, u.gt_exps) << text;
    }
  }
}

// ---- bundles ----

TEST(OperatorBundles, RoundTripAndRoleTags) {
  auto& w = World::get();
  Rng rng = Rng::seeded(50);
  const auto p = parse("policy 51\nkind join\nstream s1\nstream2 s2\njoin j\nbuffers 2 2\n");
  auto keys = issue_policy(p, w.o1, &w.o2, rng);
  const auto cloud_bytes = keys.cloud.to_bytes();
  const auto user_bytes = keys.user.to_bytes();
  EXPECT_EQ(bundle_role(cloud_bytes), BundleRole::cloud);
  EXPECT_EQ(bundle_role(user_bytes), BundleRole::user);
  EXPECT_EQ(CloudBundle::from_bytes(cloud_bytes).to_bytes(), cloud_bytes);
  EXPECT_EQ(UserBundle::from_bytes(user_bytes).to_bytes(), user_bytes);
  EXPECT_THROW(CloudBundle::from_bytes(user_bytes), KeyError);
  EXPECT_THROW(UserBundle::from_bytes(cloud_bytes), KeyError);
  EXPECT_THROW(CloudBundle::from_bytes(owner_keys_to_bytes(w.o1)), KeyError);

  const auto owner_back = owner_keys_from_bytes(ctx(), owner_keys_to_bytes(w.o1));
  EXPECT_EQ(owner_back.mk.y, w.o1.mk.y);
  EXPECT_EQ(owner_back.det, w.o1.det);
}

TEST(OperatorBundles, CloudBundleCarriesNoSecrets) {
  auto& w = World::get();
  Rng rng = Rng::seeded(52);
  const auto p = parse("policy 53\nkind join\nstream s1\nstream2 s2\njoin j\nbuffers 2 2\n");
  auto keys = issue_policy(p, w.o1, &w.o2, rng);
  const auto bytes = keys.cloud.to_bytes();
  auto contains = [&](const Scalar& s) {
    const auto b = s.to_bytes();
    return std::search(bytes.begin(), bytes.end(), b.begin(), b.end()) != bytes.end();
  };
  std::vector<Scalar> secrets{w.o1.mk.y, w.o2.mk.y, w.o1.det.k1, w.o1.det.k2, w.o2.det.k2};
  secrets.insert(secrets.end(), keys.user.z.begin(), keys.user.z.end());
  for (const auto& t : w.o1.mk.attribute_secrets) secrets.push_back(t);
  for (const auto& s : secrets) {
    EXPECT_FALSE(contains(s));
  }
}
