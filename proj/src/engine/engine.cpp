#include "cipherflow/engine/engine.hpp"

#include <future>

#include "cipherflow/error.hpp"

namespace cipherflow::engine {
namespace {

Bytes config_bytes(const StreamConfig& c) {
  ByteWriter w;
  c.write(w);
  return std::move(w).bytes();
}

}  // namespace

CloudEngine::CloudEngine(algebra::ContextPtr ctx, unsigned workers) : ctx_(std::move(ctx)) {
  for (unsigned i = 0; i < workers; ++i) {
    workers_.push_back(std::make_unique<Worker>());
    Worker& w = *workers_.back();
    w.thread = std::thread([this, &w] { run_worker(w); });
  }
}

CloudEngine::~CloudEngine() {
  for (auto& w : workers_) {
    {
      std::lock_guard lock(w->mu);
      w->stop = true;
    }
    w->cv.notify_all();
  }
  for (auto& w : workers_) w->thread.join();
}

void CloudEngine::run_worker(Worker& w) {
  for (;;) {
    std::function<void()> task;
    {
      std::unique_lock lock(w.mu);
      w.cv.wait(lock, [&] { return w.stop || !w.tasks.empty(); });
      if (w.tasks.empty()) return;
      task = std::move(w.tasks.front());
      w.tasks.pop_front();
    }
    task();
  }
}

void CloudEngine::register_stream(const StreamConfig& config) {
  config.validate();
  std::unique_lock lock(registry_mu_);
  auto it = streams_.find(config.id);
  if (it != streams_.end()) {
    if (config_bytes(it->second.config) != config_bytes(config))
      throw ProtocolError("stream " + config.id + " is already registered with a different schema");
    return;
  }
  Stream s;
  s.config = config;
  if (!workers_.empty()) s.worker = next_worker_++ % workers_.size();
  streams_.emplace(config.id, std::move(s));
}

std::uint32_t CloudEngine::register_policy(const ops::CloudBundle& bundle) {
  std::unique_lock lock(registry_mu_);
  const auto& p = bundle.policy;
  if (queries_.count(p.id)) throw ProtocolError("policy " + std::to_string(p.id) + " is already registered");
  auto s1 = streams_.find(p.stream);
  if (s1 == streams_.end()) throw ProtocolError("unknown stream " + p.stream);
  Stream* s2 = nullptr;
  if (ops::is_join(p.kind)) {
    auto it = streams_.find(p.stream2);
    if (it == streams_.end()) throw ProtocolError("unknown stream " + p.stream2);
    s2 = &it->second;
  }
  auto q = std::make_shared<Query>();
  q->bundle = bundle;
  q->query = ops::make_query(ctx_, bundle, s1->second.config, s2 ? &s2->config : nullptr);
  s1->second.listeners.emplace_back(q, 0);
  if (s2) s2->listeners.emplace_back(q, 1);
  queries_.emplace(p.id, std::move(q));
  return p.id;
}

std::uint64_t CloudEngine::subscribe(std::uint32_t policy_id, OutputSink sink, std::optional<det::JoinToken> token) {
  std::shared_lock lock(registry_mu_);
  auto it = queries_.find(policy_id);
  if (it == queries_.end()) throw ProtocolError("unknown policy " + std::to_string(policy_id));
  std::lock_guard qlock(it->second->mu);
  if (token) it->second->query->set_join_token(*token);
  it->second->sink = std::move(sink);
  it->second->sink_handle = next_handle_++;
  return it->second->sink_handle;
}

void CloudEngine::unsubscribe(std::uint32_t policy_id, std::uint64_t handle) {
  std::shared_lock lock(registry_mu_);
  auto it = queries_.find(policy_id);
  if (it == queries_.end()) return;
  std::lock_guard qlock(it->second->mu);
  if (it->second->sink_handle != handle) return;
  it->second->sink = nullptr;
  it->second->sink_handle = 0;
}

std::size_t CloudEngine::process(const std::string& stream, const SecureTuple& st) {
  std::shared_lock lock(registry_mu_);
  auto it = streams_.find(stream);
  if (it == streams_.end()) throw ProtocolError("unknown stream " + stream);
  Stream& s = it->second;
  std::lock_guard serial(*s.serial);
  if (s.last_ts && st.ts <= *s.last_ts)
    throw ProtocolError("non-increasing timestamp " + std::to_string(st.ts) + " on stream " + stream);
  s.last_ts = st.ts;
  std::size_t produced = 0;
  for (auto& [q, side] : s.listeners) {
    std::lock_guard qlock(q->mu);
    for (const auto& rec : q->query->on_tuple(side, st)) {
      ++produced;
      if (q->sink) q->sink(rec);
    }
  }
  return produced;
}

std::size_t CloudEngine::ingest(const std::string& stream, const SecureTuple& st) {
  if (workers_.empty()) return process(stream, st);
  unsigned worker = 0;
  {
    std::shared_lock lock(registry_mu_);
    auto it = streams_.find(stream);
    if (it == streams_.end()) throw ProtocolError("unknown stream " + stream);
    worker = it->second.worker;
  }
  std::packaged_task<std::size_t()> task([&] { return process(stream, st); });
  auto done = task.get_future();
  Worker& w = *workers_[worker];
  {
    std::lock_guard lock(w.mu);
    w.tasks.emplace_back([&task] { task(); });
  }
  w.cv.notify_one();
  return done.get();
}

std::size_t CloudEngine::policy_count() const {
  std::shared_lock lock(registry_mu_);
  return queries_.size();
}

std::vector<Bytes> CloudEngine::registered_material() const {
  std::shared_lock lock(registry_mu_);
  std::vector<Bytes> out;
  for (const auto& [id, q] : queries_) out.push_back(q->bundle.to_bytes());
  for (const auto& [id, s] : streams_) out.push_back(config_bytes(s.config));
  return out;
}

}  // namespace cipherflow::engine
