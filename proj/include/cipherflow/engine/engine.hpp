#pragma once

#include <atomic>
#include <condition_variable>
#include <deque>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <thread>
#include <vector>

#include "cipherflow/operators/cloud.hpp"

namespace cipherflow::engine {

using ops::OutputRecord;
using ops::SecureTuple;
using ops::StreamConfig;

using OutputSink = std::function<void(const OutputRecord&)>;

// The cloud: routes SecureTuples of registered streams to the continuous
// queries listening on them. Streams are partitioned across workers; one
// stream's tuples are processed in arrival order by a single worker, and
// ingest returns once every matching query has run (synchronous ack).
class CloudEngine {
 public:
  // workers == 0 processes tuples on the calling thread.
  explicit CloudEngine(algebra::ContextPtr ctx, unsigned workers = 1);
  ~CloudEngine();
  CloudEngine(const CloudEngine&) = delete;
  CloudEngine& operator=(const CloudEngine&) = delete;

  // Idempotent for an identical config; throws ProtocolError when the id
  // is registered with a different one.
  void register_stream(const StreamConfig& config);
  // Throws ProtocolError on unknown streams or a duplicate policy id,
  // PolicyError when the bundle does not fit the streams.
  std::uint32_t register_policy(const ops::CloudBundle& bundle);
  // Outputs produced before subscription are dropped. Replaces any earlier
  // subscriber. Returns a handle for unsubscribe.
  std::uint64_t subscribe(std::uint32_t policy_id, OutputSink sink,
                          std::optional<det::JoinToken> token = std::nullopt);
  // No-op unless `handle` is still the current subscriber.
  void unsubscribe(std::uint32_t policy_id, std::uint64_t handle);

  // Throws ProtocolError on unknown streams and non-increasing ts. Returns
  // the number of output records generated.
  std::size_t ingest(const std::string& stream, const SecureTuple& st);

  std::size_t policy_count() const;
  unsigned workers() const { return static_cast<unsigned>(workers_.size()); }

  // Serialized key material the engine holds (policies and transform
  // keys), for hygiene audits.
  std::vector<Bytes> registered_material() const;

 private:
  struct Query {
    ops::CloudBundle bundle;
    std::unique_ptr<ops::ContinuousQuery> query;
    std::mutex mu;  // join queries span two streams, so two workers
    OutputSink sink;
    std::uint64_t sink_handle = 0;
  };
  struct Stream {
    StreamConfig config;
    unsigned worker = 0;
    std::unique_ptr<std::mutex> serial = std::make_unique<std::mutex>();  // one tuple at a time
    std::optional<std::uint64_t> last_ts;
    std::vector<std::pair<std::shared_ptr<Query>, int>> listeners;  // (query, side)
  };
  struct Worker {
    std::mutex mu;
    std::condition_variable cv;
    std::deque<std::function<void()>> tasks;
    bool stop = false;
    std::thread thread;
  };

  std::size_t process(const std::string& stream, const SecureTuple& st);
  void run_worker(Worker& w);

  algebra::ContextPtr ctx_;
  mutable std::shared_mutex registry_mu_;
  std::map<std::string, Stream> streams_;
  std::map<std::uint32_t, std::shared_ptr<Query>> queries_;
  std::vector<std::unique_ptr<Worker>> workers_;
  unsigned next_worker_ = 0;
  std::atomic<std::uint64_t> next_handle_{1};
};

}  // namespace cipherflow::engine
