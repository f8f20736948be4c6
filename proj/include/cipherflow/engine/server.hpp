#pragma once

#include <atomic>
#include <list>
#include <memory>
#include <mutex>
#include <string>
#include <thread>

#include "cipherflow/engine/engine.hpp"
#include "cipherflow/engine/wire.hpp"

namespace cipherflow::engine {

// TCP front end of a CloudEngine: one thread per connection, frames as in
// wire.hpp. Subscriptions push OUTPUT frames on the subscribing connection.
class Server {
 public:
  // Binds immediately; port 0 picks a free port.
  Server(CloudEngine& engine, std::string_view listen_addr);
  ~Server();

  std::uint16_t port() const { return port_; }
  // Accept loop in a background thread.
  void start();
  void stop();

 private:
  struct Session;
  void accept_loop();
  void serve(std::shared_ptr<Session> session);
  Bytes handle(Session& session, const Frame& frame);

  CloudEngine& engine_;
  int listen_fd_ = -1;
  std::uint16_t port_ = 0;
  std::atomic<bool> running_{false};
  std::thread acceptor_;
  std::mutex sessions_mu_;
  std::list<std::shared_ptr<Session>> sessions_;
  std::list<std::thread> threads_;
};

}  // namespace cipherflow::engine
