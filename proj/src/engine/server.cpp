#include "cipherflow/engine/server.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <vector>

#include "cipherflow/error.hpp"
#include "cipherflow/operators/owner.hpp"

namespace cipherflow::engine {
namespace {

class UnknownType : public ProtocolError {
 public:
  using ProtocolError::ProtocolError;
};

}  // namespace

struct Server::Session {
  int fd = -1;
  std::mutex write_mu;
  std::atomic<bool> alive{true};
  std::vector<std::pair<std::uint32_t, std::uint64_t>> subscriptions;  // (policy, handle)

  void write(MsgType type, std::span<const std::uint8_t> payload) {
    std::lock_guard lock(write_mu);
    write_frame(fd, type, payload);
  }
};

Server::Server(CloudEngine& engine, std::string_view listen_addr) : engine_(engine) {
  auto [host, port] = parse_address(listen_addr);
  listen_fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
  if (listen_fd_ < 0) throw ProtocolError("socket() failed");
  int one = 1;
  ::setsockopt(listen_fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
  sockaddr_in sa{};
  sa.sin_family = AF_INET;
  sa.sin_port = htons(port);
  sa.sin_addr.s_addr = host.empty() ? htonl(INADDR_ANY) : inet_addr(host.c_str());
  if (::bind(listen_fd_, reinterpret_cast<sockaddr*>(&sa), sizeof sa) != 0 || ::listen(listen_fd_, 64) != 0) {
    const std::string err = std::strerror(errno);
    ::close(listen_fd_);
    throw ProtocolError("cannot listen on " + std::string(listen_addr) + ": " + err);
  }
  socklen_t len = sizeof sa;
  ::getsockname(listen_fd_, reinterpret_cast<sockaddr*>(&sa), &len);
  port_ = ntohs(sa.sin_port);
}

Server::~Server() { stop(); }

void Server::start() {
  running_ = true;
  acceptor_ = std::thread([this] { accept_loop(); });
}

void Server::stop() {
  if (listen_fd_ < 0) return;
  running_ = false;
  ::shutdown(listen_fd_, SHUT_RDWR);
  ::close(listen_fd_);
  listen_fd_ = -1;
  if (acceptor_.joinable()) acceptor_.join();
  {
    std::lock_guard lock(sessions_mu_);
    for (auto& s : sessions_) ::shutdown(s->fd, SHUT_RDWR);
  }
  for (auto& t : threads_) t.join();
  threads_.clear();
}

void Server::accept_loop() {
  while (running_) {
    const int fd = ::accept(listen_fd_, nullptr, nullptr);
    if (fd < 0) {
      if (errno == EINTR) continue;
      return;
    }
    int one = 1;
    ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
    auto session = std::make_shared<Session>();
    session->fd = fd;
    std::lock_guard lock(sessions_mu_);
    sessions_.push_back(session);
    threads_.emplace_back([this, session] { serve(session); });
  }
}

void Server::serve(std::shared_ptr<Session> session) {
  try {
    while (auto frame = read_frame(session->fd)) {
      Bytes reply;
      try {
        reply = handle(*session, *frame);
      } catch (const UnknownType& e) {
        session->write(MsgType::error, error_payload(ErrorCode::unknown_type, e.what()));
        continue;
      } catch (const KeyError& e) {
        session->write(MsgType::error, error_payload(ErrorCode::key, e.what()));
        continue;
      } catch (const DecodeError& e) {
        session->write(MsgType::error, error_payload(ErrorCode::decode, e.what()));
        continue;
      } catch (const PolicyError& e) {
        session->write(MsgType::error, error_payload(ErrorCode::policy, e.what()));
        continue;
      } catch (const DomainError& e) {
        session->write(MsgType::error, error_payload(ErrorCode::domain, e.what()));
        continue;
      } catch (const ProtocolError& e) {
        session->write(MsgType::error, error_payload(ErrorCode::protocol, e.what()));
        continue;
      } catch (const std::exception& e) {
        session->write(MsgType::error, error_payload(ErrorCode::internal, e.what()));
        continue;
      }
      session->write(MsgType::ack, reply);
    }
  } catch (const std::exception&) {
    // Broken connection: fall through to cleanup.
  }
  session->alive = false;
  for (auto [id, handle] : session->subscriptions) engine_.unsubscribe(id, handle);
  ::close(session->fd);
  std::lock_guard lock(sessions_mu_);
  sessions_.remove(session);
}

Bytes Server::handle(Session& session, const Frame& frame) {
  ByteWriter ack;
  switch (static_cast<MsgType>(frame.type)) {
    case MsgType::register_stream: {
      ByteReader r(frame.payload);
      auto config = ops::StreamConfig::read(r);
      r.expect_done();
      engine_.register_stream(config);
      break;
    }
    case MsgType::register_policy: {
      // Role is checked before any key material is parsed.
      if (ops::bundle_role(frame.payload) != ops::BundleRole::cloud)
        throw KeyError("cloud accepts only cloud-role key bundles");
      ack.u32(engine_.register_policy(ops::CloudBundle::from_bytes(frame.payload)));
      break;
    }
    case MsgType::tuple: {
      ByteReader r(frame.payload);
      const auto stream = r.str();
      const auto st = ops::SecureTuple::from_bytes(r.blob());
      r.expect_done();
      ack.u32(static_cast<std::uint32_t>(engine_.ingest(stream, st)));
      break;
    }
    case MsgType::subscribe: {
      ByteReader r(frame.payload);
      const auto id = r.u32();
      std::optional<det::JoinToken> token;
      if (r.u8()) token = det::JoinToken::from_bytes(r.blob());
      r.expect_done();
      Session* s = &session;
      const auto handle = engine_.subscribe(
          id,
          [s](const ops::OutputRecord& rec) {
            if (!s->alive) return;
            try {
              s->write(MsgType::output, rec.to_bytes());
            } catch (const std::exception&) {
              s->alive = false;
            }
          },
          token);
      session.subscriptions.emplace_back(id, handle);
      break;
    }
    default:
      throw UnknownType("unknown message type " + std::to_string(frame.type));
  }
  return std::move(ack).bytes();
}

}  // namespace cipherflow::engine
