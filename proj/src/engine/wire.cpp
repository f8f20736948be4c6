#include "cipherflow/engine/wire.hpp"

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <charconv>
#include <cstring>

#include "cipherflow/error.hpp"

namespace cipherflow::engine {
namespace {

void write_all(int fd, const std::uint8_t* p, std::size_t n) {
  while (n > 0) {
    const auto k = ::send(fd, p, n, MSG_NOSIGNAL);
    if (k < 0) {
      if (errno == EINTR) continue;
      throw ProtocolError(std::string("socket write failed: ") + std::strerror(errno));
    }
    p += k;
    n -= static_cast<std::size_t>(k);
  }
}

// false on EOF before the first byte.
bool read_all(int fd, std::uint8_t* p, std::size_t n) {
  std::size_t got = 0;
  while (got < n) {
    const auto k = ::recv(fd, p + got, n - got, 0);
    if (k < 0) {
      if (errno == EINTR) continue;
      throw ProtocolError(std::string("socket read failed: ") + std::strerror(errno));
    }
    if (k == 0) {
      if (got == 0) return false;
      throw ProtocolError("connection closed mid-frame");
    }
    got += static_cast<std::size_t>(k);
  }
  return true;
}

}  // namespace

void write_frame(int fd, MsgType type, std::span<const std::uint8_t> payload) {
  if (payload.size() > kMaxFrame) throw ProtocolError("frame too large");
  Bytes buf;
  buf.reserve(5 + payload.size());
  const auto n = static_cast<std::uint32_t>(payload.size());
  buf.push_back(static_cast<std::uint8_t>(type));
  for (int shift = 24; shift >= 0; shift -= 8) buf.push_back(static_cast<std::uint8_t>(n >> shift));
  buf.insert(buf.end(), payload.begin(), payload.end());
  write_all(fd, buf.data(), buf.size());
}

std::optional<Frame> read_frame(int fd) {
  std::uint8_t head[5];
  if (!read_all(fd, head, 1)) return std::nullopt;
  if (!read_all(fd, head + 1, 4)) throw ProtocolError("connection closed mid-frame");
  const std::uint32_t n = std::uint32_t{head[1]} << 24 | std::uint32_t{head[2]} << 16 | std::uint32_t{head[3]} << 8 | head[4];
  if (n > kMaxFrame) throw ProtocolError("frame too large");
  Frame f{head[0], Bytes(n)};
  if (n > 0 && !read_all(fd, f.payload.data(), n)) throw ProtocolError("connection closed mid-frame");
  return f;
}

Bytes error_payload(ErrorCode code, std::string_view message) {
  ByteWriter w;
  w.u16(static_cast<std::uint16_t>(code));
  w.str(message.substr(0, 0xffff));
  return std::move(w).bytes();
}

std::pair<ErrorCode, std::string> parse_error(std::span<const std::uint8_t> payload) {
  ByteReader r(payload);
  const auto code = static_cast<ErrorCode>(r.u16());
  return {code, r.str()};
}

Bytes subscribe_payload(std::uint32_t policy_id, const std::optional<det::JoinToken>& token) {
  ByteWriter w;
  w.u32(policy_id);
  w.u8(token.has_value());
  if (token) w.blob(token->to_bytes());
  return std::move(w).bytes();
}

std::pair<std::string, std::uint16_t> parse_address(std::string_view addr) {
  const auto colon = addr.rfind(':');
  if (colon == std::string_view::npos) throw ProtocolError("address must be host:port");
  std::uint16_t port = 0;
  const auto p = addr.substr(colon + 1);
  auto [end, ec] = std::from_chars(p.data(), p.data() + p.size(), port);
  if (ec != std::errc{} || end != p.data() + p.size()) throw ProtocolError("bad port in " + std::string(addr));
  return {std::string(addr.substr(0, colon)), port};
}

Connection Connection::connect(std::string_view addr) {
  auto [host, port] = parse_address(addr);
  addrinfo hints{};
  hints.ai_family = AF_INET;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo* res = nullptr;
  const auto service = std::to_string(port);
  if (::getaddrinfo(host.empty() ? "127.0.0.1" : host.c_str(), service.c_str(), &hints, &res) != 0 || !res)
    throw ProtocolError("cannot resolve " + std::string(addr));
  const int fd = ::socket(res->ai_family, res->ai_socktype, res->ai_protocol);
  if (fd < 0) {
    ::freeaddrinfo(res);
    throw ProtocolError("socket() failed");
  }
  const int rc = ::connect(fd, res->ai_addr, res->ai_addrlen);
  ::freeaddrinfo(res);
  if (rc != 0) {
    ::close(fd);
    throw ProtocolError("cannot connect to " + std::string(addr) + ": " + std::strerror(errno));
  }
  int one = 1;
  ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
  return Connection(fd);
}

Connection::~Connection() {
  if (fd_ >= 0) ::close(fd_);
}

Bytes Connection::request(MsgType type, std::span<const std::uint8_t> payload) {
  send(type, payload);
  for (;;) {
    auto f = receive();
    if (!f) throw ProtocolError("server closed the connection");
    if (f->type == static_cast<std::uint8_t>(MsgType::ack)) return std::move(f->payload);
    if (f->type == static_cast<std::uint8_t>(MsgType::error)) {
      auto [code, msg] = parse_error(f->payload);
      if (code == ErrorCode::key) throw KeyError(msg);
      throw ProtocolError("server error " + std::to_string(static_cast<int>(code)) + ": " + msg);
    }
    if (f->type != static_cast<std::uint8_t>(MsgType::output)) throw ProtocolError("unexpected frame type");
    // OUTPUT frames interleave only on subscribed connections; callers that
    // subscribe read them with receive().
  }
}

bool Connection::wait_readable(int timeout_ms) const {
  pollfd p{fd_, POLLIN, 0};
  return ::poll(&p, 1, timeout_ms) > 0;
}

}  // namespace cipherflow::engine
