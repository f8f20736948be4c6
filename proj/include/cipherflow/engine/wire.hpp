#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "cipherflow/codec.hpp"
#include "cipherflow/det/det_cipher.hpp"

namespace cipherflow::engine {

enum class MsgType : std::uint8_t {
  register_stream = 1,  // StreamConfig
  register_policy = 2,  // cloud key bundle
  tuple = 3,            // str stream id, blob SecureTuple
  output = 4,           // OutputRecord
  ack = 5,              // request specific (u32 policy id, u32 output count, or empty)
  error = 6,            // u16 code, str message
  subscribe = 7,        // u32 policy id, u8 has_token, [blob JoinToken]
};

enum class ErrorCode : std::uint16_t {
  unknown_type = 1,
  decode = 2,
  key = 3,
  protocol = 4,
  policy = 5,
  domain = 6,
  internal = 99,
};

struct Frame {
  std::uint8_t type = 0;
  Bytes payload;
};

// Hard cap on a frame payload; larger lengths are a protocol error.
constexpr std::uint32_t kMaxFrame = 64u << 20;

// Blocking frame I/O on a connected socket. read_frame returns nullopt on
// a clean EOF before the header; throws ProtocolError on short reads,
// oversize frames and socket errors.
void write_frame(int fd, MsgType type, std::span<const std::uint8_t> payload);
std::optional<Frame> read_frame(int fd);

Bytes error_payload(ErrorCode code, std::string_view message);
std::pair<ErrorCode, std::string> parse_error(std::span<const std::uint8_t> payload);

Bytes subscribe_payload(std::uint32_t policy_id, const std::optional<det::JoinToken>& token);

// "host:port" (host may be empty for any address).
std::pair<std::string, std::uint16_t> parse_address(std::string_view addr);

// A client connection. request() sends a frame and waits for ACK; an ERROR
// reply is rethrown as ProtocolError (or KeyError for key errors).
class Connection {
 public:
  static Connection connect(std::string_view addr);
  Connection(Connection&& o) noexcept : fd_(o.fd_) { o.fd_ = -1; }
  Connection& operator=(Connection&&) = delete;
  ~Connection();

  Bytes request(MsgType type, std::span<const std::uint8_t> payload);
  void send(MsgType type, std::span<const std::uint8_t> payload) { write_frame(fd_, type, payload); }
  std::optional<Frame> receive() { return read_frame(fd_); }
  // Waits at most timeout_ms for readable data. false on timeout.
  bool wait_readable(int timeout_ms) const;
  int fd() const { return fd_; }

 private:
  explicit Connection(int fd) : fd_(fd) {}
  int fd_;
};

}  // namespace cipherflow::engine
