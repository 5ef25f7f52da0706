#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ecgauth/proto.hpp"

namespace ecgauth::net {

/// Minimal RAII wrapper over a POSIX TCP socket.
class Socket {
public:
    Socket() = default;
    explicit Socket(int fd) : fd_(fd) {}
    ~Socket();
    Socket(Socket&& other) noexcept;
    Socket& operator=(Socket&& other) noexcept;
    Socket(const Socket&) = delete;
    Socket& operator=(const Socket&) = delete;

    int fd() const { return fd_; }
    bool valid() const { return fd_ >= 0; }
    void close();

private:
    int fd_ = -1;
};

struct Endpoint {
    std::string host;
    std::uint16_t port = 0;
};

/// Parse "host:port" ("ADDR:PORT"); an empty host means all interfaces for
/// listening and localhost for connecting. Throws Error(invalid_argument).
Endpoint parse_endpoint(const std::string& s);

/// Connect to host:port. Throws Error(connection_failed).
Socket connect_to(const Endpoint& ep);

/// Bind + listen; port 0 picks an ephemeral port, reported via bound_port.
/// Throws Error(connection_failed) when binding fails.
Socket listen_on(const Endpoint& ep, std::uint16_t& bound_port);

/// Write all bytes, throwing Error(connection_failed) on a broken pipe.
void send_all(const Socket& s, const std::vector<std::uint8_t>& bytes);

void send_message(const Socket& s, const proto::Message& m);

/// Incremental frame reader over a socket: buffers partial reads and yields
/// whole messages. Decode errors propagate from proto::decode.
class FrameReader {
public:
    /// Blocks until one full frame arrives. Returns false on orderly EOF at a
    /// frame boundary; throws Error(connection_failed) on EOF mid-frame or a
    /// read error.
    bool next(const Socket& s, proto::Message& out);

private:
    std::vector<std::uint8_t> buf_;
};

} // namespace ecgauth::net
