#include "ecgauth/net.hpp"

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>

#include "ecgauth/errors.hpp"

namespace ecgauth::net {

Socket::~Socket() { close(); }

Socket::Socket(Socket&& other) noexcept : fd_(other.fd_) { other.fd_ = -1; }

Socket& Socket::operator=(Socket&& other) noexcept {
    if (this != &other) {
        close();
        fd_ = other.fd_;
        other.fd_ = -1;
    }
    return *this;
}

void Socket::close() {
    if (fd_ >= 0) {
        ::close(fd_);
        fd_ = -1;
    }
}

Endpoint parse_endpoint(const std::string& s) {
    const std::size_t colon = s.rfind(':');
    if (colon == std::string::npos)
        throw Error(Errc::invalid_argument, "endpoint must be host:port, got '" + s + "'");
    Endpoint ep;
    ep.host = s.substr(0, colon);
    const std::string port_str = s.substr(colon + 1);
    char* end = nullptr;
    const long port = std::strtol(port_str.c_str(), &end, 10);
    if (end == port_str.c_str() || *end != '\0' || port < 0 || port > 65535)
        throw Error(Errc::invalid_argument, "bad port in endpoint '" + s + "'");
    ep.port = static_cast<std::uint16_t>(port);
    return ep;
}

namespace {

sockaddr_in resolve(const Endpoint& ep, bool for_listen) {
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_port = htons(ep.port);
    std::string host = ep.host;
    if (host.empty())
        host = for_listen ? "0.0.0.0" : "127.0.0.1";
    if (inet_pton(AF_INET, host.c_str(), &addr.sin_addr) == 1)
        return addr;

    addrinfo hints{};
    hints.ai_family = AF_INET;
    hints.ai_socktype = SOCK_STREAM;
    addrinfo* result = nullptr;
    if (getaddrinfo(host.c_str(), nullptr, &hints, &result) != 0 || result == nullptr)
        throw Error(Errc::connection_failed, "cannot resolve host '" + host + "'");
    addr.sin_addr = reinterpret_cast<sockaddr_in*>(result->ai_addr)->sin_addr;
    freeaddrinfo(result);
    return addr;
}

} // namespace

Socket connect_to(const Endpoint& ep) {
    const sockaddr_in addr = resolve(ep, false);
    Socket s(::socket(AF_INET, SOCK_STREAM, 0));
    if (!s.valid())
        throw Error(Errc::connection_failed, std::strerror(errno));
    if (::connect(s.fd(), reinterpret_cast<const sockaddr*>(&addr), sizeof addr) != 0)
        throw Error(Errc::connection_failed,
                    "connect to " + ep.host + ":" + std::to_string(ep.port) + ": " +
                        std::strerror(errno));
    const int one = 1;
    ::setsockopt(s.fd(), IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
    return s;
}

Socket listen_on(const Endpoint& ep, std::uint16_t& bound_port) {
    const sockaddr_in addr = resolve(ep, true);
    Socket s(::socket(AF_INET, SOCK_STREAM, 0));
    if (!s.valid())
        throw Error(Errc::connection_failed, std::strerror(errno));
    const int one = 1;
    ::setsockopt(s.fd(), SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
    if (::bind(s.fd(), reinterpret_cast<const sockaddr*>(&addr), sizeof addr) != 0)
        throw Error(Errc::connection_failed,
                    "bind " + ep.host + ":" + std::to_string(ep.port) + ": " +
                        std::strerror(errno));
    if (::listen(s.fd(), 16) != 0)
        throw Error(Errc::connection_failed, std::strerror(errno));

    sockaddr_in actual{};
    socklen_t len = sizeof actual;
    if (::getsockname(s.fd(), reinterpret_cast<sockaddr*>(&actual), &len) == 0)
        bound_port = ntohs(actual.sin_port);
    else
        bound_port = ep.port;
    return s;
}

void send_all(const Socket& s, const std::vector<std::uint8_t>& bytes) {
    std::size_t sent = 0;
    while (sent < bytes.size()) {
        const ssize_t n = ::send(s.fd(), bytes.data() + sent, bytes.size() - sent, MSG_NOSIGNAL);
        if (n <= 0) {
            if (n < 0 && errno == EINTR)
                continue;
            throw Error(Errc::connection_failed, "send: peer went away");
        }
        sent += static_cast<std::size_t>(n);
    }
}

void send_message(const Socket& s, const proto::Message& m) { send_all(s, proto::encode(m)); }

bool FrameReader::next(const Socket& s, proto::Message& out) {
    for (;;) {
        if (!buf_.empty()) {
            proto::DecodeResult res = proto::decode(buf_);
            if (res.complete) {
                buf_.erase(buf_.begin(),
                           buf_.begin() + static_cast<std::ptrdiff_t>(res.consumed));
                out = std::move(res.message);
                return true;
            }
        }
        std::uint8_t chunk[4096];
        const ssize_t n = ::recv(s.fd(), chunk, sizeof chunk, 0);
        if (n == 0) {
            if (buf_.empty())
                return false; // orderly close between frames
            throw Error(Errc::connection_failed, "connection closed mid-frame");
        }
        if (n < 0) {
            if (errno == EINTR)
                continue;
            throw Error(Errc::connection_failed, std::strerror(errno));
        }
        buf_.insert(buf_.end(), chunk, chunk + n);
    }
}

} // namespace ecgauth::net
