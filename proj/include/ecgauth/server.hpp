#pragma once

#include <atomic>
#include <cstdint>
#include <memory>
#include <mutex>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "ecgauth/net.hpp"
#include "ecgauth/store.hpp"

namespace ecgauth {

/// Verification server: accepts concurrent connections, each carrying at
/// most one enrollment, verification, or identification exchange. The
/// template store is shared across connections behind a mutex (mutations are
/// exclusive). Decisions are computed by the same session machinery the
/// in-process verify path uses; the wire adds no semantics.
class Server {
public:
    Server(net::Endpoint listen, TemplateStore& store,
           double threshold = pipeline::kDefaultThreshold,
           std::uint32_t budget_ms = pipeline::kDefaultBudgetMs);
    ~Server();

    /// Bind and start accepting. Throws Error(connection_failed) when the
    /// address is not bindable.
    void start();

    /// Stop accepting, close every live connection, join all threads.
    void stop();

    /// Bound port (useful when constructed with port 0).
    std::uint16_t port() const { return port_; }

private:
    void accept_loop();
    void handle_connection(net::Socket sock);
    void track(int fd, bool add);

    net::Endpoint listen_;
    TemplateStore& store_;
    double threshold_;
    std::uint32_t budget_ms_;

    net::Socket listen_sock_;
    std::uint16_t port_ = 0;
    std::thread accept_thread_;
    std::vector<std::thread> conn_threads_;
    std::mutex conn_mutex_;
    std::set<int> live_fds_;
    std::mutex store_mutex_;
    std::atomic<bool> stopping_{false};
};

} // namespace ecgauth
