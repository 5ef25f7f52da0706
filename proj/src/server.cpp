#include "ecgauth/server.hpp"

#include <sys/socket.h>

#include <algorithm>
#include <random>

#include "ecgauth/errors.hpp"

namespace ecgauth {

namespace {

proto::ErrorMsg wire_error(std::uint16_t code, std::string message) {
    proto::ErrorMsg e;
    e.code = code;
    e.message = std::move(message);
    return e;
}

std::uint32_t fresh_nonce() {
    static std::atomic<std::uint32_t> counter{1};
    std::random_device rd;
    return rd() ^ counter.fetch_add(0x9E3779B9u);
}

proto::AuthStatus status_of(const AuthSession& session, const std::optional<IntervalScore>& score) {
    proto::AuthStatus st;
    st.state = static_cast<std::uint8_t>(session.state());
    st.has_cf = score.has_value();
    st.cf = score ? score->cf : 0.0;
    st.window_fill = static_cast<std::uint8_t>(session.window().size());
    return st;
}

} // namespace

Server::Server(net::Endpoint listen, TemplateStore& store, double threshold,
               std::uint32_t budget_ms)
    : listen_(std::move(listen)), store_(store), threshold_(threshold), budget_ms_(budget_ms) {}

Server::~Server() { stop(); }

void Server::start() {
    listen_sock_ = net::listen_on(listen_, port_);
    accept_thread_ = std::thread([this] { accept_loop(); });
}

void Server::stop() {
    if (stopping_.exchange(true))
        return;
    if (listen_sock_.valid())
        ::shutdown(listen_sock_.fd(), SHUT_RDWR);
    listen_sock_.close();
    {
        std::lock_guard lock(conn_mutex_);
        for (int fd : live_fds_)
            ::shutdown(fd, SHUT_RDWR);
    }
    if (accept_thread_.joinable())
        accept_thread_.join();
    for (std::thread& t : conn_threads_)
        if (t.joinable())
            t.join();
    conn_threads_.clear();
}

void Server::track(int fd, bool add) {
    std::lock_guard lock(conn_mutex_);
    if (add)
        live_fds_.insert(fd);
    else
        live_fds_.erase(fd);
}

void Server::accept_loop() {
    for (;;) {
        const int fd = ::accept(listen_sock_.fd(), nullptr, nullptr);
        if (fd < 0) {
            if (stopping_.load())
                return;
            continue;
        }
        net::Socket sock(fd);
        track(fd, true);
        std::lock_guard lock(conn_mutex_);
        conn_threads_.emplace_back(
            [this, s = std::move(sock)]() mutable { handle_connection(std::move(s)); });
    }
}

void Server::handle_connection(net::Socket sock) {
    const int fd = sock.fd();
    net::FrameReader reader;

    // Per-connection exchange state: one auth session or one identification
    // run (a session per template), never both.
    std::optional<AuthSession> auth_session;
    std::vector<AuthSession> ident_sessions;
    bool ident_mode = false;
    bool terminal = false;

    try {
        proto::Message msg;
        while (reader.next(sock, msg)) {
            if (std::holds_alternative<proto::EnrollReq>(msg)) {
                const auto& req = std::get<proto::EnrollReq>(msg);
                Template t;
                t.subject_id = req.subject;
                t.features.coeffs = req.coeffs;
                t.features.fingerprint = req.fingerprint;
                t.enrolled_at = static_cast<std::int64_t>(std::time(nullptr));
                t.source_record = "wire";
                try {
                    validate_subject_id(t.subject_id);
                    if (t.features.coeffs.size() != t.features.fingerprint.m_coeffs)
                        throw Error(Errc::invalid_argument,
                                    "coefficient count disagrees with fingerprint");
                    std::lock_guard lock(store_mutex_);
                    store_.put(t);
                    net::send_message(sock, proto::EnrollOk{});
                } catch (const Error& e) {
                    if (e.code() == Errc::duplicate_subject)
                        net::send_message(sock,
                                          wire_error(proto::wire_duplicate_subject, e.what()));
                    else
                        net::send_message(sock, wire_error(proto::wire_internal, e.what()));
                }
            } else if (std::holds_alternative<proto::AuthBegin>(msg)) {
                const auto& req = std::get<proto::AuthBegin>(msg);
                std::optional<Template> t;
                {
                    std::lock_guard lock(store_mutex_);
                    t = store_.get(req.subject);
                }
                if (!t) {
                    net::send_message(
                        sock, wire_error(proto::wire_unknown_subject,
                                         "unknown subject: " + req.subject));
                    continue;
                }
                if (!(t->features.fingerprint == req.fingerprint)) {
                    net::send_message(sock, wire_error(proto::wire_fingerprint_mismatch,
                                                       "fingerprint mismatch"));
                    continue;
                }
                auth_session.emplace(std::move(*t), threshold_,
                                     static_cast<double>(budget_ms_));
                proto::SessionOk ok;
                ok.session_nonce = fresh_nonce();
                net::send_message(sock, ok);
            } else if (std::holds_alternative<proto::IdentBegin>(msg)) {
                const auto& req = std::get<proto::IdentBegin>(msg);
                std::vector<Template> all;
                {
                    std::lock_guard lock(store_mutex_);
                    all = store_.all();
                }
                ident_sessions.clear();
                for (Template& t : all)
                    if (t.features.fingerprint == req.fingerprint)
                        ident_sessions.emplace_back(std::move(t), threshold_,
                                                    static_cast<double>(budget_ms_));
                if (ident_sessions.empty()) {
                    net::send_message(sock, wire_error(proto::wire_unknown_subject,
                                                       "no enrolled templates match"));
                    continue;
                }
                ident_mode = true;
                proto::SessionOk ok;
                ok.session_nonce = fresh_nonce();
                net::send_message(sock, ok);
            } else if (std::holds_alternative<proto::Feature>(msg)) {
                const auto& feat = std::get<proto::Feature>(msg);
                if (terminal) {
                    net::send_message(sock, wire_error(proto::wire_session_terminal,
                                                       "session already decided"));
                    continue;
                }
                if (!auth_session && !ident_mode) {
                    net::send_message(sock,
                                      wire_error(proto::wire_internal, "no active session"));
                    continue;
                }

                if (auth_session) {
                    FeatureVector probe;
                    probe.coeffs = feat.coeffs;
                    probe.fingerprint = auth_session->tmpl().features.fingerprint;
                    if (probe.coeffs.size() != probe.fingerprint.m_coeffs) {
                        net::send_message(sock, wire_error(proto::wire_fingerprint_mismatch,
                                                           "coefficient count mismatch"));
                        continue;
                    }
                    std::optional<IntervalScore> score;
                    try {
                        score = auth_session->feed(probe, feat.t_signal_ms);
                    } catch (const Error& e) {
                        net::send_message(sock, wire_error(proto::wire_internal, e.what()));
                        continue;
                    }
                    terminal = auth_session->state() != SessionState::pending;
                    net::send_message(sock, status_of(*auth_session, score));
                } else {
                    // Identification: feed every pending per-template session,
                    // then aggregate.
                    proto::AuthStatus st;
                    st.state = static_cast<std::uint8_t>(SessionState::pending);
                    double best_cf = -2.0;
                    std::uint8_t max_fill = 0;
                    const AuthSession* winner = nullptr;
                    double winner_mean = -2.0;
                    bool all_terminal = true;
                    for (AuthSession& s : ident_sessions) {
                        if (s.state() != SessionState::pending)
                            continue;
                        FeatureVector probe;
                        probe.coeffs = feat.coeffs;
                        probe.fingerprint = s.tmpl().features.fingerprint;
                        std::optional<IntervalScore> score;
                        try {
                            score = s.feed(probe, feat.t_signal_ms);
                        } catch (const Error&) {
                            all_terminal = false; // still pending, just unfed
                            continue;
                        }
                        if (score && score->cf > best_cf)
                            best_cf = score->cf;
                        max_fill = std::max(max_fill,
                                            static_cast<std::uint8_t>(s.window().size()));
                        if (s.state() == SessionState::accepted) {
                            double mean = 0.0;
                            for (const IntervalScore& w : s.window())
                                mean += w.cf;
                            mean /= 3.0;
                            const bool wins =
                                winner == nullptr || mean > winner_mean ||
                                (mean == winner_mean &&
                                 s.tmpl().subject_id < winner->tmpl().subject_id);
                            if (wins) {
                                winner = &s;
                                winner_mean = mean;
                            }
                        }
                        if (s.state() == SessionState::pending)
                            all_terminal = false;
                    }
                    st.has_cf = best_cf > -2.0;
                    st.cf = st.has_cf ? best_cf : 0.0;
                    st.window_fill = max_fill;
                    if (winner != nullptr)
                        st.state = static_cast<std::uint8_t>(SessionState::accepted);
                    else if (all_terminal)
                        st.state = static_cast<std::uint8_t>(SessionState::rejected);
                    terminal = st.state != static_cast<std::uint8_t>(SessionState::pending);
                    net::send_message(sock, st);
                    if (terminal) {
                        proto::IdentResult res;
                        res.found = winner != nullptr;
                        if (winner != nullptr)
                            res.subject = winner->tmpl().subject_id;
                        net::send_message(sock, res);
                    }
                }
            } else {
                net::send_message(
                    sock, wire_error(proto::wire_internal, "unexpected message direction"));
            }
        }
    } catch (const Error& e) {
        // Decode failures get a last-gasp malformed notice; transport errors
        // just end the connection.
        const bool decode_error = e.code() == Errc::bad_magic || e.code() == Errc::bad_version ||
                                  e.code() == Errc::crc_mismatch ||
                                  e.code() == Errc::unknown_type ||
                                  e.code() == Errc::malformed_payload;
        if (decode_error) {
            try {
                net::send_message(sock, wire_error(proto::wire_malformed, e.what()));
            } catch (const Error&) {
            }
        }
    }
    track(fd, false);
}

} // namespace ecgauth
