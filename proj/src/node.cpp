#include "ecgauth/node.hpp"

#include "ecgauth/errors.hpp"

namespace ecgauth {

namespace {

// One reply, which may legitimately be an Error frame.
proto::Message expect_reply(net::FrameReader& reader, const net::Socket& sock) {
    proto::Message msg;
    if (!reader.next(sock, msg))
        throw Error(Errc::connection_failed, "server closed the connection");
    return msg;
}

} // namespace

NodeOutcome node_run(const EcgRecord& rec, const net::Endpoint& server,
                     const std::string& subject_id, NodeMode mode) {
    NodeOutcome outcome;
    outcome.mode = mode;

    // Acquisition-side processing happens before any network traffic;
    // only features ever cross the wire.
    const std::vector<TimedFeature> probes = pipeline_features(rec);

    net::Socket sock = net::connect_to(server);
    net::FrameReader reader;

    if (mode == NodeMode::enroll) {
        proto::EnrollReq req;
        req.subject = subject_id;
        req.fingerprint = probes.front().features.fingerprint;
        req.coeffs = probes.front().features.coeffs;
        net::send_message(sock, req);

        const proto::Message reply = expect_reply(reader, sock);
        if (std::holds_alternative<proto::EnrollOk>(reply)) {
            outcome.enrolled = true;
            return outcome;
        }
        if (std::holds_alternative<proto::ErrorMsg>(reply)) {
            outcome.remote_error = std::get<proto::ErrorMsg>(reply);
            return outcome;
        }
        throw Error(Errc::protocol_error, "expected EnrollOk or Error");
    }

    proto::AuthBegin begin;
    begin.subject = subject_id;
    begin.fingerprint = probes.front().features.fingerprint;
    net::send_message(sock, begin);

    {
        const proto::Message reply = expect_reply(reader, sock);
        if (std::holds_alternative<proto::ErrorMsg>(reply)) {
            outcome.remote_error = std::get<proto::ErrorMsg>(reply);
            return outcome;
        }
        if (!std::holds_alternative<proto::SessionOk>(reply))
            throw Error(Errc::protocol_error, "expected SessionOk or Error");
    }

    for (const TimedFeature& probe : probes) {
        proto::Feature feat;
        feat.t_signal_ms = probe.t_signal_ms;
        feat.coeffs = probe.features.coeffs;
        net::send_message(sock, feat);

        const proto::Message reply = expect_reply(reader, sock);
        if (std::holds_alternative<proto::ErrorMsg>(reply)) {
            outcome.remote_error = std::get<proto::ErrorMsg>(reply);
            return outcome;
        }
        if (!std::holds_alternative<proto::AuthStatus>(reply))
            throw Error(Errc::protocol_error, "expected AuthStatus or Error");

        const auto& status = std::get<proto::AuthStatus>(reply);
        outcome.statuses.push_back(status);
        outcome.state = static_cast<SessionState>(status.state);
        if (outcome.state != SessionState::pending)
            return outcome;
    }

    // Record exhausted with the server still undecided; locally that maps to
    // a rejection, matching the offline semantics.
    outcome.state = SessionState::rejected;
    return outcome;
}

} // namespace ecgauth
