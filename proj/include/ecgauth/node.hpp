#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ecgauth/authflow.hpp"
#include "ecgauth/net.hpp"

namespace ecgauth {

enum class NodeMode { enroll, auth };

/// Terminal outcome of one node run. When the server answered with an Error
/// frame, remote_error holds it and the other fields describe the state at
/// that point.
struct NodeOutcome {
    NodeMode mode = NodeMode::enroll;
    bool enrolled = false;
    SessionState state = SessionState::pending;
    std::vector<proto::AuthStatus> statuses; // every AuthStatus received
    std::optional<proto::ErrorMsg> remote_error;
};

/// Run the acquisition-side pipeline on `rec` and drive the wire exchange:
/// enroll mode sends the first RR's features as an EnrollReq; auth mode opens
/// a session for `subject_id` and streams one Feature per RR interval until
/// the server reports a terminal status. Throws Error(connection_failed) on
/// transport failures and Error(protocol_error) on an unexpected reply.
NodeOutcome node_run(const EcgRecord& rec, const net::Endpoint& server,
                     const std::string& subject_id, NodeMode mode);

} // namespace ecgauth
