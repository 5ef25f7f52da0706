#include <doctest.h>

#include <cmath>

#include "ecgauth/errors.hpp"
#include "ecgauth/node.hpp"
#include "ecgauth/server.hpp"
#include "testutil.hpp"

using namespace ecgauth;

namespace {

struct LiveServer {
    testutil::TempDir dir{"wire"};
    TemplateStore store{dir.path() / "templates.jsonl"};
    Server server;

    explicit LiveServer(double threshold = 0.95, std::uint32_t budget_ms = 10000)
        : server(net::Endpoint{"127.0.0.1", 0}, store, threshold, budget_ms) {
        server.start();
    }
    ~LiveServer() { server.stop(); }
    net::Endpoint endpoint() const { return {"127.0.0.1", server.port()}; }
};

// Raw protocol client for driving the server directly.
struct Client {
    net::Socket sock;
    net::FrameReader reader;

    explicit Client(const net::Endpoint& ep) : sock(net::connect_to(ep)) {}

    proto::Message call(const proto::Message& m) {
        net::send_message(sock, m);
        proto::Message reply;
        REQUIRE(reader.next(sock, reply));
        return reply;
    }
    proto::Message read() {
        proto::Message reply;
        REQUIRE(reader.next(sock, reply));
        return reply;
    }
};

proto::EnrollReq enroll_req(const std::string& subject, const FeatureVector& fv) {
    proto::EnrollReq req;
    req.subject = subject;
    req.fingerprint = fv.fingerprint;
    req.coeffs = fv.coeffs;
    return req;
}

proto::Feature feature_of(const FeatureVector& fv, std::uint32_t t_ms) {
    proto::Feature f;
    f.t_signal_ms = t_ms;
    f.coeffs = fv.coeffs;
    return f;
}

} // namespace

TEST_SUITE_BEGIN("wire");

TEST_CASE("enroll then authenticate with self features") {
    LiveServer ls;
    Client c(ls.endpoint());

    const FeatureVector fv = testutil::random_features(1);
    CHECK(std::holds_alternative<proto::EnrollOk>(c.call(enroll_req("alice", fv))));

    proto::AuthBegin begin;
    begin.subject = "alice";
    begin.fingerprint = fv.fingerprint;
    CHECK(std::holds_alternative<proto::SessionOk>(c.call(begin)));

    // The template correlated with itself is exactly 1.
    for (std::uint8_t round = 1; round <= 3; ++round) {
        const proto::Message reply = c.call(feature_of(fv, 1000u * round));
        REQUIRE(std::holds_alternative<proto::AuthStatus>(reply));
        const auto& st = std::get<proto::AuthStatus>(reply);
        CHECK(st.window_fill == round);
        REQUIRE(st.has_cf);
        CHECK(st.cf == doctest::Approx(1.0).epsilon(1e-12));
        if (round < 3)
            CHECK(st.state == 0);
        else
            CHECK(st.state == 1);
    }

    // The session is terminal now.
    const proto::Message after = c.call(feature_of(fv, 4000));
    REQUIRE(std::holds_alternative<proto::ErrorMsg>(after));
    CHECK(std::get<proto::ErrorMsg>(after).code == proto::wire_session_terminal);
}

TEST_CASE("duplicate enrollment yields wire error 2") {
    LiveServer ls;
    Client c(ls.endpoint());
    const FeatureVector fv = testutil::random_features(2);
    CHECK(std::holds_alternative<proto::EnrollOk>(c.call(enroll_req("bob", fv))));
    const proto::Message reply = c.call(enroll_req("bob", fv));
    REQUIRE(std::holds_alternative<proto::ErrorMsg>(reply));
    CHECK(std::get<proto::ErrorMsg>(reply).code == proto::wire_duplicate_subject);
}

TEST_CASE("auth for an unknown subject yields wire error 3") {
    LiveServer ls;
    Client c(ls.endpoint());
    proto::AuthBegin begin;
    begin.subject = "mallory";
    begin.fingerprint = current_fingerprint();
    const proto::Message reply = c.call(begin);
    REQUIRE(std::holds_alternative<proto::ErrorMsg>(reply));
    CHECK(std::get<proto::ErrorMsg>(reply).code == proto::wire_unknown_subject);
}

TEST_CASE("fingerprint mismatch at auth begin yields wire error 4") {
    LiveServer ls;
    Client c(ls.endpoint());
    const FeatureVector fv = testutil::random_features(3);
    CHECK(std::holds_alternative<proto::EnrollOk>(c.call(enroll_req("carol", fv))));
    proto::AuthBegin begin;
    begin.subject = "carol";
    begin.fingerprint = fv.fingerprint;
    begin.fingerprint.pipeline_version = 42;
    const proto::Message reply = c.call(begin);
    REQUIRE(std::holds_alternative<proto::ErrorMsg>(reply));
    CHECK(std::get<proto::ErrorMsg>(reply).code == proto::wire_fingerprint_mismatch);
}

TEST_CASE("a feature past the budget rejects the session") {
    LiveServer ls;
    Client c(ls.endpoint());
    const FeatureVector fv = testutil::random_features(4);
    CHECK(std::holds_alternative<proto::EnrollOk>(c.call(enroll_req("dave", fv))));
    proto::AuthBegin begin;
    begin.subject = "dave";
    begin.fingerprint = fv.fingerprint;
    CHECK(std::holds_alternative<proto::SessionOk>(c.call(begin)));

    const proto::Message reply = c.call(feature_of(fv, 10001));
    REQUIRE(std::holds_alternative<proto::AuthStatus>(reply));
    const auto& st = std::get<proto::AuthStatus>(reply);
    CHECK(st.state == 2);
    CHECK_FALSE(st.has_cf);
}

TEST_CASE("a malformed frame draws error 1 and a connection close") {
    LiveServer ls;
    Client c(ls.endpoint());
    std::vector<std::uint8_t> frame = proto::encode(proto::EnrollOk{});
    frame[13] ^= 0x01; // break the CRC
    net::send_all(c.sock, frame);
    const proto::Message reply = c.read();
    REQUIRE(std::holds_alternative<proto::ErrorMsg>(reply));
    CHECK(std::get<proto::ErrorMsg>(reply).code == proto::wire_malformed);
    proto::Message ignored;
    CHECK_FALSE(c.reader.next(c.sock, ignored)); // orderly EOF
}

TEST_CASE("identification over the wire finds the best subject") {
    LiveServer ls;
    Client c(ls.endpoint());
    const FeatureVector a = testutil::random_features(10);
    const FeatureVector b = testutil::random_features(11);
    CHECK(std::holds_alternative<proto::EnrollOk>(c.call(enroll_req("a", a))));
    CHECK(std::holds_alternative<proto::EnrollOk>(c.call(enroll_req("b", b))));

    proto::IdentBegin begin;
    begin.fingerprint = a.fingerprint;
    CHECK(std::holds_alternative<proto::SessionOk>(c.call(begin)));

    for (std::uint32_t t : {1000u, 2000u}) {
        const proto::Message reply = c.call(feature_of(a, t));
        REQUIRE(std::holds_alternative<proto::AuthStatus>(reply));
        CHECK(std::get<proto::AuthStatus>(reply).state == 0);
    }
    const proto::Message third = c.call(feature_of(a, 3000));
    REQUIRE(std::holds_alternative<proto::AuthStatus>(third));
    CHECK(std::get<proto::AuthStatus>(third).state == 1);
    const proto::Message result = c.read();
    REQUIRE(std::holds_alternative<proto::IdentResult>(result));
    CHECK(std::get<proto::IdentResult>(result).found);
    CHECK(std::get<proto::IdentResult>(result).subject == "a");
}

TEST_CASE("identification that runs out of budget reports nobody") {
    LiveServer ls;
    Client c(ls.endpoint());
    CHECK(std::holds_alternative<proto::EnrollOk>(
        c.call(enroll_req("only", testutil::random_features(12)))));

    proto::IdentBegin begin;
    begin.fingerprint = current_fingerprint();
    CHECK(std::holds_alternative<proto::SessionOk>(c.call(begin)));

    const proto::Message reply = c.call(feature_of(testutil::random_features(13), 20000));
    REQUIRE(std::holds_alternative<proto::AuthStatus>(reply));
    CHECK(std::get<proto::AuthStatus>(reply).state == 2);
    const proto::Message result = c.read();
    REQUIRE(std::holds_alternative<proto::IdentResult>(result));
    CHECK_FALSE(std::get<proto::IdentResult>(result).found);
}

TEST_CASE("node enrolls and authenticates end to end") {
    LiveServer ls(0.90);
    const EcgRecord rec = testutil::synth_ecg(testutil::make_subject(50), 360.0, 15.0, 50);

    const NodeOutcome enrolled = node_run(rec, ls.endpoint(), "s50", NodeMode::enroll);
    CHECK(enrolled.enrolled);
    CHECK_FALSE(enrolled.remote_error.has_value());
    CHECK(ls.store.get("s50").has_value());

    const NodeOutcome authed = node_run(rec, ls.endpoint(), "s50", NodeMode::auth);
    CHECK_FALSE(authed.remote_error.has_value());
    CHECK(authed.state == SessionState::accepted);
}

TEST_CASE("node against an unknown subject surfaces wire error 3") {
    LiveServer ls;
    const EcgRecord rec = testutil::synth_ecg(testutil::make_subject(51), 360.0, 12.0, 51);
    const NodeOutcome outcome = node_run(rec, ls.endpoint(), "ghost", NodeMode::auth);
    REQUIRE(outcome.remote_error.has_value());
    CHECK(outcome.remote_error->code == proto::wire_unknown_subject);
}

TEST_CASE("node surfaces a vanished server as connection_failed") {
    net::Endpoint dead{"127.0.0.1", 1};
    {
        LiveServer ls;
        dead = ls.endpoint();
    } // server gone, port free again
    const EcgRecord rec = testutil::synth_ecg(testutil::make_subject(52), 360.0, 12.0, 52);
    try {
        static_cast<void>(node_run(rec, dead, "s52", NodeMode::auth));
        FAIL("expected connection_failed");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::connection_failed);
    }
}

TEST_CASE("wire and in-process decisions agree") {
    LiveServer ls(0.90);
    for (std::uint32_t seed : {60u, 61u, 62u}) {
        const EcgRecord rec =
            testutil::synth_ecg(testutil::make_subject(seed), 360.0, 20.0, seed);
        const std::string id = "s" + std::to_string(seed);
        const NodeOutcome enrolled = node_run(rec, ls.endpoint(), id, NodeMode::enroll);
        REQUIRE(enrolled.enrolled);

        const auto tmpl = ls.store.get(id);
        REQUIRE(tmpl.has_value());
        const AuthDecision local = verify(rec, *tmpl, 0.90, 10000.0);
        const NodeOutcome remote = node_run(rec, ls.endpoint(), id, NodeMode::auth);

        CHECK(local.state == remote.state);
        REQUIRE(remote.statuses.size() == local.scores.size() +
                                              (local.reason == RejectReason::timeout ? 1 : 0));
        for (std::size_t i = 0; i < local.scores.size(); ++i) {
            REQUIRE(remote.statuses[i].has_cf);
            CHECK(remote.statuses[i].cf == local.scores[i].cf); // bit-exact over the wire
        }
    }
}

TEST_SUITE_END();
