#include <doctest.h>

#include <cmath>

#include "ecgauth/authflow.hpp"
#include "ecgauth/errors.hpp"
#include "testutil.hpp"

using namespace ecgauth;

namespace {

Template template_with(FeatureVector fv, const std::string& id = "alice") {
    Template t;
    t.subject_id = id;
    t.features = std::move(fv);
    t.enrolled_at = 1700000000;
    t.source_record = "unit";
    return t;
}

testutil::SubjectParams one_hz_subject() {
    testutil::SubjectParams sp = testutil::make_subject(1);
    sp.rr_mean_s = 1.0;
    return sp;
}

} // namespace

TEST_SUITE_BEGIN("authflow");

TEST_CASE("session construction enforces parameter ranges") {
    const Template tmpl = template_with(testutil::random_features(1));
    const AuthSession session(tmpl);
    CHECK(session.threshold() == 0.95);
    CHECK(session.budget_ms() == 10000.0);
    CHECK(session.state() == SessionState::pending);
    CHECK(session.consumed_ms() == 0.0);
    CHECK(session.window().empty());

    try {
        AuthSession bad(tmpl, 0.95, 0.0);
        FAIL("expected invalid_budget");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::invalid_budget);
    }
    try {
        AuthSession bad(tmpl, 1.0, 10000.0);
        FAIL("expected invalid_threshold");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::invalid_threshold);
    }
}

TEST_CASE("session accepts after three consecutive passes") {
    const FeatureVector base = testutil::random_features(2);
    AuthSession session(template_with(base), 0.95, 10000.0);

    session.feed(testutil::correlated_probe(base, 0.96, 100), 1000.0);
    CHECK(session.state() == SessionState::pending);
    CHECK(session.window().size() == 1);
    session.feed(testutil::correlated_probe(base, 0.97, 101), 1800.0);
    CHECK(session.state() == SessionState::pending);
    CHECK(session.window().size() == 2);
    session.feed(testutil::correlated_probe(base, 0.97, 102), 2600.0);
    CHECK(session.state() == SessionState::accepted);
    CHECK(session.window().size() == 3);
    for (const IntervalScore& s : session.window())
        CHECK(s.passed);
    CHECK(session.consumed_ms() == 2600.0);
}

TEST_CASE("session window slides over an early failure") {
    const FeatureVector base = testutil::random_features(3);
    AuthSession session(template_with(base), 0.95, 10000.0);

    session.feed(testutil::correlated_probe(base, 0.88, 200), 900.0);
    session.feed(testutil::correlated_probe(base, 0.96, 201), 1700.0);
    session.feed(testutil::correlated_probe(base, 0.97, 202), 2500.0);
    CHECK(session.state() == SessionState::pending); // window still holds the 0.88
    session.feed(testutil::correlated_probe(base, 0.98, 203), 3300.0);
    CHECK(session.state() == SessionState::accepted);
    REQUIRE(session.window().size() == 3);
    CHECK(session.window()[0].cf == doctest::Approx(0.96).epsilon(1e-9));
    CHECK(session.window()[2].cf == doctest::Approx(0.98).epsilon(1e-9));
}

TEST_CASE("session rejects on a feed past the budget without scoring") {
    const FeatureVector base = testutil::random_features(4);
    AuthSession session(template_with(base), 0.95, 10000.0);
    const auto score = session.feed(testutil::correlated_probe(base, 0.99, 300), 10500.0);
    CHECK_FALSE(score.has_value());
    CHECK(session.state() == SessionState::rejected);
    CHECK(session.reject_reason() == RejectReason::timeout);
    CHECK(session.window().empty());
    CHECK(session.consumed_ms() == 10500.0);
}

TEST_CASE("terminal sessions absorb nothing further") {
    const FeatureVector base = testutil::random_features(5);
    AuthSession session(template_with(base), 0.95, 10000.0);
    session.feed(testutil::correlated_probe(base, 0.99, 400), 10500.0);
    REQUIRE(session.state() == SessionState::rejected);
    try {
        session.feed(testutil::correlated_probe(base, 0.99, 401), 10600.0);
        FAIL("expected session_terminal");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::session_terminal);
    }
}

TEST_CASE("session rejects non-monotonic signal time") {
    const FeatureVector base = testutil::random_features(6);
    AuthSession session(template_with(base), 0.95, 10000.0);
    session.feed(testutil::correlated_probe(base, 0.5, 500), 2000.0);
    try {
        session.feed(testutil::correlated_probe(base, 0.5, 501), 1000.0);
        FAIL("expected invalid_argument");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::invalid_argument);
    }
}

TEST_CASE("enroll builds the template from the first interval") {
    std::vector<std::size_t> apexes;
    const EcgRecord rec = testutil::synth_ecg(one_hz_subject(), 360.0, 3.0, 77, &apexes);
    REQUIRE(apexes.size() >= 2);

    const Template tmpl = enroll(rec, "s1");
    CHECK(tmpl.subject_id == "s1");
    CHECK(tmpl.features.coeffs.size() == 64);
    CHECK(std::abs(tmpl.features.coeffs[0]) < 1e-9);
    CHECK(tmpl.source_record == rec.record_id);

    // The enrolled interval opens at (about) the first beat.
    const EcgRecord filtered = lowpass(remove_baseline(rec));
    const auto peaks = detect_rpeaks(filtered);
    REQUIRE(peaks.size() >= 2);
    const double first_peak_ms = 1000.0 * static_cast<double>(peaks[0]) / rec.fs_hz;
    const double apex_ms = 1000.0 * static_cast<double>(apexes[0]) / rec.fs_hz;
    CHECK(std::abs(first_peak_ms - apex_ms) <= 50.0);
}

TEST_CASE("enroll fails on a flat record") {
    EcgRecord rec;
    rec.record_id = "flat";
    rec.fs_hz = 360.0;
    rec.samples.assign(3600, 0.0);
    try {
        static_cast<void>(enroll(rec, "nobody"));
        FAIL("expected not_enough_peaks");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::not_enough_peaks);
    }
}

TEST_CASE("enroll validates subject ids") {
    const EcgRecord rec = testutil::synth_ecg(one_hz_subject(), 360.0, 3.0, 78);
    CHECK_THROWS_AS(static_cast<void>(enroll(rec, "")), Error);
    CHECK_THROWS_AS(static_cast<void>(enroll(rec, std::string(65, 'x'))), Error);
}

TEST_CASE("verify accepts the enrolled record") {
    const EcgRecord rec =
        testutil::synth_ecg(testutil::make_subject(80), 360.0, 12.0, 80);
    const Template tmpl = enroll(rec, "self");
    const AuthDecision d = verify(rec, tmpl, 0.95);
    CHECK(d.state == SessionState::accepted);
    REQUIRE(d.scores.size() >= 3);
    // Self-enrollment: the first probe is the enrolled interval itself.
    CHECK(d.scores[0].cf == doctest::Approx(1.0).epsilon(1e-9));
    for (std::size_t i = 0; i < 3; ++i)
        CHECK(d.scores[i].cf > 0.95);
    CHECK(d.elapsed_signal_ms <= 10000.0);
}

TEST_CASE("verify rejects a flat record as exhausted") {
    EcgRecord rec;
    rec.record_id = "flat";
    rec.fs_hz = 360.0;
    rec.samples.assign(3600, 0.0);
    const Template tmpl = template_with(testutil::random_features(7));
    const AuthDecision d = verify(rec, tmpl);
    CHECK(d.state == SessionState::rejected);
    CHECK(d.reason == RejectReason::exhausted);
    CHECK(d.scores.empty());
}

TEST_CASE("verify with a degenerate budget rejects by timeout") {
    const EcgRecord rec = testutil::synth_ecg(testutil::make_subject(81), 360.0, 12.0, 81);
    const Template tmpl = enroll(rec, "self");
    const AuthDecision d = verify(rec, tmpl, 0.95, 1.0);
    CHECK(d.state == SessionState::rejected);
    CHECK(d.reason == RejectReason::timeout);
    CHECK(d.scores.empty());
    CHECK(d.elapsed_signal_ms > 1.0);
}

TEST_CASE("verify decisions are bit-for-bit deterministic") {
    const EcgRecord rec = testutil::synth_ecg(testutil::make_subject(82), 360.0, 15.0, 82);
    const Template tmpl = enroll(rec, "self");
    const AuthDecision a = verify(rec, tmpl, 0.93);
    const AuthDecision b = verify(rec, tmpl, 0.93);
    CHECK(a.state == b.state);
    CHECK(a.elapsed_signal_ms == b.elapsed_signal_ms);
    REQUIRE(a.scores.size() == b.scores.size());
    for (std::size_t i = 0; i < a.scores.size(); ++i) {
        CHECK(a.scores[i].cf == b.scores[i].cf);
        CHECK(a.scores[i].t_signal_ms == b.scores[i].t_signal_ms);
        CHECK(a.scores[i].passed == b.scores[i].passed);
    }
}

TEST_CASE("verify acceptance structure and budget properties") {
    for (std::uint32_t seed : {83u, 84u, 85u}) {
        const EcgRecord rec =
            testutil::synth_ecg(testutil::make_subject(seed), 360.0, 20.0, seed);
        const Template tmpl = enroll(rec, "self");
        const AuthDecision d = verify(rec, tmpl, 0.90);
        if (d.state == SessionState::accepted) {
            REQUIRE(d.scores.size() >= 3);
            for (std::size_t i = d.scores.size() - 3; i < d.scores.size(); ++i)
                CHECK(d.scores[i].passed);
        }
        for (const IntervalScore& s : d.scores)
            CHECK(s.t_signal_ms <= 10000.0);
    }
}

TEST_CASE("acceptance is monotone in the threshold") {
    const EcgRecord rec = testutil::synth_ecg(testutil::make_subject(86), 360.0, 15.0, 86);
    const Template tmpl = enroll(rec, "self");
    bool accepted_above = verify(rec, tmpl, 0.95).state == SessionState::accepted;
    for (double thr : {0.90, 0.80, 0.60, 0.30}) {
        const bool accepted = verify(rec, tmpl, thr).state == SessionState::accepted;
        if (accepted_above)
            CHECK(accepted);
        accepted_above = accepted_above || accepted;
    }
}

TEST_CASE("identify picks the genuine subject") {
    const EcgRecord rec_a = testutil::synth_ecg(testutil::make_subject(90), 360.0, 15.0, 90);
    const EcgRecord rec_b = testutil::synth_ecg(testutil::make_subject(91), 360.0, 15.0, 91);
    const std::vector<Template> templates{enroll(rec_a, "a"), enroll(rec_b, "b")};

    const auto hit = identify(rec_a, templates, 0.90);
    REQUIRE(hit.has_value());
    CHECK(hit->first == "a");
    CHECK(hit->second.state == SessionState::accepted);
}

TEST_CASE("identify with an empty template set fails") {
    const EcgRecord rec = testutil::synth_ecg(testutil::make_subject(92), 360.0, 10.0, 92);
    try {
        static_cast<void>(identify(rec, {}));
        FAIL("expected empty_template_set");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::empty_template_set);
    }
}

TEST_CASE("identify returns nothing when nobody matches") {
    EcgRecord flat;
    flat.record_id = "flat";
    flat.fs_hz = 360.0;
    flat.samples.assign(3600, 0.0);
    const std::vector<Template> templates{template_with(testutil::random_features(8), "x")};
    CHECK_FALSE(identify(flat, templates).has_value());
}

TEST_CASE("identify insists on equal fingerprints") {
    const EcgRecord rec = testutil::synth_ecg(testutil::make_subject(93), 360.0, 10.0, 93);
    Template odd = template_with(testutil::random_features(9), "odd");
    odd.features.fingerprint.pipeline_version = 2;
    const std::vector<Template> templates{template_with(testutil::random_features(10), "even"),
                                          odd};
    try {
        static_cast<void>(identify(rec, templates));
        FAIL("expected fingerprint_mismatch");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::fingerprint_mismatch);
    }
}

TEST_SUITE_END();
