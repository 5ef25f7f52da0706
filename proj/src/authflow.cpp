#include "ecgauth/authflow.hpp"

#include <algorithm>
#include <cmath>
#include <ctime>

#include "ecgauth/errors.hpp"

namespace ecgauth {

void validate_subject_id(const std::string& subject_id) {
    if (subject_id.empty())
        throw Error(Errc::invalid_argument, "subject id must not be empty");
    if (subject_id.size() > 64)
        throw Error(Errc::invalid_argument, "subject id longer than 64 bytes");
}

const char* session_state_name(SessionState s) {
    switch (s) {
    case SessionState::pending: return "pending";
    case SessionState::accepted: return "accepted";
    case SessionState::rejected: return "rejected";
    }
    return "unknown";
}

AuthSession::AuthSession(Template tmpl, double threshold, double budget_ms)
    : template_(std::move(tmpl)), threshold_(threshold), budget_ms_(budget_ms) {
    if (!(threshold > 0.0 && threshold < 1.0))
        throw Error(Errc::invalid_threshold, "threshold must lie in (0, 1)");
    if (!(budget_ms > 0.0))
        throw Error(Errc::invalid_budget, "signal-time budget must be positive");
}

std::optional<IntervalScore> AuthSession::feed(const FeatureVector& probe, double t_signal_ms) {
    if (state_ != SessionState::pending)
        throw Error(Errc::session_terminal, "session already decided");
    if (t_signal_ms < consumed_ms_)
        throw Error(Errc::invalid_argument, "signal time must be non-decreasing");

    consumed_ms_ = t_signal_ms;
    if (t_signal_ms > budget_ms_) {
        state_ = SessionState::rejected;
        reject_reason_ = RejectReason::timeout;
        return std::nullopt;
    }

    const IntervalScore score =
        score_interval(template_.features, probe, threshold_, t_signal_ms);
    window_.push_back(score);
    if (window_.size() > 3)
        window_.pop_front();

    if (window_.size() == 3 &&
        std::all_of(window_.begin(), window_.end(), [](const IntervalScore& s) { return s.passed; })) {
        state_ = SessionState::accepted;
        reject_reason_ = RejectReason::none;
    }
    return score;
}

std::vector<TimedFeature> pipeline_features(const EcgRecord& rec, int m) {
    const EcgRecord filtered = lowpass(remove_baseline(rec));
    const std::vector<std::size_t> peaks = detect_rpeaks(filtered);
    const std::vector<RrSegment> segments = segment_rr(filtered, peaks);

    std::vector<TimedFeature> out;
    out.reserve(segments.size());
    for (const RrSegment& seg : segments) {
        TimedFeature tf;
        tf.features = extract(seg, m);
        // A probe exists once its closing R-peak has been observed; whole
        // milliseconds so offline and wire paths share one clock.
        tf.t_signal_ms = static_cast<std::uint32_t>(std::llround(seg.t_end_ms));
        out.push_back(std::move(tf));
    }
    return out;
}

Template enroll(const EcgRecord& rec, const std::string& subject_id) {
    validate_subject_id(subject_id);
    const EcgRecord filtered = lowpass(remove_baseline(rec));
    const std::vector<std::size_t> peaks = detect_rpeaks(filtered);
    const std::vector<RrSegment> segments = segment_rr(filtered, peaks);

    Template tmpl;
    tmpl.subject_id = subject_id;
    tmpl.features = extract(segments.front());
    tmpl.enrolled_at = static_cast<std::int64_t>(std::time(nullptr));
    tmpl.source_record = rec.record_id;
    return tmpl;
}

AuthDecision verify(const EcgRecord& rec, const Template& tmpl, double threshold,
                    double budget_ms) {
    AuthSession session(tmpl, threshold, budget_ms);
    AuthDecision decision;

    std::vector<TimedFeature> probes;
    try {
        probes = pipeline_features(rec, static_cast<int>(tmpl.features.fingerprint.m_coeffs));
    } catch (const Error& e) {
        if (e.code() != Errc::not_enough_peaks)
            throw;
        // No usable intervals: the session never gets evidence and the
        // record runs out, so the attempt is rejected as exhausted.
    }

    for (const TimedFeature& probe : probes) {
        const auto score = session.feed(probe.features, probe.t_signal_ms);
        if (score)
            decision.scores.push_back(*score);
        if (session.state() != SessionState::pending)
            break;
    }

    decision.state =
        session.state() == SessionState::pending ? SessionState::rejected : session.state();
    decision.reason = session.state() == SessionState::pending ? RejectReason::exhausted
                                                               : session.reject_reason();
    decision.elapsed_signal_ms = session.consumed_ms();
    return decision;
}

std::optional<std::pair<std::string, AuthDecision>>
identify(const EcgRecord& rec, const std::vector<Template>& templates, double threshold,
         double budget_ms) {
    if (templates.empty())
        throw Error(Errc::empty_template_set, "identification needs at least one template");
    for (const Template& t : templates)
        if (!(t.features.fingerprint == templates.front().features.fingerprint))
            throw Error(Errc::fingerprint_mismatch,
                        "templates in one identification must share a fingerprint");

    std::optional<std::pair<std::string, AuthDecision>> best;
    double best_mean = -2.0;
    for (const Template& t : templates) {
        AuthDecision d = verify(rec, t, threshold, budget_ms);
        if (d.state != SessionState::accepted)
            continue;
        // Mean cf of the accepting triple (the last three scores).
        double mean = 0.0;
        for (std::size_t i = d.scores.size() - 3; i < d.scores.size(); ++i)
            mean += d.scores[i].cf;
        mean /= 3.0;
        const bool wins = !best || mean > best_mean ||
                          (mean == best_mean && t.subject_id < best->first);
        if (wins) {
            best = std::make_pair(t.subject_id, std::move(d));
            best_mean = mean;
        }
    }
    return best;
}

} // namespace ecgauth
