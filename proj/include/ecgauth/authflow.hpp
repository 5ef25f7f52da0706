#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ecgauth/matching.hpp"

namespace ecgauth {

/// An enrolled identity: the feature vector of the subject's first RR
/// interval plus provenance. subject_id is non-empty, at most 64 bytes.
struct Template {
    std::string subject_id;
    FeatureVector features;
    std::int64_t enrolled_at = 0; // unix seconds
    std::string source_record;
};

/// Throws Error(invalid_argument) on an empty or over-long subject id.
void validate_subject_id(const std::string& subject_id);

enum class SessionState : std::uint8_t { pending = 0, accepted = 1, rejected = 2 };
enum class RejectReason : std::uint8_t { none, timeout, exhausted };

const char* session_state_name(SessionState s);

/// Verification state machine: probes are scored against the template and
/// collected in a sliding window of the last three scores; the session
/// accepts on the first fully-passing consecutive triple and rejects when a
/// probe arrives past the signal-time budget. Terminal states absorb nothing
/// further (feeding one throws Error(session_terminal)).
class AuthSession {
public:
    AuthSession(Template tmpl, double threshold = pipeline::kDefaultThreshold,
                double budget_ms = pipeline::kDefaultBudgetMs);

    /// Score one probe observed at signal time t_signal_ms (must be
    /// non-decreasing across calls). Returns the score when one was computed;
    /// a feed past the budget rejects without scoring and returns nullopt.
    std::optional<IntervalScore> feed(const FeatureVector& probe, double t_signal_ms);

    SessionState state() const { return state_; }
    RejectReason reject_reason() const { return reject_reason_; }
    double consumed_ms() const { return consumed_ms_; }
    double threshold() const { return threshold_; }
    double budget_ms() const { return budget_ms_; }
    const std::deque<IntervalScore>& window() const { return window_; }
    const Template& tmpl() const { return template_; }

private:
    Template template_;
    double threshold_;
    double budget_ms_;
    std::deque<IntervalScore> window_;
    double consumed_ms_ = 0.0;
    SessionState state_ = SessionState::pending;
    RejectReason reject_reason_ = RejectReason::none;
};

/// Terminal outcome of verifying one record against one template.
struct AuthDecision {
    SessionState state = SessionState::rejected;
    RejectReason reason = RejectReason::exhausted;
    std::vector<IntervalScore> scores; // every scored interval, in feed order
    double elapsed_signal_ms = 0.0;
};

/// A probe extracted by the shared pipeline: the feature vector of one RR
/// interval and the signal time at which it became available (the interval's
/// end, whole milliseconds).
struct TimedFeature {
    FeatureVector features;
    std::uint32_t t_signal_ms = 0;
};

/// Run baseline removal, low-pass, R-peak detection, segmentation and
/// feature extraction; returns one TimedFeature per RR interval in signal
/// order. Throws Error(not_enough_peaks) when fewer than two peaks are found.
std::vector<TimedFeature> pipeline_features(const EcgRecord& rec, int m = pipeline::kNumCoeffs);

/// Build a template from the record's first RR interval.
Template enroll(const EcgRecord& rec, const std::string& subject_id);

/// Feed every RR interval of the record into a fresh session in signal-time
/// order and return the terminal decision. A record that runs out of
/// intervals while the session is still pending (including one with no
/// detectable peaks) is rejected with reason exhausted.
AuthDecision verify(const EcgRecord& rec, const Template& tmpl,
                    double threshold = pipeline::kDefaultThreshold,
                    double budget_ms = pipeline::kDefaultBudgetMs);

/// One-to-many identification: verify against every template; among accepted
/// ones return the subject whose accepting triple has the highest mean cf
/// (ties: lexicographically smallest subject id). Empty result when nobody
/// accepts. Throws Error(empty_template_set) / Error(fingerprint_mismatch).
std::optional<std::pair<std::string, AuthDecision>>
identify(const EcgRecord& rec, const std::vector<Template>& templates,
         double threshold = pipeline::kDefaultThreshold,
         double budget_ms = pipeline::kDefaultBudgetMs);

} // namespace ecgauth
