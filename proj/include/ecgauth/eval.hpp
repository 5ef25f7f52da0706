#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "ecgauth/authflow.hpp"

namespace ecgauth::eval {

enum class TrialKind { genuine, impostor };

/// The correlation triple of one trial: a template subject probed with three
/// consecutive RR intervals.
struct TrialResult {
    std::string subject_id;    // enrolled template
    TrialKind kind = TrialKind::genuine;
    std::string probe_subject; // whose intervals probed it
    double correlations[3] = {0.0, 0.0, 0.0};
};

struct SkippedRecord {
    std::string record_id;
    std::string reason;
};

struct TrialRun {
    std::vector<TrialResult> trials;
    std::vector<SkippedRecord> skipped;
};

/// Per record: enroll on the first RR interval, then correlate the next
/// three intervals against the template. Records yielding fewer than five
/// peaks are skipped with a named reason.
TrialRun run_genuine_trials(const std::vector<EcgRecord>& records);

/// For each ordered pair (A, B), A != B: enroll A's first RR, probe with B's
/// first three RR feature vectors.
TrialRun run_impostor_trials(const std::vector<EcgRecord>& records);

/// Fraction of individual correlation values strictly greater than the
/// threshold, over all 3*|results| values. Throws Error(empty_input).
double accuracy(const std::vector<TrialResult>& genuine, double threshold);

struct FarFrr {
    double far;
    double frr;
};

/// A trial is accepted iff all three correlations pass (strictly). FAR is
/// the accepted impostor fraction, FRR the rejected genuine fraction.
FarFrr far_frr(const std::vector<TrialResult>& genuine, const std::vector<TrialResult>& impostor,
               double threshold);

/// Write the CSV report: header "subject,kind,probe,cf1,cf2,cf3", one row per
/// trial in input order, then one summary line per threshold:
///   "# threshold=T accuracy=A" plus " far=F frr=R" when impostor trials
/// exist. Byte-identical across runs on the same inputs.
void report(const std::vector<TrialResult>& trials, const std::vector<double>& thresholds,
            const std::filesystem::path& out_path);

/// The bundled 15-subject genuine fixture (three correlations each) used by
/// the `eval --fixture table1` mode, values in [0, 1].
std::vector<TrialResult> table1_fixture();

} // namespace ecgauth::eval
