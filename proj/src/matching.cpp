#include "ecgauth/matching.hpp"

#include <algorithm>
#include <cmath>

#include "ecgauth/errors.hpp"
#include "ecgauth/kernels.hpp"

namespace ecgauth {

double pearson(const std::vector<double>& k, const std::vector<double>& l) {
    if (k.size() != l.size())
        throw Error(Errc::length_mismatch, "correlation inputs differ in length");
    const std::size_t n = k.size();
    if (n < 2)
        throw Error(Errc::invalid_argument, "correlation needs at least two points");

    const double mean_k = kernels::sum(k.data(), n) / static_cast<double>(n);
    const double mean_l = kernels::sum(l.data(), n) / static_cast<double>(n);
    const auto m = kernels::centered_moments(k.data(), l.data(), n, mean_k, mean_l);

    const double sd_k = std::sqrt(m.sxx / static_cast<double>(n));
    const double sd_l = std::sqrt(m.syy / static_cast<double>(n));
    if (sd_k <= 1e-12 || sd_l <= 1e-12)
        throw Error(Errc::degenerate_input, "correlation input has (near) zero variance");

    const double cf = m.sxy / std::sqrt(m.sxx * m.syy);
    return std::clamp(cf, -1.0, 1.0);
}

IntervalScore score_interval(const FeatureVector& tmpl, const FeatureVector& probe,
                             double threshold, double t_signal_ms) {
    if (!(tmpl.fingerprint == probe.fingerprint))
        throw Error(Errc::fingerprint_mismatch,
                    "template and probe come from different pipelines");
    if (!(threshold > 0.0 && threshold < 1.0))
        throw Error(Errc::invalid_threshold, "threshold must lie in (0, 1)");

    // Coefficient 0 is ~0 by construction and would only destabilize the
    // variance; correlate over indices 1..M-1.
    std::vector<double> a(tmpl.coeffs.begin() + 1, tmpl.coeffs.end());
    std::vector<double> b(probe.coeffs.begin() + 1, probe.coeffs.end());

    IntervalScore score;
    score.cf = pearson(a, b);
    score.threshold = threshold;
    score.passed = score.cf > threshold;
    score.t_signal_ms = t_signal_ms;
    return score;
}

} // namespace ecgauth
