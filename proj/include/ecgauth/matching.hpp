#pragma once

#include <vector>

#include "ecgauth/features.hpp"

namespace ecgauth {

/// One scored probe interval. passed holds iff cf > threshold (strict).
struct IntervalScore {
    double cf = 0.0;
    bool passed = false;
    double threshold = 0.0;
    double t_signal_ms = 0.0;
};

/// Pearson product-moment correlation, clamped to [-1, 1] against rounding.
/// Throws Error(length_mismatch) for unequal lengths and
/// Error(degenerate_input) when either side has standard deviation <= 1e-12.
double pearson(const std::vector<double>& k, const std::vector<double>& l);

/// Correlate two feature vectors over coefficient indices 1..M-1 (index 0 is
/// forced to ~0 by z-scoring and carries no identity information) and apply
/// the strict threshold. Throws Error(fingerprint_mismatch) when the vectors
/// come from different pipelines.
IntervalScore score_interval(const FeatureVector& tmpl, const FeatureVector& probe,
                             double threshold, double t_signal_ms);

} // namespace ecgauth
