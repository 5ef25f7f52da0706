#pragma once

#include <cstdint>
#include <vector>

#include "ecgauth/dsp.hpp"
#include "ecgauth/pipeline.hpp"

namespace ecgauth {

/// Identifies the signal-path configuration a feature vector was produced
/// under. Vectors are comparable only when fingerprints match field-wise.
struct PipelineFingerprint {
    std::uint32_t n_resample = pipeline::kResampleLen;
    std::uint32_t m_coeffs = pipeline::kNumCoeffs;
    std::uint16_t pipeline_version = pipeline::kVersion;

    friend bool operator==(const PipelineFingerprint&, const PipelineFingerprint&) = default;
};

PipelineFingerprint current_fingerprint(std::uint32_t m_coeffs = pipeline::kNumCoeffs);

/// Truncated orthonormal DCT-II coefficients of a z-scored RR segment.
/// coeffs[0] is ~0 by construction (the segment is zero-mean).
struct FeatureVector {
    std::vector<double> coeffs;
    PipelineFingerprint fingerprint;
};

/// Orthonormal DCT-II:
///   y(0) = (1/sqrt(N)) * sum x(n)
///   y(k) = sqrt(2/N) * sum x(n) cos(pi (2n+1) k / (2N)),  k >= 1
/// Satisfies Parseval's identity exactly; idct is its transpose.
/// Throws Error(empty_input) for an empty vector.
std::vector<double> dct(const std::vector<double>& x);

/// Exact inverse of dct under the same orthonormal convention.
std::vector<double> idct(const std::vector<double>& y);

/// Z-score the segment waveform (population standard deviation), transform,
/// keep the first m coefficients. Throws Error(flat_segment) when the
/// waveform standard deviation is below 1e-12.
FeatureVector extract(const RrSegment& seg, int m = pipeline::kNumCoeffs);

} // namespace ecgauth
