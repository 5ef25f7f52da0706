#pragma once

#include <cstddef>
#include <vector>

#include "ecgauth/ingest.hpp"
#include "ecgauth/pipeline.hpp"

namespace ecgauth {

/// One R-to-R interval resampled onto a fixed-length grid. The first and
/// last waveform points reproduce the source amplitudes at the bounding
/// R-peaks exactly.
struct RrSegment {
    std::size_t start_sample = 0; // index of the opening R-peak
    std::size_t end_sample = 0;   // index of the next R-peak (exclusive bound)
    double t_start_ms = 0.0;      // signal time of start_sample
    double t_end_ms = 0.0;        // signal time of end_sample
    std::vector<double> waveform; // length n_out, linear resample of [start, end]
};

/// Subtract a two-stage median-filter baseline estimate (windows of
/// kMedianShortMs then kMedianLongMs, rounded to odd sample counts; edges
/// use shrinking windows). Records shorter than the long window pass
/// through unchanged.
EcgRecord remove_baseline(const EcgRecord& rec);

/// Linear-phase windowed-sinc FIR low-pass (kLowpassCutoffHz, kLowpassTaps,
/// Hamming window, taps normalized to unit sum). Output is shifted left by
/// (taps-1)/2 so it stays time-aligned with the input; edges see zero
/// padding. Throws Error(input_too_short) for records shorter than the tap
/// count.
EcgRecord lowpass(const EcgRecord& rec);

/// The designed low-pass taps, exposed for frequency-response checks.
std::vector<double> lowpass_taps(double fs_hz);

/// Pan-Tompkins style R-peak detector over a baseline-removed, low-passed
/// record: 5-point derivative, squaring, 150 ms moving-window integration,
/// adaptive threshold at kThresholdFactor times a running peak estimate
/// (exponential average, weight kPeakAverageWeight, seeded from the first
/// 2 s), 200 ms refractory, final refinement to the argmax of the filtered
/// signal within +/-50 ms. Returned indices are strictly increasing with
/// gaps of at least round(0.2 * fs) samples. May be empty.
std::vector<std::size_t> detect_rpeaks(const EcgRecord& rec);

/// Cut [p_i, p_i+1] spans into RrSegments, resampling each onto n_out points
/// by linear interpolation. Throws Error(not_enough_peaks) for fewer than
/// two peaks.
std::vector<RrSegment> segment_rr(const EcgRecord& rec, const std::vector<std::size_t>& peaks,
                                  int n_out = pipeline::kResampleLen);

} // namespace ecgauth
