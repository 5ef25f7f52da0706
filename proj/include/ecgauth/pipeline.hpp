#pragma once

#include <cstdint>

namespace ecgauth::pipeline {

// Fixed constants of the signal path. Feature vectors produced under
// different constants are never comparable; kVersion stamps the whole set
// and is carried inside every fingerprint.
inline constexpr std::uint16_t kVersion = 1;

// RR segment resample length and feature truncation.
inline constexpr int kResampleLen = 256;
inline constexpr int kNumCoeffs = 64;

// Baseline estimator: cascade of two median filters.
inline constexpr double kMedianShortMs = 200.0;
inline constexpr double kMedianLongMs = 600.0;

// Windowed-sinc low-pass.
inline constexpr double kLowpassCutoffHz = 35.0;
inline constexpr int kLowpassTaps = 81;

// R-peak detector.
inline constexpr double kIntegrationWindowMs = 150.0;
inline constexpr double kThresholdFactor = 0.3;
inline constexpr double kPeakAverageWeight = 0.125;
inline constexpr double kRefractoryMs = 200.0;
inline constexpr double kRefineWindowMs = 50.0;
inline constexpr double kThresholdInitSeconds = 2.0;

// Decision defaults.
inline constexpr double kDefaultThreshold = 0.95;
inline constexpr std::uint32_t kDefaultBudgetMs = 10000;

} // namespace ecgauth::pipeline
