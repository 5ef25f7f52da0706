#include "ecgauth/dsp.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "ecgauth/errors.hpp"
#include "ecgauth/kernels.hpp"

namespace ecgauth {

namespace {

// Window length in samples for a duration in ms, rounded and forced odd.
std::size_t odd_window(double ms, double fs_hz) {
    auto w = static_cast<long>(std::llround(ms * fs_hz / 1000.0));
    if (w < 1)
        w = 1;
    if (w % 2 == 0)
        ++w;
    return static_cast<std::size_t>(w);
}

// Median filter with shrinking windows at the edges: at index i the window
// is the intersection of [i-h, i+h] with the signal.
std::vector<double> median_filter(const std::vector<double>& x, std::size_t window) {
    const std::size_t n = x.size();
    const std::size_t h = window / 2;
    std::vector<double> out(n);
    std::vector<double> scratch;
    scratch.reserve(window);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t lo = i >= h ? i - h : 0;
        const std::size_t hi = std::min(n - 1, i + h);
        scratch.assign(x.begin() + static_cast<std::ptrdiff_t>(lo),
                       x.begin() + static_cast<std::ptrdiff_t>(hi) + 1);
        const std::size_t mid = scratch.size() / 2;
        std::nth_element(scratch.begin(), scratch.begin() + static_cast<std::ptrdiff_t>(mid),
                         scratch.end());
        double med = scratch[mid];
        if (scratch.size() % 2 == 0) {
            const double below =
                *std::max_element(scratch.begin(), scratch.begin() + static_cast<std::ptrdiff_t>(mid));
            med = 0.5 * (med + below);
        }
        out[i] = med;
    }
    return out;
}

double sinc(double x) {
    if (x == 0.0)
        return 1.0;
    const double px = std::numbers::pi * x;
    return std::sin(px) / px;
}

} // namespace

EcgRecord remove_baseline(const EcgRecord& rec) {
    const std::size_t w_short = odd_window(pipeline::kMedianShortMs, rec.fs_hz);
    const std::size_t w_long = odd_window(pipeline::kMedianLongMs, rec.fs_hz);
    if (std::max(w_short, w_long) > rec.samples.size())
        return rec;

    const std::vector<double> stage1 = median_filter(rec.samples, w_short);
    const std::vector<double> baseline = median_filter(stage1, w_long);

    EcgRecord out = rec;
    for (std::size_t i = 0; i < out.samples.size(); ++i)
        out.samples[i] = rec.samples[i] - baseline[i];
    return out;
}

std::vector<double> lowpass_taps(double fs_hz) {
    const int taps = pipeline::kLowpassTaps;
    const int m = taps - 1;
    std::vector<double> h(static_cast<std::size_t>(taps));
    const double fc = pipeline::kLowpassCutoffHz / fs_hz; // cycles per sample
    double sum = 0.0;
    for (int i = 0; i < taps; ++i) {
        const double centered = i - m / 2.0;
        const double hamming =
            0.54 - 0.46 * std::cos(2.0 * std::numbers::pi * i / static_cast<double>(m));
        h[static_cast<std::size_t>(i)] = 2.0 * fc * sinc(2.0 * fc * centered) * hamming;
        sum += h[static_cast<std::size_t>(i)];
    }
    for (double& v : h)
        v /= sum; // unity DC gain
    return h;
}

EcgRecord lowpass(const EcgRecord& rec) {
    const std::size_t n = rec.samples.size();
    const auto taps = static_cast<std::size_t>(pipeline::kLowpassTaps);
    if (n < taps)
        throw Error(Errc::input_too_short, "record shorter than the filter tap count");

    const std::vector<double> h = lowpass_taps(rec.fs_hz);
    const std::size_t half = (taps - 1) / 2;
    const double* x = rec.samples.data();

    EcgRecord out = rec;
    // The kernel is symmetric, so the group-delay-compensated convolution is
    // a centered correlation; edges read zero padding.
    for (std::size_t i = 0; i < n; ++i) {
        if (i >= half && i + half < n) {
            out.samples[i] = kernels::dot(h.data(), x + (i - half), taps);
            continue;
        }
        double acc = 0.0;
        for (std::size_t t = 0; t < taps; ++t) {
            const auto j = static_cast<std::ptrdiff_t>(i + t) - static_cast<std::ptrdiff_t>(half);
            if (j >= 0 && j < static_cast<std::ptrdiff_t>(n))
                acc += h[t] * x[j];
        }
        out.samples[i] = acc;
    }
    return out;
}

std::vector<std::size_t> detect_rpeaks(const EcgRecord& rec) {
    const std::size_t n = rec.samples.size();
    const double fs = rec.fs_hz;
    const double* x = rec.samples.data();
    if (n < 5)
        return {};

    // Five-point derivative, squared.
    std::vector<double> energy(n);
    auto at = [&](std::ptrdiff_t i) { return i >= 0 ? x[i] : 0.0; };
    for (std::size_t i = 0; i < n; ++i) {
        const auto s = static_cast<std::ptrdiff_t>(i);
        const double d = (2.0 * at(s) + at(s - 1) - at(s - 3) - 2.0 * at(s - 4)) / 8.0;
        energy[i] = d * d;
    }

    // Moving-window integration (mean over the trailing window).
    const auto win = static_cast<std::size_t>(
        std::max<long>(1, std::llround(pipeline::kIntegrationWindowMs * fs / 1000.0)));
    std::vector<double> integ(n);
    double running = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        running += energy[i];
        if (i >= win)
            running -= energy[i - win];
        integ[i] = running / static_cast<double>(win);
    }

    // Running peak estimate seeded from the first seconds of the record.
    const std::size_t init_len =
        std::min(n, static_cast<std::size_t>(std::llround(pipeline::kThresholdInitSeconds * fs)));
    double peak_est = 0.0;
    for (std::size_t i = 0; i < init_len; ++i)
        peak_est = std::max(peak_est, integ[i]);

    const auto refractory =
        static_cast<std::size_t>(std::max<long>(1, std::llround(0.2 * fs)));
    const auto refine_half =
        static_cast<std::size_t>(std::max<long>(1, std::llround(pipeline::kRefineWindowMs * fs / 1000.0)));

    // A detection is the rising crossing of the adaptive threshold. The
    // crossing sits on the leading slope of the integrated QRS energy, close
    // to the R apex, which keeps the apex inside the refinement window; the
    // integration maximum itself can trail the apex by most of the window.
    std::vector<std::size_t> peaks;
    std::ptrdiff_t last_cross = -static_cast<std::ptrdiff_t>(refractory) - 1;
    for (std::size_t i = 1; i < n; ++i) {
        const double thr = pipeline::kThresholdFactor * peak_est;
        if (!(integ[i] > thr && integ[i - 1] <= thr))
            continue;
        if (static_cast<std::ptrdiff_t>(i) - last_cross < static_cast<std::ptrdiff_t>(refractory))
            continue;
        last_cross = static_cast<std::ptrdiff_t>(i);

        // Update the running estimate with this beat's integrated peak (the
        // maximum over one integration window past the crossing).
        double beat_peak = integ[i];
        for (std::size_t j = i; j < std::min(n, i + win); ++j)
            beat_peak = std::max(beat_peak, integ[j]);
        peak_est = pipeline::kPeakAverageWeight * beat_peak +
                   (1.0 - pipeline::kPeakAverageWeight) * peak_est;

        // Refine to the filtered-signal argmax around the detection point.
        const std::size_t lo = i >= refine_half ? i - refine_half : 0;
        const std::size_t hi = std::min(n - 1, i + refine_half);
        std::size_t best = lo;
        for (std::size_t j = lo + 1; j <= hi; ++j)
            if (x[j] > x[best])
                best = j;

        if (!peaks.empty()) {
            if (best <= peaks.back())
                continue;
            if (best - peaks.back() < refractory)
                continue;
        }
        peaks.push_back(best);
    }
    return peaks;
}

std::vector<RrSegment> segment_rr(const EcgRecord& rec, const std::vector<std::size_t>& peaks,
                                  int n_out) {
    if (peaks.size() < 2)
        throw Error(Errc::not_enough_peaks, "need at least two R-peaks to cut an interval");
    if (n_out < 2)
        throw Error(Errc::invalid_argument, "resample length must be at least 2");
    for (std::size_t i = 0; i < peaks.size(); ++i) {
        if (peaks[i] >= rec.samples.size())
            throw Error(Errc::invalid_argument, "peak index out of record bounds");
        if (i > 0 && peaks[i] <= peaks[i - 1])
            throw Error(Errc::invalid_argument, "peak indices must be strictly increasing");
    }

    const double* x = rec.samples.data();
    std::vector<RrSegment> out;
    out.reserve(peaks.size() - 1);
    for (std::size_t s = 0; s + 1 < peaks.size(); ++s) {
        const std::size_t p = peaks[s];
        const std::size_t q = peaks[s + 1];
        RrSegment seg;
        seg.start_sample = p;
        seg.end_sample = q;
        seg.t_start_ms = 1000.0 * static_cast<double>(p) / rec.fs_hz;
        seg.t_end_ms = 1000.0 * static_cast<double>(q) / rec.fs_hz;
        seg.waveform.resize(static_cast<std::size_t>(n_out));
        const double span = static_cast<double>(q - p);
        const double step = span / static_cast<double>(n_out - 1);
        seg.waveform.front() = x[p];
        seg.waveform.back() = x[q];
        for (int j = 1; j + 1 < n_out; ++j) {
            const double pos = static_cast<double>(p) + step * static_cast<double>(j);
            const auto i0 = static_cast<std::size_t>(pos);
            const double frac = pos - static_cast<double>(i0);
            seg.waveform[static_cast<std::size_t>(j)] = x[i0] * (1.0 - frac) + x[i0 + 1] * frac;
        }
        out.push_back(std::move(seg));
    }
    return out;
}

} // namespace ecgauth
