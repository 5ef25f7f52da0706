#include "ecgauth/features.hpp"

#include <cmath>
#include <numbers>

#include "ecgauth/errors.hpp"
#include "ecgauth/kernels.hpp"

namespace ecgauth {

namespace {

// cos(pi * j / (2N)) for j in [0, 4N); every DCT-II basis value is one of
// these, since cos of the transform argument has period 4N in
// j = (2n+1)k. Built per call: O(N) cosines against O(N^2) work overall,
// and no shared cache to synchronize.
std::vector<double> quarter_wave_table(std::size_t n) {
    std::vector<double> table(4 * n);
    const double step = std::numbers::pi / (2.0 * static_cast<double>(n));
    for (std::size_t j = 0; j < table.size(); ++j)
        table[j] = std::cos(step * static_cast<double>(j));
    return table;
}

} // namespace

PipelineFingerprint current_fingerprint(std::uint32_t m_coeffs) {
    PipelineFingerprint fp;
    fp.m_coeffs = m_coeffs;
    return fp;
}

std::vector<double> dct(const std::vector<double>& x) {
    const std::size_t n = x.size();
    if (n == 0)
        throw Error(Errc::empty_input, "dct of an empty vector");

    const std::vector<double> table = quarter_wave_table(n);
    const double inv_sqrt_n = 1.0 / std::sqrt(static_cast<double>(n));
    const double scale = std::sqrt(2.0 / static_cast<double>(n));

    std::vector<double> y(n);
    y[0] = kernels::sum(x.data(), n) * inv_sqrt_n;

    std::vector<double> row(n);
    const std::size_t period = 4 * n;
    for (std::size_t k = 1; k < n; ++k) {
        // row[n'] = cos(pi (2n'+1) k / (2N)), walked as an index modulo 4N.
        std::size_t idx = k % period;
        const std::size_t stride = (2 * k) % period;
        for (std::size_t m = 0; m < n; ++m) {
            row[m] = table[idx];
            idx += stride;
            if (idx >= period)
                idx -= period;
        }
        y[k] = scale * kernels::dot(row.data(), x.data(), n);
    }
    return y;
}

std::vector<double> idct(const std::vector<double>& y) {
    const std::size_t n = y.size();
    if (n == 0)
        throw Error(Errc::empty_input, "idct of an empty vector");

    const std::vector<double> table = quarter_wave_table(n);
    const double inv_sqrt_n = 1.0 / std::sqrt(static_cast<double>(n));
    const double scale = std::sqrt(2.0 / static_cast<double>(n));

    std::vector<double> x(n, y[0] * inv_sqrt_n);
    if (n == 1)
        return x;

    std::vector<double> row(n - 1);
    const std::size_t period = 4 * n;
    for (std::size_t m = 0; m < n; ++m) {
        // row[k-1] = cos(pi (2m+1) k / (2N)) for k = 1..N-1.
        const std::size_t stride = (2 * m + 1) % period;
        std::size_t idx = stride;
        for (std::size_t k = 1; k < n; ++k) {
            row[k - 1] = table[idx];
            idx += stride;
            if (idx >= period)
                idx -= period;
        }
        x[m] += scale * kernels::dot(row.data(), y.data() + 1, n - 1);
    }
    return x;
}

FeatureVector extract(const RrSegment& seg, int m) {
    const std::size_t n = seg.waveform.size();
    if (n == 0)
        throw Error(Errc::empty_input, "segment has an empty waveform");
    if (m < 1 || static_cast<std::size_t>(m) > n)
        throw Error(Errc::invalid_argument, "coefficient count must be in [1, N]");

    const double mean = kernels::sum(seg.waveform.data(), n) / static_cast<double>(n);
    const auto moments =
        kernels::centered_moments(seg.waveform.data(), seg.waveform.data(), n, mean, mean);
    const double sd = std::sqrt(moments.sxx / static_cast<double>(n));
    if (sd < 1e-12)
        throw Error(Errc::flat_segment, "segment waveform has (near) zero variance");

    std::vector<double> z(n);
    kernels::scale_offset(seg.waveform.data(), z.data(), n, 1.0 / sd, -mean / sd);

    std::vector<double> coeffs = dct(z);
    coeffs.resize(static_cast<std::size_t>(m));

    FeatureVector fv;
    fv.coeffs = std::move(coeffs);
    fv.fingerprint = current_fingerprint(static_cast<std::uint32_t>(m));
    fv.fingerprint.n_resample = static_cast<std::uint32_t>(n);
    return fv;
}

} // namespace ecgauth
