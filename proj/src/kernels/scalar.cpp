#include "ecgauth/kernels.hpp"

namespace ecgauth::kernels::scalar {

double dot(const double* a, const double* b, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        acc += a[i] * b[i];
    return acc;
}

double sum(const double* a, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        acc += a[i];
    return acc;
}

CenteredMoments centered_moments(const double* a, const double* b, std::size_t n,
                                 double mean_a, double mean_b) {
    CenteredMoments m{0.0, 0.0, 0.0};
    for (std::size_t i = 0; i < n; ++i) {
        const double da = a[i] - mean_a;
        const double db = b[i] - mean_b;
        m.sxy += da * db;
        m.sxx += da * da;
        m.syy += db * db;
    }
    return m;
}

void scale_offset(const double* in, double* out, std::size_t n, double scale, double offset) {
    for (std::size_t i = 0; i < n; ++i)
        out[i] = in[i] * scale + offset;
}

} // namespace ecgauth::kernels::scalar
