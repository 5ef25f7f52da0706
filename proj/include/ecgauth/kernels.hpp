#pragma once

#include <cstddef>

// Data-parallel inner loops of the signal path. Every kernel exists as a
// scalar reference implementation plus, on x86-64, an AVX2 variant; the
// public functions route through a backend selected once at startup from
// CPU capabilities. The scalar versions are the semantics; SIMD variants
// must match them within accumulation-order tolerance and are equivalence-
// tested against them.

namespace ecgauth::kernels {

enum class Backend { scalar, avx2 };

const char* backend_name(Backend b);

/// Backend chosen by runtime CPU detection (or a later force_backend call).
Backend active_backend();

/// True if this build and this CPU can execute `b`.
bool supported(Backend b);

/// Override dispatch, primarily for tests and benchmarking.
/// Throws Error(invalid_argument) if the backend is not supported.
void force_backend(Backend b);

double dot(const double* a, const double* b, std::size_t n);
double sum(const double* a, std::size_t n);

/// Sums of centered products in one pass:
///   sxy = sum (a[i]-mean_a)(b[i]-mean_b)
///   sxx = sum (a[i]-mean_a)^2
///   syy = sum (b[i]-mean_b)^2
struct CenteredMoments {
    double sxy;
    double sxx;
    double syy;
};
CenteredMoments centered_moments(const double* a, const double* b, std::size_t n,
                                 double mean_a, double mean_b);

/// out[i] = in[i] * scale + offset
void scale_offset(const double* in, double* out, std::size_t n, double scale, double offset);

// Reference implementations, exposed so the SIMD variants can be checked
// against them directly.
namespace scalar {
double dot(const double* a, const double* b, std::size_t n);
double sum(const double* a, std::size_t n);
CenteredMoments centered_moments(const double* a, const double* b, std::size_t n,
                                 double mean_a, double mean_b);
void scale_offset(const double* in, double* out, std::size_t n, double scale, double offset);
} // namespace scalar

#if defined(ECGAUTH_HAVE_AVX2)
namespace avx2 {
double dot(const double* a, const double* b, std::size_t n);
double sum(const double* a, std::size_t n);
CenteredMoments centered_moments(const double* a, const double* b, std::size_t n,
                                 double mean_a, double mean_b);
void scale_offset(const double* in, double* out, std::size_t n, double scale, double offset);
} // namespace avx2
#endif

} // namespace ecgauth::kernels
