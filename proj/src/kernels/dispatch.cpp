#include "ecgauth/kernels.hpp"

#include <atomic>

#include "ecgauth/errors.hpp"

namespace ecgauth::kernels {

namespace {

struct Ops {
    double (*dot)(const double*, const double*, std::size_t);
    double (*sum)(const double*, std::size_t);
    CenteredMoments (*centered_moments)(const double*, const double*, std::size_t, double, double);
    void (*scale_offset)(const double*, double*, std::size_t, double, double);
    Backend backend;
};

constexpr Ops kScalarOps{scalar::dot, scalar::sum, scalar::centered_moments, scalar::scale_offset,
                         Backend::scalar};

#if defined(ECGAUTH_HAVE_AVX2)
constexpr Ops kAvx2Ops{avx2::dot, avx2::sum, avx2::centered_moments, avx2::scale_offset,
                       Backend::avx2};
#endif

bool cpu_has_avx2() {
#if defined(ECGAUTH_HAVE_AVX2) && defined(__GNUC__)
    return __builtin_cpu_supports("avx2") != 0;
#else
    return false;
#endif
}

const Ops* detect() {
#if defined(ECGAUTH_HAVE_AVX2)
    if (cpu_has_avx2())
        return &kAvx2Ops;
#endif
    return &kScalarOps;
}

std::atomic<const Ops*>& current() {
    static std::atomic<const Ops*> ops{detect()};
    return ops;
}

} // namespace

const char* backend_name(Backend b) {
    switch (b) {
    case Backend::scalar: return "scalar";
    case Backend::avx2: return "avx2";
    }
    return "unknown";
}

Backend active_backend() { return current().load(std::memory_order_relaxed)->backend; }

bool supported(Backend b) {
    switch (b) {
    case Backend::scalar: return true;
    case Backend::avx2: return cpu_has_avx2();
    }
    return false;
}

void force_backend(Backend b) {
    if (!supported(b))
        throw Error(Errc::invalid_argument,
                    std::string("backend not supported on this host: ") + backend_name(b));
    switch (b) {
    case Backend::scalar:
        current().store(&kScalarOps, std::memory_order_relaxed);
        return;
    case Backend::avx2:
#if defined(ECGAUTH_HAVE_AVX2)
        current().store(&kAvx2Ops, std::memory_order_relaxed);
#endif
        return;
    }
}

double dot(const double* a, const double* b, std::size_t n) {
    return current().load(std::memory_order_relaxed)->dot(a, b, n);
}

double sum(const double* a, std::size_t n) {
    return current().load(std::memory_order_relaxed)->sum(a, n);
}

CenteredMoments centered_moments(const double* a, const double* b, std::size_t n, double mean_a,
                                 double mean_b) {
    return current().load(std::memory_order_relaxed)->centered_moments(a, b, n, mean_a, mean_b);
}

void scale_offset(const double* in, double* out, std::size_t n, double scale, double offset) {
    current().load(std::memory_order_relaxed)->scale_offset(in, out, n, scale, offset);
}

} // namespace ecgauth::kernels
