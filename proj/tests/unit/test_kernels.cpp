#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "ecgauth/kernels.hpp"

using namespace ecgauth;

namespace {

std::vector<double> random_vec(std::mt19937& rng, std::size_t n, double scale = 1.0) {
    std::normal_distribution<double> dist(0.0, scale);
    std::vector<double> v(n);
    for (double& x : v)
        x = dist(rng);
    return v;
}

} // namespace

TEST_SUITE_BEGIN("kernels");

TEST_CASE("scalar reference kernels match direct formulas") {
    std::mt19937 rng(7);
    const auto a = random_vec(rng, 37);
    const auto b = random_vec(rng, 37);

    double dot = 0.0, sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        dot += a[i] * b[i];
        sum += a[i];
    }
    CHECK(kernels::scalar::dot(a.data(), b.data(), a.size()) == doctest::Approx(dot).epsilon(1e-15));
    CHECK(kernels::scalar::sum(a.data(), a.size()) == doctest::Approx(sum).epsilon(1e-15));
}

#if defined(ECGAUTH_HAVE_AVX2)
TEST_CASE("avx2 variants agree with the scalar reference") {
    if (!kernels::supported(kernels::Backend::avx2)) {
        MESSAGE("avx2 not available on this host; skipping");
        return;
    }
    std::mt19937 rng(11);
    // Odd lengths exercise the scalar tails, zero the empty case.
    for (std::size_t n : {0u, 1u, 3u, 4u, 5u, 8u, 17u, 64u, 255u, 256u, 1000u}) {
        const auto a = random_vec(rng, n, 2.0);
        const auto b = random_vec(rng, n, 3.0);
        const double mean_a = n ? kernels::scalar::sum(a.data(), n) / static_cast<double>(n) : 0.0;
        const double mean_b = n ? kernels::scalar::sum(b.data(), n) / static_cast<double>(n) : 0.0;

        CHECK(kernels::avx2::dot(a.data(), b.data(), n) ==
              doctest::Approx(kernels::scalar::dot(a.data(), b.data(), n)).epsilon(1e-12));
        CHECK(kernels::avx2::sum(a.data(), n) ==
              doctest::Approx(kernels::scalar::sum(a.data(), n)).epsilon(1e-12));

        const auto ms = kernels::scalar::centered_moments(a.data(), b.data(), n, mean_a, mean_b);
        const auto mv = kernels::avx2::centered_moments(a.data(), b.data(), n, mean_a, mean_b);
        CHECK(mv.sxy == doctest::Approx(ms.sxy).epsilon(1e-12));
        CHECK(mv.sxx == doctest::Approx(ms.sxx).epsilon(1e-12));
        CHECK(mv.syy == doctest::Approx(ms.syy).epsilon(1e-12));

        std::vector<double> out_s(n), out_v(n);
        kernels::scalar::scale_offset(a.data(), out_s.data(), n, 1.7, -0.3);
        kernels::avx2::scale_offset(a.data(), out_v.data(), n, 1.7, -0.3);
        for (std::size_t i = 0; i < n; ++i)
            CHECK(out_v[i] == out_s[i]); // elementwise op, no reassociation
    }
}
#endif

TEST_CASE("dispatch routes through the forced backend") {
    const auto original = kernels::active_backend();
    const double a[4] = {1, 2, 3, 4};
    const double b[4] = {5, 6, 7, 8};

    kernels::force_backend(kernels::Backend::scalar);
    CHECK(kernels::active_backend() == kernels::Backend::scalar);
    CHECK(kernels::dot(a, b, 4) == doctest::Approx(70.0));

#if defined(ECGAUTH_HAVE_AVX2)
    if (kernels::supported(kernels::Backend::avx2)) {
        kernels::force_backend(kernels::Backend::avx2);
        CHECK(kernels::active_backend() == kernels::Backend::avx2);
        CHECK(kernels::dot(a, b, 4) == doctest::Approx(70.0));
    }
#endif
    kernels::force_backend(original);
}

TEST_CASE("backend names are stable") {
    CHECK(std::string(kernels::backend_name(kernels::Backend::scalar)) == "scalar");
    CHECK(std::string(kernels::backend_name(kernels::Backend::avx2)) == "avx2");
}

TEST_SUITE_END();
