#include "doctest.h"

#include <cmath>
#include <vector>

#include "mixbt/kernels.hpp"
#include "mixbt/rng.hpp"

#include "oracles.hpp"

using namespace mixbt;

namespace {

std::vector<double> random_vec(std::uint64_t seed, std::size_t n) {
    rng::Stream s(seed);
    std::vector<double> v(n);
    for (double& x : v) x = s.normal();
    return v;
}

struct BackendGuard {
    kernels::Backend saved = kernels::active_backend();
    ~BackendGuard() { kernels::set_backend(saved); }
};

}  // namespace

TEST_CASE("scalar and simd backends agree on reductions") {
    if (!kernels::backend_supported(kernels::Backend::Avx2)) return;
    BackendGuard guard;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const auto x = random_vec(seed, 37 + seed % 13);
        const auto y = random_vec(seed + 100, x.size());

        kernels::set_backend(kernels::Backend::Scalar);
        const double s_sum = kernels::sum(x);
        const double s_dot = kernels::dot(x, y);
        const auto s_mv = kernels::mean_var(x, 1);

        kernels::set_backend(kernels::Backend::Avx2);
        const double v_sum = kernels::sum(x);
        const double v_dot = kernels::dot(x, y);
        const auto v_mv = kernels::mean_var(x, 1);

        CHECK(s_sum == doctest::Approx(v_sum).epsilon(1e-12));
        CHECK(s_dot == doctest::Approx(v_dot).epsilon(1e-12));
        CHECK(s_mv.mean == doctest::Approx(v_mv.mean).epsilon(1e-12));
        CHECK(s_mv.var == doctest::Approx(v_mv.var).epsilon(1e-12));
    }
}

TEST_CASE("rolling mean matches the windowed oracle") {
    const auto x = random_vec(7, 60);
    std::vector<double> out(x.size());
    kernels::rolling_mean(x, 10, out);
    for (std::size_t t = 0; t < x.size(); ++t) {
        if (t < 9) {
            CHECK(std::isnan(out[t]));
        } else {
            CHECK(out[t] == doctest::Approx(oracles::window_mean(x, t, 10)).epsilon(1e-12));
        }
    }
}

TEST_CASE("rolling std (population) matches the windowed oracle") {
    const auto x = random_vec(8, 50);
    std::vector<double> out(x.size());
    kernels::rolling_std(x, 12, 0, out);
    for (std::size_t t = 11; t < x.size(); ++t)
        CHECK(out[t] == doctest::Approx(oracles::window_std(x, t, 12, 0)).epsilon(1e-12));
}

TEST_CASE("mean_var handles ddof and rejects degenerate input") {
    const std::vector<double> x{1.0, 2.0, 3.0, 4.0};
    const auto pop = kernels::mean_var(x, 0);
    const auto smp = kernels::mean_var(x, 1);
    CHECK(pop.mean == doctest::Approx(2.5));
    CHECK(pop.var == doctest::Approx(1.25));
    CHECK(smp.var == doctest::Approx(5.0 / 3.0));
    CHECK_THROWS_AS(kernels::mean_var(std::vector<double>{}, 0), std::invalid_argument);
    CHECK_THROWS_AS(kernels::mean_var(std::vector<double>{1.0}, 1), std::invalid_argument);
}

TEST_CASE("scale_shift standardizes") {
    const std::vector<double> x{2.0, 4.0, 6.0};
    std::vector<double> out(3);
    kernels::scale_shift(x, -4.0, 0.5, out);
    CHECK(out[0] == doctest::Approx(-1.0));
    CHECK(out[1] == doctest::Approx(0.0));
    CHECK(out[2] == doctest::Approx(1.0));
}

TEST_CASE("max_drawdown_scan equals the quadratic oracle") {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        rng::Stream s(seed);
        std::vector<double> curve{100.0};
        for (int i = 0; i < 200; ++i) curve.push_back(curve.back() * std::exp(0.01 * s.normal()));
        CHECK(kernels::max_drawdown_scan(curve) ==
              doctest::Approx(oracles::mdd_quadratic(curve)).epsilon(1e-12));
    }
}

TEST_CASE("dot rejects mismatched sizes") {
    CHECK_THROWS_AS(kernels::dot(std::vector<double>{1.0}, std::vector<double>{1.0, 2.0}),
                    std::invalid_argument);
}
