#include "doctest.h"

#include <cmath>
#include <vector>

#include "mixbt/metrics.hpp"
#include "mixbt/rng.hpp"

#include "oracles.hpp"

using namespace mixbt;
using namespace mixbt::metrics;

namespace {

std::vector<double> random_curve(std::uint64_t seed, std::size_t n) {
    rng::Stream s(seed);
    std::vector<double> curve{100000.0};
    for (std::size_t i = 1; i < n; ++i)
        curve.push_back(curve.back() * std::exp(0.01 * s.normal()));
    return curve;
}

}  // namespace

TEST_CASE("total return") {
    CHECK(total_return(std::vector<double>{100000.0, 110000.0, 125750.0}) ==
          doctest::Approx(0.2575));
    CHECK(total_return(std::vector<double>{5.0, 5.0, 5.0}) == doctest::Approx(0.0));
    CHECK(total_return(std::vector<double>{100.0, 50.0}) == doctest::Approx(-0.5));
    CHECK_THROWS_AS(total_return(std::vector<double>{1.0}), std::invalid_argument);
    CHECK_THROWS_AS(total_return(std::vector<double>{0.0, 1.0}), std::invalid_argument);
}

TEST_CASE("sharpe with sample std") {
    const std::vector<double> rets{0.01, -0.02, 0.03, 0.00};
    const double m = oracles::mean(rets);
    const double sd = oracles::sample_std(rets);
    CHECK(sharpe(rets) == doctest::Approx(m / sd).epsilon(1e-12));
    CHECK(sharpe(rets) == doctest::Approx(0.2402).epsilon(1e-3));

    CHECK_THROWS_AS(sharpe(std::vector<double>{0.01, 0.01, 0.01}), std::invalid_argument);

    // shifting returns and risk-free by the same constant leaves SR unchanged
    std::vector<double> shifted = rets;
    for (double& r : shifted) r += 0.005;
    CHECK(sharpe(shifted, 0.005) == doctest::Approx(sharpe(rets)).epsilon(1e-12));

    CHECK(sharpe(rets, 0.0, 252.0) == doctest::Approx(m / sd * std::sqrt(252.0)).epsilon(1e-12));
}

TEST_CASE("max drawdown forced case and brute force") {
    CHECK(max_drawdown(std::vector<double>{100.0, 120.0, 90.0, 110.0}) == doctest::Approx(0.25));
    std::vector<double> rising;
    for (int i = 0; i < 50; ++i) rising.push_back(100.0 + i);
    CHECK(max_drawdown(rising) == doctest::Approx(0.0));

    const auto walk = random_curve(3, 1000);
    CHECK(max_drawdown(walk) == doctest::Approx(oracles::mdd_quadratic(walk)).epsilon(1e-12));
    CHECK_THROWS_AS(max_drawdown(std::vector<double>{1.0, -1.0}), std::invalid_argument);
}

TEST_CASE("scale invariance of TR and MDD") {
    const auto curve = random_curve(4, 300);
    std::vector<double> scaled = curve;
    for (double& v : scaled) v *= 3.7;
    CHECK(total_return(scaled) == doctest::Approx(total_return(curve)).epsilon(1e-12));
    CHECK(max_drawdown(scaled) == doctest::Approx(max_drawdown(curve)).epsilon(1e-12));
}

TEST_CASE("sharpe sign equals sign of mean excess return") {
    for (std::uint64_t seed = 5; seed < 15; ++seed) {
        const auto curve = random_curve(seed, 100);
        const auto rets = simple_returns(curve);
        const double sr = sharpe(rets);
        const double m = oracles::mean(rets);
        if (m > 0.0) CHECK(sr > 0.0);
        if (m < 0.0) CHECK(sr < 0.0);
    }
}

TEST_CASE("report bundles the three metrics") {
    const auto curve = random_curve(6, 200);
    const auto rep = report(curve);
    CHECK(rep.periods == 200);
    CHECK(rep.total_return == doctest::Approx(total_return(curve)));
    CHECK(rep.max_drawdown == doctest::Approx(max_drawdown(curve)));
    REQUIRE(rep.sharpe.has_value());
    CHECK(*rep.sharpe == doctest::Approx(sharpe(simple_returns(curve))));

    const auto flat = report(std::vector<double>{10.0, 10.0, 10.0});
    CHECK(!flat.sharpe.has_value());
    CHECK(flat.total_return == doctest::Approx(0.0));
}
