#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "arn/errors.hpp"
#include "arn/resonance.hpp"

using namespace arn;

namespace {

// Independent root finder: bisection on resonate(x) = T, bracket grown
// geometrically from the peak. Used as the oracle for coverage_bounds.
double bisect_coverage(const ResonatorSpec& spec, double threshold, bool upper) {
    auto [xm, ym] = peak(spec);
    const double dir = upper ? 1.0 : -1.0;
    double width = 1e-3;
    while (resonate(spec, xm + dir * width) > threshold) {
        width *= 2.0;
        REQUIRE(width < 1e12);
    }
    double lo = xm + dir * (width / 2.0 > 0 ? 0.0 : 0.0);
    double inside = xm, outside = xm + dir * width;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (inside + outside);
        if (resonate(spec, mid) >= threshold)
            inside = mid;
        else
            outside = mid;
    }
    (void)lo;
    return 0.5 * (inside + outside);
}

}  // namespace

TEST_SUITE("resonance") {

TEST_CASE("sigmoid peak value is k^2/4 at the center") {
    auto s = ResonatorSpec::sigmoid(0.3, 2.42);
    CHECK(resonate(s, 0.3) == doctest::Approx(0.25).epsilon(1e-12));
    // far tails decay to zero
    CHECK(resonate(s, 0.3 + 1000.0) == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(resonate(s, 0.3 - 1000.0) == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("sigmoid output at the half-power distance") {
    // Closed form distance 1.2198/rho from the coverage relation; the output
    // there equals the (truncated) threshold 0.176 the relation was built on.
    auto s = ResonatorSpec::sigmoid(0.0, 2.42);
    CHECK(resonate(s, 0.5041) == doctest::Approx(0.175988894).epsilon(1e-6));
    CHECK(resonate(s, 1.2198 / 2.42) == doctest::Approx(0.176).epsilon(1e-4));
}

TEST_CASE("peak locations per transform") {
    auto scaled = ResonatorSpec::scaled(1.0);
    CHECK(peak(scaled).first == doctest::Approx(0.5));
    CHECK(peak(scaled).second == doctest::Approx(0.25));

    auto translated = ResonatorSpec::translated(0.0);
    CHECK(peak(translated).first == doctest::Approx(0.5));
    CHECK(peak(translated).second == doctest::Approx(0.25));

    auto s2 = ResonatorSpec::scaled(0.5, 2.0);
    CHECK(peak(s2).first == doctest::Approx(2.0));
    CHECK(peak(s2).second == doctest::Approx(1.0));
}

TEST_CASE("half power threshold") {
    CHECK(half_power_threshold(1.0) == doctest::Approx(0.17678).epsilon(1e-4));
    CHECK(half_power_threshold(2.0) == doctest::Approx(0.70711).epsilon(1e-4));
    CHECK(half_power_threshold(1e-9) == doctest::Approx(0.0));
}

TEST_CASE("coverage bounds, scaled input") {
    auto s = ResonatorSpec::scaled(1.0);
    auto c = coverage_bounds(s, 0.176);
    CHECK(c.lower == doctest::Approx(0.2279706).epsilon(1e-6));
    CHECK(c.upper == doctest::Approx(0.7720294).epsilon(1e-6));
}

TEST_CASE("coverage bounds, sigmoid at the paper threshold") {
    auto s1 = ResonatorSpec::sigmoid(0.0, 1.0);
    auto c1 = coverage_bounds(s1, 0.176);
    CHECK(c1.lower == doctest::Approx(-1.2198).epsilon(1e-4));
    CHECK(c1.upper == doctest::Approx(+1.2198).epsilon(1e-4));

    auto s2 = ResonatorSpec::sigmoid(0.0, 2.0);
    auto c2 = coverage_bounds(s2, 0.176);
    CHECK(c2.lower == doctest::Approx(-0.6099).epsilon(1e-4));
    CHECK(c2.upper == doctest::Approx(+0.6099).epsilon(1e-4));
}

TEST_CASE("coverage bound errors") {
    auto s = ResonatorSpec::sigmoid(0.0, 1.0);
    CHECK_THROWS_AS(coverage_bounds(s, 0.26), CoverageError);   // above peak
    CHECK_THROWS_AS(coverage_bounds(s, 0.25), CoverageError);   // at peak
    CHECK_THROWS_AS(coverage_bounds(s, 0.0), ParameterError);
    CHECK_THROWS_AS(coverage_bounds(s, -1.0), ParameterError);
    // k > 1 sigmoid never falls back below k-1 on the right side
    auto wide = ResonatorSpec::sigmoid(0.0, 1.0, 1.5);
    CHECK_THROWS_AS(coverage_bounds(wide, 0.2), CoverageError);
}

TEST_CASE("invalid specs are rejected") {
    CHECK_THROWS_AS(ResonatorSpec::sigmoid(0.0, 0.0), ParameterError);
    CHECK_THROWS_AS(ResonatorSpec::sigmoid(0.0, -1.0), ParameterError);
    CHECK_THROWS_AS(ResonatorSpec::sigmoid(0.0, 1.0, 2.0), ParameterError);
    CHECK_THROWS_AS(ResonatorSpec::scaled(0.0), ParameterError);
    CHECK_THROWS_AS(ResonatorSpec::scaled(-2.0), ParameterError);
    CHECK_THROWS_AS(ResonatorSpec::sigmoid(0.0, 1.0, -1.0), ParameterError);
}

TEST_CASE("rho from sigma") {
    CHECK(rho_from_sigma(1.0) == doctest::Approx(1.4652));
    CHECK(rho_from_sigma(0.5) == doctest::Approx(2.9304));
    CHECK_THROWS_AS(rho_from_sigma(0.0), ParameterError);
    CHECK_THROWS_AS(rho_from_sigma(-1.0), ParameterError);

    // chain: sigma -> rho -> coverage at the half-power threshold
    const double rho = rho_from_sigma(0.8325);
    CHECK(rho == doctest::Approx(1.76));
    auto c = coverage_bounds(ResonatorSpec::sigmoid(0.0, rho), 0.176);
    CHECK(c.upper == doctest::Approx(0.6931).epsilon(1e-3));
}

TEST_CASE("coverage from stats") {
    auto c = coverage_from_stats(0.5, 0.1, 0.8325);
    CHECK(c.lower == doctest::Approx(0.41675));
    CHECK(c.upper == doctest::Approx(0.58325));

    auto g = coverage_from_stats(0.0, 1.0, kGaussianHalfPowerAlpha);
    CHECK(g.lower == doctest::Approx(-0.8325));
    CHECK(g.upper == doctest::Approx(+0.8325));

    auto tiny = coverage_from_stats(0.7, 1e-12, 0.8325);
    CHECK(tiny.lower == doctest::Approx(0.7));
    CHECK(tiny.upper == doctest::Approx(0.7));
    CHECK_THROWS_AS(coverage_from_stats(0.0, 0.0, 1.0), ParameterError);
}

TEST_CASE("constants recomputed from their definitions") {
    CHECK(std::acosh(1.8409) == doctest::Approx(1.2198).epsilon(1e-3));
    CHECK(std::sqrt(std::log(2.0)) == doctest::Approx(0.8325).epsilon(1e-3));
    CHECK(1.2198 / 0.8325 == doctest::Approx(1.4652).epsilon(1e-3));
    CHECK(kRhoSigmaRatio == doctest::Approx(std::acosh(1.8409) / std::sqrt(std::log(2.0))).epsilon(1e-3));
}

TEST_CASE("property: peak invariance across randomized specs") {
    std::mt19937 rng(12345);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    for (int i = 0; i < 300; ++i) {
        const int kind = static_cast<int>(rng() % 3);
        ResonatorSpec s;
        if (kind == 0) s = ResonatorSpec::scaled(0.1 + 5.0 * U(rng), 0.2 + 1.7 * U(rng));
        if (kind == 1) s = ResonatorSpec::translated(-2.0 + 4.0 * U(rng), 0.2 + 1.7 * U(rng));
        if (kind == 2) s = ResonatorSpec::sigmoid(-1.0 + 2.0 * U(rng), 0.2 + 8.0 * U(rng),
                                                  0.2 + 1.7 * U(rng));
        auto [xm, ym] = peak(s);
        CHECK(resonate(s, xm) == doctest::Approx(s.k * s.k / 4.0).epsilon(1e-9));
        CHECK(ym == doctest::Approx(s.k * s.k / 4.0));
    }
}

TEST_CASE("property: sigmoid symmetry about the center") {
    std::mt19937 rng(777);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    for (int i = 0; i < 200; ++i) {
        auto s = ResonatorSpec::sigmoid(-2.0 + 4.0 * U(rng), 0.3 + 6.0 * U(rng));
        const double d = 3.0 * U(rng);
        CHECK(resonate(s, s.center + d) ==
              doctest::Approx(resonate(s, s.center - d)).epsilon(1e-12));
    }
}

TEST_CASE("property: coverage endpoints meet the threshold") {
    std::mt19937 rng(31337);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    for (int i = 0; i < 300; ++i) {
        auto s = ResonatorSpec::sigmoid(-1.0 + 2.0 * U(rng), 0.3 + 8.0 * U(rng));
        const double T = 0.01 + 0.23 * U(rng);
        auto c = coverage_bounds(s, T);
        CHECK(c.lower < s.center);
        CHECK(s.center < c.upper);
        CHECK(resonate(s, c.lower) == doctest::Approx(T).epsilon(1e-9));
        CHECK(resonate(s, c.upper) == doctest::Approx(T).epsilon(1e-9));
    }
}

TEST_CASE("property: rising rho strictly shrinks coverage") {
    std::mt19937 rng(99);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    for (int i = 0; i < 100; ++i) {
        const double rho = 0.3 + 5.0 * U(rng);
        const double T = 0.02 + 0.2 * U(rng);
        auto narrow = coverage_bounds(ResonatorSpec::sigmoid(0.0, rho * 1.5), T);
        auto wide = coverage_bounds(ResonatorSpec::sigmoid(0.0, rho), T);
        CHECK(narrow.width() < wide.width());
    }
}

TEST_CASE("property: closed forms match the bisection oracle") {
    std::mt19937 rng(4242);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    for (int i = 0; i < 200; ++i) {
        ResonatorSpec s;
        const int kind = static_cast<int>(rng() % 3);
        if (kind == 0) s = ResonatorSpec::scaled(0.2 + 4.0 * U(rng));
        if (kind == 1) s = ResonatorSpec::translated(-1.0 + 2.0 * U(rng));
        if (kind == 2) s = ResonatorSpec::sigmoid(-1.0 + 2.0 * U(rng), 0.3 + 7.0 * U(rng));
        const double T = 0.01 + 0.22 * U(rng);
        auto c = coverage_bounds(s, T);
        CHECK(c.lower == doctest::Approx(bisect_coverage(s, T, false)).epsilon(1e-8));
        CHECK(c.upper == doctest::Approx(bisect_coverage(s, T, true)).epsilon(1e-8));
    }
}

}  // TEST_SUITE
