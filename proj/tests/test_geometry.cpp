#include <cmath>
#include <limits>

#include "doctest.h"
#include "mpfbm/geometry.hpp"
#include "mpfbm/rng.hpp"

using namespace mpfbm;

namespace {

Point draw(Stream& rng, std::size_t nu) {
    std::vector<double> c(nu);
    for (auto& x : c) x = rng.uniform();
    return Point(c);
}

// Naive product formula, fine away from cancellation.
double naive_sym_diff(const Point& s, const Point& t) {
    double ps = 1, pt = 1, pm = 1;
    for (std::size_t i = 0; i < s.dim(); ++i) ps *= s[i], pt *= t[i], pm *= std::min(s[i], t[i]);
    return ps + pt - 2 * pm;
}

}  // namespace

TEST_CASE("points outside the unit cube are rejected") {
    CHECK_THROWS_AS(Point({0.5, 1.5}), std::invalid_argument);
    CHECK_THROWS_AS(Point({-1e-300}), std::invalid_argument);
    CHECK_THROWS_AS(Point({std::numeric_limits<double>::quiet_NaN()}), std::invalid_argument);
    CHECK_NOTHROW(Point({0.0, 1.0}));
    CHECK_THROWS_AS(Point({0.1, 0.2}).require_dim(3), std::invalid_argument);
}

TEST_CASE("hurst regimes") {
    CHECK(HurstParam(0.3).regime() == Regime::fractional);
    CHECK(HurstParam(0.5).regime() == Regime::sheet);
    CHECK(HurstParam(0.8).regime() == Regime::non_psd_probe);
    CHECK_THROWS_AS(HurstParam(0.0), std::invalid_argument);
    CHECK_THROWS_AS(HurstParam(1.2), std::invalid_argument);
    CHECK_THROWS_AS(HurstParam(0.8).require_kernel_regime(), std::invalid_argument);
    CHECK_NOTHROW(HurstParam(0.5).require_kernel_regime());
}

TEST_CASE("pow_nonneg") {
    CHECK(pow_nonneg(0.0, 0.6) == 0.0);
    CHECK(pow_nonneg(0.25, 0.5) == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("covariance against high-precision reference values") {
    // 40-digit evaluations of the defining formula at the exact binary inputs.
    struct Case {
        std::vector<double> s, t;
        double h, ref;
    };
    const Case cases[] = {
        {{0.3, 0.7}, {0.6, 0.2}, 0.3, 0.14011310323534027799},
        {{0.25, 0.5, 0.75}, {0.5, 0.5, 0.5}, 0.1, 0.32987697769322355723},
        {{0.9}, {0.4}, 0.45, 0.40601456768445128515},
        {{0.2, 0.8}, {0.2, 0.8}, 0.25, 0.4000000000000000222},
        {{1.0, 1.0}, {0.5, 0.125}, 0.5, 0.0625},
    };
    for (const auto& c : cases)
        CHECK(covariance(Point(c.s), Point(c.t), HurstParam(c.h)) == doctest::Approx(c.ref).epsilon(1e-14));
}

TEST_CASE("sym_diff keeps relative precision for nearby points") {
    const Point s{0.5, 0.5};
    const Point t{0.5 + 0x1p-40, 0.5};
    // [0,t] \ [0,s] is a 2^-40 by 1/2 strip.
    CHECK(sym_diff_measure(s, t) == doctest::Approx(0x1p-41).epsilon(1e-12));
    const Point u{0.5 + 0x1p-40, 0.5 - 0x1p-40};
    // |[0,s] sym-diff [0,u]| = e - e^2 with e = 2^-40.
    CHECK(sym_diff_measure(s, u) == doctest::Approx(0x1p-40 - 0x1p-80).epsilon(1e-12));
}

TEST_CASE("property: kernel structure on random points") {
    Stream rng(101, 0);
    for (int i = 0; i < 2000; ++i) {
        const std::size_t nu = 1 + static_cast<std::size_t>(i % 3);
        const double h = 0.05 + 0.9 * rng.uniform();
        const HurstParam hp(h);
        const Point s = draw(rng, nu), t = draw(rng, nu), u = draw(rng, nu);
        CHECK(covariance(s, t, hp) == covariance(t, s, hp));
        CHECK(covariance(s, s, hp) == doctest::Approx(std::pow(rect_volume(s), 2 * h)).epsilon(1e-13));
        const double d = sym_diff_measure(s, t);
        CHECK(d >= 0.0);
        CHECK(d == doctest::Approx(naive_sym_diff(s, t)).epsilon(1e-9).scale(1.0));
        // d_lambda is a metric; d_h = d_lambda^h with h <= 1 keeps the triangle inequality.
        CHECK(sym_diff_measure(s, u) <= d + sym_diff_measure(t, u) + 1e-15);
        CHECK(dist_h(s, u, h) <= dist_h(s, t, h) + dist_h(t, u, h) + 1e-12);
        CHECK(dist_h(s, s, h) == 0.0);
    }
}

TEST_CASE("rectangles with a zero side coincide under d_h") {
    const Point a{0.0, 0.7}, b{0.4, 0.0};
    CHECK(dist_h(a, b, 0.3) == 0.0);
    CHECK(euclidean(a, b) > 0.0);
}
