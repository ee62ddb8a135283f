#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "mpfbm/small_ball.hpp"

using namespace mpfbm;

namespace {

SmallBallEstimate synthetic(double r, double eps, double p) {
    SmallBallEstimate e;
    e.r = r;
    e.epsilon = eps;
    e.p_hat = p;
    e.replicates = 1000000;
    e.successes = static_cast<std::size_t>(p * 1e6);
    e.informative = true;
    return e;
}

}  // namespace

TEST_CASE("region points") {
    CHECK(region_points(2, Location::origin(), 0.5, 4).size() == 16);
    const Location c = Location::interior(Point{0.6, 0.6});
    const auto pts = region_points(2, c, 0.2, 9);
    for (const auto& p : pts) CHECK(euclidean(p, c.center) <= 0.2 * (1 + 1e-12));
    CHECK(std::find(pts.begin(), pts.end(), c.center) != pts.end());
    CHECK_THROWS_AS(region_points(2, c, 0.7, 9), std::invalid_argument);
    CHECK_THROWS_AS(region_points(2, Location::interior(Point{0.1, 0.5}), 0.2, 9), std::invalid_argument);
}

TEST_CASE("estimates: trivial thresholds and Wilson bracket") {
    const SupPool pool = simulate_sup_pool(0.3, 2, Location::origin(), {0.5, 1.0}, 8, 200, 7);
    for (std::size_t j = 0; j < 2; ++j) {
        const double r = pool.radii[j];
        const auto hi = estimate_from_pool(pool, j, 10.0 * std::pow(r, 0.6));
        CHECK(hi.p_hat == 1.0);
        CHECK_FALSE(hi.informative);
        const auto zero = estimate_from_pool(pool, j, 0.0);
        CHECK(zero.p_hat == 0.0);
        const auto mid = estimate_from_pool(pool, j, 0.8 * std::pow(r, 0.6));
        CHECK(mid.ci_low <= mid.p_hat);
        CHECK(mid.p_hat <= mid.ci_high);
        CHECK(mid.p_hat == static_cast<double>(mid.successes) / 200.0);
    }
}

TEST_CASE("property: common random numbers make p monotone in eps and r") {
    const SupPool pool =
        simulate_sup_pool(0.25, 2, Location::interior(Point{0.5, 0.5}), {0.05, 0.1, 0.2, 0.3}, 7, 300, 11);
    for (std::size_t rep = 0; rep < pool.replicates; ++rep)
        for (std::size_t j = 0; j + 1 < pool.radii.size(); ++j) CHECK(pool.sups[j][rep] <= pool.sups[j + 1][rep]);
    for (std::size_t j = 0; j < pool.radii.size(); ++j) {
        double prev = -1.0;
        for (double e = 0.05; e < 3.0; e *= 1.3) {
            const double p = estimate_from_pool(pool, j, e).p_hat;
            CHECK(p >= prev);
            prev = p;
        }
    }
    for (double e : {0.3, 0.6, 1.0}) {
        double prev = 2.0;
        for (std::size_t j = 0; j < pool.radii.size(); ++j) {
            const double p = estimate_from_pool(pool, j, e).p_hat;
            CHECK(p <= prev);
            prev = p;
        }
    }
}

TEST_CASE("pools do not depend on the worker count") {
    const auto a = simulate_sup_pool(0.3, 1, Location::origin(), {0.5, 1.0}, 16, 150, 3, 1);
    const auto b = simulate_sup_pool(0.3, 1, Location::origin(), {0.5, 1.0}, 16, 150, 3, 4);
    CHECK(a.sups == b.sups);
}

TEST_CASE("fits recover exact power laws") {
    std::vector<SmallBallEstimate> by_eps, by_r;
    for (double e : {0.3, 0.4, 0.5, 0.6, 0.8, 1.0}) by_eps.push_back(synthetic(1.0, e, std::exp(-1.0 / (e * e))));
    const auto fe = fit_eps_exponent(by_eps);
    CHECK(fe.slope == doctest::Approx(2.0).epsilon(1e-10));
    CHECK(fe.axis == FitAxis::epsilon);
    for (double r : {0.5, 0.6, 0.7, 0.8, 0.9}) by_r.push_back(synthetic(r, 0.5, std::exp(-std::pow(r, 4.0))));
    CHECK(fit_r_exponent(by_r).slope == doctest::Approx(4.0).epsilon(1e-10));
}

TEST_CASE("fits refuse thin data") {
    std::vector<SmallBallEstimate> narrow;
    for (double e : {0.5, 0.55, 0.6, 0.65, 0.7}) narrow.push_back(synthetic(1.0, e, std::exp(-1.0 / e)));
    CHECK_THROWS_AS(fit_eps_exponent(narrow), std::invalid_argument);  // less than half a decade
    std::vector<SmallBallEstimate> few(narrow.begin(), narrow.begin() + 3);
    CHECK_THROWS_AS(fit_r_exponent(few), std::invalid_argument);
    auto flagged = narrow;
    for (auto& e : flagged) e.informative = false;
    CHECK_THROWS_AS(fit_r_exponent(flagged), std::invalid_argument);
}

TEST_CASE("simulation preconditions") {
    CHECK_THROWS_AS(simulate_sup_pool(0.5, 2, Location::origin(), {1.0}, 8, 200, 1), std::invalid_argument);
    CHECK_THROWS_AS(simulate_sup_pool(0.3, 2, Location::origin(), {1.0}, 8, 50, 1), std::invalid_argument);
    CHECK_THROWS_AS(simulate_sup_pool(0.3, 2, Location::origin(), {}, 8, 200, 1), std::invalid_argument);
}

TEST_CASE("informative thresholds and radius bracket") {
    const SupPool pool = simulate_sup_pool(0.3, 1, Location::origin(), {1.0}, 24, 1000, 5);
    const auto eps = informative_epsilons(pool, 0, 6, 0.02, 0.9);
    REQUIRE(eps.size() == 6);
    CHECK(estimate_from_pool(pool, 0, eps.front()).p_hat == doctest::Approx(0.02).epsilon(0.2));
    CHECK(estimate_from_pool(pool, 0, eps.back()).p_hat == doctest::Approx(0.9).epsilon(0.02));
    const auto [lo, hi] = bracket_radii(0.3, 2, Location::origin(), 0.5, 0.01, 1.0, 5, 8, 300, 2, 0.02, 0.9);
    CHECK(lo < hi);
    CHECK(lo >= 0.01);
    CHECK(hi <= 1.0);
    const auto ls = log_space(0.01, 1.0, 3);
    CHECK(ls[1] == doctest::Approx(0.1));
}
