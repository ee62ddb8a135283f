#include <cmath>

#include "doctest.h"
#include "mpfbm/entropy.hpp"

using namespace mpfbm;

namespace {

// Minimal cover by exhaustive subset search; centres restricted to the domain.
std::size_t brute_force_cover(const std::vector<Point>& dom, const Metric& m, double eps) {
    const std::size_t n = dom.size();
    std::size_t best = n;
    for (unsigned mask = 1; mask < (1u << n); ++mask) {
        const auto size = static_cast<std::size_t>(__builtin_popcount(mask));
        if (size >= best) continue;
        bool ok = true;
        for (std::size_t i = 0; i < n && ok; ++i) {
            bool hit = false;
            for (std::size_t j = 0; j < n && !hit; ++j)
                if ((mask >> j) & 1u) hit = m.d(dom[i], dom[j]) <= eps;
            ok = hit;
        }
        if (ok) best = size;
    }
    return best;
}

}  // namespace

TEST_CASE("dyadic grid holds cell centres in row-major order") {
    const auto g = dyadic_grid(2, 2);
    REQUIRE(g.size() == 16);
    CHECK(g[0] == Point{0.125, 0.125});
    CHECK(g[1] == Point{0.125, 0.375});
    CHECK(g[15] == Point{0.875, 0.875});
}

TEST_CASE("exact 1-D cover matches brute force") {
    std::vector<Point> dom;
    for (int i = 0; i < 12; ++i) dom.push_back(Point{(i + 0.5) / 12.0 * (1.0 - 0.3 * (i % 2) / 12.0)});
    for (double eps : {0.03, 0.08, 0.1, 0.2, 0.45}) {
        const auto c = covering_number_1d(dom, metric_lambda(), eps);
        CHECK(c.count == brute_force_cover(dom, metric_lambda(), eps));
    }
}

TEST_CASE("property: greedy cover is a cover and a packing") {
    const auto dom = dyadic_grid(2, 4);
    for (const Metric& m : {metric_lambda(), metric_euclidean(), metric_dh(0.3)}) {
        for (double eps : {0.05, 0.12, 0.3, 0.6}) {
            const auto c = covering_number(dom, m, eps);
            CHECK(c.count == c.centers.size());
            for (const auto& p : dom) {
                double best = 1e300;
                for (const auto& z : c.centers) best = std::min(best, m.d(p, z));
                CHECK(best <= eps);
            }
            for (std::size_t i = 0; i < c.centers.size(); ++i)
                for (std::size_t j = i + 1; j < c.centers.size(); ++j) CHECK(m.d(c.centers[i], c.centers[j]) > eps);
        }
    }
}

TEST_CASE("greedy count brackets the exact minimum on a 1-D grid") {
    const auto dom = dyadic_grid(1, 8);
    for (double eps : {0.01, 0.05, 0.2}) {
        const auto exact = covering_number_1d(dom, metric_lambda(), eps).count;
        const auto greedy = covering_number(dom, metric_lambda(), eps).count;
        CHECK(greedy >= exact);
        // A packing at radius eps is at most the cover at radius eps/2.
        CHECK(greedy <= covering_number_1d(dom, metric_lambda(), eps / 2).count);
    }
}

TEST_CASE("greedy cover does not depend on the worker count") {
    const auto dom = dyadic_grid(2, 5);
    const auto a = covering_number(dom, metric_lambda(), 0.05, 1);
    const auto b = covering_number(dom, metric_lambda(), 0.05, 3);
    CHECK(a.centers == b.centers);
}

TEST_CASE("entropy slope of an exact power law") {
    std::vector<CoveringResult> rs;
    for (double e : {0.01, 0.02, 0.04, 0.08, 0.1, 0.2}) {
        CoveringResult r;
        r.epsilon = e;
        r.count = static_cast<std::size_t>(std::llround(1.0 / (e * e)));
        rs.push_back(r);
    }
    CHECK(entropy_slope(rs) == doctest::Approx(2.0).epsilon(1e-3));
    rs.resize(4);
    CHECK_THROWS_AS(entropy_slope(rs), std::invalid_argument);
}

TEST_CASE("entropy sweep rejects thresholds the grid cannot resolve") {
    const double res = grid_resolution(2, 4, metric_lambda());
    CHECK(res == doctest::Approx(1.0 / 16 * (1.0 - 1.0 / 32)));
    CHECK_THROWS_AS(entropy_sweep(2, 4, metric_lambda(), {1.5 * res}, CoverMethod::greedy), std::invalid_argument);
    CHECK_NOTHROW(entropy_sweep(2, 4, metric_lambda(), {2.5 * res}, CoverMethod::greedy));
}

TEST_CASE("equivalence constants respect the analytic bounds") {
    // On [a,b]^nu: a^(nu-1) |s-t| / sqrt(nu) <= delta(s,t) <= sqrt(nu) b^(nu-1) |s-t|.
    for (std::size_t nu : {2u, 3u}) {
        const double a = 0.2, b = 0.9;
        const auto e = equivalence_constants(nu, a, b, 20000, 5, true);
        CHECK(e.lower_valid);
        CHECK(e.m_hat >= std::pow(a, nu - 1.0) / std::sqrt(double(nu)) - 1e-12);
        CHECK(e.M_hat <= std::sqrt(double(nu)) * std::pow(b, nu - 1.0) + 1e-12);
        CHECK(e.m_hat <= e.M_hat);
    }
    CHECK_THROWS_AS(equivalence_constants(2, 0.0, 1.0, 100, 1, true), std::invalid_argument);
    CHECK_FALSE(equivalence_constants(2, 0.0, 1.0, 100, 1).lower_valid);
}

TEST_CASE("compdist counterexample is exact in binary") {
    for (int n : {5, 20, 30}) {
        const auto ce = compdist_counterexample(2, 1.0, n);
        // delta = 2 * 2^-n - 2 * 2^-2n
        CHECK(ce.delta == std::ldexp(1.0, 1 - n) - std::ldexp(1.0, 1 - 2 * n));
        CHECK(ce.euclid == doctest::Approx(std::sqrt(2.0) * (1 - std::ldexp(1.0, -n))).epsilon(1e-15));
    }
    CHECK_THROWS_AS(compdist_counterexample(1, 1.0, 5), std::invalid_argument);
}
