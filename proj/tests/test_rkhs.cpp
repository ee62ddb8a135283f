#include <cmath>
#include <tuple>

#include "doctest.h"
#include "mpfbm/lil.hpp"
#include "mpfbm/rkhs.hpp"
#include "mpfbm/rng.hpp"

using namespace mpfbm;

namespace {

Point draw(Stream& rng, std::size_t nu, double lo = 0.0, double hi = 1.0) {
    std::vector<double> c(nu);
    for (auto& x : c) x = lo + (hi - lo) * rng.uniform();
    return Point(c);
}

RkhsElement element(Stream& rng, std::size_t nu, double h, std::size_t m) {
    RkhsElement f;
    f.h = h;
    for (std::size_t i = 0; i < m; ++i) {
        f.anchors.push_back(draw(rng, nu, 0.05, 1.0));
        f.coeffs.push_back(rng.normal());
    }
    return f;
}

}  // namespace

TEST_CASE("gram matrix is symmetric positive semidefinite") {
    Stream rng(21, 0);
    const auto f = element(rng, 2, 0.3, 12);
    const auto K = gram(f.anchors, 0.3);
    CHECK((K - K.transpose()).cwiseAbs().maxCoeff() == 0.0);
    CHECK(min_eigenvalue(K) > -1e-12);
    CHECK_THROWS_AS(gram({Point{0.5, 0.5}, Point{0.5, 0.5}}, 0.3), std::invalid_argument);
}

TEST_CASE("property: reproducing kernel identities") {
    Stream rng(22, 0);
    for (int i = 0; i < 300; ++i) {
        const std::size_t nu = 1 + static_cast<std::size_t>(i % 3);
        const double h = 0.05 + 0.44 * rng.uniform();
        const auto f = element(rng, nu, h, 1 + static_cast<std::size_t>(i % 6));
        const auto g = element(rng, nu, h, 3);
        const Point t = draw(rng, nu), s = draw(rng, nu);
        CHECK(reproduce(f, t) == doctest::Approx(evaluate(f, t)).epsilon(1e-10).scale(1.0));
        CHECK(rkhs_inner(f, g) == doctest::Approx(rkhs_inner(g, f)).epsilon(1e-12).scale(1.0));
        CHECK(rkhs_inner(f, f) == doctest::Approx(std::pow(rkhs_norm(f), 2)).epsilon(1e-10).scale(1.0));
        // Cauchy-Schwarz against the evaluation functional: |f(t)| <= |f| |t|^(nu h).
        CHECK(std::abs(evaluate(f, t)) <= rkhs_norm(f) * std::pow(rect_volume(t), h) + 1e-10);
        RkhsElement d;
        d.h = h;
        d.anchors = {s, t};
        d.coeffs = {1.0, -1.0};
        if (!(s == t)) CHECK(rkhs_norm(d) == doctest::Approx(dist_h(s, t, h)).epsilon(1e-8).scale(1e-8));
        RkhsElement sum = f;
        sum.anchors.insert(sum.anchors.end(), g.anchors.begin(), g.anchors.end());
        sum.coeffs.insert(sum.coeffs.end(), g.coeffs.begin(), g.coeffs.end());
        CHECK(evaluate(sum, t) == doctest::Approx(evaluate(f, t) + evaluate(g, t)).epsilon(1e-12).scale(1.0));
    }
}

TEST_CASE("json round trip") {
    Stream rng(23, 0);
    const auto f = element(rng, 2, 0.25, 4);
    const auto g = RkhsElement::from_json(f.to_json());
    CHECK(g.h == f.h);
    CHECK(g.anchors == f.anchors);
    CHECK(g.coeffs == f.coeffs);
    RkhsElement bad = f;
    bad.coeffs.pop_back();
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("holder bound with the analytic equivalence constant") {
    // On the unit square delta(s,t) <= |s1-t1| + |s2-t2| <= sqrt(2) |s-t|.
    Stream rng(24, 0);
    for (int i = 0; i < 20; ++i) {
        const auto f = element(rng, 2, 0.3, 5);
        std::vector<std::pair<Point, Point>> pairs;
        for (int j = 0; j < 50; ++j) pairs.emplace_back(draw(rng, 2), draw(rng, 2));
        const auto c = holder_bound_check(f, pairs, std::sqrt(2.0));
        CHECK(c.total == 50);
        CHECK(c.violations == 0);
    }
    CHECK_THROWS_AS(holder_bound_check(element(rng, 2, 0.3, 2), {}, 0.0), std::invalid_argument);
}

TEST_CASE("rescaled paths") {
    const ScaleLayout L = build_scale_layout(0.3, 2, dyadic_scales(2, 5), 5);
    const FieldSample p = sample_path(L.model, 8, 0);
    const double r = 0.125;
    const auto e = rescale_lower(p, r);
    CHECK(e.normalizer == doctest::Approx(std::pow(r, 0.6) * std::sqrt(std::log(std::log(1 / r)))));
    REQUIRE(e.t.size() == e.values.size());
    for (const auto& t : e.t)
        for (std::size_t i = 0; i < 2; ++i) CHECK(t[i] <= 1.0);
    CHECK_THROWS_AS(rescale_lower(p, 0.5), std::invalid_argument);
}

TEST_CASE("technical functional bound holds pathwise") {
    const double h = 0.3;
    const ScaleLayout L = build_scale_layout(h, 2, dyadic_scales(2, 12), 7);
    const auto paths = sample_paths(L.model, 20, 5);
    Stream rng(25, 0);
    auto f = element(rng, 2, h, 4);
    const double n = rkhs_norm(f);
    for (auto& c : f.coeffs) c *= 0.5 / n;
    const double M = std::sqrt(2.0);
    const std::tuple<double, double, double> triples[] = {{0.002, 0.01, 0.05}, {0.001, 0.004, 0.1}, {0.01, 0.02, 0.03}};
    for (const auto& [s, r, u] : triples)
        for (const auto& p : paths) {
            const auto c = techflil_check(p, s, r, u, f, M);
            CHECK(c.pass);
        }
    CHECK_THROWS_AS(techflil_check(paths[0], 0.02, 0.01, 0.05, f, M), std::invalid_argument);
    CHECK_THROWS_AS(techflil_check(paths[0], 0.01, 0.02, 0.5, f, M), std::invalid_argument);
    // Near 1/e, x^(nu h) sqrt(log log 1/x) decreases.
    CHECK_THROWS_AS(techflil_check(paths[0], 0.3, 0.33, 0.36, f, M), std::invalid_argument);
}
