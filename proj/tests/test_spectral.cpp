#include <cmath>
#include <numbers>

#include "doctest.h"
#include "mpfbm/radial.hpp"
#include "mpfbm/rng.hpp"
#include "mpfbm/spectral.hpp"

using namespace mpfbm;

TEST_CASE("radial integral against high-precision quadrature") {
    // 40-digit adaptive quadrature of (1 - cos t) t^(-1-alpha) over (0, T);
    // the totals are -Gamma(-alpha) cos(pi alpha / 2).
    struct Row {
        double alpha;
        double T[6];
        double G[6];
        double total;
    };
    const Row rows[] = {
        {0.8,
         {0.1, 0.5, 1, 5, 64, 100},
         {0.026281675447950464378, 0.17995503179962515956, 0.40390951245359846417, 1.478596241933739366,
          1.7279306437196102908, 1.7420433505720627846},
         1.7733109069087460316},
        {1.2,
         {0.1, 0.5, 1, 5, 64, 100},
         {0.099032244394033467082, 0.35684187439745437839, 0.61040478330137431117, 1.4038160162983470592,
          1.4932643727729832159, 1.4957315345074729946},
         1.4990281954058280126},
        {1.6,
         {0.1, 0.5, 1, 5, 64, 100},
         {0.49756485941000891429, 0.94404844374208435751, 1.2329507023096311337, 1.8346815583493739928,
          1.868477272291995521, 1.868909783452653499},
         1.8693007990989060653},
    };
    for (const auto& r : rows) {
        const RadialIntegral G(r.alpha);
        CHECK(G.error_bound() < 1e-8);
        for (int i = 0; i < 6; ++i) CHECK(std::abs(G(r.T[i]) - r.G[i]) <= 1e-9);
        CHECK(std::abs(G.total() - r.total) <= 1e-9);
    }
    CHECK_THROWS_AS(RadialIntegral(2.0), std::invalid_argument);
}

TEST_CASE("property: radial integral is increasing with the right derivative") {
    const RadialIntegral G(1.2);
    double prev = 0.0;
    for (double T = 0.01; T < 500.0; T *= 1.07) {
        const double g = G(T);
        CHECK(g >= prev);
        prev = g;
        const double h = 1e-5 * T;
        CHECK((G(T + h) - G(T - h)) / (2 * h) == doctest::Approx(G.integrand(T)).epsilon(1e-4).scale(1e-3));
    }
}

TEST_CASE("spherical moments") {
    CHECK(spherical_moment(1, 1.2) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(spherical_moment(4, 1.2) == doctest::Approx(0.37544276315938429641).epsilon(1e-13));
    CHECK(spherical_moment(8, 0.8) == doctest::Approx(0.35688819504936361474).epsilon(1e-13));
    CHECK(spherical_moment(3, 1.6) == doctest::Approx(0.38461538461538460225).epsilon(1e-13));
}

TEST_CASE("haar coefficients of dyadic rectangles are exact") {
    const HaarBasis b1(1, 3);
    REQUIRE(b1.size() == 8);
    for (int k = 1; k <= 8; ++k) {
        const auto c = b1.rect_coeffs(Point{k / 8.0});
        double n2 = 0.0;
        for (double x : c) n2 += x * x;
        CHECK(n2 == doctest::Approx(k / 8.0).epsilon(1e-14));
    }
    const HaarBasis b2(2, 2);
    const Point s{0.25, 0.75}, t{0.5, 0.5};
    const auto c = b2.increment_coeffs(s, t);
    double n2 = 0.0;
    for (double x : c) n2 += x * x;
    CHECK(n2 == doctest::Approx(sym_diff_measure(s, t)).epsilon(1e-14));
    CHECK(HaarBasis(2, 2, 5).size() == 5);
}

TEST_CASE("positive stable variates have the right Laplace transform") {
    for (double beta : {0.4, 0.6, 0.8}) {
        Stream rng(17, static_cast<std::uint64_t>(beta * 10));
        const int n = 40000;
        for (double s : {0.5, 1.0, 2.0}) {
            double acc = 0.0, acc2 = 0.0;
            Stream r2(17, static_cast<std::uint64_t>(beta * 100 + s * 10));
            for (int i = 0; i < n; ++i) {
                const double a = positive_stable(beta, std::numbers::pi * r2.uniform(), r2.exponential());
                const double e = std::exp(-s * a);
                acc += e;
                acc2 += e * e;
            }
            const double m = acc / n;
            const double se = std::sqrt((acc2 / n - m * m) / n);
            CHECK(std::abs(m - std::exp(-std::pow(s, beta))) < 4.5 * se);
        }
    }
}

TEST_CASE("stable samples have the target characteristic function") {
    SpectralConfig cfg;
    cfg.nu = 1;
    cfg.level = 2;
    cfg.alpha = 1.2;
    cfg.sphere_samples = 1000;
    const SpectralModel m = make_spectral_model(cfg);
    const auto xs = sample_stable(m, 40000, 9);
    const std::vector<std::vector<double>> xis{{1, 0, 0, 0}, {0.5, -1, 0.3, 2}, {2, 2, 2, 2}};
    for (const auto& xi : xis) {
        double norm2 = 0.0;
        for (std::size_t j = 0; j < xi.size(); ++j) norm2 += std::pow(m.weights[j] * xi[j], 2);
        const double target = std::exp(-0.5 * std::pow(norm2, 0.6));
        double acc = 0.0, acc2 = 0.0;
        for (const auto& x : xs) {
            double dot = 0.0;
            for (std::size_t j = 0; j < xi.size(); ++j) dot += xi[j] * x[j];
            acc += std::cos(dot);
            acc2 += std::cos(dot) * std::cos(dot);
        }
        const double mean = acc / xs.size();
        const double se = std::sqrt((acc2 / xs.size() - mean * mean) / xs.size());
        CHECK(std::abs(mean - target) < 4.5 * se);
    }
}

TEST_CASE("spectral identity is exact in one dimension") {
    SpectralConfig cfg;
    cfg.nu = 1;
    cfg.level = 0;
    cfg.n = 1;
    cfg.sphere_samples = 10;
    for (double alpha : {0.5, 1.0, 1.7}) {
        cfg.alpha = alpha;
        const SpectralModel m = make_spectral_model(cfg);
        const auto rep = verify_spec_rep(m, {TestFunction::raw(m, {0.7}), TestFunction::raw(m, {-3.0})}, 1e-9);
        CHECK(rep.pass);
    }
}

TEST_CASE("levy integral regions partition exactly") {
    SpectralConfig cfg;
    cfg.nu = 2;
    cfg.level = 1;
    cfg.sphere_samples = 500;
    const SpectralModel m = make_spectral_model(cfg);
    const TestFunction f = TestFunction::rect_increment(m, Point{0.3, 0.9}, Point{0.7, 0.4});
    const double all = levy_integral(m, f, Region::all()).value;
    for (double a : {0.05, 0.5, 3.0}) {
        const double b = 4 * a;
        const double in = levy_integral(m, f, Region::ball(a)).value;
        const double out = levy_integral(m, f, Region::complement(a)).value;
        const double band = levy_integral(m, f, Region::band(a, b)).value;
        CHECK(in + out == doctest::Approx(all).epsilon(1e-12));
        CHECK(band == doctest::Approx(levy_integral(m, f, Region::ball(b)).value - in).epsilon(1e-9));
        CHECK(in >= 0.0);
    }
    // 2 levy(all) = |f|^alpha under the stored draws, up to their Monte-Carlo spread.
    const auto v = levy_integral(m, f, Region::all());
    CHECK(std::abs(2 * v.value - std::pow(f.h_norm(), m.alpha)) < 2 * (4 * v.mc_stderr + v.quad_error));
}

TEST_CASE("F table interpolation and inverse") {
    const FTable t({0.1, 1.0, 10.0}, {0.01, 0.2, 0.9});
    CHECK(t.strictly_increasing());
    CHECK(t(1.0) == 0.2);
    CHECK(t(std::sqrt(10.0)) == doctest::Approx(0.55));
    CHECK(t.inverse(0.55) == doctest::Approx(std::sqrt(10.0)).epsilon(1e-10));
    CHECK_THROWS_AS(t.inverse(0.95), std::out_of_range);
    CHECK(t.to_csv().rfind("x,F\n0.10000000000000001,0.01\n", 0) == 0);
}

TEST_CASE("decay function and truncation bounds on a small model") {
    SpectralConfig cfg;
    cfg.nu = 2;
    cfg.level = 1;
    cfg.sphere_samples = 400;
    cfg.seed = 3;
    const SpectralModel m = make_spectral_model(cfg);
    const DirectionSet dirs = pair_grid_directions(m, 3);
    CHECK(dirs.units.size() <= dirs.pairs);
    for (const auto& u : dirs.units) {
        double n2 = 0.0;
        for (double x : u) n2 += x * x;
        CHECK(n2 == doctest::Approx(1.0).epsilon(1e-12));
    }
    const FTable F = tabulate_F(m, dirs, 0.01, 100.0, 24);
    CHECK(F.strictly_increasing());
    CHECK(F(F.xs()[9]) == doctest::Approx(eval_F(m, dirs, F.xs()[9])).epsilon(1e-12));
    CHECK(tabulate_F(m, dirs, 0.01, 100.0, 24, 3).values() == F.values());
    const TestFunction f = TestFunction::rect_increment(m, Point{1.0 / 3, 1.0}, Point{2.0 / 3, 2.0 / 3});
    for (double a : {0.01, 0.3, 5.0})
        for (double b : {0.2, 2.0, 40.0}) CHECK(truncation_bounds_check(m, dirs, f, a, b).pass());
}
