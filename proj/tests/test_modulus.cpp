#include <cmath>

#include "doctest.h"
#include "mpfbm/modulus.hpp"

using namespace mpfbm;

namespace {

// Analytic stand-in for F with eps_k = exp(-k^2): F(x) = (log log(1/x) / 2)^(-1/2).
FTable collapsing_table() {
    std::vector<double> x, F;
    for (int i = 0; i <= 400; ++i) {
        const double lx = -700.0 + i * (700.0 - 8.0) / 400.0;
        x.push_back(std::exp(lx));
        F.push_back(std::pow(0.5 * std::log(-lx), -0.5));
    }
    return FTable(x, F);
}

// Moderately decaying table, F(x) = x^2 / (1 + x^2) sampled in log x.
FTable rational_table() {
    std::vector<double> x, F;
    for (int i = 0; i <= 200; ++i) {
        const double v = std::pow(10.0, -4.0 + 8.0 * i / 200.0);
        x.push_back(v);
        F.push_back(v * v / (1 + v * v));
    }
    return FTable(x, F);
}

}  // namespace

TEST_CASE("recursion matches an independent recomputation") {
    const FTable F = rational_table();
    const double h = 0.3, eta = 0.1;
    const std::size_t nu = 2;
    const auto t = build_modulus(F, h, nu, eta, 40);
    REQUIRE(t.size() == 40);
    double log_r = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        const double k = static_cast<double>(t.k0 + i);
        const double eps = F.inverse(std::pow(std::log(k), -2 * h / nu - 2 * eta));
        if (i > 0) log_r += std::log(F(t.eps[i - 1])) / (2 * nu * h) + std::log(eps);
        CHECK(t.eps[i] == doctest::Approx(eps).epsilon(1e-12));
        CHECK(t.log_r[i] == doctest::Approx(log_r).epsilon(1e-10).scale(1.0));
        CHECK(t.log_a[i] == doctest::Approx(-log_r + std::log(eps)).epsilon(1e-10).scale(1.0));
        CHECK(t.psi[i] == std::pow(std::log(k), -h / nu));
        CHECK(t.index_of(t.k0 + i) == i);
    }
    CHECK(t.log_r[0] == 0.0);
    // k0 is the first contracting index: the step just before it does not contract.
    if (t.k0 > 2) {
        const double k = static_cast<double>(t.k0 - 1);
        const double lv0 = std::pow(std::log(k), -2 * h / nu - 2 * eta);
        const double lv1 = std::pow(std::log(k + 1), -2 * h / nu - 2 * eta);
        if (lv0 < F.F_max() && lv1 > F.F_min())
            CHECK(std::log(F(F.inverse(lv0))) / (2 * nu * h) + std::log(F.inverse(lv1)) >= 0.0);
    }
}

TEST_CASE("upper interpolant is exact at nodes and increasing") {
    const auto t = build_modulus(rational_table(), 0.3, 2, 0.1, 60);
    for (std::size_t i = 0; i < t.size(); ++i) {
        CHECK(t.psi_upper_log(t.log_r[i]) == doctest::Approx(t.psi[i]).epsilon(1e-13));
        CHECK(t.covers(t.r(i)));
    }
    double prev = 0.0;
    for (double lr = t.log_r.back(); lr <= 0.0; lr += 0.01) {
        const double p = t.psi_upper_log(lr);
        CHECK(p >= prev);
        prev = p;
    }
    CHECK_FALSE(t.covers(2.0));
    CHECK_FALSE(t.covers(0.5 * t.r_min()));
}

TEST_CASE("lower envelope") {
    CHECK(psi_lower(1e-5, 0.3, 2) == doctest::Approx(std::pow(std::log(std::log(1e5)), -0.15)));
    CHECK_THROWS_AS(psi_lower(0.5, 0.3, 2), std::invalid_argument);
}

TEST_CASE("argument checks") {
    const FTable F = rational_table();
    CHECK_THROWS_AS(build_modulus(F, 0.3, 2, 0.0, 10), std::invalid_argument);
    CHECK_THROWS_AS(build_modulus(F, 0.3, 2, 0.1, 2), std::invalid_argument);
    CHECK_THROWS_AS(build_modulus(F, 0.5, 2, 0.1, 10), std::invalid_argument);
    CHECK_THROWS_AS(build_modulus(FTable({1, 2, 3}, {0.5, 0.4, 0.6}), 0.3, 2, 0.1, 10), std::invalid_argument);
    CHECK_THROWS_AS(build_modulus_covering(F, 0.3, 2, 0.1, 1e-200, 5), std::out_of_range);
    const auto c = build_modulus_covering(F, 0.3, 2, 0.1, 1e-3, 100000);
    CHECK(c.r_min() <= 1e-3);
    CHECK(c.log_r[c.size() - 2] > std::log(1e-3));
}

TEST_CASE("audit passes when r_k collapses fast") {
    const auto t = build_modulus(collapsing_table(), 0.3, 2, 0.1, 12);
    const auto a = audit_modulus(t);
    CHECK(a.psi_exact);
    CHECK(a.r_decreasing);
    CHECK(a.divergence);
    CHECK(a.lower_checked > 0);
    CHECK(a.dominates_lower);
    CHECK(a.pass());
}

TEST_CASE("audit flags psi_upper below psi_lower exactly where r_k > e^-k") {
    const auto t = build_modulus_covering(rational_table(), 0.3, 2, 0.1, 1e-3, 100000);
    const auto a = audit_modulus(t);
    CHECK(a.psi_exact);
    CHECK(a.r_decreasing);
    CHECK(a.divergence);
    bool node_violation = false;
    for (std::size_t i = 0; i < t.size(); ++i)
        if (t.log_r[i] < -1.0 && -t.log_r[i] < static_cast<double>(t.k0 + i)) node_violation = true;
    REQUIRE(node_violation);
    CHECK_FALSE(a.dominates_lower);
    CHECK(a.lower_violations > 0);
    CHECK(a.worst_log_gap > 0.0);
}

TEST_CASE("corner pairs") {
    const auto p = corner_pairs(2, 3, 0.5);
    CHECK(p.size() == 36);
    for (const auto& [s, t] : p) {
        CHECK(s != t);
        for (std::size_t i = 0; i < 2; ++i) CHECK(std::max(s[i], t[i]) <= 0.5);
    }
    CHECK(corner_pairs(1, 4, 1.0).size() == 6);
}

TEST_CASE("band variance bound on a small spectral model") {
    SpectralConfig cfg;
    cfg.nu = 2;
    cfg.level = 1;
    cfg.sphere_samples = 300;
    cfg.seed = 5;
    const SpectralModel m = make_spectral_model(cfg);
    const double h = m.alpha / 4;
    DirectionSet dirs = pair_grid_directions(m, 3);
    const FTable F = tabulate_F(m, dirs, 1e-3, 1e3, 64);
    const auto t = build_modulus_covering(F, h, 2, 0.1, 0.05, 100000);
    const std::size_t k = t.k0 + t.size() / 2;
    const auto pairs = corner_pairs(2, 3, t.r(t.index_of(k)));
    const auto rep = band_variance_check(m, dirs, t, k, h, pairs);
    CHECK(rep.partition.pass());
    CHECK(rep.per_pair.pass());
    CHECK(rep.sup_bound.pass);
}
