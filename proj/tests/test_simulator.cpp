#include <cmath>

#include "doctest.h"
#include "mpfbm/simulator.hpp"

using namespace mpfbm;

TEST_CASE("grid spec layout and validation") {
    GridSpec g{2, 3, 0.5, true};
    REQUIRE(g.size() == 9);
    const auto pts = g.points();
    CHECK(pts[0] == Point{0.0, 0.0});
    CHECK(pts[1] == Point{0.0, 0.25});
    CHECK(pts[8] == Point{0.5, 0.5});
    GridSpec no_origin{1, 4, 1.0, false};
    CHECK(no_origin.axis() == std::vector<double>{0.25, 0.5, 0.75, 1.0});
    CHECK_THROWS_AS((GridSpec{2, 65, 1.0, true}.validate()), BudgetExceeded);
    CHECK_THROWS_AS((GridSpec{2, 4, 1.5, true}.validate()), std::invalid_argument);
    CHECK_THROWS_AS((GridSpec{0, 4, 1.0, true}.validate()), std::invalid_argument);
}

TEST_CASE("union layout drops exact duplicates in first-seen order") {
    const auto a = GridSpec{1, 3, 1.0, true}.points();   // 0, .5, 1
    const auto b = GridSpec{1, 3, 0.5, true}.points();   // 0, .25, .5
    const Layout l = union_layout({a, b}, "u");
    REQUIRE(l.points.size() == 4);
    CHECK(l.points[3] == Point{0.25});
    CHECK_FALSE(l.grid.has_value());
}

TEST_CASE("covariance matrix factor reproduces the matrix") {
    const auto pts = GridSpec{2, 6, 1.0, true}.points();
    const auto K = covariance_matrix(pts, HurstParam(0.3));
    const Factor f = factorize(K);
    CHECK(f.jitter == 0.0);
    // Origin and axis points have zero variance and are pinned.
    CHECK(f.active.size() == 25);
    Eigen::MatrixXd sub(25, 25);
    for (int i = 0; i < 25; ++i)
        for (int j = 0; j < 25; ++j) sub(i, j) = K(f.active[i], f.active[j]);
    CHECK((f.lower * f.lower.transpose() - sub).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(min_eigenvalue(sub) > 0.0);
}

TEST_CASE("factorize rejects an indefinite matrix") {
    Eigen::MatrixXd m(2, 2);
    m << 1.0, 2.0, 2.0, 1.0;
    CHECK_THROWS_AS(factorize(m), NotPositiveSemiDefinite);
}

TEST_CASE("sample paths are deterministic and worker independent") {
    const FieldModel model = build_field_model(make_layout(GridSpec{2, 8, 1.0, true}), HurstParam(0.3));
    const auto a = sample_paths(model, 7, 99, 1);
    const auto b = sample_paths(model, 7, 99, 4);
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].values == b[i].values);
        CHECK(a[i].values == sample_path(model, 99, i).values);
        CHECK(a[i].values[0] == 0.0);
    }
    CHECK(a[0].values != a[1].values);
}

TEST_CASE("empirical covariance matches the kernel") {
    const std::vector<Point> pts{{0.3, 0.9}, {0.8, 0.5}, {1.0, 1.0}};
    const FieldModel model = build_field_model(make_layout(pts, "three"), HurstParam(0.35));
    const std::size_t n = 20000;
    const auto paths = sample_paths(model, n, 3);
    const auto K = covariance_matrix(pts, HurstParam(0.35));
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            double acc = 0.0;
            for (const auto& p : paths) acc += p.values[i] * p.values[j];
            const double est = acc / static_cast<double>(n);
            // sd of a product of two unit-scale normals is at most sqrt(2).
            const double se = std::sqrt(2.0 * K(i, i) * K(j, j) / static_cast<double>(n));
            CHECK(std::abs(est - K(i, j)) < 4.0 * se);
        }
}

TEST_CASE("sup norm over a sub-corner") {
    const FieldModel model = build_field_model(make_layout(GridSpec{1, 5, 1.0, true}), HurstParam(0.3));
    const FieldSample s = sample_path(model, 1, 0);
    double m = 0.0;
    for (std::size_t i = 0; i < 3; ++i) m = std::max(m, std::abs(s.values[i]));  // points 0, .25, .5
    CHECK(sup_norm(s, 0.5) == m);
}

TEST_CASE("csv serialization header and rows") {
    const FieldModel model = build_field_model(make_layout(GridSpec{2, 2, 1.0, true}), HurstParam(0.25));
    const std::string csv = to_csv(sample_path(model, 4, 2));
    CHECK(csv.rfind("# mpfbm v1, nu=2, h=0.25, n=2, corner=1, seed=4, replicate=2\n", 0) == 0);
    CHECK(csv.find("index,coord_1,coord_2,value\n") != std::string::npos);
    CHECK(csv.find("\n3,1,1,") != std::string::npos);
}

TEST_CASE("simulation refuses the non-positive-definite regime") {
    CHECK_THROWS_AS(build_field_model(make_layout(GridSpec{2, 4, 1.0, true}), HurstParam(0.8)),
                    std::invalid_argument);
}

TEST_CASE("psd search on both sides of h = 1/2") {
    const auto ok = psd_search(2, HurstParam(0.4), 20, 3, 20, 5, false);
    CHECK_FALSE(ok.found);
    CHECK(ok.trials == 20);
    CHECK(ok.worst_ratio > -1e-8);
    const auto bad = psd_search(2, HurstParam(0.9), 1000, 3, 30, 5, true);
    CHECK(bad.found);
    CHECK(bad.min_eigenvalue < bad.threshold);
    CHECK(bad.points.size() >= 3);
    // Recheck the certificate independently.
    const auto K = covariance_matrix(bad.points, HurstParam(0.9));
    CHECK(min_eigenvalue(K) < -1e-8 * K.trace() / static_cast<double>(K.rows()));
}
