#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mpfbm/geometry.hpp"

namespace mpfbm {

inline constexpr std::size_t default_point_budget = 4096;

class NotPositiveSemiDefinite : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class BudgetExceeded : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Regular grid on [0,corner]^nu: i*corner/(n-1), i = 0..n-1, or i*corner/n,
// i = 1..n when the origin is excluded. Points are row-major (last axis fastest).
struct GridSpec {
    std::size_t nu = 1;
    std::size_t n = 2;
    double corner = 1.0;
    bool include_origin = true;

    std::size_t size() const;
    std::vector<double> axis() const;
    std::vector<Point> points() const;
    void validate(std::size_t budget = default_point_budget) const;
};

// Points a sample is drawn on. Grid samples carry their GridSpec; unions of
// nested grids (multi-resolution layouts) carry only the point list.
struct Layout {
    std::vector<Point> points;
    std::optional<GridSpec> grid;
    std::string description;

    std::size_t nu() const { return points.empty() ? 0 : points.front().dim(); }
};

Layout make_layout(const GridSpec& grid, std::size_t budget = default_point_budget);
Layout make_layout(std::vector<Point> points, std::string description,
                   std::size_t budget = default_point_budget);

// Union of the grids, exact duplicates removed, in first-seen order.
Layout union_layout(const std::vector<std::vector<Point>>& parts, std::string description,
                    std::size_t budget = default_point_budget);

Eigen::MatrixXd covariance_matrix(const std::vector<Point>& pts, HurstParam h);
Eigen::MatrixXd covariance_matrix(const GridSpec& grid, HurstParam h,
                                  std::size_t budget = default_point_budget);

struct Factor {
    Eigen::MatrixXd lower;            // factor of the active block
    std::vector<std::size_t> active;  // rows with nonzero variance
    std::size_t dim = 0;              // full matrix size
    double jitter = 0.0;              // absolute diagonal shift used
    double jitter_relative = 0.0;     // jitter / (trace / active size)
};

// Cholesky with the jitter ladder 0, {1e-12, ..., 1e-8} * trace / n. Rows
// whose diagonal is exactly zero (the origin, the axes) are pinned to zero
// and left out of the factorization.
Factor factorize(const Eigen::MatrixXd& matrix);

double min_eigenvalue(const Eigen::MatrixXd& matrix);

struct FieldSample {
    std::shared_ptr<const Layout> layout;
    double h = 0.0;
    std::vector<double> values;
    std::uint64_t seed = 0;
    std::uint64_t replicate = 0;
    double jitter_relative = 0.0;
};

// Factorization of a layout's covariance, reusable across replicates.
struct FieldModel {
    std::shared_ptr<const Layout> layout;
    double h = 0.0;
    Factor factor;
};

FieldModel build_field_model(Layout layout, HurstParam h);

// One replicate: values = L z, z standard normals from stream split(seed, replicate).
FieldSample sample_path(const FieldModel& model, std::uint64_t seed, std::uint64_t replicate);

// Replicates 0..count-1; identical for every worker count.
std::vector<FieldSample> sample_paths(const FieldModel& model, std::size_t count, std::uint64_t seed,
                                      unsigned workers = 1);

// max |B| over points of the sample inside [0, sub_corner]^nu.
double sup_norm(const FieldSample& sample, double sub_corner);

// CSV: header line, then index,coord_1..coord_nu,value with round-trip precision.
std::string to_csv(const FieldSample& sample);

struct PsdSearchResult {
    bool found = false;
    std::size_t trials = 0;
    double min_eigenvalue = 0.0;  // of the certified (or most negative) grid
    double threshold = 0.0;       // -1e-8 * trace / n of that grid
    double worst_ratio = 0.0;     // min over grids of min_eigenvalue / (trace / n)
    std::vector<Point> points;
};

// Random point sets of size in [min_points, max_points] in [0,1]^nu. With
// stop_at_first, stops at the first grid whose min eigenvalue is below
// -1e-8 * trace / n; otherwise scans all grids and reports the worst ratio.
PsdSearchResult psd_search(std::size_t nu, HurstParam h, std::size_t max_grids, std::size_t min_points,
                           std::size_t max_points, std::uint64_t seed, bool stop_at_first);

}  // namespace mpfbm
