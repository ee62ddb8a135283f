#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "mpfbm/geometry.hpp"

namespace mpfbm {

struct Metric {
    std::string name;
    std::function<double(const Point&, const Point&)> d;
    // True when balls are intervals in 1-D (allows the exact sweep cover).
    bool interval_balls_1d = false;
};

Metric metric_lambda();     // d_lambda = Lebesgue measure of the symmetric difference
Metric metric_euclidean();  // d_E
Metric metric_dh(double h);

enum class CoverMethod { greedy, exhaustive_1d };
std::string to_string(CoverMethod m);

struct CoveringResult {
    double epsilon = 0.0;
    std::size_t count = 0;
    std::vector<Point> centers;
    CoverMethod method = CoverMethod::greedy;
};

// (2^m)^nu cell-centre points ((i + 1/2) / 2^m per axis), row-major.
std::vector<Point> dyadic_grid(std::size_t nu, unsigned m);

// Farthest-point greedy cover: first centre is domain[0], then repeatedly the
// point farthest from all centres (lowest index on ties) until every point is
// within epsilon. Since centres are pairwise > epsilon apart,
// N(eps) <= count <= packing(eps) <= N(eps/2).
CoveringResult covering_number(const std::vector<Point>& domain, const Metric& metric, double epsilon,
                               unsigned workers = 1);

// Exact minimal cover of a 1-D domain whose metric balls are intervals.
CoveringResult covering_number_1d(const std::vector<Point>& domain, const Metric& metric,
                                  double epsilon);

// Largest distance from a grid point to its nearest axis neighbour.
double grid_resolution(std::size_t nu, unsigned m, const Metric& metric);

// Covers of dyadic_grid(nu, m) for each epsilon; rejects epsilon below
// 2 * grid_resolution so the grid stands in for the continuum.
std::vector<CoveringResult> entropy_sweep(std::size_t nu, unsigned m, const Metric& metric,
                                          const std::vector<double>& epsilons, CoverMethod method,
                                          unsigned workers = 1);

// OLS slope of log N against log(1/eps). Needs >= 5 results over >= one decade.
double entropy_slope(const std::vector<CoveringResult>& results);

struct EquivalenceConstants {
    std::size_t nu = 0;
    double a = 0.0;
    double b = 0.0;
    double m_hat = 0.0;  // empirical inf of delta / |s - t|
    double M_hat = 0.0;  // empirical sup
    bool lower_valid = false;  // false when a = 0: no positive lower bound exists
};

// Empirical extremes of delta(s,t)/|s-t|_2 over `samples` uniform pairs in [a,b]^nu.
// Throws if a = 0 and require_lower is set.
EquivalenceConstants equivalence_constants(std::size_t nu, double a, double b, std::size_t samples,
                                           std::uint64_t seed, bool require_lower = false);

struct Counterexample {
    Point s;
    Point t;
    double delta = 0.0;
    double euclid = 0.0;
};

// s = (2^-n, b, ..., b), t = (b, 2^-n, b, ..., b): delta -> 0 while |s - t| -> sqrt(2) b.
Counterexample compdist_counterexample(std::size_t nu, double b, int n);

}  // namespace mpfbm
