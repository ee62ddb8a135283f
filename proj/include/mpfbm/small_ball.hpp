#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "mpfbm/geometry.hpp"
#include "mpfbm/simulator.hpp"

namespace mpfbm {

enum class LocationKind { origin, interior };

struct Location {
    LocationKind kind = LocationKind::origin;
    Point center;  // unused for the origin

    static Location origin() { return {}; }
    static Location interior(Point c) { return {LocationKind::interior, std::move(c)}; }
    std::string label() const;
};

struct SmallBallEstimate {
    double r = 0.0;
    double epsilon = 0.0;
    Location location;
    double p_hat = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
    std::size_t successes = 0;
    std::size_t replicates = 0;
    std::size_t grid_n = 0;
    // 0 < p_hat < 1 and p_hat >= 10 / replicates.
    bool informative = false;
};

enum class FitAxis { epsilon, r };

struct ScalingFit {
    FitAxis axis = FitAxis::epsilon;
    double slope = 0.0;
    double stderr_slope = 0.0;
    std::vector<std::pair<double, double>> points;  // (log x, log(-log p_hat))
};

// Points of the region: for the origin the grid i*r/(grid_n-1) on [0,r]^nu;
// for an interior centre the grid over the box of half-width r, restricted
// to the closed Euclidean ball.
std::vector<Point> region_points(std::size_t nu, const Location& loc, double r, std::size_t grid_n);

// Per-replicate sups of |B| over the region at each radius. All radii share
// one simulation on the union of their region grids, so the sups are nested
// (common random numbers across radii and thresholds).
struct SupPool {
    double h = 0.0;
    std::size_t nu = 0;
    Location location;
    std::size_t grid_n = 0;
    std::size_t replicates = 0;
    std::uint64_t seed = 0;
    std::vector<double> radii;              // ascending
    std::vector<std::vector<double>> sups;  // [radius][replicate]
    std::size_t points = 0;
    double jitter_relative = 0.0;
};

SupPool simulate_sup_pool(double h, std::size_t nu, const Location& loc, std::vector<double> radii,
                          std::size_t grid_n, std::size_t replicates, std::uint64_t seed,
                          unsigned workers = 1, std::size_t budget = default_point_budget);

SmallBallEstimate estimate_from_pool(const SupPool& pool, std::size_t radius_index, double epsilon);

SmallBallEstimate estimate_small_ball(double h, std::size_t nu, double r, double epsilon,
                                      const Location& loc, std::size_t grid_n, std::size_t replicates,
                                      std::uint64_t seed, unsigned workers = 1);

// `count` thresholds log-spaced between the pool's empirical sup quantiles
// at levels p_low and p_high.
std::vector<double> informative_epsilons(const SupPool& pool, std::size_t radius_index, std::size_t count,
                                         double p_low, double p_high);

// Slope of log(-log p) against log(1/eps). Needs >= 5 informative estimates
// at one r spanning >= half a decade of eps.
ScalingFit fit_eps_exponent(const std::vector<SmallBallEstimate>& estimates);

// Slope of log(-log p) against log r. Needs >= 4 informative estimates at one eps.
ScalingFit fit_r_exponent(const std::vector<SmallBallEstimate>& estimates);

// Radii bracketing the informative window for a fixed threshold: a pilot
// pool over `levels` log-spaced radii in [r_min, r_max]; returns the log-
// interpolated radii where p_hat crosses p_high and p_low.
std::pair<double, double> bracket_radii(double h, std::size_t nu, const Location& loc, double epsilon,
                                        double r_min, double r_max, std::size_t levels,
                                        std::size_t grid_n, std::size_t replicates, std::uint64_t seed,
                                        double p_low, double p_high, unsigned workers = 1);

std::vector<double> log_space(double lo, double hi, std::size_t count);

}  // namespace mpfbm
