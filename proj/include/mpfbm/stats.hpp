#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace mpfbm {

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double stderr_slope = 0.0;
    std::size_t points = 0;
};

// Ordinary least squares y = intercept + slope * x, unweighted.
LinearFit ols(std::span<const double> x, std::span<const double> y);

struct Interval {
    double low = 0.0;
    double high = 0.0;
};

// Wilson score interval; z = 1.959963984540054 gives 95%.
Interval wilson(std::size_t successes, std::size_t trials, double z = 1.959963984540054);

// Linear-interpolation quantile (type 7) of an unsorted sample.
double quantile(std::vector<double> values, double q);

double mean(std::span<const double> v);

}  // namespace mpfbm
