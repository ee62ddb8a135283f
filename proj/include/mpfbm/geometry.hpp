#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <vector>

namespace mpfbm {

// A location in [0,1]^nu. Out-of-range coordinates are rejected, never clamped.
class Point {
public:
    Point() = default;
    explicit Point(std::vector<double> coords);
    Point(std::initializer_list<double> coords);

    static Point filled(std::size_t nu, double value);

    std::size_t dim() const { return c_.size(); }
    double operator[](std::size_t i) const { return c_[i]; }
    std::span<const double> coords() const { return c_; }

    // Throws std::invalid_argument unless dim() == nu.
    void require_dim(std::size_t nu) const;

    friend bool operator==(const Point&, const Point&) = default;

private:
    std::vector<double> c_;
};

enum class Regime { fractional, sheet, non_psd_probe };

class HurstParam {
public:
    explicit HurstParam(double h);
    double value() const { return h_; }
    Regime regime() const;
    // Simulation and small-ball code accept only h <= 1/2.
    void require_kernel_regime() const;

private:
    double h_;
};

// x^p for x >= 0 via exp(p log x), with 0^p = 0 (p > 0).
double pow_nonneg(double x, double p);

double rect_volume(const Point& t);
double rect_volume(const Point& t, std::size_t nu);

// Lebesgue measure of [0,s] symmetric-difference [0,t]. The two one-sided
// differences are expanded as telescoping sums so that nearby points keep
// full relative precision.
double sym_diff_measure(const Point& s, const Point& t);

double covariance(const Point& s, const Point& t, HurstParam h);

// d_h(s,t) = sym_diff_measure(s,t)^h. A pseudo-metric on points (rectangles
// with a zero side all coincide), a metric on rectangles. h = 1 gives d_lambda.
double dist_h(const Point& s, const Point& t, double h);

double euclidean(const Point& s, const Point& t);

// Raw-coordinate kernels used in hot loops; no validation.
namespace raw {
double rect_volume(std::span<const double> t);
double sym_diff(std::span<const double> s, std::span<const double> t);
double covariance(std::span<const double> s, std::span<const double> t, double h);
}  // namespace raw

}  // namespace mpfbm
