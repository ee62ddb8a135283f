#include "mpfbm/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace mpfbm {

namespace {

void check_coords(const std::vector<double>& c) {
    if (c.empty()) throw std::invalid_argument("point must have dimension >= 1");
    for (double x : c) {
        if (!(x >= 0.0 && x <= 1.0))
            throw std::invalid_argument("point coordinate outside [0,1]: " + std::to_string(x));
    }
}

void check_same_dim(const Point& s, const Point& t) {
    if (s.dim() != t.dim())
        throw std::invalid_argument("dimension mismatch: " + std::to_string(s.dim()) + " vs " +
                                    std::to_string(t.dim()));
}

// prod(a) - prod(m) where m_i = min(a_i, b_i) <= a_i, as
// sum_i (a_i - m_i) * prod_{j<i} m_j * prod_{j>i} a_j.
double one_sided(std::span<const double> a, std::span<const double> b) {
    const std::size_t nu = a.size();
    double suffix[16];
    std::vector<double> big;
    double* suf = suffix;
    if (nu + 1 > 16) {
        big.resize(nu + 1);
        suf = big.data();
    }
    suf[nu] = 1.0;
    for (std::size_t i = nu; i-- > 0;) suf[i] = suf[i + 1] * a[i];
    double prefix = 1.0;
    double sum = 0.0;
    for (std::size_t i = 0; i < nu; ++i) {
        const double m = std::min(a[i], b[i]);
        const double d = a[i] - m;
        if (d != 0.0) sum += d * prefix * suf[i + 1];
        prefix *= m;
    }
    return sum;
}

}  // namespace

Point::Point(std::vector<double> coords) : c_(std::move(coords)) { check_coords(c_); }

Point::Point(std::initializer_list<double> coords) : c_(coords) { check_coords(c_); }

Point Point::filled(std::size_t nu, double value) { return Point(std::vector<double>(nu, value)); }

void Point::require_dim(std::size_t nu) const {
    if (dim() != nu)
        throw std::invalid_argument("point has dimension " + std::to_string(dim()) + ", expected " +
                                    std::to_string(nu));
}

HurstParam::HurstParam(double h) : h_(h) {
    if (!(h > 0.0 && h <= 1.0)) throw std::invalid_argument("Hurst parameter must lie in (0,1]");
}

Regime HurstParam::regime() const {
    if (h_ < 0.5) return Regime::fractional;
    if (h_ == 0.5) return Regime::sheet;
    return Regime::non_psd_probe;
}

void HurstParam::require_kernel_regime() const {
    if (h_ > 0.5)
        throw std::invalid_argument("h > 1/2 is only accepted by the positive-definiteness probe");
}

double pow_nonneg(double x, double p) {
    if (x <= 0.0) return 0.0;
    return std::exp(p * std::log(x));
}

namespace raw {

double rect_volume(std::span<const double> t) {
    double v = 1.0;
    for (double x : t) v *= x;
    return v;
}

double sym_diff(std::span<const double> s, std::span<const double> t) {
    const double d = one_sided(s, t) + one_sided(t, s);
    return d > 0.0 ? d : 0.0;
}

double covariance(std::span<const double> s, std::span<const double> t, double h) {
    const double p = 2.0 * h;
    return 0.5 * (pow_nonneg(rect_volume(s), p) + pow_nonneg(rect_volume(t), p) -
                  pow_nonneg(sym_diff(s, t), p));
}

}  // namespace raw

double rect_volume(const Point& t) { return raw::rect_volume(t.coords()); }

double rect_volume(const Point& t, std::size_t nu) {
    t.require_dim(nu);
    return raw::rect_volume(t.coords());
}

double sym_diff_measure(const Point& s, const Point& t) {
    check_same_dim(s, t);
    return raw::sym_diff(s.coords(), t.coords());
}

double covariance(const Point& s, const Point& t, HurstParam h) {
    check_same_dim(s, t);
    return raw::covariance(s.coords(), t.coords(), h.value());
}

double dist_h(const Point& s, const Point& t, double h) {
    if (!(h > 0.0 && h <= 1.0)) throw std::invalid_argument("dist_h requires 0 < h <= 1");
    return pow_nonneg(sym_diff_measure(s, t), h);
}

double euclidean(const Point& s, const Point& t) {
    check_same_dim(s, t);
    double acc = 0.0;
    for (std::size_t i = 0; i < s.dim(); ++i) {
        const double d = s[i] - t[i];
        acc += d * d;
    }
    return std::sqrt(acc);
}

}  // namespace mpfbm
