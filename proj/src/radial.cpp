#include "mpfbm/radial.hpp"

#include <cmath>
#include <stdexcept>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace mpfbm {

namespace {
constexpr double step = 1.0 / RadialIntegral::nodes_per_unit;
}

RadialIntegral::RadialIntegral(double alpha) : alpha_(alpha) {
    if (!(alpha > 0.0 && alpha < 2.0)) throw std::invalid_argument("radial integral needs 0 < alpha < 2");
    double fact = 2.0;
    for (int k = 1; k <= 12; ++k) {
        series_c_.push_back((k % 2 == 1 ? 1.0 : -1.0) / (fact * (2.0 * k - alpha)));
        fact *= (2.0 * k + 1.0) * (2.0 * k + 2.0);
    }
    double poch = 1.0;
    for (int k = 0; k < 40; ++k) {
        tail_c_.push_back(poch);
        poch *= 1.0 + alpha + k;
    }
    const int panels = static_cast<int>((table_end - series_end) * nodes_per_unit);
    g_.resize(panels + 1);
    dg_.resize(panels + 1);
    g_[0] = series(series_end);
    dg_[0] = integrand(series_end);
    double quad_err = 0.0;
    auto f = [this](double t) { return integrand(t); };
    for (int j = 0; j < panels; ++j) {
        const double a = series_end + j * step;
        const double b = a + step;
        double err = 0.0;
        const double v = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(f, a, b, 0, 0, &err);
        quad_err += std::abs(err);
        g_[j + 1] = g_[j] + v;
        dg_[j + 1] = integrand(b);
    }
    total_ = g_.back() + tail(table_end);

    // Hermite interpolation error, measured at panel midpoints against direct quadrature.
    double interp_err = 0.0;
    for (int j = 0; j < panels; j += 7) {
        const double a = series_end + j * step;
        const double mid = a + 0.5 * step;
        const double direct =
            g_[j] + boost::math::quadrature::gauss_kronrod<double, 15>::integrate(f, a, mid, 0, 0, nullptr);
        interp_err = std::max(interp_err, std::abs((*this)(mid) - direct));
    }
    error_bound_ = quad_err + 4.0 * interp_err + 1e-15 * total_;
}

double RadialIntegral::integrand(double t) const {
    if (t <= 0.0) return 0.0;
    // 1 - cos t = 2 sin^2(t/2) avoids cancellation for small t.
    const double s = std::sin(0.5 * t);
    return 2.0 * s * s * std::exp((-1.0 - alpha_) * std::log(t));
}

double RadialIntegral::series(double T) const {
    // sum_{k>=1} (-1)^(k+1) T^(2k-alpha) / ((2k)! (2k-alpha)), Horner in T^2.
    const double T2 = T * T;
    double acc = 0.0;
    for (std::size_t k = series_c_.size(); k-- > 0;) acc = acc * T2 + series_c_[k];
    return std::exp((2.0 - alpha_) * std::log(T)) * acc;
}

double RadialIntegral::tail(double T) const {
    // integral_T^inf (1 - cos t) t^(-mu) dt, mu = 1 + alpha, equals
    // T^(-alpha)/alpha - Re[i e^{iT} T^(-mu) sum_k (mu)_k (-i/T)^k]
    //   = T^(-alpha)/alpha + T^(-mu) (cos T * S_odd + sin T * S_even),
    // S_even = sum_{k even} (mu)_k (-1)^(k/2) T^-k, S_odd = sum_{k odd} (mu)_k (-1)^((k+1)/2) T^-k.
    const double inv = 1.0 / T;
    double se = 0.0, so = 0.0, p = 1.0, best = 1e300;
    for (std::size_t k = 0; k < tail_c_.size(); ++k) {
        const double term = tail_c_[k] * p;
        if (term > best) break;  // asymptotic series: stop at the smallest term
        best = term;
        switch (k % 4) {
            case 0: se += term; break;
            case 1: so -= term; break;
            case 2: se -= term; break;
            case 3: so += term; break;
        }
        if (term < 1e-18) break;
        p *= inv;
    }
    const double ta = std::exp(-alpha_ * std::log(T));
    return ta / alpha_ + ta * inv * (std::cos(T) * so + std::sin(T) * se);
}

double RadialIntegral::operator()(double T) const {
    if (!(T > 0.0)) return 0.0;
    if (std::isinf(T)) return total_;
    if (T <= series_end) return series(T);
    if (T >= table_end) return total_ - tail(T);
    const double pos = (T - series_end) * nodes_per_unit;
    auto j = static_cast<std::size_t>(pos);
    if (j >= g_.size() - 1) j = g_.size() - 2;
    const double x = pos - static_cast<double>(j);
    const double x2 = x * x, x3 = x2 * x;
    const double h00 = 2 * x3 - 3 * x2 + 1, h10 = x3 - 2 * x2 + x;
    const double h01 = -2 * x3 + 3 * x2, h11 = x3 - x2;
    return h00 * g_[j] + h10 * step * dg_[j] + h01 * g_[j + 1] + h11 * step * dg_[j + 1];
}

}  // namespace mpfbm
