#pragma once

#include <vector>

namespace mpfbm {

// G(T) = integral over (0, T) of (1 - cos t) t^(-1-alpha) dt for 0 < alpha < 2.
//
// Power series below T = 0.5 (integrates the t^(1-alpha) singularity
// exactly), cumulative Gauss-Kronrod panels with a cubic Hermite table on
// [0.5, 64] (G' is known exactly at the nodes), and the asymptotic
// expansion of the oscillatory tail above 64. total() = G(infinity) is the
// same construction run to infinity, not a closed form.
class RadialIntegral {
public:
    explicit RadialIntegral(double alpha);

    double alpha() const { return alpha_; }
    double total() const { return total_; }
    double operator()(double T) const;
    // Integrand (1 - cos t) t^(-1-alpha).
    double integrand(double t) const;
    // Bound on |G_computed - G| for any T: summed panel error estimates plus
    // the measured Hermite interpolation error.
    double error_bound() const { return error_bound_; }

    static constexpr double series_end = 0.5;
    static constexpr double table_end = 64.0;
    static constexpr int nodes_per_unit = 64;

private:
    double series(double T) const;
    double tail(double T) const;  // integral over (T, infinity)

    double alpha_;
    double total_ = 0.0;
    double error_bound_ = 0.0;
    std::vector<double> g_;   // G at nodes
    std::vector<double> dg_;  // G' at nodes
    std::vector<double> series_c_;  // G(T) = T^(2-alpha) sum_k series_c_[k] T^(2k), T <= series_end
    std::vector<double> tail_c_;    // (1+alpha)_k, Pochhammer
};

}  // namespace mpfbm
