#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "mpfbm/geometry.hpp"
#include "mpfbm/radial.hpp"
#include "mpfbm/report.hpp"

namespace mpfbm {

// Tensor Haar basis of L^2([0,1]^nu) up to level L, ordered coarse first.
// 1-D factors: index 0 is the constant, then psi_{j,k} for j = 0..L-1,
// k = 0..2^j-1; a tensor function's scale is the largest factor scale.
class HaarBasis {
public:
    HaarBasis(std::size_t nu, unsigned level, std::size_t n = 0);  // n = 0 keeps all 2^(L nu)

    std::size_t nu() const { return nu_; }
    unsigned level() const { return level_; }
    std::size_t size() const { return funcs_.size(); }

    // Coefficients of the indicator of [0,t].
    std::vector<double> rect_coeffs(const Point& t) const;
    // Coefficients of the indicator of [0,s] sym-diff [0,t] = 1_s + 1_t - 2 * 1_{s min t}.
    std::vector<double> increment_coeffs(const Point& s, const Point& t) const;

private:
    double primitive(std::size_t f1d, double t) const;

    std::size_t nu_;
    unsigned level_;
    std::vector<std::vector<std::size_t>> funcs_;  // per basis function, 1-D factor indices
};

struct SpectralConfig {
    std::size_t nu = 2;       // dimension of the parameter space for rectangle increments
    unsigned level = 1;       // Haar level L
    std::size_t n = 0;        // ambient dimension; 0 = 2^(L nu)
    double alpha = 1.2;       // stability index, 4h
    std::size_t sphere_samples = 100000;
    std::uint64_t seed = 1;
    std::vector<double> weights;  // empty = 1/j
};

// Finite analogue of (H, E, mu): H = span of the first n Haar functions with
// CONS h_j, E = R^n with S h_j = lambda_j x_j. The Levy measure of the
// alpha-stable law with characteristic function exp(-|S xi|^alpha / 2) is
//   Delta(B) = int dr / r^(1+alpha) int 1_B(r y) sigma(dy),
//   sigma = calibration * E_theta[ |Lambda theta|^alpha delta_{Lambda theta / |Lambda theta|} ],
// theta uniform on the unit sphere of R^n, realised by `sphere_samples`
// fixed draws. Then 2 int (1 - cos<xi,x>) Delta(dx)
//   = 2 calibration C_alpha E|<Lambda xi, theta>|^alpha,
// and calibration = 1 / (2 C_alpha m_alpha(n)) with
// m_alpha(n) = E|theta_1|^alpha = Gamma(n/2) Gamma((alpha+1)/2) / (sqrt(pi) Gamma((n+alpha)/2)),
// C_alpha = G(infinity) from RadialIntegral. In n = 1 this is exact.
struct SpectralModel {
    std::size_t n = 0;
    std::vector<double> weights;
    double alpha = 0.0;
    double calibration = 0.0;  // normalisation of sigma
    double sigma_mass = 0.0;   // sigma(unit sphere) under the stored draws
    double spherical_moment = 0.0;  // m_alpha(n)
    std::uint64_t seed = 0;
    std::optional<HaarBasis> basis;
    std::vector<double> theta;      // sphere_samples x n, row-major
    std::vector<double> stretch;    // |Lambda theta_i|
    std::shared_ptr<const RadialIntegral> radial;

    std::size_t samples() const { return stretch.size(); }
};

SpectralModel make_spectral_model(const SpectralConfig& cfg);

// Gamma(n/2) Gamma((alpha+1)/2) / (sqrt(pi) Gamma((n+alpha)/2)).
double spherical_moment(std::size_t n, double alpha);

// Stores h-coordinates v = S xi (coordinates of S xi in the CONS of H), so that
// <xi, x>_E = <v, Lambda^{-1} x> and |S xi|_H = |v|.
struct TestFunction {
    enum class Kind { raw, rect_increment };
    Kind kind = Kind::raw;
    std::vector<double> xi;      // raw kind: the E* vector
    std::vector<double> coeffs;  // h-coordinates
    std::optional<Point> s, t;
    double projection_residual = 0.0;  // delta(s,t) - |coeffs|^2 for rectangle increments

    static TestFunction raw(const SpectralModel& model, std::vector<double> xi);
    static TestFunction rect_increment(const SpectralModel& model, const Point& s, const Point& t);
    static TestFunction from_coeffs(std::vector<double> coeffs);

    double h_norm() const;
};

// Draws X = sqrt(A) G: A positive (alpha/2)-stable with E exp(-sA) = exp(-s^(alpha/2))
// (Kanter's representation of the Chambers-Mallows-Stuck sampler), G centred
// Gaussian with covariance 2^(1 - 2/alpha) diag(lambda_j^2). Then
// E exp(i<xi,X>) = exp(-(2^(-2/alpha) |Lambda xi|^2)^(alpha/2)) = exp(-|Lambda xi|^alpha / 2).
std::vector<std::vector<double>> sample_stable(const SpectralModel& model, std::size_t count,
                                               std::uint64_t seed);

// Positive beta-stable variate, 0 < beta < 1, Laplace transform exp(-s^beta).
double positive_stable(double beta, double v_uniform, double w_exponential);

struct Region {
    enum class Kind { all, ball, complement, band };
    Kind kind = Kind::all;
    double a = 0.0;  // ball: |x| < a; band: a <= |x| < b
    double b = 0.0;  // complement: |x| > b

    static Region all() { return {}; }
    static Region ball(double x) { return {Kind::ball, x, 0.0}; }
    static Region complement(double b) { return {Kind::complement, 0.0, b}; }
    static Region band(double a, double b) { return {Kind::band, a, b}; }
    std::string label() const;
};

struct LevyValue {
    double value = 0.0;
    double quad_error = 0.0;  // propagated radial-quadrature bound
    double mc_stderr = 0.0;   // spread over the stored spherical draws
};

// int_region (1 - cos<xi, x>) Delta(dx).
LevyValue levy_integral(const SpectralModel& model, const TestFunction& f, const Region& region);

struct SpecRepEntry {
    std::vector<double> coeffs;
    double lhs = 0.0;  // 2 * levy_integral(all)
    double rhs = 0.0;  // |S f|^alpha
    double relative_error = 0.0;
};

struct SpecRepReport {
    double tolerance = 0.0;
    double worst_relative_error = 0.0;
    std::vector<SpecRepEntry> entries;
    bool pass = false;
    json to_json() const;
};

SpecRepReport verify_spec_rep(const SpectralModel& model, const std::vector<TestFunction>& tests,
                              double tol);

// Unit-norm directions of the rectangle increments phi_{s,t} for all
// unordered pairs of the grid ((i+1)/per_axis)^nu, zero functions dropped,
// duplicate directions (up to sign) merged. A grid sup over these is a lower
// bound for the sup over A(1).
struct DirectionSet {
    std::vector<std::vector<double>> units;
    std::size_t pairs = 0;
    std::size_t per_axis = 0;
};

DirectionSet pair_grid_directions(const SpectralModel& model, std::size_t per_axis = 8);

// F(x) = max over directions of int_{|y| < x} (1 - cos<u, y>) Delta(dy), u unit.
double eval_F(const SpectralModel& model, const DirectionSet& dirs, double x, unsigned workers = 1);

// F at `points` log-spaced x in [x_min, x_max]; evaluated between nodes by
// linear interpolation in log x and inverted by bisection on that interpolant.
class FTable {
public:
    FTable() = default;
    FTable(std::vector<double> x, std::vector<double> F);

    double operator()(double x) const;
    double inverse(double target) const;  // throws std::out_of_range outside (F_min, F_max)
    bool strictly_increasing() const;
    double x_min() const { return x_.front(); }
    double x_max() const { return x_.back(); }
    double F_min() const { return F_.front(); }
    double F_max() const { return F_.back(); }
    const std::vector<double>& xs() const { return x_; }
    const std::vector<double>& values() const { return F_; }
    std::string to_csv() const;

private:
    std::vector<double> x_, F_;
};

FTable tabulate_F(const SpectralModel& model, const DirectionSet& dirs, double x_min, double x_max,
                  std::size_t points = 512, unsigned workers = 1);

// The constant of the tail bound int_{|x|>b} (1 - cos) dDelta <= 2 sigma(S) b^(-alpha) / alpha.
double tail_constant(const SpectralModel& model);

struct TruncationReport {
    CheckReport small_jumps;  // int_{|x|<a} <= |phi|^alpha F(a |phi|)
    CheckReport large_jumps;  // int_{|x|>b} <= C b^(-alpha)
    bool pass() const { return small_jumps.pass && large_jumps.pass; }
};

TruncationReport truncation_bounds_check(const SpectralModel& model, const DirectionSet& dirs,
                                         const TestFunction& f, double a, double b,
                                         unsigned workers = 1);

}  // namespace mpfbm
