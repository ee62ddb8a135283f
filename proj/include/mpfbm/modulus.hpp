#pragma once

#include <cstddef>
#include <vector>

#include "mpfbm/report.hpp"
#include "mpfbm/spectral.hpp"

namespace mpfbm {

// eps_k = F^{-1}((log k)^(-2h/nu - 2 eta)), r_{k+1} = r_k F(eps_k)^(1/(2 nu h)) eps_{k+1}^(2/nu),
// a_k = r_k^(-nu/2) eps_k, psi(r_k) = (log k)^(-h/nu), for k = k0 .. k0 + K - 1 with r_{k0} = 1.
//
// k0 is the first index at which the recursion contracts (every step factor
// below 1, which then holds for all larger k since eps_k and F(eps_k) both
// decrease); below it the F levels are either outside F's range or force
// r_{k+1} > r_k. Scales are stored as logarithms: r_k underflows long
// before the table ends.
struct ModulusTables {
    double h = 0.0;
    std::size_t nu = 0;
    double eta = 0.0;
    std::size_t k0 = 0;
    std::vector<double> eps;    // eps_k
    std::vector<double> F_eps;  // F(eps_k) from the table interpolant
    std::vector<double> log_r;  // log r_k
    std::vector<double> log_a;  // log a_k
    std::vector<double> psi;    // (log k)^(-h/nu)

    std::size_t size() const { return eps.size(); }
    std::size_t index_of(std::size_t k) const;  // k -> table row
    double r(std::size_t row) const;
    double r_min() const;
    double r_max() const { return 1.0; }
    bool covers(double r) const;
    // Increasing interpolant through (r_k, psi_k), linear in log r.
    double psi_upper(double r) const;
    double psi_upper_log(double log_r) const;
};

ModulusTables build_modulus(const FTable& F, double h, std::size_t nu, double eta, std::size_t K);
// As build_modulus, stopping at the first row with r_k <= r_target (at least
// 3 rows); throws when K_max rows do not get there.
ModulusTables build_modulus_covering(const FTable& F, double h, std::size_t nu, double eta, double r_target,
                                     std::size_t K_max);

// (log log 1/r)^(-h/nu), 0 < r < 1/e.
double psi_lower(double r, double h, std::size_t nu);

struct ModulusAudit {
    bool psi_exact = false;           // psi(r_k) = (log k)^(-h/nu)
    bool r_decreasing = false;
    bool divergence = false;          // a_{k+1} r_k^(nu/2) >= F(eps_k)^(-1/(4h))
    bool dominates_lower = false;     // psi_upper >= psi_lower wherever both are defined on the table
    bool ratio_increasing = false;    // (log k)^(h/nu) / sqrt(-F log F) increasing
    std::size_t lower_checked = 0;
    std::size_t lower_violations = 0;
    double first_violation_r = 0.0;
    double worst_log_gap = 0.0;       // max of log(psi_lower / psi_upper) over checked r
    double worst_divergence_gap = 0.0;
    bool pass() const { return psi_exact && r_decreasing && divergence && dominates_lower; }
    json to_json() const;
};

ModulusAudit audit_modulus(const ModulusTables& t);

struct BandReport {
    std::size_t k = 0;
    double r_k = 0.0;
    double a_k = 0.0;
    double a_k1 = 0.0;
    double constant = 0.0;  // C = 2 max(1, 2 sigma(S) / alpha)
    CheckSummary per_pair{"band_variance"};
    CheckSummary partition{"band_partition"};  // band + outside = all, exactly
    CheckSummary identity{"band_sum_identity"};  // 2 levy(all) = |phi|^alpha up to MC error
    CheckReport sup_bound;  // D_k^2 <= 2 C r_k^(2 nu h) F(eps_k)
    bool pass() const { return per_pair.pass() && partition.pass() && identity.pass() && sup_bound.pass; }
    json to_json() const;
};

// Pairs (s,t) must lie in [0, r_k]^nu. Variances carry the
// factor 2 of the increment variance: Var(B~_s - B~_t) = 2 [levy(ball(a_k)) +
// levy(complement(a_{k+1}))], Var(B^k increment) = 2 levy(band(a_k, a_{k+1})).
BandReport band_variance_check(const SpectralModel& model, const DirectionSet& dirs,
                               const ModulusTables& tables, std::size_t k, double h,
                               const std::vector<std::pair<Point, Point>>& pairs, unsigned workers = 1);

// Unordered pairs of the grid ((i+1) r / per_axis)^nu.
std::vector<std::pair<Point, Point>> corner_pairs(std::size_t nu, std::size_t per_axis, double r);

}  // namespace mpfbm
