#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mpfbm/modulus.hpp"
#include "mpfbm/report.hpp"
#include "mpfbm/rkhs.hpp"
#include "mpfbm/simulator.hpp"
#include "mpfbm/small_ball.hpp"

namespace mpfbm {

enum class ModulusKind { lower, upper };
std::string to_string(ModulusKind k);

// Exact simulation layout for a sweep over shrinking corners [0, r_k]^nu: the
// union of one grid_n-per-axis grid per scale, so every scale is resolved by
// its own grid and all scales share one path.
struct ScaleLayout {
    double h = 0.0;
    std::vector<double> scales;                   // strictly decreasing
    std::vector<std::vector<std::size_t>> members;  // layout points inside [0, r_k]^nu
    FieldModel model;
};

ScaleLayout build_scale_layout(double h, std::size_t nu, std::vector<double> scales, std::size_t grid_n,
                               std::size_t budget = default_point_budget);

std::vector<double> dyadic_scales(int k_min, int k_max);  // 2^-k, k = k_min..k_max

// Divisor r^(nu h) * Psi(r): Psi = (log log 1/r)^(-h/nu) or psi_upper(r).
double chung_normalizer(double r, double h, std::size_t nu, ModulusKind kind, const ModulusTables* tables);

struct LilSweep {
    double h = 0.0;
    std::size_t nu = 0;
    ModulusKind kind = ModulusKind::lower;
    std::vector<double> scales;
    std::size_t replicates = 0;
    std::uint64_t seed = 0;
    double burn_in_r = 0.0;                   // liminf proxy uses scales r <= burn_in_r
    std::vector<std::vector<double>> M;       // [replicate][scale]
    std::vector<std::vector<double>> ratios;  // [replicate][scale]
    std::vector<double> liminf_proxy;         // [replicate]

    std::string to_csv() const;  // replicate,k,r,M,ratio
    json summary() const;
};

LilSweep chung_sweep(const ScaleLayout& layout, std::size_t replicates, std::uint64_t seed, ModulusKind kind,
                     const ModulusTables* tables = nullptr, double burn_in_r = 0.0625, unsigned workers = 1);

struct FlilSweep {
    double h = 0.0;
    std::size_t nu = 0;
    ModulusKind kind = ModulusKind::lower;
    double phi_norm = 0.0;
    std::vector<double> scales;
    std::size_t replicates = 0;
    std::uint64_t seed = 0;
    double burn_in_r = 0.0;
    std::vector<std::vector<double>> stat;  // Psi(r)^(-1 - nu/2h) sup |eta_r - phi|
    std::vector<double> min_over_scales;    // post burn-in

    std::string to_csv() const;  // replicate,k,r,stat
    json summary() const;
};

// Rejects |phi|_nu >= 1.
FlilSweep flil_sweep(const ScaleLayout& layout, const RkhsElement& phi, std::size_t replicates,
                     std::uint64_t seed, ModulusKind kind, const ModulusTables* tables = nullptr,
                     double burn_in_r = 0.0625, unsigned workers = 1);

struct HolderEstimate {
    Location location;
    std::vector<double> rho;
    std::vector<double> mean_log_osc;  // per rho, averaged over replicates
    double exponent_pointwise = 0.0;
    double stderr_pointwise = 0.0;
    std::optional<double> exponent_local;  // present when the distance bins allow a fit
    std::pair<double, double> rho_range;
    double deterministic_exponent = 0.0;  // slope of log sup delta^h over the same regions
    std::size_t replicates = 0;
    std::size_t points = 0;

    json to_json() const;
    std::string to_csv() const;  // rho,mean_log_osc
};

// Regression slope of log sup_{s,t in region(rho)} delta(s,t)^h against log rho.
double deterministic_holder_slope(double h, std::size_t nu, const Location& loc, const std::vector<double>& rho,
                                  std::size_t grid_n);

// Pointwise exponent: slope of mean log oscillation of B over region(rho)
// (the corner [0,rho]^nu at the origin, the Euclidean ball otherwise) against
// log rho. Local exponent: slope of mean log |B(t) - B(s)| against log |t - s|
// over pairs inside the smallest region, in log-distance bins.
HolderEstimate holder_exponents(double h, std::size_t nu, const Location& loc, std::vector<double> rho,
                                std::size_t grid_n, std::size_t replicates, std::uint64_t seed,
                                unsigned workers = 1);

}  // namespace mpfbm
