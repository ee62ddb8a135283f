#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "mpfbm/geometry.hpp"
#include "mpfbm/modulus.hpp"
#include "mpfbm/report.hpp"
#include "mpfbm/simulator.hpp"

namespace mpfbm {

// f = sum_i c_i k(t_i, .) in the reproducing kernel Hilbert space of the
// covariance with Hurst index h.
struct RkhsElement {
    double h = 0.0;
    std::vector<Point> anchors;
    std::vector<double> coeffs;

    std::size_t nu() const { return anchors.empty() ? 0 : anchors.front().dim(); }
    void validate() const;

    json to_json() const;
    static RkhsElement from_json(const json& j);
};

// Entry (i,j) = covariance(t_i, t_j, h). Anchors must be distinct.
Eigen::MatrixXd gram(const std::vector<Point>& anchors, double h);

// sqrt(c^T K c), clipped at 0.
double rkhs_norm(const RkhsElement& f);

// (f, g) = c_f^T K(f anchors, g anchors) c_g through the Gram matrix of the
// joined anchor list.
double rkhs_inner(const RkhsElement& f, const RkhsElement& g);

// sum_i c_i covariance(t_i, t, h).
double evaluate(const RkhsElement& f, const Point& t);

// (f, k(t,.)) through rkhs_inner; equals evaluate(f, t) by the reproducing property.
double reproduce(const RkhsElement& f, const Point& t);

// |f(s) - f(t)|^2 <= M^(2h) |s - t|^(2h) |f|^2 per pair.
CheckSummary holder_bound_check(const RkhsElement& f, const std::vector<std::pair<Point, Point>>& pairs,
                                double M_hat);

// A path restricted to [0,r]^nu and read at t = x / r.
struct RescaledPath {
    double r = 0.0;
    double normalizer = 0.0;  // divisor applied to B(rt)
    std::vector<Point> t;
    std::vector<double> values;
};

// t -> B(rt) / (r^(nu h) sqrt(log log 1/r)), 0 < r < 1/e.
RescaledPath rescale_lower(const FieldSample& sample, double r);
// t -> B(rt) / (r^(nu h) psi_upper(r)^(-nu / 2h)), r inside the table.
RescaledPath rescale_upper(const FieldSample& sample, double r, const ModulusTables& tables);

struct TechFlilTerms {
    double lhs = 0.0;     // LL(r)^(h/nu+1/2) |eta_r - f|_inf
    double first = 0.0;   // (s/u)^(nu h) (LL(u)/LL(s))^(h/nu) LL(s)^(h/nu+1/2) |eta_s - f|_inf
    double second = 0.0;  // M^h nu^(h/2) LL(u)^(h/nu+1/2) ((u-s)/u)^h |f|_nu
    double third = 0.0;   // LL(u)^(h/nu+1/2) sqrt(1 - (s/u)^(2 nu h) LL(s)/LL(u)) |f|_inf
    double rhs() const { return first - second - third; }
};

// Pathwise check of
//   LL(r)^(h/nu+1/2) |eta_r - f| >= first - second - third,   LL(x) = log log 1/x,
// for 0 < s < r < u < 1/e, with sups over the sample's points inside [0,x]^nu
// (read at t = x/r, x/s). The scale s set embeds into the scale r set, so
// the inequality holds exactly on the discrete path. Requires
// x -> x^(nu h) sqrt(LL(x)) non-decreasing across s, r, u.
CheckReport techflil_check(const FieldSample& sample, double s, double r, double u, const RkhsElement& f,
                           double M_hat);

}  // namespace mpfbm
