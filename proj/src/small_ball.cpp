#include "mpfbm/small_ball.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "mpfbm/parallel.hpp"
#include "mpfbm/stats.hpp"

namespace mpfbm {

std::string Location::label() const {
    if (kind == LocationKind::origin) return "origin";
    std::string s = "interior(";
    for (std::size_t i = 0; i < center.dim(); ++i) {
        if (i) s += ";";
        char buf[32];
        std::snprintf(buf, sizeof buf, "%g", center[i]);
        s += buf;
    }
    return s + ")";
}

namespace {

void check_region(std::size_t nu, const Location& loc, double r) {
    if (!(r > 0.0 && r <= 1.0)) throw std::invalid_argument("small-ball: radius must lie in (0,1]");
    if (loc.kind == LocationKind::interior) {
        loc.center.require_dim(nu);
        for (double c : loc.center.coords()) {
            if (!(c - r > 0.0))
                throw std::invalid_argument("small-ball: interior ball must stay inside (0,inf)^nu");
            if (c + r > 1.0) throw std::invalid_argument("small-ball: interior ball leaves [0,1]^nu");
        }
    }
}

bool inside(const Point& p, const Location& loc, double r) {
    const double lim = r * (1.0 + 1e-12);
    if (loc.kind == LocationKind::origin) {
        for (double c : p.coords())
            if (c > lim) return false;
        return true;
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < p.dim(); ++i) acc += (p[i] - loc.center[i]) * (p[i] - loc.center[i]);
    return std::sqrt(acc) <= lim;
}

}  // namespace

std::vector<double> log_space(double lo, double hi, std::size_t count) {
    if (count == 1) return {lo};
    std::vector<double> v(count);
    for (std::size_t i = 0; i < count; ++i)
        v[i] = std::exp(std::log(lo) + (std::log(hi) - std::log(lo)) * static_cast<double>(i) /
                                           static_cast<double>(count - 1));
    v.front() = lo;
    v.back() = hi;
    return v;
}

std::vector<Point> region_points(std::size_t nu, const Location& loc, double r, std::size_t grid_n) {
    check_region(nu, loc, r);
    if (grid_n < 2) throw std::invalid_argument("small-ball: grid_n must be >= 2");
    if (loc.kind == LocationKind::origin) return GridSpec{nu, grid_n, r, true}.points();
    std::vector<double> ax(grid_n);
    for (std::size_t i = 0; i < grid_n; ++i)
        ax[i] = -r + 2.0 * r * static_cast<double>(i) / static_cast<double>(grid_n - 1);
    std::vector<Point> pts;
    std::size_t total = 1;
    for (std::size_t d = 0; d < nu; ++d) total *= grid_n;
    std::vector<double> c(nu);
    for (std::size_t k = 0; k < total; ++k) {
        std::size_t rem = k;
        double acc = 0.0;
        for (std::size_t d = nu; d-- > 0;) {
            const double off = ax[rem % grid_n];
            rem /= grid_n;
            c[d] = loc.center[d] + off;
            acc += off * off;
        }
        if (std::sqrt(acc) <= r * (1.0 + 1e-12)) pts.emplace_back(c);
    }
    return pts;
}

SupPool simulate_sup_pool(double h, std::size_t nu, const Location& loc, std::vector<double> radii,
                          std::size_t grid_n, std::size_t replicates, std::uint64_t seed,
                          unsigned workers, std::size_t budget) {
    if (!(h > 0.0 && h < 0.5)) throw std::invalid_argument("small-ball: requires 0 < h < 1/2");
    if (replicates < 100) throw std::invalid_argument("small-ball: replicates must be >= 100");
    if (radii.empty()) throw std::invalid_argument("small-ball: no radii");
    std::sort(radii.begin(), radii.end());
    std::vector<std::vector<Point>> parts;
    for (double r : radii) parts.push_back(region_points(nu, loc, r, grid_n));
    Layout layout = union_layout(parts, "small-ball " + loc.label(), budget);

    std::vector<std::vector<std::size_t>> members(radii.size());
    for (std::size_t j = 0; j < radii.size(); ++j) {
        for (std::size_t i = 0; i < layout.points.size(); ++i)
            if (inside(layout.points[i], loc, radii[j])) members[j].push_back(i);
        if (members[j].empty()) throw std::invalid_argument("small-ball: degenerate region");
    }

    const FieldModel model = build_field_model(std::move(layout), HurstParam(h));
    SupPool pool;
    pool.h = h;
    pool.nu = nu;
    pool.location = loc;
    pool.grid_n = grid_n;
    pool.replicates = replicates;
    pool.seed = seed;
    pool.radii = radii;
    pool.points = model.layout->points.size();
    pool.jitter_relative = model.factor.jitter_relative;
    pool.sups.assign(radii.size(), std::vector<double>(replicates, 0.0));
    parallel_for(replicates, workers, [&](std::size_t rep) {
        const FieldSample s = sample_path(model, seed, rep);
        for (std::size_t j = 0; j < members.size(); ++j) {
            double m = 0.0;
            for (std::size_t i : members[j]) m = std::max(m, std::abs(s.values[i]));
            pool.sups[j][rep] = m;
        }
    });
    return pool;
}

SmallBallEstimate estimate_from_pool(const SupPool& pool, std::size_t radius_index, double epsilon) {
    if (radius_index >= pool.radii.size()) throw std::out_of_range("estimate_from_pool: bad radius index");
    if (!(epsilon >= 0.0)) throw std::invalid_argument("small-ball: epsilon must be >= 0");
    SmallBallEstimate e;
    e.r = pool.radii[radius_index];
    e.epsilon = epsilon;
    e.location = pool.location;
    e.replicates = pool.replicates;
    e.grid_n = pool.grid_n;
    for (double s : pool.sups[radius_index])
        if (s <= epsilon) ++e.successes;
    e.p_hat = static_cast<double>(e.successes) / static_cast<double>(e.replicates);
    const Interval ci = wilson(e.successes, e.replicates);
    e.ci_low = ci.low;
    e.ci_high = ci.high;
    e.informative = e.p_hat > 0.0 && e.p_hat < 1.0 &&
                    e.successes >= 10;  // p_hat >= 10 / replicates
    return e;
}

SmallBallEstimate estimate_small_ball(double h, std::size_t nu, double r, double epsilon,
                                      const Location& loc, std::size_t grid_n, std::size_t replicates,
                                      std::uint64_t seed, unsigned workers) {
    const SupPool pool = simulate_sup_pool(h, nu, loc, {r}, grid_n, replicates, seed, workers);
    return estimate_from_pool(pool, 0, epsilon);
}

std::vector<double> informative_epsilons(const SupPool& pool, std::size_t radius_index, std::size_t count,
                                         double p_low, double p_high) {
    if (!(p_low > 0.0 && p_low < p_high && p_high < 1.0))
        throw std::invalid_argument("informative_epsilons: need 0 < p_low < p_high < 1");
    const auto& sups = pool.sups.at(radius_index);
    const double lo = quantile(sups, p_low);
    const double hi = quantile(sups, p_high);
    return log_space(lo, hi, count);
}

namespace {

ScalingFit fit_common(const std::vector<SmallBallEstimate>& est, FitAxis axis, std::size_t min_points) {
    ScalingFit fit;
    fit.axis = axis;
    std::vector<double> x, y;
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (const auto& e : est) {
        if (!e.informative) continue;
        const double v = axis == FitAxis::epsilon ? std::log(1.0 / e.epsilon) : std::log(e.r);
        x.push_back(v);
        y.push_back(std::log(-std::log(e.p_hat)));
        fit.points.emplace_back(v, y.back());
        const double arg = axis == FitAxis::epsilon ? e.epsilon : e.r;
        lo = std::min(lo, arg);
        hi = std::max(hi, arg);
    }
    if (x.size() < min_points)
        throw std::invalid_argument("scaling fit: only " + std::to_string(x.size()) +
                                    " informative estimates, need " + std::to_string(min_points));
    if (axis == FitAxis::epsilon && hi / lo < std::sqrt(10.0) * (1.0 - 1e-12))
        throw std::invalid_argument("scaling fit: informative epsilons span " + std::to_string(hi / lo) +
                                    "x, need half a decade");
    const LinearFit lf = ols(x, y);
    fit.slope = lf.slope;
    fit.stderr_slope = lf.stderr_slope;
    return fit;
}

}  // namespace

ScalingFit fit_eps_exponent(const std::vector<SmallBallEstimate>& estimates) {
    for (const auto& e : estimates)
        if (e.r != estimates.front().r) throw std::invalid_argument("fit_eps_exponent: r must be fixed");
    return fit_common(estimates, FitAxis::epsilon, 5);
}

ScalingFit fit_r_exponent(const std::vector<SmallBallEstimate>& estimates) {
    for (const auto& e : estimates)
        if (e.epsilon != estimates.front().epsilon)
            throw std::invalid_argument("fit_r_exponent: epsilon must be fixed");
    return fit_common(estimates, FitAxis::r, 4);
}

std::pair<double, double> bracket_radii(double h, std::size_t nu, const Location& loc, double epsilon,
                                        double r_min, double r_max, std::size_t levels,
                                        std::size_t grid_n, std::size_t replicates, std::uint64_t seed,
                                        double p_low, double p_high, unsigned workers) {
    const auto radii = log_space(r_min, r_max, levels);
    const SupPool pool = simulate_sup_pool(h, nu, loc, radii, grid_n, replicates, seed, workers);
    std::vector<double> p(radii.size());
    for (std::size_t j = 0; j < radii.size(); ++j) p[j] = estimate_from_pool(pool, j, epsilon).p_hat;
    // p is non-increasing in r; interpolate log r linearly in log(-log p).
    auto cross = [&](double target) {
        const double yt = std::log(-std::log(target));
        for (std::size_t j = 0; j + 1 < radii.size(); ++j) {
            if (p[j] >= target && p[j + 1] <= target) {
                const double pa = std::clamp(p[j], 1e-300, 1.0 - 1e-12);
                const double pb = std::clamp(p[j + 1], 1e-300, 1.0 - 1e-12);
                const double ya = std::log(-std::log(pa)), yb = std::log(-std::log(pb));
                const double la = std::log(radii[j]), lb = std::log(radii[j + 1]);
                if (yb == ya) return std::exp(la);
                return std::exp(la + (lb - la) * (yt - ya) / (yb - ya));
            }
        }
        return p.front() < target ? r_min : r_max;
    };
    return {cross(p_high), cross(p_low)};
}

}  // namespace mpfbm
