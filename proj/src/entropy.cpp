#include "mpfbm/entropy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "mpfbm/parallel.hpp"
#include "mpfbm/rng.hpp"
#include "mpfbm/stats.hpp"

namespace mpfbm {

Metric metric_lambda() {
    return {"d_lambda", [](const Point& s, const Point& t) { return sym_diff_measure(s, t); }, true};
}

Metric metric_euclidean() {
    return {"euclidean", [](const Point& s, const Point& t) { return euclidean(s, t); }, true};
}

Metric metric_dh(double h) {
    return {"d_h", [h](const Point& s, const Point& t) { return dist_h(s, t, h); }, true};
}

std::string to_string(CoverMethod m) {
    return m == CoverMethod::greedy ? "greedy" : "exhaustive-1d";
}

std::vector<Point> dyadic_grid(std::size_t nu, unsigned m) {
    if (nu == 0) throw std::invalid_argument("dyadic_grid: nu must be >= 1");
    const std::size_t side = std::size_t{1} << m;
    std::size_t total = 1;
    for (std::size_t i = 0; i < nu; ++i) total *= side;
    std::vector<Point> pts;
    pts.reserve(total);
    std::vector<std::size_t> idx(nu, 0);
    std::vector<double> c(nu);
    for (std::size_t k = 0; k < total; ++k) {
        std::size_t rem = k;
        for (std::size_t d = nu; d-- > 0;) {
            idx[d] = rem % side;
            rem /= side;
        }
        for (std::size_t d = 0; d < nu; ++d)
            c[d] = (static_cast<double>(idx[d]) + 0.5) / static_cast<double>(side);
        pts.emplace_back(c);
    }
    return pts;
}

CoveringResult covering_number(const std::vector<Point>& domain, const Metric& metric, double epsilon,
                               unsigned workers) {
    if (domain.empty()) throw std::invalid_argument("covering_number: empty domain");
    if (!(epsilon > 0.0)) throw std::invalid_argument("covering_number: epsilon must be positive");
    const std::size_t n = domain.size();
    std::vector<double> mind(n, std::numeric_limits<double>::infinity());
    CoveringResult res;
    res.epsilon = epsilon;
    res.method = CoverMethod::greedy;

    const std::size_t blocks = std::max<std::size_t>(1, std::min<std::size_t>(workers, n));
    std::vector<std::size_t> block_arg(blocks);
    std::vector<double> block_max(blocks);

    std::size_t next = 0;
    while (true) {
        const Point& c = domain[next];
        res.centers.push_back(c);
        parallel_for(blocks, workers, [&](std::size_t b) {
            const std::size_t lo = n * b / blocks, hi = n * (b + 1) / blocks;
            double best = -1.0;
            std::size_t arg = lo;
            for (std::size_t i = lo; i < hi; ++i) {
                const double d = metric.d(domain[i], c);
                if (d < mind[i]) mind[i] = d;
                if (mind[i] > best) {
                    best = mind[i];
                    arg = i;
                }
            }
            block_max[b] = best;
            block_arg[b] = arg;
        });
        double best = -1.0;
        std::size_t arg = 0;
        for (std::size_t b = 0; b < blocks; ++b) {
            if (block_max[b] > best) {
                best = block_max[b];
                arg = block_arg[b];
            }
        }
        if (best <= epsilon) break;
        next = arg;
    }
    // Coverage certificate: mind holds exact distances to the nearest centre.
    for (double d : mind)
        if (!(d <= epsilon)) throw std::logic_error("covering_number: coverage certificate failed");
    res.count = res.centers.size();
    return res;
}

CoveringResult covering_number_1d(const std::vector<Point>& domain, const Metric& metric,
                                  double epsilon) {
    if (domain.empty()) throw std::invalid_argument("covering_number_1d: empty domain");
    if (!(epsilon > 0.0)) throw std::invalid_argument("covering_number_1d: epsilon must be positive");
    if (domain.front().dim() != 1 || !metric.interval_balls_1d)
        throw std::invalid_argument("covering_number_1d: needs a 1-D domain with interval balls");
    std::vector<Point> pts = domain;
    std::sort(pts.begin(), pts.end(), [](const Point& a, const Point& b) { return a[0] < b[0]; });
    CoveringResult res;
    res.epsilon = epsilon;
    res.method = CoverMethod::exhaustive_1d;
    std::size_t i = 0;
    while (i < pts.size()) {
        // Rightmost centre still covering the leftmost uncovered point.
        std::size_t c = i;
        while (c + 1 < pts.size() && metric.d(pts[i], pts[c + 1]) <= epsilon) ++c;
        res.centers.push_back(pts[c]);
        std::size_t j = c;
        while (j < pts.size() && metric.d(pts[c], pts[j]) <= epsilon) ++j;
        i = j;
    }
    res.count = res.centers.size();
    return res;
}

double grid_resolution(std::size_t nu, unsigned m, const Metric& metric) {
    // The largest neighbour gap of a cell-centre grid under the metrics used
    // here sits at the far corner, where all other coordinates are maximal.
    const double step = 1.0 / static_cast<double>(std::size_t{1} << m);
    const double top = 1.0 - 0.5 * step;
    Point a = Point::filled(nu, top);
    std::vector<double> c(nu, top);
    c[0] = top - step;
    return metric.d(a, Point(c));
}

std::vector<CoveringResult> entropy_sweep(std::size_t nu, unsigned m, const Metric& metric,
                                          const std::vector<double>& epsilons, CoverMethod method,
                                          unsigned workers) {
    const double res = grid_resolution(nu, m, metric);
    const auto grid = dyadic_grid(nu, m);
    std::vector<CoveringResult> out;
    for (double e : epsilons) {
        if (e < 2.0 * res)
            throw std::invalid_argument("entropy_sweep: epsilon " + std::to_string(e) +
                                        " is below twice the grid resolution " + std::to_string(res));
        out.push_back(method == CoverMethod::greedy ? covering_number(grid, metric, e, workers)
                                                    : covering_number_1d(grid, metric, e));
    }
    return out;
}

double entropy_slope(const std::vector<CoveringResult>& results) {
    if (results.size() < 5) throw std::invalid_argument("entropy_slope: need at least 5 results");
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    std::vector<double> x, y;
    for (const auto& r : results) {
        lo = std::min(lo, r.epsilon);
        hi = std::max(hi, r.epsilon);
        x.push_back(std::log(1.0 / r.epsilon));
        y.push_back(std::log(static_cast<double>(r.count)));
    }
    if (hi / lo < 10.0 * (1.0 - 1e-12))
        throw std::invalid_argument("entropy_slope: epsilon must span at least one decade");
    return ols(x, y).slope;
}

EquivalenceConstants equivalence_constants(std::size_t nu, double a, double b, std::size_t samples,
                                           std::uint64_t seed, bool require_lower) {
    if (!(a >= 0.0 && a < b && b <= 1.0)) throw std::invalid_argument("equivalence_constants: need 0 <= a < b <= 1");
    if (samples < 2) throw std::invalid_argument("equivalence_constants: need at least 2 samples");
    if (a == 0.0 && require_lower)
        throw std::invalid_argument("equivalence_constants: no positive lower constant exists when a = 0");
    Stream rng(seed, 0);
    EquivalenceConstants ec;
    ec.nu = nu;
    ec.a = a;
    ec.b = b;
    ec.m_hat = std::numeric_limits<double>::infinity();
    ec.M_hat = 0.0;
    std::vector<double> s(nu), t(nu);
    for (std::size_t k = 0; k < samples; ++k) {
        for (std::size_t i = 0; i < nu; ++i) {
            s[i] = a + (b - a) * rng.uniform();
            t[i] = a + (b - a) * rng.uniform();
        }
        double e = 0.0;
        for (std::size_t i = 0; i < nu; ++i) e += (s[i] - t[i]) * (s[i] - t[i]);
        e = std::sqrt(e);
        if (e == 0.0) continue;
        const double ratio = raw::sym_diff(s, t) / e;
        ec.m_hat = std::min(ec.m_hat, ratio);
        ec.M_hat = std::max(ec.M_hat, ratio);
    }
    ec.lower_valid = a > 0.0;
    return ec;
}

Counterexample compdist_counterexample(std::size_t nu, double b, int n) {
    if (nu < 2) throw std::invalid_argument("compdist_counterexample: no counterexample exists for nu = 1");
    if (!(b > 0.0 && b <= 1.0)) throw std::invalid_argument("compdist_counterexample: need b in (0,1]");
    if (n < 1) throw std::invalid_argument("compdist_counterexample: need n >= 1");
    const double small = std::ldexp(1.0, -n);
    std::vector<double> s(nu, b), t(nu, b);
    s[0] = small;
    t[1] = small;
    Counterexample ce{Point(s), Point(t), 0.0, 0.0};
    ce.delta = sym_diff_measure(ce.s, ce.t);
    ce.euclid = euclidean(ce.s, ce.t);
    return ce;
}

}  // namespace mpfbm
