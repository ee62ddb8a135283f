#include "mpfbm/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <sstream>

#include "mpfbm/parallel.hpp"
#include "mpfbm/rng.hpp"

namespace mpfbm {

std::size_t GridSpec::size() const {
    std::size_t total = 1;
    for (std::size_t i = 0; i < nu; ++i) {
        if (total > (std::size_t{1} << 40) / std::max<std::size_t>(n, 1)) return std::size_t(-1);
        total *= n;
    }
    return total;
}

std::vector<double> GridSpec::axis() const {
    std::vector<double> ax(n);
    for (std::size_t i = 0; i < n; ++i) {
        ax[i] = include_origin ? corner * static_cast<double>(i) / static_cast<double>(n - 1)
                               : corner * static_cast<double>(i + 1) / static_cast<double>(n);
    }
    if (n > 0) ax.back() = corner;
    return ax;
}

void GridSpec::validate(std::size_t budget) const {
    if (nu < 1) throw std::invalid_argument("grid: nu must be >= 1");
    if (n < (include_origin ? 2u : 1u)) throw std::invalid_argument("grid: too few points per axis");
    if (!(corner > 0.0 && corner <= 1.0)) throw std::invalid_argument("grid: corner must lie in (0,1]");
    if (size() > budget)
        throw BudgetExceeded("grid has " + std::to_string(size()) + " points, budget is " +
                             std::to_string(budget));
}

std::vector<Point> GridSpec::points() const {
    const auto ax = axis();
    const std::size_t total = size();
    std::vector<Point> pts;
    pts.reserve(total);
    std::vector<double> c(nu);
    for (std::size_t k = 0; k < total; ++k) {
        std::size_t rem = k;
        for (std::size_t d = nu; d-- > 0;) {
            c[d] = ax[rem % n];
            rem /= n;
        }
        pts.emplace_back(c);
    }
    return pts;
}

Layout make_layout(const GridSpec& grid, std::size_t budget) {
    grid.validate(budget);
    Layout l;
    l.points = grid.points();
    l.grid = grid;
    std::ostringstream os;
    os << "grid nu=" << grid.nu << " n=" << grid.n << " corner=" << grid.corner
       << (grid.include_origin ? "" : " no-origin");
    l.description = os.str();
    return l;
}

Layout make_layout(std::vector<Point> points, std::string description, std::size_t budget) {
    if (points.empty()) throw std::invalid_argument("layout: no points");
    if (points.size() > budget)
        throw BudgetExceeded("layout has " + std::to_string(points.size()) + " points, budget is " +
                             std::to_string(budget));
    const std::size_t nu = points.front().dim();
    for (const auto& p : points) p.require_dim(nu);
    Layout l;
    l.points = std::move(points);
    l.description = std::move(description);
    return l;
}

Layout union_layout(const std::vector<std::vector<Point>>& parts, std::string description,
                    std::size_t budget) {
    std::map<std::vector<double>, bool> seen;
    std::vector<Point> pts;
    for (const auto& part : parts) {
        for (const auto& p : part) {
            std::vector<double> key(p.coords().begin(), p.coords().end());
            if (seen.emplace(std::move(key), true).second) pts.push_back(p);
        }
    }
    return make_layout(std::move(pts), std::move(description), budget);
}

Eigen::MatrixXd covariance_matrix(const std::vector<Point>& pts, HurstParam h) {
    const auto n = static_cast<Eigen::Index>(pts.size());
    Eigen::MatrixXd m(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i; j < n; ++j) {
            const double v = raw::covariance(pts[i].coords(), pts[j].coords(), h.value());
            m(i, j) = v;
            m(j, i) = v;
        }
    }
    return m;
}

Eigen::MatrixXd covariance_matrix(const GridSpec& grid, HurstParam h, std::size_t budget) {
    grid.validate(budget);
    return covariance_matrix(grid.points(), h);
}

Factor factorize(const Eigen::MatrixXd& matrix) {
    if (matrix.rows() != matrix.cols()) throw std::invalid_argument("factorize: matrix not square");
    Factor f;
    f.dim = static_cast<std::size_t>(matrix.rows());
    for (Eigen::Index i = 0; i < matrix.rows(); ++i)
        if (matrix(i, i) != 0.0) f.active.push_back(static_cast<std::size_t>(i));
    const auto m = static_cast<Eigen::Index>(f.active.size());
    if (m == 0) return f;
    Eigen::MatrixXd a(m, m);
    for (Eigen::Index i = 0; i < m; ++i)
        for (Eigen::Index j = 0; j < m; ++j) a(i, j) = matrix(f.active[i], f.active[j]);
    const double scale = a.trace() / static_cast<double>(m);
    const double ladder[] = {0.0, 1e-12, 1e-11, 1e-10, 1e-9, 1e-8};
    for (double rel : ladder) {
        Eigen::MatrixXd shifted = a;
        if (rel > 0.0) shifted.diagonal().array() += rel * scale;
        Eigen::LLT<Eigen::MatrixXd> llt(shifted);
        if (llt.info() == Eigen::Success) {
            f.lower = llt.matrixL();
            f.jitter = rel * scale;
            f.jitter_relative = rel;
            return f;
        }
    }
    throw NotPositiveSemiDefinite("Cholesky failed at maximal jitter 1e-8 * trace / n");
}

double min_eigenvalue(const Eigen::MatrixXd& matrix) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(matrix, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw std::runtime_error("min_eigenvalue: eigen-solver failed");
    return es.eigenvalues().minCoeff();
}

FieldModel build_field_model(Layout layout, HurstParam h) {
    h.require_kernel_regime();
    FieldModel model;
    model.h = h.value();
    auto cov = covariance_matrix(layout.points, h);
    model.factor = factorize(cov);
    model.layout = std::make_shared<const Layout>(std::move(layout));
    return model;
}

FieldSample sample_path(const FieldModel& model, std::uint64_t seed, std::uint64_t replicate) {
    FieldSample s;
    s.layout = model.layout;
    s.h = model.h;
    s.seed = seed;
    s.replicate = replicate;
    s.jitter_relative = model.factor.jitter_relative;
    s.values.assign(model.factor.dim, 0.0);
    const auto m = static_cast<Eigen::Index>(model.factor.active.size());
    if (m == 0) return s;
    Stream rng(seed, replicate);
    Eigen::VectorXd z(m);
    for (Eigen::Index i = 0; i < m; ++i) z(i) = rng.normal();
    const Eigen::VectorXd x = model.factor.lower.triangularView<Eigen::Lower>() * z;
    for (Eigen::Index i = 0; i < m; ++i) s.values[model.factor.active[i]] = x(i);
    return s;
}

std::vector<FieldSample> sample_paths(const FieldModel& model, std::size_t count, std::uint64_t seed,
                                      unsigned workers) {
    if (count < 1) throw std::invalid_argument("sample_paths: count must be >= 1");
    std::vector<FieldSample> out(count);
    parallel_for(count, workers, [&](std::size_t i) { out[i] = sample_path(model, seed, i); });
    return out;
}

double sup_norm(const FieldSample& sample, double sub_corner) {
    const auto& pts = sample.layout->points;
    const double lim = sub_corner * (1.0 + 1e-12);
    double best = 0.0;
    bool any = false;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        bool inside = true;
        for (double c : pts[i].coords()) {
            if (c > lim) {
                inside = false;
                break;
            }
        }
        if (!inside) continue;
        any = true;
        best = std::max(best, std::abs(sample.values[i]));
    }
    if (!any) throw std::invalid_argument("sup_norm: no grid point inside the sub-cube");
    return best;
}

std::string to_csv(const FieldSample& sample) {
    const auto& l = *sample.layout;
    const std::size_t nu = l.nu();
    std::string out;
    char buf[64];
    auto num = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        out += buf;
    };
    out += "# mpfbm v1, nu=" + std::to_string(nu) + ", h=";
    num(sample.h);
    if (l.grid) {
        out += ", n=" + std::to_string(l.grid->n) + ", corner=";
        num(l.grid->corner);
    } else {
        out += ", n=NA, corner=NA";
    }
    out += ", seed=" + std::to_string(sample.seed) + ", replicate=" + std::to_string(sample.replicate) + "\n";
    out += "index";
    for (std::size_t d = 1; d <= nu; ++d) out += ",coord_" + std::to_string(d);
    out += ",value\n";
    for (std::size_t i = 0; i < l.points.size(); ++i) {
        out += std::to_string(i);
        for (double c : l.points[i].coords()) {
            out += ',';
            num(c);
        }
        out += ',';
        num(sample.values[i]);
        out += '\n';
    }
    return out;
}

PsdSearchResult psd_search(std::size_t nu, HurstParam h, std::size_t max_grids, std::size_t min_points,
                           std::size_t max_points, std::uint64_t seed, bool stop_at_first) {
    if (min_points < 1 || max_points < min_points) throw std::invalid_argument("psd_search: bad point range");
    PsdSearchResult res;
    res.worst_ratio = std::numeric_limits<double>::infinity();
    for (std::size_t g = 0; g < max_grids; ++g) {
        Stream rng(seed, g);
        const std::size_t np = min_points + static_cast<std::size_t>(rng.uniform() * static_cast<double>(max_points - min_points + 1));
        std::vector<Point> pts;
        std::vector<double> c(nu);
        for (std::size_t k = 0; k < std::min(np, max_points); ++k) {
            for (auto& x : c) x = rng.uniform();
            pts.emplace_back(c);
        }
        const auto m = covariance_matrix(pts, h);
        const double scale = m.trace() / static_cast<double>(m.rows());
        const double ev = min_eigenvalue(m);
        res.trials = g + 1;
        const double ratio = ev / scale;
        if (ratio < res.worst_ratio) {
            res.worst_ratio = ratio;
            res.min_eigenvalue = ev;
            res.threshold = -1e-8 * scale;
            res.points = pts;
        }
        if (ev < -1e-8 * scale) {
            res.found = true;
            if (stop_at_first) {
                res.min_eigenvalue = ev;
                res.threshold = -1e-8 * scale;
                res.points = pts;
                return res;
            }
        }
    }
    return res;
}

}  // namespace mpfbm
