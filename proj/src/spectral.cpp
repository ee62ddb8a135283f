#include "mpfbm/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <numbers>
#include <stdexcept>

#include "mpfbm/parallel.hpp"
#include "mpfbm/rng.hpp"
#include "mpfbm/simulator.hpp"

namespace mpfbm {

// ---------------------------------------------------------------- Haar basis

HaarBasis::HaarBasis(std::size_t nu, unsigned level, std::size_t n) : nu_(nu), level_(level) {
    if (nu < 1) throw std::invalid_argument("HaarBasis: nu must be >= 1");
    if (level > 10) throw std::invalid_argument("HaarBasis: level too large");
    const std::size_t per_axis = std::size_t{1} << level;
    std::size_t total = 1;
    for (std::size_t d = 0; d < nu; ++d) total *= per_axis;
    if (total > 4096) throw std::invalid_argument("HaarBasis: basis too large");
    auto scale = [](std::size_t f) -> unsigned {
        if (f == 0) return 0;
        unsigned j = 0;
        while ((std::size_t{2} << j) <= f) ++j;  // f in [2^j, 2^(j+1))
        return j + 1;
    };
    for (std::size_t k = 0; k < total; ++k) {
        std::vector<std::size_t> idx(nu);
        std::size_t rem = k;
        for (std::size_t d = nu; d-- > 0;) {
            idx[d] = rem % per_axis;
            rem /= per_axis;
        }
        funcs_.push_back(idx);
    }
    std::stable_sort(funcs_.begin(), funcs_.end(), [&](const auto& a, const auto& b) {
        unsigned ma = 0, mb = 0, sa = 0, sb = 0;
        for (auto f : a) ma = std::max(ma, scale(f)), sa += scale(f);
        for (auto f : b) mb = std::max(mb, scale(f)), sb += scale(f);
        if (ma != mb) return ma < mb;
        return sa < sb;
    });
    if (n != 0) {
        if (n > funcs_.size()) throw std::invalid_argument("HaarBasis: n exceeds 2^(L nu)");
        funcs_.resize(n);
    }
}

double HaarBasis::primitive(std::size_t f, double t) const {
    if (f == 0) return t;
    unsigned j = 0;
    while ((std::size_t{2} << j) <= f) ++j;
    const double width = std::ldexp(1.0, -static_cast<int>(j));
    const double k = static_cast<double>(f - (std::size_t{1} << j));
    const double a = k * width, m = (k + 0.5) * width, b = (k + 1.0) * width;
    const double c = std::sqrt(1.0 / width);
    return c * ((std::clamp(t, a, m) - a) - (std::clamp(t, m, b) - m));
}

std::vector<double> HaarBasis::rect_coeffs(const Point& t) const {
    t.require_dim(nu_);
    std::vector<double> c(funcs_.size());
    for (std::size_t i = 0; i < funcs_.size(); ++i) {
        double v = 1.0;
        for (std::size_t d = 0; d < nu_; ++d) v *= primitive(funcs_[i][d], t[d]);
        c[i] = v;
    }
    return c;
}

std::vector<double> HaarBasis::increment_coeffs(const Point& s, const Point& t) const {
    s.require_dim(nu_);
    t.require_dim(nu_);
    std::vector<double> m(nu_);
    for (std::size_t d = 0; d < nu_; ++d) m[d] = std::min(s[d], t[d]);
    const auto cs = rect_coeffs(s), ct = rect_coeffs(t), cm = rect_coeffs(Point(m));
    std::vector<double> c(cs.size());
    for (std::size_t i = 0; i < c.size(); ++i) c[i] = cs[i] + ct[i] - 2.0 * cm[i];
    return c;
}

// ---------------------------------------------------------------- model

double spherical_moment(std::size_t n, double alpha) {
    const double dn = static_cast<double>(n);
    return std::exp(std::lgamma(0.5 * dn) + std::lgamma(0.5 * (alpha + 1.0)) -
                    std::lgamma(0.5 * (dn + alpha))) /
           std::sqrt(std::numbers::pi);
}

SpectralModel make_spectral_model(const SpectralConfig& cfg) {
    if (!(cfg.alpha > 0.0 && cfg.alpha < 2.0)) throw std::invalid_argument("spectral model: alpha must lie in (0,2)");
    if (cfg.sphere_samples < 2) throw std::invalid_argument("spectral model: need sphere samples");
    SpectralModel m;
    m.alpha = cfg.alpha;
    m.seed = cfg.seed;
    if (cfg.nu > 0) {
        m.basis.emplace(cfg.nu, cfg.level, cfg.n);
        m.n = m.basis->size();
    } else {
        if (cfg.n < 1) throw std::invalid_argument("spectral model: n must be >= 1");
        m.n = cfg.n;
    }
    if (cfg.weights.empty()) {
        for (std::size_t j = 1; j <= m.n; ++j) m.weights.push_back(1.0 / static_cast<double>(j));
    } else {
        if (cfg.weights.size() != m.n) throw std::invalid_argument("spectral model: weights size mismatch");
        m.weights = cfg.weights;
    }
    for (std::size_t j = 0; j < m.n; ++j) {
        if (!(m.weights[j] > 0.0)) throw std::invalid_argument("spectral model: weights must be positive");
        if (j > 0 && m.weights[j] > m.weights[j - 1])
            throw std::invalid_argument("spectral model: weights must be non-increasing");
    }
    m.radial = std::make_shared<const RadialIntegral>(cfg.alpha);
    m.spherical_moment = spherical_moment(m.n, cfg.alpha);
    m.calibration = 1.0 / (2.0 * m.radial->total() * m.spherical_moment);

    const std::size_t N = cfg.sphere_samples;
    m.theta.resize(N * m.n);
    m.stretch.resize(N);
    double mass = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
        Stream rng(split_seed(cfg.seed, 0x5EED5u), i);
        double* th = &m.theta[i * m.n];
        double nrm = 0.0;
        do {
            nrm = 0.0;
            for (std::size_t j = 0; j < m.n; ++j) {
                th[j] = rng.normal();
                nrm += th[j] * th[j];
            }
        } while (nrm == 0.0);
        nrm = std::sqrt(nrm);
        double w = 0.0;
        for (std::size_t j = 0; j < m.n; ++j) {
            th[j] /= nrm;
            w += m.weights[j] * m.weights[j] * th[j] * th[j];
        }
        m.stretch[i] = std::sqrt(w);
        mass += std::pow(m.stretch[i], cfg.alpha);
    }
    m.sigma_mass = m.calibration * mass / static_cast<double>(N);
    return m;
}

// ---------------------------------------------------------------- test functions

TestFunction TestFunction::raw(const SpectralModel& model, std::vector<double> xi) {
    if (xi.size() != model.n) throw std::invalid_argument("test function: dimension mismatch");
    TestFunction f;
    f.kind = Kind::raw;
    f.coeffs.resize(xi.size());
    for (std::size_t j = 0; j < xi.size(); ++j) f.coeffs[j] = model.weights[j] * xi[j];
    f.xi = std::move(xi);
    return f;
}

TestFunction TestFunction::rect_increment(const SpectralModel& model, const Point& s, const Point& t) {
    if (!model.basis) throw std::invalid_argument("test function: model has no Haar basis");
    TestFunction f;
    f.kind = Kind::rect_increment;
    f.s = s;
    f.t = t;
    f.coeffs = model.basis->increment_coeffs(s, t);
    double sq = 0.0;
    for (double c : f.coeffs) sq += c * c;
    f.projection_residual = std::max(0.0, sym_diff_measure(s, t) - sq);
    return f;
}

TestFunction TestFunction::from_coeffs(std::vector<double> coeffs) {
    TestFunction f;
    f.kind = Kind::raw;
    f.coeffs = std::move(coeffs);
    return f;
}

double TestFunction::h_norm() const {
    double s = 0.0;
    for (double c : coeffs) s += c * c;
    return std::sqrt(s);
}

// ---------------------------------------------------------------- stable sampling

double positive_stable(double beta, double v, double w) {
    // Kanter: A = sin(beta V) / sin(V)^(1/beta) * (sin((1-beta) V) / W)^((1-beta)/beta), V ~ U(0, pi).
    const double a = std::sin(beta * v) / std::pow(std::sin(v), 1.0 / beta);
    const double b = std::pow(std::sin((1.0 - beta) * v) / w, (1.0 - beta) / beta);
    return a * b;
}

std::vector<std::vector<double>> sample_stable(const SpectralModel& model, std::size_t count,
                                               std::uint64_t seed) {
    const double beta = 0.5 * model.alpha;
    const double gscale = std::sqrt(std::pow(2.0, 1.0 - 2.0 / model.alpha));
    std::vector<std::vector<double>> out(count, std::vector<double>(model.n));
    for (std::size_t i = 0; i < count; ++i) {
        Stream rng(seed, i);
        const double v = std::numbers::pi * rng.uniform();
        const double w = rng.exponential();
        const double root_a = std::sqrt(positive_stable(beta, v, w));
        for (std::size_t j = 0; j < model.n; ++j)
            out[i][j] = root_a * gscale * model.weights[j] * rng.normal();
    }
    return out;
}

// ---------------------------------------------------------------- Levy integrals

std::string Region::label() const {
    char buf[96];
    switch (kind) {
        case Kind::all: return "all";
        case Kind::ball: std::snprintf(buf, sizeof buf, "ball(%.6g)", a); return buf;
        case Kind::complement: std::snprintf(buf, sizeof buf, "complement(%.6g)", b); return buf;
        case Kind::band: std::snprintf(buf, sizeof buf, "band(%.6g,%.6g)", a, b); return buf;
    }
    return "?";
}

namespace {

std::pair<double, double> radii_of(const Region& r) {
    const double inf = std::numeric_limits<double>::infinity();
    switch (r.kind) {
        case Region::Kind::all: return {0.0, inf};
        case Region::Kind::ball:
            if (!(r.a >= 0.0)) throw std::invalid_argument("region: ball radius must be >= 0");
            return {0.0, r.a};
        case Region::Kind::complement:
            if (!(r.b >= 0.0)) throw std::invalid_argument("region: complement radius must be >= 0");
            return {r.b, inf};
        case Region::Kind::band:
            if (!(r.a >= 0.0 && r.b >= r.a)) throw std::invalid_argument("region: band needs 0 <= a <= b");
            return {r.a, r.b};
    }
    return {0.0, 0.0};
}

// Per-sample projections of a direction: |p|^alpha and u = |p| / |Lambda theta|.
struct Projection {
    double weight;
    double u;
};

inline Projection project(const SpectralModel& m, const double* v, std::size_t i) {
    const double* th = &m.theta[i * m.n];
    double p = 0.0;
    for (std::size_t j = 0; j < m.n; ++j) p += v[j] * th[j];
    p = std::abs(p);
    if (p == 0.0) return {0.0, 0.0};
    return {std::exp(m.alpha * std::log(p)), p / m.stretch[i]};
}

}  // namespace

LevyValue levy_integral(const SpectralModel& model, const TestFunction& f, const Region& region) {
    if (f.coeffs.size() != model.n) throw std::invalid_argument("levy_integral: dimension mismatch");
    const auto [r0, r1] = radii_of(region);
    const auto& G = *model.radial;
    const std::size_t N = model.samples();
    double sum = 0.0, sumsq = 0.0, wsum = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
        const Projection pr = project(model, f.coeffs.data(), i);
        if (pr.weight == 0.0) continue;
        const double hi = std::isinf(r1) ? G.total() : G(pr.u * r1);
        const double lo = r0 > 0.0 ? G(pr.u * r0) : 0.0;
        const double term = pr.weight * (hi - lo);
        sum += term;
        sumsq += term * term;
        wsum += pr.weight;
    }
    const double dn = static_cast<double>(N);
    const double mean = sum / dn;
    const double var = std::max(0.0, sumsq / dn - mean * mean);
    LevyValue out;
    out.value = model.calibration * mean;
    out.mc_stderr = model.calibration * std::sqrt(var / dn);
    if (!std::isfinite(out.value)) throw std::logic_error("levy_integral: non-finite radial integral");
    out.quad_error = model.calibration * (wsum / dn) * 2.0 * G.error_bound();
    return out;
}

json SpecRepReport::to_json() const {
    json e = json::array();
    for (const auto& x : entries)
        e.push_back({{"coeffs", x.coeffs}, {"lhs", x.lhs}, {"rhs", x.rhs}, {"relative_error", x.relative_error}});
    return json{{"check", "spectral_identity"},
                {"tolerance", tolerance},
                {"worst_relative_error", worst_relative_error},
                {"pass", pass},
                {"entries", e}};
}

SpecRepReport verify_spec_rep(const SpectralModel& model, const std::vector<TestFunction>& tests, double tol) {
    SpecRepReport rep;
    rep.tolerance = tol;
    for (const auto& f : tests) {
        const double norm = f.h_norm();
        if (norm == 0.0) throw std::invalid_argument("verify_spec_rep: zero test function");
        SpecRepEntry e;
        e.coeffs = f.coeffs;
        e.lhs = 2.0 * levy_integral(model, f, Region::all()).value;
        e.rhs = std::pow(norm, model.alpha);
        e.relative_error = std::abs(e.lhs - e.rhs) / e.rhs;
        rep.worst_relative_error = std::max(rep.worst_relative_error, e.relative_error);
        rep.entries.push_back(std::move(e));
    }
    rep.pass = rep.worst_relative_error <= tol;
    return rep;
}

// ---------------------------------------------------------------- F

DirectionSet pair_grid_directions(const SpectralModel& model, std::size_t per_axis) {
    if (!model.basis) throw std::invalid_argument("pair_grid_directions: model has no Haar basis");
    if (per_axis < 1) throw std::invalid_argument("pair_grid_directions: per_axis must be >= 1");
    const std::size_t nu = model.basis->nu();
    GridSpec g{nu, per_axis, 1.0, false};
    const auto pts = g.points();
    DirectionSet ds;
    ds.per_axis = per_axis;
    std::map<std::vector<long long>, std::size_t> seen;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        for (std::size_t j = i + 1; j < pts.size(); ++j) {
            auto c = model.basis->increment_coeffs(pts[i], pts[j]);
            double nrm = 0.0;
            for (double x : c) nrm += x * x;
            nrm = std::sqrt(nrm);
            if (nrm == 0.0) continue;
            ++ds.pairs;
            for (double& x : c) x /= nrm;
            double sign = 0.0;
            for (double x : c) {
                if (std::abs(x) > 1e-9) {
                    sign = x > 0 ? 1.0 : -1.0;
                    break;
                }
            }
            std::vector<long long> key;
            for (double x : c) key.push_back(std::llround(sign * x * 1e10));
            if (seen.emplace(key, ds.units.size()).second) ds.units.push_back(c);
        }
    }
    if (ds.units.empty()) throw std::invalid_argument("pair_grid_directions: no non-zero increments");
    return ds;
}

double eval_F(const SpectralModel& model, const DirectionSet& dirs, double x, unsigned workers) {
    if (!(x >= 0.0)) throw std::invalid_argument("eval_F: x must be >= 0");
    if (x == 0.0) return 0.0;
    const auto& G = *model.radial;
    std::vector<double> vals(dirs.units.size());
    parallel_for(dirs.units.size(), workers, [&](std::size_t d) {
        double sum = 0.0;
        for (std::size_t i = 0; i < model.samples(); ++i) {
            const Projection pr = project(model, dirs.units[d].data(), i);
            if (pr.weight == 0.0) continue;
            sum += pr.weight * (std::isinf(x) ? G.total() : G(pr.u * x));
        }
        vals[d] = model.calibration * sum / static_cast<double>(model.samples());
    });
    return *std::max_element(vals.begin(), vals.end());
}

FTable::FTable(std::vector<double> x, std::vector<double> F) : x_(std::move(x)), F_(std::move(F)) {
    if (x_.size() != F_.size() || x_.size() < 2) throw std::invalid_argument("FTable: bad table");
}

double FTable::operator()(double x) const {
    if (x <= 0.0) return 0.0;
    if (x <= x_.front()) return F_.front() * x / x_.front();
    if (x >= x_.back()) return F_.back();
    const auto it = std::upper_bound(x_.begin(), x_.end(), x);
    const std::size_t j = static_cast<std::size_t>(it - x_.begin()) - 1;
    const double w = (std::log(x) - std::log(x_[j])) / (std::log(x_[j + 1]) - std::log(x_[j]));
    return F_[j] + w * (F_[j + 1] - F_[j]);
}

double FTable::inverse(double target) const {
    if (!(target > F_.front() && target < F_.back()))
        throw std::out_of_range("F inverse: requested level " + std::to_string(target) +
                                " outside the tabulated range (" + std::to_string(F_.front()) + ", " +
                                std::to_string(F_.back()) + ")");
    double lo = std::log(x_.front()), hi = std::log(x_.back());
    for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, std::abs(lo)); ++it) {
        const double mid = 0.5 * (lo + hi);
        if ((*this)(std::exp(mid)) < target)
            lo = mid;
        else
            hi = mid;
    }
    return std::exp(0.5 * (lo + hi));
}

bool FTable::strictly_increasing() const {
    for (std::size_t j = 1; j < F_.size(); ++j)
        if (!(F_[j] > F_[j - 1])) return false;
    return F_.front() > 0.0;
}

std::string FTable::to_csv() const {
    std::string out = "x,F\n";
    char buf[80];
    for (std::size_t j = 0; j < x_.size(); ++j) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", x_[j], F_[j]);
        out += buf;
    }
    return out;
}

FTable tabulate_F(const SpectralModel& model, const DirectionSet& dirs, double x_min, double x_max,
                  std::size_t points, unsigned workers) {
    if (!(x_min > 0.0 && x_max > x_min) || points < 2) throw std::invalid_argument("tabulate_F: bad range");
    std::vector<double> xs(points);
    for (std::size_t m = 0; m < points; ++m)
        xs[m] = std::exp(std::log(x_min) + (std::log(x_max) - std::log(x_min)) * static_cast<double>(m) /
                                               static_cast<double>(points - 1));
    const auto& G = *model.radial;
    std::vector<std::vector<double>> per_dir(dirs.units.size(), std::vector<double>(points, 0.0));
    parallel_for(dirs.units.size(), workers, [&](std::size_t d) {
        auto& acc = per_dir[d];
        for (std::size_t i = 0; i < model.samples(); ++i) {
            const Projection pr = project(model, dirs.units[d].data(), i);
            if (pr.weight == 0.0) continue;
            for (std::size_t m = 0; m < points; ++m) acc[m] += pr.weight * G(pr.u * xs[m]);
        }
        for (double& v : acc) v *= model.calibration / static_cast<double>(model.samples());
    });
    std::vector<double> F(points, 0.0);
    for (const auto& v : per_dir)
        for (std::size_t m = 0; m < points; ++m) F[m] = std::max(F[m], v[m]);
    return FTable(std::move(xs), std::move(F));
}

double tail_constant(const SpectralModel& model) { return 2.0 * model.sigma_mass / model.alpha; }

TruncationReport truncation_bounds_check(const SpectralModel& model, const DirectionSet& dirs,
                                         const TestFunction& f, double a, double b, unsigned workers) {
    if (!(a > 0.0 && b > 0.0)) throw std::invalid_argument("truncation check: a, b must be positive");
    const double norm = f.h_norm();
    json inputs{{"a", a}, {"b", b}, {"h_norm", norm}};
    if (f.s && f.t) {
        inputs["s"] = std::vector<double>(f.s->coords().begin(), f.s->coords().end());
        inputs["t"] = std::vector<double>(f.t->coords().begin(), f.t->coords().end());
    }
    TruncationReport rep;
    const LevyValue small = levy_integral(model, f, Region::ball(a));
    const double rhs1 = norm == 0.0 ? 0.0 : std::pow(norm, model.alpha) * eval_F(model, dirs, a * norm, workers);
    inputs["quadrature_error"] = small.quad_error;
    rep.small_jumps = check_le("trunc_small_jumps", inputs, small.value, rhs1, 1e-9 * rhs1 + 1e-300);
    const LevyValue large = levy_integral(model, f, Region::complement(b));
    const double rhs2 = tail_constant(model) * std::pow(b, -model.alpha);
    inputs["quadrature_error"] = large.quad_error;
    inputs["tail_constant"] = tail_constant(model);
    rep.large_jumps = check_le("trunc_large_jumps", inputs, large.value, rhs2, 1e-9 * rhs2 + 1e-300);
    return rep;
}

}  // namespace mpfbm
