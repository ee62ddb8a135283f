#include <algorithm>
#include <cmath>
#include <cstdio>
#include <memory>

#include "cli.hpp"
#include "mpfbm/entropy.hpp"
#include "mpfbm/geometry.hpp"
#include "mpfbm/lil.hpp"
#include "mpfbm/modulus.hpp"
#include "mpfbm/rkhs.hpp"
#include "mpfbm/rng.hpp"
#include "mpfbm/simulator.hpp"
#include "mpfbm/small_ball.hpp"
#include "mpfbm/spectral.hpp"

namespace cli {

using namespace mpfbm;

namespace {

double num(const json& c, const char* k) { return c.at(k).get<double>(); }
std::size_t count(const json& c, const char* k) { return c.at(k).get<std::size_t>(); }
std::uint64_t seed_of(const json& c) { return c.at("seed").get<std::uint64_t>(); }

std::vector<double> numbers(const json& c, const char* k) {
    const json& v = c.at(k);
    if (!v.is_array()) throw ConfigError(std::string("config key '") + k + "' must be an array of numbers");
    std::vector<double> out;
    for (const auto& x : v) {
        if (!x.is_number()) throw ConfigError(std::string("config key '") + k + "' must be an array of numbers");
        out.push_back(x.get<double>());
    }
    return out;
}

std::string g17(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

Location location_of(const json& c) {
    const json& v = c.at("center");
    if (v.is_null()) return Location::origin();
    if (!v.is_array()) throw ConfigError("config key 'center' must be null (origin) or an array of coordinates");
    return Location::interior(Point(numbers(c, "center")));
}

Point random_point(Stream& rng, std::size_t nu) {
    std::vector<double> x(nu);
    for (auto& v : x) v = rng.uniform();
    return Point(x);
}

void require(bool ok, RunResult& res, const std::string& check) {
    if (!ok) res.failed_checks.push_back(check);
}

// Keys shared by every command that needs the spectral model and modulus tables.
json modulus_defaults() {
    return json{{"level", 1u},        {"samples", 2000u},      {"per_axis", 8u},       {"eta", 0.1},
                {"F_min", 1e-3},      {"F_max", 1e3},          {"F_points", 512u},     {"rows_max", 5000u},
                {"spectral_seed", 7u}};
}

struct ModulusBundle {
    SpectralModel model;
    DirectionSet dirs;
    FTable F;
    ModulusTables tables;
};

ModulusBundle build_bundle(const json& c, double r_target, unsigned workers) {
    ModulusBundle b;
    SpectralConfig sc;
    sc.nu = count(c, "nu");
    sc.level = static_cast<unsigned>(count(c, "level"));
    sc.alpha = 4.0 * num(c, "h");
    sc.sphere_samples = count(c, "samples");
    sc.seed = c.at("spectral_seed").get<std::uint64_t>();
    b.model = make_spectral_model(sc);
    b.dirs = pair_grid_directions(b.model, count(c, "per_axis"));
    b.F = tabulate_F(b.model, b.dirs, num(c, "F_min"), num(c, "F_max"), count(c, "F_points"), workers);
    b.tables = build_modulus_covering(b.F, num(c, "h"), sc.nu, num(c, "eta"), r_target, count(c, "rows_max"));
    return b;
}

json merged(json a, const json& b) {
    a.update(b);
    return a;
}

// ---------------------------------------------------------------- kernel-eval
RunResult kernel_eval(const json& c, unsigned) {
    RunResult res;
    const double h = num(c, "h");
    const std::size_t nu = count(c, "nu");
    const HurstParam hp(h);
    if (nu < 1) throw ConfigError("nu must be >= 1");
    if (!c.at("points").is_null()) {
        std::vector<Point> pts;
        for (const auto& p : c.at("points")) {
            pts.emplace_back(p.get<std::vector<double>>());
            pts.back().require_dim(nu);
        }
        std::string csv = "i,j,covariance,d_h\n";
        for (std::size_t i = 0; i < pts.size(); ++i)
            for (std::size_t j = 0; j < pts.size(); ++j)
                csv += std::to_string(i) + "," + std::to_string(j) + "," + g17(covariance(pts[i], pts[j], hp)) +
                       "," + g17(dist_h(pts[i], pts[j], std::min(h, 1.0))) + "\n";
        res.files.push_back({"covariance.csv", csv});
        res.summary["points"] = pts.size();
    }

    const std::size_t cases = count(c, "cases");
    std::string csv = "case";
    for (std::size_t d = 0; d < nu; ++d) csv += ",s_" + std::to_string(d + 1);
    for (std::size_t d = 0; d < nu; ++d) csv += ",t_" + std::to_string(d + 1);
    csv += ",covariance,d_h\n";
    CheckSummary incr("increment_variance"), self("self_similarity");
    for (std::size_t i = 0; i < cases; ++i) {
        Stream rng(seed_of(c), i);
        const Point s = random_point(rng, nu), t = random_point(rng, nu);
        const double r = rng.uniform();
        const double k = covariance(s, t, hp);
        const double d = pow_nonneg(sym_diff_measure(s, t), h);
        csv += std::to_string(i);
        for (double x : s.coords()) csv += "," + g17(x);
        for (double x : t.coords()) csv += "," + g17(x);
        csv += "," + g17(k) + "," + g17(d) + "\n";
        const json in{{"case", i}};
        incr.add(check_eq("increment_variance", in, covariance(s, s, hp) + covariance(t, t, hp) - 2.0 * k, d * d,
                          1e-12));
        std::vector<double> rs(nu), rt(nu);
        for (std::size_t j = 0; j < nu; ++j) rs[j] = r * s[j], rt[j] = r * t[j];
        self.add(check_eq("self_similarity", in, covariance(Point(rs), Point(rt), hp),
                          std::pow(r, 2.0 * static_cast<double>(nu) * h) * k, 1e-12));
    }
    res.files.push_back({"kernel.csv", csv});
    res.summary["checks"] = json::array({incr.to_json(), self.to_json()});
    require(incr.pass(), res, "increment_variance");
    require(self.pass(), res, "self_similarity");

    if (const std::size_t grids = count(c, "psd_grids"); grids > 0) {
        const bool probe = hp.regime() == Regime::non_psd_probe;
        const PsdSearchResult r = psd_search(nu, hp, grids, 3, 40, seed_of(c), probe);
        res.summary["psd_search"] = json{{"found_negative", r.found},       {"trials", r.trials},
                                         {"min_eigenvalue", r.min_eigenvalue}, {"threshold", r.threshold},
                                         {"worst_ratio", r.worst_ratio},       {"points", r.points.size()}};
        if (!probe) require(!r.found, res, "psd");
    }
    return res;
}

// ---------------------------------------------------------------- entropy
RunResult entropy(const json& c, unsigned workers) {
    RunResult res;
    const std::size_t nu = count(c, "nu");
    const std::string mname = c.at("metric").get<std::string>();
    Metric metric;
    if (mname == "lambda")
        metric = metric_lambda();
    else if (mname == "euclidean")
        metric = metric_euclidean();
    else if (mname == "dh")
        metric = metric_dh(num(c, "h"));
    else
        throw ConfigError("metric must be one of lambda, euclidean, dh");
    const std::string meth = c.at("method").get<std::string>();
    CoverMethod method;
    if (meth == "greedy")
        method = CoverMethod::greedy;
    else if (meth == "exhaustive_1d")
        method = CoverMethod::exhaustive_1d;
    else
        throw ConfigError("method must be greedy or exhaustive_1d");

    const auto results = entropy_sweep(nu, static_cast<unsigned>(count(c, "m")), metric, numbers(c, "epsilons"),
                                       method, workers);
    std::string csv = "epsilon,count,method,nu,metric\n";
    for (const auto& r : results)
        csv += g17(r.epsilon) + "," + std::to_string(r.count) + "," + to_string(r.method) + "," +
               std::to_string(nu) + "," + metric.name + "\n";
    res.files.push_back({"entropy.csv", csv});
    try {
        res.summary["slope"] = entropy_slope(results);
    } catch (const std::invalid_argument& e) {
        res.summary["slope"] = nullptr;
        res.summary["slope_unavailable"] = e.what();
    }
    if (mname == "lambda") res.summary["target_slope"] = nu;
    if (const std::size_t pairs = count(c, "pairs"); pairs > 0) {
        const auto eq = equivalence_constants(nu, num(c, "a"), num(c, "b"), pairs, seed_of(c));
        res.summary["equivalence"] = json{{"a", eq.a}, {"b", eq.b}, {"m_hat", eq.m_hat}, {"M_hat", eq.M_hat},
                                          {"lower_valid", eq.lower_valid}};
    }
    if (const int n = c.at("counterexample_n").get<int>(); n > 0 && nu >= 2) {
        const auto ce = compdist_counterexample(nu, num(c, "b"), n);
        res.summary["counterexample"] = json{{"s", std::vector<double>(ce.s.coords().begin(), ce.s.coords().end())},
                                             {"t", std::vector<double>(ce.t.coords().begin(), ce.t.coords().end())},
                                             {"delta", ce.delta},
                                             {"euclidean", ce.euclid}};
    }
    return res;
}

// ---------------------------------------------------------------- simulate
RunResult simulate(const json& c, unsigned workers) {
    RunResult res;
    GridSpec g;
    g.nu = count(c, "nu");
    g.n = count(c, "grid_n");
    g.corner = num(c, "corner");
    g.include_origin = c.at("include_origin").get<bool>();
    const FieldModel model = build_field_model(make_layout(g), HurstParam(num(c, "h")));
    const auto paths = sample_paths(model, count(c, "replicates"), seed_of(c), workers);
    for (const auto& p : paths) res.files.push_back({"path_" + std::to_string(p.replicate) + ".csv", to_csv(p)});
    res.summary = json{{"points", model.layout->points.size()},
                       {"active", model.factor.active.size()},
                       {"jitter_relative", model.factor.jitter_relative},
                       {"replicates", paths.size()}};
    return res;
}

// ---------------------------------------------------------------- smallball
RunResult smallball(const json& c, unsigned workers) {
    RunResult res;
    const double h = num(c, "h");
    const std::size_t nu = count(c, "nu");
    const Location loc = location_of(c);
    const SupPool pool = simulate_sup_pool(h, nu, loc, numbers(c, "radii"), count(c, "grid_n"),
                                           count(c, "replicates"), seed_of(c), workers);
    std::vector<double> eps;
    if (c.at("epsilons").is_null())
        eps = informative_epsilons(pool, 0, count(c, "eps_count"), num(c, "p_low"), num(c, "p_high"));
    else
        eps = numbers(c, "epsilons");

    std::string csv = "r,epsilon,location,p_hat,ci_low,ci_high,replicates,grid_n\n";
    std::vector<std::vector<SmallBallEstimate>> by_r(pool.radii.size());
    for (std::size_t j = 0; j < pool.radii.size(); ++j)
        for (double e : eps) {
            const auto est = estimate_from_pool(pool, j, e);
            by_r[j].push_back(est);
            csv += g17(est.r) + "," + g17(est.epsilon) + "," + loc.label() + "," + g17(est.p_hat) + "," +
                   g17(est.ci_low) + "," + g17(est.ci_high) + "," + std::to_string(est.replicates) + "," +
                   std::to_string(est.grid_n) + "\n";
        }
    res.files.push_back({"smallball.csv", csv});

    auto fit_json = [](const auto& make) -> json {
        try {
            const ScalingFit f = make();
            return json{{"slope", f.slope}, {"stderr", f.stderr_slope}, {"points", f.points.size()}};
        } catch (const std::invalid_argument& e) {
            return json{{"slope", nullptr}, {"unavailable", e.what()}};
        }
    };
    json eps_fits = json::array(), r_fits = json::array();
    for (std::size_t j = 0; j < pool.radii.size(); ++j)
        eps_fits.push_back(merged(json{{"r", pool.radii[j]}}, fit_json([&] { return fit_eps_exponent(by_r[j]); })));
    if (pool.radii.size() >= 4)
        for (std::size_t i = 0; i < eps.size(); ++i) {
            std::vector<SmallBallEstimate> col;
            for (const auto& row : by_r) col.push_back(row[i]);
            r_fits.push_back(merged(json{{"epsilon", eps[i]}}, fit_json([&] { return fit_r_exponent(col); })));
        }
    const double dn = static_cast<double>(nu);
    res.summary = json{{"location", loc.label()},
                       {"points", pool.points},
                       {"eps_fits", eps_fits},
                       {"r_fits", r_fits},
                       {"target_eps_slope", dn / h},
                       {"target_r_slope", loc.kind == LocationKind::origin ? dn * dn : dn}};
    return res;
}

// ---------------------------------------------------------------- spectral-verify
RunResult spectral_verify(const json& c, unsigned workers) {
    RunResult res;
    SpectralConfig sc;
    sc.nu = count(c, "nu");
    sc.level = static_cast<unsigned>(count(c, "level"));
    sc.n = count(c, "n");
    sc.alpha = num(c, "alpha");
    sc.sphere_samples = count(c, "samples");
    sc.seed = seed_of(c);
    if (!c.at("weights").is_null()) sc.weights = numbers(c, "weights");
    const SpectralModel m = make_spectral_model(sc);

    Stream rng(seed_of(c), 1);
    std::vector<TestFunction> tests;
    std::vector<std::string> kinds;
    const std::size_t total = count(c, "tests");
    while (tests.size() < total) {
        if (tests.size() % 2 == 0) {
            std::vector<double> xi(m.n);
            for (auto& x : xi) x = rng.normal();
            tests.push_back(TestFunction::raw(m, xi));
            kinds.push_back("raw");
        } else {
            const Point s = random_point(rng, sc.nu), t = random_point(rng, sc.nu);
            if (s == t) continue;
            tests.push_back(TestFunction::rect_increment(m, s, t));
            kinds.push_back("rect_increment");
        }
    }
    const SpecRepReport rep = verify_spec_rep(m, tests, num(c, "tolerance"));
    std::string csv = "test,kind,lhs,rhs,relative_error\n";
    for (std::size_t i = 0; i < rep.entries.size(); ++i)
        csv += std::to_string(i) + "," + kinds[i] + "," + g17(rep.entries[i].lhs) + "," + g17(rep.entries[i].rhs) +
               "," + g17(rep.entries[i].relative_error) + "\n";
    res.files.push_back({"spectral.csv", csv});
    res.summary = json{{"n", m.n},
                       {"alpha", m.alpha},
                       {"samples", m.samples()},
                       {"tolerance", rep.tolerance},
                       {"worst_relative_error", rep.worst_relative_error}};
    require(rep.pass, res, "spectral_identity");

    if (const std::size_t k = count(c, "truncation_inputs"); k > 0) {
        const DirectionSet dirs = pair_grid_directions(m, count(c, "per_axis"));
        CheckSummary small("truncation_small_jumps"), large("truncation_large_jumps");
        const double pa = static_cast<double>(dirs.per_axis);
        while (small.total < k) {
            std::vector<double> a(sc.nu), b(sc.nu);
            for (auto& x : a) x = static_cast<double>(1 + rng.bits() % dirs.per_axis) / pa;
            for (auto& x : b) x = static_cast<double>(1 + rng.bits() % dirs.per_axis) / pa;
            if (a == b) continue;
            const TestFunction f = TestFunction::rect_increment(m, Point(a), Point(b));
            const double lo = std::exp(std::log(1e-2) + std::log(1e4) * rng.uniform());
            const double hi = std::exp(std::log(1e-1) + std::log(1e3) * rng.uniform());
            const TruncationReport t = truncation_bounds_check(m, dirs, f, lo, hi, workers);
            small.add(t.small_jumps);
            large.add(t.large_jumps);
        }
        res.summary["truncation"] = json::array({small.to_json(), large.to_json()});
        require(small.pass(), res, "truncation_small_jumps");
        require(large.pass(), res, "truncation_large_jumps");
    }
    return res;
}

// ---------------------------------------------------------------- modulus
RunResult modulus(const json& c, unsigned workers) {
    RunResult res;
    const ModulusBundle b = build_bundle(c, num(c, "r_target"), workers);
    const ModulusTables& T = b.tables;
    res.files.push_back({"F.csv", b.F.to_csv()});
    std::string csv = "k,eps,F,log_r,r,log_a,psi\n";
    for (std::size_t i = 0; i < T.size(); ++i)
        csv += std::to_string(T.k0 + i) + "," + g17(T.eps[i]) + "," + g17(T.F_eps[i]) + "," + g17(T.log_r[i]) + "," +
               g17(std::exp(T.log_r[i])) + "," + g17(T.log_a[i]) + "," + g17(T.psi[i]) + "\n";
    res.files.push_back({"modulus.csv", csv});
    const ModulusAudit a = audit_modulus(T);
    res.summary = json{{"k0", T.k0},
                       {"rows", T.size()},
                       {"r_min", T.r_min()},
                       {"directions", b.dirs.units.size()},
                       {"tail_constant", tail_constant(b.model)},
                       {"audit", a.to_json()}};
    require(a.psi_exact, res, "psi_exact");
    require(a.r_decreasing, res, "r_decreasing");
    require(a.divergence, res, "divergence");
    require(a.dominates_lower, res, "dominates_lower");

    if (const std::size_t scales = count(c, "band_scales"); scales > 0) {
        if (T.size() < 3) throw ConfigError("band check needs at least 3 table rows");
        Stream rng(seed_of(c), 2);
        json bands = json::array();
        bool ok = true;
        for (std::size_t i = 0; i < scales; ++i) {
            const std::size_t row = (T.size() - 2) * (2 * i + 1) / (2 * scales);
            const double rk = T.r(row);
            std::vector<std::pair<Point, Point>> pairs;
            while (pairs.size() < count(c, "band_pairs")) {
                std::vector<double> s(T.nu), t(T.nu);
                for (auto& x : s) x = rk * rng.uniform();
                for (auto& x : t) x = rk * rng.uniform();
                if (s != t) pairs.emplace_back(Point(s), Point(t));
            }
            const BandReport br = band_variance_check(b.model, b.dirs, T, T.k0 + row, num(c, "h"), pairs, workers);
            ok = ok && br.pass();
            bands.push_back(br.to_json());
        }
        res.summary["bands"] = bands;
        require(ok, res, "band_variance");
    }
    return res;
}

// ---------------------------------------------------------------- rkhs-check
RkhsElement random_element(Stream& rng, std::size_t nu, double h, std::size_t m) {
    RkhsElement f;
    f.h = h;
    for (std::size_t i = 0; i < m; ++i) {
        std::vector<double> x(nu);
        for (auto& v : x) v = 0.05 + 0.95 * rng.uniform();
        f.anchors.emplace_back(x);
        f.coeffs.push_back(rng.normal());
    }
    return f;
}

RunResult rkhs_check(const json& c, unsigned workers) {
    RunResult res;
    const double h = num(c, "h");
    const std::size_t nu = count(c, "nu");
    Stream rng(seed_of(c), 0);
    std::vector<RkhsElement> elems;
    if (!c.at("element").is_null()) elems.push_back(RkhsElement::from_json(c.at("element")));
    while (elems.size() < count(c, "elements")) elems.push_back(random_element(rng, nu, h, count(c, "anchors")));

    const double M_hat = equivalence_constants(nu, 0.0, 1.0, count(c, "M_samples"), seed_of(c)).M_hat;
    CheckSummary rep("reproducing"), dist("kernel_distance"), hold("rkhs_holder_bound");
    std::string csv = "element,norm,reproducing_error,distance_error,holder_violations\n";
    for (std::size_t e = 0; e < elems.size(); ++e) {
        const RkhsElement& f = elems[e];
        const Point t = random_point(rng, nu), s = random_point(rng, nu);
        const CheckReport r = check_eq("reproducing", json{{"element", e}}, reproduce(f, t), evaluate(f, t), 1e-10);
        RkhsElement d;
        d.h = h;
        d.anchors = {s, t};
        d.coeffs = {1.0, -1.0};
        const CheckReport dd =
            s == t ? check_eq("kernel_distance", json{{"element", e}}, 0.0, 0.0, 0.0)
                   : check_eq("kernel_distance", json{{"element", e}}, rkhs_norm(d), dist_h(s, t, h), 1e-10);
        std::vector<std::pair<Point, Point>> pairs;
        for (std::size_t j = 0; j < count(c, "pairs"); ++j) pairs.emplace_back(random_point(rng, nu), random_point(rng, nu));
        const CheckSummary hb = holder_bound_check(f, pairs, M_hat);
        rep.add(r);
        dist.add(dd);
        hold.total += hb.total;
        hold.violations += hb.violations;
        hold.worst_margin = e == 0 ? hb.worst_margin : std::max(hold.worst_margin, hb.worst_margin);
        for (const auto& x : hb.failed) hold.failed.push_back(x);
        csv += std::to_string(e) + "," + g17(rkhs_norm(f)) + "," + g17(std::abs(r.lhs - r.rhs)) + "," +
               g17(std::abs(dd.lhs - dd.rhs)) + "," + std::to_string(hb.violations) + "\n";
    }
    res.files.push_back({"rkhs.csv", csv});
    json checks = json::array({rep.to_json(), dist.to_json(), hold.to_json()});
    require(rep.pass(), res, "reproducing");
    require(dist.pass(), res, "kernel_distance");
    require(hold.pass(), res, "rkhs_holder_bound");

    if (const std::size_t triples = count(c, "techflil_triples"); triples > 0) {
        const ScaleLayout L = build_scale_layout(h, nu, dyadic_scales(2, 17), 9);
        const auto paths = sample_paths(L.model, count(c, "paths"), seed_of(c), workers);
        CheckSummary tf("techflil");
        for (std::size_t i = 0; i < triples; ++i) {
            RkhsElement f = elems[i % elems.size()];
            const double n = rkhs_norm(f);
            if (n > 0.0)
                for (auto& x : f.coeffs) x *= 0.5 / n;
            const double u = std::exp(std::log(2e-3) + std::log(50.0) * rng.uniform());
            const double r = u * std::pow(10.0, -(0.05 + 0.95 * rng.uniform()));
            const double s = r * std::pow(10.0, -(0.05 + 0.95 * rng.uniform()));
            for (const auto& p : paths) tf.add(techflil_check(p, s, r, u, f, M_hat));
        }
        checks.push_back(tf.to_json());
        require(tf.pass(), res, "techflil");
    }
    res.summary = json{{"M_hat", M_hat}, {"elements", elems.size()}, {"checks", checks}};
    return res;
}

// ---------------------------------------------------------------- lil / flil
std::vector<ModulusKind> kinds_of(const json& c) {
    const std::string m = c.at("modulus").get<std::string>();
    if (m == "lower") return {ModulusKind::lower};
    if (m == "upper") return {ModulusKind::upper};
    if (m == "both") return {ModulusKind::lower, ModulusKind::upper};
    throw ConfigError("modulus must be lower, upper or both");
}

struct LilSetup {
    ScaleLayout layout;
    std::unique_ptr<ModulusBundle> bundle;
};

LilSetup lil_setup(const json& c, const std::vector<ModulusKind>& kinds, unsigned workers) {
    const int kmin = c.at("k_min").get<int>(), kmax = c.at("k_max").get<int>();
    if (kmin < 2 || kmax <= kmin) throw ConfigError("need 2 <= k_min < k_max");
    LilSetup s{build_scale_layout(num(c, "h"), count(c, "nu"), dyadic_scales(kmin, kmax), count(c, "grid_n")), {}};
    if (std::find(kinds.begin(), kinds.end(), ModulusKind::upper) != kinds.end())
        s.bundle = std::make_unique<ModulusBundle>(build_bundle(c, std::ldexp(1.0, -kmax), workers));
    return s;
}

RunResult lil(const json& c, unsigned workers) {
    RunResult res;
    const auto kinds = kinds_of(c);
    const LilSetup s = lil_setup(c, kinds, workers);
    json sums = json::array();
    for (ModulusKind k : kinds) {
        const ModulusTables* T = k == ModulusKind::upper ? &s.bundle->tables : nullptr;
        const LilSweep sw = chung_sweep(s.layout, count(c, "replicates"), seed_of(c), k, T, num(c, "burn_in_r"), workers);
        res.files.push_back({"lil_" + to_string(k) + ".csv", sw.to_csv()});
        const json sj = sw.summary();
        sums.push_back(sj);
        require(sj.at("all_positive_finite").get<bool>(), res, "liminf_proxy_positive_" + to_string(k));
    }
    res.summary = json{{"points", s.layout.model.layout->points.size()}, {"sweeps", sums}};
    return res;
}

RunResult flil(const json& c, unsigned workers) {
    RunResult res;
    const auto kinds = kinds_of(c);
    RkhsElement phi;
    phi.h = num(c, "h");
    if (!c.at("phi").is_null()) phi = RkhsElement::from_json(c.at("phi"));
    const LilSetup s = lil_setup(c, kinds, workers);
    json sums = json::array();
    for (ModulusKind k : kinds) {
        const ModulusTables* T = k == ModulusKind::upper ? &s.bundle->tables : nullptr;
        const FlilSweep sw =
            flil_sweep(s.layout, phi, count(c, "replicates"), seed_of(c), k, T, num(c, "burn_in_r"), workers);
        res.files.push_back({"flil_" + to_string(k) + ".csv", sw.to_csv()});
        const json sj = sw.summary();
        sums.push_back(sj);
        require(sj.at("all_positive_finite").get<bool>(), res, "flil_stat_positive_" + to_string(k));
    }
    res.summary = json{{"phi", phi.to_json()}, {"points", s.layout.model.layout->points.size()}, {"sweeps", sums}};
    return res;
}

// ---------------------------------------------------------------- holder
RunResult holder(const json& c, unsigned workers) {
    RunResult res;
    const HolderEstimate e = holder_exponents(num(c, "h"), count(c, "nu"), location_of(c), numbers(c, "rho"),
                                              count(c, "grid_n"), count(c, "replicates"), seed_of(c), workers);
    res.files.push_back({"holder.csv", e.to_csv()});
    res.summary = e.to_json();
    return res;
}

std::vector<Command> make_commands() {
    std::vector<Command> v;
    v.push_back({"kernel-eval", "Covariance and d_h on given points or random pairs, with identity checks",
                 json{{"h", 0.3}, {"nu", 2u}, {"cases", 1000u}, {"points", nullptr}, {"psd_grids", 0u}, {"seed", 1u}},
                 kernel_eval});
    v.push_back({"entropy", "Covering numbers of the dyadic cell-centre grid and the entropy slope",
                 json{{"nu", 2u},
                      {"m", 7u},
                      {"metric", "lambda"},
                      {"h", 0.5},
                      {"method", "greedy"},
                      {"epsilons", log_space(0.03, 0.3, 8)},
                      {"pairs", 0u},
                      {"a", 0.0},
                      {"b", 1.0},
                      {"counterexample_n", 0},
                      {"seed", 1u}},
                 entropy});
    v.push_back({"simulate", "Exact Cholesky sample paths on a regular grid",
                 json{{"h", 0.3},
                      {"nu", 2u},
                      {"grid_n", 16u},
                      {"corner", 1.0},
                      {"include_origin", true},
                      {"replicates", 4u},
                      {"seed", 1u}},
                 simulate});
    v.push_back({"smallball", "Small-ball probabilities over radii and thresholds with scaling fits",
                 json{{"h", 0.3},
                      {"nu", 2u},
                      {"center", nullptr},
                      {"grid_n", 24u},
                      {"replicates", 4000u},
                      {"radii", {1.0}},
                      {"epsilons", nullptr},
                      {"eps_count", 10u},
                      {"p_low", 0.003},
                      {"p_high", 0.9},
                      {"seed", 1u}},
                 smallball});
    v.push_back({"spectral-verify", "Spectral representation identity and truncation bounds",
                 json{{"nu", 1u},
                      {"level", 3u},
                      {"n", 8u},
                      {"alpha", 1.2},
                      {"samples", 100000u},
                      {"tests", 20u},
                      {"tolerance", 0.02},
                      {"weights", nullptr},
                      {"truncation_inputs", 0u},
                      {"per_axis", 8u},
                      {"seed", 1u}},
                 spectral_verify});
    v.push_back({"modulus", "Decay function table, upper modulus tables and their audit",
                 merged(modulus_defaults(), json{{"h", 0.3},
                                                 {"nu", 2u},
                                                 {"r_target", std::ldexp(1.0, -13)},
                                                 {"band_scales", 0u},
                                                 {"band_pairs", 10u},
                                                 {"seed", 1u}}),
                 modulus});
    v.push_back({"rkhs-check", "Reproducing property, kernel distance, Holder bound and the pathwise inequality",
                 json{{"h", 0.3},
                      {"nu", 2u},
                      {"elements", 100u},
                      {"anchors", 5u},
                      {"pairs", 100u},
                      {"element", nullptr},
                      {"M_samples", 100000u},
                      {"techflil_triples", 0u},
                      {"paths", 50u},
                      {"seed", 1u}},
                 rkhs_check});
    const json lil_defaults = merged(modulus_defaults(), json{{"h", 0.3},
                                                              {"nu", 2u},
                                                              {"k_min", 2},
                                                              {"k_max", 13},
                                                              {"grid_n", 17u},
                                                              {"replicates", 200u},
                                                              {"modulus", "lower"},
                                                              {"burn_in_r", 0.0625},
                                                              {"seed", 11u}});
    v.push_back({"lil", "Chung-type sweep over dyadic corners", lil_defaults, lil});
    v.push_back({"flil", "Functional sweep sup |eta_r - phi| over dyadic corners",
                 merged(lil_defaults, json{{"phi", nullptr}}), flil});
    std::vector<double> rho;
    for (int j = 0; j < 8; ++j) rho.push_back(std::ldexp(1.0, -j));
    v.push_back({"holder", "Pointwise and local Holder exponent estimates",
                 json{{"h", 0.25},
                      {"nu", 2u},
                      {"center", nullptr},
                      {"rho", rho},
                      {"grid_n", 13u},
                      {"replicates", 200u},
                      {"seed", 1u}},
                 holder});
    return v;
}

}  // namespace

const std::vector<Command>& commands() {
    static const std::vector<Command> all = make_commands();
    return all;
}

const Command& find_command(const std::string& name) {
    for (const auto& c : commands())
        if (c.name == name) return c;
    throw ConfigError("unknown subcommand '" + name + "'");
}

}  // namespace cli
