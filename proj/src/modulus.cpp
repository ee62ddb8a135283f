#include "mpfbm/modulus.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "mpfbm/geometry.hpp"
#include "mpfbm/simulator.hpp"

namespace mpfbm {

std::size_t ModulusTables::index_of(std::size_t k) const {
    if (k < k0 || k - k0 >= size())
        throw std::out_of_range("modulus table: k = " + std::to_string(k) + " outside [" + std::to_string(k0) +
                                ", " + std::to_string(k0 + size() - 1) + "]");
    return k - k0;
}

double ModulusTables::r(std::size_t row) const { return std::exp(log_r.at(row)); }

double ModulusTables::r_min() const { return std::exp(log_r.back()); }

bool ModulusTables::covers(double x) const {
    return x > 0.0 && std::log(x) >= log_r.back() && x <= 1.0;
}

double ModulusTables::psi_upper(double x) const {
    if (!covers(x)) throw std::out_of_range("psi_upper: r outside the tabulated range");
    return psi_upper_log(std::log(x));
}

double ModulusTables::psi_upper_log(double lx) const {
    if (!(lx <= 0.0 && lx >= log_r.back())) throw std::out_of_range("psi_upper: r outside the tabulated range");
    // log_r is decreasing; find row j with log_r[j+1] <= lx <= log_r[j].
    std::size_t j = 0;
    while (j + 2 < log_r.size() && log_r[j + 1] > lx) ++j;
    if (lx == log_r[j]) return psi[j];
    if (lx == log_r[j + 1]) return psi[j + 1];
    const double w = (log_r[j] - lx) / (log_r[j] - log_r[j + 1]);
    return psi[j] + std::clamp(w, 0.0, 1.0) * (psi[j + 1] - psi[j]);
}

double psi_lower(double r, double h, std::size_t nu) {
    if (!(r > 0.0 && r < std::exp(-1.0))) throw std::invalid_argument("psi_lower: needs 0 < r < 1/e");
    return std::pow(std::log(-std::log(r)), -h / static_cast<double>(nu));
}

namespace {

double target_level(std::size_t k, double h, std::size_t nu, double eta) {
    return std::exp((-2.0 * h / static_cast<double>(nu) - 2.0 * eta) * std::log(std::log(static_cast<double>(k))));
}

// log of the contraction factor r_{k+1} / r_k; +inf when a level is not attainable.
double log_step(const FTable& F, std::size_t k, double h, std::size_t nu, double eta) {
    const double t0 = target_level(k, h, nu, eta), t1 = target_level(k + 1, h, nu, eta);
    if (!(t0 < F.F_max() && t1 > F.F_min())) return std::numeric_limits<double>::infinity();
    const double dn = static_cast<double>(nu);
    const double e0 = F.inverse(t0), e1 = F.inverse(t1);
    return std::log(F(e0)) / (2.0 * dn * h) + 2.0 / dn * std::log(e1);
}

}  // namespace

namespace {

// Rows k0 .. k0 + K - 1, or fewer when log r reaches stop_log_r first.
ModulusTables build_rows(const FTable& F, double h, std::size_t nu, double eta, std::size_t K, double stop_log_r) {
    if (!(eta > 0.0)) throw std::invalid_argument("build_modulus: eta must be > 0");
    if (K < 3) throw std::invalid_argument("build_modulus: K must be >= 3");
    if (!(h > 0.0 && h < 0.5)) throw std::invalid_argument("build_modulus: requires 0 < h < 1/2");
    if (nu < 1) throw std::invalid_argument("build_modulus: nu must be >= 1");
    if (!F.strictly_increasing()) throw std::invalid_argument("build_modulus: F table is not strictly increasing");

    // Both eps_k and F(eps_k) decrease in k, so log_step is non-increasing
    // once finite: gallop to a contracting k, then bisect for the first one.
    constexpr std::size_t cap = std::size_t{1} << 40;
    auto contracts = [&](std::size_t k) {
        const double t = target_level(k, h, nu, eta);
        if (t <= F.F_min()) throw std::out_of_range("build_modulus: F table too short to reach a contracting index");
        return log_step(F, k, h, nu, eta) < 0.0;
    };
    std::size_t hi = 2;
    while (!contracts(hi)) {
        if (hi >= cap) throw std::out_of_range("build_modulus: no contracting index below 2^40");
        hi *= 2;
    }
    std::size_t lo = hi / 2;  // lo does not contract (or is below 2)
    if (hi == 2) lo = 2;
    while (hi - lo > 1) {
        const std::size_t mid = lo + (hi - lo) / 2;
        if (contracts(mid))
            hi = mid;
        else
            lo = mid;
    }
    const std::size_t k0 = (lo >= 2 && contracts(lo)) ? lo : hi;

    ModulusTables t;
    t.h = h;
    t.nu = nu;
    t.eta = eta;
    t.k0 = k0;
    const double dn = static_cast<double>(nu);
    for (std::size_t i = 0; i < K; ++i) {
        const std::size_t k = k0 + i;
        const double level = target_level(k, h, nu, eta);
        const double e = F.inverse(level);  // throws when the table runs out
        t.eps.push_back(e);
        t.F_eps.push_back(F(e));
        t.psi.push_back(std::pow(std::log(static_cast<double>(k)), -h / dn));
        if (i == 0)
            t.log_r.push_back(0.0);
        else
            t.log_r.push_back(t.log_r.back() + std::log(t.F_eps[i - 1]) / (2.0 * dn * h) + 2.0 / dn * std::log(e));
        t.log_a.push_back(-0.5 * dn * t.log_r.back() + std::log(e));
        if (t.log_r.back() <= stop_log_r && i + 1 >= 3) break;
    }
    return t;
}

}  // namespace

ModulusTables build_modulus(const FTable& F, double h, std::size_t nu, double eta, std::size_t K) {
    return build_rows(F, h, nu, eta, K, -std::numeric_limits<double>::infinity());
}

ModulusTables build_modulus_covering(const FTable& F, double h, std::size_t nu, double eta, double r_target,
                                     std::size_t K_max) {
    if (!(r_target > 0.0 && r_target < 1.0)) throw std::invalid_argument("build_modulus: r_target must lie in (0,1)");
    ModulusTables t = build_rows(F, h, nu, eta, K_max, std::log(r_target));
    if (t.log_r.back() > std::log(r_target))
        throw std::out_of_range("build_modulus: " + std::to_string(K_max) + " rows reach only r = " +
                                std::to_string(t.r_min()) + ", above " + std::to_string(r_target));
    return t;
}

json ModulusAudit::to_json() const {
    return json{{"check", "modulus_tables"},
                {"psi_exact", psi_exact},
                {"r_decreasing", r_decreasing},
                {"divergence", divergence},
                {"dominates_lower", dominates_lower},
                {"ratio_increasing", ratio_increasing},
                {"lower_checked", lower_checked},
                {"lower_violations", lower_violations},
                {"first_violation_r", first_violation_r},
                {"worst_log_gap", worst_log_gap},
                {"worst_divergence_gap", worst_divergence_gap},
                {"pass", pass()}};
}

ModulusAudit audit_modulus(const ModulusTables& t) {
    ModulusAudit a;
    const double dn = static_cast<double>(t.nu);
    a.psi_exact = true;
    for (std::size_t i = 0; i < t.size(); ++i) {
        const double want = std::pow(std::log(static_cast<double>(t.k0 + i)), -t.h / dn);
        if (t.psi[i] != want || t.psi_upper_log(t.log_r[i]) != want) a.psi_exact = false;
    }
    a.r_decreasing = true;
    for (std::size_t i = 1; i < t.size(); ++i)
        if (!(t.log_r[i] < t.log_r[i - 1])) a.r_decreasing = false;

    a.divergence = true;
    a.worst_divergence_gap = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i + 1 < t.size(); ++i) {
        const double lhs = t.log_a[i + 1] + 0.5 * dn * t.log_r[i];
        const double rhs = -std::log(t.F_eps[i]) / (4.0 * t.h);
        const double gap = rhs - lhs;
        a.worst_divergence_gap = std::max(a.worst_divergence_gap, gap);
        if (gap > 1e-9 * std::max(1.0, std::abs(rhs))) a.divergence = false;
    }

    a.ratio_increasing = true;
    double prev = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < t.size(); ++i) {
        const double Fk = t.F_eps[i];
        const double ratio = std::pow(std::log(static_cast<double>(t.k0 + i)), t.h / dn) / std::sqrt(-Fk * std::log(Fk));
        if (!(ratio > prev)) a.ratio_increasing = false;
        prev = ratio;
    }

    // psi_upper >= psi_lower at nodes and log-midpoints where log log 1/r is defined.
    a.worst_log_gap = -std::numeric_limits<double>::infinity();
    const double cut = -1.0;
    auto probe = [&](double lr) {
        if (!(lr < cut) || !std::isfinite(lr)) return;
        const double x = std::exp(lr);
        const double upper = t.psi_upper_log(lr);
        const double lower = std::pow(std::log(-lr), -t.h / dn);
        ++a.lower_checked;
        const double gap = std::log(lower) - std::log(upper);
        a.worst_log_gap = std::max(a.worst_log_gap, gap);
        if (upper < lower * (1.0 - 1e-12)) {
            if (a.lower_violations == 0) a.first_violation_r = x;
            ++a.lower_violations;
        }
    };
    for (std::size_t i = 0; i < t.size(); ++i) {
        probe(t.log_r[i]);
        if (i + 1 < t.size()) probe(0.5 * (t.log_r[i] + t.log_r[i + 1]));
    }
    a.dominates_lower = a.lower_violations == 0;
    return a;
}

json BandReport::to_json() const {
    return json{{"check", "band_variance"},
                {"k", k},
                {"r_k", r_k},
                {"a_k", a_k},
                {"a_k1", a_k1},
                {"constant", constant},
                {"per_pair", per_pair.to_json()},
                {"partition", partition.to_json()},
                {"identity", identity.to_json()},
                {"sup_bound", sup_bound.to_json()},
                {"pass", pass()}};
}

std::vector<std::pair<Point, Point>> corner_pairs(std::size_t nu, std::size_t per_axis, double r) {
    const auto pts = GridSpec{nu, per_axis, r, false}.points();
    std::vector<std::pair<Point, Point>> out;
    for (std::size_t i = 0; i < pts.size(); ++i)
        for (std::size_t j = i + 1; j < pts.size(); ++j) out.emplace_back(pts[i], pts[j]);
    return out;
}

BandReport band_variance_check(const SpectralModel& model, const DirectionSet& dirs,
                               const ModulusTables& tables, std::size_t k, double h,
                               const std::vector<std::pair<Point, Point>>& pairs, unsigned workers) {
    const std::size_t row = tables.index_of(k);
    if (row + 1 >= tables.size()) throw std::out_of_range("band_variance_check: k + 1 outside the table");
    if (!model.basis) throw std::invalid_argument("band_variance_check: model has no Haar basis");
    if (std::abs(4.0 * h - model.alpha) > 1e-12) throw std::invalid_argument("band_variance_check: alpha != 4h");
    const std::size_t nu = model.basis->nu();
    if (nu != tables.nu) throw std::invalid_argument("band_variance_check: nu mismatch");

    BandReport rep;
    rep.k = k;
    rep.r_k = tables.r(row);
    rep.a_k = std::exp(tables.log_a[row]);
    rep.a_k1 = std::exp(tables.log_a[row + 1]);
    if (!(rep.r_k > 0.0)) throw std::out_of_range("band_variance_check: r_k underflows");
    if (!(rep.a_k < rep.a_k1)) throw std::logic_error("band_variance_check: a_k not increasing");
    rep.constant = 2.0 * std::max(1.0, tail_constant(model));
    const double alpha = model.alpha;

    std::vector<TestFunction> phis;
    for (const auto& [s, t] : pairs) {
        s.require_dim(nu);
        t.require_dim(nu);
        for (std::size_t d = 0; d < nu; ++d)
            if (s[d] > rep.r_k * (1.0 + 1e-12) || t[d] > rep.r_k * (1.0 + 1e-12))
                throw std::invalid_argument("band_variance_check: pair outside [0, r_k]^nu");
        phis.push_back(TestFunction::rect_increment(model, s, t));
    }

    // F(x) is a sup over A(1); the directions of the pairs themselves belong
    // to A(1), so they join the discretized sup.
    auto own = [&](const TestFunction& f, double x) {
        const double nrm = f.h_norm();
        std::vector<double> u(f.coeffs);
        for (double& c : u) c /= nrm;
        return levy_integral(model, TestFunction::from_coeffs(std::move(u)), Region::ball(x)).value;
    };

    struct PairOut {
        double var_tilde = 0.0, bound = 0.0, tol = 0.0;
        double inner = 0.0, band = 0.0, outer = 0.0, all = 0.0, all_se = 0.0, qerr = 0.0;
        double norm = 0.0, own_eps = 0.0;
    };
    std::vector<PairOut> out(phis.size());
    for (std::size_t p = 0; p < phis.size(); ++p) {
        const auto& f = phis[p];
        PairOut& o = out[p];
        o.norm = f.h_norm();
        if (o.norm == 0.0) continue;
        const LevyValue in = levy_integral(model, f, Region::ball(rep.a_k));
        const LevyValue bd = levy_integral(model, f, Region::band(rep.a_k, rep.a_k1));
        const LevyValue ou = levy_integral(model, f, Region::complement(rep.a_k1));
        const LevyValue al = levy_integral(model, f, Region::all());
        o.inner = in.value;
        o.band = bd.value;
        o.outer = ou.value;
        o.all = al.value;
        o.all_se = al.mc_stderr;
        o.qerr = in.quad_error + ou.quad_error;
        o.var_tilde = 2.0 * (o.inner + o.outer);
        const double x = rep.a_k * o.norm;
        const double Fx = std::max(eval_F(model, dirs, x, workers), own(f, x));
        o.bound = rep.constant * (std::pow(o.norm, alpha) * Fx + std::pow(rep.a_k1, -alpha));
        o.tol = 2.0 * o.qerr + 1e-9 * o.bound;
        o.own_eps = own(f, tables.eps[row]);
    }

    double D2 = 0.0, own_max = 0.0, qmax = 0.0;
    for (std::size_t p = 0; p < phis.size(); ++p) {
        const auto& f = phis[p];
        const PairOut& o = out[p];
        json inputs{{"s", std::vector<double>(f.s->coords().begin(), f.s->coords().end())},
                    {"t", std::vector<double>(f.t->coords().begin(), f.t->coords().end())},
                    {"h_norm", o.norm}};
        if (o.norm == 0.0) {
            rep.per_pair.add(check_eq("band_variance", inputs, 0.0, 0.0, 0.0));
            continue;
        }
        rep.per_pair.add(check_le("band_variance", inputs, o.var_tilde, o.bound, o.tol));
        const double sum = o.inner + o.band + o.outer;
        rep.partition.add(check_eq("band_partition", inputs, sum, o.all, 1e-12 * o.all + 1e-300));
        const double full = std::pow(o.norm, alpha);
        json id_inputs = inputs;
        id_inputs["delta_2h"] = std::pow(sym_diff_measure(*f.s, *f.t), 2.0 * h);
        id_inputs["projection_residual"] = f.projection_residual;
        rep.identity.add(check_eq("band_sum_identity", id_inputs, 2.0 * (sum), full,
                                  10.0 * o.all_se + 2.0 * o.qerr + 1e-12 * full));
        D2 = std::max(D2, o.var_tilde);
        own_max = std::max(own_max, o.own_eps);
        qmax = std::max(qmax, o.qerr);
    }
    const double eps_k = tables.eps[row];
    const double F_table = tables.F_eps[row];
    const double F_direct = eval_F(model, dirs, eps_k, workers);
    const double Fk = std::max({F_table, F_direct, own_max});
    const double rk2 = std::exp(2.0 * static_cast<double>(nu) * h * tables.log_r[row]);
    const double rhs = 2.0 * rep.constant * rk2 * Fk;
    rep.sup_bound = check_le("band_sup_bound",
                             json{{"k", k},
                                  {"eps_k", eps_k},
                                  {"F_table", F_table},
                                  {"F_direct", F_direct},
                                  {"F_pair_directions", own_max},
                                  {"pairs", phis.size()}},
                             D2, rhs, 2.0 * qmax + 1e-9 * rhs);
    return rep;
}

}  // namespace mpfbm
