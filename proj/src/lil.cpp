#include "mpfbm/lil.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

#include "mpfbm/parallel.hpp"
#include "mpfbm/stats.hpp"

namespace mpfbm {

std::string to_string(ModulusKind k) { return k == ModulusKind::lower ? "lower" : "upper"; }

std::vector<double> dyadic_scales(int k_min, int k_max) {
    if (k_min < 1 || k_max < k_min) throw std::invalid_argument("dyadic_scales: need 1 <= k_min <= k_max");
    std::vector<double> s;
    for (int k = k_min; k <= k_max; ++k) s.push_back(std::ldexp(1.0, -k));
    return s;
}

ScaleLayout build_scale_layout(double h, std::size_t nu, std::vector<double> scales, std::size_t grid_n,
                               std::size_t budget) {
    if (!(h > 0.0 && h < 0.5)) throw std::invalid_argument("lil: requires 0 < h < 1/2");
    if (scales.empty()) throw std::invalid_argument("lil: no scales");
    if (grid_n < 2) throw std::invalid_argument("lil: grid_n must be >= 2");
    for (std::size_t i = 0; i < scales.size(); ++i) {
        if (!(scales[i] > 0.0 && scales[i] < std::exp(-1.0)))
            throw std::invalid_argument("lil: scales must lie in (0, 1/e)");
        if (i && !(scales[i] < scales[i - 1])) throw std::invalid_argument("lil: scales must be strictly decreasing");
        // The grid spacing at this scale must not underflow the coordinate resolution.
        if (scales[i] / static_cast<double>(grid_n - 1) < 1e-12)
            throw std::invalid_argument("lil: scale finer than the grid resolution");
    }
    std::vector<std::vector<Point>> parts;
    for (double r : scales) parts.push_back(GridSpec{nu, grid_n, r, true}.points());
    Layout layout = union_layout(parts, "corner scales", budget);
    ScaleLayout out;
    out.h = h;
    out.scales = scales;
    out.members.resize(scales.size());
    for (std::size_t j = 0; j < scales.size(); ++j) {
        const double lim = scales[j] * (1.0 + 1e-12);
        for (std::size_t i = 0; i < layout.points.size(); ++i) {
            bool in = true;
            for (double c : layout.points[i].coords())
                if (c > lim) in = false;
            if (in) out.members[j].push_back(i);
        }
    }
    out.model = build_field_model(std::move(layout), HurstParam(h));
    return out;
}

double chung_normalizer(double r, double h, std::size_t nu, ModulusKind kind, const ModulusTables* tables) {
    const double dn = static_cast<double>(nu);
    double psi = 0.0;
    if (kind == ModulusKind::lower) {
        psi = psi_lower(r, h, nu);
    } else {
        if (!tables) throw std::invalid_argument("lil: the upper modulus needs modulus tables");
        if (tables->h != h || tables->nu != nu) throw std::invalid_argument("lil: modulus table built for another (h, nu)");
        if (!tables->covers(r)) throw std::invalid_argument("lil: scale outside the modulus table");
        psi = tables->psi_upper(r);
    }
    return std::pow(r, dn * h) * psi;
}

namespace {

std::vector<double> normalizers(const ScaleLayout& L, ModulusKind kind, const ModulusTables* tables) {
    std::vector<double> n;
    for (double r : L.scales) n.push_back(chung_normalizer(r, L.h, L.model.layout->nu(), kind, tables));
    return n;
}

int dyadic_index(double r) { return static_cast<int>(std::lround(-std::log2(r))); }

json quantiles_of(const std::vector<double>& v) {
    return json{{"min", *std::min_element(v.begin(), v.end())},
                {"q05", quantile(v, 0.05)},
                {"q25", quantile(v, 0.25)},
                {"median", quantile(v, 0.5)},
                {"q75", quantile(v, 0.75)},
                {"q95", quantile(v, 0.95)},
                {"max", *std::max_element(v.begin(), v.end())}};
}

double post_burn_min(const std::vector<double>& scales, const std::vector<double>& vals, double burn_in_r) {
    double m = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < scales.size(); ++j)
        if (scales[j] <= burn_in_r) m = std::min(m, vals[j]);
    return m;
}

}  // namespace

LilSweep chung_sweep(const ScaleLayout& L, std::size_t replicates, std::uint64_t seed, ModulusKind kind,
                     const ModulusTables* tables, double burn_in_r, unsigned workers) {
    if (replicates < 1) throw std::invalid_argument("lil: replicates must be >= 1");
    if (!(burn_in_r >= L.scales.back())) throw std::invalid_argument("lil: burn-in leaves no scales");
    const auto norm = normalizers(L, kind, tables);
    LilSweep sw;
    sw.h = L.h;
    sw.nu = L.model.layout->nu();
    sw.kind = kind;
    sw.scales = L.scales;
    sw.replicates = replicates;
    sw.seed = seed;
    sw.burn_in_r = burn_in_r;
    sw.M.assign(replicates, std::vector<double>(L.scales.size()));
    sw.ratios = sw.M;
    sw.liminf_proxy.assign(replicates, 0.0);
    parallel_for(replicates, workers, [&](std::size_t rep) {
        const FieldSample s = sample_path(L.model, seed, rep);
        for (std::size_t j = 0; j < L.scales.size(); ++j) {
            double m = 0.0;
            for (std::size_t i : L.members[j]) m = std::max(m, std::abs(s.values[i]));
            sw.M[rep][j] = m;
            sw.ratios[rep][j] = m / norm[j];
        }
        sw.liminf_proxy[rep] = post_burn_min(L.scales, sw.ratios[rep], burn_in_r);
    });
    return sw;
}

std::string LilSweep::to_csv() const {
    std::string out = "replicate,k,r,M,ratio\n";
    char buf[160];
    for (std::size_t rep = 0; rep < replicates; ++rep)
        for (std::size_t j = 0; j < scales.size(); ++j) {
            std::snprintf(buf, sizeof buf, "%zu,%d,%.17g,%.17g,%.17g\n", rep, dyadic_index(scales[j]), scales[j],
                          M[rep][j], ratios[rep][j]);
            out += buf;
        }
    return out;
}

json LilSweep::summary() const {
    bool positive = true;
    for (double v : liminf_proxy)
        if (!(v > 0.0 && std::isfinite(v))) positive = false;
    return json{{"modulus", to_string(kind)},
                {"h", h},
                {"nu", nu},
                {"scales", scales},
                {"replicates", replicates},
                {"seed", seed},
                {"burn_in_r", burn_in_r},
                {"liminf_proxy", quantiles_of(liminf_proxy)},
                {"all_positive_finite", positive}};
}

FlilSweep flil_sweep(const ScaleLayout& L, const RkhsElement& phi, std::size_t replicates, std::uint64_t seed,
                     ModulusKind kind, const ModulusTables* tables, double burn_in_r, unsigned workers) {
    if (replicates < 1) throw std::invalid_argument("flil: replicates must be >= 1");
    if (!(burn_in_r >= L.scales.back())) throw std::invalid_argument("flil: burn-in leaves no scales");
    const std::size_t nu = L.model.layout->nu();
    if (!phi.anchors.empty() && (phi.h != L.h || phi.nu() != nu))
        throw std::invalid_argument("flil: phi does not match (h, nu)");
    const double pn = rkhs_norm(phi);
    if (!(pn < 1.0)) throw std::invalid_argument("flil: |phi|_nu must be < 1, got " + std::to_string(pn));
    const double dn = static_cast<double>(nu);
    const auto& pts = L.model.layout->points;

    // Per scale: the eta normaliser, the statistic's prefactor and phi at t = x / r.
    std::vector<double> eta_div(L.scales.size()), pref(L.scales.size());
    std::vector<std::vector<double>> phi_at(L.scales.size());
    for (std::size_t j = 0; j < L.scales.size(); ++j) {
        const double r = L.scales[j];
        const double psi = chung_normalizer(r, L.h, nu, kind, tables) / std::pow(r, dn * L.h);
        eta_div[j] = std::pow(r, dn * L.h) * (kind == ModulusKind::lower ? std::sqrt(std::log(-std::log(r)))
                                                                        : std::pow(psi, -dn / (2.0 * L.h)));
        pref[j] = std::pow(psi, -1.0 - dn / (2.0 * L.h));
        for (std::size_t i : L.members[j]) {
            std::vector<double> t(nu);
            for (std::size_t d = 0; d < nu; ++d) t[d] = std::min(1.0, pts[i][d] / r);
            phi_at[j].push_back(evaluate(phi, Point(std::move(t))));
        }
    }

    FlilSweep sw;
    sw.h = L.h;
    sw.nu = nu;
    sw.kind = kind;
    sw.phi_norm = pn;
    sw.scales = L.scales;
    sw.replicates = replicates;
    sw.seed = seed;
    sw.burn_in_r = burn_in_r;
    sw.stat.assign(replicates, std::vector<double>(L.scales.size()));
    sw.min_over_scales.assign(replicates, 0.0);
    parallel_for(replicates, workers, [&](std::size_t rep) {
        const FieldSample s = sample_path(L.model, seed, rep);
        for (std::size_t j = 0; j < L.scales.size(); ++j) {
            double m = 0.0;
            const auto& mem = L.members[j];
            for (std::size_t q = 0; q < mem.size(); ++q)
                m = std::max(m, std::abs(s.values[mem[q]] / eta_div[j] - phi_at[j][q]));
            sw.stat[rep][j] = pref[j] * m;
        }
        sw.min_over_scales[rep] = post_burn_min(L.scales, sw.stat[rep], burn_in_r);
    });
    return sw;
}

std::string FlilSweep::to_csv() const {
    std::string out = "replicate,k,r,stat\n";
    char buf[128];
    for (std::size_t rep = 0; rep < replicates; ++rep)
        for (std::size_t j = 0; j < scales.size(); ++j) {
            std::snprintf(buf, sizeof buf, "%zu,%d,%.17g,%.17g\n", rep, dyadic_index(scales[j]), scales[j],
                          stat[rep][j]);
            out += buf;
        }
    return out;
}

json FlilSweep::summary() const {
    bool positive = true;
    for (double v : min_over_scales)
        if (!(v > 0.0 && std::isfinite(v))) positive = false;
    // The limiting constants are kappa^(h/nu) (1 - |phi|^2)^(-h/nu) / sqrt(2);
    // kappa is unknown, so only the phi-dependent factor is reported.
    const double dn = static_cast<double>(nu);
    return json{{"modulus", to_string(kind)},
                {"h", h},
                {"nu", nu},
                {"phi_norm", phi_norm},
                {"scales", scales},
                {"replicates", replicates},
                {"seed", seed},
                {"burn_in_r", burn_in_r},
                {"phi_factor", std::pow(1.0 - phi_norm * phi_norm, -h / dn) / std::sqrt(2.0)},
                {"min_over_scales", quantiles_of(min_over_scales)},
                {"all_positive_finite", positive}};
}

// ---------------------------------------------------------------- Hölder exponents

double deterministic_holder_slope(double h, std::size_t nu, const Location& loc, const std::vector<double>& rho,
                                  std::size_t grid_n) {
    std::vector<double> x, y;
    for (double r : rho) {
        const auto pts = region_points(nu, loc, r, grid_n);
        double m = 0.0;
        for (std::size_t i = 0; i < pts.size(); ++i)
            for (std::size_t j = i + 1; j < pts.size(); ++j) m = std::max(m, sym_diff_measure(pts[i], pts[j]));
        x.push_back(std::log(r));
        y.push_back(h * std::log(m));
    }
    return ols(x, y).slope;
}

namespace {

void require_range(const std::vector<double>& v, const char* what) {
    if (v.size() < 5) throw std::invalid_argument(std::string("holder: ") + what + " needs >= 5 points");
    const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    if (*hi / *lo < 10.0 * (1.0 - 1e-12))
        throw std::invalid_argument(std::string("holder: ") + what + " must span >= one decade");
}

}  // namespace

HolderEstimate holder_exponents(double h, std::size_t nu, const Location& loc, std::vector<double> rho,
                                std::size_t grid_n, std::size_t replicates, std::uint64_t seed, unsigned workers) {
    if (!(h > 0.0 && h <= 0.5)) throw std::invalid_argument("holder: requires 0 < h <= 1/2");
    if (!(static_cast<double>(nu) * h < 1.0)) throw std::invalid_argument("holder: requires nu h < 1");
    if (replicates < 2) throw std::invalid_argument("holder: replicates must be >= 2");
    std::sort(rho.begin(), rho.end());
    rho.erase(std::unique(rho.begin(), rho.end()), rho.end());
    require_range(rho, "rho grid");

    std::vector<std::vector<Point>> parts;
    for (double r : rho) parts.push_back(region_points(nu, loc, r, grid_n));
    const std::vector<Point> smallest = parts.front();
    Layout layout = union_layout(parts, "holder " + loc.label());
    std::vector<std::vector<std::size_t>> members(rho.size());
    for (std::size_t j = 0; j < rho.size(); ++j) {
        for (const auto& p : parts[j]) {
            const auto it = std::find(layout.points.begin(), layout.points.end(), p);
            members[j].push_back(static_cast<std::size_t>(it - layout.points.begin()));
        }
    }

    // Pairs of the smallest region in log-distance bins.
    constexpr std::size_t bins = 8;
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    std::vector<double> pd;
    for (std::size_t i = 0; i < smallest.size(); ++i)
        for (std::size_t j = i + 1; j < smallest.size(); ++j) {
            pairs.emplace_back(members[0][i], members[0][j]);
            pd.push_back(euclidean(smallest[i], smallest[j]));
        }
    const auto [dmin_it, dmax_it] = std::minmax_element(pd.begin(), pd.end());
    const double ldmin = std::log(*dmin_it), ldmax = std::log(*dmax_it);
    std::vector<std::size_t> bin_of(pairs.size());
    for (std::size_t q = 0; q < pairs.size(); ++q) {
        const double w = ldmax > ldmin ? (std::log(pd[q]) - ldmin) / (ldmax - ldmin) : 0.0;
        bin_of[q] = std::min(bins - 1, static_cast<std::size_t>(w * bins));
    }

    const FieldModel model = build_field_model(std::move(layout), HurstParam(h));
    std::vector<std::vector<double>> log_osc(replicates, std::vector<double>(rho.size()));
    std::vector<std::vector<double>> bin_sum(replicates, std::vector<double>(bins, 0.0));
    std::vector<std::vector<std::size_t>> bin_cnt(replicates, std::vector<std::size_t>(bins, 0));
    parallel_for(replicates, workers, [&](std::size_t rep) {
        const FieldSample s = sample_path(model, seed, rep);
        for (std::size_t j = 0; j < rho.size(); ++j) {
            double lo = std::numeric_limits<double>::infinity(), hi = -lo;
            for (std::size_t i : members[j]) {
                lo = std::min(lo, s.values[i]);
                hi = std::max(hi, s.values[i]);
            }
            log_osc[rep][j] = std::log(hi - lo);
        }
        for (std::size_t q = 0; q < pairs.size(); ++q) {
            const double d = std::abs(s.values[pairs[q].first] - s.values[pairs[q].second]);
            if (d > 0.0) {
                bin_sum[rep][bin_of[q]] += std::log(d);
                ++bin_cnt[rep][bin_of[q]];
            }
        }
    });

    HolderEstimate est;
    est.location = loc;
    est.rho = rho;
    est.rho_range = {rho.front(), rho.back()};
    est.replicates = replicates;
    est.points = model.layout->points.size();
    std::vector<double> lr;
    for (std::size_t j = 0; j < rho.size(); ++j) {
        double m = 0.0;
        for (std::size_t rep = 0; rep < replicates; ++rep) m += log_osc[rep][j];
        est.mean_log_osc.push_back(m / static_cast<double>(replicates));
        lr.push_back(std::log(rho[j]));
    }
    const LinearFit pw = ols(lr, est.mean_log_osc);
    est.exponent_pointwise = pw.slope;
    est.stderr_pointwise = pw.stderr_slope;

    std::vector<double> bx, by, bd;
    for (std::size_t b = 0; b < bins; ++b) {
        double sum = 0.0, dsum = 0.0;
        std::size_t cnt = 0, dcnt = 0;
        for (std::size_t rep = 0; rep < replicates; ++rep) {
            sum += bin_sum[rep][b];
            cnt += bin_cnt[rep][b];
        }
        for (std::size_t q = 0; q < pairs.size(); ++q)
            if (bin_of[q] == b) dsum += std::log(pd[q]), ++dcnt;
        if (cnt == 0 || dcnt == 0) continue;
        bx.push_back(dsum / static_cast<double>(dcnt));
        by.push_back(sum / static_cast<double>(cnt));
        bd.push_back(std::exp(bx.back()));
    }
    if (bd.size() >= 5 && *std::max_element(bd.begin(), bd.end()) / *std::min_element(bd.begin(), bd.end()) >= 10.0)
        est.exponent_local = ols(bx, by).slope;
    est.deterministic_exponent = deterministic_holder_slope(h, nu, loc, rho, grid_n);
    return est;
}

json HolderEstimate::to_json() const {
    json j{{"location", location.label()},
           {"rho_range", {rho_range.first, rho_range.second}},
           {"exponent_pointwise", exponent_pointwise},
           {"stderr_pointwise", stderr_pointwise},
           {"deterministic_exponent", deterministic_exponent},
           {"replicates", replicates},
           {"points", points}};
    j["exponent_local"] = exponent_local ? json(*exponent_local) : json(nullptr);
    return j;
}

std::string HolderEstimate::to_csv() const {
    std::string out = "rho,mean_log_osc\n";
    char buf[96];
    for (std::size_t j = 0; j < rho.size(); ++j) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", rho[j], mean_log_osc[j]);
        out += buf;
    }
    return out;
}

}  // namespace mpfbm
