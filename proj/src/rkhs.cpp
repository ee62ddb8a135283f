#include "mpfbm/rkhs.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mpfbm {

void RkhsElement::validate() const {
    if (anchors.size() != coeffs.size()) throw std::invalid_argument("rkhs element: anchors and coeffs differ in size");
    HurstParam(h).require_kernel_regime();
    for (const auto& a : anchors) a.require_dim(nu());
    for (double c : coeffs)
        if (!std::isfinite(c)) throw std::invalid_argument("rkhs element: non-finite coefficient");
}

json RkhsElement::to_json() const {
    json a = json::array();
    for (const auto& p : anchors) a.push_back(std::vector<double>(p.coords().begin(), p.coords().end()));
    return json{{"h", h}, {"anchors", a}, {"coeffs", coeffs}};
}

RkhsElement RkhsElement::from_json(const json& j) {
    RkhsElement f;
    f.h = j.at("h").get<double>();
    for (const auto& a : j.at("anchors")) f.anchors.emplace_back(a.get<std::vector<double>>());
    f.coeffs = j.at("coeffs").get<std::vector<double>>();
    f.validate();
    return f;
}

Eigen::MatrixXd gram(const std::vector<Point>& anchors, double h) {
    const HurstParam hp(h);
    for (std::size_t i = 0; i < anchors.size(); ++i)
        for (std::size_t j = i + 1; j < anchors.size(); ++j)
            if (anchors[i] == anchors[j]) throw std::invalid_argument("gram: anchors must be distinct");
    return covariance_matrix(anchors, hp);
}

double rkhs_norm(const RkhsElement& f) {
    f.validate();
    if (f.anchors.empty()) return 0.0;
    const Eigen::MatrixXd K = gram(f.anchors, f.h);
    const Eigen::Map<const Eigen::VectorXd> c(f.coeffs.data(), static_cast<Eigen::Index>(f.coeffs.size()));
    return std::sqrt(std::max(0.0, c.dot(K * c)));
}

double rkhs_inner(const RkhsElement& f, const RkhsElement& g) {
    f.validate();
    g.validate();
    if (f.h != g.h) throw std::invalid_argument("rkhs_inner: elements of different spaces");
    const std::size_t m = f.anchors.size(), n = g.anchors.size();
    if (m == 0 || n == 0) return 0.0;
    std::vector<Point> joined = f.anchors;
    std::vector<std::size_t> where(n);
    for (std::size_t j = 0; j < n; ++j) {
        const auto it = std::find(joined.begin(), joined.end(), g.anchors[j]);
        where[j] = static_cast<std::size_t>(it - joined.begin());
        if (it == joined.end()) joined.push_back(g.anchors[j]);
    }
    const Eigen::MatrixXd K = gram(joined, f.h);
    Eigen::VectorXd cf = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(joined.size()));
    Eigen::VectorXd cg = cf;
    for (std::size_t i = 0; i < m; ++i) cf(static_cast<Eigen::Index>(i)) = f.coeffs[i];
    for (std::size_t j = 0; j < n; ++j) cg(static_cast<Eigen::Index>(where[j])) += g.coeffs[j];
    return cf.dot(K * cg);
}

double evaluate(const RkhsElement& f, const Point& t) {
    const HurstParam hp(f.h);
    double acc = 0.0;
    for (std::size_t i = 0; i < f.anchors.size(); ++i) acc += f.coeffs[i] * covariance(f.anchors[i], t, hp);
    return acc;
}

double reproduce(const RkhsElement& f, const Point& t) {
    RkhsElement kt;
    kt.h = f.h;
    kt.anchors = {t};
    kt.coeffs = {1.0};
    return rkhs_inner(f, kt);
}

CheckSummary holder_bound_check(const RkhsElement& f, const std::vector<std::pair<Point, Point>>& pairs,
                                double M_hat) {
    if (!(M_hat > 0.0)) throw std::invalid_argument("holder_bound_check: M_hat must be positive");
    const double norm = rkhs_norm(f);
    CheckSummary sum{"rkhs_holder_bound"};
    for (const auto& [s, t] : pairs) {
        const double d = evaluate(f, s) - evaluate(f, t);
        const double lhs = d * d;
        const double rhs = std::pow(M_hat, 2.0 * f.h) * pow_nonneg(euclidean(s, t), 2.0 * f.h) * norm * norm;
        sum.add(check_le("rkhs_holder_bound",
                         json{{"s", std::vector<double>(s.coords().begin(), s.coords().end())},
                              {"t", std::vector<double>(t.coords().begin(), t.coords().end())},
                              {"M_hat", M_hat},
                              {"norm", norm}},
                         lhs, rhs, 1e-12 * (rhs + lhs) + 1e-300));
    }
    return sum;
}

namespace {

double loglog(double x) { return std::log(-std::log(x)); }

RescaledPath restrict_to(const FieldSample& sample, double r, double normalizer) {
    RescaledPath p;
    p.r = r;
    p.normalizer = normalizer;
    const auto& pts = sample.layout->points;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        bool inside = true;
        for (double c : pts[i].coords())
            if (c > r) inside = false;
        if (!inside) continue;
        std::vector<double> t(pts[i].dim());
        for (std::size_t d = 0; d < t.size(); ++d) t[d] = std::min(1.0, pts[i][d] / r);
        p.t.emplace_back(std::move(t));
        p.values.push_back(sample.values[i] / normalizer);
    }
    if (p.t.empty()) throw std::invalid_argument("rescale: no sample points inside [0,r]^nu");
    return p;
}

}  // namespace

RescaledPath rescale_lower(const FieldSample& sample, double r) {
    if (!(r > 0.0 && r < std::exp(-1.0))) throw std::invalid_argument("rescale_lower: r must lie in (0, 1/e)");
    const double nu = static_cast<double>(sample.layout->nu());
    return restrict_to(sample, r, std::pow(r, nu * sample.h) * std::sqrt(loglog(r)));
}

RescaledPath rescale_upper(const FieldSample& sample, double r, const ModulusTables& tables) {
    if (!tables.covers(r)) throw std::invalid_argument("rescale_upper: r outside the modulus table");
    const double nu = static_cast<double>(sample.layout->nu());
    if (tables.h != sample.h || tables.nu != sample.layout->nu())
        throw std::invalid_argument("rescale_upper: table built for another (h, nu)");
    const double psi = tables.psi_upper(r);
    return restrict_to(sample, r, std::pow(r, nu * sample.h) * std::pow(psi, -nu / (2.0 * sample.h)));
}

CheckReport techflil_check(const FieldSample& sample, double s, double r, double u, const RkhsElement& f,
                           double M_hat) {
    if (!(0.0 < s && s < r && r < u && u < std::exp(-1.0)))
        throw std::invalid_argument("techflil_check: needs 0 < s < r < u < 1/e");
    const double h = sample.h;
    const std::size_t nu_i = sample.layout->nu();
    const double nu = static_cast<double>(nu_i);
    if (!f.anchors.empty() && (f.h != h || f.nu() != nu_i))
        throw std::invalid_argument("techflil_check: element does not match the sample");
    auto c = [&](double x) { return std::pow(x, nu * h) * std::sqrt(loglog(x)); };
    if (!(c(s) <= c(r) && c(r) <= c(u)))
        throw std::invalid_argument("techflil_check: x^(nu h) sqrt(log log 1/x) is not monotone across s, r, u");
    const double norm = rkhs_norm(f);

    auto sup_dev = [&](const RescaledPath& p) {
        double m = 0.0;
        for (std::size_t i = 0; i < p.t.size(); ++i) m = std::max(m, std::abs(p.values[i] - evaluate(f, p.t[i])));
        return m;
    };
    const RescaledPath pr = rescale_lower(sample, r);
    const RescaledPath ps = rescale_lower(sample, s);
    double f_inf = 0.0;
    for (const auto& t : ps.t) f_inf = std::max(f_inf, std::abs(evaluate(f, t)));

    const double e = h / nu + 0.5;
    const double LLr = loglog(r), LLs = loglog(s), LLu = loglog(u);
    TechFlilTerms T;
    T.lhs = std::pow(LLr, e) * sup_dev(pr);
    T.first = std::pow(s / u, nu * h) * std::pow(LLu / LLs, h / nu) * std::pow(LLs, e) * sup_dev(ps);
    T.second = std::pow(M_hat, h) * std::pow(nu, 0.5 * h) * std::pow(LLu, e) * std::pow((u - s) / u, h) * norm;
    T.third = std::pow(LLu, e) * std::sqrt(std::max(0.0, 1.0 - std::pow(s / u, 2.0 * nu * h) * LLs / LLu)) * f_inf;
    const double scale = std::abs(T.lhs) + std::abs(T.first) + std::abs(T.second) + std::abs(T.third);
    // lhs >= rhs written as -lhs <= -rhs.
    CheckReport rep = check_le("techflil",
                               json{{"s", s},
                                    {"r", r},
                                    {"u", u},
                                    {"replicate", sample.replicate},
                                    {"norm", norm},
                                    {"f_inf", f_inf},
                                    {"first", T.first},
                                    {"second", T.second},
                                    {"third", T.third}},
                               -T.lhs, -T.rhs(), 1e-12 * scale + 1e-300);
    rep.lhs = T.lhs;
    rep.rhs = T.rhs();
    return rep;
}

}  // namespace mpfbm
