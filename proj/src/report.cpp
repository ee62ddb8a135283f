#include "mpfbm/report.hpp"

#include <cmath>
#include <limits>

namespace mpfbm {

json CheckReport::to_json() const {
    return json{{"check", check}, {"inputs", inputs},       {"lhs", lhs},
                {"rhs", rhs},     {"tolerance", tolerance}, {"pass", pass}};
}

CheckReport check_le(std::string name, json inputs, double lhs, double rhs, double tolerance) {
    CheckReport r{std::move(name), std::move(inputs), lhs, rhs, tolerance, false};
    r.pass = std::isfinite(lhs) && std::isfinite(rhs) && lhs <= rhs + tolerance;
    return r;
}

CheckReport check_eq(std::string name, json inputs, double lhs, double rhs, double tolerance) {
    CheckReport r{std::move(name), std::move(inputs), lhs, rhs, tolerance, false};
    r.pass = std::isfinite(lhs) && std::isfinite(rhs) && std::abs(lhs - rhs) <= tolerance;
    return r;
}

void CheckSummary::add(const CheckReport& r) {
    if (total == 0) worst_margin = -std::numeric_limits<double>::infinity();
    ++total;
    worst_margin = std::max(worst_margin, r.lhs - r.rhs - r.tolerance);
    if (!r.pass) {
        ++violations;
        if (failed.size() < 20) failed.push_back(r);
    }
}

json CheckSummary::to_json() const {
    json f = json::array();
    for (const auto& r : failed) f.push_back(r.to_json());
    return json{{"check", check},
                {"total", total},
                {"violations", violations},
                {"worst_margin", total ? worst_margin : 0.0},
                {"pass", pass()},
                {"failed", f}};
}

}  // namespace mpfbm
