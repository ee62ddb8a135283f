#pragma once

#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

namespace mpfbm {

using json = nlohmann::json;

// One inequality or identity check: pass iff lhs <= rhs + tolerance for
// inequalities, |lhs - rhs| <= tolerance for identities.
struct CheckReport {
    std::string check;
    json inputs = json::object();
    double lhs = 0.0;
    double rhs = 0.0;
    double tolerance = 0.0;
    bool pass = false;

    json to_json() const;
};

CheckReport check_le(std::string name, json inputs, double lhs, double rhs, double tolerance);
CheckReport check_eq(std::string name, json inputs, double lhs, double rhs, double tolerance);

// Aggregate of many reports; keeps only the violations in full.
struct CheckSummary {
    explicit CheckSummary(std::string name = {}) : check(std::move(name)) {}

    std::string check;
    std::size_t total = 0;
    std::size_t violations = 0;
    double worst_margin = 0.0;  // max of lhs - rhs - tolerance (inequalities)
    std::vector<CheckReport> failed;

    void add(const CheckReport& r);
    bool pass() const { return violations == 0; }
    json to_json() const;
};

}  // namespace mpfbm
