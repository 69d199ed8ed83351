#pragma once

#include <string>
#include <vector>

namespace modcurv {

/// One named check inside a verification suite.
struct CheckResult {
    std::string name;
    bool pass = false;
    double max_error = 0.0;   ///< 0 for exact checks
    double tolerance = 0.0;   ///< 0 means "exact"
    std::string details;
};

struct VerificationReport {
    std::string suite;
    std::vector<CheckResult> checks;

    void add(std::string name, bool pass, double max_error = 0.0, double tolerance = 0.0,
             std::string details = {}) {
        checks.push_back({std::move(name), pass, max_error, tolerance, std::move(details)});
    }
    bool all_pass() const {
        for (const auto& c : checks)
            if (!c.pass) return false;
        return true;
    }
};

} // namespace modcurv
