#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace wgeom {

// Outcome of one identity/consistency check over a sample grid.
struct ResidualReport {
    std::string identity_id;
    int grid_size = 0;
    double sup_residual = 0.0;
    double mean_residual = 0.0;
    std::optional<double> convergence_order;  // from two FD resolutions
    double masked_fraction = 0.0;
    double tolerance = 0.0;
    bool pass = false;
    // named side conditions (hypothesis residuals, fit errors, ...)
    std::vector<std::pair<std::string, double>> diagnostics;

    void finalize() { pass = sup_residual < tolerance; }
};

// Two-sided integral identity: both values and their relative gap.
struct TwoSidedReport {
    std::string id;
    double lhs = 0.0;
    double rhs = 0.0;
    double relative_gap = 0.0;
    double tolerance = 0.0;
    bool pass = false;
    std::vector<std::pair<std::string, double>> diagnostics;

    void finalize() {
        relative_gap = std::abs(lhs - rhs) / (1.0 + std::max(std::abs(lhs), std::abs(rhs)));
        pass = relative_gap < tolerance;
    }
};

}  // namespace wgeom
