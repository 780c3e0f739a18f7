#pragma once
//
// Residual checks for the derived identities of weighted geometry: each
// evaluates both sides of one identity over a quadrature grid and returns a
// ResidualReport. Hypothesis-conditioned checks report hypothesis residuals
// as diagnostics instead of skipping.

#include <utility>

#include "wgeom/linearize.hpp"
#include "wgeom/report.hpp"
#include "wgeom/weighted.hpp"

namespace wgeom {

struct CheckOptions {
    double tolerance = 1e-6;
    // estimate order from residuals at two FD steps (meaningful on FD paths)
    bool convergence_order = false;
    // steps for the order estimate; coarse enough that truncation dominates
    // the 1/h^3 rounding noise of nested differences
    double order_step_coarse = 4e-3;
    double order_step_fine = 2e-3;
    // |df|_g floor below which sigma extraction masks a point
    double sigma_threshold = 1e-6;
    // u floor for checks requiring positivity
    double positivity_threshold = 1e-6;
    // wide step for second differences of derived scalars (rounding-limited)
    double second_fd_step = 2e-2;
    // evaluate the specialized Eq. (4.1) form in the tensor-divergence check
    bool specialized_form = false;
};

// div_f(Ric_f) = 1/2 dR_f
ResidualReport check_weighted_bianchi(const WeightedSpace& ws, const QuadratureGrid& grid,
                                      const CheckOptions& opts = {});

// div_f((D_f u) g) = d(D_f u) - (D_f u) df
ResidualReport check_divf_gtrace(const WeightedSpace& ws, const ScalarField& u,
                                 const QuadratureGrid& grid, const CheckOptions& opts = {});

// div_f(Hess u) = div_f((D_f u) g) + Ric_f(grad u, .) + (D_f u) df
ResidualReport check_divf_hessian(const WeightedSpace& ws, const ScalarField& u,
                                  const QuadratureGrid& grid, const CheckOptions& opts = {});

// 1/2 u dR_f = (D_f u) df for kernel elements u
ResidualReport check_kernel_consequence(const WeightedSpace& ws, const ScalarField& u,
                                        const QuadratureGrid& grid, const CheckOptions& opts = {});

// sigma with dR_f = -2 sigma df and D_f u = -sigma u; least-squares over
// chart directions, masked where |df|_g falls below the threshold.
std::pair<SigmaField, ResidualReport> extract_sigma(const WeightedSpace& ws, const ScalarField& u,
                                                    const QuadratureGrid& grid,
                                                    const CheckOptions& opts = {});

// drift Laplacian of e^{-f} with density -ln u equals -e^{-f}(R_f - (n-1)sigma)
ResidualReport check_log_identity(const WeightedSpace& ws, const ScalarField& u,
                                  const SigmaField& sigma, const QuadratureGrid& grid,
                                  const CheckOptions& opts = {});

// D_f f + (n l1 - c1) f + (n l0 - c0) = 0 under Ric_f = (l0 + l1 f) g and
// R_f = c0 + c1 f; hypothesis fits reported as diagnostics.
ResidualReport check_expander_trace(const WeightedSpace& ws, double lambda0, double lambda1,
                                    double c0, double c1, const QuadratureGrid& grid,
                                    const CheckOptions& opts = {});

// u tracelessRic_f = traceless Hess u for kernel elements
ResidualReport check_traceless_static(const WeightedSpace& ws, const ScalarField& u,
                                      const QuadratureGrid& grid, const CheckOptions& opts = {});

// div_f tracelessRic_f = 1/2 dR_f - (e^f/n) d(e^{-f}(R + Df))
ResidualReport check_traceless_divergence(const WeightedSpace& ws, const QuadratureGrid& grid,
                                          const CheckOptions& opts = {});

// 1/2 D_f |grad v|^2 = |Hess v|^2 + <grad v, grad D_f v> + Ric_f(grad v, grad v)
ResidualReport check_weighted_bochner(const WeightedSpace& ws, const ScalarField& v,
                                      const QuadratureGrid& grid, const CheckOptions& opts = {});

// div_f(T(grad u)) = (div_f T)(grad u) + <T, Hess u>; with specialized_form,
// also the Eq. (4.1) form for T = tracelessRic_f with fitted lambda, omega.
ResidualReport check_tensor_field_divergence(const WeightedSpace& ws, const SymTensorField& T,
                                             const ScalarField& u, const QuadratureGrid& grid,
                                             const CheckOptions& opts = {});

// Lap(R_f + 2 omega f - (2R/n) f) = -2 |tracelessRic|^2 under Ric_f = omega g
// and constant R
ResidualReport check_thm3_laplacian_identity(const WeightedSpace& ws, double omega,
                                             const QuadratureGrid& grid,
                                             const CheckOptions& opts = {});

// Stable catalog of identity ids, in suite order.
const std::vector<std::string>& identity_ids();
bool is_identity_id(const std::string& id);

}  // namespace wgeom
