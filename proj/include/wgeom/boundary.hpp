#pragma once
//
// Boundary machinery: surface gravity per boundary component, the weighted
// boundary-area identity, the Pohozaev-Schoen identity, the Gauss-equation
// reduction of Ric_f(nu, nu), and the area estimate of the boundary theorem.

#include "wgeom/identities.hpp"
#include "wgeom/quadrature.hpp"
#include "wgeom/report.hpp"
#include "wgeom/weighted.hpp"

namespace wgeom {

struct SurfaceGravity {
    std::string component;
    double kappa = 0.0;      // |grad u| on the component
    double variation = 0.0;  // max deviation across the component
};

// Pointwise induced geometry at a boundary parameter point: the data entering
// the Gauss-equation reduction.
struct BoundaryPointData {
    Vec normal;                 // contravariant unit outward
    double perelman_boundary;   // R_f of the induced boundary space
    double mean_curvature;      // H = tr A
    double second_form_norm;    // |A|_g
    double normal_derivative_f; // d_nu f
};

BoundaryPointData boundary_point_data(const WeightedSpace& ws, const BoundaryComponent& comp,
                                      const Vec& param);

// |grad u| per component; throws NumericError when u fails to vanish on the
// boundary within vanish_tolerance.
std::vector<SurfaceGravity> surface_gravity(const WeightedSpace& ws, const ScalarField& u,
                                            const BoundaryGrid& bgrid,
                                            double vanish_tolerance = 1e-6);

// (n-1) sum_a kappa_a sigma_f(Gamma_a) = int R_f u dVol_f, with the Stokes
// form (n-1) int <grad u, nu> dsigma_f = -int R_f u dVol_f in the
// diagnostics. Signs follow from tracing the adjoint operator with the
// negative-spectrum Laplacian and nu = -grad u/|grad u|.
// Throws NumericError when u is negative beyond positivity_tolerance at an
// interior grid point.
TwoSidedReport boundary_area_identity(const WeightedSpace& ws, const ScalarField& u,
                                      const QuadratureGrid& grid, const BoundaryGrid& bgrid,
                                      double tolerance = 1e-6,
                                      double positivity_tolerance = 1e-6);

// int_boundary T(X, nu) dsigma_f = 1/2 int <T, L_X g> dVol_f
//                                  + int (div_f T)(X) dVol_f
TwoSidedReport pohozaev_schoen(const WeightedSpace& ws, const SymTensorField& T,
                               const VectorField& X, const QuadratureGrid& grid,
                               const BoundaryGrid& bgrid, double tolerance = 1e-6);

// Ric_f(nu,nu) = 1/2 R_f - 1/2 R_f_boundary + 1/2 H_f^2 - 1/2 |A|^2 with
// H_f = H - d_nu f; |A| and d_nu f reported as hypothesis diagnostics.
ResidualReport gauss_reduction_check(const WeightedSpace& ws, const BoundaryGrid& bgrid,
                                     const CheckOptions& opts = {});

struct InequalityReport {
    std::string id;
    double lhs = 0.0;
    double rhs = 0.0;
    double slack = 0.0;  // rhs - lhs
    bool strict = false;
    std::vector<std::pair<std::string, double>> diagnostics;
};

// (c0+c1) sum_a k_a sigma_f(Gamma_a) < sum_a k_a int (R_f_boundary - c1 f);
// hypothesis fits (R_f affine in f, d_nu f = 0) reported, never fatal.
InequalityReport thm1_estimate(const WeightedSpace& ws, const ScalarField& u, double c0, double c1,
                               const QuadratureGrid& grid, const BoundaryGrid& bgrid);

}  // namespace wgeom
