#pragma once
//
// Discretizations of the drift Laplacian and the adjoint operator: spectral
// bases with analytic derivatives, Galerkin assembly over quadrature grids,
// generalized eigensolves in the weighted inner product, SVD-based kernel
// search, and the resolution-ladder nonexistence probe.

#include <string>
#include <vector>

#include "wgeom/quadrature.hpp"
#include "wgeom/weighted.hpp"

namespace wgeom {

struct DiscreteBasis {
    std::string kind;
    int size = 0;
    std::function<double(int, const ChartPoint&)> value;
    std::function<Vec(int, const ChartPoint&)> d1;
    std::function<Mat(int, const ChartPoint&)> d2;

    ScalarField field(int k) const;                 // one basis function
    ScalarField combine(const Vec& coeffs) const;   // sum c_k phi_k
};

// kinds: fourier-circle (param: max harmonic), interval-dirichlet (param:
// mode count), sphere-harmonic-chart (param: max degree; Dirichlet subset
// l+m odd on the hemisphere), poly-cube (param: max total degree),
// grid-fd (param: interior node count, 1-d models only)
DiscreteBasis make_basis(const MetricModel& m, const std::string& kind, int param);
std::vector<std::string> basis_kinds();

struct AssembledOperator {
    Mat L;                  // <phi_j, Drift phi_k>_{L2_f} (grid-fd: FD matrix)
    Mat G;                  // weighted Gram matrix
    double gram_condition = 1.0;
    double asymmetry = 0.0; // max |L - L^T| before symmetrization
};

// Galerkin drift Laplacian; throws NumericError when the Gram matrix
// condition number exceeds 1e12.
AssembledOperator assemble_drift_laplacian(const WeightedSpace& ws, const DiscreteBasis& basis,
                                           const QuadratureGrid& grid);

struct SpectralResult {
    std::vector<double> eigenvalues;   // sigma_k ascending, Drift u = -sigma u
    Mat eigenfields;                   // coefficient columns
    double orthonormality_residual = 0.0;  // in the L2_f inner product
};

SpectralResult solve_drift_eigen(const WeightedSpace& ws, const DiscreteBasis& basis,
                                 const QuadratureGrid& grid, int k);

// Tall matrix with A c = vectorized adjoint-operator samples of sum c_k
// phi_k, rows weighted by sqrt(quadrature weight * sqrt(det g) * e^{-f}).
Mat assemble_adjoint_matrix(const WeightedSpace& ws, const DiscreteBasis& basis,
                            const QuadratureGrid& grid);

struct KernelCandidate {
    Vec coefficients;              // L2_f-normalized
    double sup_residual = 0.0;     // sup over the grid of max |adjoint|
    double singular_value = 0.0;
    bool accepted = false;
};

struct KernelSearchResult {
    std::vector<KernelCandidate> candidates;   // G-orthonormalized
    double min_singular_value = 0.0;           // over the whole spectrum
};

// Candidates = right singular vectors with singular value below tol
// (default 1e-6 * sqrt(grid size)); pointwise acceptance at accept_tol.
KernelSearchResult kernel_search(const WeightedSpace& ws, const DiscreteBasis& basis,
                                 const QuadratureGrid& grid, double tol = -1.0,
                                 double accept_tol = 1e-6);

struct ProbeLevel {
    int resolution = 0;
    double min_singular_value = 0.0;
    int kernel_dim = 0;
};

struct ProbeReport {
    std::string basis_kind;
    std::vector<ProbeLevel> levels;
    double floor = 0.0;
    bool bounded_below = false;    // min singular value >= floor at all levels
    bool kernel_found = false;
    std::string note;
    std::vector<std::pair<std::string, double>> diagnostics;
};

// Min singular value across the resolution ladder (1-d: N in {32,64,128};
// sphere: degree in {4,6,8}); hypothesis residuals are diagnostics.
ProbeReport nonexistence_probe(const WeightedSpace& ws, const std::string& basis_kind,
                               double floor, double kernel_tol = 1e-6);

// Dense symmetrized finite-difference spectrum oracle for 1-d models; k
// lowest sigma. Richardson variant extrapolates from N and 2N.
std::vector<double> dense_fd_spectrum(const WeightedSpace& ws, int n, int k);
std::vector<double> dense_fd_spectrum_richardson(const WeightedSpace& ws, int n, int k);

// Largest principal angle between the spans of two G-orthonormal coefficient
// sets (columns), in the metric of the Gram matrix G.
double principal_angle_gap(const Mat& A, const Mat& B, const Mat& G);

}  // namespace wgeom
