#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "wgeom/metric.hpp"
#include "wgeom/solver.hpp"

using namespace wgeom;
using nlohmann::json;

namespace {

WeightedSpace make_space(const json& model, const json& density) {
    MetricModel m = make_model(model);
    return {m, make_density(m, density)};
}

}  // namespace

TEST_CASE("Fourier basis diagonalizes the circle Laplacian") {
    WeightedSpace ws = make_space(json{{"name", "circle"}}, json{{"name", "zero"}});
    DiscreteBasis b = make_basis(ws.model, "fourier-circle", 8);
    QuadratureGrid g = build_grid(ws.model, 64);
    AssembledOperator op = assemble_drift_laplacian(ws, b, g);
    CHECK(op.asymmetry < 1e-10);
    SpectralResult sr = solve_drift_eigen(ws, b, g, 11);
    const double expect[11] = {0, 1, 1, 4, 4, 9, 9, 16, 16, 25, 25};
    for (int i = 0; i < 11; ++i)
        CHECK(std::abs(sr.eigenvalues[static_cast<std::size_t>(i)] - expect[i]) < 1e-10);
    CHECK(sr.orthonormality_residual < 1e-8);
}

TEST_CASE("circle with f = cos x keeps constants in the kernel") {
    WeightedSpace ws = make_space(json{{"name", "circle"}},
                                  json{{"name", "expr"}, {"expr", "cos(theta)"}});
    DiscreteBasis b = make_basis(ws.model, "fourier-circle", 12);
    QuadratureGrid g = build_grid(ws.model, 96);
    SpectralResult sr = solve_drift_eigen(ws, b, g, 1);
    CHECK(std::abs(sr.eigenvalues[0]) < 1e-10);
}

TEST_CASE("sphere harmonics recover l(l+1)") {
    WeightedSpace ws = make_space(json{{"name", "sphere-spherical"}}, json{{"name", "zero"}});
    DiscreteBasis b = make_basis(ws.model, "sphere-harmonic-chart", 6);
    QuadratureGrid g = build_grid(ws.model, 18);
    AssembledOperator op = assemble_drift_laplacian(ws, b, g);
    CHECK(op.asymmetry < 1e-10);
    SpectralResult sr = solve_drift_eigen(ws, b, g, 9);
    const double expect[9] = {0, 2, 2, 2, 6, 6, 6, 6, 6};
    for (int i = 0; i < 9; ++i)
        CHECK(std::abs(sr.eigenvalues[static_cast<std::size_t>(i)] - expect[i]) < 1e-6);
}

TEST_CASE("interval Gaussian-density spectrum matches the dense FD oracle") {
    WeightedSpace ws = make_space(json{{"name", "interval"}, {"a", -3.0}, {"b", 3.0}},
                                  json{{"name", "expr"}, {"expr", "x^2/2"}});
    auto oracle = dense_fd_spectrum_richardson(ws, 1024, 5);
    {
        DiscreteBasis b = make_basis(ws.model, "interval-dirichlet", 256);
        SpectralResult sr = solve_drift_eigen(ws, b, build_grid(ws.model, 512), 5);
        for (int i = 0; i < 5; ++i)
            CHECK(std::abs(sr.eigenvalues[static_cast<std::size_t>(i)] -
                           oracle[static_cast<std::size_t>(i)]) < 1e-5);
    }
    {
        DiscreteBasis b = make_basis(ws.model, "interval-dirichlet", 512);
        SpectralResult sr = solve_drift_eigen(ws, b, build_grid(ws.model, 1024), 5);
        for (int i = 0; i < 5; ++i)
            CHECK(std::abs(sr.eigenvalues[static_cast<std::size_t>(i)] -
                           oracle[static_cast<std::size_t>(i)]) < 1e-6);
    }
}

TEST_CASE("grid-fd path reproduces the spectral eigenvalues") {
    WeightedSpace ws = make_space(json{{"name", "interval"}, {"a", 0.0}, {"b", 3.14159265358979}},
                                  json{{"name", "zero"}});
    DiscreteBasis fd = make_basis(ws.model, "grid-fd", 512);
    SpectralResult sr = solve_drift_eigen(ws, fd, QuadratureGrid{}, 3);
    for (int k = 1; k <= 3; ++k)
        CHECK(std::abs(sr.eigenvalues[static_cast<std::size_t>(k - 1)] - k * k) < 2e-3);
    auto rich = dense_fd_spectrum_richardson(ws, 512, 3);
    for (int k = 1; k <= 3; ++k)
        CHECK(std::abs(rich[static_cast<std::size_t>(k - 1)] - k * k) < 1e-7);
}

TEST_CASE("Gaussian chart kernel search finds the coordinate directions") {
    WeightedSpace ws = make_space(json{{"name", "gaussian-chart"}, {"dim", 2}},
                                  json{{"name", "gaussian"}});
    DiscreteBasis b = make_basis(ws.model, "poly-cube", 3);
    QuadratureGrid g = build_grid(ws.model, 16);
    KernelSearchResult ks = kernel_search(ws, b, g);
    REQUIRE(ks.candidates.size() == 2);
    for (const auto& c : ks.candidates) {
        CHECK(c.accepted);
        CHECK(c.sup_residual < 1e-8);
    }
}

TEST_CASE("kernel space is invariant under a density shift") {
    json model{{"name", "gaussian-chart"}, {"dim", 2}};
    WeightedSpace ws = make_space(model, json{{"name", "gaussian"}});
    WeightedSpace shifted =
        make_space(model, json{{"name", "expr"}, {"expr", "(x^2 + y^2)/2 + 1.7"}});
    DiscreteBasis b = make_basis(ws.model, "poly-cube", 3);
    QuadratureGrid g = build_grid(ws.model, 16);
    KernelSearchResult a = kernel_search(ws, b, g);
    KernelSearchResult c = kernel_search(shifted, b, g);
    REQUIRE(a.candidates.size() == c.candidates.size());
    const int p = static_cast<int>(a.candidates.size());
    Mat A(b.size, p), B(b.size, p);
    for (int j = 0; j < p; ++j) {
        A.col(j) = a.candidates[static_cast<std::size_t>(j)].coefficients;
        B.col(j) = c.candidates[static_cast<std::size_t>(j)].coefficients;
    }
    Mat G = assemble_drift_laplacian(ws, b, g).G;
    CHECK(principal_angle_gap(A, B, G) < 1e-8);
}

TEST_CASE("weighted sphere kernel search finds the orthogonal linear span") {
    MetricModel m = make_model(json{{"name", "sphere-spherical"}});
    WeightedSpace ws{m, make_density(m, json{{"name", "linear"}, {"vector", {0.0, 0.0, 0.3}}})};
    DiscreteBasis b = make_basis(m, "sphere-harmonic-chart", 4);
    QuadratureGrid g = build_grid(m, 16);
    KernelSearchResult ks = kernel_search(ws, b, g);
    REQUIRE(ks.candidates.size() == 2);
    for (const auto& c : ks.candidates) CHECK(c.sup_residual < 1e-6);
}

TEST_CASE("interval probe stays bounded below with f = x") {
    WeightedSpace ws = make_space(json{{"name", "interval"}, {"a", -3.0}, {"b", 3.0}},
                                  json{{"name", "expr"}, {"expr", "x"}});
    ProbeReport pr = nonexistence_probe(ws, "interval-dirichlet", 0.4);
    REQUIRE(pr.levels.size() == 3);
    for (const auto& lv : pr.levels) {
        CHECK(lv.min_singular_value > 0.4);
        CHECK(lv.kernel_dim == 0);
    }
    CHECK(pr.bounded_below);
    CHECK_FALSE(pr.kernel_found);
}

TEST_CASE("hemisphere control probe finds the height-function kernel") {
    WeightedSpace ws = make_space(json{{"name", "hemisphere"}}, json{{"name", "zero"}});
    ProbeReport pr = nonexistence_probe(ws, "sphere-harmonic-chart", 0.05);
    CHECK(pr.kernel_found);
    CHECK(pr.note == "kernel found; not a nonexistence scenario");
    for (const auto& lv : pr.levels) CHECK(lv.kernel_dim == 1);
}

TEST_CASE("Gaussian probe reports the positive control") {
    WeightedSpace ws = make_space(json{{"name", "gaussian-chart"}, {"dim", 2}},
                                  json{{"name", "gaussian"}});
    ProbeReport pr = nonexistence_probe(ws, "poly-cube", 0.05);
    CHECK(pr.kernel_found);
    CHECK(pr.note == "kernel found; not a nonexistence scenario");
}

TEST_CASE("spectral convergence under basis doubling") {
    WeightedSpace ws = make_space(json{{"name", "circle"}},
                                  json{{"name", "expr"}, {"expr", "cos(theta)"}});
    QuadratureGrid g = build_grid(ws.model, 128);
    SpectralResult a = solve_drift_eigen(ws, make_basis(ws.model, "fourier-circle", 16), g, 3);
    SpectralResult b = solve_drift_eigen(ws, make_basis(ws.model, "fourier-circle", 32), g, 3);
    for (int i = 0; i < 3; ++i)
        CHECK(std::abs(a.eigenvalues[static_cast<std::size_t>(i)] -
                       b.eigenvalues[static_cast<std::size_t>(i)]) < 1e-7);
}

TEST_CASE("ill-conditioned Gram matrix is an error") {
    WeightedSpace ws = make_space(json{{"name", "interval"}, {"a", -3.0}, {"b", 3.0}},
                                  json{{"name", "zero"}});
    DiscreteBasis b = make_basis(ws.model, "interval-dirichlet", 64);
    QuadratureGrid g = build_grid(ws.model, 8);  // far fewer nodes than modes
    CHECK_THROWS_AS(assemble_drift_laplacian(ws, b, g), NumericError);
}

TEST_CASE("basis kind validation names the model requirement") {
    MetricModel m = make_model(json{{"name", "circle"}});
    CHECK_THROWS_AS(make_basis(m, "interval-dirichlet", 8), ConfigError);
    CHECK_THROWS_AS(make_basis(m, "no-such-basis", 8), ConfigError);
}
