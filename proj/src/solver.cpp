#include "wgeom/solver.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Dense>

#include "wgeom/geometry.hpp"
#include "wgeom/parallel.hpp"

namespace wgeom {

namespace {

constexpr double kPi = 3.14159265358979323846;

void legendre_jet(int k, double t, double& p, double& dp, double& d2p) {
    double p0 = 1.0, p1 = t;
    if (k == 0) {
        p = 1.0;
        dp = d2p = 0.0;
        return;
    }
    for (int j = 2; j <= k; ++j) {
        double p2 = ((2.0 * j - 1.0) * t * p1 - (j - 1.0) * p0) / j;
        p0 = p1;
        p1 = p2;
    }
    p = p1;
    const double s = 1.0 - t * t;
    if (s < 1e-13) {
        // endpoint closed forms: P'(±1), P''(±1)
        const double s1 = (t > 0.0 || k % 2 == 1) ? 1.0 : -1.0;  // (±1)^{k-1}
        const double s2 = (t > 0.0 || k % 2 == 0) ? 1.0 : -1.0;  // (±1)^k
        dp = s1 * 0.5 * k * (k + 1.0);
        d2p = s2 * (k - 1.0) * k * (k + 1.0) * (k + 2.0) / 8.0;
        return;
    }
    dp = k * (t * p1 - p0) / (t * t - 1.0);
    d2p = (2.0 * t * dp - k * (k + 1.0) * p1) / s;
}

// Associated Legendre P_l^m with first and second x-derivatives, no
// Condon-Shortley phase. Valid away from the poles (|x| < 1).
void assoc_legendre_jet(int l, int m, double x, double& p, double& dp, double& d2p) {
    const double s2 = 1.0 - x * x;
    double pmm = 1.0;
    for (int i = 1; i <= m; ++i) pmm *= (2.0 * i - 1.0) * std::sqrt(s2);
    double pm1 = 0.0;  // P_{l-1}^m seeded below
    double pl = pmm;
    if (l > m) {
        double pa = pmm;
        double pb = x * (2.0 * m + 1.0) * pmm;
        for (int j = m + 2; j <= l; ++j) {
            double pc = ((2.0 * j - 1.0) * x * pb - (j + m - 1.0) * pa) / (j - m);
            pa = pb;
            pb = pc;
        }
        pl = pb;
        pm1 = pa;
    }
    p = pl;
    dp = ((l + m) * pm1 - l * x * pl) / s2;
    d2p = (2.0 * x * dp - (l * (l + 1.0) - m * m / s2) * pl) / s2;
}

struct Harmonic {
    int l = 0, m = 0;
    bool sine = false;
    double norm = 1.0;
};

std::vector<Harmonic> harmonic_table(int max_degree, bool dirichlet_equator) {
    std::vector<Harmonic> tab;
    for (int l = 0; l <= max_degree; ++l)
        for (int m = 0; m <= l; ++m) {
            if (dirichlet_equator && (l + m) % 2 == 0) continue;
            double norm = std::sqrt((2.0 * l + 1.0) / (4.0 * kPi) *
                                    std::exp(std::lgamma(l - m + 1.0) - std::lgamma(l + m + 1.0)));
            if (m > 0) norm *= std::sqrt(2.0);
            tab.push_back({l, m, false, norm});
            if (m > 0) tab.push_back({l, m, true, norm});
        }
    return tab;
}

DiscreteBasis fourier_circle(int harmonics) {
    DiscreteBasis b;
    b.kind = "fourier-circle";
    b.size = 2 * harmonics + 1;
    const double c0 = 1.0 / std::sqrt(2.0 * kPi);
    const double c1 = 1.0 / std::sqrt(kPi);
    auto jet = [c0, c1](int j, double t, int order) {
        if (j == 0) return order == 0 ? c0 : 0.0;
        const int k = (j + 1) / 2;
        const bool sine = j % 2 == 0;
        const double ph = k * t + (sine ? -0.5 * kPi : 0.0);
        double v = c1 * std::cos(ph + 0.5 * kPi * order);
        for (int q = 0; q < order; ++q) v *= k;
        return v;
    };
    b.value = [jet](int j, const ChartPoint& x) { return jet(j, x(0), 0); };
    b.d1 = [jet](int j, const ChartPoint& x) { return Vec::Constant(1, jet(j, x(0), 1)); };
    b.d2 = [jet](int j, const ChartPoint& x) { return Mat::Constant(1, 1, jet(j, x(0), 2)); };
    return b;
}

DiscreteBasis interval_dirichlet(double a, double b_hi, int modes) {
    DiscreteBasis b;
    b.kind = "interval-dirichlet";
    b.size = modes;
    const double len = b_hi - a;
    const double amp = std::sqrt(2.0 / len);
    auto jet = [a, len, amp](int j, double x, int order) {
        const double w = (j + 1) * kPi / len;
        double v = amp * std::sin(w * (x - a) + 0.5 * kPi * order);
        for (int q = 0; q < order; ++q) v *= w;
        return v;
    };
    b.value = [jet](int j, const ChartPoint& x) { return jet(j, x(0), 0); };
    b.d1 = [jet](int j, const ChartPoint& x) { return Vec::Constant(1, jet(j, x(0), 1)); };
    b.d2 = [jet](int j, const ChartPoint& x) { return Mat::Constant(1, 1, jet(j, x(0), 2)); };
    return b;
}

DiscreteBasis sphere_harmonics(int max_degree, bool dirichlet_equator) {
    DiscreteBasis b;
    b.kind = "sphere-harmonic-chart";
    auto tab = std::make_shared<std::vector<Harmonic>>(harmonic_table(max_degree, dirichlet_equator));
    b.size = static_cast<int>(tab->size());
    struct Jet {
        double v, dth, dph, dthth, dthph, dphph;
    };
    auto eval = [tab](int j, const ChartPoint& x) {
        const Harmonic& h = (*tab)[static_cast<std::size_t>(j)];
        const double th = x(0), ph = x(1);
        const double ct = std::cos(th), st = std::sin(th);
        double p, dp, d2p;
        assoc_legendre_jet(h.l, h.m, ct, p, dp, d2p);
        const double t = h.sine ? std::sin(h.m * ph) : std::cos(h.m * ph);
        const double dt = h.m * (h.sine ? std::cos(h.m * ph) : -std::sin(h.m * ph));
        const double rth = -st * dp;
        const double rthth = d2p * st * st - dp * ct;
        Jet out;
        out.v = h.norm * p * t;
        out.dth = h.norm * rth * t;
        out.dph = h.norm * p * dt;
        out.dthth = h.norm * rthth * t;
        out.dthph = h.norm * rth * dt;
        out.dphph = -h.m * h.m * h.norm * p * t;
        return out;
    };
    b.value = [eval](int j, const ChartPoint& x) { return eval(j, x).v; };
    b.d1 = [eval](int j, const ChartPoint& x) {
        Jet r = eval(j, x);
        Vec d(2);
        d << r.dth, r.dph;
        return d;
    };
    b.d2 = [eval](int j, const ChartPoint& x) {
        Jet r = eval(j, x);
        Mat d(2, 2);
        d << r.dthth, r.dthph, r.dthph, r.dphph;
        return d;
    };
    return b;
}

DiscreteBasis poly_cube(const Vec& lo, const Vec& hi, int max_degree) {
    DiscreteBasis b;
    b.kind = "poly-cube";
    const int n = static_cast<int>(lo.size());
    auto multi = std::make_shared<std::vector<std::vector<int>>>();
    std::vector<int> cur(static_cast<std::size_t>(n), 0);
    // multi-indices with total degree <= max_degree, graded order
    std::function<void(int, int)> rec = [&](int pos, int left) {
        if (pos == n) {
            multi->push_back(cur);
            return;
        }
        for (int d = 0; d <= left; ++d) {
            cur[static_cast<std::size_t>(pos)] = d;
            rec(pos + 1, left - d);
        }
    };
    rec(0, max_degree);
    std::stable_sort(multi->begin(), multi->end(), [](const auto& a, const auto& c) {
        return std::accumulate(a.begin(), a.end(), 0) < std::accumulate(c.begin(), c.end(), 0);
    });
    b.size = static_cast<int>(multi->size());
    auto lo_c = std::make_shared<Vec>(lo);
    auto hi_c = std::make_shared<Vec>(hi);
    // per-axis normalized Legendre value and chart-coordinate derivatives
    auto axis = [lo_c, hi_c](int d, int k, double x, double out[3]) {
        const double len = (*hi_c)(d) - (*lo_c)(d);
        const double t = 2.0 * (x - (*lo_c)(d)) / len - 1.0;
        const double scale = 2.0 / len;
        const double nrm = std::sqrt((2.0 * k + 1.0) / len);
        double p, dp, d2p;
        legendre_jet(k, t, p, dp, d2p);
        out[0] = nrm * p;
        out[1] = nrm * dp * scale;
        out[2] = nrm * d2p * scale * scale;
    };
    b.value = [multi, axis, n](int j, const ChartPoint& x) {
        double v = 1.0, a[3];
        for (int d = 0; d < n; ++d) {
            axis(d, (*multi)[static_cast<std::size_t>(j)][static_cast<std::size_t>(d)], x(d), a);
            v *= a[0];
        }
        return v;
    };
    b.d1 = [multi, axis, n](int j, const ChartPoint& x) {
        std::vector<double> val(static_cast<std::size_t>(n)), der(static_cast<std::size_t>(n));
        double a[3];
        for (int d = 0; d < n; ++d) {
            axis(d, (*multi)[static_cast<std::size_t>(j)][static_cast<std::size_t>(d)], x(d), a);
            val[static_cast<std::size_t>(d)] = a[0];
            der[static_cast<std::size_t>(d)] = a[1];
        }
        Vec g(n);
        for (int i = 0; i < n; ++i) {
            double v = der[static_cast<std::size_t>(i)];
            for (int d = 0; d < n; ++d)
                if (d != i) v *= val[static_cast<std::size_t>(d)];
            g(i) = v;
        }
        return g;
    };
    b.d2 = [multi, axis, n](int j, const ChartPoint& x) {
        std::vector<double> v0(static_cast<std::size_t>(n)), v1(static_cast<std::size_t>(n)),
            v2(static_cast<std::size_t>(n));
        double a[3];
        for (int d = 0; d < n; ++d) {
            axis(d, (*multi)[static_cast<std::size_t>(j)][static_cast<std::size_t>(d)], x(d), a);
            v0[static_cast<std::size_t>(d)] = a[0];
            v1[static_cast<std::size_t>(d)] = a[1];
            v2[static_cast<std::size_t>(d)] = a[2];
        }
        Mat h(n, n);
        for (int i = 0; i < n; ++i)
            for (int k = 0; k < n; ++k) {
                double v = 1.0;
                for (int d = 0; d < n; ++d) {
                    if (d == i && d == k)
                        v *= v2[static_cast<std::size_t>(d)];
                    else if (d == i || d == k)
                        v *= v1[static_cast<std::size_t>(d)];
                    else
                        v *= v0[static_cast<std::size_t>(d)];
                }
                h(i, k) = v;
            }
        return h;
    };
    return b;
}

// 1-d conservative discretization of the drift Laplacian, symmetrized by the
// density similarity transform. Returns the symmetric matrix; `periodic`
// wraps the ends, otherwise homogeneous Dirichlet at both.
Mat fd_drift_matrix(const WeightedSpace& ws, int n, bool periodic, double& h_out) {
    const MetricModel& m = ws.model;
    double a, len;
    if (periodic) {
        a = 0.0;
        len = 2.0 * kPi;
        h_out = len / n;
    } else {
        a = m.box_lo(0);
        len = m.box_hi(0) - a;
        h_out = len / (n + 1);
    }
    const double h = h_out;
    auto rho = [&](double x) {
        ChartPoint p = Vec::Constant(1, periodic ? std::fmod(x + len, len) : x);
        return std::sqrt(m.metric_at(p)(0, 0)) * std::exp(-ws.density.value(p));
    };
    auto cond = [&](double x) {
        ChartPoint p = Vec::Constant(1, periodic ? std::fmod(x + len, len) : x);
        return rho(x) / m.metric_at(p)(0, 0);
    };
    std::vector<double> r(static_cast<std::size_t>(n)), cr(static_cast<std::size_t>(n) + 1);
    for (int i = 0; i < n; ++i) {
        const double xi = periodic ? a + i * h : a + (i + 1) * h;
        r[static_cast<std::size_t>(i)] = rho(xi);
    }
    for (int i = 0; i <= n; ++i) {
        const double xm = periodic ? a + (i - 0.5) * h : a + (i + 0.5) * h;
        cr[static_cast<std::size_t>(i)] = cond(xm);
    }
    Mat T = Mat::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        const double ri = r[static_cast<std::size_t>(i)];
        T(i, i) = -(cr[static_cast<std::size_t>(i)] + cr[static_cast<std::size_t>(i) + 1]) /
                  (ri * h * h);
        if (i + 1 < n) {
            const double off = cr[static_cast<std::size_t>(i) + 1] /
                               (h * h * std::sqrt(ri * r[static_cast<std::size_t>(i) + 1]));
            T(i, i + 1) = off;
            T(i + 1, i) = off;
        }
    }
    if (periodic && n > 2) {
        const double off =
            cr[0] / (h * h * std::sqrt(r[0] * r[static_cast<std::size_t>(n) - 1]));
        T(0, n - 1) = off;
        T(n - 1, 0) = off;
    }
    return T;
}

std::vector<double> fd_sigma(const WeightedSpace& ws, int n, int k) {
    if (ws.model.dim != 1)
        throw ConfigError("finite-difference spectrum oracle requires a 1-d model");
    const bool periodic = ws.model.grid_kind == GridKind::Circle;
    double h = 0.0;
    Mat T = fd_drift_matrix(ws, n, periodic, h);
    Eigen::SelfAdjointEigenSolver<Mat> es(T);
    if (es.info() != Eigen::Success) throw NumericError("dense FD eigensolve failed");
    std::vector<double> sigma;
    sigma.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) sigma.push_back(-es.eigenvalues()(i));
    std::sort(sigma.begin(), sigma.end());
    sigma.resize(static_cast<std::size_t>(std::min(k, n)));
    return sigma;
}

struct GalerkinTables {
    Mat V;        // point x basis values
    Mat D;        // point x basis drift-Laplacian samples
    Vec wt;       // full measure weights w * sqrt(det g) * e^{-f}
};

GalerkinTables sample_basis(const WeightedSpace& ws, const DiscreteBasis& basis,
                            const QuadratureGrid& grid, bool with_drift) {
    const auto npts = static_cast<std::ptrdiff_t>(grid.size());
    const int nb = basis.size;
    GalerkinTables t;
    t.V.resize(npts, nb);
    if (with_drift) t.D.resize(npts, nb);
    t.wt.resize(npts);
    const MetricModel& m = ws.model;
    parallel_for(npts, [&](std::ptrdiff_t i) {
        const auto& p = grid.points[static_cast<std::size_t>(i)];
        MetricJet J = metric_jet(m, p, 1);
        const Vec df = scalar_d1(ws.density, p, m.fd_step);
        t.wt(i) = grid.weights[static_cast<std::size_t>(i)] * J.sqrt_det *
                  std::exp(-ws.density.value(p));
        for (int b = 0; b < nb; ++b) {
            t.V(i, b) = basis.value(b, p);
            if (!with_drift) continue;
            const Vec d1 = basis.d1(b, p);
            Mat hess = basis.d2(b, p);
            for (int k = 0; k < m.dim; ++k) hess -= J.Gamma[static_cast<std::size_t>(k)] * d1(k);
            t.D(i, b) = (J.ginv * hess).trace() - df.dot(J.ginv * d1);
        }
    });
    return t;
}

Mat weighted_gram(const GalerkinTables& t) { return t.V.transpose() * t.wt.asDiagonal() * t.V; }

double gram_condition_or_throw(const Mat& G) {
    Eigen::SelfAdjointEigenSolver<Mat> es(G);
    const double lo = es.eigenvalues()(0);
    const double hi = es.eigenvalues()(G.rows() - 1);
    const double cond = hi / std::max(lo, 1e-300);
    if (lo <= 0.0 || cond > 1e12)
        throw NumericError("basis Gram matrix ill-conditioned (condition number " +
                           std::to_string(cond) + ")");
    return cond;
}

std::vector<int> probe_ladder(const std::string& kind, int dim) {
    if (kind == "sphere-harmonic-chart" || kind == "poly-cube") return {4, 6, 8};
    (void)dim;
    return {32, 64, 128};
}

int probe_grid_nodes(const std::string& kind, int level, int dim) {
    if (kind == "sphere-harmonic-chart") return 3 * level;
    if (kind == "poly-cube") return dim >= 3 ? level + 6 : 2 * level + 8;
    if (kind == "fourier-circle") return 4 * level;
    return 2 * level;
}

}  // namespace

ScalarField DiscreteBasis::field(int k) const {
    ScalarField u;
    auto v = value;
    auto g1 = d1;
    auto g2 = d2;
    u.value = [v, k](const ChartPoint& x) { return v(k, x); };
    u.d1 = [g1, k](const ChartPoint& x) { return g1(k, x); };
    u.d2 = [g2, k](const ChartPoint& x) { return g2(k, x); };
    return u;
}

ScalarField DiscreteBasis::combine(const Vec& coeffs) const {
    if (coeffs.size() != size) throw ConfigError("coefficient length does not match basis size");
    ScalarField u;
    auto v = value;
    auto g1 = d1;
    auto g2 = d2;
    const int n = size;
    auto c = std::make_shared<Vec>(coeffs);
    u.value = [v, c, n](const ChartPoint& x) {
        double acc = 0.0;
        for (int k = 0; k < n; ++k) acc += (*c)(k)*v(k, x);
        return acc;
    };
    u.d1 = [g1, c, n](const ChartPoint& x) {
        Vec acc = (*c)(0)*g1(0, x);
        for (int k = 1; k < n; ++k) acc += (*c)(k)*g1(k, x);
        return acc;
    };
    u.d2 = [g2, c, n](const ChartPoint& x) {
        Mat acc = (*c)(0)*g2(0, x);
        for (int k = 1; k < n; ++k) acc += (*c)(k)*g2(k, x);
        return acc;
    };
    return u;
}

std::vector<std::string> basis_kinds() {
    return {"fourier-circle", "interval-dirichlet", "sphere-harmonic-chart", "poly-cube",
            "grid-fd"};
}

DiscreteBasis make_basis(const MetricModel& m, const std::string& kind, int param) {
    if (param < 1) throw ConfigError("basis size parameter must be positive");
    if (kind == "fourier-circle") {
        if (m.grid_kind != GridKind::Circle)
            throw ConfigError("fourier-circle basis requires the circle model");
        return fourier_circle(param);
    }
    if (kind == "interval-dirichlet") {
        if (m.grid_kind != GridKind::Interval)
            throw ConfigError("interval-dirichlet basis requires the interval model");
        return interval_dirichlet(m.box_lo(0), m.box_hi(0), param);
    }
    if (kind == "sphere-harmonic-chart") {
        if (m.dim != 2 ||
            (m.grid_kind != GridKind::Sphere && m.grid_kind != GridKind::Hemisphere))
            throw ConfigError("sphere-harmonic-chart basis requires a spherical-coordinate model");
        return sphere_harmonics(param, m.grid_kind == GridKind::Hemisphere);
    }
    if (kind == "poly-cube") {
        if (m.grid_kind != GridKind::Box)
            throw ConfigError("poly-cube basis requires a box-chart model");
        return poly_cube(m.box_lo, m.box_hi, param);
    }
    if (kind == "grid-fd") {
        if (m.dim != 1) throw ConfigError("grid-fd basis requires a 1-d model");
        DiscreteBasis b;
        b.kind = "grid-fd";
        b.size = param;
        return b;
    }
    throw ConfigError("unknown basis kind '" + kind + "'");
}

AssembledOperator assemble_drift_laplacian(const WeightedSpace& ws, const DiscreteBasis& basis,
                                           const QuadratureGrid& grid) {
    AssembledOperator out;
    if (basis.kind == "grid-fd") {
        double h = 0.0;
        out.L = fd_drift_matrix(ws, basis.size, ws.model.grid_kind == GridKind::Circle, h);
        out.G = Mat::Identity(basis.size, basis.size);
        return out;
    }
    GalerkinTables t = sample_basis(ws, basis, grid, true);
    out.G = weighted_gram(t);
    out.L = t.V.transpose() * t.wt.asDiagonal() * t.D;
    out.gram_condition = gram_condition_or_throw(out.G);
    out.asymmetry = (out.L - out.L.transpose()).cwiseAbs().maxCoeff();
    return out;
}

SpectralResult solve_drift_eigen(const WeightedSpace& ws, const DiscreteBasis& basis,
                                 const QuadratureGrid& grid, int k) {
    SpectralResult res;
    if (basis.kind == "grid-fd") {
        double h = 0.0;
        Mat T = fd_drift_matrix(ws, basis.size, ws.model.grid_kind == GridKind::Circle, h);
        Eigen::SelfAdjointEigenSolver<Mat> es(T);
        if (es.info() != Eigen::Success) throw NumericError("FD eigensolve failed");
        const int kk = std::min(k, basis.size);
        res.eigenfields.resize(basis.size, kk);
        for (int j = 0; j < kk; ++j) {
            res.eigenvalues.push_back(-es.eigenvalues()(basis.size - 1 - j));
            res.eigenfields.col(j) = es.eigenvectors().col(basis.size - 1 - j);
        }
        return res;
    }
    if (k > basis.size) throw ConfigError("requested more eigenpairs than basis functions");
    AssembledOperator op = assemble_drift_laplacian(ws, basis, grid);
    const Mat Ls = 0.5 * (op.L + op.L.transpose());
    Eigen::GeneralizedSelfAdjointEigenSolver<Mat> es(Ls, op.G);
    if (es.info() != Eigen::Success) throw NumericError("generalized eigensolve failed");
    const int n = basis.size;
    res.eigenfields.resize(n, k);
    for (int j = 0; j < k; ++j) {
        res.eigenvalues.push_back(-es.eigenvalues()(n - 1 - j));
        res.eigenfields.col(j) = es.eigenvectors().col(n - 1 - j);
    }
    const Mat gram = res.eigenfields.transpose() * op.G * res.eigenfields;
    res.orthonormality_residual = (gram - Mat::Identity(k, k)).cwiseAbs().maxCoeff();
    return res;
}

Mat assemble_adjoint_matrix(const WeightedSpace& ws, const DiscreteBasis& basis,
                            const QuadratureGrid& grid) {
    if (basis.kind == "grid-fd")
        throw ConfigError("grid-fd basis supports spectral operations only");
    const MetricModel& m = ws.model;
    const int n = m.dim;
    const auto npts = static_cast<std::ptrdiff_t>(grid.size());
    Mat A(npts * n * n, basis.size);
    parallel_for(npts, [&](std::ptrdiff_t i) {
        const auto& p = grid.points[static_cast<std::size_t>(i)];
        MetricJet J = metric_jet(m, p, 1);
        const Mat ricf = bakry_emery_ricci(ws, p);
        const Vec df = scalar_d1(ws.density, p, m.fd_step);
        const double sw = std::sqrt(grid.weights[static_cast<std::size_t>(i)] * J.sqrt_det *
                                    std::exp(-ws.density.value(p)));
        for (int b = 0; b < basis.size; ++b) {
            const double v = basis.value(b, p);
            const Vec d1 = basis.d1(b, p);
            Mat hess = basis.d2(b, p);
            for (int k = 0; k < n; ++k) hess -= J.Gamma[static_cast<std::size_t>(k)] * d1(k);
            const double drift = (J.ginv * hess).trace() - df.dot(J.ginv * d1);
            const Mat adj = -drift * J.g + hess - v * ricf;
            for (int r = 0; r < n; ++r)
                for (int c = 0; c < n; ++c) A(i * n * n + r * n + c, b) = sw * adj(r, c);
        }
    });
    return A;
}

KernelSearchResult kernel_search(const WeightedSpace& ws, const DiscreteBasis& basis,
                                 const QuadratureGrid& grid, double tol, double accept_tol) {
    if (tol < 0.0) tol = 1e-6 * std::sqrt(static_cast<double>(grid.size()));
    const Mat A = assemble_adjoint_matrix(ws, basis, grid);
    Eigen::BDCSVD<Mat> svd(A, Eigen::ComputeThinV);
    KernelSearchResult out;
    const auto& sv = svd.singularValues();
    out.min_singular_value = sv(sv.size() - 1);
    GalerkinTables t = sample_basis(ws, basis, grid, false);
    const Mat G = weighted_gram(t);
    gram_condition_or_throw(G);
    std::vector<std::pair<Vec, double>> raw;
    for (int j = static_cast<int>(sv.size()) - 1; j >= 0; --j) {
        if (sv(j) >= tol) break;
        raw.emplace_back(svd.matrixV().col(j), sv(j));
    }
    // Gram-Schmidt in the weighted inner product, smallest singular value first
    std::vector<Vec> ortho;
    std::vector<double> sigmas;
    for (const auto& [vec, s] : raw) {
        Vec c = vec;
        for (const Vec& q : ortho) c -= q * (q.dot(G * c));
        const double nrm = std::sqrt(c.dot(G * c));
        if (nrm < 1e-10) continue;
        c /= nrm;
        ortho.push_back(c);
        sigmas.push_back(s);
    }
    for (std::size_t j = 0; j < ortho.size(); ++j) {
        KernelCandidate cand;
        cand.coefficients = ortho[j];
        cand.singular_value = sigmas[j];
        cand.sup_residual = kernel_residual(ws, basis.combine(ortho[j]), grid);
        cand.accepted = cand.sup_residual < accept_tol;
        out.candidates.push_back(std::move(cand));
    }
    return out;
}

ProbeReport nonexistence_probe(const WeightedSpace& ws, const std::string& basis_kind,
                               double floor, double kernel_tol) {
    if (basis_kind == "grid-fd")
        throw ConfigError("grid-fd basis supports spectral operations only");
    ProbeReport rep;
    rep.basis_kind = basis_kind;
    rep.floor = floor;
    QuadratureGrid top_grid;
    for (int level : probe_ladder(basis_kind, ws.model.dim)) {
        DiscreteBasis basis = make_basis(ws.model, basis_kind, level);
        QuadratureGrid grid =
            build_grid(ws.model, probe_grid_nodes(basis_kind, level, ws.model.dim));
        const Mat A = assemble_adjoint_matrix(ws, basis, grid);
        Eigen::BDCSVD<Mat> svd(A);
        const auto& sv = svd.singularValues();
        ProbeLevel lv;
        lv.resolution = level;
        lv.min_singular_value = sv(sv.size() - 1);
        const double tol = kernel_tol * std::sqrt(static_cast<double>(grid.size()));
        for (int j = 0; j < sv.size(); ++j)
            if (sv(j) < tol) ++lv.kernel_dim;
        rep.levels.push_back(lv);
        top_grid = std::move(grid);
    }
    rep.bounded_below = true;
    for (const auto& lv : rep.levels) {
        if (lv.min_singular_value < floor) rep.bounded_below = false;
        if (lv.kernel_dim > 0) rep.kernel_found = true;
    }
    if (rep.kernel_found) rep.note = "kernel found; not a nonexistence scenario";
    // hypothesis residuals over the finest grid, reported but never fatal
    const auto npts = static_cast<std::ptrdiff_t>(top_grid.size());
    std::vector<double> pscal(static_cast<std::size_t>(npts)), fval(static_cast<std::size_t>(npts)),
        lam(static_cast<std::size_t>(npts));
    parallel_for(npts, [&](std::ptrdiff_t i) {
        const auto& p = top_grid.points[static_cast<std::size_t>(i)];
        pscal[static_cast<std::size_t>(i)] = perelman_scalar(ws, p);
        fval[static_cast<std::size_t>(i)] = ws.density.value(p);
        MetricJet J = metric_jet(ws.model, p, 1);
        lam[static_cast<std::size_t>(i)] =
            (J.ginv * bakry_emery_ricci(ws, p)).trace() / ws.model.dim;
    });
    auto dev = [](const std::vector<double>& v) {
        const double mean = std::accumulate(v.begin(), v.end(), 0.0) / v.size();
        double d = 0.0;
        for (double x : v) d = std::max(d, std::abs(x - mean));
        return d;
    };
    const double lam_mean = std::accumulate(lam.begin(), lam.end(), 0.0) / lam.size();
    double einstein = 0.0;
    for (std::ptrdiff_t i = 0; i < npts; ++i) {
        const auto& p = top_grid.points[static_cast<std::size_t>(i)];
        MetricJet J = metric_jet(ws.model, p, 1);
        const Mat dev_m = J.ginv * (bakry_emery_ricci(ws, p) - lam_mean * J.g);
        einstein = std::max(einstein, std::sqrt(std::max(0.0, (dev_m * dev_m).trace())));
    }
    rep.diagnostics.emplace_back("perelman_scalar_deviation", dev(pscal));
    rep.diagnostics.emplace_back("density_deviation", dev(fval));
    rep.diagnostics.emplace_back("einstein_deviation", einstein);
    return rep;
}

std::vector<double> dense_fd_spectrum(const WeightedSpace& ws, int n, int k) {
    return fd_sigma(ws, n, k);
}

std::vector<double> dense_fd_spectrum_richardson(const WeightedSpace& ws, int n, int k) {
    const bool periodic = ws.model.grid_kind == GridKind::Circle;
    const int n2 = periodic ? 2 * n : 2 * n + 1;  // halves the mesh width exactly
    std::vector<double> coarse = fd_sigma(ws, n, k);
    std::vector<double> fine = fd_sigma(ws, n2, k);
    std::vector<double> out(coarse.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = (4.0 * fine[i] - coarse[i]) / 3.0;
    return out;
}

double principal_angle_gap(const Mat& A, const Mat& B, const Mat& G) {
    if (A.cols() != B.cols()) return 0.5 * kPi;
    if (A.cols() == 0) return 0.0;
    const Mat M = A.transpose() * G * B;
    Eigen::JacobiSVD<Mat> svd(M);
    const double c = std::clamp(svd.singularValues()(svd.singularValues().size() - 1), -1.0, 1.0);
    return std::acos(c);
}

}  // namespace wgeom
