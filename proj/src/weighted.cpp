#include "wgeom/weighted.hpp"

#include <cmath>

#include "wgeom/parallel.hpp"

namespace wgeom {

double drift_laplacian(const WeightedSpace& ws, const ScalarField& u, const ChartPoint& x) {
    require_in_chart(ws.model, x);
    const double h = ws.model.fd_step;
    MetricJet J = metric_jet(ws.model, x, 1);
    const int n = ws.model.dim;
    Vec du = scalar_d1(u, x, h);
    Mat Hu = scalar_d2(u, x, h);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) Hu(i, j) -= J.Gamma[k](i, j) * du(k);
    const double lap = (J.ginv * Hu).trace();
    Vec df = scalar_d1(ws.density, x, h);
    return lap - df.dot(J.ginv * du);
}

double drift_laplacian_divform(const WeightedSpace& ws, const ScalarField& u, const ChartPoint& x) {
    require_in_chart(ws.model, x);
    const double h = ws.model.fd_step;
    const int n = ws.model.dim;
    MetricJet J = metric_jet(ws.model, x, 1);
    Vec du = scalar_d1(u, x, h);
    Mat d2u = scalar_d2(u, x, h);
    Vec df = scalar_d1(ws.density, x, h);
    // ∂_i g^{ij}
    Tensor3 dginv(n);
    for (int mm = 0; mm < n; ++mm) dginv[mm] = (-J.ginv * J.dg[mm] * J.ginv).eval();
    double out = 0.0;
    for (int i = 0; i < n; ++i) {
        // (∂_i √g)/√g = ½ g^{ab} ∂_i g_ab
        const double dlog_sqrtg = 0.5 * (J.ginv * J.dg[i]).trace();
        for (int j = 0; j < n; ++j) {
            out += dlog_sqrtg * J.ginv(i, j) * du(j);
            out += dginv[i](i, j) * du(j) + J.ginv(i, j) * d2u(i, j);
            out -= df(i) * J.ginv(i, j) * du(j);
        }
    }
    return out;
}

Mat bakry_emery_ricci(const WeightedSpace& ws, const ChartPoint& x) {
    return (ricci(ws.model, x) + hessian(ws.model, ws.density, x)).eval();
}

double perelman_scalar(const WeightedSpace& ws, const ChartPoint& x) {
    require_in_chart(ws.model, x);
    MetricJet J = metric_jet(ws.model, x, 0);
    Vec df = scalar_d1(ws.density, x, ws.model.fd_step);
    const double grad2 = df.dot(J.ginv * df);
    return scalar_curvature(ws.model, x) + 2.0 * laplacian(ws.model, ws.density, x) - grad2;
}

Vec d_perelman(const WeightedSpace& ws, const ChartPoint& x, double fd_step) {
    const int n = ws.model.dim;
    Vec d(n);
    for (int i = 0; i < n; ++i) {
        ChartPoint xp = x, xm = x;
        xp(i) += fd_step;
        xm(i) -= fd_step;
        d(i) = (perelman_scalar(ws, xp) - perelman_scalar(ws, xm)) / (2.0 * fd_step);
    }
    return d;
}

ScalarField perelman_scalar_field(const WeightedSpace& ws, double fd_step) {
    WeightedSpace copy = ws;
    return derived_scalar([copy](const ChartPoint& p) { return perelman_scalar(copy, p); }, fd_step);
}

Vec f_divergence_tensor(const WeightedSpace& ws, const SymTensorField& h, const ChartPoint& x) {
    require_in_chart(ws.model, x);
    MetricJet J = metric_jet(ws.model, x, 1);
    Vec df = scalar_d1(ws.density, x, ws.model.fd_step);
    Vec divh = div_tensor(ws.model, h, x);
    return divh - h.value(x) * (J.ginv * df);
}

double f_div_f_div(const WeightedSpace& ws, const SymTensorField& h, const ChartPoint& x) {
    require_in_chart(ws.model, x);
    const int n = ws.model.dim;
    const double step = ws.model.fd_step;
    MetricJet J = metric_jet(ws.model, x, 2);
    TensorDivJet D = tensor_div_jet(ws.model, J, h, x);
    Mat hv = h.value(x);
    Tensor3 dh = tensor_d1(h, x, step);
    Vec df = scalar_d1(ws.density, x, step);
    Mat d2f = scalar_d2(ws.density, x, step);
    Tensor3 dginv(n);
    for (int mm = 0; mm < n; ++mm) dginv[mm] = (-J.ginv * J.dg[mm] * J.ginv).eval();

    // ω_j = (div h)_j − h_jk g^{kl} ∂_l f ; ∂_m ω stored as (j, m)
    Vec gradf = J.ginv * df;
    Vec omega = D.div_h - hv * gradf;
    Mat domega = D.d_div_h;
    for (int mm = 0; mm < n; ++mm)
        for (int j = 0; j < n; ++j) {
            double s = 0.0;
            for (int k = 0; k < n; ++k)
                for (int l = 0; l < n; ++l)
                    s += dh[mm](j, k) * J.ginv(k, l) * df(l) +
                         hv(j, k) * dginv[mm](k, l) * df(l) + hv(j, k) * J.ginv(k, l) * d2f(l, mm);
            domega(j, mm) -= s;
        }
    return div_oneform(J, omega, domega) - omega.dot(gradf);
}

double f_divergence_vector(const WeightedSpace& ws, const VectorField& X, const ChartPoint& x) {
    require_in_chart(ws.model, x);
    MetricJet J = metric_jet(ws.model, x, 1);
    Vec df = scalar_d1(ws.density, x, ws.model.fd_step);
    return div_vector(ws.model, X, x) - df.dot(X.value(x));
}

Mat adjoint_operator(const WeightedSpace& ws, const ScalarField& u, const ChartPoint& x) {
    require_in_chart(ws.model, x);
    MetricJet J = metric_jet(ws.model, x, 0);
    const double lapf = drift_laplacian(ws, u, x);
    Mat H = hessian(ws.model, u, x);
    Mat Rf = bakry_emery_ricci(ws, x);
    return (-lapf * J.g + H - u.value(x) * Rf).eval();
}

Mat traceless_part(const Mat& g, const Mat& ginv, const Mat& T) {
    const double tr = (ginv * T).trace();
    return (T - (tr / static_cast<double>(g.rows())) * g).eval();
}

Mat traceless(const WeightedSpace& ws, const SymTensorField& T, const ChartPoint& x) {
    require_in_chart(ws.model, x);
    MetricJet J = metric_jet(ws.model, x, 0);
    return traceless_part(J.g, J.ginv, T.value(x));
}

double kernel_residual(const WeightedSpace& ws, const ScalarField& u, const QuadratureGrid& grid) {
    std::vector<double> slot(grid.size());
    parallel_for(static_cast<std::ptrdiff_t>(grid.size()), [&](std::ptrdiff_t i) {
        slot[static_cast<std::size_t>(i)] =
            adjoint_operator(ws, u, grid.points[static_cast<std::size_t>(i)])
                .cwiseAbs()
                .maxCoeff();
    });
    double sup = 0.0;
    for (double v : slot) sup = std::max(sup, v);
    return sup;
}

double integrate(const WeightedSpace& ws, const QuadratureGrid& grid,
                 const std::function<double(const ChartPoint&)>& field) {
    return weighted_volume_integral(ws.model, ws.density, grid, field);
}

double integrate_boundary(const WeightedSpace& ws, const BoundaryGrid& bgrid,
                          const std::function<double(const ChartPoint&)>& field) {
    return weighted_boundary_integral(ws.model, ws.density, bgrid, field);
}

}  // namespace wgeom
