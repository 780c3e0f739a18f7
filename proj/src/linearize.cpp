#include "wgeom/linearize.hpp"

#include <cmath>

#include "wgeom/parallel.hpp"

namespace wgeom {

namespace {

double frob(const Mat& A, const Mat& B) { return (A.array() * B.array()).sum(); }

// d/dx_m of g^{-1}
Tensor3 dginv_of(const MetricJet& J) {
    const int n = static_cast<int>(J.g.rows());
    Tensor3 d(n);
    for (int mm = 0; mm < n; ++mm) d[mm] = (-J.ginv * J.dg[mm] * J.ginv).eval();
    return d;
}

}  // namespace

ScalarField trace_field(const MetricModel& m, const SymTensorField& h) {
    MetricModel model = m;
    SymTensorField ht = h;
    ScalarField out;
    out.value = [model, ht](const ChartPoint& x) {
        MetricJet J = metric_jet(model, x, 0);
        return frob(J.ginv, ht.value(x));
    };
    out.d1 = [model, ht](const ChartPoint& x) {
        const int n = model.dim;
        MetricJet J = metric_jet(model, x, 1);
        Tensor3 dginv = dginv_of(J);
        Tensor3 dh = tensor_d1(ht, x, model.fd_step);
        Mat hv = ht.value(x);
        Vec d(n);
        for (int mm = 0; mm < n; ++mm) d(mm) = frob(dginv[mm], hv) + frob(J.ginv, dh[mm]);
        return d;
    };
    out.d2 = [model, ht](const ChartPoint& x) {
        const int n = model.dim;
        MetricJet J = metric_jet(model, x, 2);
        Tensor3 dginv = dginv_of(J);
        Tensor3 dh = tensor_d1(ht, x, model.fd_step);
        Tensor4 d2h = tensor_d2(ht, x, model.fd_step);
        Mat hv = ht.value(x);
        Mat d(n, n);
        for (int l = 0; l < n; ++l)
            for (int mm = 0; mm < n; ++mm) {
                Mat d2ginv = -(dginv[l] * J.dg[mm] * J.ginv + J.ginv * J.d2g[l][mm] * J.ginv +
                               J.ginv * J.dg[mm] * dginv[l]);
                d(l, mm) = frob(d2ginv, hv) + frob(dginv[mm], dh[l]) + frob(dginv[l], dh[mm]) +
                           frob(J.ginv, d2h[l][mm]);
            }
        return (0.5 * (d + d.transpose())).eval();
    };
    return out;
}

double variation_laplacian_f(const WeightedSpace& ws, const MetricPerturbation& pert,
                             const ChartPoint& x) {
    require_in_chart(ws.model, x);
    const double step = ws.model.fd_step;
    MetricJet J = metric_jet(ws.model, x, 1);
    Mat hv = pert.h.value(x);
    Mat hessf = hessian(ws.model, ws.density, x);
    Vec df = scalar_d1(ws.density, x, step);
    Vec divh = div_tensor(ws.model, pert.h, x);
    Vec dtr = scalar_d1(trace_field(ws.model, pert.h), x, step);
    return -tensor_inner(J.ginv, hessf, hv) - df.dot(J.ginv * divh) +
           0.5 * df.dot(J.ginv * dtr);
}

double variation_gradnorm(const WeightedSpace& ws, const MetricPerturbation& pert,
                          const ChartPoint& x) {
    require_in_chart(ws.model, x);
    MetricJet J = metric_jet(ws.model, x, 0);
    Vec gradf = J.ginv * scalar_d1(ws.density, x, ws.model.fd_step);
    return -gradf.dot(pert.h.value(x) * gradf);
}

double variation_scalar(const WeightedSpace& ws, const MetricPerturbation& pert,
                        const ChartPoint& x) {
    require_in_chart(ws.model, x);
    MetricJet J = metric_jet(ws.model, x, 0);
    const double lap_tr = laplacian(ws.model, trace_field(ws.model, pert.h), x);
    const double divdiv = div_div_tensor(ws.model, pert.h, x);
    const double hric = tensor_inner(J.ginv, pert.h.value(x), ricci(ws.model, x));
    return -lap_tr + divdiv - hric;
}

double linearized_perelman(const WeightedSpace& ws, const MetricPerturbation& pert,
                           const ChartPoint& x) {
    require_in_chart(ws.model, x);
    MetricJet J = metric_jet(ws.model, x, 0);
    const double lapf_tr = drift_laplacian(ws, trace_field(ws.model, pert.h), x);
    const double hricf = tensor_inner(J.ginv, pert.h.value(x), bakry_emery_ricci(ws, x));
    return -lapf_tr - hricf + f_div_f_div(ws, pert.h, x);
}

double linearized_perelman_expanded(const WeightedSpace& ws, const MetricPerturbation& pert,
                                    const ChartPoint& x) {
    require_in_chart(ws.model, x);
    const double step = ws.model.fd_step;
    MetricJet J = metric_jet(ws.model, x, 0);
    Mat hv = pert.h.value(x);
    Vec df = scalar_d1(ws.density, x, step);
    Vec gradf = J.ginv * df;
    const double lap_tr = laplacian(ws.model, trace_field(ws.model, pert.h), x);
    const double divdiv = div_div_tensor(ws.model, pert.h, x);
    const double hric = tensor_inner(J.ginv, hv, ricci(ws.model, x));
    const double hhessf = tensor_inner(J.ginv, hv, hessian(ws.model, ws.density, x));
    Vec divh = div_tensor(ws.model, pert.h, x);
    Vec dtr = scalar_d1(trace_field(ws.model, pert.h), x, step);
    return -lap_tr + divdiv - hric - 2.0 * hhessf - 2.0 * df.dot(J.ginv * divh) +
           df.dot(J.ginv * dtr) + gradf.dot(hv * gradf);
}

MetricModel perturbed_model(const MetricModel& m, const SymTensorField& h, double t) {
    MetricModel p = m;
    p.name = m.name + "+t*h";
    auto base = m.metric_at;
    auto hval = h.value;
    p.metric_at = [base, hval, t](const ChartPoint& x) { return (base(x) + t * hval(x)).eval(); };
    if (m.metric_d1 && h.d1) {
        auto bd1 = m.metric_d1;
        auto hd1 = h.d1;
        p.metric_d1 = [bd1, hd1, t](const ChartPoint& x) {
            Tensor3 d = bd1(x);
            Tensor3 dh = hd1(x);
            for (std::size_t k = 0; k < d.size(); ++k) d[k] += t * dh[k];
            return d;
        };
    } else {
        p.metric_d1 = nullptr;
    }
    if (m.metric_d2 && h.d2) {
        auto bd2 = m.metric_d2;
        auto hd2 = h.d2;
        p.metric_d2 = [bd2, hd2, t](const ChartPoint& x) {
            Tensor4 d = bd2(x);
            Tensor4 dh = hd2(x);
            for (std::size_t l = 0; l < d.size(); ++l)
                for (std::size_t k = 0; k < d[l].size(); ++k) d[l][k] += t * dh[l][k];
            return d;
        };
    } else {
        p.metric_d2 = nullptr;
    }
    p.embedding.clear();
    return p;
}

namespace {

double evaluate_quantity(const MetricModel& model, const ScalarField& f, VariedQuantity q,
                         const ChartPoint& x) {
    switch (q) {
        case VariedQuantity::LaplacianF:
            return laplacian(model, f, x);
        case VariedQuantity::GradNormF: {
            MetricJet J = metric_jet(model, x, 0);
            Vec df = scalar_d1(f, x, model.fd_step);
            return df.dot(J.ginv * df);
        }
        case VariedQuantity::ScalarCurv:
            return scalar_curvature(model, x);
        case VariedQuantity::PerelmanScalar:
            return perelman_scalar(WeightedSpace{model, f}, x);
    }
    return 0.0;
}

}  // namespace

double numeric_variation(const WeightedSpace& ws, const MetricPerturbation& pert,
                         VariedQuantity quantity, const ChartPoint& x) {
    require_in_chart(ws.model, x);
    auto central = [&](double t) {
        MetricModel mp = perturbed_model(ws.model, pert.h, t);
        MetricModel mm = perturbed_model(ws.model, pert.h, -t);
        return (evaluate_quantity(mp, ws.density, quantity, x) -
                evaluate_quantity(mm, ws.density, quantity, x)) /
               (2.0 * t);
    };
    const double t = pert.t_step;
    const double d1 = central(t);
    const double d2 = central(0.5 * t);
    return (4.0 * d2 - d1) / 3.0;
}

void require_spd_over_grid(const WeightedSpace& ws, const MetricPerturbation& pert,
                           const QuadratureGrid& grid) {
    for (const auto& p : grid.points) {
        for (double s : {pert.t_step, -pert.t_step}) {
            Mat g = ws.model.metric_at(p) + s * pert.h.value(p);
            Eigen::LLT<Mat> llt(g);
            if (llt.info() != Eigen::Success)
                throw NumericError("perturbed metric loses positive definiteness at t = " +
                                   std::to_string(s));
        }
    }
}

TwoSidedReport adjoint_duality_check(const WeightedSpace& ws, const ScalarField& u,
                                     const MetricPerturbation& pert, const QuadratureGrid& grid,
                                     double tolerance) {
    TwoSidedReport rep;
    rep.id = "adjoint-duality";
    rep.tolerance = tolerance;
    rep.lhs = integrate(ws, grid, [&](const ChartPoint& p) {
        MetricJet J = metric_jet(ws.model, p, 0);
        return tensor_inner(J.ginv, adjoint_operator(ws, u, p), pert.h.value(p));
    });
    rep.rhs = integrate(ws, grid,
                        [&](const ChartPoint& p) { return u.value(p) * linearized_perelman(ws, pert, p); });
    rep.finalize();
    return rep;
}

}  // namespace wgeom
