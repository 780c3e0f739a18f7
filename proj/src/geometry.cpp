#include "wgeom/geometry.hpp"

#include <cmath>

namespace wgeom {

MetricJet metric_jet(const MetricModel& m, const ChartPoint& x, int order) {
    const int n = m.dim;
    MetricJet J;
    J.g = m.metric_at(x);
    Eigen::LLT<Mat> llt(J.g);
    if (llt.info() != Eigen::Success)
        throw NumericError("metric not positive definite on model '" + m.name + "'");
    J.ginv = J.g.inverse();
    J.sqrt_det = std::sqrt(J.g.determinant());
    if (order < 1) return J;

    J.dg = metric_d1_at(m, x);
    J.Gamma.assign(n, Mat::Zero(n, n));
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                double s = 0.0;
                for (int l = 0; l < n; ++l)
                    s += J.ginv(k, l) * (J.dg[i](j, l) + J.dg[j](i, l) - J.dg[l](i, j));
                J.Gamma[k](i, j) = 0.5 * s;
            }
    if (order < 2) return J;

    J.d2g = metric_d2_at(m, x);
    // ∂_m g^{kl} = -(g^{-1} ∂_m g g^{-1})^{kl}
    Tensor3 dginv(n);
    for (int mm = 0; mm < n; ++mm) dginv[mm] = (-J.ginv * J.dg[mm] * J.ginv).eval();
    J.dGamma.assign(n, Tensor3(n, Mat::Zero(n, n)));
    for (int mm = 0; mm < n; ++mm)
        for (int k = 0; k < n; ++k)
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) {
                    double s = 0.0;
                    for (int l = 0; l < n; ++l) {
                        s += dginv[mm](k, l) * (J.dg[i](j, l) + J.dg[j](i, l) - J.dg[l](i, j));
                        s += J.ginv(k, l) *
                             (J.d2g[mm][i](j, l) + J.d2g[mm][j](i, l) - J.d2g[mm][l](i, j));
                    }
                    J.dGamma[mm][k](i, j) = 0.5 * s;
                }
    return J;
}

Tensor3 christoffel(const MetricModel& m, const ChartPoint& x) {
    require_in_chart(m, x);
    return metric_jet(m, x, 1).Gamma;
}

namespace {

Mat ricci_from_jet(const MetricJet& J) {
    const int n = static_cast<int>(J.g.rows());
    // Ric_jk = ∂_i Γ^i_jk − ∂_j Γ^i_ik + Γ^i_im Γ^m_jk − Γ^i_jm Γ^m_ik
    Mat R = Mat::Zero(n, n);
    Vec trGamma = Vec::Zero(n);  // Γ^i_im
    for (int i = 0; i < n; ++i)
        for (int mm = 0; mm < n; ++mm) trGamma(mm) += J.Gamma[i](i, mm);
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) {
            double s = 0.0;
            for (int i = 0; i < n; ++i) {
                s += J.dGamma[i][i](j, k) - J.dGamma[j][i](i, k);
                for (int mm = 0; mm < n; ++mm) s -= J.Gamma[i](j, mm) * J.Gamma[mm](i, k);
            }
            for (int mm = 0; mm < n; ++mm) s += trGamma(mm) * J.Gamma[mm](j, k);
            R(j, k) = s;
        }
    return (0.5 * (R + R.transpose())).eval();
}

}  // namespace

Mat ricci(const MetricModel& m, const ChartPoint& x) {
    require_in_chart(m, x);
    if (m.dim == 1) return Mat::Zero(1, 1);
    return ricci_from_jet(metric_jet(m, x, 2));
}

double scalar_curvature(const MetricModel& m, const ChartPoint& x) {
    require_in_chart(m, x);
    if (m.dim == 1) return 0.0;
    MetricJet J = metric_jet(m, x, 2);
    return (J.ginv * ricci_from_jet(J)).trace();
}

Vec gradient(const MetricModel& m, const ScalarField& u, const ChartPoint& x) {
    require_in_chart(m, x);
    MetricJet J = metric_jet(m, x, 0);
    return J.ginv * scalar_d1(u, x, m.fd_step);
}

Mat hessian(const MetricModel& m, const ScalarField& u, const ChartPoint& x) {
    require_in_chart(m, x);
    MetricJet J = metric_jet(m, x, 1);
    const int n = m.dim;
    Vec du = scalar_d1(u, x, m.fd_step);
    Mat H = scalar_d2(u, x, m.fd_step);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) H(i, j) -= J.Gamma[k](i, j) * du(k);
    return (0.5 * (H + H.transpose())).eval();
}

double laplacian(const MetricModel& m, const ScalarField& u, const ChartPoint& x) {
    MetricJet J = metric_jet(m, x, 1);
    const int n = m.dim;
    Vec du = scalar_d1(u, x, m.fd_step);
    Mat H = scalar_d2(u, x, m.fd_step);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) H(i, j) -= J.Gamma[k](i, j) * du(k);
    return (J.ginv * H).trace();
}

double div_vector(const MetricModel& m, const VectorField& X, const ChartPoint& x) {
    require_in_chart(m, x);
    MetricJet J = metric_jet(m, x, 1);
    const int n = m.dim;
    Mat dX = vector_d1(X, x, m.fd_step);
    Vec Xv = X.value(x);
    double s = dX.trace();
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k) s += J.Gamma[i](i, k) * Xv(k);
    return s;
}

namespace {

Vec div_tensor_from(const MetricJet& J, const Mat& h, const Tensor3& dh) {
    const int n = static_cast<int>(J.g.rows());
    Vec out = Vec::Zero(n);
    for (int j = 0; j < n; ++j) {
        double s = 0.0;
        for (int i = 0; i < n; ++i)
            for (int k = 0; k < n; ++k) {
                double cov = dh[i](k, j);
                for (int l = 0; l < n; ++l)
                    cov -= J.Gamma[l](i, k) * h(l, j) + J.Gamma[l](i, j) * h(k, l);
                s += J.ginv(i, k) * cov;
            }
        out(j) = s;
    }
    return out;
}

}  // namespace

Vec div_tensor(const MetricModel& m, const SymTensorField& h, const ChartPoint& x) {
    require_in_chart(m, x);
    MetricJet J = metric_jet(m, x, 1);
    return div_tensor_from(J, h.value(x), tensor_d1(h, x, m.fd_step));
}

double tensor_inner(const Mat& ginv, const Mat& A, const Mat& B) {
    return (ginv * A * ginv * B.transpose()).trace();
}

double tensor_inner(const MetricModel& m, const SymTensorField& A, const SymTensorField& B,
                    const ChartPoint& x) {
    require_in_chart(m, x);
    MetricJet J = metric_jet(m, x, 0);
    return tensor_inner(J.ginv, A.value(x), B.value(x));
}

Mat covariant_d_oneform(const MetricJet& J, const Vec& omega, const Mat& domega) {
    const int n = static_cast<int>(J.g.rows());
    Mat out(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            double s = domega(j, i);  // ∂_i ω_j
            for (int k = 0; k < n; ++k) s -= J.Gamma[k](i, j) * omega(k);
            out(i, j) = s;
        }
    return out;
}

double div_oneform(const MetricJet& J, const Vec& omega, const Mat& domega) {
    return (J.ginv * covariant_d_oneform(J, omega, domega)).trace();
}

TensorDivJet tensor_div_jet(const MetricModel& m, const MetricJet& J, const SymTensorField& h,
                            const ChartPoint& x) {
    const int n = m.dim;
    const double step = m.fd_step;
    Mat hv = h.value(x);
    Tensor3 dh = tensor_d1(h, x, step);
    Tensor4 d2h = tensor_d2(h, x, step);
    // ∂_m g^{ik}
    Tensor3 dginv(n);
    for (int mm = 0; mm < n; ++mm) dginv[mm] = (-J.ginv * J.dg[mm] * J.ginv).eval();

    TensorDivJet out;
    out.div_h = div_tensor_from(J, hv, dh);
    out.d_div_h = Mat::Zero(n, n);
    for (int mm = 0; mm < n; ++mm)
        for (int j = 0; j < n; ++j) {
            double s = 0.0;
            for (int i = 0; i < n; ++i)
                for (int k = 0; k < n; ++k) {
                    double cov = dh[i](k, j);
                    double dcov = d2h[mm][i](k, j);
                    for (int l = 0; l < n; ++l) {
                        cov -= J.Gamma[l](i, k) * hv(l, j) + J.Gamma[l](i, j) * hv(k, l);
                        dcov -= J.dGamma[mm][l](i, k) * hv(l, j) + J.Gamma[l](i, k) * dh[mm](l, j);
                        dcov -= J.dGamma[mm][l](i, j) * hv(k, l) + J.Gamma[l](i, j) * dh[mm](k, l);
                    }
                    s += dginv[mm](i, k) * cov + J.ginv(i, k) * dcov;
                }
            out.d_div_h(j, mm) = s;
        }
    return out;
}

double div_div_tensor(const MetricModel& m, const SymTensorField& h, const ChartPoint& x) {
    require_in_chart(m, x);
    MetricJet J = metric_jet(m, x, 2);
    TensorDivJet D = tensor_div_jet(m, J, h, x);
    // d_div_h(j, m) = ∂_m ω_j, div_oneform wants ∂_i ω_j at (j, i)
    return div_oneform(J, D.div_h, D.d_div_h);
}

}  // namespace wgeom
