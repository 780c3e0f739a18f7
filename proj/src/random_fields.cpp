#include "wgeom/random_fields.hpp"

#include <cmath>

#include "wgeom/geometry.hpp"

namespace wgeom {

namespace {

// multi-indices with total degree in [1, maxdeg]
void enumerate_monomials(int nvars, int maxdeg, std::vector<std::vector<int>>& out) {
    std::vector<int> idx(nvars, 0);
    for (;;) {
        int total = 0;
        for (int v : idx) total += v;
        if (total >= 1 && total <= maxdeg) out.push_back(idx);
        int d = 0;
        while (d < nvars) {
            if (++idx[d] <= maxdeg) break;
            idx[d] = 0;
            ++d;
        }
        if (d == nvars) break;
    }
}

SymTensorField tensor_add(const SymTensorField& A, const SymTensorField& B) {
    SymTensorField S;
    S.dim = A.dim;
    auto av = A.value, bv = B.value;
    S.value = [av, bv](const ChartPoint& x) { return (av(x) + bv(x)).eval(); };
    if (A.d1 && B.d1) {
        auto a = A.d1, b = B.d1;
        S.d1 = [a, b](const ChartPoint& x) {
            Tensor3 t = a(x), s = b(x);
            for (std::size_t k = 0; k < t.size(); ++k) t[k] += s[k];
            return t;
        };
    }
    if (A.d2 && B.d2) {
        auto a = A.d2, b = B.d2;
        S.d2 = [a, b](const ChartPoint& x) {
            Tensor4 t = a(x), s = b(x);
            for (std::size_t l = 0; l < t.size(); ++l)
                for (std::size_t k = 0; k < t[l].size(); ++k) t[l][k] += s[l][k];
            return t;
        };
    }
    return S;
}

}  // namespace

ScalarField random_scalar(const MetricModel& m, const CounterRng& rng, std::uint64_t counter_base,
                          int max_degree) {
    if (!m.embedding.empty()) {
        const int nv = static_cast<int>(m.embedding.size());
        std::vector<std::vector<int>> mono;
        enumerate_monomials(nv, max_degree, mono);
        expr::ExprPtr e = expr::constant(rng.uniform(counter_base, -0.5, 0.5));
        for (std::size_t k = 0; k < mono.size(); ++k) {
            int deg = 0;
            for (int p : mono[k]) deg += p;
            const double amp = rng.uniform(counter_base + 1 + k, -1.0, 1.0) / ((1.0 + deg) * (1.0 + deg));
            expr::ExprPtr term = expr::constant(amp);
            for (int v = 0; v < nv; ++v)
                for (int p = 0; p < mono[k][v]; ++p) term = expr::mul(term, m.embedding[v]);
            e = expr::add(e, term);
        }
        return scalar_from_expr(e, m.dim);
    }
    // low-frequency trig polynomial on the chart box
    const int n = m.dim;
    const int nterms = 5;
    expr::ExprPtr e = expr::constant(0.0);
    std::uint64_t c = counter_base;
    for (int k = 0; k < nterms; ++k) {
        const double amp = rng.uniform(c++, -1.0, 1.0) / nterms;
        const double phase = rng.uniform(c++, 0.0, 6.283185307179586);
        expr::ExprPtr arg = expr::constant(phase);
        for (int d = 0; d < n; ++d) {
            const double w = rng.uniform(c++, -1.5, 1.5);
            arg = expr::add(arg, expr::mul(expr::constant(w), expr::var(d)));
        }
        e = expr::add(e, expr::mul(expr::constant(amp), expr::cos(arg)));
    }
    return scalar_from_expr(e, n);
}

SymTensorField scalar_times_metric(const MetricModel& m, const ScalarField& a) {
    MetricModel model = m;
    ScalarField af = a;
    SymTensorField T;
    T.dim = m.dim;
    T.value = [model, af](const ChartPoint& x) { return (af.value(x) * model.metric_at(x)).eval(); };
    T.d1 = [model, af](const ChartPoint& x) {
        Tensor3 dg = metric_d1_at(model, x);
        Vec da = scalar_d1(af, x, model.fd_step);
        const double av = af.value(x);
        Mat g = model.metric_at(x);
        for (int k = 0; k < model.dim; ++k) dg[k] = (da(k) * g + av * dg[k]).eval();
        return dg;
    };
    T.d2 = [model, af](const ChartPoint& x) {
        const int n = model.dim;
        Mat g = model.metric_at(x);
        Tensor3 dg = metric_d1_at(model, x);
        Tensor4 d2g = metric_d2_at(model, x);
        const double av = af.value(x);
        Vec da = scalar_d1(af, x, model.fd_step);
        Mat d2a = scalar_d2(af, x, model.fd_step);
        Tensor4 out = zero_tensor4(n);
        for (int l = 0; l < n; ++l)
            for (int k = 0; k < n; ++k)
                out[l][k] = (d2a(l, k) * g + da(k) * dg[l] + da(l) * dg[k] + av * d2g[l][k]).eval();
        return out;
    };
    return T;
}

SymTensorField grad_outer(const ScalarField& psi, const ScalarField& phi, int dim) {
    ScalarField p = psi, q = phi;
    SymTensorField T;
    T.dim = dim;
    const double h = 1e-5;
    T.value = [p, q, h](const ChartPoint& x) {
        Vec dp = scalar_d1(p, x, h), dq = scalar_d1(q, x, h);
        return (0.5 * (dp * dq.transpose() + dq * dp.transpose())).eval();
    };
    T.d1 = [p, q, h](const ChartPoint& x) {
        const int n = static_cast<int>(x.size());
        Vec dp = scalar_d1(p, x, h), dq = scalar_d1(q, x, h);
        Mat d2p = scalar_d2(p, x, h), d2q = scalar_d2(q, x, h);
        Tensor3 out(n);
        for (int k = 0; k < n; ++k) {
            Mat m = d2p.col(k) * dq.transpose() + dp * d2q.col(k).transpose();
            out[k] = (0.5 * (m + m.transpose())).eval();
        }
        return out;
    };
    T.d2 = [p, q, h](const ChartPoint& x) {
        const int n = static_cast<int>(x.size());
        Vec dp = scalar_d1(p, x, h), dq = scalar_d1(q, x, h);
        Mat d2p = scalar_d2(p, x, h), d2q = scalar_d2(q, x, h);
        Tensor3 d3p = scalar_d3(p, x, h), d3q = scalar_d3(q, x, h);
        Tensor4 out = zero_tensor4(n);
        for (int l = 0; l < n; ++l)
            for (int k = 0; k < n; ++k) {
                Mat m = d3p[l].col(k) * dq.transpose() + d2p.col(k) * d2q.col(l).transpose() +
                        d2p.col(l) * d2q.col(k).transpose() + dp * d3q[l].col(k).transpose();
                out[l][k] = (0.5 * (m + m.transpose())).eval();
            }
        return out;
    };
    return T;
}

SymTensorField random_tensor(const MetricModel& m, const CounterRng& rng,
                             std::uint64_t counter_base, int max_degree) {
    ScalarField a = random_scalar(m, rng, counter_base, max_degree);
    ScalarField psi = random_scalar(m, rng, counter_base + kFieldCounterStride, max_degree);
    ScalarField phi = random_scalar(m, rng, counter_base + 2 * kFieldCounterStride, max_degree);
    const double c1 = rng.uniform(counter_base + 3 * kFieldCounterStride, -1.0, 1.0);
    const double c2 = rng.uniform(counter_base + 3 * kFieldCounterStride + 1, -1.0, 1.0);
    return tensor_add(tensor_scale(c1, scalar_times_metric(m, a)),
                      tensor_scale(c2, grad_outer(psi, phi, m.dim)));
}

VectorField gradient_field(const MetricModel& m, const ScalarField& psi) {
    MetricModel model = m;
    ScalarField p = psi;
    VectorField X;
    X.dim = m.dim;
    X.value = [model, p](const ChartPoint& x) {
        MetricJet J = metric_jet(model, x, 0);
        return (J.ginv * scalar_d1(p, x, model.fd_step)).eval();
    };
    X.d1 = [model, p](const ChartPoint& x) {
        const int n = model.dim;
        MetricJet J = metric_jet(model, x, 1);
        Vec dp = scalar_d1(p, x, model.fd_step);
        Mat d2p = scalar_d2(p, x, model.fd_step);
        Mat out(n, n);
        for (int k = 0; k < n; ++k) {
            Mat dginv = (-J.ginv * J.dg[k] * J.ginv).eval();
            out.col(k) = dginv * dp + J.ginv * d2p.col(k);
        }
        return out;
    };
    return X;
}

ScalarField bump_field(const Vec& center, double radius) {
    Vec c = center;
    const double r2 = radius * radius;
    auto s_of = [c, r2](const ChartPoint& x) { return (x - c).squaredNorm() / r2; };
    ScalarField u;
    u.value = [s_of](const ChartPoint& x) {
        const double s = s_of(x);
        return s < 1.0 ? std::exp(1.0 / (s - 1.0)) : 0.0;
    };
    u.d1 = [s_of, c, r2](const ChartPoint& x) {
        const double s = s_of(x);
        if (s >= 1.0) return Vec::Zero(x.size()).eval();
        const double B = std::exp(1.0 / (s - 1.0));
        const double dB = -B / ((s - 1.0) * (s - 1.0));
        Vec ds = 2.0 * (x - c) / r2;
        return (dB * ds).eval();
    };
    u.d2 = [s_of, c, r2](const ChartPoint& x) {
        const int n = static_cast<int>(x.size());
        const double s = s_of(x);
        if (s >= 1.0) return Mat::Zero(n, n).eval();
        const double B = std::exp(1.0 / (s - 1.0));
        const double sm = s - 1.0;
        const double dB = -B / (sm * sm);
        const double d2B = B * (1.0 / (sm * sm * sm * sm) + 2.0 / (sm * sm * sm));
        Vec ds = 2.0 * (x - c) / r2;
        return (d2B * ds * ds.transpose() + dB * (2.0 / r2) * Mat::Identity(n, n)).eval();
    };
    return u;
}

ScalarField scalar_product(const ScalarField& a, const ScalarField& b) {
    ScalarField w;
    ScalarField af = a, bf = b;
    w.value = [af, bf](const ChartPoint& x) { return af.value(x) * bf.value(x); };
    if (a.d1 && b.d1) {
        w.d1 = [af, bf](const ChartPoint& x) {
            return (af.d1(x) * bf.value(x) + af.value(x) * bf.d1(x)).eval();
        };
    }
    if (a.d2 && b.d2) {
        w.d2 = [af, bf](const ChartPoint& x) {
            Vec da = af.d1(x), db = bf.d1(x);
            return (af.d2(x) * bf.value(x) + da * db.transpose() + db * da.transpose() +
                    af.value(x) * bf.d2(x))
                .eval();
        };
    }
    return w;
}

}  // namespace wgeom
