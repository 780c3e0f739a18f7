#include "wgeom/fields.hpp"

namespace wgeom {

Vec fd_gradient(const std::function<double(const ChartPoint&)>& f, const ChartPoint& x, double h) {
    const int n = static_cast<int>(x.size());
    Vec g(n);
    for (int i = 0; i < n; ++i) {
        ChartPoint xp = x, xm = x;
        xp(i) += h;
        xm(i) -= h;
        g(i) = (f(xp) - f(xm)) / (2.0 * h);
    }
    return g;
}

Mat fd_hessian(const std::function<double(const ChartPoint&)>& f, const ChartPoint& x, double h) {
    const int n = static_cast<int>(x.size());
    Mat H(n, n);
    const double f0 = f(x);
    for (int i = 0; i < n; ++i) {
        ChartPoint xp = x, xm = x;
        xp(i) += h;
        xm(i) -= h;
        H(i, i) = (f(xp) - 2.0 * f0 + f(xm)) / (h * h);
        for (int j = i + 1; j < n; ++j) {
            ChartPoint xpp = x, xpm = x, xmp = x, xmm = x;
            xpp(i) += h; xpp(j) += h;
            xpm(i) += h; xpm(j) -= h;
            xmp(i) -= h; xmp(j) += h;
            xmm(i) -= h; xmm(j) -= h;
            H(i, j) = H(j, i) = (f(xpp) - f(xpm) - f(xmp) + f(xmm)) / (4.0 * h * h);
        }
    }
    return H;
}

Vec scalar_d1(const ScalarField& u, const ChartPoint& x, double h) {
    if (u.d1) return u.d1(x);
    return fd_gradient(u.value, x, h);
}

Mat scalar_d2(const ScalarField& u, const ChartPoint& x, double h) {
    if (u.d2) return u.d2(x);
    if (u.d1) {
        // FD of the analytic gradient: one order of FD instead of two
        const int n = static_cast<int>(x.size());
        Mat H(n, n);
        for (int i = 0; i < n; ++i) {
            ChartPoint xp = x, xm = x;
            xp(i) += h;
            xm(i) -= h;
            H.col(i) = (u.d1(xp) - u.d1(xm)) / (2.0 * h);
        }
        return 0.5 * (H + H.transpose());
    }
    return fd_hessian(u.value, x, h);
}

Tensor3 scalar_d3(const ScalarField& u, const ChartPoint& x, double h) {
    if (u.d3) return u.d3(x);
    const int n = static_cast<int>(x.size());
    Tensor3 T(n);
    for (int k = 0; k < n; ++k) {
        ChartPoint xp = x, xm = x;
        xp(k) += h;
        xm(k) -= h;
        T[k] = (scalar_d2(u, xp, h) - scalar_d2(u, xm, h)) / (2.0 * h);
    }
    return T;
}

Mat vector_d1(const VectorField& X, const ChartPoint& x, double h) {
    if (X.d1) return X.d1(x);
    const int n = static_cast<int>(x.size());
    Mat J(X.dim, n);
    for (int j = 0; j < n; ++j) {
        ChartPoint xp = x, xm = x;
        xp(j) += h;
        xm(j) -= h;
        J.col(j) = (X.value(xp) - X.value(xm)) / (2.0 * h);
    }
    return J;
}

Tensor3 tensor_d1(const SymTensorField& T, const ChartPoint& x, double h) {
    if (T.d1) return T.d1(x);
    const int n = static_cast<int>(x.size());
    Tensor3 D(n);
    for (int k = 0; k < n; ++k) {
        ChartPoint xp = x, xm = x;
        xp(k) += h;
        xm(k) -= h;
        D[k] = (T.value(xp) - T.value(xm)) / (2.0 * h);
    }
    return D;
}

Tensor4 tensor_d2(const SymTensorField& T, const ChartPoint& x, double h) {
    if (T.d2) return T.d2(x);
    const int n = static_cast<int>(x.size());
    Tensor4 D(n);
    for (int l = 0; l < n; ++l) {
        ChartPoint xp = x, xm = x;
        xp(l) += h;
        xm(l) -= h;
        Tensor3 Dp = tensor_d1(T, xp, h), Dm = tensor_d1(T, xm, h);
        D[l].resize(n);
        for (int k = 0; k < n; ++k) D[l][k] = (Dp[k] - Dm[k]) / (2.0 * h);
    }
    return D;
}

ScalarField constant_field(double c) {
    ScalarField u;
    u.value = [c](const ChartPoint&) { return c; };
    u.d1 = [](const ChartPoint& x) { return Vec::Zero(x.size()).eval(); };
    u.d2 = [](const ChartPoint& x) { return Mat::Zero(x.size(), x.size()).eval(); };
    u.d3 = [](const ChartPoint& x) { return zero_tensor3(static_cast<int>(x.size())); };
    return u;
}

ScalarField scalar_from_callable(std::function<double(const ChartPoint&)> f) {
    ScalarField u;
    u.value = std::move(f);
    return u;
}

ScalarField scalar_from_expr(const expr::ExprPtr& e, int dim) {
    using expr::ExprPtr;
    std::vector<ExprPtr> g(dim);
    std::vector<std::vector<ExprPtr>> H(dim, std::vector<ExprPtr>(dim));
    std::vector<std::vector<std::vector<ExprPtr>>> T(
        dim, std::vector<std::vector<ExprPtr>>(dim, std::vector<ExprPtr>(dim)));
    for (int i = 0; i < dim; ++i) {
        g[i] = expr::diff(e, i);
        for (int j = 0; j < dim; ++j) {
            H[i][j] = expr::diff(g[i], j);
            for (int k = 0; k < dim; ++k) T[k][i][j] = expr::diff(H[i][j], k);
        }
    }
    ScalarField u;
    u.value = [e](const ChartPoint& x) { return expr::eval(e, x); };
    u.d1 = [g, dim](const ChartPoint& x) {
        Vec v(dim);
        for (int i = 0; i < dim; ++i) v(i) = expr::eval(g[i], x);
        return v;
    };
    u.d2 = [H, dim](const ChartPoint& x) {
        Mat m(dim, dim);
        for (int i = 0; i < dim; ++i)
            for (int j = 0; j < dim; ++j) m(i, j) = expr::eval(H[i][j], x);
        return m;
    };
    u.d3 = [T, dim](const ChartPoint& x) {
        Tensor3 t(dim, Mat(dim, dim));
        for (int k = 0; k < dim; ++k)
            for (int i = 0; i < dim; ++i)
                for (int j = 0; j < dim; ++j) t[k](i, j) = expr::eval(T[k][i][j], x);
        return t;
    };
    return u;
}

ScalarField scalar_from_expr(const std::string& text, const std::vector<std::string>& vars) {
    return scalar_from_expr(expr::parse(text, vars), static_cast<int>(vars.size()));
}

ScalarField derived_scalar(std::function<double(const ChartPoint&)> f, double fd_step) {
    ScalarField u;
    u.value = std::move(f);
    auto fv = u.value;
    u.d1 = [fv, fd_step](const ChartPoint& x) { return fd_gradient(fv, x, fd_step); };
    u.d2 = [fv, fd_step](const ChartPoint& x) { return fd_hessian(fv, x, fd_step); };
    return u;
}

SymTensorField tensor_from_exprs(const std::vector<std::vector<expr::ExprPtr>>& comp, int dim) {
    using expr::ExprPtr;
    std::vector<std::vector<ExprPtr>> c(dim, std::vector<ExprPtr>(dim));
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) c[i][j] = comp[i][j];
    std::vector<std::vector<std::vector<ExprPtr>>> d1(
        dim, std::vector<std::vector<ExprPtr>>(dim, std::vector<ExprPtr>(dim)));
    std::vector<std::vector<std::vector<std::vector<ExprPtr>>>> d2(
        dim, std::vector<std::vector<std::vector<ExprPtr>>>(
                 dim, std::vector<std::vector<ExprPtr>>(dim, std::vector<ExprPtr>(dim))));
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j)
            for (int k = 0; k < dim; ++k) {
                d1[k][i][j] = expr::diff(c[i][j], k);
                for (int l = 0; l < dim; ++l) d2[l][k][i][j] = expr::diff(d1[k][i][j], l);
            }

    SymTensorField T;
    T.dim = dim;
    T.value = [c, dim](const ChartPoint& x) {
        Mat m(dim, dim);
        for (int i = 0; i < dim; ++i)
            for (int j = 0; j < dim; ++j) m(i, j) = expr::eval(c[i][j], x);
        return (0.5 * (m + m.transpose())).eval();
    };
    T.d1 = [d1, dim](const ChartPoint& x) {
        Tensor3 t(dim, Mat(dim, dim));
        for (int k = 0; k < dim; ++k) {
            for (int i = 0; i < dim; ++i)
                for (int j = 0; j < dim; ++j) t[k](i, j) = expr::eval(d1[k][i][j], x);
            t[k] = 0.5 * (t[k] + t[k].transpose().eval());
        }
        return t;
    };
    T.d2 = [d2, dim](const ChartPoint& x) {
        Tensor4 t(dim, Tensor3(dim, Mat(dim, dim)));
        for (int l = 0; l < dim; ++l)
            for (int k = 0; k < dim; ++k) {
                for (int i = 0; i < dim; ++i)
                    for (int j = 0; j < dim; ++j) t[l][k](i, j) = expr::eval(d2[l][k][i][j], x);
                t[l][k] = 0.5 * (t[l][k] + t[l][k].transpose().eval());
            }
        return t;
    };
    return T;
}

ScalarField scalar_axpy(double a, const ScalarField& u, double b, const ScalarField& v) {
    ScalarField w;
    w.value = [a, u, b, v](const ChartPoint& x) { return a * u.value(x) + b * v.value(x); };
    if (u.d1 && v.d1) {
        w.d1 = [a, u, b, v](const ChartPoint& x) { return (a * u.d1(x) + b * v.d1(x)).eval(); };
    }
    if (u.d2 && v.d2) {
        w.d2 = [a, u, b, v](const ChartPoint& x) { return (a * u.d2(x) + b * v.d2(x)).eval(); };
    }
    if (u.d3 && v.d3) {
        w.d3 = [a, u, b, v](const ChartPoint& x) {
            Tensor3 s = u.d3(x), t = v.d3(x);
            for (std::size_t k = 0; k < s.size(); ++k) s[k] = a * s[k] + b * t[k];
            return s;
        };
    }
    return w;
}

SymTensorField tensor_scale(double a, const SymTensorField& T) {
    SymTensorField S = T;
    auto val = T.value;
    S.value = [a, val](const ChartPoint& x) { return (a * val(x)).eval(); };
    if (T.d1) {
        auto d1 = T.d1;
        S.d1 = [a, d1](const ChartPoint& x) {
            Tensor3 t = d1(x);
            for (auto& m : t) m *= a;
            return t;
        };
    }
    if (T.d2) {
        auto d2 = T.d2;
        S.d2 = [a, d2](const ChartPoint& x) {
            Tensor4 t = d2(x);
            for (auto& r : t)
                for (auto& m : r) m *= a;
            return t;
        };
    }
    return S;
}

}  // namespace wgeom
