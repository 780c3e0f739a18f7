#include "wgeom/metric.hpp"

#include <cmath>

namespace wgeom {

using nlohmann::json;

Mat metric_value(const MetricModel& m, const ChartPoint& x) { return m.metric_at(x); }

Tensor3 metric_d1_at(const MetricModel& m, const ChartPoint& x) {
    if (m.metric_d1) return m.metric_d1(x);
    const int n = m.dim;
    const double h = m.fd_step;
    Tensor3 D(n);
    for (int k = 0; k < n; ++k) {
        ChartPoint xp = x, xm = x;
        xp(k) += h;
        xm(k) -= h;
        D[k] = (m.metric_at(xp) - m.metric_at(xm)) / (2.0 * h);
    }
    return D;
}

Tensor4 metric_d2_at(const MetricModel& m, const ChartPoint& x) {
    if (m.metric_d2) return m.metric_d2(x);
    const int n = m.dim;
    const double h = m.fd_step;
    Tensor4 D(n, Tensor3(n));
    const Mat g0 = m.metric_at(x);
    for (int l = 0; l < n; ++l) {
        for (int k = l; k < n; ++k) {
            Mat d;
            if (k == l) {
                ChartPoint xp = x, xm = x;
                xp(k) += h;
                xm(k) -= h;
                d = (m.metric_at(xp) - 2.0 * g0 + m.metric_at(xm)) / (h * h);
            } else {
                ChartPoint xpp = x, xpm = x, xmp = x, xmm = x;
                xpp(k) += h; xpp(l) += h;
                xpm(k) += h; xpm(l) -= h;
                xmp(k) -= h; xmp(l) += h;
                xmm(k) -= h; xmm(l) -= h;
                d = (m.metric_at(xpp) - m.metric_at(xpm) - m.metric_at(xmp) + m.metric_at(xmm)) /
                    (4.0 * h * h);
            }
            D[l][k] = d;
            D[k][l] = d;
        }
    }
    return D;
}

void require_in_chart(const MetricModel& m, const ChartPoint& x) {
    if (static_cast<int>(x.size()) != m.dim)
        throw DomainError("point dimension " + std::to_string(x.size()) + " does not match model '" +
                          m.name + "' (dim " + std::to_string(m.dim) + ")");
    if (m.chart_contains && !m.chart_contains(x))
        throw DomainError("point outside chart domain of model '" + m.name + "'");
}

MetricModel with_fd_step(MetricModel m, double h) {
    m.fd_step = h;
    return m;
}

namespace {

// Metric closures (value, d1, d2) from a symmetric grid of expressions.
void metric_from_exprs(MetricModel& m, const std::vector<std::vector<expr::ExprPtr>>& comps) {
    const int n = m.dim;
    SymTensorField t = tensor_from_exprs(comps, n);
    m.metric_at = t.value;
    auto d1 = t.d1;
    auto d2 = t.d2;
    m.metric_d1 = [d1](const ChartPoint& x) { return d1(x); };
    m.metric_d2 = [d2](const ChartPoint& x) { return d2(x); };
}

double get_num(const json& spec, const std::string& key, double dflt) {
    if (!spec.contains(key)) return dflt;
    if (!spec.at(key).is_number()) throw ConfigError("model parameter '" + key + "' must be numeric");
    return spec.at(key).get<double>();
}

int get_int(const json& spec, const std::string& key, int dflt) {
    if (!spec.contains(key)) return dflt;
    if (!spec.at(key).is_number_integer())
        throw ConfigError("model parameter '" + key + "' must be an integer");
    return spec.at(key).get<int>();
}

std::vector<std::string> default_vars(int n) {
    static const std::vector<std::string> names = {"x", "y", "z", "w"};
    return {names.begin(), names.begin() + n};
}

MetricModel flat_chart(int n, const std::string& name, double half_width) {
    MetricModel m;
    m.dim = n;
    m.name = name;
    m.vars = default_vars(n);
    m.metric_at = [n](const ChartPoint&) { return Mat::Identity(n, n).eval(); };
    m.metric_d1 = [n](const ChartPoint&) { return zero_tensor3(n); };
    m.metric_d2 = [n](const ChartPoint&) { return zero_tensor4(n); };
    m.box_lo = Vec::Constant(n, -half_width);
    m.box_hi = Vec::Constant(n, half_width);
    m.grid_kind = GridKind::Box;
    for (int i = 0; i < n; ++i) m.embedding.push_back(expr::var(i));
    return m;
}

MetricModel make_sphere_spherical(const json& spec, bool hemisphere) {
    const double band = get_num(spec, "pole_band", 0.05);
    MetricModel m;
    m.dim = 2;
    m.name = hemisphere ? "hemisphere" : "sphere-spherical";
    m.vars = {"theta", "phi"};
    m.metric_at = [](const ChartPoint& x) {
        Mat g = Mat::Zero(2, 2);
        g(0, 0) = 1.0;
        const double s = std::sin(x(0));
        g(1, 1) = s * s;
        return g;
    };
    m.metric_d1 = [](const ChartPoint& x) {
        Tensor3 d = zero_tensor3(2);
        d[0](1, 1) = std::sin(2.0 * x(0));
        return d;
    };
    m.metric_d2 = [](const ChartPoint& x) {
        Tensor4 d = zero_tensor4(2);
        d[0][0](1, 1) = 2.0 * std::cos(2.0 * x(0));
        return d;
    };
    const double pi = 3.14159265358979323846;
    const double theta_max = hemisphere ? 0.5 * pi : pi - band;
    m.chart_contains = [band, theta_max](const ChartPoint& x) {
        return x(0) > band && x(0) <= theta_max + 1e-12;
    };
    m.closed = !hemisphere;
    m.grid_kind = hemisphere ? GridKind::Hemisphere : GridKind::Sphere;
    m.box_lo = Vec::Zero(2);
    m.box_hi = Vec::Zero(2);
    m.box_lo << band, 0.0;
    m.box_hi << theta_max, 2.0 * pi;
    // embedding (sin t cos p, sin t sin p, cos t)
    auto t = expr::var(0), p = expr::var(1);
    m.embedding = {expr::mul(expr::sin(t), expr::cos(p)), expr::mul(expr::sin(t), expr::sin(p)),
                   expr::cos(t)};
    if (hemisphere) {
        BoundaryComponent eq;
        eq.name = "equator";
        eq.param_dim = 1;
        eq.param_lo = Vec::Zero(1);
        eq.param_hi = Vec::Constant(1, 2.0 * pi);
        eq.periodic = true;
        eq.to_chart = [pi](const Vec& s) {
            ChartPoint x(2);
            x << 0.5 * pi, s(0);
            return x;
        };
        eq.to_chart_d1 = [](const Vec&) {
            Mat j(2, 1);
            j << 0.0, 1.0;
            return j;
        };
        eq.outward_normal = [](const ChartPoint&) {
            Vec nu(2);
            nu << 1.0, 0.0;  // unit since g_theta,theta = 1
            return nu;
        };
        m.boundary.push_back(eq);
    }
    return m;
}

MetricModel make_sphere_stereo(const json& spec) {
    const double radius = get_num(spec, "chart_radius", 3.0);
    const bool north = spec.value("pole", std::string("north")) == "north";
    MetricModel m;
    m.dim = 2;
    m.name = "sphere-stereo";
    m.vars = {"x", "y"};
    // g = 4/(1+x^2+y^2)^2 delta
    auto x = expr::var(0), y = expr::var(1);
    auto r2 = expr::add(expr::mul(x, x), expr::mul(y, y));
    auto conf = expr::div(expr::constant(4.0), expr::pow(expr::add(expr::constant(1.0), r2), 2.0));
    std::vector<std::vector<expr::ExprPtr>> comps(2, std::vector<expr::ExprPtr>(2));
    comps[0][0] = conf;
    comps[1][1] = conf;
    comps[0][1] = comps[1][0] = expr::constant(0.0);
    metric_from_exprs(m, comps);
    m.chart_contains = [radius](const ChartPoint& p) { return p.norm() < radius; };
    m.closed = true;  // chart of a closed manifold; no boundary terms
    m.grid_kind = GridKind::Box;
    const double s = radius / (2.0 * std::sqrt(2.0));
    m.box_lo = Vec::Constant(2, -s);
    m.box_hi = Vec::Constant(2, s);
    auto denom = expr::add(expr::constant(1.0), r2);
    auto zcomp = north ? expr::div(expr::sub(r2, expr::constant(1.0)), denom)
                       : expr::div(expr::sub(expr::constant(1.0), r2), denom);
    m.embedding = {expr::div(expr::mul(expr::constant(2.0), x), denom),
                   expr::div(expr::mul(expr::constant(2.0), y), denom), zcomp};
    return m;
}

MetricModel make_circle() {
    MetricModel m;
    m.dim = 1;
    m.name = "circle";
    m.vars = {"theta"};
    m.metric_at = [](const ChartPoint&) { return Mat::Identity(1, 1).eval(); };
    m.metric_d1 = [](const ChartPoint&) { return zero_tensor3(1); };
    m.metric_d2 = [](const ChartPoint&) { return zero_tensor4(1); };
    m.closed = true;
    m.grid_kind = GridKind::Circle;
    m.box_lo = Vec::Zero(1);
    m.box_hi = Vec::Constant(1, 2.0 * 3.14159265358979323846);
    m.chart_contains = [](const ChartPoint&) { return true; };  // periodic
    auto t = expr::var(0);
    m.embedding = {expr::cos(t), expr::sin(t)};
    return m;
}

MetricModel make_interval(const json& spec) {
    const double a = get_num(spec, "a", 0.0);
    const double b = get_num(spec, "b", 1.0);
    if (!(b > a)) throw ConfigError("interval model requires b > a");
    MetricModel m;
    m.dim = 1;
    m.name = "interval";
    m.vars = {"x"};
    m.metric_at = [](const ChartPoint&) { return Mat::Identity(1, 1).eval(); };
    m.metric_d1 = [](const ChartPoint&) { return zero_tensor3(1); };
    m.metric_d2 = [](const ChartPoint&) { return zero_tensor4(1); };
    m.chart_contains = [a, b](const ChartPoint& x) {
        return x(0) >= a - 1e-12 && x(0) <= b + 1e-12;
    };
    m.grid_kind = GridKind::Interval;
    m.box_lo = Vec::Constant(1, a);
    m.box_hi = Vec::Constant(1, b);
    m.embedding = {expr::var(0)};
    for (int side = 0; side < 2; ++side) {
        BoundaryComponent c;
        c.name = side == 0 ? "left" : "right";
        c.param_dim = 0;
        const double at = side == 0 ? a : b;
        const double sign = side == 0 ? -1.0 : 1.0;
        c.to_chart = [at](const Vec&) { return Vec::Constant(1, at).eval(); };
        c.outward_normal = [sign](const ChartPoint&) { return Vec::Constant(1, sign).eval(); };
        m.boundary.push_back(c);
    }
    return m;
}

MetricModel make_diag_family(const json& spec) {
    if (!spec.contains("entries") || !spec.at("entries").is_array())
        throw ConfigError("diag-family model requires an 'entries' array of expressions");
    const auto& entries = spec.at("entries");
    const int n = static_cast<int>(entries.size());
    if (n < 1 || n > 3) throw ConfigError("diag-family supports dimension 1..3");
    MetricModel m;
    m.dim = n;
    m.name = "diag-family";
    m.vars = default_vars(n);
    std::vector<std::vector<expr::ExprPtr>> comps(n, std::vector<expr::ExprPtr>(n, expr::constant(0.0)));
    for (int i = 0; i < n; ++i) {
        if (!entries[i].is_string())
            throw ConfigError("diag-family 'entries' must be expression strings");
        comps[i][i] = expr::parse(entries[i].get<std::string>(), m.vars);
    }
    metric_from_exprs(m, comps);
    double lo = get_num(spec, "lo", -1.0), hi = get_num(spec, "hi", 1.0);
    m.box_lo = Vec::Constant(n, lo);
    m.box_hi = Vec::Constant(n, hi);
    m.chart_contains = [lo, hi](const ChartPoint& x) {
        return (x.array() >= lo - 1e-12).all() && (x.array() <= hi + 1e-12).all();
    };
    m.grid_kind = GridKind::Box;
    return m;
}

const std::vector<std::string> kModelNames = {"euclidean",  "gaussian-chart", "sphere-spherical",
                                              "sphere-stereo", "hemisphere",  "circle",
                                              "interval",   "diag-family"};

const std::vector<std::string> kDensityNames = {"zero", "linear", "gaussian", "expr", "expr-fd"};

void check_keys(const json& spec, const std::vector<std::string>& allowed) {
    for (auto it = spec.begin(); it != spec.end(); ++it) {
        bool ok = false;
        for (const auto& k : allowed)
            if (it.key() == k) ok = true;
        if (!ok) throw ConfigError("unknown key '" + it.key() + "' in model/density spec");
    }
}

}  // namespace

std::vector<std::string> model_names() { return kModelNames; }
std::vector<std::string> density_names() { return kDensityNames; }

MetricModel make_model(const json& spec) {
    if (!spec.is_object() || !spec.contains("name"))
        throw ConfigError("model spec must be an object with a 'name' key");
    const std::string name = spec.at("name").get<std::string>();
    MetricModel m;
    if (name == "euclidean") {
        check_keys(spec, {"name", "dim", "half_width", "fd_step"});
        m = flat_chart(get_int(spec, "dim", 2), name, get_num(spec, "half_width", 3.0));
        m.chart_contains = [](const ChartPoint&) { return true; };
    } else if (name == "gaussian-chart") {
        check_keys(spec, {"name", "dim", "half_width", "fd_step"});
        const double L = get_num(spec, "half_width", 6.0);
        m = flat_chart(get_int(spec, "dim", 2), name, L);
        m.chart_contains = [L](const ChartPoint& x) {
            return (x.array().abs() <= L + 1e-12).all();
        };
    } else if (name == "sphere-spherical") {
        check_keys(spec, {"name", "pole_band", "fd_step"});
        m = make_sphere_spherical(spec, false);
    } else if (name == "hemisphere") {
        check_keys(spec, {"name", "pole_band", "fd_step"});
        m = make_sphere_spherical(spec, true);
    } else if (name == "sphere-stereo") {
        check_keys(spec, {"name", "chart_radius", "pole", "fd_step"});
        m = make_sphere_stereo(spec);
    } else if (name == "circle") {
        check_keys(spec, {"name", "fd_step"});
        m = make_circle();
    } else if (name == "interval") {
        check_keys(spec, {"name", "a", "b", "fd_step"});
        m = make_interval(spec);
    } else if (name == "diag-family") {
        check_keys(spec, {"name", "entries", "lo", "hi", "fd_step"});
        m = make_diag_family(spec);
    } else {
        std::string known;
        for (const auto& k : kModelNames) known += (known.empty() ? "" : ", ") + k;
        throw ConfigError("unknown model '" + name + "'; valid models: " + known);
    }
    if (!m.chart_contains) {
        Vec lo = m.box_lo, hi = m.box_hi;
        m.chart_contains = [lo, hi](const ChartPoint& x) {
            return (x.array() >= lo.array() - 1e-12).all() && (x.array() <= hi.array() + 1e-12).all();
        };
    }
    if (spec.contains("fd_step")) m.fd_step = get_num(spec, "fd_step", m.fd_step);
    return m;
}

ScalarField linear_ambient_field(const MetricModel& model, const Vec& w) {
    if (model.embedding.empty())
        throw ConfigError("model '" + model.name + "' has no embedding; linear field unavailable");
    if (static_cast<int>(model.embedding.size()) != static_cast<int>(w.size()))
        throw ConfigError("linear field vector length " + std::to_string(w.size()) +
                          " does not match embedding dimension " +
                          std::to_string(model.embedding.size()));
    expr::ExprPtr e = expr::constant(0.0);
    for (std::size_t i = 0; i < model.embedding.size(); ++i)
        e = expr::add(e, expr::mul(expr::constant(w(static_cast<int>(i))), model.embedding[i]));
    return scalar_from_expr(e, model.dim);
}

ScalarField make_density(const MetricModel& model, const json& spec) {
    json s = spec;
    if (s.is_string()) s = json{{"name", s.get<std::string>()}};
    if (!s.is_object() || !s.contains("name"))
        throw ConfigError("density spec must be a name or an object with a 'name' key");
    const std::string name = s.at("name").get<std::string>();
    if (name == "zero") {
        check_keys(s, {"name"});
        return constant_field(0.0);
    }
    if (name == "gaussian") {
        check_keys(s, {"name"});
        expr::ExprPtr e = expr::constant(0.0);
        for (int i = 0; i < model.dim; ++i) e = expr::add(e, expr::mul(expr::var(i), expr::var(i)));
        return scalar_from_expr(expr::mul(expr::constant(0.5), e), model.dim);
    }
    if (name == "linear") {
        check_keys(s, {"name", "vector"});
        if (!s.contains("vector") || !s.at("vector").is_array())
            throw ConfigError("linear density requires a 'vector' array");
        const auto arr = s.at("vector").get<std::vector<double>>();
        Vec w = Eigen::Map<const Vec>(arr.data(), static_cast<Eigen::Index>(arr.size()));
        return linear_ambient_field(model, w);
    }
    if (name == "expr") {
        check_keys(s, {"name", "expr"});
        if (!s.contains("expr") || !s.at("expr").is_string())
            throw ConfigError("expr density requires an 'expr' string");
        return scalar_from_expr(s.at("expr").get<std::string>(), model.vars);
    }
    if (name == "expr-fd") {
        // value-only field: derivatives fall back to finite differences, which
        // exercises the FD path and makes convergence-order runs meaningful
        check_keys(s, {"name", "expr"});
        if (!s.contains("expr") || !s.at("expr").is_string())
            throw ConfigError("expr-fd density requires an 'expr' string");
        ScalarField full = scalar_from_expr(s.at("expr").get<std::string>(), model.vars);
        ScalarField fd;
        fd.value = full.value;
        return fd;
    }
    std::string known;
    for (const auto& k : kDensityNames) known += (known.empty() ? "" : ", ") + k;
    throw ConfigError("unknown density '" + name + "'; valid densities: " + known);
}

}  // namespace wgeom
