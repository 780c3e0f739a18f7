#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "wgeom/expr.hpp"
#include "wgeom/fields.hpp"

using namespace wgeom;

TEST_CASE("parse and evaluate") {
    ScalarField f = scalar_from_expr("x^2*sin(y) + 3*x - 1", {"x", "y"});
    Vec p(2);
    p << 0.7, -0.4;
    CHECK(f.value(p) == doctest::Approx(0.49 * std::sin(-0.4) + 2.1 - 1.0).epsilon(1e-14));
}

TEST_CASE("symbolic first and second derivatives match finite differences") {
    ScalarField f = scalar_from_expr("exp(0.3*x)*cos(y) + x*y^2", {"x", "y"});
    Vec p(2);
    p << 0.2, 1.1;
    const double h = 1e-5;
    Vec g_fd = fd_gradient(f.value, p, h);
    Mat h_fd = fd_hessian(f.value, p, h);
    Vec g = f.d1(p);
    Mat H = f.d2(p);
    for (int i = 0; i < 2; ++i) {
        CHECK(g(i) == doctest::Approx(g_fd(i)).epsilon(1e-8));
        for (int j = 0; j < 2; ++j) CHECK(H(i, j) == doctest::Approx(h_fd(i, j)).epsilon(1e-5));
    }
}

TEST_CASE("third derivatives are symmetric and correct on a cubic") {
    // d3 of x^3 y: d/dx d/dx d/dx = 6y, mixed xxy = 6x
    ScalarField f = scalar_from_expr("x^3*y", {"x", "y"});
    Vec p(2);
    p << 0.5, 2.0;
    Tensor3 t = f.d3(p);
    CHECK(t[0](0, 0) == doctest::Approx(12.0).epsilon(1e-14));  // 6y
    CHECK(t[1](0, 0) == doctest::Approx(3.0).epsilon(1e-14));   // 6x
    CHECK(t[0](0, 1) == doctest::Approx(3.0).epsilon(1e-14));
    CHECK(t[0](1, 0) == doctest::Approx(3.0).epsilon(1e-14));
}

TEST_CASE("unknown identifier is rejected") {
    CHECK_THROWS_AS(scalar_from_expr("x + q", {"x", "y"}), expr::ParseError);
}

TEST_CASE("division and unary minus") {
    ScalarField f = scalar_from_expr("-x/(1 + y^2)", {"x", "y"});
    Vec p(2);
    p << 2.0, 1.0;
    CHECK(f.value(p) == doctest::Approx(-1.0).epsilon(1e-14));
    CHECK(f.d1(p)(0) == doctest::Approx(-0.5).epsilon(1e-14));
}
