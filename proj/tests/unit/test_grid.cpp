#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "doctest.h"
#include "pebc/error.hpp"
#include "pebc/grid.hpp"
#include "pebc/kernel.hpp"

using namespace pebc;

namespace {

std::vector<double> packed_from(const Grid& g, double (*fn)(double, double)) {
    std::vector<double> p;
    for (std::size_t i = 0; i < g.size(); ++i)
        for (std::size_t j = 0; j <= i; ++j) p.push_back(fn(g.x(i), g.x(j)));
    return p;
}

}  // namespace

TEST_SUITE("grid") {

TEST_CASE("nodes span the unit interval") {
    for (std::size_t n : {3u, 51u, 201u, 1000u}) {
        Grid g(n);
        CHECK(g.x(0) == 0.0);
        CHECK(g.x(g.last()) == 1.0);
        for (std::size_t i = 1; i < n; ++i) {
            CHECK(g.x(i) > g.x(i - 1));
            CHECK(std::abs(g.x(i) - g.x(i - 1) - g.h()) <= 4 * std::numeric_limits<double>::epsilon());
        }
    }
    CHECK_THROWS_AS(Grid(2), Error);
}

TEST_CASE("fields reject bad input") {
    Grid g(11);
    CHECK_THROWS_AS(Field(g, std::vector<double>(10, 0.0)), Error);
    std::vector<double> v(11, 0.0);
    v[3] = std::nan("");
    CHECK_THROWS_AS(Field(g, v), Error);
    try {
        Field(g, std::vector<double>(12, 0.0));
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::grid_mismatch);
    }
}

TEST_CASE("l2 norm examples") {
    for (std::size_t n : {11u, 201u}) {
        Grid g(n);
        CHECK(l2_norm(Field(g)) == 0.0);
        CHECK(l2_norm(Field::sample(g, [](double) { return 1.0; })) == doctest::Approx(1.0).epsilon(1e-14));
    }
    Grid g(201);
    const double c = l2_norm(Field::sample(g, [](double x) { return std::cos(std::numbers::pi * x); }));
    CHECK(std::abs(c - 1.0 / std::sqrt(2.0)) <= 1e-3);
}

TEST_CASE("l2 norm is a norm") {
    Grid g(101);
    std::mt19937_64 rng(7);
    std::normal_distribution<double> d;
    for (int trial = 0; trial < 20; ++trial) {
        Field a(g), b(g);
        for (std::size_t i = 0; i < g.size(); ++i) {
            a[i] = d(rng);
            b[i] = d(rng);
        }
        CHECK(l2_norm(axpby(1.0, a, 1.0, b)) <= l2_norm(a) + l2_norm(b) + 1e-14);
        CHECK(l2_norm(axpby(-3.0, a, 0.0, b)) == doctest::Approx(3.0 * l2_norm(a)).epsilon(1e-14));
    }
}

TEST_CASE("composite quadrature examples") {
    CHECK(composite_quadrature(std::vector<double>{1.0, 1.0}, 1.0) == 1.0);
    CHECK(composite_quadrature(std::vector<double>{0.0, 1.0}, 1.0) == 0.5);
    Grid g(101);
    std::vector<double> sq(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) sq[i] = g.x(i) * g.x(i);
    const double q = composite_quadrature(sq, g.h());
    CHECK(std::abs(q - 1.0 / 3.0) <= 1e-4);
    // Trapezoid error for x^2 is exactly h^2 / 6.
    CHECK(q == doctest::Approx(1.0 / 3.0 + g.h() * g.h() / 6.0).epsilon(1e-13));
    CHECK_THROWS_AS(composite_quadrature(std::vector<double>{1.0}, 1.0), Error);
}

TEST_CASE("volterra apply examples") {
    Grid g(41);
    const Kernel zero = Kernel::zero(g);
    const Field one = Field::sample(g, [](double) { return 1.0; });
    CHECK(l2_norm(volterra_apply(zero, one)) == 0.0);

    const Kernel ones(g, 0.0, packed_from(g, [](double, double) { return 1.0; }));
    const Field gx = volterra_apply(ones, one);
    CHECK(gx[0] == 0.0);
    for (std::size_t i = 0; i < g.size(); ++i) CHECK(gx[i] == doctest::Approx(g.x(i)).epsilon(1e-14));

    const Kernel ky(g, 0.0, packed_from(g, [](double, double y) { return y; }));
    CHECK(std::abs(volterra_apply(ky, one).back() - 0.5) <= g.h() * g.h());

    CHECK_THROWS_AS(volterra_apply(ones, Field(Grid(40))), Error);
}

TEST_CASE("volterra apply is linear") {
    Grid g(51);
    const Kernel k(g, 0.0, packed_from(g, [](double x, double y) { return std::sin(3 * x) * std::exp(y); }));
    const Field a = Field::sample(g, [](double x) { return x * x - 0.3; });
    const Field b = Field::sample(g, [](double x) { return std::cos(5 * x); });
    const Field lhs = volterra_apply(k, axpby(2.0, a, -0.5, b));
    const Field rhs = axpby(2.0, volterra_apply(k, a), -0.5, volterra_apply(k, b));
    for (std::size_t i = 0; i < g.size(); ++i) CHECK(std::abs(lhs[i] - rhs[i]) <= 1e-14);
}

TEST_CASE("quadrature converges at second order") {
    const double exact_norm = std::sqrt((std::exp(2.0) - 1.0) / 2.0);
    // int_0^1 exp(x + y) dy = e^x (e^x - 1) at x = 1.
    const double exact_volterra = std::exp(1.0) * (std::exp(1.0) - 1.0);
    std::vector<double> norm_err, volterra_err;
    for (std::size_t n : {51u, 101u, 201u, 401u}) {
        Grid g(n);
        const Field f = Field::sample(g, [](double x) { return std::exp(x); });
        norm_err.push_back(std::abs(l2_norm(f) - exact_norm));
        const Kernel k(g, 0.0, packed_from(g, [](double x, double) { return std::exp(x); }));
        volterra_err.push_back(std::abs(volterra_apply(k, f).back() - exact_volterra));
    }
    for (std::size_t i = 1; i < norm_err.size(); ++i) {
        CHECK(norm_err[i - 1] / norm_err[i] == doctest::Approx(4.0).epsilon(0.2));
        CHECK(volterra_err[i - 1] / volterra_err[i] == doctest::Approx(4.0).epsilon(0.2));
    }
}

}
