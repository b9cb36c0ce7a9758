#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "doctest.h"
#include "oracles.hpp"
#include "pebc/error.hpp"
#include "pebc/kernel.hpp"

using namespace pebc;

namespace {

Kernel make(double c1, std::size_t n) {
    KernelConfig cfg;
    cfg.c1 = c1;
    return build_kernel(cfg, Grid(n));
}

double max_abs(const Kernel& k) {
    double m = 0.0;
    for (std::size_t i = 0; i < k.grid().size(); ++i)
        for (double v : k.row(i)) m = std::max(m, std::abs(v));
    return m;
}

}  // namespace

TEST_SUITE("kernel") {

TEST_CASE("config validation") {
    KernelConfig cfg;
    cfg.c1 = 0.0;
    CHECK_THROWS_AS(build_kernel(cfg, Grid(11)), Error);
    cfg.c1 = -1.0;
    CHECK_THROWS_AS(cfg.validate(), Error);
    cfg = KernelConfig{};
    cfg.picard_iterations = 0;
    CHECK_THROWS_AS(cfg.validate(), Error);
}

TEST_CASE("too few sweeps report the last residual") {
    KernelConfig cfg;
    cfg.c1 = 4.0;
    cfg.picard_iterations = 2;
    try {
        build_kernel(cfg, Grid(51));
        FAIL("expected non-convergence");
    } catch (const ConvergenceError& e) {
        CHECK(e.last_residual() > cfg.tolerance);
        CHECK(e.code() == ErrorCode::not_converged);
    }
}

TEST_CASE("diagonal trace is exact") {
    for (double c1 : {0.5, 2.0, 7.0}) {
        const Kernel k = make(c1, 101);
        for (std::size_t i = 0; i < k.grid().size(); ++i) CHECK(k.diag(i) == -0.5 * c1 * k.grid().x(i));
        CHECK(k.at(0, 0) == 0.0);
    }
    CHECK(make(2.0, 51).k11() == -1.0);
    CHECK(make(2.0, 201).k11() == -1.0);
}

TEST_CASE("closed-form value at (0.5, 0)") {
    const double ref = oracle::kernel(1.0, 0.5, 0.0);
    // Independent check of the series oracle against the standard library.
    CHECK(ref == doctest::Approx(-0.5 * std::cyl_bessel_i(1.0, 0.5) / 0.5).epsilon(1e-14));
    const Kernel k = make(1.0, 201);
    CHECK(std::abs(k.at(100, 0) - ref) <= 1e-6);
    // A finer Picard solution agrees with both.
    const Kernel fine = make(1.0, 801);
    CHECK(std::abs(fine.at(400, 0) - ref) <= 1e-7);
}

TEST_CASE("matches the closed form across the triangle") {
    for (double c1 : {0.5, 2.0, 4.0}) {
        const Kernel k = make(c1, 201);
        const Grid& g = k.grid();
        double err = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i)
            for (std::size_t j = 0; j <= i; ++j)
                err = std::max(err, std::abs(k.at(i, j) - oracle::kernel(c1, g.x(i), g.x(j))));
        CHECK(err <= 5e-5);
    }
}

TEST_CASE("boundary derivative trace matches the closed form") {
    for (double c1 : {0.5, 2.0, 4.0}) {
        const Kernel k = make(c1, 201);
        const Grid& g = k.grid();
        REQUIRE(k.has_boundary_trace());
        for (std::size_t j = 0; j < g.size(); ++j) {
            CHECK(std::abs(k.kx_at_1()[j] - oracle::kernel_dx(c1, 1.0, g.x(j))) <= 5e-5);
        }
    }
}

TEST_CASE("vanishing gain gives a vanishing kernel") {
    const Kernel k = make(1e-8, 201);
    CHECK(max_abs(k) < 1e-7);
    KernelConfig cfg;
    cfg.c1 = 1e-8;
    CHECK(max_abs(build_inverse_kernel(cfg, Grid(201))) < 1e-7);
}

TEST_CASE("pde residual and neumann condition") {
    for (double c1 : {0.5, 1.0, 2.0, 4.0}) {
        const Kernel coarse = make(c1, 101);
        const Kernel fine = make(c1, 201);
        const double ratio = kernel_pde_residual(coarse) / kernel_pde_residual(fine);
        CHECK(ratio == doctest::Approx(4.0).epsilon(0.25));
        CHECK(kernel_neumann_residual(fine) <= 1e-3);
    }
}

TEST_CASE("transform diagonal carries the trapezoid endpoint weight") {
    const double c1 = 2.0;
    const Kernel k = make(c1, 101);
    const auto d = transform_matrix_diagonal(k);
    CHECK(d[0] == 1.0);
    for (std::size_t i = 1; i < d.size(); ++i) {
        CHECK(d[i] == doctest::Approx(1.0 + 0.25 * c1 * k.grid().h() * k.grid().x(i)).epsilon(1e-14));
    }
}

TEST_CASE("transforms compose to the identity") {
    for (double c1 : {0.5, 1.0, 2.0}) {
        KernelConfig cfg;
        cfg.c1 = c1;
        const Grid g(201);
        const Kernel k = build_kernel(cfg, g);
        const Kernel l = build_inverse_kernel(cfg, g);
        CHECK(l.at(0, 0) == 0.0);
        const Field f = Field::sample(g, [](double x) { return std::cos(std::numbers::pi * x); });
        const Field round = inverse_transform(l, forward_transform(k, f));
        const Field back = forward_transform(k, inverse_transform(l, f));
        CHECK(l2_norm(axpby(1.0, round, -1.0, f)) <= 5e-4 * l2_norm(f));
        CHECK(l2_norm(axpby(1.0, back, -1.0, f)) <= 5e-4 * l2_norm(f));
    }
}

TEST_CASE("zero kernels act as the identity") {
    const Grid g(31);
    const Field f = Field::sample(g, [](double x) { return x * x; });
    const Kernel z = Kernel::zero(g);
    CHECK(l2_norm(axpby(1.0, forward_transform(z, f), -1.0, f)) == 0.0);
    CHECK(l2_norm(axpby(1.0, inverse_transform(z, f), -1.0, f)) == 0.0);
    const Kernel k = make(2.0, 31);
    CHECK(l2_norm(forward_transform(k, Field(g))) == 0.0);
    CHECK(l2_norm(inverse_transform(invert_kernel(k), Field(g))) == 0.0);
}

TEST_CASE("forward transform of a constant") {
    const double c1 = 1.0;
    const Kernel k = make(c1, 201);
    const Field one = Field::sample(k.grid(), [](double) { return 1.0; });
    const double ref =
        1.0 - oracle::simpson([c1](double y) { return oracle::kernel(c1, 1.0, y); }, 0.0, 1.0, 2000);
    CHECK(std::abs(forward_transform(k, one).back() - ref) <= 1e-5);
}

TEST_CASE("inverse kernel converges to the Bessel J closed form") {
    const double c1 = 2.0;
    KernelConfig cfg;
    cfg.c1 = c1;
    auto error_on = [&](std::size_t n) {
        const Grid g(n);
        const Kernel l = build_inverse_kernel(cfg, g);
        double err = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i)
            for (std::size_t j = 0; j <= i; ++j)
                err = std::max(err, std::abs(l.at(i, j) - oracle::inverse_kernel(c1, g.x(i), g.x(j))));
        return err;
    };
    const double coarse = error_on(201);
    const double fine = error_on(401);
    // Inverting the trapezoid operator carries an O(h) diagonal term.
    CHECK(coarse <= c1 * 0.005);
    CHECK(coarse / fine == doctest::Approx(2.0).epsilon(0.15));
}

TEST_CASE("inverse kernel satisfies the linear-gain equation") {
    KernelConfig cfg;
    cfg.c1 = 2.0;
    const auto d = diagnose_inverse_kernel(build_inverse_kernel(cfg, Grid(201)));
    CHECK(d.satisfied == InverseKernelVariant::linear_c1);
    CHECK(d.pde_residual_linear < d.pde_residual_squared);
    CHECK(d.diagonal_error_linear < d.diagonal_error_squared);
    // At c1 = 1 both readings coincide.
    cfg.c1 = 1.0;
    CHECK(diagnose_inverse_kernel(build_inverse_kernel(cfg, Grid(101))).satisfied ==
          InverseKernelVariant::indistinguishable);
}

TEST_CASE("kernel bound against quadrature") {
    // c1 = 2: sqrt(pi/4) sqrt(erfi(1) erf(1)).
    const double ref = std::sqrt(std::numbers::pi / 4.0) *
                       std::sqrt(oracle::erfi_quadrature(1.0) * oracle::erf_quadrature(1.0));
    CHECK(kernel_bound_nc1(2.0) == doctest::Approx(ref).epsilon(1e-10));
    CHECK_THROWS_AS(kernel_bound_nc1(0.0), Error);
    CHECK(std::isinf(kernel_bound_nc1(1e-3)));
}

TEST_CASE("kernel bound ordering over c1") {
    // Evaluated, not assumed: the bound decreases on this sample.
    const double n01 = kernel_bound_nc1(0.1);
    const double n1 = kernel_bound_nc1(1.0);
    const double n10 = kernel_bound_nc1(10.0);
    CHECK(n01 > n1);
    CHECK(n1 > n10);
    CHECK(n01 == doctest::Approx(1571.27).epsilon(1e-5));
    CHECK(n1 == doctest::Approx(1.18924).epsilon(1e-5));
    CHECK(n10 == doctest::Approx(1.00178).epsilon(1e-5));
}

TEST_CASE("kernel norms respect the bound for moderate gains") {
    for (double c1 : {0.5, 1.0, 2.0}) {
        KernelConfig cfg;
        cfg.c1 = c1;
        const Grid g(201);
        const double bound = kernel_bound_nc1(c1) + 1e-3;
        CHECK(kernel_l2_norm(build_kernel(cfg, g)) <= bound);
        CHECK(kernel_l2_norm(build_inverse_kernel(cfg, g)) <= bound);
    }
}

TEST_CASE("csv export") {
    const Kernel k = make(2.0, 3);
    std::ostringstream os;
    write_kernel_csv(k, os);
    std::istringstream in(os.str());
    std::string line;
    std::getline(in, line);
    CHECK(line == "# c1=2,n_points=3");
    std::getline(in, line);
    CHECK(line == "x,y,k");
    int rows = 0;
    while (std::getline(in, line)) ++rows;
    CHECK(rows == 6);
    CHECK(os.str().find("\n1,1,-1\n") != std::string::npos);
}

}
