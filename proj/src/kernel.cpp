#include "pebc/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>

#include "pebc/error.hpp"
#include "pebc/format.hpp"
#include "pebc/special_functions.hpp"

namespace pebc {

void KernelConfig::validate() const {
    if (!(c1 > 0.0) || !std::isfinite(c1)) {
        throw Error(ErrorCode::invalid_argument, "kernel gain c1 must be positive and finite");
    }
    if (picard_iterations < 1) {
        throw Error(ErrorCode::invalid_argument, "picard_iterations must be positive");
    }
    if (!(tolerance > 0.0)) {
        throw Error(ErrorCode::invalid_argument, "kernel tolerance must be positive");
    }
}

Kernel::Kernel(const Grid& grid, double c1, std::vector<double> packed)
    : grid_(grid), c1_(c1), packed_(std::move(packed)) {
    if (packed_.size() != offset(grid_.size())) {
        throw Error(ErrorCode::grid_mismatch, "kernel storage does not match the grid");
    }
}

Kernel Kernel::zero(const Grid& grid) {
    const std::size_t n = grid.size();
    Kernel k(grid, 0.0, std::vector<double>(n * (n + 1) / 2, 0.0));
    k.kx_at_1_.assign(n, 0.0);
    return k;
}

void Kernel::set_kx_at_1(std::vector<double> trace) {
    if (!trace.empty() && trace.size() != grid_.size()) {
        throw Error(ErrorCode::grid_mismatch, "kx_at_1 trace length does not match the grid");
    }
    kx_at_1_ = std::move(trace);
}

namespace {

// Samples of G(xi, eta) = k((xi+eta)/2, (xi-eta)/2) on the characteristic
// lattice xi = a*h, eta = b*h with 0 <= b <= a <= 2N - b. Row b holds
// a = b .. 2N-b.
class CharacteristicLattice {
public:
    explicit CharacteristicLattice(std::size_t n_intervals) : n_(n_intervals), rows_(n_ + 1) {
        for (std::size_t b = 0; b <= n_; ++b) rows_[b].assign(2 * (n_ - b) + 1, 0.0);
    }

    double& operator()(std::size_t a, std::size_t b) { return rows_[b][a - b]; }
    double operator()(std::size_t a, std::size_t b) const { return rows_[b][a - b]; }

    std::size_t intervals() const { return n_; }
    std::size_t a_end(std::size_t b) const { return 2 * n_ - b; }

private:
    std::size_t n_;
    std::vector<std::vector<double>> rows_;
};

// F(a, b) = int_0^{eta_b} G(xi_a, s) ds.
CharacteristicLattice eta_primitive(const CharacteristicLattice& g, double h) {
    const std::size_t n = g.intervals();
    CharacteristicLattice f(n);
    for (std::size_t b = 1; b <= n; ++b) {
        for (std::size_t a = b; a <= f.a_end(b); ++a) {
            f(a, b) = f(a, b - 1) + 0.5 * h * (g(a, b - 1) + g(a, b));
        }
    }
    return f;
}

// One application of the integral operator
//   G(xi,eta) = -c1 (xi+eta)/4 + c1/2 int_0^eta F(s,s) ds
//               + c1/4 int_eta^xi F(tau, eta) dtau.
// Returns the max change against the input lattice.
double picard_sweep(const CharacteristicLattice& g, CharacteristicLattice& out, double c1, double h) {
    const std::size_t n = g.intervals();
    const CharacteristicLattice f = eta_primitive(g, h);
    double diag_integral = 0.0;  // int_0^{eta_b} F(s, s) ds
    double change = 0.0;
    for (std::size_t b = 0; b <= n; ++b) {
        if (b > 0) diag_integral += 0.5 * h * (f(b - 1, b - 1) + f(b, b));
        double xi_integral = 0.0;  // int_{eta_b}^{xi_a} F(tau, eta_b) dtau
        for (std::size_t a = b; a <= out.a_end(b); ++a) {
            if (a > b) xi_integral += 0.5 * h * (f(a - 1, b) + f(a, b));
            const double value = -0.25 * c1 * static_cast<double>(a + b) * h +
                                 0.5 * c1 * diag_integral + 0.25 * c1 * xi_integral;
            change = std::max(change, std::abs(value - g(a, b)));
            out(a, b) = value;
        }
    }
    return change;
}

double lattice_max(const CharacteristicLattice& g) {
    double m = 0.0;
    for (std::size_t b = 0; b <= g.intervals(); ++b) {
        for (std::size_t a = b; a <= g.a_end(b); ++a) m = std::max(m, std::abs(g(a, b)));
    }
    return m;
}

// k_x(1, y_j) = G_xi + G_eta at xi = 1 + y_j, eta = 1 - y_j, differentiating
// the integral form directly:
//   G_xi  = -c1/4 + c1/4 F(xi, eta)
//   G_eta = -c1/4 + c1/4 F(eta, eta) + c1/4 int_eta^xi G(tau, eta) dtau
std::vector<double> top_row_x_derivative(const CharacteristicLattice& g, double c1, double h) {
    const std::size_t n = g.intervals();
    const CharacteristicLattice f = eta_primitive(g, h);
    std::vector<double> trace(n + 1);
    for (std::size_t j = 0; j <= n; ++j) {
        const std::size_t a = n + j;
        const std::size_t b = n - j;
        double row_integral = 0.0;
        for (std::size_t t = b + 1; t <= a; ++t) row_integral += 0.5 * h * (g(t - 1, b) + g(t, b));
        trace[j] = -0.5 * c1 + 0.25 * c1 * (f(a, b) + f(b, b) + row_integral);
    }
    return trace;
}

double trapezoid_weight(std::size_t i, std::size_t j, double h) {
    return (j == 0 || j == i) ? 0.5 * h : h;
}

}  // namespace

Kernel build_kernel(const KernelConfig& cfg, const Grid& grid) {
    cfg.validate();
    const std::size_t n = grid.last();
    const double h = grid.h();
    const double c1 = cfg.c1;

    CharacteristicLattice current(n);
    for (std::size_t b = 0; b <= n; ++b) {
        for (std::size_t a = b; a <= current.a_end(b); ++a) {
            current(a, b) = -0.25 * c1 * static_cast<double>(a + b) * h;
        }
    }
    CharacteristicLattice next(n);
    double change = std::numeric_limits<double>::infinity();
    bool converged = false;
    for (int it = 0; it < cfg.picard_iterations; ++it) {
        change = picard_sweep(current, next, c1, h);
        std::swap(current, next);
        if (change <= cfg.tolerance * std::max(1.0, lattice_max(current))) {
            converged = true;
            break;
        }
    }
    if (!converged) {
        throw ConvergenceError("kernel Picard iteration did not converge in " +
                                   std::to_string(cfg.picard_iterations) +
                                   " sweeps (last change " + format_double(change) + ")",
                               change);
    }

    std::vector<double> packed((n + 1) * (n + 2) / 2);
    for (std::size_t i = 0; i <= n; ++i) {
        for (std::size_t j = 0; j < i; ++j) packed[i * (i + 1) / 2 + j] = current(i + j, i - j);
        packed[i * (i + 1) / 2 + i] = -0.5 * c1 * grid.x(i);
    }
    Kernel kernel(grid, c1, std::move(packed));
    kernel.set_kx_at_1(top_row_x_derivative(current, c1, h));
    return kernel;
}

Kernel invert_kernel(const Kernel& k) {
    const Grid& grid = k.grid();
    const std::size_t n = grid.size();
    const double h = grid.h();

    // A = I - W.K, lower triangular with trapezoid weights W.
    std::vector<double> a(n * (n + 1) / 2, 0.0);
    auto idx = [](std::size_t i, std::size_t j) { return i * (i + 1) / 2 + j; };
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            const double w = i == 0 ? 0.0 : trapezoid_weight(i, j, h);
            a[idx(i, j)] = (i == j ? 1.0 : 0.0) - w * k.at(i, j);
        }
    }
    // X = A^{-1} column by column (forward substitution).
    std::vector<double> x(a.size(), 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        x[idx(j, j)] = 1.0 / a[idx(j, j)];
        for (std::size_t i = j + 1; i < n; ++i) {
            double acc = 0.0;
            for (std::size_t m = j; m < i; ++m) acc += a[idx(i, m)] * x[idx(m, j)];
            x[idx(i, j)] = -acc / a[idx(i, i)];
        }
    }
    std::vector<double> packed(a.size(), 0.0);
    for (std::size_t i = 1; i < n; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            const double m = x[idx(i, j)] - (i == j ? 1.0 : 0.0);
            packed[idx(i, j)] = m / trapezoid_weight(i, j, h);
        }
    }
    return Kernel(grid, k.c1(), std::move(packed));
}

Kernel build_inverse_kernel(const KernelConfig& cfg, const Grid& grid) {
    return invert_kernel(build_kernel(cfg, grid));
}

Field forward_transform(const Kernel& k, const Field& u) {
    return axpby(1.0, u, -1.0, volterra_apply(k, u));
}

Field inverse_transform(const Kernel& l, const Field& utilde) {
    return axpby(1.0, utilde, 1.0, volterra_apply(l, utilde));
}

double kernel_bound_nc1(double c1) {
    if (!(c1 > 0.0)) {
        throw Error(ErrorCode::invalid_argument, "kernel_bound_nc1 requires c1 > 0");
    }
    const double z = std::sqrt(2.0 / c1);
    const double log_value =
        0.5 * std::log(c1 * std::numbers::pi / 8.0) + 0.5 * (log_erfi(z) + std::log(erf(z)));
    return std::exp(log_value);  // overflows to +inf for tiny c1
}

double kernel_l2_norm(const Kernel& k) {
    const Grid& grid = k.grid();
    std::vector<double> rows(grid.size(), 0.0);
    std::vector<double> sq;
    for (std::size_t i = 1; i < grid.size(); ++i) {
        const auto row = k.row(i);
        sq.assign(row.size(), 0.0);
        for (std::size_t j = 0; j < row.size(); ++j) sq[j] = row[j] * row[j];
        rows[i] = composite_quadrature(sq, grid.h());
    }
    return std::sqrt(composite_quadrature(rows, grid.h()));
}

namespace {

double five_point_residual(const Kernel& k, double reaction, double sign_yy) {
    const Grid& grid = k.grid();
    const double h2 = grid.h() * grid.h();
    const std::size_t n = grid.last();
    double worst = 0.0;
    for (std::size_t i = 2; i < n; ++i) {
        for (std::size_t j = 1; j < i; ++j) {
            const double kyy = (k.at(i, j + 1) - 2.0 * k.at(i, j) + k.at(i, j - 1)) / h2;
            const double kxx = (k.at(i + 1, j) - 2.0 * k.at(i, j) + k.at(i - 1, j)) / h2;
            const double r = sign_yy * (kyy - kxx) + reaction * k.at(i, j);
            worst = std::max(worst, std::abs(r));
        }
    }
    return worst;
}

}  // namespace

double kernel_pde_residual(const Kernel& k) { return five_point_residual(k, k.c1(), 1.0); }

double kernel_neumann_residual(const Kernel& k) {
    const Grid& grid = k.grid();
    double worst = 0.0;
    for (std::size_t i = 2; i < grid.size(); ++i) {
        const double ky = (-3.0 * k.at(i, 0) + 4.0 * k.at(i, 1) - k.at(i, 2)) / (2.0 * grid.h());
        worst = std::max(worst, std::abs(ky));
    }
    return worst;
}

std::vector<double> transform_matrix_diagonal(const Kernel& k) {
    const Grid& grid = k.grid();
    std::vector<double> d(grid.size(), 1.0);
    for (std::size_t i = 1; i < grid.size(); ++i) d[i] = 1.0 - 0.5 * grid.h() * k.diag(i);
    return d;
}

InverseKernelDiagnostic diagnose_inverse_kernel(const Kernel& l) {
    const double c1 = l.c1();
    const double c1_sq = c1 * c1;
    InverseKernelDiagnostic d;
    // l_xx - l_yy + s l = 0 is -(l_yy - l_xx) + s l = 0.
    d.pde_residual_linear = five_point_residual(l, c1, -1.0);
    d.pde_residual_squared = five_point_residual(l, c1_sq, -1.0);
    const Grid& grid = l.grid();
    for (std::size_t i = 0; i < grid.size(); ++i) {
        d.diagonal_error_linear =
            std::max(d.diagonal_error_linear, std::abs(l.diag(i) + 0.5 * c1 * grid.x(i)));
        d.diagonal_error_squared =
            std::max(d.diagonal_error_squared, std::abs(l.diag(i) + 0.5 * c1_sq * grid.x(i)));
    }
    const double separation = 0.5 * std::abs(c1 - c1_sq);
    if (separation < 1e-12) {
        d.satisfied = InverseKernelVariant::indistinguishable;
    } else if (d.diagonal_error_linear < 0.1 * separation &&
               d.diagonal_error_linear < d.diagonal_error_squared) {
        d.satisfied = InverseKernelVariant::linear_c1;
    } else if (d.diagonal_error_squared < 0.1 * separation) {
        d.satisfied = InverseKernelVariant::squared_c1;
    } else {
        d.satisfied = InverseKernelVariant::neither;
    }
    return d;
}

std::string to_string(InverseKernelVariant v) {
    switch (v) {
        case InverseKernelVariant::linear_c1: return "linear_c1";
        case InverseKernelVariant::squared_c1: return "squared_c1";
        case InverseKernelVariant::indistinguishable: return "indistinguishable";
        case InverseKernelVariant::neither: return "neither";
    }
    return "neither";
}

void write_kernel_csv(const Kernel& k, std::ostream& out) {
    const Grid& grid = k.grid();
    out << "# c1=" << format_double(k.c1()) << ",n_points=" << grid.size() << '\n';
    out << "x,y,k\n";
    for (std::size_t i = 0; i < grid.size(); ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            out << format_double(grid.x(i)) << ',' << format_double(grid.x(j)) << ','
                << format_double(k.at(i, j) + 0.0) << '\n';
        }
    }
}

}  // namespace pebc
