#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "pebc/grid.hpp"

namespace pebc {

struct KernelConfig {
    double c1 = 2.0;
    int picard_iterations = 60;
    double tolerance = 1e-12;

    void validate() const;
};

/// Lower-triangular samples K(x_i, y_j), j <= i, of a Volterra kernel.
///
/// Kernels produced by build_kernel also carry the boundary traces used by
/// the control law: k_x(1, y_j) and k(1, 1). Inverse kernels leave the
/// x-derivative trace empty.
class Kernel {
public:
    Kernel(const Grid& grid, double c1, std::vector<double> packed);

    /// Zero kernel on the grid.
    static Kernel zero(const Grid& grid);

    const Grid& grid() const noexcept { return grid_; }
    double c1() const noexcept { return c1_; }

    double at(std::size_t i, std::size_t j) const noexcept { return packed_[offset(i) + j]; }
    std::span<const double> row(std::size_t i) const noexcept {
        return std::span<const double>(packed_).subspan(offset(i), i + 1);
    }
    double diag(std::size_t i) const noexcept { return at(i, i); }

    bool has_boundary_trace() const noexcept { return !kx_at_1_.empty(); }
    std::span<const double> kx_at_1() const noexcept { return kx_at_1_; }
    double k11() const noexcept { return at(grid_.last(), grid_.last()); }

    void set_kx_at_1(std::vector<double> trace);

private:
    static std::size_t offset(std::size_t i) noexcept { return i * (i + 1) / 2; }

    Grid grid_;
    double c1_;
    std::vector<double> packed_;
    std::vector<double> kx_at_1_;
};

/// Solves k_yy - k_xx + c1 k = 0, k_y(x,0) = 0, k(x,x) = -c1 x / 2 by Picard
/// iteration on the integral form in characteristic coordinates.
/// Throws ConvergenceError when the iterates have not settled.
Kernel build_kernel(const KernelConfig& cfg, const Grid& grid);

/// Inverse kernel l, defined so that (I + L)(I - K) = I for the discrete
/// trapezoid operators of build_kernel(cfg, grid).
Kernel build_inverse_kernel(const KernelConfig& cfg, const Grid& grid);
Kernel invert_kernel(const Kernel& k);

/// u - int_0^x k(x,y) u(y) dy
Field forward_transform(const Kernel& k, const Field& u);
/// utilde + int_0^x l(x,y) utilde(y) dy
Field inverse_transform(const Kernel& l, const Field& utilde);

/// sqrt(c1 pi / 8) * sqrt(erfi(sqrt(2/c1)) * erf(sqrt(2/c1))); +inf once the
/// value leaves double range (c1 below roughly 2.8e-3).
double kernel_bound_nc1(double c1);

/// Discrete L2 norm over the triangle 0 <= y <= x <= 1.
double kernel_l2_norm(const Kernel& k);

/// Max |k_yy - k_xx + c1 k| over interior nodes, five-point differences.
double kernel_pde_residual(const Kernel& k);

/// Max |k_y(x_i, 0)| for i >= 2 using the one-sided second-order difference.
double kernel_neumann_residual(const Kernel& k);

/// Diagonal entries of the discrete lower-triangular operator I - K.
std::vector<double> transform_matrix_diagonal(const Kernel& k);

enum class InverseKernelVariant { linear_c1, squared_c1, indistinguishable, neither };

/// Compares an inverse kernel against l_xx - l_yy + s l = 0, l(x,x) = -s x/2
/// for s = c1 and s = c1^2, reporting which one it satisfies.
struct InverseKernelDiagnostic {
    double pde_residual_linear = 0.0;
    double pde_residual_squared = 0.0;
    double diagonal_error_linear = 0.0;
    double diagonal_error_squared = 0.0;
    InverseKernelVariant satisfied = InverseKernelVariant::neither;
};

InverseKernelDiagnostic diagnose_inverse_kernel(const Kernel& l);

std::string to_string(InverseKernelVariant v);

/// "# c1=<c1>,n_points=<n>" followed by "x,y,k" rows for j <= i.
void write_kernel_csv(const Kernel& k, std::ostream& out);

}  // namespace pebc
