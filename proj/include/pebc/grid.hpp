#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace pebc {

/// Uniform discretization of [0, 1] with n_points nodes, x_i = i*h.
class Grid {
public:
    explicit Grid(std::size_t n_points);

    std::size_t size() const noexcept { return n_points_; }
    std::size_t last() const noexcept { return n_points_ - 1; }
    double h() const noexcept { return h_; }

    /// Node i; the last node is exactly 1.
    double x(std::size_t i) const noexcept {
        return i == last() ? 1.0 : static_cast<double>(i) * h_;
    }

    std::vector<double> nodes() const;

    friend bool operator==(const Grid& a, const Grid& b) noexcept {
        return a.n_points_ == b.n_points_;
    }

private:
    std::size_t n_points_;
    double h_;
};

/// Real-valued samples on a Grid.
class Field {
public:
    explicit Field(const Grid& grid);  // zeros
    Field(const Grid& grid, std::vector<double> values);

    static Field sample(const Grid& grid, const std::function<double(double)>& fn);

    const Grid& grid() const noexcept { return grid_; }
    std::size_t size() const noexcept { return values_.size(); }

    std::span<const double> values() const noexcept { return values_; }
    std::span<double> values() noexcept { return values_; }

    double operator[](std::size_t i) const noexcept { return values_[i]; }
    double& operator[](std::size_t i) noexcept { return values_[i]; }

    double back() const noexcept { return values_.back(); }

    bool all_finite() const noexcept;

private:
    Grid grid_;
    std::vector<double> values_;
};

class Kernel;

/// Throws Error(grid_mismatch) unless the two grids agree.
void require_same_grid(const Grid& a, const Grid& b, const char* where);

/// Composite trapezoid rule with spacing h; needs at least two samples.
double composite_quadrature(std::span<const double> values, double h);

/// Trapezoid approximation of the L2(0,1) norm.
double l2_norm(const Field& f);

/// Trapezoid approximation of the L2(0,1) inner product.
double inner(const Field& f, const Field& g);

/// g(x_i) = int_0^{x_i} K(x_i, y) f(y) dy by the trapezoid rule on each row.
Field volterra_apply(const Kernel& kernel, const Field& f);

/// a*f + b*g
Field axpby(double a, const Field& f, double b, const Field& g);

}  // namespace pebc
