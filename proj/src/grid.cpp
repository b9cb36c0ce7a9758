#include "pebc/grid.hpp"

#include <cmath>
#include <string>

#include "pebc/error.hpp"
#include "pebc/kernel.hpp"

namespace pebc {

Grid::Grid(std::size_t n_points) : n_points_(n_points), h_(0.0) {
    if (n_points < 3) {
        throw Error(ErrorCode::invalid_argument,
                    "grid needs at least 3 points, got " + std::to_string(n_points));
    }
    h_ = 1.0 / static_cast<double>(n_points - 1);
}

std::vector<double> Grid::nodes() const {
    std::vector<double> out(n_points_);
    for (std::size_t i = 0; i < n_points_; ++i) out[i] = x(i);
    return out;
}

Field::Field(const Grid& grid) : grid_(grid), values_(grid.size(), 0.0) {}

Field::Field(const Grid& grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
    if (values_.size() != grid_.size()) {
        throw Error(ErrorCode::grid_mismatch,
                    "field has " + std::to_string(values_.size()) + " values for a grid of " +
                        std::to_string(grid_.size()) + " points");
    }
    if (!all_finite()) {
        throw Error(ErrorCode::invalid_argument, "field contains non-finite values");
    }
}

Field Field::sample(const Grid& grid, const std::function<double(double)>& fn) {
    std::vector<double> v(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) v[i] = fn(grid.x(i));
    return Field(grid, std::move(v));
}

bool Field::all_finite() const noexcept {
    for (double v : values_) {
        if (!std::isfinite(v)) return false;
    }
    return true;
}

void require_same_grid(const Grid& a, const Grid& b, const char* where) {
    if (!(a == b)) {
        throw Error(ErrorCode::grid_mismatch, std::string(where) + ": grid mismatch (" +
                                                  std::to_string(a.size()) + " vs " +
                                                  std::to_string(b.size()) + " points)");
    }
}

double composite_quadrature(std::span<const double> values, double h) {
    if (values.size() < 2) {
        throw Error(ErrorCode::invalid_argument, "composite_quadrature needs at least 2 samples");
    }
    double interior = 0.0;
    for (std::size_t i = 1; i + 1 < values.size(); ++i) interior += values[i];
    return h * (0.5 * (values.front() + values.back()) + interior);
}

double inner(const Field& f, const Field& g) {
    require_same_grid(f.grid(), g.grid(), "inner");
    const auto a = f.values();
    const auto b = g.values();
    double interior = 0.0;
    for (std::size_t i = 1; i + 1 < a.size(); ++i) interior += a[i] * b[i];
    return f.grid().h() * (0.5 * (a.front() * b.front() + a.back() * b.back()) + interior);
}

double l2_norm(const Field& f) { return std::sqrt(inner(f, f)); }

Field volterra_apply(const Kernel& kernel, const Field& f) {
    require_same_grid(kernel.grid(), f.grid(), "volterra_apply");
    const Grid& grid = f.grid();
    const double h = grid.h();
    const auto fv = f.values();
    std::vector<double> g(grid.size(), 0.0);
    for (std::size_t i = 1; i < grid.size(); ++i) {
        const auto row = kernel.row(i);
        double acc = 0.5 * (row[0] * fv[0] + row[i] * fv[i]);
        for (std::size_t j = 1; j < i; ++j) acc += row[j] * fv[j];
        g[i] = h * acc;
    }
    return Field(grid, std::move(g));
}

Field axpby(double a, const Field& f, double b, const Field& g) {
    require_same_grid(f.grid(), g.grid(), "axpby");
    std::vector<double> out(f.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = a * f[i] + b * g[i];
    return Field(f.grid(), std::move(out));
}

}  // namespace pebc
