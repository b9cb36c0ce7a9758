#include "pebc/tridiagonal.hpp"

#include <algorithm>
#include <cmath>

#include "pebc/error.hpp"

namespace pebc {

TridiagonalLU::TridiagonalLU(std::vector<double> sub, std::vector<double> diag,
                             std::vector<double> super, double pivot_floor)
    : dl_(std::move(sub)), d_(std::move(diag)), du_(std::move(super)) {
    const std::size_t n = d_.size();
    if (n == 0 || dl_.size() + 1 != n || du_.size() + 1 != n) {
        throw Error(ErrorCode::invalid_argument, "tridiagonal band sizes are inconsistent");
    }
    double scale = 0.0;
    for (double v : d_) scale = std::max(scale, std::abs(v));
    for (double v : dl_) scale = std::max(scale, std::abs(v));
    for (double v : du_) scale = std::max(scale, std::abs(v));
    const double floor = pivot_floor * std::max(scale, 1e-300);

    du2_.assign(n > 2 ? n - 2 : 0, 0.0);
    swapped_.assign(n > 1 ? n - 1 : 0, 0);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        if (std::abs(d_[i]) >= std::abs(dl_[i])) {
            if (std::abs(d_[i]) <= floor) {
                throw Error(ErrorCode::near_resonance, "tridiagonal matrix is numerically singular");
            }
            const double fact = dl_[i] / d_[i];
            dl_[i] = fact;
            d_[i + 1] -= fact * du_[i];
        } else {
            const double fact = d_[i] / dl_[i];
            d_[i] = dl_[i];
            dl_[i] = fact;
            const double temp = du_[i];
            du_[i] = d_[i + 1];
            d_[i + 1] = temp - fact * d_[i + 1];
            if (i + 2 < n) {
                du2_[i] = du_[i + 1];
                du_[i + 1] = -fact * du_[i + 1];
            }
            swapped_[i] = 1;
        }
    }
    if (std::abs(d_[n - 1]) <= floor) {
        throw Error(ErrorCode::near_resonance, "tridiagonal matrix is numerically singular");
    }
}

void TridiagonalLU::solve_in_place(std::span<double> b) const {
    const std::size_t n = d_.size();
    if (b.size() != n) {
        throw Error(ErrorCode::invalid_argument, "tridiagonal solve: right-hand side has wrong size");
    }
    for (std::size_t i = 0; i + 1 < n; ++i) {
        if (!swapped_[i]) {
            b[i + 1] -= dl_[i] * b[i];
        } else {
            const double temp = b[i];
            b[i] = b[i + 1];
            b[i + 1] = temp - dl_[i] * b[i];
        }
    }
    b[n - 1] /= d_[n - 1];
    if (n > 1) b[n - 2] = (b[n - 2] - du_[n - 2] * b[n - 1]) / d_[n - 2];
    for (std::size_t k = n; k-- > 2;) {
        const std::size_t i = k - 2;
        b[i] = (b[i] - du_[i] * b[i + 1] - du2_[i] * b[i + 2]) / d_[i];
    }
}

}  // namespace pebc
