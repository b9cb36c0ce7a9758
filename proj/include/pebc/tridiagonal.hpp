#pragma once

#include <span>
#include <vector>

namespace pebc {

/// LU factorization of a general tridiagonal matrix with partial pivoting
/// (the dgttrf/dgtts2 scheme). Factor once, solve many times.
class TridiagonalLU {
public:
    TridiagonalLU() = default;
    /// sub[i] = A(i+1, i), diag[i] = A(i, i), super[i] = A(i, i+1).
    /// Throws Error(near_resonance) on a pivot below pivot_floor * max|A|.
    TridiagonalLU(std::vector<double> sub, std::vector<double> diag, std::vector<double> super,
                  double pivot_floor = 1e-14);

    /// Overwrites b with A^{-1} b.
    void solve_in_place(std::span<double> b) const;

    std::size_t size() const noexcept { return d_.size(); }

private:
    std::vector<double> dl_;
    std::vector<double> d_;
    std::vector<double> du_;
    std::vector<double> du2_;
    std::vector<char> swapped_;
};

}  // namespace pebc
