#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace adisplit {

/// Tridiagonal matrix stored by its three diagonals; sub and super have n-1 entries.
struct TridiagonalMatrix {
    std::vector<double> sub;
    std::vector<double> diag;
    std::vector<double> super;

    TridiagonalMatrix() = default;
    TridiagonalMatrix(std::vector<double> sub, std::vector<double> diag, std::vector<double> super);

    std::size_t size() const noexcept { return diag.size(); }
    bool is_symmetric() const noexcept { return sub == super; }

    double row_sum(std::size_t row) const;

    std::vector<double> multiply(std::span<const double> x) const;

    /// Thomas algorithm without pivoting. Throws std::runtime_error on a zero
    /// pivot; callers are expected to pass diagonally dominant or SPD systems.
    std::vector<double> solve(std::span<const double> rhs) const;
};

struct DiagonalMatrix {
    std::vector<double> diag;

    std::size_t size() const noexcept { return diag.size(); }
};

/// Solves (I + shift*K) x = rhs for symmetric tridiagonal K given by its
/// diagonal and off-diagonal. `rhs` and `out` may alias. `scratch` needs n entries.
void solve_shifted_line(std::span<const double> diag, std::span<const double> off, double shift,
                        std::span<const double> rhs, std::span<double> out, std::span<double> scratch);

} // namespace adisplit
