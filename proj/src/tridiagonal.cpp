#include "adisplit/tridiagonal.hpp"

#include <stdexcept>
#include <string>

namespace adisplit {

TridiagonalMatrix::TridiagonalMatrix(std::vector<double> sub_, std::vector<double> diag_, std::vector<double> super_)
    : sub(std::move(sub_)), diag(std::move(diag_)), super(std::move(super_))
{
    const std::size_t off = diag.empty() ? 0 : diag.size() - 1;
    if (sub.size() != off || super.size() != off) {
        throw std::invalid_argument("tridiagonal: off-diagonals must have n-1 entries");
    }
}

double TridiagonalMatrix::row_sum(std::size_t row) const
{
    double sum = diag.at(row);
    if (row > 0) {
        sum += sub[row - 1];
    }
    if (row + 1 < diag.size()) {
        sum += super[row];
    }
    return sum;
}

std::vector<double> TridiagonalMatrix::multiply(std::span<const double> x) const
{
    const std::size_t n = size();
    if (x.size() != n) {
        throw std::invalid_argument("tridiagonal multiply: size mismatch");
    }
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) {
        double v = diag[i] * x[i];
        if (i > 0) {
            v += sub[i - 1] * x[i - 1];
        }
        if (i + 1 < n) {
            v += super[i] * x[i + 1];
        }
        y[i] = v;
    }
    return y;
}

std::vector<double> TridiagonalMatrix::solve(std::span<const double> rhs) const
{
    const std::size_t n = size();
    if (rhs.size() != n) {
        throw std::invalid_argument("tridiagonal solve: size mismatch");
    }
    std::vector<double> c(n, 0.0);
    std::vector<double> x(n);
    double denom = diag[0];
    for (std::size_t i = 0; i < n; ++i) {
        if (i > 0) {
            denom = diag[i] - sub[i - 1] * c[i - 1];
        }
        if (denom == 0.0) {
            throw std::runtime_error("tridiagonal solve: zero pivot at row " + std::to_string(i));
        }
        if (i + 1 < n) {
            c[i] = super[i] / denom;
        }
        x[i] = (rhs[i] - (i > 0 ? sub[i - 1] * x[i - 1] : 0.0)) / denom;
    }
    for (std::size_t i = n - 1; i-- > 0;) {
        x[i] -= c[i] * x[i + 1];
    }
    return x;
}

void solve_shifted_line(std::span<const double> diag, std::span<const double> off, double shift,
                        std::span<const double> rhs, std::span<double> out, std::span<double> scratch)
{
    const std::size_t n = diag.size();
    double denom = 1.0 + shift * diag[0];
    double prev = rhs[0] / denom;
    out[0] = prev;
    for (std::size_t i = 1; i < n; ++i) {
        const double a = shift * off[i - 1];
        scratch[i - 1] = a / denom;
        denom = 1.0 + shift * diag[i] - a * scratch[i - 1];
        prev = (rhs[i] - a * prev) / denom;
        out[i] = prev;
    }
    for (std::size_t i = n - 1; i-- > 0;) {
        out[i] -= scratch[i] * out[i + 1];
    }
}

} // namespace adisplit
