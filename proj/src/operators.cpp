#include "adisplit/operators.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace adisplit {

namespace {

void require_size(const Grid& grid, std::span<const double> u, std::span<const double> out)
{
    if (u.size() != grid.interior_count() || out.size() != grid.interior_count()) {
        throw std::invalid_argument("operator: vector length does not match grid");
    }
}

void require_kappa(double kappa)
{
    if (!(kappa > 0.0) || !std::isfinite(kappa)) {
        throw std::invalid_argument("resolvent: kappa must be positive, got " + std::to_string(kappa));
    }
}

// y = K x along one contiguous line.
inline double line_product(const TridiagonalMatrix& k, const double* x, int i, int n)
{
    double v = k.diag[i] * x[i];
    if (i > 0) {
        v += k.sub[i - 1] * x[i - 1];
    }
    if (i + 1 < n) {
        v += k.super[i] * x[i + 1];
    }
    return v;
}

// y = K x across lines: x points at the line start, stride separates entries.
inline double strided_product(const TridiagonalMatrix& k, const double* x, std::size_t stride, int j, int n)
{
    double v = k.diag[j] * x[0];
    if (j > 0) {
        v += k.sub[j - 1] * x[-static_cast<std::ptrdiff_t>(stride)];
    }
    if (j + 1 < n) {
        v += k.super[j] * x[stride];
    }
    return v;
}

std::vector<double>& thread_scratch(std::size_t size)
{
    thread_local std::vector<double> scratch;
    if (scratch.size() < size) {
        scratch.resize(size);
    }
    return scratch;
}

Field check_and_allocate(const SplitOperator& op, const Field& u)
{
    if (!(u.grid() == op.grid())) {
        throw std::invalid_argument("operator: field grid m=" + std::to_string(u.grid().m()) +
                                    " does not match operator grid m=" + std::to_string(op.grid().m()));
    }
    return Field(op.grid());
}

} // namespace

void SplitOperator::apply_l_into(std::span<const double> u, std::span<double> out) const
{
    std::vector<double> tmp(out.size());
    apply_a_into(u, out);
    apply_b_into(u, tmp);
    for (std::size_t k = 0; k < out.size(); ++k) {
        out[k] += tmp[k];
    }
}

Field apply_a(const SplitOperator& op, const Field& u)
{
    Field out = check_and_allocate(op, u);
    op.apply_a_into(u.values(), out.values());
    return out;
}

Field apply_b(const SplitOperator& op, const Field& u)
{
    Field out = check_and_allocate(op, u);
    op.apply_b_into(u.values(), out.values());
    return out;
}

Field apply_l(const SplitOperator& op, const Field& u)
{
    Field out = check_and_allocate(op, u);
    op.apply_l_into(u.values(), out.values());
    return out;
}

Field solve_resolvent_a(const SplitOperator& op, double kappa, const Field& rhs)
{
    require_kappa(kappa);
    Field out = check_and_allocate(op, rhs);
    op.resolve_a_into(kappa, rhs.values(), out.values());
    return out;
}

Field solve_resolvent_b(const SplitOperator& op, double kappa, const Field& rhs)
{
    require_kappa(kappa);
    Field out = check_and_allocate(op, rhs);
    op.resolve_b_into(kappa, rhs.values(), out.values());
    return out;
}

double CoefficientBounds::stability_bound() const
{
    return std::sqrt(lambda_inf * mu_inf / (lambda_0 * mu_0));
}

SplitDiffusionOperator::SplitDiffusionOperator(const Grid& grid, TridiagonalMatrix k_lambda, TridiagonalMatrix k_mu,
                                               DiagonalMatrix d_lambda, DiagonalMatrix d_mu,
                                               CoefficientBounds bounds)
    : grid_(grid), k_lambda_(std::move(k_lambda)), k_mu_(std::move(k_mu)), d_lambda_(std::move(d_lambda)),
      d_mu_(std::move(d_mu)), bounds_(bounds)
{
    const auto n = static_cast<std::size_t>(grid_.n());
    if (k_lambda_.size() != n || k_mu_.size() != n || d_lambda_.size() != n || d_mu_.size() != n) {
        throw std::invalid_argument("split operator: matrix dimensions must equal m-1");
    }
}

void SplitDiffusionOperator::apply_a_into(std::span<const double> u, std::span<double> out) const
{
    require_size(grid_, u, out);
    const int n = grid_.n();
    const double inv_h2 = 1.0 / (grid_.h() * grid_.h());
    for (int j = 0; j < n; ++j) {
        const double* line = u.data() + static_cast<std::size_t>(j) * n;
        double* dst = out.data() + static_cast<std::size_t>(j) * n;
        const double scale = -(d_mu_.diag[j] * inv_h2);
        for (int i = 0; i < n; ++i) {
            dst[i] = scale * line_product(k_lambda_, line, i, n);
        }
    }
}

void SplitDiffusionOperator::apply_b_into(std::span<const double> u, std::span<double> out) const
{
    require_size(grid_, u, out);
    const int n = grid_.n();
    const auto stride = static_cast<std::size_t>(n);
    const double inv_h2 = 1.0 / (grid_.h() * grid_.h());
    for (int j = 0; j < n; ++j) {
        const double* row = u.data() + static_cast<std::size_t>(j) * stride;
        double* dst = out.data() + static_cast<std::size_t>(j) * stride;
        for (int i = 0; i < n; ++i) {
            const double scale = -(d_lambda_.diag[i] * inv_h2);
            dst[i] = scale * strided_product(k_mu_, row + i, stride, j, n);
        }
    }
}

void SplitDiffusionOperator::apply_l_into(std::span<const double> u, std::span<double> out) const
{
    require_size(grid_, u, out);
    apply_stiffness_into(u, out);
    const double scale = -1.0 / (grid_.h() * grid_.h());
    for (double& v : out) {
        v *= scale;
    }
}

void SplitDiffusionOperator::apply_stiffness_into(std::span<const double> u, std::span<double> out) const
{
    require_size(grid_, u, out);
    const int n = grid_.n();
    const auto stride = static_cast<std::size_t>(n);
    for (int j = 0; j < n; ++j) {
        const double* row = u.data() + static_cast<std::size_t>(j) * stride;
        double* dst = out.data() + static_cast<std::size_t>(j) * stride;
        const double mu = d_mu_.diag[j];
        for (int i = 0; i < n; ++i) {
            dst[i] = mu * line_product(k_lambda_, row, i, n) +
                     d_lambda_.diag[i] * strided_product(k_mu_, row + i, stride, j, n);
        }
    }
}

void SplitDiffusionOperator::apply_stiffness_a_into(std::span<const double> u, std::span<double> out) const
{
    require_size(grid_, u, out);
    const int n = grid_.n();
    for (int j = 0; j < n; ++j) {
        const double* line = u.data() + static_cast<std::size_t>(j) * n;
        double* dst = out.data() + static_cast<std::size_t>(j) * n;
        const double mu = d_mu_.diag[j];
        for (int i = 0; i < n; ++i) {
            dst[i] = mu * line_product(k_lambda_, line, i, n);
        }
    }
}

void SplitDiffusionOperator::resolve_a_into(double kappa, std::span<const double> rhs, std::span<double> out) const
{
    require_kappa(kappa);
    require_size(grid_, rhs, out);
    const int n = grid_.n();
    const double inv_h2 = 1.0 / (grid_.h() * grid_.h());
    auto& scratch = thread_scratch(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) {
        const auto offset = static_cast<std::size_t>(j) * n;
        const double shift = kappa * d_mu_.diag[j] * inv_h2;
        solve_shifted_line(k_lambda_.diag, k_lambda_.super, shift, rhs.subspan(offset, n), out.subspan(offset, n),
                           scratch);
    }
}

void SplitDiffusionOperator::resolve_b_into(double kappa, std::span<const double> rhs, std::span<double> out) const
{
    require_kappa(kappa);
    require_size(grid_, rhs, out);
    // All y-lines are swept together, x fastest, so memory access stays contiguous.
    // Per line the arithmetic matches solve_shifted_line exactly.
    const int n = grid_.n();
    const auto stride = static_cast<std::size_t>(n);
    const double inv_h2 = 1.0 / (grid_.h() * grid_.h());
    auto& scratch = thread_scratch(2 * stride + stride * stride);
    double* shift = scratch.data();
    double* denom = shift + stride;
    double* ratio = denom + stride;
    const auto& diag = k_mu_.diag;
    const auto& off = k_mu_.super;

    for (int i = 0; i < n; ++i) {
        shift[i] = kappa * d_lambda_.diag[i] * inv_h2;
        denom[i] = 1.0 + shift[i] * diag[0];
        out[i] = rhs[i] / denom[i];
    }
    for (int j = 1; j < n; ++j) {
        const double* src = rhs.data() + static_cast<std::size_t>(j) * stride;
        double* dst = out.data() + static_cast<std::size_t>(j) * stride;
        const double* prev = dst - stride;
        double* c = ratio + static_cast<std::size_t>(j - 1) * stride;
        for (int i = 0; i < n; ++i) {
            const double a = shift[i] * off[j - 1];
            c[i] = a / denom[i];
            denom[i] = 1.0 + shift[i] * diag[j] - a * c[i];
            dst[i] = (src[i] - a * prev[i]) / denom[i];
        }
    }
    for (int j = n - 1; j-- > 0;) {
        double* dst = out.data() + static_cast<std::size_t>(j) * stride;
        const double* next = dst + stride;
        const double* c = ratio + static_cast<std::size_t>(j) * stride;
        for (int i = 0; i < n; ++i) {
            dst[i] -= c[i] * next[i];
        }
    }
}

TridiagonalMatrix assemble_1d_stiffness(const ScalarFunction& c, const Grid& grid)
{
    const int m = grid.m();
    std::vector<double> samples(static_cast<std::size_t>(m) + 1);
    for (int i = 0; i <= m; ++i) {
        samples[i] = c(grid.coordinate(i));
    }
    const int n = grid.n();
    std::vector<double> diag(n);
    std::vector<double> off(n > 0 ? n - 1 : 0);
    for (int r = 0; r < n; ++r) {
        const int i = r + 1;
        diag[r] = (samples[i - 1] + 2.0 * samples[i] + samples[i + 1]) / 2.0;
        if (r + 1 < n) {
            off[r] = -(samples[i] + samples[i + 1]) / 2.0;
        }
    }
    std::vector<double> sub = off;
    return TridiagonalMatrix(std::move(sub), std::move(diag), std::move(off));
}

DiagonalMatrix sample_diagonal(const ScalarFunction& c, const Grid& grid)
{
    DiagonalMatrix d;
    d.diag.resize(grid.n());
    for (int i = 0; i < grid.n(); ++i) {
        d.diag[i] = c(grid.coordinate(i + 1));
    }
    return d;
}

std::pair<double, double> sampled_extrema(const ScalarFunction& c)
{
    constexpr int samples = 10000;
    double lo = c(0.0);
    double hi = lo;
    for (int k = 1; k <= samples; ++k) {
        const double v = c(static_cast<double>(k) / samples);
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    return {lo, hi};
}

SplitDiffusionOperator assemble_split_operator(const ScalarFunction& lambda, const ScalarFunction& mu,
                                               const Grid& grid)
{
    auto check_positive = [&grid](const ScalarFunction& c, const char* role) {
        for (int i = 0; i <= grid.m(); ++i) {
            const double v = c(grid.coordinate(i));
            if (!(v > 0.0) || !std::isfinite(v)) {
                throw std::invalid_argument(std::string(role) + " coefficient '" + c.name +
                                            "' is not positive at x=" + std::to_string(grid.coordinate(i)));
            }
        }
    };
    check_positive(lambda, "lambda");
    check_positive(mu, "mu");

    CoefficientBounds bounds;
    std::tie(bounds.lambda_0, bounds.lambda_inf) = sampled_extrema(lambda);
    std::tie(bounds.mu_0, bounds.mu_inf) = sampled_extrema(mu);
    if (!(bounds.lambda_0 > 0.0) || !(bounds.mu_0 > 0.0)) {
        throw std::invalid_argument("coefficients must be bounded below by a positive constant");
    }
    return SplitDiffusionOperator(grid, assemble_1d_stiffness(lambda, grid), assemble_1d_stiffness(mu, grid),
                                  sample_diagonal(lambda, grid), sample_diagonal(mu, grid), bounds);
}

CoefficientPair coefficients(CoefficientSet set)
{
    using std::numbers::pi;
    switch (set) {
    case CoefficientSet::Paper:
        return {{[](double x) { return x * std::sin(pi * x) + 0.1; }, "x*sin(pi*x)+0.1"},
                {[](double y) { return std::cos(2.0 * pi * y) + 1.1; }, "cos(2*pi*y)+1.1"}};
    case CoefficientSet::Constant:
        break;
    }
    return {{[](double) { return 1.0; }, "1"}, {[](double) { return 1.0; }, "1"}};
}

} // namespace adisplit
