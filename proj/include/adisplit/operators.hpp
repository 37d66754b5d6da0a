#pragma once

#include "adisplit/grid.hpp"
#include "adisplit/tridiagonal.hpp"

#include <span>
#include <utility>

namespace adisplit {

/// The pair A, B acted on by the splitting schemes, with L = A + B.
///
/// Both parts must be dissipative in the discrete inner product of the
/// underlying grid. Applications must not alias input and output; resolvent
/// solves may.
class SplitOperator {
public:
    virtual ~SplitOperator() = default;

    virtual const Grid& grid() const = 0;

    virtual void apply_a_into(std::span<const double> u, std::span<double> out) const = 0;
    virtual void apply_b_into(std::span<const double> u, std::span<double> out) const = 0;
    virtual void apply_l_into(std::span<const double> u, std::span<double> out) const;

    /// out = (I - kappa*A)^{-1} rhs, kappa > 0.
    virtual void resolve_a_into(double kappa, std::span<const double> rhs, std::span<double> out) const = 0;
    /// out = (I - kappa*B)^{-1} rhs, kappa > 0.
    virtual void resolve_b_into(double kappa, std::span<const double> rhs, std::span<double> out) const = 0;
};

Field apply_a(const SplitOperator& op, const Field& u);
Field apply_b(const SplitOperator& op, const Field& u);
Field apply_l(const SplitOperator& op, const Field& u);
Field solve_resolvent_a(const SplitOperator& op, double kappa, const Field& rhs);
Field solve_resolvent_b(const SplitOperator& op, double kappa, const Field& rhs);

struct CoefficientBounds {
    double lambda_inf = 0.0;
    double mu_inf = 0.0;
    double lambda_0 = 0.0;
    double mu_0 = 0.0;

    /// sqrt(|lambda|_inf |mu|_inf / (lambda_0 mu_0)), the uniform bound on |A_h L_h^{-1}|_h.
    double stability_bound() const;
};

/// Dimension splitting of -div(lambda(x) mu(y) grad u) with mass-lumped
/// bilinear elements:
///   A_h = -(1/h^2) K_lambda (x) D_mu,   B_h = -(1/h^2) D_lambda (x) K_mu,
/// where the first Kronecker factor acts along x. Realized line by line; the
/// full matrices are never formed.
class SplitDiffusionOperator final : public SplitOperator {
public:
    SplitDiffusionOperator(const Grid& grid, TridiagonalMatrix k_lambda, TridiagonalMatrix k_mu,
                           DiagonalMatrix d_lambda, DiagonalMatrix d_mu, CoefficientBounds bounds);

    const Grid& grid() const override { return grid_; }
    const TridiagonalMatrix& k_lambda() const noexcept { return k_lambda_; }
    const TridiagonalMatrix& k_mu() const noexcept { return k_mu_; }
    const DiagonalMatrix& d_lambda() const noexcept { return d_lambda_; }
    const DiagonalMatrix& d_mu() const noexcept { return d_mu_; }
    const CoefficientBounds& bounds() const noexcept { return bounds_; }

    void apply_a_into(std::span<const double> u, std::span<double> out) const override;
    void apply_b_into(std::span<const double> u, std::span<double> out) const override;
    void apply_l_into(std::span<const double> u, std::span<double> out) const override;
    void resolve_a_into(double kappa, std::span<const double> rhs, std::span<double> out) const override;
    void resolve_b_into(double kappa, std::span<const double> rhs, std::span<double> out) const override;

    /// out = (K_lambda (x) D_mu + D_lambda (x) K_mu) u, i.e. -h^2 L_h u.
    void apply_stiffness_into(std::span<const double> u, std::span<double> out) const;
    /// out = (K_lambda (x) D_mu) u, i.e. -h^2 A_h u.
    void apply_stiffness_a_into(std::span<const double> u, std::span<double> out) const;

private:
    Grid grid_;
    TridiagonalMatrix k_lambda_;
    TridiagonalMatrix k_mu_;
    DiagonalMatrix d_lambda_;
    DiagonalMatrix d_mu_;
    CoefficientBounds bounds_;
};

/// K_c = tridiag(-(c_{i-1}+c_i), c_{i-1} + 2c_i + c_{i+1}, -(c_i+c_{i+1}))/2 for
/// i = 1..m-1, with c_i = c(x_i). No 1/h factor.
TridiagonalMatrix assemble_1d_stiffness(const ScalarFunction& c, const Grid& grid);

/// diag(c(x_i)), i = 1..m-1.
DiagonalMatrix sample_diagonal(const ScalarFunction& c, const Grid& grid);

/// Min and max of c over 10^4 + 1 uniform samples of [0, 1].
std::pair<double, double> sampled_extrema(const ScalarFunction& c);

/// Throws std::invalid_argument if a coefficient sample is not positive.
SplitDiffusionOperator assemble_split_operator(const ScalarFunction& lambda, const ScalarFunction& mu,
                                               const Grid& grid);

enum class CoefficientSet { Paper, Constant };

struct CoefficientPair {
    ScalarFunction lambda;
    ScalarFunction mu;
};

/// Paper (the `paper` selector): lambda(x) = x sin(pi x) + 0.1, mu(y) = cos(2 pi y) + 1.1.
/// Constant: lambda = mu = 1.
CoefficientPair coefficients(CoefficientSet set);

} // namespace adisplit
