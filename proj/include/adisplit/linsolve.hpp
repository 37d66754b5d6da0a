#pragma once

#include "adisplit/grid.hpp"
#include "adisplit/operators.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace adisplit {

enum class SolverMethod { ConjugateGradient, KroneckerDirect };

struct LinearSolverHandle {
    SolverMethod method = SolverMethod::ConjugateGradient;
    /// Target relative residual, in (0, 1e-2].
    double tol = 1e-12;
    /// 0 selects 10 * (number of unknowns).
    std::size_t max_iter = 0;

    void validate() const;
    std::size_t iteration_limit(std::size_t unknowns) const;
};

struct SolveStats {
    std::size_t iterations = 0;
    double relative_residual = 0.0;
};

class SolverError : public std::runtime_error {
public:
    SolverError(const std::string& what, std::size_t iterations, std::vector<double> residual_history)
        : std::runtime_error(what), iterations_(iterations), residual_history_(std::move(residual_history))
    {
    }

    std::size_t iterations() const noexcept { return iterations_; }
    const std::vector<double>& residual_history() const noexcept { return residual_history_; }

private:
    std::size_t iterations_;
    std::vector<double> residual_history_;
};

using LinearMap = std::function<void(std::span<const double>, std::span<double>)>;

/// Unpreconditioned CG for a symmetric positive definite map. Stops when the
/// true residual |b - Ax|_2 <= tol |b|_2; the recursive residual is
/// re-synchronized by restarting from the current iterate when they disagree.
std::vector<double> conjugate_gradient(const LinearMap& apply_spd, std::span<const double> rhs,
                                       const LinearSolverHandle& handle, std::span<const double> initial_guess = {},
                                       SolveStats* stats = nullptr);

/// Fast solver for L_h v = f via the symmetrized Kronecker-sum structure:
///   K_A + K_B = D^{1/2} (S_lambda (x) I + I (x) S_mu) D^{1/2},
///   S_c = D_c^{-1/2} K_c D_c^{-1/2},  D = D_lambda (x) D_mu,
/// with S_lambda, S_mu diagonalized once.
class KroneckerDirectSolver {
public:
    explicit KroneckerDirectSolver(const SplitDiffusionOperator& op);
    ~KroneckerDirectSolver();
    KroneckerDirectSolver(KroneckerDirectSolver&&) noexcept;
    KroneckerDirectSolver& operator=(KroneckerDirectSolver&&) noexcept;

    const Grid& grid() const noexcept;
    std::span<const double> eigenvalues_x() const noexcept;
    std::span<const double> eigenvalues_y() const noexcept;

    /// v = (K_A + K_B)^{-1} g, one pass, no refinement.
    void apply_stiffness_inverse(std::span<const double> g, std::span<double> v) const;

    /// (K_A + K_B) v = g with iterative refinement until the relative
    /// residual meets tol or stops halving (rounding floor on fine grids).
    /// `stats` reports the residual actually reached.
    void solve_stiffness(std::span<const double> g, std::span<double> v, double tol = 1e-12,
                         SolveStats* stats = nullptr) const;

    /// Solves L_h v = f, refined like solve_stiffness.
    Field solve(const Field& f, double tol = 1e-12, SolveStats* stats = nullptr) const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

KroneckerDirectSolver kronecker_direct_prepare(const SplitDiffusionOperator& op);

/// Solves L_h v = f with the method selected by `handle`.
Field solve_lh(const SplitDiffusionOperator& op, const Field& f, const LinearSolverHandle& handle = {},
               SolveStats* stats = nullptr);

/// Solves (sigma I - L) v = f by CG for any split operator, sigma >= 0.
/// `initial_guess` may be null.
Field solve_shifted(const SplitOperator& op, double sigma, const Field& f, const LinearSolverHandle& handle = {},
                    const Field* initial_guess = nullptr, SolveStats* stats = nullptr);

struct PowerIterationResult {
    double norm = 0.0;
    std::size_t iterations = 0;
    bool converged = false;
};

/// 2-norm of G estimated by power iteration on G^T G. `adjoint` may be empty
/// for symmetric G. Stops when the relative change of the estimate drops
/// below tol or after max_iters.
PowerIterationResult power_iteration(const LinearMap& forward, const LinearMap& adjoint, std::size_t n,
                                     std::size_t max_iters = 1000, double tol = 1e-10, std::uint64_t seed = 1);

/// Estimate of |A_h L_h^{-1}|_h = |K_A (K_A + K_B)^{-1}|_2.
PowerIterationResult stability_norm_estimate(const SplitDiffusionOperator& op, const LinearSolverHandle& handle = {},
                                             std::size_t max_iters = 1000, double tol = 1e-8);

} // namespace adisplit
