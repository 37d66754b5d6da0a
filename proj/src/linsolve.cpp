#include "adisplit/linsolve.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <random>
#include <string>

namespace adisplit {

namespace {

double dot(std::span<const double> a, std::span<const double> b)
{
    double sum = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        sum += a[k] * b[k];
    }
    return sum;
}

double norm2(std::span<const double> a)
{
    return std::sqrt(dot(a, a));
}

constexpr int max_refinement_sweeps = 6;

} // namespace

void LinearSolverHandle::validate() const
{
    if (!(tol > 0.0 && tol <= 1e-2)) {
        throw std::invalid_argument("solver handle: tol must lie in (0, 1e-2], got " + std::to_string(tol));
    }
}

std::size_t LinearSolverHandle::iteration_limit(std::size_t unknowns) const
{
    return max_iter > 0 ? max_iter : 10 * unknowns;
}

std::vector<double> conjugate_gradient(const LinearMap& apply_spd, std::span<const double> rhs,
                                       const LinearSolverHandle& handle, std::span<const double> initial_guess,
                                       SolveStats* stats)
{
    handle.validate();
    const std::size_t n = rhs.size();
    const std::size_t limit = handle.iteration_limit(n);
    std::vector<double> x(n, 0.0);
    if (!initial_guess.empty()) {
        if (initial_guess.size() != n) {
            throw std::invalid_argument("conjugate_gradient: initial guess has wrong length");
        }
        x.assign(initial_guess.begin(), initial_guess.end());
    }

    const double rhs_norm = norm2(rhs);
    if (rhs_norm == 0.0) {
        if (stats != nullptr) {
            *stats = {};
        }
        return std::vector<double>(n, 0.0);
    }

    std::vector<double> r(n);
    std::vector<double> p(n);
    std::vector<double> q(n);
    std::vector<double> history;
    std::size_t iterations = 0;

    auto true_residual = [&]() {
        apply_spd(x, q);
        for (std::size_t k = 0; k < n; ++k) {
            r[k] = rhs[k] - q[k];
        }
        return norm2(r) / rhs_norm;
    };

    double relative = true_residual();
    history.push_back(relative);
    while (relative > handle.tol) {
        // One CG cycle from the current iterate; restarted if the recursive
        // residual claims convergence the true residual does not confirm.
        p = r;
        double rr = dot(r, r);
        while (iterations < limit) {
            apply_spd(p, q);
            const double pq = dot(p, q);
            if (!(pq > 0.0)) {
                throw SolverError("conjugate_gradient: operator is not positive definite (p^T A p = " +
                                      std::to_string(pq) + ")",
                                  iterations, std::move(history));
            }
            const double alpha = rr / pq;
            for (std::size_t k = 0; k < n; ++k) {
                x[k] += alpha * p[k];
                r[k] -= alpha * q[k];
            }
            ++iterations;
            const double rr_next = dot(r, r);
            history.push_back(std::sqrt(rr_next) / rhs_norm);
            if (std::sqrt(rr_next) <= handle.tol * rhs_norm) {
                break;
            }
            const double beta = rr_next / rr;
            rr = rr_next;
            for (std::size_t k = 0; k < n; ++k) {
                p[k] = r[k] + beta * p[k];
            }
        }
        relative = true_residual();
        if (relative > handle.tol && iterations >= limit) {
            throw SolverError("conjugate_gradient: no convergence after " + std::to_string(iterations) +
                                  " iterations (relative residual " + std::to_string(relative) + ")",
                              iterations, std::move(history));
        }
    }
    if (stats != nullptr) {
        stats->iterations = iterations;
        stats->relative_residual = relative;
    }
    return x;
}

struct KroneckerDirectSolver::Impl {
    explicit Impl(const SplitDiffusionOperator& o) : op(o) {}

    SplitDiffusionOperator op;
    Eigen::MatrixXd qx;
    Eigen::MatrixXd qy;
    Eigen::VectorXd theta_x;
    Eigen::VectorXd theta_y;
    Eigen::VectorXd dx_inv_sqrt;
    Eigen::VectorXd dy_inv_sqrt;
};

namespace {

// Eigen-decomposition of D^{-1/2} K D^{-1/2} for symmetric tridiagonal K.
void symmetrized_eigensystem(const TridiagonalMatrix& k, const DiagonalMatrix& d, Eigen::MatrixXd& vectors,
                             Eigen::VectorXd& values, Eigen::VectorXd& d_inv_sqrt)
{
    const auto n = static_cast<Eigen::Index>(k.size());
    d_inv_sqrt.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        if (!(d.diag[i] > 0.0)) {
            throw std::invalid_argument("kronecker_direct: diagonal factor must be positive");
        }
        d_inv_sqrt[i] = 1.0 / std::sqrt(d.diag[i]);
    }
    Eigen::VectorXd diag(n);
    Eigen::VectorXd off(std::max<Eigen::Index>(n - 1, 0));
    for (Eigen::Index i = 0; i < n; ++i) {
        diag[i] = k.diag[i] * d_inv_sqrt[i] * d_inv_sqrt[i];
        if (i + 1 < n) {
            off[i] = k.super[i] * d_inv_sqrt[i] * d_inv_sqrt[i + 1];
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
    solver.computeFromTridiagonal(diag, off, Eigen::ComputeEigenvectors);
    if (solver.info() != Eigen::Success) {
        throw std::runtime_error("kronecker_direct: tridiagonal eigensolver failed");
    }
    values = solver.eigenvalues();
    vectors = solver.eigenvectors();
    if (values.size() > 0 && values.minCoeff() < -1e-10) {
        throw std::runtime_error("kronecker_direct: stiffness factor is not positive semidefinite");
    }
}

} // namespace

KroneckerDirectSolver::KroneckerDirectSolver(const SplitDiffusionOperator& op) : impl_(std::make_unique<Impl>(op))
{
    symmetrized_eigensystem(op.k_lambda(), op.d_lambda(), impl_->qx, impl_->theta_x, impl_->dx_inv_sqrt);
    symmetrized_eigensystem(op.k_mu(), op.d_mu(), impl_->qy, impl_->theta_y, impl_->dy_inv_sqrt);
    if (impl_->theta_x.minCoeff() + impl_->theta_y.minCoeff() <= 0.0) {
        throw std::runtime_error("kronecker_direct: stiffness sum is singular");
    }
}

KroneckerDirectSolver::~KroneckerDirectSolver() = default;
KroneckerDirectSolver::KroneckerDirectSolver(KroneckerDirectSolver&&) noexcept = default;
KroneckerDirectSolver& KroneckerDirectSolver::operator=(KroneckerDirectSolver&&) noexcept = default;

const Grid& KroneckerDirectSolver::grid() const noexcept
{
    return impl_->op.grid();
}

std::span<const double> KroneckerDirectSolver::eigenvalues_x() const noexcept
{
    return {impl_->theta_x.data(), static_cast<std::size_t>(impl_->theta_x.size())};
}

std::span<const double> KroneckerDirectSolver::eigenvalues_y() const noexcept
{
    return {impl_->theta_y.data(), static_cast<std::size_t>(impl_->theta_y.size())};
}

void KroneckerDirectSolver::apply_stiffness_inverse(std::span<const double> g, std::span<double> v) const
{
    const auto n = static_cast<Eigen::Index>(grid().n());
    if (g.size() != grid().interior_count() || v.size() != g.size()) {
        throw std::invalid_argument("kronecker_direct: vector length does not match grid");
    }
    // Column-major n x n view: row = x index, column = y index.
    const Eigen::Map<const Eigen::MatrixXd> rhs(g.data(), n, n);
    Eigen::MatrixXd scaled = impl_->dx_inv_sqrt.asDiagonal() * rhs * impl_->dy_inv_sqrt.asDiagonal();
    Eigen::MatrixXd spectral = impl_->qx.transpose() * scaled * impl_->qy;
    for (Eigen::Index q = 0; q < n; ++q) {
        for (Eigen::Index p = 0; p < n; ++p) {
            spectral(p, q) /= impl_->theta_x[p] + impl_->theta_y[q];
        }
    }
    scaled.noalias() = impl_->qx * spectral * impl_->qy.transpose();
    Eigen::Map<Eigen::MatrixXd> out(v.data(), n, n);
    out = impl_->dx_inv_sqrt.asDiagonal() * scaled * impl_->dy_inv_sqrt.asDiagonal();
}

void KroneckerDirectSolver::solve_stiffness(std::span<const double> g, std::span<double> v, double tol,
                                            SolveStats* stats) const
{
    const std::size_t size = g.size();
    const double g_norm = norm2(g);
    SolveStats local;
    if (g_norm == 0.0) {
        std::fill(v.begin(), v.end(), 0.0);
        if (stats != nullptr) {
            *stats = local;
        }
        return;
    }
    apply_stiffness_inverse(g, v);
    local.iterations = 1;
    std::vector<double> residual(size);
    std::vector<double> correction(size);
    std::vector<double> candidate(size);
    auto relative_residual = [&](std::span<const double> x) {
        impl_->op.apply_stiffness_into(x, residual);
        for (std::size_t k = 0; k < size; ++k) {
            residual[k] = g[k] - residual[k];
        }
        return norm2(residual) / g_norm;
    };
    local.relative_residual = relative_residual(v);
    // Refine while the residual keeps halving. Below the rounding floor
    // (about eps * cond) the tolerance cannot be met; the solve then stops at
    // the best iterate and reports the residual it reached.
    while (local.relative_residual > tol && static_cast<int>(local.iterations) <= max_refinement_sweeps) {
        apply_stiffness_inverse(residual, correction);
        for (std::size_t k = 0; k < size; ++k) {
            candidate[k] = v[k] + correction[k];
        }
        const double next = relative_residual(candidate);
        ++local.iterations;
        if (next < local.relative_residual) {
            std::copy(candidate.begin(), candidate.end(), v.begin());
        }
        if (!(next < 0.5 * local.relative_residual)) {
            local.relative_residual = std::min(next, local.relative_residual);
            break;
        }
        local.relative_residual = next;
    }
    if (stats != nullptr) {
        *stats = local;
    }
}

Field KroneckerDirectSolver::solve(const Field& f, double tol, SolveStats* stats) const
{
    if (!(f.grid() == grid())) {
        throw std::invalid_argument("kronecker_direct: field grid does not match factorization grid");
    }
    const double h2 = grid().h() * grid().h();
    Field g = -h2 * f;
    Field v(grid());
    solve_stiffness(g.values(), v.values(), tol, stats);
    return v;
}

KroneckerDirectSolver kronecker_direct_prepare(const SplitDiffusionOperator& op)
{
    return KroneckerDirectSolver(op);
}

Field solve_lh(const SplitDiffusionOperator& op, const Field& f, const LinearSolverHandle& handle, SolveStats* stats)
{
    handle.validate();
    if (!(f.grid() == op.grid())) {
        throw std::invalid_argument("solve_lh: field grid does not match operator grid");
    }
    if (handle.method == SolverMethod::KroneckerDirect) {
        return KroneckerDirectSolver(op).solve(f, handle.tol, stats);
    }
    // L_h v = f  <=>  (K_A + K_B) v = -h^2 f; same relative residual.
    const double h2 = op.grid().h() * op.grid().h();
    const Field g = -h2 * f;
    auto stiffness = [&op](std::span<const double> x, std::span<double> y) { op.apply_stiffness_into(x, y); };
    return Field(op.grid(), conjugate_gradient(stiffness, g.values(), handle, {}, stats));
}

Field solve_shifted(const SplitOperator& op, double sigma, const Field& f, const LinearSolverHandle& handle,
                    const Field* initial_guess, SolveStats* stats)
{
    if (!(sigma >= 0.0)) {
        throw std::invalid_argument("solve_shifted: sigma must be non-negative");
    }
    if (!(f.grid() == op.grid())) {
        throw std::invalid_argument("solve_shifted: field grid does not match operator grid");
    }
    auto shifted = [&op, sigma](std::span<const double> x, std::span<double> y) {
        op.apply_l_into(x, y);
        for (std::size_t k = 0; k < y.size(); ++k) {
            y[k] = sigma * x[k] - y[k];
        }
    };
    std::span<const double> guess;
    if (initial_guess != nullptr) {
        require_same_grid(f, *initial_guess);
        guess = initial_guess->values();
    }
    return Field(op.grid(), conjugate_gradient(shifted, f.values(), handle, guess, stats));
}

PowerIterationResult power_iteration(const LinearMap& forward, const LinearMap& adjoint, std::size_t n,
                                     std::size_t max_iters, double tol, std::uint64_t seed)
{
    if (n == 0) {
        throw std::invalid_argument("power_iteration: empty space");
    }
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    std::vector<double> x(n);
    for (double& v : x) {
        v = dist(rng);
    }
    std::vector<double> y(n);
    std::vector<double> z(n);
    const LinearMap& back = adjoint ? adjoint : forward;

    PowerIterationResult result;
    double x_norm = norm2(x);
    double previous = 0.0;
    for (std::size_t it = 1; it <= max_iters; ++it) {
        for (double& v : x) {
            v /= x_norm;
        }
        forward(x, y);
        result.norm = norm2(y);
        result.iterations = it;
        if (it > 1 && std::abs(result.norm - previous) <= tol * result.norm) {
            result.converged = true;
            break;
        }
        previous = result.norm;
        back(y, z);
        x.swap(z);
        x_norm = norm2(x);
        if (x_norm == 0.0) {
            result.converged = true;
            break;
        }
    }
    return result;
}

PowerIterationResult stability_norm_estimate(const SplitDiffusionOperator& op, const LinearSolverHandle& handle,
                                             std::size_t max_iters, double tol)
{
    handle.validate();
    const std::size_t size = op.grid().interior_count();
    std::vector<double> tmp(size);
    LinearMap stiffness_inverse;
    std::unique_ptr<KroneckerDirectSolver> direct;
    if (handle.method == SolverMethod::KroneckerDirect) {
        direct = std::make_unique<KroneckerDirectSolver>(op);
        stiffness_inverse = [&direct, &handle](std::span<const double> g, std::span<double> v) {
            direct->solve_stiffness(g, v, handle.tol);
        };
    } else {
        stiffness_inverse = [&op, &handle](std::span<const double> g, std::span<double> v) {
            auto stiffness = [&op](std::span<const double> x, std::span<double> y) { op.apply_stiffness_into(x, y); };
            const auto x = conjugate_gradient(stiffness, g, handle);
            std::copy(x.begin(), x.end(), v.begin());
        };
    }
    // G = K_A (K_A + K_B)^{-1}; both factors symmetric, so G^T = (K_A + K_B)^{-1} K_A.
    auto forward = [&](std::span<const double> x, std::span<double> y) {
        stiffness_inverse(x, tmp);
        op.apply_stiffness_a_into(tmp, y);
    };
    auto adjoint = [&](std::span<const double> x, std::span<double> y) {
        op.apply_stiffness_a_into(x, tmp);
        stiffness_inverse(tmp, y);
    };
    return power_iteration(forward, adjoint, size, max_iters, tol);
}

} // namespace adisplit
