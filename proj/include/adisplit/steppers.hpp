#pragma once

#include "adisplit/grid.hpp"
#include "adisplit/linsolve.hpp"
#include "adisplit/operators.hpp"

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace adisplit {

enum class SchemeKind { DouglasRachford, PeacemanRachford, CrankNicolson };

/// Classical order: 1 for Douglas-Rachford, 2 for Peaceman-Rachford and Crank-Nicolson.
int classical_order(SchemeKind scheme) noexcept;
std::string_view scheme_name(SchemeKind scheme) noexcept;
/// Accepts "dr", "pr", "cn".
SchemeKind parse_scheme(std::string_view name);

/// One-step map S for a fixed step size, applied in place with reusable scratch.
///
///   DR: S = (I - kB)^{-1} (I - kA)^{-1} (I + k^2 AB)
///   PR: S = (I - k/2 B)^{-1} (I + k/2 A) (I - k/2 A)^{-1} (I + k/2 B)
///   CN: S = (I - k/2 L)^{-1} (I + k/2 L), implicit part solved by CG
///
/// The operator must outlive the stepper.
class Stepper {
public:
    Stepper(const SplitOperator& op, SchemeKind scheme, double k, LinearSolverHandle cn_solver = {});

    void advance(std::span<double> u);
    void advance(std::span<double> u, std::size_t n_steps);

    SchemeKind scheme() const noexcept { return scheme_; }
    double step_size() const noexcept { return k_; }
    /// Total CG iterations spent by Crank-Nicolson steps so far.
    std::size_t solver_iterations() const noexcept { return solver_iterations_; }

private:
    const SplitOperator* op_;
    SchemeKind scheme_;
    double k_;
    LinearSolverHandle cn_solver_;
    std::vector<double> scratch_a_;
    std::vector<double> scratch_b_;
    std::size_t solver_iterations_ = 0;
};

Field dr_step(const SplitOperator& op, double k, const Field& u);
Field pr_step(const SplitOperator& op, double k, const Field& u);
Field cn_step(const SplitOperator& op, double k, const Field& u, const LinearSolverHandle& solver = {});

/// n_steps-fold composition of the chosen step map; n_steps == 0 returns u0.
Field evolve(const SplitOperator& op, SchemeKind scheme, double k, std::size_t n_steps, const Field& u0,
             const LinearSolverHandle& cn_solver = {});

/// round(t_end / k); throws if |n k - t_end| > 1e-12 t_end.
std::size_t steps_to_reach(double t_end, double k);

} // namespace adisplit
