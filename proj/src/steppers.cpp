#include "adisplit/steppers.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace adisplit {

int classical_order(SchemeKind scheme) noexcept
{
    return scheme == SchemeKind::DouglasRachford ? 1 : 2;
}

std::string_view scheme_name(SchemeKind scheme) noexcept
{
    switch (scheme) {
    case SchemeKind::DouglasRachford:
        return "dr";
    case SchemeKind::PeacemanRachford:
        return "pr";
    case SchemeKind::CrankNicolson:
        return "cn";
    }
    return "?";
}

SchemeKind parse_scheme(std::string_view name)
{
    if (name == "dr") {
        return SchemeKind::DouglasRachford;
    }
    if (name == "pr") {
        return SchemeKind::PeacemanRachford;
    }
    if (name == "cn") {
        return SchemeKind::CrankNicolson;
    }
    throw std::invalid_argument("unknown scheme '" + std::string(name) + "' (expected dr, pr or cn)");
}

Stepper::Stepper(const SplitOperator& op, SchemeKind scheme, double k, LinearSolverHandle cn_solver)
    : op_(&op), scheme_(scheme), k_(k), cn_solver_(cn_solver), scratch_a_(op.grid().interior_count()),
      scratch_b_(op.grid().interior_count())
{
    if (!(k > 0.0) || !std::isfinite(k)) {
        throw std::invalid_argument("step size must be positive, got " + std::to_string(k));
    }
    if (scheme == SchemeKind::CrankNicolson) {
        cn_solver_.validate();
    }
}

void Stepper::advance(std::span<double> u)
{
    if (u.size() != scratch_a_.size()) {
        throw std::invalid_argument("stepper: field length does not match operator grid");
    }
    const SplitOperator& op = *op_;
    const std::size_t size = u.size();
    switch (scheme_) {
    case SchemeKind::DouglasRachford: {
        // (I + k^2 A B) u with B applied first.
        op.apply_b_into(u, scratch_a_);
        op.apply_a_into(scratch_a_, scratch_b_);
        const double k2 = k_ * k_;
        for (std::size_t i = 0; i < size; ++i) {
            u[i] += k2 * scratch_b_[i];
        }
        op.resolve_a_into(k_, u, u);
        op.resolve_b_into(k_, u, u);
        break;
    }
    case SchemeKind::PeacemanRachford: {
        const double half = 0.5 * k_;
        op.apply_b_into(u, scratch_a_);
        for (std::size_t i = 0; i < size; ++i) {
            u[i] += half * scratch_a_[i];
        }
        op.resolve_a_into(half, u, u);
        op.apply_a_into(u, scratch_a_);
        for (std::size_t i = 0; i < size; ++i) {
            u[i] += half * scratch_a_[i];
        }
        op.resolve_b_into(half, u, u);
        break;
    }
    case SchemeKind::CrankNicolson: {
        const double half = 0.5 * k_;
        op.apply_l_into(u, scratch_a_);
        for (std::size_t i = 0; i < size; ++i) {
            scratch_a_[i] = u[i] + half * scratch_a_[i];
        }
        auto implicit = [&op, half](std::span<const double> x, std::span<double> y) {
            op.apply_l_into(x, y);
            for (std::size_t i = 0; i < y.size(); ++i) {
                y[i] = x[i] - half * y[i];
            }
        };
        SolveStats stats;
        const auto w = conjugate_gradient(implicit, scratch_a_, cn_solver_, scratch_a_, &stats);
        solver_iterations_ += stats.iterations;
        std::copy(w.begin(), w.end(), u.begin());
        break;
    }
    }
}

void Stepper::advance(std::span<double> u, std::size_t n_steps)
{
    for (std::size_t s = 0; s < n_steps; ++s) {
        advance(u);
    }
}

namespace {

Field single_step(const SplitOperator& op, SchemeKind scheme, double k, const Field& u,
                  const LinearSolverHandle& solver)
{
    if (!(u.grid() == op.grid())) {
        throw std::invalid_argument("step: field grid does not match operator grid");
    }
    Stepper stepper(op, scheme, k, solver);
    Field out = u;
    stepper.advance(out.values());
    return out;
}

} // namespace

Field dr_step(const SplitOperator& op, double k, const Field& u)
{
    return single_step(op, SchemeKind::DouglasRachford, k, u, {});
}

Field pr_step(const SplitOperator& op, double k, const Field& u)
{
    return single_step(op, SchemeKind::PeacemanRachford, k, u, {});
}

Field cn_step(const SplitOperator& op, double k, const Field& u, const LinearSolverHandle& solver)
{
    return single_step(op, SchemeKind::CrankNicolson, k, u, solver);
}

Field evolve(const SplitOperator& op, SchemeKind scheme, double k, std::size_t n_steps, const Field& u0,
             const LinearSolverHandle& cn_solver)
{
    if (!(u0.grid() == op.grid())) {
        throw std::invalid_argument("evolve: field grid does not match operator grid");
    }
    Stepper stepper(op, scheme, k, cn_solver);
    Field u = u0;
    stepper.advance(u.values(), n_steps);
    return u;
}

std::size_t steps_to_reach(double t_end, double k)
{
    if (!(k > 0.0) || !(t_end >= 0.0)) {
        throw std::invalid_argument("steps_to_reach: need k > 0 and t_end >= 0");
    }
    const double ratio = std::round(t_end / k);
    if (std::abs(ratio * k - t_end) > 1e-12 * t_end) {
        throw std::invalid_argument("t_end=" + std::to_string(t_end) + " is not an integer multiple of k=" +
                                    std::to_string(k));
    }
    return static_cast<std::size_t>(ratio);
}

} // namespace adisplit
