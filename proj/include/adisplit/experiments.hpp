#pragma once

#include "adisplit/grid.hpp"
#include "adisplit/linsolve.hpp"
#include "adisplit/operators.hpp"
#include "adisplit/steppers.hpp"

#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace adisplit {

/// eta_0(x, y) = sin(3 pi x) cos(2 pi y).
ScalarFunction2D experiment_eta0();

/// Worker cap from the THREADS environment variable, else hardware concurrency.
unsigned worker_count();

/// eta_h = L_h^{-4} P_h eta0 normalized to unit nodal max.
Field prepare_initial_data(const SplitDiffusionOperator& op, const LinearSolverHandle& handle,
                           const ScalarFunction2D& eta0 = experiment_eta0());

/// |prolong(u_coarse) - u_ref|_h on the reference grid.
double measure_error(const Field& u_coarse, const Field& u_ref);

/// p_i = log2(e_i / e_{i+1}).
std::vector<double> observed_order(std::span<const double> errors);

struct StudyRow {
    double k = 0.0;
    int m = 0;
};

struct ReferenceSpec {
    int m = 1024;
    double k = 1.0 / 8192.0;
    SchemeKind scheme = SchemeKind::PeacemanRachford;
};

enum class InitialData {
    /// Nodal samples of the reference-grid eta on each row's grid.
    Reference,
    /// Each grid computes its own L_h^{-4} P_h eta0.
    PerGrid,
};

InitialData parse_initial_data(const std::string& name);

struct ExperimentConfig {
    SchemeKind scheme = SchemeKind::PeacemanRachford;
    std::vector<StudyRow> rows;
    double t_end = 0.5;
    ReferenceSpec reference;
    CoefficientSet coefficients = CoefficientSet::Paper;
    InitialData initial_data = InitialData::Reference;
    /// Solver for the L_h^{-4} initial-data solves.
    LinearSolverHandle data_solver{SolverMethod::KroneckerDirect, 1e-12, 0};
    /// Solver for Crank-Nicolson steps.
    LinearSolverHandle step_solver{SolverMethod::ConjugateGradient, 1e-12, 0};

    /// Throws std::invalid_argument if a row or the reference does not divide t_end.
    void validate() const;
};

/// Row sets of the reproduced error table.
std::vector<StudyRow> paper_rows(SchemeKind scheme);

struct ReportRow {
    double k = 0.0;
    int m = 0;
    double h = 0.0;
    double error = 0.0;
    /// log2(error / next error); empty on the last row.
    std::optional<double> order;
    double seconds = 0.0;
    std::size_t steps = 0;
};

struct ConvergenceReport {
    SchemeKind scheme = SchemeKind::PeacemanRachford;
    ReferenceSpec reference;
    double t_end = 0.5;
    std::vector<ReportRow> rows;
    double reference_seconds = 0.0;
    std::size_t reference_solver_iterations = 0;
    /// Spatial order s of the element pair and classical temporal order r.
    int spatial_order = 2;
    int temporal_order = 1;
    bool complete = true;
    std::string failure;

    std::vector<double> errors() const;
};

struct ReferenceSolution {
    Field initial;
    Field solution;
    double seconds = 0.0;
    std::size_t solver_iterations = 0;
};

ReferenceSolution compute_reference(const ExperimentConfig& config);

/// Runs the rows against a precomputed reference solution.
ConvergenceReport run_convergence(const ExperimentConfig& config, const ReferenceSolution& reference);
ConvergenceReport run_convergence(const ExperimentConfig& config);

/// CSV with header k,h,error,order; 17 significant digits; order blank on the last row.
void write_csv(std::ostream& out, const ConvergenceReport& report);
void print_report(std::ostream& out, const ConvergenceReport& report);

struct CheckResult {
    std::string name;
    int m = 0;
    double value = 0.0;
    double threshold = 0.0;
    bool passed = false;
    std::string detail;
};

struct VerifyReport {
    std::vector<CheckResult> checks;

    bool all_passed() const;
    std::string to_text() const;
};

using OperatorFactory = std::function<SplitDiffusionOperator(const Grid&)>;

/// Structural checks on the discretization: dissipativity, resolvent and
/// Cayley nonexpansivity, conjugated n-step nonexpansivity of DR and PR,
/// norm equivalence, interpolation order, uniform bound of L_h^{-1}, and the
/// stability norm against its coefficient bound. Failures are collected.
VerifyReport verify_assumptions(std::span<const int> m_list, const OperatorFactory& factory);
VerifyReport verify_assumptions(std::span<const int> m_list, CoefficientSet set);

} // namespace adisplit
