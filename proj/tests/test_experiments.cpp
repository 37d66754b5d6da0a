#include "adisplit/experiments.hpp"

#include "oracle.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <numbers>
#include <sstream>

namespace adisplit {
namespace {

using std::numbers::pi;

const ScalarFunction one{[](double) { return 1.0; }, "1"};

SplitDiffusionOperator paper_operator(int m)
{
    const auto c = coefficients(CoefficientSet::Paper);
    return assemble_split_operator(c.lambda, c.mu, Grid(m));
}

ExperimentConfig small_config()
{
    ExperimentConfig config;
    config.scheme = SchemeKind::PeacemanRachford;
    config.rows = {{1.0 / 8, 8}, {1.0 / 16, 16}};
    config.reference = {64, 1.0 / 256, SchemeKind::PeacemanRachford};
    return config;
}

TEST(InitialData, UnitMaxNorm)
{
    for (auto method : {SolverMethod::ConjugateGradient, SolverMethod::KroneckerDirect}) {
        const Field eta = prepare_initial_data(paper_operator(16), {method, 1e-12, 0});
        EXPECT_EQ(max_norm(eta), 1.0);
    }
}

TEST(InitialData, EigenfunctionSurrogate)
{
    const Grid grid(16);
    const auto op = assemble_split_operator(one, one, grid);
    const ScalarFunction2D sines{[](double x, double y) { return std::sin(pi * x) * std::sin(pi * y); }, "sin sin"};
    const Field eta = prepare_initial_data(op, {SolverMethod::KroneckerDirect, 1e-12, 0}, sines);
    const Field expected = interpolate(sines, grid);
    // The positive fourth power keeps the sign; the nodal max of sin*sin is 1 at the centre.
    EXPECT_LE(max_norm(eta - expected), 1e-10);
}

TEST(InitialData, MatchesDenseFourFoldSolve)
{
    const auto op = paper_operator(8);
    const auto dense = oracle::dense_assemble(op);
    const Eigen::PartialPivLU<oracle::DenseMatrix> lu(dense.l);
    oracle::DenseVector w = oracle::to_vector(interpolate(experiment_eta0(), op.grid()));
    for (int pass = 0; pass < 4; ++pass) {
        w = lu.solve(w);
    }
    w /= w.cwiseAbs().maxCoeff();
    EXPECT_LE(oracle::relative_error(prepare_initial_data(op, {}), w), 1e-9);
}

TEST(InitialData, Eta0Samples)
{
    const Field g = interpolate(experiment_eta0(), Grid(16));
    EXPECT_NEAR(g(0, 0), std::sin(3 * pi / 16) * std::cos(2 * pi / 16), 1e-15);
    EXPECT_NEAR(g(7, 3), std::sin(3 * pi * 8 / 16) * std::cos(2 * pi * 4 / 16), 1e-15);
}

TEST(InitialData, ModeNames)
{
    EXPECT_EQ(parse_initial_data("reference"), InitialData::Reference);
    EXPECT_EQ(parse_initial_data("per-grid"), InitialData::PerGrid);
    EXPECT_THROW(parse_initial_data("fine"), std::invalid_argument);
}

TEST(MeasureError, TrivialCases)
{
    const auto op = paper_operator(32);
    const Field ref = prepare_initial_data(op, {});
    EXPECT_EQ(measure_error(ref, ref), 0.0);
    EXPECT_DOUBLE_EQ(measure_error(Field(Grid(8)), ref), discrete_norm(ref));

    // Exactly representable coarse function: bilinear data on a nested grid.
    const Field coarse = prepare_initial_data(paper_operator(8), {});
    EXPECT_NEAR(measure_error(coarse, prolong_to(coarse, Grid(32))), 0.0, 1e-16);

    const Field other = 0.5 * ref;
    EXPECT_DOUBLE_EQ(measure_error(other, ref), discrete_norm(ref - other));
}

TEST(ObservedOrder, Examples)
{
    EXPECT_EQ(observed_order(std::vector<double>{4, 1}), std::vector<double>{2.0});
    EXPECT_EQ(observed_order(std::vector<double>{1, 1}), std::vector<double>{0.0});
    const std::vector<double> table{9.1e-4, 2.9e-4, 7.5e-5, 1.9e-5, 4.6e-6, 1.1e-6};
    const auto p = observed_order(table);
    const std::vector<double> expected{1.65, 1.95, 1.98, 2.05, 2.06};
    ASSERT_EQ(p.size(), expected.size());
    for (std::size_t i = 0; i < p.size(); ++i) {
        EXPECT_NEAR(p[i], expected[i], 0.01);
    }
}

TEST(ObservedOrder, Errors)
{
    EXPECT_THROW(observed_order(std::vector<double>{1.0}), std::invalid_argument);
    EXPECT_THROW(observed_order(std::vector<double>{1.0, 0.0}), std::invalid_argument);
    EXPECT_THROW(observed_order(std::vector<double>{-1.0, 1.0}), std::invalid_argument);
}

TEST(Config, TabulatedRows)
{
    const auto pr = paper_rows(SchemeKind::PeacemanRachford);
    ASSERT_EQ(pr.size(), 6u);
    for (const auto& row : pr) {
        EXPECT_EQ(row.k, 1.0 / row.m);
    }
    const auto dr = paper_rows(SchemeKind::DouglasRachford);
    ASSERT_EQ(dr.size(), 6u);
    for (const auto& row : dr) {
        // h tracks sqrt(2k): h = 1/16 at k = 1/128.
        EXPECT_EQ(row.m, static_cast<int>(std::lround(std::sqrt(2.0 / row.k))));
    }
    EXPECT_THROW(paper_rows(SchemeKind::CrankNicolson), std::invalid_argument);
}

TEST(Config, Validation)
{
    ExperimentConfig config = small_config();
    EXPECT_NO_THROW(config.validate());
    config.rows.push_back({0.3, 8});
    EXPECT_THROW(config.validate(), std::invalid_argument);
    config = small_config();
    config.rows.clear();
    EXPECT_THROW(config.validate(), std::invalid_argument);
    config = small_config();
    config.reference.k = 0.2;
    EXPECT_THROW(config.validate(), std::invalid_argument);
    config = small_config();
    config.rows.push_back({1.0 / 8, 1});
    EXPECT_THROW(config.validate(), std::invalid_argument);
}

TEST(Convergence, SmallStudy)
{
    const ExperimentConfig config = small_config();
    const ReferenceSolution reference = compute_reference(config);
    EXPECT_EQ(reference.solution.grid().m(), 64);
    EXPECT_EQ(max_norm(reference.initial), 1.0);

    const ConvergenceReport report = run_convergence(config, reference);
    ASSERT_TRUE(report.complete) << report.failure;
    ASSERT_EQ(report.rows.size(), 2u);
    EXPECT_GT(report.rows[0].error, report.rows[1].error);
    EXPECT_GT(report.rows[1].error, 0.0);
    ASSERT_TRUE(report.rows[0].order.has_value());
    EXPECT_FALSE(report.rows[1].order.has_value());
    EXPECT_DOUBLE_EQ(*report.rows[0].order, std::log2(report.rows[0].error / report.rows[1].error));
    EXPECT_EQ(report.rows[0].steps, 4u);
    EXPECT_EQ(report.rows[1].h, 1.0 / 16);
    EXPECT_EQ(report.spatial_order, 2);
    EXPECT_EQ(report.temporal_order, 2);

    // Determinism.
    const ConvergenceReport again = run_convergence(config);
    for (std::size_t i = 0; i < report.rows.size(); ++i) {
        EXPECT_EQ(report.rows[i].error, again.rows[i].error);
    }
}

TEST(Convergence, PerGridInitialData)
{
    ExperimentConfig config = small_config();
    config.initial_data = InitialData::PerGrid;
    const ConvergenceReport report = run_convergence(config);
    ASSERT_TRUE(report.complete) << report.failure;
    EXPECT_GT(report.rows[0].error, report.rows[1].error);

    // On the reference grid itself both modes start from the same data.
    ExperimentConfig same = small_config();
    same.rows = {{1.0 / 64, 64}};
    const ReferenceSolution reference = compute_reference(same);
    same.initial_data = InitialData::PerGrid;
    const double per_grid = run_convergence(same, reference).rows[0].error;
    same.initial_data = InitialData::Reference;
    EXPECT_EQ(run_convergence(same, reference).rows[0].error, per_grid);
}

TEST(Convergence, ReferenceGridMismatch)
{
    ExperimentConfig config = small_config();
    const ReferenceSolution reference = compute_reference(config);
    config.reference.m = 32;
    config.reference.k = 1.0 / 128;
    EXPECT_THROW(run_convergence(config, reference), std::invalid_argument);
}

TEST(Convergence, RowFailureFlagsPartialReport)
{
    ExperimentConfig config = small_config();
    const ReferenceSolution reference = compute_reference(config);
    config.scheme = SchemeKind::CrankNicolson;
    config.step_solver = {SolverMethod::ConjugateGradient, 1e-12, 1};
    const ConvergenceReport report = run_convergence(config, reference);
    EXPECT_FALSE(report.complete);
    EXPECT_FALSE(report.failure.empty());
    EXPECT_TRUE(report.rows.empty());
}

TEST(Convergence, CsvFormat)
{
    const ConvergenceReport report = run_convergence(small_config());
    std::ostringstream out;
    write_csv(out, report);
    std::istringstream in(out.str());
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "k,h,error,order");
    std::getline(in, line);
    EXPECT_EQ(std::count(line.begin(), line.end(), ','), 3);
    EXPECT_NE(line.back(), ',');
    std::getline(in, line);
    EXPECT_EQ(line.back(), ',');
    EXPECT_EQ(line.rfind("0.0625,0.0625,", 0), 0u);

    std::ostringstream text;
    print_report(text, report);
    EXPECT_NE(text.str().find("pr"), std::string::npos);
}

TEST(Verify, ConstantCoefficientsPass)
{
    const std::vector<int> ms{8, 16};
    const VerifyReport report = verify_assumptions(ms, CoefficientSet::Constant);
    EXPECT_TRUE(report.all_passed()) << report.to_text();
    bool saw_stability = false;
    for (const auto& c : report.checks) {
        if (c.name.find("stability") != std::string::npos) {
            saw_stability = true;
            EXPECT_LE(c.value, 1.0 + 1e-6);
        }
    }
    EXPECT_TRUE(saw_stability);
}

TEST(Verify, ExperimentCoefficientsBelowBound)
{
    const std::vector<int> ms{8, 16};
    const VerifyReport report = verify_assumptions(ms, CoefficientSet::Paper);
    EXPECT_TRUE(report.all_passed()) << report.to_text();
    for (const auto& c : report.checks) {
        if (c.name.find("stability") != std::string::npos) {
            EXPECT_LE(c.value, 11.95);
        }
    }
}

TEST(Verify, SignFlippedStiffnessFails)
{
    const auto c = coefficients(CoefficientSet::Paper);
    const OperatorFactory flipped = [&](const Grid& grid) {
        const auto op = assemble_split_operator(c.lambda, c.mu, grid);
        TridiagonalMatrix k = op.k_lambda();
        for (auto& v : k.sub) {
            v = -v;
        }
        for (auto& v : k.diag) {
            v = -v;
        }
        for (auto& v : k.super) {
            v = -v;
        }
        return SplitDiffusionOperator(grid, k, op.k_mu(), op.d_lambda(), op.d_mu(), op.bounds());
    };
    const std::vector<int> ms{8, 16};
    const VerifyReport report = verify_assumptions(ms, flipped);
    EXPECT_FALSE(report.all_passed());
    bool dissipativity_failed = false;
    for (const auto& check : report.checks) {
        if (check.name.find("dissipativ") != std::string::npos && !check.passed) {
            dissipativity_failed = true;
        }
    }
    EXPECT_TRUE(dissipativity_failed) << report.to_text();
}

TEST(Workers, ThreadsEnvironment)
{
    ::setenv("THREADS", "3", 1);
    EXPECT_EQ(worker_count(), 3u);
    ::setenv("THREADS", "zero", 1);
    EXPECT_THROW(worker_count(), std::invalid_argument);
    ::unsetenv("THREADS");
    EXPECT_GE(worker_count(), 1u);
}

} // namespace
} // namespace adisplit
