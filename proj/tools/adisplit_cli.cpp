#include "adisplit/experiments.hpp"
#include "adisplit/grid.hpp"
#include "adisplit/operators.hpp"
#include "adisplit/steppers.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

namespace {

using namespace adisplit;

// Accepts plain decimals and fractions such as 1/128.
double parse_real(const std::string& text)
{
    if (const auto slash = text.find('/'); slash != std::string::npos) {
        const double num = std::stod(text.substr(0, slash));
        const double den = std::stod(text.substr(slash + 1));
        if (den == 0.0) {
            throw std::invalid_argument("zero denominator in '" + text + "'");
        }
        return num / den;
    }
    std::size_t used = 0;
    const double value = std::stod(text, &used);
    if (used != text.size()) {
        throw std::invalid_argument("not a number: '" + text + "'");
    }
    return value;
}

StudyRow parse_row(const std::string& text)
{
    const auto comma = text.find(',');
    if (comma == std::string::npos) {
        throw std::invalid_argument("--row expects K,M, got '" + text + "'");
    }
    StudyRow row;
    row.k = parse_real(text.substr(0, comma));
    row.m = std::stoi(text.substr(comma + 1));
    return row;
}

const std::map<std::string, CoefficientSet> coefficient_names{{"paper", CoefficientSet::Paper},
                                                              {"constant", CoefficientSet::Constant}};

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Douglas-Rachford / Peaceman-Rachford dimension splitting for 2D diffusion"};
    app.require_subcommand(1);

    // run
    auto* run = app.add_subcommand("run", "Evolve the initial data and write the final field");
    std::string run_scheme = "pr";
    int run_m = 64;
    std::string run_k = "1/64";
    std::string run_t_end = "0.5";
    CoefficientSet run_coeff = CoefficientSet::Paper;
    std::vector<std::string> run_initial{"paper"};
    std::string run_out;
    run->add_option("--scheme", run_scheme, "dr, pr or cn")->check(CLI::IsMember({"dr", "pr", "cn"}));
    run->add_option("--m", run_m, "subintervals per direction")->required();
    run->add_option("--k", run_k, "step size (decimal or fraction)")->required();
    run->add_option("--t-end", run_t_end, "final time");
    run->add_option("--coeff", run_coeff, "coefficient pair")
        ->transform(CLI::CheckedTransformer(coefficient_names, CLI::ignore_case));
    run->add_option("--initial", run_initial, "'paper' or 'file PATH'")->expected(1, 2);
    run->add_option("--out", run_out, "output field file (default stdout)");

    // convergence
    auto* conv = app.add_subcommand("convergence", "Error table against a fine reference solution");
    std::string conv_scheme = "pr";
    bool conv_paper_rows = false;
    std::vector<std::string> conv_rows;
    int ref_m = 1024;
    std::string ref_k = "1/8192";
    std::string ref_scheme = "pr";
    std::string csv_path;
    std::string conv_t_end = "0.5";
    CoefficientSet conv_coeff = CoefficientSet::Paper;
    std::string conv_initial = "reference";
    conv->add_option("--scheme", conv_scheme, "dr or pr")->check(CLI::IsMember({"dr", "pr"}));
    conv->add_flag("--paper-rows", conv_paper_rows, "use the tabulated (k, m) rows for the scheme");
    conv->add_option("--row", conv_rows, "K,M row (repeatable)");
    conv->add_option("--ref-m", ref_m, "reference grid size");
    conv->add_option("--ref-k", ref_k, "reference step size");
    conv->add_option("--ref-scheme", ref_scheme, "pr or cn")->check(CLI::IsMember({"pr", "cn"}));
    conv->add_option("--csv", csv_path, "write k,h,error,order CSV");
    conv->add_option("--t-end", conv_t_end, "final time");
    conv->add_option("--initial-data", conv_initial,
                     "'reference' samples the reference-grid eta on each row; 'per-grid' solves on each row")
        ->check(CLI::IsMember({"reference", "per-grid"}));
    conv->add_option("--coeff", conv_coeff, "coefficient pair")
        ->transform(CLI::CheckedTransformer(coefficient_names, CLI::ignore_case));

    // verify
    auto* verify = app.add_subcommand("verify", "Check the structural properties of the discretization");
    std::vector<int> verify_m;
    CoefficientSet verify_coeff = CoefficientSet::Paper;
    verify->add_option("--m", verify_m, "grid sizes (repeatable; default 8 16 32 64 128)");
    verify->add_option("--coeff", verify_coeff, "coefficient pair")
        ->transform(CLI::CheckedTransformer(coefficient_names, CLI::ignore_case));

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) {
            const Grid grid(run_m);
            const auto [lambda, mu] = coefficients(run_coeff);
            const SplitDiffusionOperator op = assemble_split_operator(lambda, mu, grid);
            Field u0(grid);
            if (run_initial.at(0) == "paper") {
                if (run_initial.size() != 1) {
                    throw std::invalid_argument("--initial paper takes no path");
                }
                u0 = prepare_initial_data(op, {SolverMethod::KroneckerDirect, 1e-12, 0});
            } else if (run_initial.at(0) == "file" && run_initial.size() == 2) {
                u0 = read_field_file(run_initial[1]);
                if (!(u0.grid() == grid)) {
                    throw std::invalid_argument("initial field has m=" + std::to_string(u0.grid().m()) +
                                                " but --m is " + std::to_string(run_m));
                }
            } else {
                throw std::invalid_argument("--initial expects 'paper' or 'file PATH'");
            }
            const double k = parse_real(run_k);
            const std::size_t steps = steps_to_reach(parse_real(run_t_end), k);
            const Field u = evolve(op, parse_scheme(run_scheme), k, steps, u0);
            if (run_out.empty()) {
                write_field(std::cout, u);
            } else {
                write_field_file(run_out, u);
            }
            return 0;
        }

        if (conv->parsed()) {
            ExperimentConfig config;
            config.scheme = parse_scheme(conv_scheme);
            config.t_end = parse_real(conv_t_end);
            config.coefficients = conv_coeff;
            config.initial_data = parse_initial_data(conv_initial);
            config.reference = {ref_m, parse_real(ref_k), parse_scheme(ref_scheme)};
            if (conv_paper_rows) {
                config.rows = paper_rows(config.scheme);
            }
            for (const auto& text : conv_rows) {
                config.rows.push_back(parse_row(text));
            }
            const ConvergenceReport report = run_convergence(config);
            print_report(std::cout, report);
            if (!csv_path.empty()) {
                std::ofstream csv(csv_path);
                if (!csv) {
                    throw std::runtime_error("cannot open " + csv_path);
                }
                write_csv(csv, report);
            }
            return report.complete ? 0 : 1;
        }

        if (verify->parsed()) {
            if (verify_m.empty()) {
                verify_m = {8, 16, 32, 64, 128};
            }
            const VerifyReport report = verify_assumptions(verify_m, verify_coeff);
            std::cout << report.to_text();
            return report.all_passed() ? 0 : 1;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
