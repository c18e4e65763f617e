#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <numeric>

#include "tenfact/io.hpp"
#include "tenfact/mlsvd.hpp"
#include "tenfact/tiling.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitInadmissible = 3;
constexpr int kExitVerification = 4;

using namespace tenfact;

bool uniform(const std::vector<Index>& v) {
    return std::adjacent_find(v.begin(), v.end(), std::not_equal_to<>()) == v.end();
}

std::optional<Index> try_simplified(const ProblemSpec& spec) {
    if (!uniform(spec.mode_sizes) || !uniform(spec.window_sizes)) return std::nullopt;
    const Index p = spec.mode_sizes.front();
    const Index lambda = spec.window_sizes.front();
    if (spec.num_users % spec.max_users_per_server != 0 || p % lambda != 0) return std::nullopt;
    return bound_simplified(spec.num_users, spec.max_users_per_server, spec.num_subfunctions,
                            spec.max_subfunctions_per_server, p, lambda);
}

Index flat_subfunction_count(const ProblemSpec& spec) {
    Index out = 1;
    for (Index p : spec.mode_sizes) out *= p;
    return out;
}

RunReport make_bound_report(const ProblemSpec& spec, Index baseline_granularity) {
    RunReport report;
    report.num_users = spec.num_users;
    report.declared_normalized = normalized_constraints(spec);
    const TilePlan plan = apply_ownership(design_tiles(spec), admissible_support(spec));
    report.bound_constructive = bound_constructive(plan);
    report.bound_general = bound_general(spec);
    report.bound_simplified = try_simplified(spec);
    report.class_counts = plan.class_counts();
    report.baseline_granularity = baseline_granularity;
    report.baseline = baseline_server_count(spec.num_users, spec.max_users_per_server,
                                            flat_subfunction_count(spec),
                                            spec.max_subfunctions_per_server, baseline_granularity);
    return report;
}

int run_bound(const std::string& problem_path, Index baseline_granularity) {
    const ProblemFile problem = load_problem(problem_path);
    const RunReport report = make_bound_report(problem.spec, baseline_granularity);

    std::cout << "constructive bound: " << *report.bound_constructive << "\n";
    std::cout << "general bound:      " << *report.bound_general << "\n";
    if (report.bound_simplified) {
        std::cout << "simplified bound:   " << *report.bound_simplified << "\n";
    } else {
        std::cout << "simplified bound:   unavailable (needs uniform P, Lambda and divisibility)\n";
    }
    std::cout << "class counts:       " << report.class_counts[0] << " " << report.class_counts[1]
              << " " << report.class_counts[2] << " " << report.class_counts[3] << "\n";
    std::cout << "baseline servers:   " << report.baseline->value;
    if (!report.baseline->integral) std::cout << " (warning: not an integer)";
    std::cout << " (T=" << baseline_granularity << ", L'=" << flat_subfunction_count(problem.spec)
              << ")\n";
    return kExitOk;
}

int run_factorize(const std::string& problem_path, const std::string& out_path, double tol) {
    const ProblemFile problem = load_problem(problem_path);
    const DenseTensor demand = build_demand_tensor(problem.spec);
    const auto violations = validate_admissibility(problem.spec, demand);
    if (!violations.empty()) {
        std::cerr << "inadmissible demand: " << violations.size() << " coefficient(s) activate more than "
                  << problem.spec.max_subfunctions_per_server << " subfunctions\n";
        for (std::size_t i = 0; i < violations.size() && i < 8; ++i) {
            const auto& v = violations[i];
            std::cerr << "  user " << v.user << " index [";
            for (std::size_t m = 0; m < v.index.size(); ++m)
                std::cerr << (m ? "," : "") << v.index[m];
            std::cerr << "] activates " << v.active_subfunctions << "\n";
        }
        return kExitInadmissible;
    }
    const TilePlan plan = apply_ownership(design_tiles(problem.spec), tensor_support(demand));
    const Factorization fact = factorize(demand, plan, tol);
    save_factorization(fact, plan, out_path);
    std::cout << "N: " << fact.num_servers << "\n";
    std::cout << "residual: " << verify_reconstruction(fact, demand) << "\n";
    return kExitOk;
}

int run_verify(const std::string& problem_path, const std::string& fact_path, double tol) {
    const ProblemFile problem = load_problem(problem_path);
    const DenseTensor demand = build_demand_tensor(problem.spec);
    const Factorization fact = load_factorization(fact_path, problem.spec);
    const double residual = verify_reconstruction(fact, demand);
    const ConstraintAudit audit = verify_constraints(fact, problem.spec);

    std::cout << "N: " << fact.num_servers << "\n";
    std::cout << "residual: " << residual << " (tolerance " << tol << ")\n";
    std::cout << "achieved Gamma: " << audit.costs.computation_achieved << "  Delta: "
              << audit.costs.communication_achieved << "\n";
    bool ok = audit.ok;
    if (residual > tol) {
        std::cout << "FAIL: residual above tolerance\n";
        ok = false;
    }
    for (const auto& v : audit.violations) std::cout << "FAIL: " << v.message << "\n";
    if (!ok) return kExitVerification;
    std::cout << "OK\n";
    return kExitOk;
}

int run_simulate(const std::string& problem_path, const std::string& fact_path,
                 const std::string& out_path) {
    const ProblemFile problem = load_problem(problem_path);
    if (!problem.basis) {
        std::cerr << "simulate needs \"basis\" and \"input\" in the problem file\n";
        return kExitInput;
    }
    const DenseTensor demand = build_demand_tensor(problem.spec);
    const Factorization fact = load_factorization(fact_path, problem.spec);
    const SimulationReport sim = simulate(problem.spec, demand, fact, *problem.basis);

    RunReport report;
    report.num_users = problem.spec.num_users;
    report.num_servers = fact.num_servers;
    report.rate = sim.rate;
    report.declared_normalized = normalized_constraints(problem.spec);
    report.class_counts = design_tiles(problem.spec).class_counts();
    report.residual = verify_reconstruction(fact, demand);
    report.costs = verify_constraints(fact, problem.spec).costs;
    report.max_rel_error = sim.max_rel_error;

    if (out_path.empty()) {
        std::cout << report_to_string(report);
    } else {
        save_report(report, out_path);
        std::cout << "max_rel_error: " << sim.max_rel_error << "\n";
        std::cout << "rate: " << sim.rate << "\n";
    }
    return sim.max_rel_error <= 1e-9 ? kExitOk : kExitVerification;
}

int run_report(const std::string& problem_path, const std::string& fact_path,
               const std::string& out_path, Index baseline_granularity) {
    const ProblemFile problem = load_problem(problem_path);
    RunReport report = make_bound_report(problem.spec, baseline_granularity);
    if (!fact_path.empty()) {
        const DenseTensor demand = build_demand_tensor(problem.spec);
        const Factorization fact = load_factorization(fact_path, problem.spec);
        report.num_servers = fact.num_servers;
        report.residual = verify_reconstruction(fact, demand);
        const ConstraintAudit audit = verify_constraints(fact, problem.spec);
        report.costs = audit.costs;
        report.rate = audit.costs.rate;
    }
    if (out_path.empty()) {
        std::cout << report_to_string(report);
    } else {
        save_report(report, out_path);
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Sparse tensor factorization planner for distributed polynomial evaluation"};
    app.require_subcommand(1);

    double tolerance = kDefaultRankTol;
    Index seed = 0;
    Index baseline_granularity = 1;
    std::string problem_path, fact_path, out_path;

    auto* bound = app.add_subcommand("bound", "Print server-count bounds for a problem");
    bound->add_option("problem", problem_path, "problem JSON file")->required();
    bound->add_option("--baseline-T", baseline_granularity, "granularity of the flattened baseline")
        ->default_val(1);

    auto* factorize_cmd = app.add_subcommand("factorize", "Build and write a factorization");
    factorize_cmd->add_option("problem", problem_path, "problem JSON file")->required();
    factorize_cmd->add_option("output", out_path, "factorization JSON file to write")->required();
    factorize_cmd->add_option("--tolerance", tolerance, "relative rank cutoff")->default_val(kDefaultRankTol);
    factorize_cmd->add_option("--seed", seed, "reserved; the construction is deterministic")
        ->default_val(0);

    auto* verify_cmd = app.add_subcommand("verify", "Check a factorization against its problem");
    verify_cmd->add_option("problem", problem_path, "problem JSON file")->required();
    verify_cmd->add_option("factorization", fact_path, "factorization JSON file")->required();
    verify_cmd->add_option("--tolerance", tolerance, "largest acceptable residual")->default_val(kDefaultRankTol);

    auto* simulate_cmd = app.add_subcommand("simulate", "Run the three-phase protocol end to end");
    simulate_cmd->add_option("problem", problem_path, "problem JSON file (with basis and input)")->required();
    simulate_cmd->add_option("factorization", fact_path, "factorization JSON file")->required();
    simulate_cmd->add_option("report", out_path, "report JSON file to write (stdout when omitted)");
    simulate_cmd->add_option("--output", out_path, "report JSON file to write");

    auto* report_cmd = app.add_subcommand("report", "Write a combined bounds/verification report");
    report_cmd->add_option("problem", problem_path, "problem JSON file")->required();
    report_cmd->add_option("factorization", fact_path, "optional factorization JSON file");
    report_cmd->add_option("--output", out_path, "report JSON file to write");
    report_cmd->add_option("--baseline-T", baseline_granularity, "granularity of the flattened baseline")
        ->default_val(1);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitInput;
    }

    try {
        if (bound->parsed()) return run_bound(problem_path, baseline_granularity);
        if (factorize_cmd->parsed()) return run_factorize(problem_path, out_path, tolerance);
        if (verify_cmd->parsed()) return run_verify(problem_path, fact_path, tolerance);
        if (simulate_cmd->parsed()) return run_simulate(problem_path, fact_path, out_path);
        if (report_cmd->parsed()) return run_report(problem_path, fact_path, out_path, baseline_granularity);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    }
    return kExitInput;
}
