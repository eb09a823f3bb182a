#include <cstdio>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "advt/errors.hpp"
#include "advt/experiment.hpp"

namespace {

constexpr int kConfigErrorExit = 2;

int run_command(const std::string& manifest_path, const std::string& out_dir, unsigned workers) {
    const advt::Manifest manifest = advt::load_manifest(manifest_path);
    const advt::ExperimentResult result = advt::run_experiment_to(manifest, out_dir, workers);
    advt::write_summary_csv(std::cout, result.summary);
    return 0;
}

int single_command(const std::string& problem, const std::string& variant, std::uint64_t seed,
                   std::size_t iterations, int step_cap) {
    if (!advt::is_variant_id(variant)) throw advt::ConfigError("--variant: unknown variant '" + variant + "'");
    if (iterations == 0) throw advt::ConfigError("--iterations: must be >= 1");
    const advt::ProblemInstance instance = advt::make_problem(problem);
    const advt::RunRecord record = advt::run_single(instance, variant, seed, advt::Budget::episodes(iterations),
                                                    step_cap > 0 ? step_cap : instance.step_cap);
    std::cout << "step,action,observation,reward\n";
    for (std::size_t t = 0; t < record.log.size(); ++t) {
        const advt::StepLog& s = record.log[t];
        std::string action;
        for (std::size_t i = 0; i < s.action.size(); ++i) {
            if (i) action += ';';
            action += advt::format_number(s.action[i]);
        }
        std::cout << t << ',' << action << ',' << s.observation << ',' << advt::format_number(s.reward) << '\n';
    }
    const advt::RunRow row = advt::to_row(record);
    advt::write_runs_csv(std::cout, std::span<const advt::RunRow>(&row, 1));
    return 0;
}

int summarize_command(const std::string& runs_path) {
    const auto rows = advt::read_runs_csv(runs_path);
    advt::write_summary_csv(std::cout, advt::summarize_groups(rows));
    return 0;
}

int defaults_command(const std::string& problem, const std::string& map) {
    if (!problem.empty()) {
        std::cout << advt::default_problem_config(problem).dump(2) << '\n';
    } else {
        std::cout << advt::default_map(map).dump(2) << '\n';
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Continuous-action POMDP planning with adaptive Voronoi action trees"};
    app.require_subcommand(1);

    std::string manifest_path, out_dir;
    unsigned workers = 1;
    auto* run = app.add_subcommand("run", "Run every experiment in a manifest and write runs.csv and summary.csv");
    run->add_option("--manifest", manifest_path, "Experiment manifest (JSON)")->required();
    run->add_option("--out", out_dir, "Output directory")->required();
    run->add_option("--workers", workers, "Worker threads")->check(CLI::PositiveNumber);

    std::string problem, variant = "advt";
    std::uint64_t seed = 0;
    std::size_t iterations = 1000;
    int step_cap = 0;
    auto* single = app.add_subcommand("single", "Run one seeded episode and print its step log");
    single->add_option("--problem", problem, "Problem id")->required();
    single->add_option("--variant", variant, "Solver variant");
    single->add_option("--seed", seed, "Run seed");
    single->add_option("--iterations", iterations, "Planning episodes per step");
    single->add_option("--step-cap", step_cap, "Maximum executed steps (default: the problem's)");

    std::string runs_path;
    auto* summarize = app.add_subcommand("summarize", "Recompute summary.csv from a runs.csv");
    summarize->add_option("--runs", runs_path, "runs.csv file")->required();

    std::string defaults_problem, defaults_map;
    auto* defaults = app.add_subcommand("defaults", "Print the built-in configuration of a problem or map as JSON");
    auto* problem_opt = defaults->add_option("--problem", defaults_problem, "Problem id");
    auto* map_opt = defaults->add_option("--map", defaults_map, "Map name (parking, vdp-tag)");
    problem_opt->excludes(map_opt);
    defaults->require_option(1);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kConfigErrorExit;
    }

    try {
        if (*run) return run_command(manifest_path, out_dir, workers);
        if (*single) return single_command(problem, variant, seed, iterations, step_cap);
        if (*summarize) return summarize_command(runs_path);
        if (*defaults) return defaults_command(defaults_problem, defaults_map);
    } catch (const advt::ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << '\n';
        return kConfigErrorExit;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
