#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "advt/config.hpp"
#include "advt/problems/registry.hpp"
#include "advt/solver.hpp"

namespace advt {

std::vector<std::string> variant_ids();
bool is_variant_id(const std::string& id);

/// Cell centres of a regular grid with round(total^(1/D)) points per axis.
std::vector<Point> uniform_grid(const BoundedMetricSpace& space, std::size_t total);

/// Solver configuration for a named variant: "advt", "advt-r" (rectangular cells),
/// "advt-l0" (no diameter term), "advt-mc" (Monte Carlo backups) or "grid16" (UCB1 over
/// a fixed 16-point grid).
SolverConfig variant_config(const std::string& variant, SolverConfig base, const BoundedMetricSpace& space);

struct StepLog {
    Point action;
    std::string observation;
    double reward = 0.0;

    bool operator==(const StepLog&) const = default;
};

struct RunRecord {
    std::string problem;
    std::string variant;
    std::uint64_t seed = 0;
    double discount = 1.0;
    std::vector<StepLog> log;
    double discounted_return = 0.0;
    bool success = false;
    bool depleted = false;

    int steps() const { return static_cast<int>(log.size()); }
    /// sum_t discount^t r_t over the log.
    double recompute_return() const;

    bool operator==(const RunRecord&) const = default;
};

/// Plan, execute and update the belief until a terminal state or `step_cap` steps.
RunRecord run_single(const ProblemInstance& problem, const std::string& variant, std::uint64_t seed,
                     const Budget& budget, int step_cap);

/// One line of runs.csv.
struct RunRow {
    std::string problem;
    std::string variant;
    std::uint64_t seed = 0;
    int steps = 0;
    double discounted_return = 0.0;
    bool success = false;
    bool depleted = false;

    bool operator==(const RunRow&) const = default;
};

/// Row as stored: the return is rounded to the printed precision.
RunRow to_row(const RunRecord& record);

struct SummaryRow {
    std::string problem;
    std::string variant;
    std::size_t n = 0;
    double mean = 0.0;
    double ci95 = 0.0;
    double success_rate = 0.0;
};

/// Mean, 1.96 * sample sd / sqrt(n) and success rate. Requires n >= 2.
SummaryRow summarize(std::span<const RunRow> rows);

/// Groups rows by (problem, variant) in order of first appearance. Groups with fewer
/// than two runs are left out.
std::vector<SummaryRow> summarize_groups(std::span<const RunRow> rows);

std::string format_number(double value);
void write_runs_csv(std::ostream& out, std::span<const RunRow> rows);
void write_summary_csv(std::ostream& out, std::span<const SummaryRow> rows);
std::vector<RunRow> read_runs_csv(std::istream& in);
std::vector<RunRow> read_runs_csv(const std::filesystem::path& path);

struct ExperimentSpec {
    std::string problem;
    std::vector<std::string> variants;
    std::size_t runs = 0;
    Budget budget;
    std::uint64_t base_seed = 0;
    int step_cap = 0;  ///< 0 means the problem's default
    Json overrides = Json::object();
};

struct Manifest {
    std::vector<ExperimentSpec> experiments;
};

Manifest parse_manifest(const Json& manifest);
Manifest load_manifest(const std::filesystem::path& path);

struct ExperimentResult {
    std::vector<RunRecord> records;
    std::vector<RunRow> rows;
    std::vector<SummaryRow> summary;
};

/// Runs every (problem, variant, run index) task on `workers` threads. Output order and
/// contents do not depend on the worker count.
ExperimentResult run_experiment(const Manifest& manifest, unsigned workers = 1,
                                const std::filesystem::path& config_dir = config_directory());

/// run_experiment plus runs.csv and summary.csv in `out_dir`.
ExperimentResult run_experiment_to(const Manifest& manifest, const std::filesystem::path& out_dir,
                                   unsigned workers = 1,
                                   const std::filesystem::path& config_dir = config_directory());

}  // namespace advt
