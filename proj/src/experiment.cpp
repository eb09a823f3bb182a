#include "advt/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "advt/errors.hpp"

namespace advt {

namespace {

const std::vector<std::string> kVariants = {"advt", "advt-r", "advt-l0", "advt-mc", "grid16"};

const char* const kRunsHeader = "problem,variant,seed,steps,return,success,depleted";
const char* const kSummaryHeader = "problem,variant,n,mean,ci95,success_rate";

std::string observation_text(const Observation& o, const ObservationMode& mode) {
    if (!mode.continuous) return std::to_string(o.symbol);
    std::string out;
    for (std::size_t i = 0; i < o.values.size(); ++i) {
        if (i) out += ';';
        out += format_number(o.values[i]);
    }
    return out;
}

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, sep)) out.push_back(field);
    if (!line.empty() && line.back() == sep) out.emplace_back();
    return out;
}

/// Parses the whole field or throws std::invalid_argument.
template <typename T>
T parse_field(const std::string& text) {
    T value{};
    const char* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc() || ptr != end) throw std::invalid_argument(text);
    return value;
}

template <typename T>
T json_field(const Json& object, const char* key, const std::string& context) {
    try {
        return object.at(key).get<T>();
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(context + "." + key + ": " + e.what());
    }
}

}  // namespace

std::vector<std::string> variant_ids() { return kVariants; }

bool is_variant_id(const std::string& id) {
    return std::find(kVariants.begin(), kVariants.end(), id) != kVariants.end();
}

std::vector<Point> uniform_grid(const BoundedMetricSpace& space, std::size_t total) {
    require(total >= 1, "uniform_grid: need at least one point");
    const std::size_t dim = space.dimension();
    const auto per_axis = static_cast<std::size_t>(
        std::max(1L, std::lround(std::pow(static_cast<double>(total), 1.0 / static_cast<double>(dim)))));
    std::size_t count = 1;
    for (std::size_t i = 0; i < dim; ++i) count *= per_axis;

    std::vector<Point> points;
    points.reserve(count);
    std::vector<std::size_t> index(dim, 0);
    for (std::size_t k = 0; k < count; ++k) {
        Point p(dim);
        for (std::size_t i = 0; i < dim; ++i) {
            const double width = (space.upper()[i] - space.lower()[i]) / static_cast<double>(per_axis);
            p[i] = space.lower()[i] + (static_cast<double>(index[i]) + 0.5) * width;
        }
        points.push_back(std::move(p));
        for (std::size_t i = 0; i < dim && ++index[i] == per_axis; ++i) index[i] = 0;
    }
    return points;
}

SolverConfig variant_config(const std::string& variant, SolverConfig base, const BoundedMetricSpace& space) {
    if (variant == "advt") return base;
    if (variant == "advt-r") {
        base.partition = PartitionMode::rectangular;
    } else if (variant == "advt-l0") {
        base.lipschitz = 0.0;
    } else if (variant == "advt-mc") {
        base.backup = BackupMode::monte_carlo;
    } else if (variant == "grid16") {
        base.partition = PartitionMode::fixed;
        base.lipschitz = 0.0;
        base.fixed_actions = uniform_grid(space, 16);
        const auto per_axis = static_cast<double>(
            std::lround(std::pow(16.0, 1.0 / static_cast<double>(space.dimension()))));
        double diag2 = 0.0;
        for (std::size_t i = 0; i < space.dimension(); ++i) {
            const double w = (space.upper()[i] - space.lower()[i]) / per_axis;
            diag2 += w * w;
        }
        base.fixed_cell_diameter = std::sqrt(diag2);
    } else {
        throw ConfigError("unknown variant '" + variant + "'");
    }
    return base;
}

double RunRecord::recompute_return() const {
    double total = 0.0, weight = 1.0;
    for (const StepLog& s : log) {
        total += weight * s.reward;
        weight *= discount;
    }
    return total;
}

RunRecord run_single(const ProblemInstance& problem, const std::string& variant, std::uint64_t seed,
                     const Budget& budget, int step_cap) {
    require(step_cap >= 1, "run_single: step cap must be >= 1");
    const PomdpModel& model = *problem.model;
    SolverConfig config = variant_config(variant, problem.solver, model.action_space());
    config.budget = budget;
    config.validate();

    Rng env_rng(derive_seed(seed, 1));
    Rng planner_rng(derive_seed(seed, 2));

    RunRecord record;
    record.problem = problem.id;
    record.variant = variant;
    record.seed = seed;
    record.discount = model.discount();

    const ObservationMode mode = model.observation_mode();
    State state = model.sample_initial_state(env_rng);
    std::unique_ptr<BeliefNode> root = make_root(model, config, planner_rng);
    double weight = 1.0;
    for (int t = 0; t < step_cap; ++t) {
        const PlanResult planned = plan(*root, model, config, planner_rng);
        StepResult result = model.step(state, planned.action, env_rng);
        record.log.push_back(StepLog{planned.action, observation_text(result.observation, mode), result.reward});
        record.discounted_return += weight * result.reward;
        weight *= record.discount;
        state = std::move(result.next);
        if (result.terminal) break;
        if (t + 1 == step_cap) break;
        AdvanceResult next = advance_root(std::move(root), planned.action_id, planned.action,
                                          result.observation, model, config, planner_rng);
        record.depleted = record.depleted || next.depleted;
        root = std::move(next.root);
    }
    record.success = model.is_success(state);
    return record;
}

std::string format_number(double value) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", value);
    return buf;
}

RunRow to_row(const RunRecord& record) {
    return RunRow{record.problem,
                  record.variant,
                  record.seed,
                  record.steps(),
                  std::strtod(format_number(record.discounted_return).c_str(), nullptr),
                  record.success,
                  record.depleted};
}

SummaryRow summarize(std::span<const RunRow> rows) {
    require(rows.size() >= 2, "summarize: need at least two runs for a confidence interval");
    SummaryRow out;
    out.problem = rows.front().problem;
    out.variant = rows.front().variant;
    out.n = rows.size();
    const double n = static_cast<double>(rows.size());
    double sum = 0.0;
    std::size_t successes = 0;
    for (const RunRow& r : rows) {
        sum += r.discounted_return;
        successes += r.success ? 1 : 0;
    }
    out.mean = sum / n;
    double ss = 0.0;
    for (const RunRow& r : rows) ss += (r.discounted_return - out.mean) * (r.discounted_return - out.mean);
    out.ci95 = 1.96 * std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
    out.success_rate = static_cast<double>(successes) / n;
    return out;
}

std::vector<SummaryRow> summarize_groups(std::span<const RunRow> rows) {
    std::vector<std::pair<std::string, std::string>> order;
    std::map<std::pair<std::string, std::string>, std::vector<RunRow>> groups;
    for (const RunRow& r : rows) {
        auto key = std::make_pair(r.problem, r.variant);
        auto [it, inserted] = groups.try_emplace(key);
        if (inserted) order.push_back(key);
        it->second.push_back(r);
    }
    std::vector<SummaryRow> out;
    for (const auto& key : order) {
        if (groups[key].size() >= 2) out.push_back(summarize(groups[key]));
    }
    return out;
}

void write_runs_csv(std::ostream& out, std::span<const RunRow> rows) {
    out << kRunsHeader << '\n';
    for (const RunRow& r : rows) {
        out << r.problem << ',' << r.variant << ',' << r.seed << ',' << r.steps << ','
            << format_number(r.discounted_return) << ',' << (r.success ? 1 : 0) << ',' << (r.depleted ? 1 : 0)
            << '\n';
    }
}

void write_summary_csv(std::ostream& out, std::span<const SummaryRow> rows) {
    out << kSummaryHeader << '\n';
    for (const SummaryRow& r : rows) {
        out << r.problem << ',' << r.variant << ',' << r.n << ',' << format_number(r.mean) << ','
            << format_number(r.ci95) << ',' << format_number(r.success_rate) << '\n';
    }
}

std::vector<RunRow> read_runs_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line != kRunsHeader) {
        throw ConfigError("runs csv: expected header '" + std::string(kRunsHeader) + "'");
    }
    std::vector<RunRow> rows;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto f = split(line, ',');
        if (f.size() != 7) throw ConfigError("runs csv line " + std::to_string(line_no) + ": expected 7 fields");
        try {
            RunRow r;
            r.problem = f[0];
            r.variant = f[1];
            r.seed = parse_field<std::uint64_t>(f[2]);
            r.steps = parse_field<int>(f[3]);
            r.discounted_return = parse_field<double>(f[4]);
            if ((f[5] != "0" && f[5] != "1") || (f[6] != "0" && f[6] != "1")) throw std::invalid_argument("flag");
            r.success = f[5] == "1";
            r.depleted = f[6] == "1";
            rows.push_back(std::move(r));
        } catch (const std::logic_error&) {
            throw ConfigError("runs csv line " + std::to_string(line_no) + ": malformed field");
        }
    }
    return rows;
}

std::vector<RunRow> read_runs_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open " + path.string());
    return read_runs_csv(in);
}

Manifest parse_manifest(const Json& manifest) {
    if (!manifest.is_object()) throw ConfigError("manifest: expected a JSON object");
    for (auto it = manifest.begin(); it != manifest.end(); ++it) {
        if (it.key() != "experiments") throw ConfigError("manifest." + it.key() + ": unknown key");
    }
    if (!manifest.contains("experiments") || !manifest.at("experiments").is_array()) {
        throw ConfigError("manifest.experiments: expected an array");
    }
    Manifest out;
    const Json& list = manifest.at("experiments");
    for (std::size_t i = 0; i < list.size(); ++i) {
        const Json& e = list[i];
        const std::string ctx = "experiments[" + std::to_string(i) + "]";
        if (!e.is_object()) throw ConfigError(ctx + ": expected an object");
        for (auto it = e.begin(); it != e.end(); ++it) {
            static const std::vector<std::string> known = {"problem", "variants", "runs", "iterations",
                                                           "milliseconds", "base_seed", "step_cap", "config"};
            if (std::find(known.begin(), known.end(), it.key()) == known.end()) {
                throw ConfigError(ctx + "." + it.key() + ": unknown key");
            }
        }
        ExperimentSpec spec;
        spec.problem = json_field<std::string>(e, "problem", ctx);
        if (!is_problem_id(spec.problem)) {
            throw ConfigError(ctx + ".problem: unknown problem '" + spec.problem + "'");
        }
        spec.variants = json_field<std::vector<std::string>>(e, "variants", ctx);
        if (spec.variants.empty()) throw ConfigError(ctx + ".variants: empty list");
        for (const std::string& v : spec.variants) {
            if (!is_variant_id(v)) throw ConfigError(ctx + ".variants: unknown variant '" + v + "'");
        }
        spec.runs = json_field<std::size_t>(e, "runs", ctx);
        if (spec.runs < 1) throw ConfigError(ctx + ".runs: must be >= 1");
        const bool has_iterations = e.contains("iterations");
        const bool has_ms = e.contains("milliseconds");
        if (has_iterations == has_ms) {
            throw ConfigError(ctx + ".iterations: give exactly one of iterations or milliseconds");
        }
        if (has_iterations) {
            spec.budget = Budget::episodes(json_field<std::size_t>(e, "iterations", ctx));
            if (spec.budget.iterations == 0) throw ConfigError(ctx + ".iterations: must be >= 1");
        } else {
            spec.budget = Budget::wall_clock_ms(json_field<double>(e, "milliseconds", ctx));
            if (!(spec.budget.milliseconds > 0.0)) throw ConfigError(ctx + ".milliseconds: must be > 0");
        }
        spec.base_seed = e.contains("base_seed") ? json_field<std::uint64_t>(e, "base_seed", ctx) : 0;
        if (e.contains("step_cap")) {
            spec.step_cap = json_field<int>(e, "step_cap", ctx);
            if (spec.step_cap < 1) throw ConfigError(ctx + ".step_cap: must be >= 1");
        }
        if (e.contains("config")) {
            spec.overrides = e.at("config");
            if (!spec.overrides.is_object()) throw ConfigError(ctx + ".config: expected an object");
        }
        out.experiments.push_back(std::move(spec));
    }
    return out;
}

Manifest load_manifest(const std::filesystem::path& path) { return parse_manifest(load_json_file(path)); }

ExperimentResult run_experiment(const Manifest& manifest, unsigned workers,
                                const std::filesystem::path& config_dir) {
    struct Task {
        std::size_t experiment;
        std::size_t variant;
        std::size_t run;
    };
    std::vector<ProblemInstance> instances;
    std::vector<Task> tasks;
    for (std::size_t e = 0; e < manifest.experiments.size(); ++e) {
        const ExperimentSpec& spec = manifest.experiments[e];
        Json config = load_problem_config(spec.problem, config_dir);
        config.merge_patch(spec.overrides);
        instances.push_back(make_problem(spec.problem, config, config_dir));
        for (std::size_t v = 0; v < spec.variants.size(); ++v) {
            // Surface a bad variant/solver combination before any thread starts.
            variant_config(spec.variants[v], instances.back().solver, instances.back().model->action_space())
                .validate();
            for (std::size_t r = 0; r < spec.runs; ++r) tasks.push_back(Task{e, v, r});
        }
    }

    ExperimentResult result;
    result.records.resize(tasks.size());
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    const auto worker = [&] {
        for (std::size_t i = next++; i < tasks.size(); i = next++) {
            const Task& task = tasks[i];
            const ExperimentSpec& spec = manifest.experiments[task.experiment];
            const ProblemInstance& instance = instances[task.experiment];
            try {
                result.records[i] = run_single(instance, spec.variants[task.variant], spec.base_seed + task.run,
                                               spec.budget, spec.step_cap > 0 ? spec.step_cap : instance.step_cap);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                next = tasks.size();
            }
        }
    };
    const unsigned count = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(tasks.size())));
    if (count == 1) {
        worker();
    } else {
        std::vector<std::thread> threads;
        for (unsigned w = 0; w < count; ++w) threads.emplace_back(worker);
        for (auto& t : threads) t.join();
    }
    if (failure) std::rethrow_exception(failure);

    for (const RunRecord& r : result.records) result.rows.push_back(to_row(r));
    result.summary = summarize_groups(result.rows);
    return result;
}

ExperimentResult run_experiment_to(const Manifest& manifest, const std::filesystem::path& out_dir,
                                   unsigned workers, const std::filesystem::path& config_dir) {
    ExperimentResult result = run_experiment(manifest, workers, config_dir);
    std::filesystem::create_directories(out_dir);
    std::ofstream runs(out_dir / "runs.csv", std::ios::binary);
    write_runs_csv(runs, result.rows);
    std::ofstream summary(out_dir / "summary.csv", std::ios::binary);
    write_summary_csv(summary, result.summary);
    if (!runs || !summary) throw std::runtime_error("failed writing CSV files to " + out_dir.string());
    return result;
}

}  // namespace advt
