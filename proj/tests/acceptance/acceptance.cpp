// Acceptance checks. Each criterion prints one PASS/FAIL line; the exit code is non-zero
// if any selected criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "advt/errors.hpp"
#include "advt/experiment.hpp"
#include "advt/geometry.hpp"
#include "advt/solver.hpp"
#include "advt/voronoi_tree.hpp"
#include "support/oracles.hpp"
#include "support/toy_models.hpp"

namespace {

using namespace advt;
namespace fs = std::filesystem;

struct Verdict {
    bool pass = true;
    std::string detail;

    void check(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail += (detail.empty() ? "" : "; ") + ("failed: " + what);
        }
    }
    void note(const std::string& what) { detail += (detail.empty() ? "" : "; ") + what; }
};

std::string fmt(double v, int precision = 4) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", precision, v);
    return buf;
}

struct Context {
    fs::path cli;
    fs::path out_dir;
    unsigned workers = 1;
};

BoundedMetricSpace unit_box(std::size_t dim) {
    return BoundedMetricSpace(std::vector<double>(dim, 0.0), std::vector<double>(dim, 1.0));
}

Verdict geometry(const Context&) {
    Verdict out;
    Rng rng(2024);

    double worst_ball = 0.0;
    for (std::size_t dim : {2u, 3u, 6u}) {
        const auto space = unit_box(dim);
        for (int trial = 0; trial < 100; ++trial) {
            const std::size_t n = 1 + uniform_index(rng, 12);
            std::vector<Point> points;
            for (std::size_t i = 0; i < n; ++i) points.push_back(sample_uniform_box(space, rng));
            worst_ball = std::max(worst_ball, std::abs(min_enclosing_ball(points).radius -
                                                       testing::brute_force_ball_radius(points)));
        }
    }
    out.check(worst_ball <= 1e-6, "enclosing ball error " + fmt(worst_ball));
    out.note("ball max error " + fmt(worst_ball));

    long membership_checks = 0, membership_agree = 0, containment_checks = 0, contained = 0;
    for (std::size_t dim : {2u, 6u}) {
        const auto space = unit_box(dim);
        const auto params = DiameterParams::defaults_for(space);
        const BoundedMetricSpace wider(std::vector<double>(dim, -0.1), std::vector<double>(dim, 1.1));
        for (int t = 0; t < 100; ++t) {
            auto tree = VoronoiTree::create(space, PartitionMode::voronoi, rng);
            const int splits = 1 + static_cast<int>(uniform_index(rng, 10));
            for (int s = 0; s < splits; ++s) {
                tree.split_leaf(tree.leaf_for_action(static_cast<int>(uniform_index(rng, tree.action_count()))), rng,
                                params);
            }
            std::vector<CellMembershipOracle> oracles;
            for (std::size_t id = 0; id < tree.node_count(); ++id)
                oracles.push_back(tree.cell_oracle(static_cast<NodeId>(id)));
            for (int i = 0; i < 100; ++i) {
                const Point x = sample_uniform_box(wider, rng);
                for (std::size_t id = 0; id < tree.node_count(); ++id) {
                    ++membership_checks;
                    membership_agree += oracles[id](x) == testing::path_replay_contains(tree, static_cast<NodeId>(id), x);
                }
            }
            for (const Candidate& c : tree.candidate_actions()) {
                const auto& cell = oracles[static_cast<std::size_t>(c.leaf)];
                for (const Point& p : sample_boundary_set(*c.anchor, cell, space, 8, params.tolerance, rng)) {
                    ++containment_checks;
                    contained += cell(p);
                }
                for (int i = 0; i < 4; ++i) {
                    ++containment_checks;
                    contained += cell(hit_and_run_sample(*c.anchor, cell, space, params.walk_steps, params.tolerance, rng));
                }
            }
        }
    }
    out.check(membership_agree == membership_checks, "path replay agreement");
    out.check(contained == containment_checks, "boundary/Hit & Run containment");
    out.note("membership " + std::to_string(membership_agree) + "/" + std::to_string(membership_checks));
    out.note("containment " + std::to_string(contained) + "/" + std::to_string(containment_checks));

    for (std::size_t dim : {2u, 3u, 6u}) {
        const auto space = unit_box(dim);
        const auto params = DiameterParams::defaults_for(space);
        const CellMembershipOracle root = [&](std::span<const double> x) { return space.contains(x); };
        const double truth = std::sqrt(static_cast<double>(dim));
        const Point anchor = sample_uniform_box(space, rng);
        const double estimate =
            estimate_cell_diameter(anchor, root, space, params.boundary_samples, params.tolerance, rng);
        out.check(std::abs(estimate - truth) <= 0.1 * truth, "root diameter D=" + std::to_string(dim));
        out.note("diam D=" + std::to_string(dim) + " " + fmt(estimate) + " vs " + fmt(truth));
    }
    return out;
}

double leaf_q(const BeliefNode& b, int action) {
    return b.actions.node(b.actions.leaf_for_action(action)).q_estimate;
}

bool invariants_hold(const BeliefNode& b) {
    if (b.visit_count > 0) {
        long sum = 0;
        for (std::size_t id = 0; id < b.actions.action_count(); ++id)
            sum += b.actions.node(b.actions.leaf_for_action(static_cast<int>(id))).visit_count;
        if (sum != b.visit_count || b.value != b.best_visited_q()) return false;
    }
    for (const auto& edges : b.children)
        for (const auto& e : edges)
            if (!invariants_hold(*e.child)) return false;
    return true;
}

Verdict solver(const Context&) {
    Verdict out;
    out.check(std::isinf(ucb_value(3.0, 0.0, 0.0, 1.0, 1.0, 1.0)), "ucb unvisited = inf");
    out.check(ucb_value(std::exp(1.0), 1.0, 1.0, 2.0, 1.0, 0.5) == 3.5, "ucb 3.5");
    out.check(ucb_value(std::exp(1.0), 1.0, 1.0, 2.0, 0.0, 0.5) == 3.0, "ucb 3.0");

    VoronoiNode leaf;
    leaf.diameter = 0.5;
    leaf.visit_count = 4;
    out.check(should_refine(leaf, 1.0), "refine 4 >= 4");
    out.check(!should_refine(leaf, 0.1), "no refine 0.4 < 4");
    leaf.visit_count = 0;
    out.check(!should_refine(leaf, 1.0), "no refine at N = 0");

    // Backup arithmetic on a hand-built one-level episode.
    const testing::TwoStepChain chain(0.5);
    SolverConfig config;
    config.exploration = 0.0;
    config.lipschitz = 0.0;
    config.partition = PartitionMode::fixed;
    config.fixed_actions = {{0.25}, {0.75}};
    config.fixed_cell_diameter = 0.5;
    config.particle_capacity = 16;
    Rng rng(1);
    for (BackupMode mode : {BackupMode::bellman, BackupMode::monte_carlo}) {
        SolverConfig c = config;
        c.backup = mode;
        auto parent = make_belief_node(chain, c, rng);
        auto child = make_belief_node(chain, c, rng);
        Episode e;
        e.entries.push_back(EpisodeEntry{State{{0.0}}, 0, {}, mode == BackupMode::bellman ? 1.0 : 2.0, parent.get()});
        e.entries.push_back(EpisodeEntry{State{{1.0}}, -1, {}, 0.0, child.get()});
        child->value = mode == BackupMode::bellman ? 2.0 : 0.0;
        VoronoiNode& n = parent->actions.node(parent->actions.leaf_for_action(0));
        n.visit_count = 1;
        backup(e, c, 0.95);
        const double first = n.q_estimate;
        n.visit_count = 2;
        e.entries[0].reward = 0.0;
        child->value = mode == BackupMode::bellman ? 1.0 : 0.0;
        backup(e, c, 0.95);
        if (mode == BackupMode::bellman) {
            out.check(first == 1.0 + 0.95 * 2.0 && std::abs(first - 2.9) < 1e-15, "backup 2.9");
            out.check(n.q_estimate == first + (0.95 - first) / 2.0 && std::abs(n.q_estimate - 1.925) < 1e-15,
                      "backup 1.925");
        } else {
            out.check(n.q_estimate == 1.0, "Monte Carlo backup 1.0");
        }
    }

    // Hand-traced two-step chain.
    {
        const auto params = config.diameter_params(chain.action_space());
        auto root = make_root(chain, config, rng);
        auto episode = [&] {
            const Episode e = sample_episode(*root, chain, config, rng);
            backup_and_refine(e, config, chain.discount(), params, rng);
        };
        episode();
        bool ok = leaf_q(*root, 0) == 0.25 && root->value == 0.25;
        episode();
        ok = ok && leaf_q(*root, 1) == 0.75 && root->value == 0.75;
        episode();
        const auto& edges = root->children[1];
        ok = ok && !edges.empty();
        const BeliefNode* b1 = ok ? edges.front().child.get() : nullptr;
        ok = ok && leaf_q(*b1, 0) == 0.75 && leaf_q(*root, 1) == 0.9375;
        episode();
        ok = ok && leaf_q(*b1, 1) == 0.25 && b1->value == 0.75 && leaf_q(*root, 1) == 1.0 && root->value == 1.0;
        out.check(ok, "hand-traced chain");
    }

    // Fuzzed episodes.
    const testing::FuzzModel fuzz;
    long episodes = 0, violations = 0;
    for (int session = 0; session < 20; ++session) {
        SolverConfig c;
        c.exploration = uniform(rng, 0.0, 3.0);
        c.lipschitz = uniform(rng, 0.0, 2.0);
        c.refine_rate = uniform(rng, 0.2, 5.0);
        c.max_depth = 1 + static_cast<int>(uniform_index(rng, 8));
        c.particle_capacity = 100;
        c.backup = session % 3 == 0 ? BackupMode::monte_carlo : BackupMode::bellman;
        c.partition = session % 4 == 1 ? PartitionMode::rectangular : PartitionMode::voronoi;
        const auto params = c.diameter_params(fuzz.action_space());
        auto root = make_root(fuzz, c, rng);
        for (int i = 0; i < 500; ++i, ++episodes) {
            const Episode e = sample_episode(*root, fuzz, c, rng);
            backup_and_refine(e, c, fuzz.discount(), params, rng);
            violations += invariants_hold(*root) ? 0 : 1;
        }
    }
    out.check(violations == 0, "invariants after fuzzed episodes");
    out.note(std::to_string(episodes) + " fuzzed episodes, " + std::to_string(violations) + " violations");
    return out;
}

double median(std::vector<double> xs) {
    std::sort(xs.begin(), xs.end());
    const std::size_t n = xs.size();
    return n % 2 ? xs[n / 2] : 0.5 * (xs[n / 2 - 1] + xs[n / 2]);
}

Verdict bandit(const Context&) {
    Verdict out;
    const ProblemInstance problem = make_problem("bandit");
    const double optimum = 0.7;
    std::map<std::string, std::vector<double>> regret;
    for (const std::string variant : {"advt", "advt-l0"}) {
        for (std::uint64_t seed = 1; seed <= 20; ++seed) {
            const RunRecord r = run_single(problem, variant, seed, Budget::episodes(5000), 1);
            regret[variant].push_back(std::abs(r.log.front().action[0] - optimum));
        }
    }
    const double advt = median(regret["advt"]);
    const double l0 = median(regret["advt-l0"]);
    out.check(advt <= 0.05, "median |a - 0.7| <= 0.05");
    out.check(advt < l0, "ADVT median regret below ADVT(L=0)");
    out.note("median regret advt " + fmt(advt) + ", advt-l0 " + fmt(l0));
    return out;
}

const SummaryRow* find_row(const std::vector<SummaryRow>& rows, const std::string& variant) {
    for (const SummaryRow& r : rows)
        if (r.variant == variant) return &r;
    return nullptr;
}

std::string describe(const SummaryRow& r) {
    return r.variant + " " + fmt(r.mean, 5) + " +- " + fmt(r.ci95, 4) + " (success " + fmt(r.success_rate, 3) + ")";
}

ExperimentResult run_manifest(const Context& ctx, const std::string& name) {
    const Manifest manifest = load_manifest(fs::path(ADVT_MANIFEST_DIR) / (name + ".json"));
    return run_experiment_to(manifest, ctx.out_dir / name, ctx.workers);
}

Verdict pushbox2d(const Context& ctx) {
    Verdict out;
    const ExperimentResult result = run_manifest(ctx, "acceptance-pushbox2d");
    const SummaryRow* advt = find_row(result.summary, "advt");
    const SummaryRow* grid = find_row(result.summary, "grid16");
    out.check(advt && grid && advt->n == 100 && grid->n == 100, "100 runs per variant");
    if (!advt || !grid) return out;
    out.check(advt->mean - advt->ci95 > grid->mean + grid->ci95, "ADVT CI above grid16 CI");
    out.check(advt->success_rate >= 0.8, "ADVT success >= 0.8");
    out.note(describe(*advt));
    out.note(describe(*grid));
    return out;
}

Verdict ordering(const Context& ctx, const std::string& manifest, const std::string& better,
                 const std::string& worse) {
    Verdict out;
    const ExperimentResult result = run_manifest(ctx, manifest);
    const SummaryRow* a = find_row(result.summary, better);
    const SummaryRow* b = find_row(result.summary, worse);
    out.check(a && b && a->n == 100 && b->n == 100, "100 runs per variant");
    if (!a || !b) return out;
    out.check(a->mean > b->mean, better + " mean above " + worse);
    out.note(describe(*a));
    out.note(describe(*b));
    return out;
}

Verdict parking2d(const Context& ctx) { return ordering(ctx, "acceptance-parking2d", "advt", "advt-mc"); }

Verdict sensorplacement8(const Context& ctx) {
    return ordering(ctx, "acceptance-sensorplacement8", "advt", "advt-r");
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

Verdict determinism(const Context& ctx) {
    Verdict out;
    if (ctx.cli.empty() || !fs::exists(ctx.cli)) {
        out.check(false, "advt CLI not found (pass --cli)");
        return out;
    }
    const fs::path manifest = fs::path(ADVT_MANIFEST_DIR) / "determinism.json";
    struct Invocation {
        std::string name;
        unsigned workers;
    };
    const std::vector<Invocation> runs{{"w1-a", 1}, {"w1-b", 1}, {"w4", 4}};
    std::vector<std::string> runs_csv, summary_csv;
    for (const Invocation& inv : runs) {
        const fs::path dir = ctx.out_dir / "determinism" / inv.name;
        fs::remove_all(dir);
        const std::string command = "\"" + ctx.cli.string() + "\" run --manifest \"" + manifest.string() +
                                    "\" --out \"" + dir.string() + "\" --workers " + std::to_string(inv.workers) +
                                    " > /dev/null";
        const int status = std::system(command.c_str());
        out.check(status == 0, "advt run exit status (" + inv.name + ")");
        runs_csv.push_back(slurp(dir / "runs.csv"));
        summary_csv.push_back(slurp(dir / "summary.csv"));
    }
    out.check(!runs_csv[0].empty(), "runs.csv written");
    for (std::size_t i = 1; i < runs.size(); ++i) {
        out.check(runs_csv[i] == runs_csv[0], "runs.csv identical (" + runs[i].name + ")");
        out.check(summary_csv[i] == summary_csv[0], "summary.csv identical (" + runs[i].name + ")");
    }
    out.note(std::to_string(std::count(runs_csv[0].begin(), runs_csv[0].end(), '\n') - 1) +
             " runs compared across 3 invocations");
    return out;
}

struct Criterion {
    std::string name;
    double limit_seconds;
    std::function<Verdict(const Context&)> run;
};

}  // namespace

int main(int argc, char** argv) {
    const std::vector<Criterion> criteria{
        {"geometry", 60, geometry},
        {"solver", 60, solver},
        {"bandit", 120, bandit},
        {"pushbox2d", 900, pushbox2d},
        {"parking2d", 1200, parking2d},
        {"sensorplacement8", 1500, sensorplacement8},
        {"determinism", 600, determinism},
    };

    CLI::App app{"Acceptance checks"};
    std::vector<std::string> selected;
    Context ctx;
    ctx.out_dir = "acceptance-out";
    ctx.workers = std::max(1u, std::thread::hardware_concurrency());
    app.add_option("--criterion", selected, "Criteria to run (default: all)");
    app.add_option("--cli", ctx.cli, "Path to the advt executable");
    app.add_option("--out", ctx.out_dir, "Directory for experiment CSV output");
    app.add_option("--workers", ctx.workers, "Worker threads for experiments");
    CLI11_PARSE(app, argc, argv);

    for (const std::string& name : selected) {
        const bool known = std::any_of(criteria.begin(), criteria.end(), [&](const Criterion& c) { return c.name == name; });
        if (!known) {
            std::cerr << "unknown criterion '" << name << "'\n";
            return 2;
        }
    }

    bool all_pass = true;
    for (const Criterion& c : criteria) {
        if (!selected.empty() && std::find(selected.begin(), selected.end(), c.name) == selected.end()) continue;
        const auto start = std::chrono::steady_clock::now();
        Verdict result;
        try {
            result = c.run(ctx);
        } catch (const std::exception& e) {
            result.check(false, std::string("exception: ") + e.what());
        }
        const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        result.check(seconds <= c.limit_seconds, "runtime over " + fmt(c.limit_seconds) + " s");
        std::cout << (result.pass ? "PASS " : "FAIL ") << c.name << " (" << fmt(seconds, 3) << " s): " << result.detail
                  << std::endl;
        all_pass = all_pass && result.pass;
    }
    return all_pass ? 0 : 1;
}
