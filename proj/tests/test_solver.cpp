#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "advt/errors.hpp"
#include "advt/solver.hpp"
#include "support/toy_models.hpp"

namespace advt {
namespace {

/// Pays 1 on the first step and nothing after; never terminates.
class FirstStepReward final : public PomdpModel {
public:
    std::string name() const override { return "first-step"; }
    const BoundedMetricSpace& action_space() const override { return space_; }
    double discount() const override { return 0.95; }
    State sample_initial_state(Rng&) const override { return State{{0.0}}; }
    StepResult step(const State& s, std::span<const double>, Rng&) const override {
        return StepResult{State{{s.values[0] + 1.0}}, {}, s.values[0] == 0.0 ? 1.0 : 0.0, false};
    }

private:
    BoundedMetricSpace space_{{0.0}, {1.0}};
};

SolverConfig two_anchor_config() {
    SolverConfig config;
    config.exploration = 0.0;
    config.lipschitz = 0.0;
    config.partition = PartitionMode::fixed;
    config.fixed_actions = {{0.25}, {0.75}};
    config.fixed_cell_diameter = 0.5;
    config.particle_capacity = 16;
    config.max_depth = 10;
    return config;
}

double leaf_q(const BeliefNode& b, int action) {
    return b.actions.node(b.actions.leaf_for_action(action)).q_estimate;
}

long leaf_n(const BeliefNode& b, int action) {
    return b.actions.node(b.actions.leaf_for_action(action)).visit_count;
}

BeliefNode* child_of(const BeliefNode& b, int action) {
    const auto& edges = b.children[static_cast<std::size_t>(action)];
    return edges.empty() ? nullptr : edges.front().child.get();
}

TEST(UcbValue, Examples) {
    EXPECT_EQ(ucb_value(5.0, 0.0, 0.0, 1.0, 1.0, 1.0), std::numeric_limits<double>::infinity());
    EXPECT_EQ(ucb_value(std::exp(1.0), 1.0, 1.0, 2.0, 1.0, 0.5), 3.5);
    EXPECT_EQ(ucb_value(std::exp(1.0), 1.0, 1.0, 2.0, 0.0, 0.5), 3.0);
    EXPECT_THROW(ucb_value(1.0, 2.0, 0.0, 1.0, 1.0, 1.0), ContractViolation);
}

TEST(SelectAction, UnvisitedFirstThenLowestIdOnTies) {
    const testing::TwoStepChain chain;
    SolverConfig config = two_anchor_config();
    config.exploration = 1.0;
    Rng rng(1);
    auto b = make_belief_node(chain, config, rng);
    b->actions.node(b->actions.leaf_for_action(0)).visit_count = 3;
    b->actions.node(b->actions.leaf_for_action(0)).q_estimate = 100.0;
    b->visit_count = 3;
    EXPECT_EQ(select_action(*b, config).action_id, 1);

    b->actions.node(b->actions.leaf_for_action(1)).visit_count = 3;
    b->actions.node(b->actions.leaf_for_action(1)).q_estimate = 100.0;
    b->visit_count = 6;
    EXPECT_EQ(select_action(*b, config).action_id, 0);
}

TEST(SampleEpisode, TerminalStartGivesSingleEntry) {
    const testing::TerminalAtStart model;
    SolverConfig config;
    Rng rng(2);
    auto root = make_root(model, config, rng);
    const Episode e = sample_episode(*root, model, config, rng);
    ASSERT_EQ(e.entries.size(), 1u);
    EXPECT_FALSE(e.entries[0].has_action());
    EXPECT_FALSE(e.created_belief);
    EXPECT_EQ(root->subtree_size(), 1u);
    EXPECT_EQ(root->visit_count, 0);
}

TEST(SampleEpisode, FirstEpisodeCreatesOneBelief) {
    const testing::FuzzModel model;
    SolverConfig config;
    config.particle_capacity = 50;
    Rng rng(3);
    auto root = make_root(model, config, rng);
    const Episode e = sample_episode(*root, model, config, rng);
    EXPECT_TRUE(e.created_belief);
    EXPECT_EQ(e.entries.size(), 2u);
    EXPECT_EQ(root->subtree_size(), 2u);
    EXPECT_FALSE(e.entries.back().has_action());
    EXPECT_EQ(e.entries.back().reward, 0.0);
    EXPECT_EQ(&e.frontier(), child_of(*root, 0));
    EXPECT_EQ(e.frontier().particles.size(), 1u);
}

TEST(RolloutHeuristic, Examples) {
    Rng rng(4);
    const testing::TerminalAtStart terminal;
    EXPECT_EQ(default_rollout_heuristic(terminal.sample_initial_state(rng), terminal, 20, rng), 0.0);
    const testing::TwoStateSensor reward_free(0.5, 0.9);
    EXPECT_EQ(default_rollout_heuristic(State{{1.0}}, reward_free, 20, rng), 0.0);
    const FirstStepReward first;
    EXPECT_EQ(default_rollout_heuristic(State{{0.0}}, first, 20, rng), 1.0);
}

struct ManualEpisode {
    std::unique_ptr<BeliefNode> parent;
    std::unique_ptr<BeliefNode> child;
    Episode episode;
};

ManualEpisode one_level_episode(const SolverConfig& config, double reward, double child_value) {
    const testing::TwoStepChain chain;
    Rng rng(5);
    ManualEpisode m;
    m.parent = make_belief_node(chain, config, rng);
    m.child = make_belief_node(chain, config, rng);
    m.child->value = child_value;
    m.episode.entries.push_back(EpisodeEntry{State{{0.0}}, 0, {}, reward, m.parent.get()});
    m.episode.entries.push_back(EpisodeEntry{State{{1.0}}, -1, {}, 0.0, m.child.get()});
    return m;
}

TEST(Backup, BellmanExamples) {
    const SolverConfig config = two_anchor_config();
    ManualEpisode m = one_level_episode(config, 1.0, 2.0);
    VoronoiNode& leaf = m.parent->actions.node(m.parent->actions.leaf_for_action(0));
    leaf.visit_count = 1;
    backup(m.episode, config, 0.95);
    EXPECT_EQ(leaf.q_estimate, 2.9);
    EXPECT_EQ(m.parent->value, 2.9);

    leaf.visit_count = 2;
    m.episode.entries[0].reward = 0.0;
    m.child->value = 1.0;
    backup(m.episode, config, 0.95);
    EXPECT_EQ(leaf.q_estimate, 2.9 + (0.95 - 2.9) / 2.0);
    EXPECT_DOUBLE_EQ(leaf.q_estimate, 1.925);
}

TEST(Backup, MonteCarloIsRunningMeanOfReturns) {
    SolverConfig config = two_anchor_config();
    config.backup = BackupMode::monte_carlo;
    ManualEpisode m = one_level_episode(config, 2.0, 0.0);
    VoronoiNode& leaf = m.parent->actions.node(m.parent->actions.leaf_for_action(0));
    leaf.visit_count = 1;
    backup(m.episode, config, 0.95);
    EXPECT_EQ(leaf.q_estimate, 2.0);
    leaf.visit_count = 2;
    m.episode.entries[0].reward = 0.0;
    backup(m.episode, config, 0.95);
    EXPECT_EQ(leaf.q_estimate, 1.0);
}

TEST(Backup, UnvisitedActionIsAContractViolation) {
    const SolverConfig config = two_anchor_config();
    ManualEpisode m = one_level_episode(config, 1.0, 0.0);
    EXPECT_THROW(backup(m.episode, config, 0.95), ContractViolation);
}

TEST(RefineAfterBackup, SplitsOnlyWhenTheRuleHolds) {
    const testing::TwoStepChain chain;
    SolverConfig config;
    config.refine_rate = 1.0;
    Rng rng(6);
    auto b = make_belief_node(chain, config, rng);
    const auto params = config.diameter_params(chain.action_space());
    const NodeId root = b->actions.root();
    b->actions.node(root).visit_count = 0;
    EXPECT_FALSE(refine_after_backup(*b, root, config, params, rng));
    EXPECT_EQ(b->actions.leaf_count(), 1u);

    // diam = 1, so C_r * N >= 1 needs N >= 1.
    b->actions.node(root).visit_count = 1;
    EXPECT_TRUE(refine_after_backup(*b, root, config, params, rng));
    EXPECT_EQ(b->actions.leaf_count(), 2u);
    EXPECT_FALSE(refine_after_backup(*b, root, config, params, rng));
    EXPECT_EQ(b->actions.leaf_count(), 2u);

    config.refine_rate = 0.1;
    const NodeId leaf = b->actions.leaf_for_action(1);
    b->actions.node(leaf).diameter = 0.5;
    b->actions.node(leaf).visit_count = 4;
    EXPECT_FALSE(refine_after_backup(*b, leaf, config, params, rng));
    EXPECT_EQ(b->actions.leaf_count(), 2u);
}

TEST(Plan, HandTracedTwoStepChain) {
    const testing::TwoStepChain chain(0.5);
    const SolverConfig config = two_anchor_config();
    const auto params = config.diameter_params(chain.action_space());
    Rng rng(7);
    auto root = make_root(chain, config, rng);
    auto run_episode = [&] {
        const Episode e = sample_episode(*root, chain, config, rng);
        backup_and_refine(e, config, chain.discount(), params, rng);
    };

    run_episode();
    EXPECT_EQ(leaf_q(*root, 0), 0.25);
    EXPECT_EQ(root->value, 0.25);

    run_episode();
    EXPECT_EQ(leaf_q(*root, 1), 0.75);
    EXPECT_EQ(root->value, 0.75);

    run_episode();
    BeliefNode* b1 = child_of(*root, 1);
    ASSERT_NE(b1, nullptr);
    EXPECT_EQ(leaf_q(*b1, 0), 0.75);
    EXPECT_EQ(b1->value, 0.75);
    EXPECT_EQ(leaf_q(*root, 1), 0.9375);

    run_episode();
    EXPECT_EQ(leaf_q(*b1, 1), 0.25);
    EXPECT_EQ(b1->value, 0.75);
    EXPECT_EQ(leaf_q(*root, 1), 1.0);
    EXPECT_EQ(root->value, 1.0);
    EXPECT_EQ(leaf_q(*root, 0), 0.25);
    EXPECT_EQ(leaf_n(*root, 0), 1);
    EXPECT_EQ(leaf_n(*root, 1), 3);
    EXPECT_EQ(root->visit_count, 4);
    EXPECT_EQ(b1->visit_count, 2);
}

void check_invariants(const BeliefNode& b) {
    if (b.visit_count > 0) {
        long sum = 0;
        for (std::size_t id = 0; id < b.actions.action_count(); ++id) sum += leaf_n(b, static_cast<int>(id));
        ASSERT_EQ(sum, b.visit_count);
        ASSERT_EQ(b.value, b.best_visited_q());
    }
    for (const auto& edges : b.children)
        for (const auto& edge : edges) check_invariants(*edge.child);
}

TEST(Plan, CounterAndBellmanConsistencyUnderFuzzing) {
    const testing::FuzzModel model;
    Rng rng(8);
    int episodes = 0;
    for (int session = 0; session < 20; ++session) {
        SolverConfig config;
        config.exploration = uniform(rng, 0.0, 3.0);
        config.lipschitz = uniform(rng, 0.0, 2.0);
        config.refine_rate = uniform(rng, 0.2, 5.0);
        config.max_depth = 1 + static_cast<int>(uniform_index(rng, 8));
        config.particle_capacity = 100;
        config.backup = session % 3 == 0 ? BackupMode::monte_carlo : BackupMode::bellman;
        config.partition = session % 4 == 1 ? PartitionMode::rectangular : PartitionMode::voronoi;
        const auto params = config.diameter_params(model.action_space());
        auto root = make_root(model, config, rng);
        std::size_t candidates = root->actions.action_count();
        for (int i = 0; i < 500; ++i, ++episodes) {
            const Episode e = sample_episode(*root, model, config, rng);
            backup_and_refine(e, config, model.discount(), params, rng);
            check_invariants(*root);
            ASSERT_GE(root->actions.action_count(), candidates);
            candidates = root->actions.action_count();
        }
    }
    EXPECT_EQ(episodes, 10000);
}

TEST(Plan, SingleLeafAndBudgetChecks) {
    const testing::TwoStepChain chain;
    SolverConfig config = two_anchor_config();
    config.fixed_actions = {{0.4}};
    config.budget = Budget::episodes(1);
    Rng rng(9);
    auto root = make_root(chain, config, rng);
    EXPECT_EQ(plan(*root, chain, config, rng).action, (Point{0.4}));

    config.budget = Budget::episodes(0);
    EXPECT_THROW(plan(*root, chain, config, rng), ContractViolation);

    config.budget = Budget::episodes(1);
    config.exploration = -1.0;
    EXPECT_THROW(plan(*root, chain, config, rng), ContractViolation);
}

TEST(Plan, IdenticalSeedsGiveIdenticalActions) {
    const testing::FuzzModel model;
    SolverConfig config;
    config.budget = Budget::episodes(300);
    config.particle_capacity = 200;
    auto run = [&] {
        Rng rng(10);
        auto root = make_root(model, config, rng);
        return plan(*root, model, config, rng).action;
    };
    EXPECT_EQ(run(), run());
}

TEST(AdvanceRoot, ReusesMatchingChild) {
    const testing::TwoStepChain chain;
    const SolverConfig config = two_anchor_config();
    Rng rng(11);
    auto root = make_root(chain, config, rng);
    auto& child = root->add_child(0, ObservationKey{}, make_belief_node(chain, config, rng, root.get()));
    child.visit_count = 37;
    const Point action{0.25};
    AdvanceResult next = advance_root(std::move(root), 0, action, Observation{}, chain, config, rng);
    EXPECT_TRUE(next.reused);
    EXPECT_FALSE(next.depleted);
    EXPECT_EQ(next.root->visit_count, 37);
    EXPECT_EQ(next.root->parent, nullptr);
    EXPECT_EQ(next.root->particles.size(), config.particle_capacity);
}

TEST(AdvanceRoot, FreshRootWhenChildAbsent) {
    const testing::TwoStepChain chain;
    const SolverConfig config = two_anchor_config();
    Rng rng(12);
    auto root = make_root(chain, config, rng);
    root->visit_count = 10;
    AdvanceResult next = advance_root(std::move(root), 1, Point{0.75}, Observation{}, chain, config, rng);
    EXPECT_FALSE(next.reused);
    EXPECT_EQ(next.root->visit_count, 0);
    EXPECT_EQ(next.root->actions.action_count(), 2u);
    for (const State& s : next.root->particles.states()) EXPECT_EQ(s.values[0], 1.0);
}

TEST(AdvanceRoot, DepletionFallsBackToPropagation) {
    const testing::TwoStepChain chain;
    SolverConfig config = two_anchor_config();
    config.filter_attempts = 50;
    Rng rng(13);
    auto root = make_root(chain, config, rng);
    Observation impossible;
    impossible.symbol = 3;
    AdvanceResult next = advance_root(std::move(root), 0, Point{0.25}, impossible, chain, config, rng);
    EXPECT_TRUE(next.depleted);
    EXPECT_FALSE(next.root->particles.empty());
}

}  // namespace
}  // namespace advt
