#include "advt/solver.hpp"

#include <chrono>
#include <cmath>
#include <limits>

#include "advt/errors.hpp"

namespace advt {

void SolverConfig::validate() const {
    require(exploration >= 0.0, "SolverConfig: exploration constant C must be >= 0");
    require(lipschitz >= 0.0, "SolverConfig: Lipschitz constant L must be >= 0");
    require(refine_rate > 0.0, "SolverConfig: refinement constant C_r must be > 0");
    require(max_depth >= 1, "SolverConfig: max_depth must be >= 1");
    require(rollout_depth >= 0, "SolverConfig: rollout_depth must be >= 0");
    require(particle_capacity >= 1, "SolverConfig: particle_capacity must be >= 1");
    if (partition == PartitionMode::fixed) {
        require(!fixed_actions.empty(), "SolverConfig: fixed partition needs fixed_actions");
        require(fixed_cell_diameter > 0.0, "SolverConfig: fixed_cell_diameter must be > 0");
    }
}

DiameterParams SolverConfig::diameter_params(const BoundedMetricSpace& space) const {
    return geometry ? *geometry : DiameterParams::defaults_for(space);
}

BeliefNode::BeliefNode(VoronoiTree tree, std::size_t particle_capacity, BeliefNode* parent_node)
    : parent(parent_node), particles(particle_capacity), actions(std::move(tree)) {}

BeliefNode* BeliefNode::find_child(int action_id, const Observation& o, bool terminal,
                                   const ObservationMode& mode) const {
    const auto index = static_cast<std::size_t>(action_id);
    if (index >= children.size()) return nullptr;
    for (const ObservationEdge& edge : children[index]) {
        if (observation_matches(edge.key, o, terminal, mode)) return edge.child.get();
    }
    return nullptr;
}

BeliefNode& BeliefNode::add_child(int action_id, ObservationKey key, std::unique_ptr<BeliefNode> child) {
    const auto index = static_cast<std::size_t>(action_id);
    if (index >= children.size()) children.resize(index + 1);
    child->parent = this;
    children[index].push_back(ObservationEdge{std::move(key), std::move(child)});
    return *children[index].back().child;
}

std::unique_ptr<BeliefNode> BeliefNode::detach_child(int action_id, const Observation& o, bool terminal,
                                                     const ObservationMode& mode) {
    const auto index = static_cast<std::size_t>(action_id);
    if (index >= children.size()) return nullptr;
    for (ObservationEdge& edge : children[index]) {
        if (observation_matches(edge.key, o, terminal, mode)) {
            std::unique_ptr<BeliefNode> out = std::move(edge.child);
            out->parent = nullptr;
            return out;
        }
    }
    return nullptr;
}

double BeliefNode::best_visited_q() const {
    double best = -std::numeric_limits<double>::infinity();
    bool any = false;
    for (std::size_t id = 0; id < actions.action_count(); ++id) {
        const VoronoiNode& leaf = actions.node(actions.leaf_for_action(static_cast<int>(id)));
        if (leaf.visit_count <= 0) continue;
        if (!any || leaf.q_estimate > best) best = leaf.q_estimate;
        any = true;
    }
    return any ? best : value;
}

std::size_t BeliefNode::subtree_size() const {
    std::size_t total = 1;
    for (const auto& edges : children) {
        for (const ObservationEdge& edge : edges) {
            if (edge.child) total += edge.child->subtree_size();
        }
    }
    return total;
}

double ucb_value(double parent_visits, double visits, double q_estimate, double exploration,
                 double lipschitz, double diameter) {
    require(visits >= 0.0 && parent_visits >= visits, "ucb_value: requires N(b) >= N(b,a) >= 0");
    if (visits == 0.0) return std::numeric_limits<double>::infinity();
    return q_estimate + exploration * std::sqrt(std::log(parent_visits) / visits) + lipschitz * diameter;
}

SelectedAction select_action(const BeliefNode& belief, const SolverConfig& config) {
    const VoronoiTree& tree = belief.actions;
    require(tree.action_count() >= 1, "select_action: belief has no candidate actions");
    SelectedAction best;
    double best_value = -std::numeric_limits<double>::infinity();
    const auto parent_visits = static_cast<double>(belief.visit_count);
    for (std::size_t id = 0; id < tree.action_count(); ++id) {
        const NodeId leaf = tree.leaf_for_action(static_cast<int>(id));
        const VoronoiNode& node = tree.node(leaf);
        if (node.visit_count == 0) return SelectedAction{static_cast<int>(id), leaf};
        const double u = ucb_value(parent_visits, static_cast<double>(node.visit_count), node.q_estimate,
                                   config.exploration, config.lipschitz, node.diameter);
        if (best.action_id < 0 || u > best_value) {
            best_value = u;
            best = SelectedAction{static_cast<int>(id), leaf};
        }
    }
    return best;
}

std::unique_ptr<BeliefNode> make_belief_node(const PomdpModel& model, const SolverConfig& config,
                                             Rng& rng, BeliefNode* parent) {
    const BoundedMetricSpace& space = model.action_space();
    VoronoiTree tree = config.partition == PartitionMode::fixed
                           ? VoronoiTree::fixed(space, config.fixed_actions, config.fixed_cell_diameter)
                           : VoronoiTree::create(space, config.partition, rng);
    return std::make_unique<BeliefNode>(std::move(tree), config.particle_capacity, parent);
}

std::unique_ptr<BeliefNode> make_root(const PomdpModel& model, const SolverConfig& config, Rng& rng) {
    auto root = make_belief_node(model, config, rng);
    for (std::size_t i = 0; i < config.particle_capacity; ++i) {
        root->particles.add(model.sample_initial_state(rng), rng);
    }
    return root;
}

double default_rollout_heuristic(const State& state, const PomdpModel& model, int rollout_depth,
                                 Rng& rng) {
    const double discount = model.discount();
    double total = 0.0;
    double weight = 1.0;
    State s = state;
    for (int t = 0; t < rollout_depth && !model.is_terminal(s); ++t) {
        const Point a = sample_uniform_box(model.action_space(), rng);
        StepResult result = model.step(s, a, rng);
        total += weight * result.reward;
        weight *= discount;
        s = std::move(result.next);
    }
    return total;
}

namespace {

double frontier_value(const State& s, const PomdpModel& model, const SolverConfig& config, Rng& rng) {
    if (model.is_terminal(s)) return 0.0;
    if (auto h = model.heuristic_value(s)) return *h;
    return default_rollout_heuristic(s, model, config.rollout_depth, rng);
}

template <typename AfterLevel>
void reverse_pass(const Episode& episode, const SolverConfig& config, double discount,
                  AfterLevel&& after_level) {
    const auto& entries = episode.entries;
    if (entries.size() < 2) return;
    double tail = episode.frontier().value;
    for (std::size_t i = entries.size() - 1; i-- > 0;) {
        const EpisodeEntry& entry = entries[i];
        const BeliefNode& child = *entries[i + 1].belief;
        double target = 0.0;
        if (config.backup == BackupMode::bellman) {
            target = entry.reward + discount * child.value;
        } else {
            tail = entry.reward + discount * tail;
            target = tail;
        }
        backup_entry(*entry.belief, entry.action_id, target);
        after_level(*entry.belief, entry.action_id);
    }
}

}  // namespace

Episode sample_episode(BeliefNode& root, const PomdpModel& model, const SolverConfig& config, Rng& rng) {
    require(!root.particles.empty(), "sample_episode: root belief has no particles");
    const ObservationMode mode = model.observation_mode();
    Episode episode;
    BeliefNode* belief = &root;
    State s = root.particles.sample(rng);
    bool created = false;
    int depth = 0;
    while (!created && !model.is_terminal(s) && depth < config.max_depth) {
        const SelectedAction selected = select_action(*belief, config);
        VoronoiNode& leaf = belief->actions.node(selected.leaf);
        StepResult result = model.step(s, leaf.anchor, rng);

        ++leaf.visit_count;
        ++belief->visit_count;

        BeliefNode* child = belief->find_child(selected.action_id, result.observation, result.terminal, mode);
        if (child == nullptr) {
            child = &belief->add_child(selected.action_id,
                                       make_observation_key(result.observation, result.terminal, mode),
                                       make_belief_node(model, config, rng, belief));
            created = true;
        }
        child->particles.add(result.next, rng);

        episode.entries.push_back(EpisodeEntry{std::move(s), selected.action_id,
                                               std::move(result.observation), result.reward, belief});
        s = std::move(result.next);
        belief = child;
        ++depth;
    }
    if (created) belief->value = frontier_value(s, model, config, rng);
    episode.entries.push_back(EpisodeEntry{std::move(s), -1, Observation{}, 0.0, belief});
    episode.created_belief = created;
    return episode;
}

void backup_entry(BeliefNode& belief, int action_id, double target) {
    VoronoiNode& leaf = belief.actions.node(belief.actions.leaf_for_action(action_id));
    require(leaf.visit_count >= 1, "backup_entry: action has not been visited");
    leaf.q_estimate += (target - leaf.q_estimate) / static_cast<double>(leaf.visit_count);
    belief.value = belief.best_visited_q();
}

void backup(const Episode& episode, const SolverConfig& config, double discount) {
    reverse_pass(episode, config, discount, [](BeliefNode&, int) {});
}

bool refine_after_backup(BeliefNode& belief, NodeId leaf, const SolverConfig& config,
                         const DiameterParams& params, Rng& rng) {
    if (config.partition == PartitionMode::fixed) return false;
    const VoronoiNode& node = belief.actions.node(leaf);
    if (!node.is_leaf()) return false;
    if (!should_refine(node, config.refine_rate)) return false;
    belief.actions.split_leaf(leaf, rng, params);
    return true;
}

void backup_and_refine(const Episode& episode, const SolverConfig& config, double discount,
                       const DiameterParams& params, Rng& rng) {
    reverse_pass(episode, config, discount, [&](BeliefNode& belief, int action_id) {
        refine_after_backup(belief, belief.actions.leaf_for_action(action_id), config, params, rng);
    });
}

SelectedAction best_action(const BeliefNode& root, BestActionRule rule) {
    SelectedAction best;
    double best_score = -std::numeric_limits<double>::infinity();
    const VoronoiTree& tree = root.actions;
    for (std::size_t id = 0; id < tree.action_count(); ++id) {
        const NodeId leaf = tree.leaf_for_action(static_cast<int>(id));
        const VoronoiNode& node = tree.node(leaf);
        if (node.visit_count <= 0) continue;
        const double score =
            rule == BestActionRule::max_q ? node.q_estimate : static_cast<double>(node.visit_count);
        if (best.action_id < 0 || score > best_score) {
            best_score = score;
            best = SelectedAction{static_cast<int>(id), leaf};
        }
    }
    return best;
}

PlanResult plan(BeliefNode& root, const PomdpModel& model, const SolverConfig& config, Rng& rng) {
    config.validate();
    require(!root.particles.empty(), "plan: root belief has no particles");
    require(config.budget.iterations > 0 || config.budget.milliseconds > 0.0,
            "plan: planning budget is zero");
    const DiameterParams params = config.diameter_params(model.action_space());
    const double discount = model.discount();

    using Clock = std::chrono::steady_clock;
    const auto start = Clock::now();
    const auto deadline = start + std::chrono::duration_cast<Clock::duration>(
                                      std::chrono::duration<double, std::milli>(config.budget.milliseconds));
    PlanResult result;
    while (true) {
        if (config.budget.iterations > 0) {
            if (result.episodes >= config.budget.iterations) break;
        } else if (result.episodes > 0 && Clock::now() >= deadline) {
            break;
        }
        const Episode episode = sample_episode(root, model, config, rng);
        backup_and_refine(episode, config, discount, params, rng);
        ++result.episodes;
    }

    const SelectedAction chosen = best_action(root, config.best_action);
    if (chosen.action_id < 0) {
        throw ContractViolation("plan: no action statistics at the root (terminal particles only?)");
    }
    result.action_id = chosen.action_id;
    result.action = root.actions.node(chosen.leaf).anchor;
    return result;
}

AdvanceResult advance_root(std::unique_ptr<BeliefNode> root, int action_id,
                           std::span<const double> executed_action, const Observation& observed,
                           const PomdpModel& model, const SolverConfig& config, Rng& rng) {
    require(root != nullptr, "advance_root: null root");
    require(action_id >= 0 && static_cast<std::size_t>(action_id) < root->actions.action_count(),
            "advance_root: executed action is not a root candidate");
    const std::size_t attempts =
        config.filter_attempts > 0 ? config.filter_attempts : 100 * root->particles.capacity();

    AdvanceResult out;
    ParticleSet posterior(root->particles.capacity());
    try {
        posterior = filter_particles(root->particles, executed_action, observed, model, attempts, rng);
    } catch (const ParticleDepletion&) {
        posterior = propagate_particles(root->particles, executed_action, model, rng);
        out.depleted = true;
    }

    out.root = root->detach_child(action_id, observed, false, model.observation_mode());
    if (out.root) {
        out.reused = true;
    } else {
        out.root = make_belief_node(model, config, rng);
    }
    out.root->particles = std::move(posterior);
    return out;
}

}  // namespace advt
