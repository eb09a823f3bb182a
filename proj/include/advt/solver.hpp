#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "advt/geometry.hpp"
#include "advt/pomdp.hpp"
#include "advt/random.hpp"
#include "advt/voronoi_tree.hpp"

namespace advt {

enum class BackupMode { bellman, monte_carlo };
enum class BestActionRule { max_q, max_visits };

/// Planning budget: a fixed episode count, or wall-clock milliseconds when `iterations` is 0.
struct Budget {
    std::size_t iterations = 1000;
    double milliseconds = 0.0;

    static Budget episodes(std::size_t n) { return Budget{n, 0.0}; }
    static Budget wall_clock_ms(double ms) { return Budget{0, ms}; }
};

struct SolverConfig {
    double exploration = 1.0;   ///< C
    double lipschitz = 1.0;     ///< L; zero gives plain UCB1
    double refine_rate = 1.0;   ///< C_r
    std::optional<DiameterParams> geometry;  ///< defaults derived from the action space
    int max_depth = 50;
    Budget budget;
    BackupMode backup = BackupMode::bellman;
    PartitionMode partition = PartitionMode::voronoi;
    int rollout_depth = 20;
    BestActionRule best_action = BestActionRule::max_q;
    std::size_t particle_capacity = 2000;
    std::size_t filter_attempts = 0;  ///< 0 means 100 * particle_capacity

    /// PartitionMode::fixed only.
    std::vector<Point> fixed_actions;
    double fixed_cell_diameter = 1.0;

    void validate() const;
    DiameterParams diameter_params(const BoundedMetricSpace& space) const;
};

class BeliefNode;

struct ObservationEdge {
    ObservationKey key;
    std::unique_ptr<BeliefNode> child;
};

/// Node b of the belief tree. Owns its Voronoi tree H(b) and its children, which are
/// grouped by action id and keyed by observation below that.
class BeliefNode {
public:
    BeliefNode(VoronoiTree actions, std::size_t particle_capacity, BeliefNode* parent = nullptr);

    BeliefNode* parent = nullptr;
    ParticleSet particles;
    long visit_count = 0;
    double value = 0.0;  ///< V*(b)
    VoronoiTree actions;
    std::vector<std::vector<ObservationEdge>> children;

    BeliefNode* find_child(int action_id, const Observation& o, bool terminal,
                           const ObservationMode& mode) const;
    BeliefNode& add_child(int action_id, ObservationKey key, std::unique_ptr<BeliefNode> child);
    std::unique_ptr<BeliefNode> detach_child(int action_id, const Observation& o, bool terminal,
                                             const ObservationMode& mode);

    /// Max Q over candidates that have been played; unchanged value if none has.
    double best_visited_q() const;

    std::size_t subtree_size() const;
};

struct EpisodeEntry {
    State state;
    int action_id = -1;  ///< -1 on the final entry
    Observation observation;
    double reward = 0.0;
    BeliefNode* belief = nullptr;

    bool has_action() const { return action_id >= 0; }
};

/// (s, a, o, r) tuples of one simulation; the last entry is (s, -, -, 0) and its belief is
/// the frontier node.
struct Episode {
    std::vector<EpisodeEntry> entries;
    bool created_belief = false;

    BeliefNode& frontier() const { return *entries.back().belief; }
};

/// Q + C sqrt(log N_b / N_ba) + L diam, or +infinity for an unplayed action.
double ucb_value(double parent_visits, double visits, double q_estimate, double exploration,
                 double lipschitz, double diameter);

struct SelectedAction {
    int action_id = -1;
    NodeId leaf = kNoNode;
};

/// argmax of ucb_value over the candidate actions; ties go to the lowest action id.
SelectedAction select_action(const BeliefNode& belief, const SolverConfig& config);

std::unique_ptr<BeliefNode> make_belief_node(const PomdpModel& model, const SolverConfig& config,
                                             Rng& rng, BeliefNode* parent = nullptr);

/// Fresh root whose particles are drawn from the model's initial belief.
std::unique_ptr<BeliefNode> make_root(const PomdpModel& model, const SolverConfig& config, Rng& rng);

/// Discounted return of one uniformly random trajectory from `state`.
double default_rollout_heuristic(const State& state, const PomdpModel& model, int rollout_depth,
                                 Rng& rng);

Episode sample_episode(BeliefNode& root, const PomdpModel& model, const SolverConfig& config,
                       Rng& rng);

/// Q(b,a) <- Q(b,a) + (target - Q(b,a)) / N(b,a), then V*(b) <- max_a Q(b,a).
void backup_entry(BeliefNode& belief, int action_id, double target);

/// Reverse pass over an episode without refinement.
void backup(const Episode& episode, const SolverConfig& config, double discount);

/// Splits the leaf if the refinement rule holds. Internal nodes and fixed partitions are
/// left alone. Returns whether a split happened.
bool refine_after_backup(BeliefNode& belief, NodeId leaf, const SolverConfig& config,
                         const DiameterParams& params, Rng& rng);

/// Reverse pass that refines H(b) for the played action at every level.
void backup_and_refine(const Episode& episode, const SolverConfig& config, double discount,
                       const DiameterParams& params, Rng& rng);

struct PlanResult {
    Point action;
    int action_id = -1;
    std::size_t episodes = 0;
};

PlanResult plan(BeliefNode& root, const PomdpModel& model, const SolverConfig& config, Rng& rng);

/// Candidate chosen for execution after planning.
SelectedAction best_action(const BeliefNode& root, BestActionRule rule);

struct AdvanceResult {
    std::unique_ptr<BeliefNode> root;
    bool depleted = false;
    bool reused = false;
};

/// Moves the root to tau(b, a, o), reusing the matching subtree when one exists.
AdvanceResult advance_root(std::unique_ptr<BeliefNode> root, int action_id,
                           std::span<const double> executed_action, const Observation& observed,
                           const PomdpModel& model, const SolverConfig& config, Rng& rng);

}  // namespace advt
