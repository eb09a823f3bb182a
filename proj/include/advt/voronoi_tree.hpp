#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "advt/geometry.hpp"
#include "advt/random.hpp"

namespace advt {

enum class PartitionMode {
    voronoi,      ///< two-anchor Voronoi splits (ADVT)
    rectangular,  ///< longest-side midpoint cuts (ADVT-R)
    fixed,        ///< a predetermined anchor set that is never refined
};

using NodeId = int;
inline constexpr NodeId kNoNode = -1;

/// Node (a, P) of a Voronoi tree. The cell P is implicit: it is the set of points whose
/// root-to-leaf descent reaches this node.
struct VoronoiNode {
    Point anchor;
    int action_id = -1;
    long visit_count = 0;
    double q_estimate = 0.0;
    double diameter = 0.0;
    NodeId parent = kNoNode;
    NodeId first = kNoNode;
    NodeId second = kNoNode;
    // Rectangular mode only.
    Point rect_lower;
    Point rect_upper;

    bool is_leaf() const { return first == kNoNode; }
};

struct Candidate {
    const Point* anchor;
    NodeId leaf;
    int action_id;
};

/// Per-belief hierarchical partition of the action space. Leaves carry the candidate
/// actions A(b) and their statistics N(b,a), Q(b,a). Action ids are dense, assigned in
/// insertion order, and survive splits: the first child keeps its parent's id.
///
/// The space must outlive the tree.
class VoronoiTree {
public:
    /// Root (a, A) with a drawn uniformly from the space.
    static VoronoiTree create(const BoundedMetricSpace& space, PartitionMode mode, Rng& rng);

    /// Tree whose leaves are exactly `anchors` (in order) with the given cell diameter.
    static VoronoiTree fixed(const BoundedMetricSpace& space, std::span<const Point> anchors,
                             double cell_diameter);

    const BoundedMetricSpace& space() const { return *space_; }
    PartitionMode mode() const { return mode_; }

    NodeId root() const { return 0; }
    const VoronoiNode& node(NodeId id) const { return nodes_[static_cast<std::size_t>(id)]; }
    VoronoiNode& node(NodeId id) { return nodes_[static_cast<std::size_t>(id)]; }
    std::size_t node_count() const { return nodes_.size(); }

    std::size_t leaf_count() const { return leaf_of_action_.size(); }
    std::size_t action_count() const { return leaf_of_action_.size(); }
    NodeId leaf_for_action(int action_id) const {
        return leaf_of_action_[static_cast<std::size_t>(action_id)];
    }

    /// Leaf whose cell contains x. Ties on a bisector go to the first child.
    NodeId locate_leaf(std::span<const double> x) const;

    /// Membership predicate for the cell of `id` (leaf or internal).
    CellMembershipOracle cell_oracle(NodeId id) const;

    /// Splits a leaf, sampling the new anchor inside its cell. Returns (first, second).
    std::pair<NodeId, NodeId> split_leaf(NodeId leaf, Rng& rng, const DiameterParams& params);

    /// Splits a leaf with a caller-supplied second anchor (Voronoi mode only).
    std::pair<NodeId, NodeId> split_leaf_at(NodeId leaf, Point new_anchor, Rng& rng,
                                            const DiameterParams& params);

    /// Leaf anchors in action-id order.
    std::vector<Candidate> candidate_actions() const;

private:
    VoronoiTree(const BoundedMetricSpace& space, PartitionMode mode)
        : space_(&space), mode_(mode) {}

    bool descends_first(NodeId parent, std::span<const double> x) const;
    std::pair<NodeId, NodeId> attach_children(NodeId leaf, Point new_anchor);
    std::pair<NodeId, NodeId> split_rectangular(NodeId leaf, Rng& rng);

    const BoundedMetricSpace* space_;
    PartitionMode mode_;
    std::vector<VoronoiNode> nodes_;
    std::vector<NodeId> leaf_of_action_;
};

/// Refinement rule: C_r * N(b,a) >= 1 / diam(P)^2.
bool should_refine(const VoronoiNode& leaf, double refine_rate);

}  // namespace advt
