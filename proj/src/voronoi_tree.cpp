#include "advt/voronoi_tree.hpp"

#include <cmath>

#include "advt/errors.hpp"

namespace advt {

namespace {

bool in_rect(const VoronoiNode& n, std::span<const double> x) {
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i] < n.rect_lower[i] || x[i] > n.rect_upper[i]) return false;
    }
    return true;
}

}  // namespace

VoronoiTree VoronoiTree::create(const BoundedMetricSpace& space, PartitionMode mode, Rng& rng) {
    require(mode != PartitionMode::fixed, "VoronoiTree::create: use VoronoiTree::fixed for fixed anchors");
    VoronoiTree tree(space, mode);
    VoronoiNode root;
    root.anchor = sample_uniform_box(space, rng);
    root.action_id = 0;
    root.diameter = space.outer_diameter();
    if (mode == PartitionMode::rectangular) {
        root.rect_lower.assign(space.lower().begin(), space.lower().end());
        root.rect_upper.assign(space.upper().begin(), space.upper().end());
    }
    tree.nodes_.push_back(std::move(root));
    tree.leaf_of_action_.push_back(0);
    return tree;
}

VoronoiTree VoronoiTree::fixed(const BoundedMetricSpace& space, std::span<const Point> anchors,
                               double cell_diameter) {
    require(!anchors.empty(), "VoronoiTree::fixed: anchor set is empty");
    require(cell_diameter > 0.0, "VoronoiTree::fixed: cell diameter must be positive");
    VoronoiTree tree(space, PartitionMode::fixed);
    VoronoiNode root;
    require(space.contains(anchors[0]), "VoronoiTree::fixed: anchor outside the action space");
    root.anchor = anchors[0];
    root.action_id = 0;
    root.diameter = cell_diameter;
    tree.nodes_.push_back(std::move(root));
    tree.leaf_of_action_.push_back(0);
    for (std::size_t i = 1; i < anchors.size(); ++i) {
        require(space.contains(anchors[i]), "VoronoiTree::fixed: anchor outside the action space");
        const NodeId leaf = tree.locate_leaf(anchors[i]);
        require(tree.node(leaf).anchor != anchors[i], "VoronoiTree::fixed: duplicate anchor");
        auto [first, second] = tree.attach_children(leaf, anchors[i]);
        tree.node(first).diameter = cell_diameter;
        tree.node(second).diameter = cell_diameter;
    }
    return tree;
}

bool VoronoiTree::descends_first(NodeId parent, std::span<const double> x) const {
    const VoronoiNode& p = node(parent);
    const VoronoiNode& first = node(p.first);
    if (mode_ == PartitionMode::rectangular) return in_rect(first, x);
    const VoronoiNode& second = node(p.second);
    return squared_distance(x, first.anchor) <= squared_distance(x, second.anchor);
}

NodeId VoronoiTree::locate_leaf(std::span<const double> x) const {
    require(space_->contains(x), "locate_leaf: point outside the action space");
    NodeId id = root();
    while (!node(id).is_leaf()) id = descends_first(id, x) ? node(id).first : node(id).second;
    return id;
}

CellMembershipOracle VoronoiTree::cell_oracle(NodeId id) const {
    std::vector<std::pair<NodeId, bool>> path;
    for (NodeId child = id, parent = node(id).parent; parent != kNoNode;
         child = parent, parent = node(parent).parent) {
        path.emplace_back(parent, node(parent).first == child);
    }
    if (mode_ != PartitionMode::voronoi) {
        return [this, path = std::move(path)](std::span<const double> x) {
            if (!space_->contains(x)) return false;
            for (auto it = path.rbegin(); it != path.rend(); ++it) {
                if (descends_first(it->first, x) != it->second) return false;
            }
            return true;
        };
    }
    // Hot path of diameter estimation: copy the sibling anchors root-first into one buffer.
    // The comparison is the same d1 <= d2 test as descends_first, so both agree bit for bit.
    const std::size_t dim = space_->dimension();
    std::vector<double> anchors;
    std::vector<char> take_first;
    anchors.reserve(2 * dim * path.size());
    for (auto it = path.rbegin(); it != path.rend(); ++it) {
        const VoronoiNode& p = node(it->first);
        anchors.insert(anchors.end(), node(p.first).anchor.begin(), node(p.first).anchor.end());
        anchors.insert(anchors.end(), node(p.second).anchor.begin(), node(p.second).anchor.end());
        take_first.push_back(it->second ? 1 : 0);
    }
    return [this, dim, anchors = std::move(anchors), take_first = std::move(take_first)](
               std::span<const double> x) {
        if (!space_->contains(x)) return false;
        const double* a = anchors.data();
        for (char first : take_first) {
            const double* b = a + dim;
            double d1 = 0.0;
            double d2 = 0.0;
            for (std::size_t i = 0; i < dim; ++i) {
                const double u = x[i] - a[i];
                d1 += u * u;
            }
            for (std::size_t i = 0; i < dim; ++i) {
                const double v = x[i] - b[i];
                d2 += v * v;
            }
            if ((d1 <= d2) != static_cast<bool>(first)) return false;
            a = b + dim;
        }
        return true;
    };
}

std::pair<NodeId, NodeId> VoronoiTree::attach_children(NodeId leaf, Point new_anchor) {
    const NodeId first = static_cast<NodeId>(nodes_.size());
    const NodeId second = first + 1;

    VoronoiNode a;
    a.anchor = node(leaf).anchor;
    a.action_id = node(leaf).action_id;
    a.visit_count = node(leaf).visit_count;
    a.q_estimate = node(leaf).q_estimate;
    a.diameter = node(leaf).diameter;
    a.parent = leaf;

    VoronoiNode b;
    b.anchor = std::move(new_anchor);
    b.action_id = static_cast<int>(leaf_of_action_.size());
    b.diameter = node(leaf).diameter;
    b.parent = leaf;

    nodes_.push_back(std::move(a));
    nodes_.push_back(std::move(b));
    node(leaf).first = first;
    node(leaf).second = second;
    leaf_of_action_[static_cast<std::size_t>(node(first).action_id)] = first;
    leaf_of_action_.push_back(second);
    return {first, second};
}

std::pair<NodeId, NodeId> VoronoiTree::split_leaf(NodeId leaf, Rng& rng,
                                                  const DiameterParams& params) {
    require(node(leaf).is_leaf(), "split_leaf: node is not a leaf");
    if (mode_ == PartitionMode::rectangular) return split_rectangular(leaf, rng);
    require(mode_ == PartitionMode::voronoi, "split_leaf: fixed partitions are never refined");

    const CellMembershipOracle cell = cell_oracle(leaf);
    const Point anchor = node(leaf).anchor;
    Point candidate;
    for (int attempt = 0; attempt < 8; ++attempt) {
        candidate = hit_and_run_sample(anchor, cell, *space_, params.walk_steps, params.tolerance, rng);
        if (candidate != anchor) break;
    }
    if (candidate == anchor) {
        candidate = sample_boundary_point(anchor, cell, *space_, params.tolerance, rng);
    }
    return split_leaf_at(leaf, std::move(candidate), rng, params);
}

std::pair<NodeId, NodeId> VoronoiTree::split_leaf_at(NodeId leaf, Point new_anchor, Rng& rng,
                                                     const DiameterParams& params) {
    require(mode_ == PartitionMode::voronoi, "split_leaf_at: only Voronoi partitions take a forced anchor");
    require(node(leaf).is_leaf(), "split_leaf_at: node is not a leaf");
    require(new_anchor.size() == space_->dimension(), "split_leaf_at: anchor dimension mismatch");
    require(cell_oracle(leaf)(new_anchor), "split_leaf_at: new anchor outside the leaf cell");
    require(new_anchor != node(leaf).anchor, "split_leaf_at: new anchor equals the leaf anchor");

    auto [first, second] = attach_children(leaf, std::move(new_anchor));
    const Point a1 = node(first).anchor;
    const Point a2 = node(second).anchor;
    const double d1 = estimate_cell_diameter(a1, cell_oracle(first), *space_, params.boundary_samples,
                                             params.tolerance, rng, params.refinement);
    const double d2 = estimate_cell_diameter(a2, cell_oracle(second), *space_, params.boundary_samples,
                                             params.tolerance, rng, params.refinement);
    node(first).diameter = d1;
    node(second).diameter = d2;
    return {first, second};
}

std::pair<NodeId, NodeId> VoronoiTree::split_rectangular(NodeId leaf, Rng& rng) {
    const VoronoiNode& cell = node(leaf);
    std::size_t axis = 0;
    double longest = -1.0;
    for (std::size_t i = 0; i < cell.rect_lower.size(); ++i) {
        const double width = cell.rect_upper[i] - cell.rect_lower[i];
        if (width > longest) {
            longest = width;
            axis = i;
        }
    }
    const double mid = 0.5 * (cell.rect_lower[axis] + cell.rect_upper[axis]);

    Point low_lower = cell.rect_lower, low_upper = cell.rect_upper;
    Point high_lower = cell.rect_lower, high_upper = cell.rect_upper;
    low_upper[axis] = mid;
    high_lower[axis] = mid;
    const bool anchor_low = cell.anchor[axis] <= mid;

    Point& other_lower = anchor_low ? high_lower : low_lower;
    Point& other_upper = anchor_low ? high_upper : low_upper;
    Point new_anchor(other_lower.size());
    for (std::size_t i = 0; i < new_anchor.size(); ++i) {
        new_anchor[i] = uniform(rng, other_lower[i], other_upper[i]);
    }

    auto [first, second] = attach_children(leaf, std::move(new_anchor));
    VoronoiNode& a = node(first);
    VoronoiNode& b = node(second);
    a.rect_lower = anchor_low ? low_lower : high_lower;
    a.rect_upper = anchor_low ? low_upper : high_upper;
    b.rect_lower = anchor_low ? high_lower : low_lower;
    b.rect_upper = anchor_low ? high_upper : low_upper;
    a.diameter = distance(a.rect_lower, a.rect_upper);
    b.diameter = distance(b.rect_lower, b.rect_upper);
    return {first, second};
}

std::vector<Candidate> VoronoiTree::candidate_actions() const {
    std::vector<Candidate> out;
    out.reserve(leaf_of_action_.size());
    for (std::size_t id = 0; id < leaf_of_action_.size(); ++id) {
        const NodeId leaf = leaf_of_action_[id];
        out.push_back(Candidate{&node(leaf).anchor, leaf, static_cast<int>(id)});
    }
    return out;
}

bool should_refine(const VoronoiNode& leaf, double refine_rate) {
    if (leaf.visit_count <= 0) return false;
    return refine_rate * static_cast<double>(leaf.visit_count) >= 1.0 / (leaf.diameter * leaf.diameter);
}

}  // namespace advt
