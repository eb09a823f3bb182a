#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "advt/random.hpp"

namespace advt {

using Point = std::vector<double>;

/// Axis-aligned box in R^D with the Euclidean metric. This is the action space A.
class BoundedMetricSpace {
public:
    BoundedMetricSpace(std::vector<double> lower, std::vector<double> upper);

    std::size_t dimension() const { return lower_.size(); }
    std::span<const double> lower() const { return lower_; }
    std::span<const double> upper() const { return upper_; }

    /// Euclidean length of (upper - lower).
    double outer_diameter() const { return outer_diameter_; }

    /// Closed-box membership.
    bool contains(std::span<const double> x) const;

    /// Clamps x into the box.
    Point clamp(std::span<const double> x) const;

private:
    std::vector<double> lower_;
    std::vector<double> upper_;
    double outer_diameter_;
};

/// Deterministic membership predicate of an implicit cell.
using CellMembershipOracle = std::function<bool(std::span<const double>)>;

double distance(std::span<const double> x, std::span<const double> y);
double squared_distance(std::span<const double> x, std::span<const double> y);

Point sample_uniform_box(const BoundedMetricSpace& space, Rng& rng);

/// Uniform point on the sphere of the given diameter around `center`.
Point sample_sphere_point(std::span<const double> center, double diameter, Rng& rng);

/// Bisects the segment [inside, outside] until the endpoints are closer than `tolerance`
/// and returns the endpoint that is still a member of the cell.
Point bisect_boundary_point(std::span<const double> inside, std::span<const double> outside,
                            const CellMembershipOracle& cell, double tolerance);

/// One boundary point reached from `from` along a uniformly random direction. The probe
/// sphere has diameter space.outer_diameter(); a probe that stays inside the cell is
/// extended along its ray to the box face.
Point sample_boundary_point(std::span<const double> from, const CellMembershipOracle& cell,
                            const BoundedMetricSpace& space, double tolerance, Rng& rng);

std::vector<Point> sample_boundary_set(std::span<const double> anchor,
                                       const CellMembershipOracle& cell,
                                       const BoundedMetricSpace& space, std::size_t count,
                                       double tolerance, Rng& rng);

/// Moves a boundary point towards the extreme point of the cell in `direction` by
/// shooting axis-parallel rays along sign(direction[i]), largest component first.
Point ascend_boundary_point(std::span<const double> start, std::span<const double> direction,
                            const CellMembershipOracle& cell, const BoundedMetricSpace& space,
                            double tolerance);

struct Ball {
    Point center;
    double radius = 0.0;

    double diameter() const { return 2.0 * radius; }
};

/// Smallest enclosing ball. Exact move-to-front recursion up to kExactBallLimit points,
/// a grow-only approximation above that.
Ball min_enclosing_ball(std::span<const Point> points);
double min_enclosing_ball_diameter(std::span<const Point> points);

inline constexpr std::size_t kExactBallLimit = 10000;

enum class BoundaryRefinement { none, coordinate_ascent };

double estimate_cell_diameter(std::span<const double> anchor, const CellMembershipOracle& cell,
                              const BoundedMetricSpace& space, std::size_t boundary_samples,
                              double tolerance, Rng& rng,
                              BoundaryRefinement refinement = BoundaryRefinement::coordinate_ascent);

/// Random walk inside the cell: `steps` moves, each a uniform fraction of the way towards a
/// freshly sampled boundary point.
Point hit_and_run_sample(std::span<const double> anchor, const CellMembershipOracle& cell,
                         const BoundedMetricSpace& space, std::size_t steps, double tolerance,
                         Rng& rng);

/// Boundary sample count k, bisection tolerance and Hit & Run step count m.
struct DiameterParams {
    std::size_t boundary_samples = 32;
    double tolerance = 1e-3;
    std::size_t walk_steps = 10;
    BoundaryRefinement refinement = BoundaryRefinement::coordinate_ascent;

    /// k = max(32, 8D), tolerance = 1e-3 * outer diameter, m = 10.
    static DiameterParams defaults_for(const BoundedMetricSpace& space);
};

}  // namespace advt
