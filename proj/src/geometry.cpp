#include "advt/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <list>
#include <numeric>

#include <Eigen/Dense>

#include "advt/errors.hpp"

namespace advt {

BoundedMetricSpace::BoundedMetricSpace(std::vector<double> lower, std::vector<double> upper)
    : lower_(std::move(lower)), upper_(std::move(upper)), outer_diameter_(0.0) {
    require(!lower_.empty(), "BoundedMetricSpace: dimension must be positive");
    require(lower_.size() == upper_.size(), "BoundedMetricSpace: bound dimension mismatch");
    for (std::size_t i = 0; i < lower_.size(); ++i) {
        require(std::isfinite(lower_[i]) && std::isfinite(upper_[i]),
                "BoundedMetricSpace: bounds must be finite");
        require(lower_[i] < upper_[i], "BoundedMetricSpace: degenerate width in dimension " +
                                           std::to_string(i));
    }
    outer_diameter_ = distance(lower_, upper_);
}

bool BoundedMetricSpace::contains(std::span<const double> x) const {
    if (x.size() != lower_.size()) return false;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] >= lower_[i] && x[i] <= upper_[i])) return false;
    }
    return true;
}

Point BoundedMetricSpace::clamp(std::span<const double> x) const {
    Point out(x.begin(), x.end());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::clamp(out[i], lower_[i], upper_[i]);
    return out;
}

double squared_distance(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) {
        throw ContractViolation("distance: dimension mismatch (" + std::to_string(x.size()) + " vs " +
                                std::to_string(y.size()) + ")");
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double d = x[i] - y[i];
        sum += d * d;
    }
    return sum;
}

double distance(std::span<const double> x, std::span<const double> y) {
    return std::sqrt(squared_distance(x, y));
}

Point sample_uniform_box(const BoundedMetricSpace& space, Rng& rng) {
    Point p(space.dimension());
    for (std::size_t i = 0; i < p.size(); ++i) p[i] = uniform(rng, space.lower()[i], space.upper()[i]);
    return p;
}

Point sample_sphere_point(std::span<const double> center, double diameter, Rng& rng) {
    require(diameter > 0.0, "sample_sphere_point: diameter must be positive");
    const double radius = 0.5 * diameter;
    Point dir(center.size());
    double norm = 0.0;
    while (norm < 1e-12) {
        norm = 0.0;
        for (double& v : dir) {
            v = gaussian(rng, 0.0, 1.0);
            norm += v * v;
        }
        norm = std::sqrt(norm);
    }
    Point out(center.begin(), center.end());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += radius * dir[i] / norm;
    return out;
}

Point bisect_boundary_point(std::span<const double> inside, std::span<const double> outside,
                            const CellMembershipOracle& cell, double tolerance) {
    require(tolerance > 0.0, "bisect_boundary_point: tolerance must be positive");
    require(cell(inside), "bisect_boundary_point: inside endpoint is not a cell member");
    require(!cell(outside), "bisect_boundary_point: outside endpoint is a cell member");
    Point in(inside.begin(), inside.end());
    Point out(outside.begin(), outside.end());
    Point mid(in.size());
    const double tol2 = tolerance * tolerance;
    while (squared_distance(in, out) >= tol2) {
        for (std::size_t i = 0; i < mid.size(); ++i) mid[i] = 0.5 * (in[i] + out[i]);
        if (cell(mid)) {
            in.swap(mid);
        } else {
            out.swap(mid);
        }
    }
    return in;
}

namespace {

// Largest t >= 0 with from + t * dir still inside the box.
double ray_exit_parameter(std::span<const double> from, std::span<const double> dir,
                          const BoundedMetricSpace& space) {
    double t = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < from.size(); ++i) {
        if (dir[i] > 0.0) {
            t = std::min(t, (space.upper()[i] - from[i]) / dir[i]);
        } else if (dir[i] < 0.0) {
            t = std::min(t, (space.lower()[i] - from[i]) / dir[i]);
        }
    }
    return std::max(0.0, t);
}

}  // namespace

Point sample_boundary_point(std::span<const double> from, const CellMembershipOracle& cell,
                            const BoundedMetricSpace& space, double tolerance, Rng& rng) {
    require(cell(from), "sample_boundary_point: start point is not a cell member");
    Point probe = sample_sphere_point(from, space.outer_diameter(), rng);
    if (!cell(probe)) return bisect_boundary_point(from, probe, cell, tolerance);

    Point dir(from.size());
    for (std::size_t i = 0; i < dir.size(); ++i) dir[i] = probe[i] - from[i];
    const double t = ray_exit_parameter(from, dir, space);
    Point face(from.size());
    for (std::size_t i = 0; i < face.size(); ++i) face[i] = from[i] + t * dir[i];
    face = space.clamp(face);
    if (cell(face)) return face;
    return bisect_boundary_point(probe, face, cell, tolerance);
}

std::vector<Point> sample_boundary_set(std::span<const double> anchor,
                                       const CellMembershipOracle& cell,
                                       const BoundedMetricSpace& space, std::size_t count,
                                       double tolerance, Rng& rng) {
    require(cell(anchor), "sample_boundary_set: anchor is not a cell member");
    std::vector<Point> points;
    points.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        points.push_back(sample_boundary_point(anchor, cell, space, tolerance, rng));
    }
    return points;
}

Point ascend_boundary_point(std::span<const double> start, std::span<const double> direction,
                            const CellMembershipOracle& cell, const BoundedMetricSpace& space,
                            double tolerance) {
    require(start.size() == direction.size(), "ascend_boundary_point: dimension mismatch");
    std::vector<std::size_t> axes(start.size());
    std::iota(axes.begin(), axes.end(), std::size_t{0});
    std::stable_sort(axes.begin(), axes.end(), [&](std::size_t a, std::size_t b) {
        return std::abs(direction[a]) > std::abs(direction[b]);
    });

    Point x(start.begin(), start.end());
    for (std::size_t axis : axes) {
        if (direction[axis] == 0.0) continue;
        const double bound = direction[axis] > 0.0 ? space.upper()[axis] : space.lower()[axis];
        if (std::abs(bound - x[axis]) < tolerance) continue;
        Point far = x;
        far[axis] = bound;
        if (cell(far)) {
            x = std::move(far);
        } else {
            x = bisect_boundary_point(x, far, cell, tolerance);
        }
    }
    return x;
}

namespace {

// Gärtner's move-to-front miniball. Support points define the ball via the circumsphere
// within their affine hull.
class MoveToFrontBall {
public:
    explicit MoveToFrontBall(std::span<const Point> points)
        : points_(points), dim_(points.front().size()) {
        for (std::size_t i = 0; i < points.size(); ++i) order_.push_back(i);
        center_.assign(dim_, 0.0);
        support_.reserve(dim_ + 1);
        solve(order_.end());
    }

    Ball ball() const { return Ball{center_, std::sqrt(std::max(0.0, radius2_))}; }

private:
    bool covers(const Point& p) const {
        if (radius2_ < 0.0) return false;
        const double d2 = squared_distance(p, center_);
        return d2 <= radius2_ * (1.0 + 1e-12) + 1e-24;
    }

    void circumball() {
        const std::size_t s = support_.size();
        if (s == 0) {
            radius2_ = -1.0;
            return;
        }
        const Point& p0 = points_[support_[0]];
        if (s == 1) {
            center_ = p0;
            radius2_ = 0.0;
            return;
        }
        // Small systems stay on the stack; this runs for every boundary-set ball.
        constexpr int kStack = 16;
        if (dim_ <= kStack) {
            solve_circumcentre<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, kStack, kStack>,
                               Eigen::Matrix<double, Eigen::Dynamic, 1, 0, kStack, 1>>(p0);
        } else {
            solve_circumcentre<Eigen::MatrixXd, Eigen::VectorXd>(p0);
        }
        for (std::size_t j = 1; j < s; ++j) {
            radius2_ = std::max(radius2_, squared_distance(points_[support_[j]], center_));
        }
    }

    template <typename Matrix, typename Vector>
    void solve_circumcentre(const Point& p0) {
        const std::size_t m = support_.size() - 1;
        Matrix q(dim_, m);
        for (std::size_t j = 0; j < m; ++j) {
            const Point& pj = points_[support_[j + 1]];
            for (std::size_t i = 0; i < dim_; ++i) q(i, j) = pj[i] - p0[i];
        }
        const Matrix gram = 2.0 * q.transpose() * q;
        Vector rhs(m);
        for (std::size_t j = 0; j < m; ++j) rhs(j) = q.col(j).squaredNorm();
        // Cholesky when the support is affinely independent; the rank-revealing solve only for
        // nearly degenerate support sets.
        Vector lambda;
        const Eigen::LLT<Matrix> llt(gram);
        const auto pivots = llt.matrixLLT().diagonal();
        if (llt.info() == Eigen::Success && pivots.minCoeff() > 1e-6 * pivots.maxCoeff()) {
            lambda = llt.solve(rhs);
        } else {
            lambda = gram.completeOrthogonalDecomposition().solve(rhs);
        }
        const Vector offset = q * lambda;
        for (std::size_t i = 0; i < dim_; ++i) center_[i] = p0[i] + offset(i);
        radius2_ = offset.squaredNorm();
    }

    void solve(std::list<std::size_t>::iterator end) {
        circumball();
        if (support_.size() == dim_ + 1) return;
        for (auto it = order_.begin(); it != end;) {
            auto next = std::next(it);
            if (!covers(points_[*it])) {
                support_.push_back(*it);
                solve(it);
                support_.pop_back();
                order_.splice(order_.begin(), order_, it);
            }
            it = next;
        }
    }

    std::span<const Point> points_;
    std::size_t dim_;
    std::list<std::size_t> order_;
    std::vector<std::size_t> support_;
    Point center_;
    double radius2_ = -1.0;
};

Ball approximate_ball(std::span<const Point> points) {
    auto farthest_from = [&](const Point& from) {
        std::size_t best = 0;
        double best_d = -1.0;
        for (std::size_t i = 0; i < points.size(); ++i) {
            const double d = squared_distance(points[i], from);
            if (d > best_d) {
                best_d = d;
                best = i;
            }
        }
        return best;
    };
    const Point& a = points[farthest_from(points.front())];
    const Point& b = points[farthest_from(a)];
    Ball ball;
    ball.center.resize(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) ball.center[i] = 0.5 * (a[i] + b[i]);
    ball.radius = 0.5 * distance(a, b);
    for (int pass = 0; pass < 2; ++pass) {
        for (const Point& p : points) {
            const double d = distance(p, ball.center);
            if (d <= ball.radius) continue;
            const double grown = 0.5 * (ball.radius + d);
            const double shift = (d - grown) / d;
            for (std::size_t i = 0; i < p.size(); ++i) ball.center[i] += shift * (p[i] - ball.center[i]);
            ball.radius = grown;
        }
    }
    return ball;
}

}  // namespace

Ball min_enclosing_ball(std::span<const Point> points) {
    require(!points.empty(), "min_enclosing_ball: point set is empty");
    const std::size_t dim = points.front().size();
    for (const Point& p : points) require(p.size() == dim, "min_enclosing_ball: dimension mismatch");
    if (points.size() > kExactBallLimit) return approximate_ball(points);
    return MoveToFrontBall(points).ball();
}

double min_enclosing_ball_diameter(std::span<const Point> points) {
    return min_enclosing_ball(points).diameter();
}

double estimate_cell_diameter(std::span<const double> anchor, const CellMembershipOracle& cell,
                              const BoundedMetricSpace& space, std::size_t boundary_samples,
                              double tolerance, Rng& rng, BoundaryRefinement refinement) {
    std::vector<Point> points =
        sample_boundary_set(anchor, cell, space, boundary_samples, tolerance, rng);
    if (refinement == BoundaryRefinement::coordinate_ascent) {
        Point direction(anchor.size());
        for (Point& p : points) {
            for (std::size_t i = 0; i < direction.size(); ++i) direction[i] = p[i] - anchor[i];
            p = ascend_boundary_point(p, direction, cell, space, tolerance);
        }
    }
    points.emplace_back(anchor.begin(), anchor.end());
    const double diameter = min_enclosing_ball_diameter(points);
    // A cell thinner than the tolerance still gets a positive size.
    return std::max(diameter, tolerance);
}

Point hit_and_run_sample(std::span<const double> anchor, const CellMembershipOracle& cell,
                         const BoundedMetricSpace& space, std::size_t steps, double tolerance,
                         Rng& rng) {
    require(steps >= 1, "hit_and_run_sample: step count must be at least 1");
    require(cell(anchor), "hit_and_run_sample: anchor is not a cell member");
    Point x(anchor.begin(), anchor.end());
    Point candidate(x.size());
    for (std::size_t step = 0; step < steps; ++step) {
        const Point target = sample_boundary_point(x, cell, space, tolerance, rng);
        const double fraction = uniform01(rng);
        for (std::size_t i = 0; i < x.size(); ++i) candidate[i] = x[i] + fraction * (target[i] - x[i]);
        if (cell(candidate)) x = candidate;
    }
    return x;
}

DiameterParams DiameterParams::defaults_for(const BoundedMetricSpace& space) {
    DiameterParams params;
    params.boundary_samples = std::max<std::size_t>(32, 8 * space.dimension());
    params.tolerance = 1e-3 * space.outer_diameter();
    params.walk_steps = 10;
    return params;
}

}  // namespace advt
