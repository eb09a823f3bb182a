#include "advt/problems/shapes.hpp"

#include <algorithm>
#include <cmath>

#include "advt/errors.hpp"

namespace advt {

namespace {

double point_box_sq(std::span<const double> a, std::span<const double> b, double t, const Box& box) {
    double total = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double x = a[i] + t * (b[i] - a[i]);
        const double excess = x < box.lower[i] ? box.lower[i] - x : (x > box.upper[i] ? x - box.upper[i] : 0.0);
        total += excess * excess;
    }
    return total;
}

}  // namespace

bool Box::contains(std::span<const double> p) const {
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (p[i] < lower[i] || p[i] > upper[i]) return false;
    }
    return true;
}

double point_box_distance(std::span<const double> p, const Box& box) {
    require(p.size() == box.lower.size(), "point_box_distance: dimension mismatch");
    return std::sqrt(point_box_sq(p, p, 0.0, box));
}

double segment_point_distance(std::span<const double> a, std::span<const double> b,
                              std::span<const double> p) {
    double ab2 = 0.0, ap_ab = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        ab2 += (b[i] - a[i]) * (b[i] - a[i]);
        ap_ab += (p[i] - a[i]) * (b[i] - a[i]);
    }
    const double t = ab2 > 0.0 ? std::clamp(ap_ab / ab2, 0.0, 1.0) : 0.0;
    double d2 = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double diff = a[i] + t * (b[i] - a[i]) - p[i];
        d2 += diff * diff;
    }
    return std::sqrt(d2);
}

double segment_box_distance(std::span<const double> a, std::span<const double> b, const Box& box) {
    require(a.size() == b.size() && a.size() == box.lower.size(), "segment_box_distance: dimension mismatch");
    if (segment_box_entry(a, b, box)) return 0.0;
    // The squared distance is convex along the segment, so golden-section search is exact
    // up to the bracket width.
    constexpr double kInvPhi = 0.6180339887498949;
    double lo = 0.0, hi = 1.0;
    double x1 = hi - kInvPhi * (hi - lo), x2 = lo + kInvPhi * (hi - lo);
    double f1 = point_box_sq(a, b, x1, box), f2 = point_box_sq(a, b, x2, box);
    for (int it = 0; it < 60; ++it) {
        if (f1 <= f2) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - kInvPhi * (hi - lo);
            f1 = point_box_sq(a, b, x1, box);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + kInvPhi * (hi - lo);
            f2 = point_box_sq(a, b, x2, box);
        }
    }
    const double best = std::min({f1, f2, point_box_sq(a, b, 0.0, box), point_box_sq(a, b, 1.0, box)});
    return std::sqrt(best);
}

std::optional<double> segment_box_entry(std::span<const double> a, std::span<const double> b,
                                        const Box& box) {
    double t_min = 0.0, t_max = 1.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = b[i] - a[i];
        if (d == 0.0) {
            if (a[i] < box.lower[i] || a[i] > box.upper[i]) return std::nullopt;
            continue;
        }
        double t0 = (box.lower[i] - a[i]) / d;
        double t1 = (box.upper[i] - a[i]) / d;
        if (t0 > t1) std::swap(t0, t1);
        t_min = std::max(t_min, t0);
        t_max = std::min(t_max, t1);
        if (t_min > t_max) return std::nullopt;
    }
    return t_min;
}

}  // namespace advt
