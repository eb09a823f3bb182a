#pragma once

#include <optional>
#include <span>
#include <vector>

namespace advt {

/// Axis-aligned box.
struct Box {
    std::vector<double> lower;
    std::vector<double> upper;

    bool contains(std::span<const double> p) const;
};

double point_box_distance(std::span<const double> p, const Box& box);
double segment_point_distance(std::span<const double> a, std::span<const double> b,
                              std::span<const double> p);
double segment_box_distance(std::span<const double> a, std::span<const double> b, const Box& box);

/// Smallest t in [0,1] with a + t(b-a) inside the closed box (slab test).
std::optional<double> segment_box_entry(std::span<const double> a, std::span<const double> b,
                                        const Box& box);

}  // namespace advt
