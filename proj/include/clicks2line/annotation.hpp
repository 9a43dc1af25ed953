#pragma once

#include "clicks2line/mask.hpp"

#include <string_view>
#include <vector>

namespace c2l {

enum class Sign : std::uint8_t { Positive, Negative };
enum class InputKind : std::uint8_t { Click, Line };

/// A signed user input. A line is two clicks joined, so it costs two.
struct Annotation {
    InputKind kind = InputKind::Click;
    Sign sign = Sign::Positive;
    std::vector<Point> points;

    int cost() const { return kind == InputKind::Click ? 1 : 2; }

    static Annotation click(Sign sign, Point p) { return {InputKind::Click, sign, {p}}; }
    static Annotation line(Sign sign, Point a, Point b) { return {InputKind::Line, sign, {a, b}}; }

    friend bool operator==(const Annotation&, const Annotation&) = default;
};

/// Throws std::invalid_argument when the point count does not match the kind
/// or a point falls outside a width x height image.
void validate(const Annotation& a, int width, int height);

/// Pixels covered by an annotation: the click itself or the rasterized line.
std::vector<Point> annotation_pixels(const Annotation& a);

std::string_view to_string(Sign s);
std::string_view to_string(InputKind k);
Sign parse_sign(std::string_view s);
InputKind parse_kind(std::string_view s);

}  // namespace c2l
