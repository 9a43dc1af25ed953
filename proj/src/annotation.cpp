#include "clicks2line/annotation.hpp"

#include <stdexcept>
#include <string>

namespace c2l {

void validate(const Annotation& a, int width, int height) {
    const std::size_t expected = a.kind == InputKind::Click ? 1 : 2;
    if (a.points.size() != expected) {
        throw std::invalid_argument(std::string(to_string(a.kind)) + " annotation needs " +
                                    std::to_string(expected) + " point(s), got " +
                                    std::to_string(a.points.size()));
    }
    for (const Point p : a.points) {
        if (p.x < 0 || p.y < 0 || p.x >= width || p.y >= height) {
            throw std::invalid_argument("annotation point (" + std::to_string(p.x) + ", " +
                                        std::to_string(p.y) + ") outside " + std::to_string(width) +
                                        "x" + std::to_string(height) + " image");
        }
    }
}

std::vector<Point> annotation_pixels(const Annotation& a) {
    if (a.kind == InputKind::Line && a.points.size() == 2) {
        return raster_line(a.points[0], a.points[1]);
    }
    return a.points;
}

std::string_view to_string(Sign s) { return s == Sign::Positive ? "pos" : "neg"; }

std::string_view to_string(InputKind k) { return k == InputKind::Click ? "click" : "line"; }

Sign parse_sign(std::string_view s) {
    if (s == "pos") {
        return Sign::Positive;
    }
    if (s == "neg") {
        return Sign::Negative;
    }
    throw std::invalid_argument("unknown sign '" + std::string(s) + "'");
}

InputKind parse_kind(std::string_view s) {
    if (s == "click") {
        return InputKind::Click;
    }
    if (s == "line") {
        return InputKind::Line;
    }
    throw std::invalid_argument("unknown annotation kind '" + std::string(s) + "'");
}

}  // namespace c2l
