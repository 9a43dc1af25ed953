#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace c2l {

/// Pixel address: x is the column, y the row.
struct Point {
    int x = 0;
    int y = 0;

    friend bool operator==(const Point&, const Point&) = default;
};

/// Inclusive axis-aligned pixel bounds.
struct BBox {
    int x0 = 0;
    int y0 = 0;
    int x1 = 0;
    int y1 = 0;

    int width() const { return x1 - x0 + 1; }
    int height() const { return y1 - y0 + 1; }
    bool contains(Point p) const { return p.x >= x0 && p.x <= x1 && p.y >= y0 && p.y <= y1; }

    friend bool operator==(const BBox&, const BBox&) = default;
};

/// Row-major raster of width*height cells.
template <typename T>
class Grid {
public:
    Grid() = default;

    Grid(int width, int height, T fill = T{}) : width_(width), height_(height) {
        if (width < 1 || height < 1) {
            throw std::invalid_argument("Grid: dimensions must be positive, got " +
                                        std::to_string(width) + "x" + std::to_string(height));
        }
        data_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill);
    }

    int width() const { return width_; }
    int height() const { return height_; }
    std::size_t size() const { return data_.size(); }
    bool empty() const { return data_.empty(); }

    bool contains(Point p) const { return p.x >= 0 && p.y >= 0 && p.x < width_ && p.y < height_; }
    bool same_shape(const auto& other) const {
        return width_ == other.width() && height_ == other.height();
    }

    std::size_t index(int x, int y) const {
        return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
               static_cast<std::size_t>(x);
    }

    T& operator()(int x, int y) { return data_[index(x, y)]; }
    const T& operator()(int x, int y) const { return data_[index(x, y)]; }
    T& operator[](Point p) { return data_[index(p.x, p.y)]; }
    const T& operator[](Point p) const { return data_[index(p.x, p.y)]; }

    std::span<T> data() { return data_; }
    std::span<const T> data() const { return data_; }

    friend bool operator==(const Grid&, const Grid&) = default;

private:
    int width_ = 0;
    int height_ = 0;
    std::vector<T> data_;
};

/// 0 = background, 1 = foreground.
using BinaryMask = Grid<std::uint8_t>;

enum class Label : std::uint8_t { Background = 0, Foreground = 1, Ignore = 2 };

using LabelMask = Grid<Label>;
using Field = Grid<double>;

/// 8-bit image, 1 (gray) or 3 (RGB) interleaved channels.
struct Image {
    int width = 0;
    int height = 0;
    int channels = 1;
    std::vector<std::uint8_t> pixels;

    Image() = default;
    Image(int w, int h, int c, std::uint8_t fill = 0);

    std::uint8_t at(int x, int y, int c = 0) const {
        return pixels[(static_cast<std::size_t>(y) * width + x) * channels + c];
    }
    std::uint8_t& at(int x, int y, int c = 0) {
        return pixels[(static_cast<std::size_t>(y) * width + x) * channels + c];
    }

    friend bool operator==(const Image&, const Image&) = default;
};

/// A 4-connected set of pixels with its shape statistics.
struct Region {
    std::vector<Point> pixels;  // scan order (y, then x)
    BBox bbox;
    double cx = 0.0;
    double cy = 0.0;
    // Central second moments of pixel coordinates, normalized by area.
    double mu20 = 0.0;
    double mu02 = 0.0;
    double mu11 = 0.0;

    std::size_t area() const { return pixels.size(); }
};

/// Builds a Region from a nonempty pixel set; pixels are sorted into scan order.
Region make_region(std::vector<Point> pixels);

/// Rasterizes a region into a mask of the given size.
BinaryMask region_mask(const Region& region, int width, int height);

std::size_t count(const BinaryMask& mask);

/// Foreground pixels of a label mask (ignore counts as not-foreground).
BinaryMask foreground(const LabelMask& gt);

/// 4-connected components, largest area first, ties by bbox (y0, x0).
std::vector<Region> connected_components(const BinaryMask& mask);

/// Exact Euclidean distance from each foreground pixel to the nearest background pixel.
/// Everything outside the image counts as background.
Field distance_transform(const BinaryMask& mask);

/// IoU of pred against the GT foreground over the non-ignore domain; 1.0 when both are empty.
double iou(const BinaryMask& pred, const LabelMask& gt);

/// sqrt(l1 / l2) of the coordinate covariance eigenvalues; 1 for a single pixel, +inf when
/// the region is collinear.
double elongation(const Region& region);

/// 8-connected Bresenham segment, endpoints inclusive. rasterize(b, a) == reverse(rasterize(a, b)).
std::vector<Point> raster_line(Point p0, Point p1);

}  // namespace c2l
