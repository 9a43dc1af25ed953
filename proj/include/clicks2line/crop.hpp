#pragma once

#include "clicks2line/mask.hpp"

namespace c2l {

/// Maps between a square source window and an S x S crop canvas.
///
/// The source window is the margin-expanded bbox clamped to the image. It is
/// padded symmetrically to a square of `side` source pixels; the square may
/// extend past the image. Crop pixel u covers source pixels
/// [origin + u * side / S, origin + (u + 1) * side / S). The square side is at
/// least ceil(S / 2), so one source pixel never spans more than two crop pixels
/// and crop -> source -> crop moves a point by at most one crop pixel.
struct CropTransform {
    BBox window;          // clamped, margin-expanded source bbox
    int pad_left = 0;     // source columns added left of window to reach `side`
    int pad_top = 0;      // source rows added above window
    int side = 1;         // source pixels per crop side
    int crop = 1;         // S
    int image_width = 0;
    int image_height = 0;

    int origin_x() const { return window.x0 - pad_left; }
    int origin_y() const { return window.y0 - pad_top; }
    double scale() const { return static_cast<double>(crop) / side; }

    /// Nearest-neighbor source pixel sampled by a crop pixel. May lie outside the image.
    Point to_source(Point crop_px) const;
    /// Crop pixel containing a source pixel's center. May lie outside the canvas.
    Point to_crop(Point source_px) const;

    bool in_image(Point p) const {
        return p.x >= 0 && p.y >= 0 && p.x < image_width && p.y < image_height;
    }
    Point clamp_to_image(Point p) const;
};

/// Expands bbox by ceil(margin_frac * larger side) pixels (at least 1 when
/// margin_frac > 0), clamps to the image, and pads to a square.
CropTransform make_crop_transform(const BBox& bbox, double margin_frac, int crop_side,
                                  int image_width, int image_height);

}  // namespace c2l
