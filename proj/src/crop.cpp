#include "clicks2line/crop.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace c2l {

namespace {

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
    std::int64_t q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) {
        --q;
    }
    return q;
}

}  // namespace

Point CropTransform::to_source(Point crop_px) const {
    // origin + floor((u + 1/2) * side / S)
    const auto map = [&](int u, int origin) {
        return origin + static_cast<int>(floor_div((2 * std::int64_t{u} + 1) * side, 2 * std::int64_t{crop}));
    };
    return {map(crop_px.x, origin_x()), map(crop_px.y, origin_y())};
}

Point CropTransform::to_crop(Point source_px) const {
    // floor((x - origin + 1/2) * S / side)
    const auto map = [&](int x, int origin) {
        return static_cast<int>(floor_div((2 * std::int64_t{x - origin} + 1) * crop, 2 * std::int64_t{side}));
    };
    return {map(source_px.x, origin_x()), map(source_px.y, origin_y())};
}

Point CropTransform::clamp_to_image(Point p) const {
    return {std::clamp(p.x, 0, image_width - 1), std::clamp(p.y, 0, image_height - 1)};
}

CropTransform make_crop_transform(const BBox& bbox, double margin_frac, int crop_side,
                                  int image_width, int image_height) {
    if (image_width < 1 || image_height < 1) {
        throw std::invalid_argument("make_crop_transform: empty image");
    }
    if (bbox.x0 > bbox.x1 || bbox.y0 > bbox.y1 || bbox.x0 < 0 || bbox.y0 < 0 ||
        bbox.x1 >= image_width || bbox.y1 >= image_height) {
        throw std::invalid_argument("make_crop_transform: bbox outside image");
    }
    if (!(margin_frac >= 0.0 && margin_frac < 1.0)) {
        throw std::invalid_argument("make_crop_transform: margin_frac must be in [0, 1)");
    }
    if (crop_side < 8) {
        throw std::invalid_argument("make_crop_transform: crop side must be >= 8");
    }

    const int larger = std::max(bbox.width(), bbox.height());
    int margin = 0;
    if (margin_frac > 0.0) {
        margin = std::max(1, static_cast<int>(std::ceil(margin_frac * larger)));
    }

    CropTransform t;
    t.crop = crop_side;
    t.image_width = image_width;
    t.image_height = image_height;
    t.window = {std::max(0, bbox.x0 - margin), std::max(0, bbox.y0 - margin),
                std::min(image_width - 1, bbox.x1 + margin), std::min(image_height - 1, bbox.y1 + margin)};

    const int min_side = std::max(3, (crop_side + 1) / 2);
    t.side = std::max({t.window.width(), t.window.height(), min_side});
    t.pad_left = (t.side - t.window.width()) / 2;
    t.pad_top = (t.side - t.window.height()) / 2;
    return t;
}

}  // namespace c2l
