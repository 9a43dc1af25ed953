#include "clicks2line/synth.hpp"

#include "clicks2line/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <stdexcept>

namespace c2l {

namespace fs = std::filesystem;

std::string_view to_string(ShapeKind k) { return k == ShapeKind::Bar ? "bars" : "blobs"; }

std::vector<ShapeKind> parse_kinds(std::string_view list) {
    std::vector<ShapeKind> kinds;
    while (!list.empty()) {
        const auto comma = list.find(',');
        const std::string_view item = list.substr(0, comma);
        if (item == "bars" || item == "bar") {
            kinds.push_back(ShapeKind::Bar);
        } else if (item == "blobs" || item == "blob") {
            kinds.push_back(ShapeKind::Blob);
        } else if (!item.empty()) {
            throw std::invalid_argument("unknown shape kind '" + std::string(item) + "' (expected bars, blobs)");
        }
        if (comma == std::string_view::npos) {
            break;
        }
        list.remove_prefix(comma + 1);
    }
    if (kinds.empty()) {
        throw std::invalid_argument("no shape kinds given");
    }
    return kinds;
}

namespace {

constexpr int kMaxAttempts = 200;

BinaryMask draw_bar(Rng& rng, const SynthParams& p) {
    const int s = p.size;
    const double aspect = rng.uniform(p.min_aspect, p.max_aspect);
    double width = rng.uniform(p.min_bar_width, p.max_bar_width);
    double length = aspect * width;
    const double max_length = 0.8 * s;
    if (length > max_length) {
        length = max_length;
        width = length / aspect;
    }
    const double theta = rng.uniform(0.0, std::numbers::pi);
    const double c = std::cos(theta);
    const double sn = std::sin(theta);
    const double hx = std::abs(0.5 * length * c) + std::abs(0.5 * width * sn);
    const double hy = std::abs(0.5 * length * sn) + std::abs(0.5 * width * c);
    const double cx = rng.uniform(hx + 3.0, s - 4.0 - hx);
    const double cy = rng.uniform(hy + 3.0, s - 4.0 - hy);

    BinaryMask m(s, s);
    for (int y = 0; y < s; ++y) {
        for (int x = 0; x < s; ++x) {
            const double dx = x - cx;
            const double dy = y - cy;
            const double along = dx * c + dy * sn;
            const double across = -dx * sn + dy * c;
            if (std::abs(along) <= 0.5 * length && std::abs(across) <= 0.5 * width) {
                m(x, y) = 1;
            }
        }
    }
    return m;
}

void add_ellipse(BinaryMask& m, double cx, double cy, double a, double b, double theta) {
    const double c = std::cos(theta);
    const double sn = std::sin(theta);
    for (int y = 0; y < m.height(); ++y) {
        for (int x = 0; x < m.width(); ++x) {
            const double dx = x - cx;
            const double dy = y - cy;
            const double u = (dx * c + dy * sn) / a;
            const double v = (-dx * sn + dy * c) / b;
            if (u * u + v * v <= 1.0) {
                m(x, y) = 1;
            }
        }
    }
}

BinaryMask draw_blob(Rng& rng, const SynthParams& p) {
    const int s = p.size;
    BinaryMask m(s, s);
    const int n = rng.integer(1, 3);
    const double a0 = rng.uniform(8.0, 18.0);
    add_ellipse(m, rng.uniform(0.35 * s, 0.65 * s), rng.uniform(0.35 * s, 0.65 * s), a0,
                a0 * rng.uniform(0.5, 1.0), rng.uniform(0.0, std::numbers::pi));
    for (int i = 1; i < n; ++i) {
        std::vector<Point> inside;
        for (int y = 0; y < s; ++y) {
            for (int x = 0; x < s; ++x) {
                if (m(x, y)) {
                    inside.push_back({x, y});
                }
            }
        }
        const Point c = inside[static_cast<std::size_t>(rng.integer(0, static_cast<int>(inside.size()) - 1))];
        const double a = rng.uniform(6.0, 14.0);
        add_ellipse(m, c.x, c.y, a, a * rng.uniform(0.5, 1.0), rng.uniform(0.0, std::numbers::pi));
    }
    return m;
}

bool touches_border(const BinaryMask& m) {
    for (int x = 0; x < m.width(); ++x) {
        if (m(x, 0) || m(x, m.height() - 1)) {
            return true;
        }
    }
    for (int y = 0; y < m.height(); ++y) {
        if (m(0, y) || m(m.width() - 1, y)) {
            return true;
        }
    }
    return false;
}

}  // namespace

SynthInstance make_instance(std::uint64_t seed, ShapeKind kind, int index, const SynthParams& params) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(kind), static_cast<std::uint32_t>(index)};
    Rng rng(seq);

    BinaryMask mask;
    for (int attempt = 0;; ++attempt) {
        if (attempt == kMaxAttempts) {
            throw std::runtime_error("make_instance: could not satisfy shape constraints");
        }
        mask = kind == ShapeKind::Bar ? draw_bar(rng, params) : draw_blob(rng, params);
        const auto regions = connected_components(mask);
        if (regions.size() != 1 || touches_border(mask)) {
            continue;
        }
        const double e = elongation(regions.front());
        if (kind == ShapeKind::Bar ? e >= 5.0 : e < params.max_blob_elongation) {
            break;
        }
    }

    const int background = rng.integer(params.min_background, params.max_background);
    const int contrast = rng.integer(params.min_contrast, params.max_contrast);
    Image image(params.size, params.size, 1);
    for (int y = 0; y < params.size; ++y) {
        for (int x = 0; x < params.size; ++x) {
            const int base = mask(x, y) ? background + contrast : background;
            const int noise = params.noise > 0 ? rng.integer(-params.noise, params.noise) : 0;
            image.at(x, y) = static_cast<std::uint8_t>(std::clamp(base + noise, 0, 255));
        }
    }

    char id[32];
    std::snprintf(id, sizeof id, "%s_%03d", kind == ShapeKind::Bar ? "bar" : "blob", index);
    return {id, std::move(image), std::move(mask)};
}

std::vector<std::string> gen_synthetic(const fs::path& out, std::uint64_t seed, int count,
                                       const std::vector<ShapeKind>& kinds, const SynthParams& params) {
    if (count < 1) {
        throw std::invalid_argument("gen_synthetic: count must be >= 1");
    }
    if (kinds.empty()) {
        throw std::invalid_argument("gen_synthetic: no shape kinds");
    }
    fs::create_directories(out / "images");
    fs::create_directories(out / "masks");
    std::vector<std::string> ids;
    for (const ShapeKind kind : kinds) {
        for (int i = 0; i < count; ++i) {
            SynthInstance inst = make_instance(seed, kind, i, params);
            write_png(out / "images" / (inst.id + ".png"), inst.image);
            write_png(out / "masks" / (inst.id + ".png"), mask_to_image(inst.mask));
            ids.push_back(std::move(inst.id));
        }
    }
    return ids;
}

}  // namespace c2l
