#include "clicks2line/mask.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace c2l {

Image::Image(int w, int h, int c, std::uint8_t fill) : width(w), height(h), channels(c) {
    if (w < 1 || h < 1) {
        throw std::invalid_argument("Image: dimensions must be positive");
    }
    if (c != 1 && c != 3) {
        throw std::invalid_argument("Image: channels must be 1 or 3");
    }
    pixels.assign(static_cast<std::size_t>(w) * h * c, fill);
}

Region make_region(std::vector<Point> pixels) {
    if (pixels.empty()) {
        throw std::invalid_argument("make_region: empty pixel set");
    }
    std::sort(pixels.begin(), pixels.end(),
              [](Point a, Point b) { return a.y != b.y ? a.y < b.y : a.x < b.x; });

    Region r;
    r.bbox = {pixels.front().x, pixels.front().y, pixels.front().x, pixels.front().y};
    double sx = 0.0;
    double sy = 0.0;
    for (const Point p : pixels) {
        r.bbox.x0 = std::min(r.bbox.x0, p.x);
        r.bbox.x1 = std::max(r.bbox.x1, p.x);
        r.bbox.y0 = std::min(r.bbox.y0, p.y);
        r.bbox.y1 = std::max(r.bbox.y1, p.y);
        sx += p.x;
        sy += p.y;
    }
    const double n = static_cast<double>(pixels.size());
    r.cx = sx / n;
    r.cy = sy / n;
    for (const Point p : pixels) {
        const double dx = p.x - r.cx;
        const double dy = p.y - r.cy;
        r.mu20 += dx * dx;
        r.mu02 += dy * dy;
        r.mu11 += dx * dy;
    }
    r.mu20 /= n;
    r.mu02 /= n;
    r.mu11 /= n;
    r.pixels = std::move(pixels);
    return r;
}

BinaryMask region_mask(const Region& region, int width, int height) {
    BinaryMask m(width, height);
    for (const Point p : region.pixels) {
        if (m.contains(p)) {
            m[p] = 1;
        }
    }
    return m;
}

std::size_t count(const BinaryMask& mask) {
    return static_cast<std::size_t>(
        std::count_if(mask.data().begin(), mask.data().end(), [](std::uint8_t v) { return v != 0; }));
}

BinaryMask foreground(const LabelMask& gt) {
    BinaryMask m(gt.width(), gt.height());
    for (std::size_t i = 0; i < gt.size(); ++i) {
        m.data()[i] = gt.data()[i] == Label::Foreground ? 1 : 0;
    }
    return m;
}

std::vector<Region> connected_components(const BinaryMask& mask) {
    const int w = mask.width();
    const int h = mask.height();
    std::vector<std::uint8_t> seen(mask.size(), 0);
    std::vector<Region> regions;
    std::vector<Point> stack;

    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const std::size_t start = mask.index(x, y);
            if (!mask.data()[start] || seen[start]) {
                continue;
            }
            std::vector<Point> pixels;
            seen[start] = 1;
            stack.push_back({x, y});
            while (!stack.empty()) {
                const Point p = stack.back();
                stack.pop_back();
                pixels.push_back(p);
                const Point nbrs[4] = {{p.x - 1, p.y}, {p.x + 1, p.y}, {p.x, p.y - 1}, {p.x, p.y + 1}};
                for (const Point q : nbrs) {
                    if (!mask.contains(q)) {
                        continue;
                    }
                    const std::size_t qi = mask.index(q.x, q.y);
                    if (mask.data()[qi] && !seen[qi]) {
                        seen[qi] = 1;
                        stack.push_back(q);
                    }
                }
            }
            regions.push_back(make_region(std::move(pixels)));
        }
    }

    std::stable_sort(regions.begin(), regions.end(), [](const Region& a, const Region& b) {
        if (a.area() != b.area()) {
            return a.area() > b.area();
        }
        if (a.bbox.y0 != b.bbox.y0) {
            return a.bbox.y0 < b.bbox.y0;
        }
        return a.bbox.x0 < b.bbox.x0;
    });
    return regions;
}

namespace {

// Exact rational used for parabola intersections in the lower-envelope pass.
// den == 0 encodes -inf (num < 0) or +inf (num > 0).
struct Frac {
    std::int64_t num;
    std::int64_t den;
};

bool frac_le(Frac a, Frac b) {
    if (a.den == 0 || b.den == 0) {
        const int ai = a.den == 0 ? (a.num < 0 ? -1 : 1) : 0;
        const int bi = b.den == 0 ? (b.num < 0 ? -1 : 1) : 0;
        if (ai == bi) {
            return true;
        }
        return ai < bi;
    }
    return a.num * b.den <= b.num * a.den;
}

// Lower envelope of parabolas (q - v)^2 + f[v]; writes squared distances to out.
void envelope_1d(std::span<const std::int64_t> f, std::span<std::int64_t> out,
                 std::vector<int>& v, std::vector<Frac>& z) {
    const int n = static_cast<int>(f.size());
    v.assign(n, 0);
    z.assign(n + 1, Frac{0, 0});
    int k = 0;
    v[0] = 0;
    z[0] = {-1, 0};
    z[1] = {1, 0};
    for (int q = 1; q < n; ++q) {
        Frac s{};
        while (true) {
            const int p = v[k];
            s = {(f[q] + std::int64_t{q} * q) - (f[p] + std::int64_t{p} * p), 2 * std::int64_t{q - p}};
            if (k > 0 && frac_le(s, z[k])) {
                --k;
                continue;
            }
            break;
        }
        ++k;
        v[k] = q;
        z[k] = s;
        z[k + 1] = {1, 0};
    }
    k = 0;
    for (int q = 0; q < n; ++q) {
        while (!frac_le(Frac{q, 1}, z[k + 1])) {
            ++k;
        }
        const std::int64_t d = q - v[k];
        out[q] = d * d + f[v[k]];
    }
}

}  // namespace

Field distance_transform(const BinaryMask& mask) {
    const int w = mask.width();
    const int h = mask.height();

    // Column pass: distance to the nearest background pixel in the same column,
    // with rows -1 and h acting as background.
    std::vector<std::int64_t> col(mask.size());
    for (int x = 0; x < w; ++x) {
        std::int64_t run = 0;
        for (int y = 0; y < h; ++y) {
            run = mask(x, y) ? run + 1 : 0;
            col[mask.index(x, y)] = run;
        }
        run = 0;
        for (int y = h - 1; y >= 0; --y) {
            run = mask(x, y) ? run + 1 : 0;
            auto& c = col[mask.index(x, y)];
            c = std::min(c, run);
        }
    }

    // Row pass over sites -1..w; the two outer sites are background.
    Field out(w, h);
    std::vector<std::int64_t> f(w + 2);
    std::vector<std::int64_t> d(w + 2);
    std::vector<int> v;
    std::vector<Frac> z;
    for (int y = 0; y < h; ++y) {
        f[0] = 0;
        f[w + 1] = 0;
        for (int x = 0; x < w; ++x) {
            const std::int64_t g = col[mask.index(x, y)];
            f[x + 1] = g * g;
        }
        envelope_1d(f, d, v, z);
        for (int x = 0; x < w; ++x) {
            out(x, y) = mask(x, y) ? std::sqrt(static_cast<double>(d[x + 1])) : 0.0;
        }
    }
    return out;
}

double iou(const BinaryMask& pred, const LabelMask& gt) {
    if (!pred.same_shape(gt)) {
        throw std::invalid_argument("iou: dimension mismatch");
    }
    std::size_t inter = 0;
    std::size_t uni = 0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        const Label l = gt.data()[i];
        if (l == Label::Ignore) {
            continue;
        }
        const bool p = pred.data()[i] != 0;
        const bool g = l == Label::Foreground;
        inter += (p && g) ? 1 : 0;
        uni += (p || g) ? 1 : 0;
    }
    if (uni == 0) {
        return 1.0;
    }
    return static_cast<double>(inter) / static_cast<double>(uni);
}

double elongation(const Region& region) {
    if (region.area() <= 1) {
        return 1.0;
    }
    // n^2 * covariance in exact integer arithmetic.
    using i128 = __int128;
    i128 n = 0, sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
    for (const Point p : region.pixels) {
        n += 1;
        sx += p.x;
        sy += p.y;
        sxx += static_cast<i128>(p.x) * p.x;
        syy += static_cast<i128>(p.y) * p.y;
        sxy += static_cast<i128>(p.x) * p.y;
    }
    const i128 a = n * sxx - sx * sx;
    const i128 b = n * syy - sy * sy;
    const i128 c = n * sxy - sx * sy;
    const i128 det = a * b - c * c;
    if (det <= 0) {
        return std::numeric_limits<double>::infinity();
    }
    const double ad = static_cast<double>(a);
    const double bd = static_cast<double>(b);
    const double cd = static_cast<double>(c);
    const double half_tr = 0.5 * (ad + bd);
    const double l1 = half_tr + std::hypot(0.5 * (ad - bd), cd);
    const double l2 = static_cast<double>(det) / l1;
    return std::sqrt(l1 / l2);
}

namespace {

std::vector<Point> bresenham(Point p0, Point p1) {
    std::vector<Point> out;
    const int dx = std::abs(p1.x - p0.x);
    const int dy = -std::abs(p1.y - p0.y);
    const int sx = p0.x < p1.x ? 1 : -1;
    const int sy = p0.y < p1.y ? 1 : -1;
    out.reserve(static_cast<std::size_t>(std::max(dx, -dy)) + 1);
    int err = dx + dy;
    Point p = p0;
    while (true) {
        out.push_back(p);
        if (p == p1) {
            break;
        }
        const int e2 = 2 * err;
        if (e2 >= dy) {
            err += dy;
            p.x += sx;
        }
        if (e2 <= dx) {
            err += dx;
            p.y += sy;
        }
    }
    return out;
}

}  // namespace

std::vector<Point> raster_line(Point p0, Point p1) {
    // Always trace from the lexicographically smaller endpoint so that the
    // reversed request yields exactly the reversed pixel list.
    const bool swap = p1.y < p0.y || (p1.y == p0.y && p1.x < p0.x);
    if (!swap) {
        return bresenham(p0, p1);
    }
    auto line = bresenham(p1, p0);
    std::reverse(line.begin(), line.end());
    return line;
}

}  // namespace c2l
