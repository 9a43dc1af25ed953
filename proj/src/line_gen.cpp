#include "clicks2line/line_gen.hpp"

#include "clicks2line/io.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <tuple>

namespace c2l {

void CandidateParams::validate() const {
    if (n_theta < 4) {
        throw std::invalid_argument("CandidateParams: n_theta must be >= 4");
    }
    if (n_rho < 3) {
        throw std::invalid_argument("CandidateParams: n_rho must be >= 3");
    }
    if (crop < 8) {
        throw std::invalid_argument("CandidateParams: crop side must be >= 8");
    }
}

std::vector<Point> chord(double theta, double rho, int crop) {
    constexpr double eps = 1e-12;
    const double dx = std::cos(theta);
    const double dy = std::sin(theta);
    const double half = crop / 2.0;
    const double px = half - rho * dy;
    const double py = half + rho * dx;
    const double lo = 0.0;
    const double hi = crop - 1.0;

    // Liang-Barsky clip of p + t * d against [lo, hi]^2.
    double t0 = -std::numeric_limits<double>::infinity();
    double t1 = std::numeric_limits<double>::infinity();
    const auto clip = [&](double p, double d) {
        if (std::abs(d) < eps) {
            return p >= lo && p <= hi;
        }
        double a = (lo - p) / d;
        double b = (hi - p) / d;
        if (a > b) {
            std::swap(a, b);
        }
        t0 = std::max(t0, a);
        t1 = std::min(t1, b);
        return true;
    };
    if (!clip(px, dx) || !clip(py, dy) || t0 > t1) {
        return {};
    }
    const auto snap = [&](double v) { return std::clamp(static_cast<int>(std::floor(v + 0.5)), 0, crop - 1); };
    const Point a{snap(px + t0 * dx), snap(py + t0 * dy)};
    const Point b{snap(px + t1 * dx), snap(py + t1 * dy)};
    return raster_line(a, b);
}

CandidateSet::CandidateSet(const CandidateParams& params) : params_(params) {
    params_.validate();
    const int s = params_.crop;
    const double r = s * std::numbers::sqrt2 / 2.0;
    const double rho_step = 2.0 * r / (params_.n_rho - 1);

    offsets_.reserve(params_.count() + 1);
    offsets_.push_back(0);
    for (int j = 0; j < params_.n_theta; ++j) {
        const double theta = j * std::numbers::pi / params_.n_theta;
        for (int l = 0; l < params_.n_rho; ++l) {
            const double rho = -r + l * rho_step;
            auto pixels = chord(theta, rho, s);
            const std::size_t first = indices_.size();
            for (const Point p : pixels) {
                indices_.push_back(static_cast<std::uint32_t>(p.y * s + p.x));
            }
            std::sort(indices_.begin() + static_cast<std::ptrdiff_t>(first), indices_.end());
            points_.insert(points_.end(), pixels.begin(), pixels.end());
            offsets_.push_back(points_.size());
            thetas_.push_back(theta);
            rhos_.push_back(rho);
        }
    }
}

CandidateSet gen_candidates(const CandidateParams& params) { return CandidateSet(params); }

std::shared_ptr<const CandidateSet> cached_candidates(const CandidateParams& params) {
    static std::mutex mu;
    static std::map<std::tuple<int, int, int>, std::shared_ptr<const CandidateSet>> cache;
    const auto key = std::make_tuple(params.crop, params.n_theta, params.n_rho);
    std::lock_guard lock(mu);
    auto it = cache.find(key);
    if (it == cache.end()) {
        it = cache.emplace(key, std::make_shared<const CandidateSet>(params)).first;
    }
    return it->second;
}

TargetCrop build_target_crop(const Region& region, const LabelMask& gt, Sign sign,
                             double margin_frac, int crop_side) {
    if (region.area() == 0) {
        throw std::invalid_argument("build_target_crop: empty region");
    }
    const Label same = sign == Sign::Positive ? Label::Foreground : Label::Background;
    const Label opposite = sign == Sign::Positive ? Label::Background : Label::Foreground;

    TargetCrop out{BinaryMask(crop_side, crop_side), BinaryMask(crop_side, crop_side),
                   BinaryMask(crop_side, crop_side),
                   make_crop_transform(region.bbox, margin_frac, crop_side, gt.width(), gt.height())};

    // Region membership over its bbox.
    const BBox& rb = region.bbox;
    BinaryMask local(rb.width(), rb.height());
    for (const Point p : region.pixels) {
        local(p.x - rb.x0, p.y - rb.y0) = 1;
    }

    for (int v = 0; v < crop_side; ++v) {
        for (int u = 0; u < crop_side; ++u) {
            const Point src = out.transform.to_source({u, v});
            if (!out.transform.in_image(src)) {
                continue;
            }
            const Label l = gt[src];
            if (l == same) {
                out.same_class(u, v) = 1;
                if (rb.contains(src) && local(src.x - rb.x0, src.y - rb.y0)) {
                    out.target(u, v) = 1;
                }
            } else if (l == opposite) {
                out.opposite_class(u, v) = 1;
            }
        }
    }

    // Candidates are full chords, so every one of them runs into whatever
    // surrounds the target at the crop edge. Only opposite regions a chord
    // could go around, i.e. those not reaching the crop border, are kept.
    const int last = crop_side - 1;
    for (const Region& r : connected_components(out.opposite_class)) {
        if (r.bbox.x0 == 0 || r.bbox.y0 == 0 || r.bbox.x1 == last || r.bbox.y1 == last) {
            for (const Point p : r.pixels) {
                out.opposite_class[p] = 0;
            }
        }
    }
    return out;
}

std::optional<WeightMap> build_weight_map(const TargetCrop& crop, double k) {
    if (!(k < 0.0)) {
        throw std::invalid_argument("build_weight_map: penalty k must be negative");
    }
    const Field dt = distance_transform(crop.target);
    const double peak = *std::max_element(dt.data().begin(), dt.data().end());
    if (peak <= 0.0) {
        return std::nullopt;
    }
    WeightMap wm{Field(crop.target.width(), crop.target.height()), k};
    for (std::size_t i = 0; i < dt.size(); ++i) {
        if (crop.target.data()[i]) {
            wm.weights.data()[i] = dt.data()[i] / peak;
        } else if (crop.opposite_class.data()[i]) {
            wm.weights.data()[i] = k;
        }
    }
    return wm;
}

double candidate_score(const CandidateSet& candidates, std::size_t i, const WeightMap& weights) {
    const auto w = weights.weights.data();
    double score = 0.0;
    for (const std::uint32_t idx : candidates.pixel_indices(i)) {
        score += w[idx];
    }
    return score;
}

Selection select_line(const CandidateSet& candidates, const WeightMap& weights) {
    const int s = candidates.params().crop;
    if (weights.weights.width() != s || weights.weights.height() != s) {
        throw std::invalid_argument("select_line: weight map does not match the candidate canvas");
    }
    if (candidates.size() == 0) {
        throw std::invalid_argument("select_line: no candidates");
    }
    const auto w = weights.weights.data();
    Selection best;
    bool have = false;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        double score = 0.0;
        std::size_t inter = 0;
        for (const std::uint32_t idx : candidates.pixel_indices(i)) {
            score += w[idx];
            inter += w[idx] > 0.0 ? 1 : 0;
        }
        if (!have || score > best.score || (score == best.score && inter > best.intersection)) {
            best = {i, score, inter};
            have = true;
        }
    }
    return best;
}

std::optional<std::pair<Point, Point>> extract_endpoints(std::span<const Point> line,
                                                         const TargetCrop& crop) {
    std::size_t best_start = 0;
    std::size_t best_len = 0;
    std::size_t run_start = 0;
    std::size_t run_len = 0;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const Point p = line[i];
        const bool inside = crop.target.contains(p) && crop.target[p];
        if (inside) {
            if (run_len == 0) {
                run_start = i;
            }
            ++run_len;
            if (run_len > best_len) {
                best_len = run_len;
                best_start = run_start;
            }
        } else {
            run_len = 0;
        }
    }
    if (best_len < 2) {
        return std::nullopt;
    }
    const CropTransform& t = crop.transform;
    const Point a = t.clamp_to_image(t.to_source(line[best_start]));
    const Point b = t.clamp_to_image(t.to_source(line[best_start + best_len - 1]));
    if (a == b) {
        return std::nullopt;
    }
    return std::make_pair(a, b);
}

std::string_view to_string(LineFallback f) {
    switch (f) {
        case LineFallback::None: return "none";
        case LineFallback::EmptyTarget: return "empty_target";
        case LineFallback::NonPositiveScore: return "non_positive_score";
        case LineFallback::NoEndpoints: return "no_endpoints";
    }
    return "none";
}

LineOutcome line_for_region(const Region& region, const LabelMask& gt, Sign sign,
                            const CandidateSet& candidates, const LineGenParams& params) {
    LineOutcome out;
    if (region.area() == 0) {
        out.fallback = LineFallback::EmptyTarget;
        return out;
    }
    out.crop = build_target_crop(region, gt, sign, params.margin_frac, candidates.params().crop);
    out.weights = build_weight_map(*out.crop, params.k);
    if (!out.weights) {
        out.fallback = LineFallback::EmptyTarget;
        return out;
    }
    out.selection = select_line(candidates, *out.weights);
    if (!(out.selection->score > 0.0)) {
        out.fallback = LineFallback::NonPositiveScore;
        return out;
    }
    const auto ends = extract_endpoints(candidates.line(out.selection->index), *out.crop);
    if (!ends) {
        out.fallback = LineFallback::NoEndpoints;
        return out;
    }
    out.line = Annotation::line(sign, ends->first, ends->second);
    return out;
}

void write_line_debug_png(const std::filesystem::path& path, const LineOutcome& outcome,
                          const CandidateSet& candidates) {
    if (!outcome.crop) {
        return;
    }
    const TargetCrop& crop = *outcome.crop;
    const int s = crop.target.width();
    Image img(s, s, 3);
    const auto paint = [&](Point p, std::uint8_t r, std::uint8_t g, std::uint8_t b) {
        img.at(p.x, p.y, 0) = r;
        img.at(p.x, p.y, 1) = g;
        img.at(p.x, p.y, 2) = b;
    };
    for (int y = 0; y < s; ++y) {
        for (int x = 0; x < s; ++x) {
            if (crop.opposite_class(x, y)) {
                paint({x, y}, 140, 0, 0);
            } else if (crop.target(x, y)) {
                const double w = outcome.weights ? outcome.weights->weights(x, y) : 0.5;
                const auto level = static_cast<std::uint8_t>(80 + 175 * std::clamp(w, 0.0, 1.0));
                paint({x, y}, level, level, level);
            } else if (crop.same_class(x, y)) {
                paint({x, y}, 40, 40, 40);
            }
        }
    }
    if (outcome.selection) {
        for (const Point p : candidates.line(outcome.selection->index)) {
            const bool inside = crop.target[p] != 0;
            paint(p, inside ? 255 : 0, 255, 0);
        }
    }
    write_png(path, img);
}

}  // namespace c2l
