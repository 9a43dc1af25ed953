#include "clicks2line/interaction.hpp"

#include <spdlog/spdlog.h>

#include <cmath>
#include <stdexcept>

namespace c2l {

void Policy::validate() const {
    if (!(q > 1.0)) {
        throw std::invalid_argument("Policy: q must be > 1");
    }
    if (budget < 1) {
        throw std::invalid_argument("Policy: budget must be >= 1");
    }
    if (!(k < 0.0)) {
        throw std::invalid_argument("Policy: k must be negative");
    }
    if (!(margin_frac >= 0.0 && margin_frac < 1.0)) {
        throw std::invalid_argument("Policy: margin_frac must be in [0, 1)");
    }
    candidates.validate();
}

std::optional<Target> next_target(const LabelMask& gt, const BinaryMask& pred) {
    if (!pred.same_shape(gt)) {
        throw std::invalid_argument("next_target: dimension mismatch");
    }
    BinaryMask fn(gt.width(), gt.height());
    BinaryMask fp(gt.width(), gt.height());
    for (std::size_t i = 0; i < gt.size(); ++i) {
        const Label l = gt.data()[i];
        const bool p = pred.data()[i] != 0;
        fn.data()[i] = (l == Label::Foreground && !p) ? 1 : 0;
        fp.data()[i] = (l == Label::Background && p) ? 1 : 0;
    }
    auto fn_regions = connected_components(fn);
    auto fp_regions = connected_components(fp);
    if (fn_regions.empty() && fp_regions.empty()) {
        return std::nullopt;
    }
    if (fp_regions.empty()) {
        return Target{std::move(fn_regions.front()), Sign::Positive};
    }
    if (fn_regions.empty()) {
        return Target{std::move(fp_regions.front()), Sign::Negative};
    }
    const Region& a = fn_regions.front();
    const Region& b = fp_regions.front();
    bool take_fp = false;
    if (a.area() != b.area()) {
        take_fp = b.area() > a.area();
    } else if (a.bbox.y0 != b.bbox.y0) {
        take_fp = b.bbox.y0 < a.bbox.y0;
    } else {
        take_fp = b.bbox.x0 < a.bbox.x0;
    }
    if (take_fp) {
        return Target{std::move(fp_regions.front()), Sign::Negative};
    }
    return Target{std::move(fn_regions.front()), Sign::Positive};
}

InputKind choose_kind(const Region& region, int round, const Policy& policy) {
    if (region.area() == 0) {
        throw std::invalid_argument("choose_kind: empty region");
    }
    if (round == 0 && policy.first_round_click) {
        return InputKind::Click;
    }
    if (policy.clicks_only()) {
        return InputKind::Click;
    }
    return elongation(region) >= policy.q ? InputKind::Line : InputKind::Click;
}

Point place_click(const Region& region) {
    if (region.area() == 0) {
        throw std::invalid_argument("place_click: empty region");
    }
    const BBox& b = region.bbox;
    BinaryMask local(b.width(), b.height());
    for (const Point p : region.pixels) {
        local(p.x - b.x0, p.y - b.y0) = 1;
    }
    const Field dt = distance_transform(local);

    // Centroid distances compared exactly as n^2 * |p - c|^2.
    std::int64_t n = 0, sx = 0, sy = 0;
    for (const Point p : region.pixels) {
        ++n;
        sx += p.x;
        sy += p.y;
    }
    const auto centroid_dist = [&](Point p) {
        const std::int64_t dx = n * p.x - sx;
        const std::int64_t dy = n * p.y - sy;
        return static_cast<__int128>(dx) * dx + static_cast<__int128>(dy) * dy;
    };

    Point best = region.pixels.front();
    double best_dt = -1.0;
    __int128 best_cd = 0;
    for (const Point p : region.pixels) {  // scan order
        const double d = dt(p.x - b.x0, p.y - b.y0);
        if (d > best_dt) {
            best = p;
            best_dt = d;
            best_cd = centroid_dist(p);
        } else if (d == best_dt) {
            const auto cd = centroid_dist(p);
            if (cd < best_cd) {
                best = p;
                best_cd = cd;
            }
        }
    }
    return best;
}

std::optional<Proposal> propose_input(const LabelMask& gt, const BinaryMask& pred, int round,
                                      int remaining_budget, const Policy& policy,
                                      const CandidateSet& candidates) {
    if (remaining_budget < 1) {
        return std::nullopt;
    }
    auto target = next_target(gt, pred);
    if (!target) {
        return std::nullopt;
    }
    Proposal out;
    out.target_area = target->region.area();
    out.elongation = elongation(target->region);
    out.requested = choose_kind(target->region, round, policy);

    if (out.requested == InputKind::Line) {
        out.line = line_for_region(target->region, gt, target->sign, candidates,
                                   {policy.k, policy.margin_frac});
        if (!out.line->ok()) {
            out.fallback = std::string(to_string(out.line->fallback));
        } else if (out.line->line->cost() > remaining_budget) {
            out.fallback = "budget";
        } else {
            out.annotation = *out.line->line;
            return out;
        }
        spdlog::debug("round {}: line requested for region of area {} (elongation {:.2f}) fell back to a click: {}",
                      round, out.target_area, out.elongation, out.fallback);
    }
    out.annotation = Annotation::click(target->sign, place_click(target->region));
    return out;
}

BinaryMask Session::current_mask() const {
    if (!masks.empty()) {
        return masks.back();
    }
    return BinaryMask(image.width, image.height);
}

std::optional<StepRecord> step(Session& session, const Policy& policy, Predictor& predictor,
                               const ProposalObserver& observer) {
    if (!session.gt) {
        throw std::logic_error("step: session has no ground truth");
    }
    const LabelMask& gt = *session.gt;
    if (gt.width() != session.image.width || gt.height() != session.image.height) {
        throw std::invalid_argument("step: ground truth and image sizes differ");
    }
    const auto candidates = cached_candidates(policy.candidates);
    const int round = static_cast<int>(session.annotations.size());
    const BinaryMask current = session.current_mask();

    auto proposal = propose_input(gt, current, round, policy.budget - session.cumulative_cost, policy,
                                  *candidates);
    if (!proposal) {
        return std::nullopt;
    }
    if (observer) {
        observer(round, *proposal);
    }

    std::vector<Annotation> annotations = session.annotations;
    annotations.push_back(proposal->annotation);
    const BinaryMask* previous = session.masks.empty() ? nullptr : &session.masks.back();
    BinaryMask mask = predictor.predict({session.image, annotations, previous});
    if (!mask.same_shape(gt)) {
        throw PredictorError(PredictorError::Kind::DimensionMismatch,
                             "predictor returned a mask of the wrong size");
    }

    StepRecord rec;
    rec.round = round;
    rec.annotation = proposal->annotation;
    rec.requested = proposal->requested;
    rec.fallback = proposal->fallback;
    rec.elongation = proposal->elongation;
    rec.cost = rec.annotation.cost();
    rec.cumulative_cost = session.cumulative_cost + rec.cost;
    rec.iou = iou(mask, gt);

    session.annotations = std::move(annotations);
    session.masks.push_back(std::move(mask));
    session.cumulative_cost = rec.cumulative_cost;
    return rec;
}

}  // namespace c2l
