#pragma once

#include "clicks2line/annotation.hpp"
#include "clicks2line/line_gen.hpp"
#include "clicks2line/mask.hpp"
#include "clicks2line/predictor.hpp"

#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace c2l {

/// Adaptive click/line input policy for the simulated annotator.
struct Policy {
    double q = 5.0;                  // elongation at or above which a line is used
    bool first_round_click = true;
    double k = -100.0;               // weight of opposite-class pixels
    CandidateParams candidates;
    double margin_frac = 0.1;
    int budget = 20;                 // click-equivalents

    void validate() const;
    bool clicks_only() const { return std::isinf(q); }
};

struct Target {
    Region region;
    Sign sign;  // Positive for a missed foreground region, Negative for a false alarm
};

/// Largest 4-connected error component, ignoring ignore pixels. False
/// negatives and false positives are labeled separately; area ties go to the
/// earlier bbox (y0, x0), then to the false-negative region.
std::optional<Target> next_target(const LabelMask& gt, const BinaryMask& pred);

/// Round 0 is always a click (when first_round_click); afterwards a line iff
/// elongation >= q.
InputKind choose_kind(const Region& region, int round, const Policy& policy);

/// Interior point with maximal distance to the region boundary. Ties go to the
/// pixel nearest the region centroid, then to the smallest (y, x).
Point place_click(const Region& region);

/// The input the simulated user would give next, without applying it.
struct Proposal {
    Annotation annotation;
    InputKind requested = InputKind::Click;
    std::string fallback;  // why a requested line became a click; empty if it did not
    double elongation = 1.0;
    std::size_t target_area = 0;
    std::optional<LineOutcome> line;
};

/// Nullopt when there is no error region or no budget left.
std::optional<Proposal> propose_input(const LabelMask& gt, const BinaryMask& pred, int round,
                                      int remaining_budget, const Policy& policy,
                                      const CandidateSet& candidates);

struct Session {
    Image image;
    std::optional<LabelMask> gt;
    std::vector<Annotation> annotations;
    std::vector<BinaryMask> masks;  // prediction after each annotation
    int cumulative_cost = 0;

    /// Latest prediction, or an empty mask before the first round.
    BinaryMask current_mask() const;
};

struct StepRecord {
    int round = 0;
    Annotation annotation;
    InputKind requested = InputKind::Click;
    std::string fallback;
    double elongation = 1.0;
    int cost = 0;
    int cumulative_cost = 0;
    double iou = 0.0;

    friend bool operator==(const StepRecord&, const StepRecord&) = default;
};

using ProposalObserver = std::function<void(int round, const Proposal&)>;

/// One simulated round: pick a target, choose click or line, run the predictor
/// and record the result. Nullopt when the mask is perfect or the budget is
/// spent. If the predictor throws, the session is left unchanged.
std::optional<StepRecord> step(Session& session, const Policy& policy, Predictor& predictor,
                               const ProposalObserver& observer = {});

}  // namespace c2l
