#pragma once

#include "clicks2line/annotation.hpp"
#include "clicks2line/crop.hpp"
#include "clicks2line/mask.hpp"

#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace c2l {

struct CandidateParams {
    int crop = 64;      // S, crop canvas side
    int n_theta = 36;   // angles over [0, pi)
    int n_rho = 64;     // offsets over [-S*sqrt(2)/2, +S*sqrt(2)/2]

    void validate() const;
    std::size_t count() const { return static_cast<std::size_t>(n_theta) * n_rho; }

    friend bool operator==(const CandidateParams&, const CandidateParams&) = default;
};

/// Chord of the line through canvas center (S/2, S/2) with direction angle
/// theta and signed normal offset rho, clipped to the canvas and rasterized.
/// theta = 0 is horizontal; the normal is (-sin theta, cos theta). Empty when
/// the line misses the canvas.
std::vector<Point> chord(double theta, double rho, int crop);

/// The stack of N rasterized line candidates over the S x S canvas.
///
/// Candidate i has angle index i / n_rho and offset index i % n_rho. Each line
/// is kept twice: in traversal order (for endpoint extraction) and as ascending
/// row-major pixel indices, which makes the score a sparse row of the
/// N x (S*S) candidate matrix.
class CandidateSet {
public:
    explicit CandidateSet(const CandidateParams& params);

    const CandidateParams& params() const { return params_; }
    std::size_t size() const { return thetas_.size(); }

    std::span<const Point> line(std::size_t i) const {
        return {points_.data() + offsets_[i], offsets_[i + 1] - offsets_[i]};
    }
    std::span<const std::uint32_t> pixel_indices(std::size_t i) const {
        return {indices_.data() + offsets_[i], offsets_[i + 1] - offsets_[i]};
    }
    double theta(std::size_t i) const { return thetas_[i]; }
    double rho(std::size_t i) const { return rhos_[i]; }

private:
    CandidateParams params_;
    std::vector<Point> points_;
    std::vector<std::uint32_t> indices_;
    std::vector<std::size_t> offsets_;
    std::vector<double> thetas_;
    std::vector<double> rhos_;
};

CandidateSet gen_candidates(const CandidateParams& params);

/// Process-wide cache; candidate sets are immutable and shared read-only.
std::shared_ptr<const CandidateSet> cached_candidates(const CandidateParams& params);

/// Target region and class context resampled into the crop canvas.
struct TargetCrop {
    BinaryMask target;          // T: region pixels of the target's class
    BinaryMask same_class;      // GT pixels of the target's class
    BinaryMask opposite_class;  // enclosed GT regions of the other class (not touching the crop border)
    CropTransform transform;
};

/// Nearest-neighbor resampling of the region and GT through one crop
/// transform. Canvas pixels that fall outside the image or on ignore GT belong
/// to no class.
TargetCrop build_target_crop(const Region& region, const LabelMask& gt, Sign sign,
                             double margin_frac = 0.1, int crop_side = 64);

struct WeightMap {
    Field weights;  // (0, 1] on T, k on opposite class, 0 elsewhere
    double k = -100.0;
};

/// Positive weights are the distance transform of T normalized to a maximum of
/// one, so central pixels count most. Returns nullopt when T is empty.
std::optional<WeightMap> build_weight_map(const TargetCrop& crop, double k);

struct Selection {
    std::size_t index = 0;
    double score = 0.0;
    std::size_t intersection = 0;  // pixels of the line with positive weight
};

/// Scores every candidate as the dot product of its indicator row with the
/// flattened weight map and returns the argmax. Ties go to the larger
/// intersection with T, then the lower index.
Selection select_line(const CandidateSet& candidates, const WeightMap& weights);

/// Score of one candidate, summed in ascending pixel-index order.
double candidate_score(const CandidateSet& candidates, std::size_t i, const WeightMap& weights);

/// Longest contiguous run of the line inside T, mapped back to source
/// coordinates. Nullopt when the run is shorter than two crop pixels or both
/// ends land on the same source pixel.
std::optional<std::pair<Point, Point>> extract_endpoints(std::span<const Point> line,
                                                         const TargetCrop& crop);

struct LineGenParams {
    double k = -100.0;
    double margin_frac = 0.1;
};

enum class LineFallback { None, EmptyTarget, NonPositiveScore, NoEndpoints };

std::string_view to_string(LineFallback f);

struct LineOutcome {
    std::optional<Annotation> line;
    LineFallback fallback = LineFallback::None;
    std::optional<Selection> selection;
    std::optional<TargetCrop> crop;
    std::optional<WeightMap> weights;

    bool ok() const { return line.has_value(); }
};

/// Full line generation for one target region. Never throws on degenerate
/// regions; reports a fallback instead.
LineOutcome line_for_region(const Region& region, const LabelMask& gt, Sign sign,
                            const CandidateSet& candidates, const LineGenParams& params = {});

/// RGB rendering of T (gray), positive weights (brightness), penalized pixels
/// (red), the selected candidate (green) and its extracted run (yellow).
void write_line_debug_png(const std::filesystem::path& path, const LineOutcome& outcome,
                          const CandidateSet& candidates);

}  // namespace c2l
