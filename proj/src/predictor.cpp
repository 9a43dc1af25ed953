#include "clicks2line/predictor.hpp"

#include "clicks2line/io.hpp"
#include "clicks2line/rle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <utility>

namespace c2l {

std::string_view to_string(PredictorError::Kind kind) {
    switch (kind) {
        case PredictorError::Kind::Transport: return "transport";
        case PredictorError::Kind::Malformed: return "malformed";
        case PredictorError::Kind::DimensionMismatch: return "dimension_mismatch";
    }
    return "transport";
}

Field geodesic_distance(const Image& image, std::span<const std::size_t> seeds, double beta) {
    const int w = image.width;
    const int h = image.height;
    const int channels = image.channels;
    Field dist(w, h, std::numeric_limits<double>::infinity());

    const auto step_cost = [&](std::size_t a, std::size_t b) {
        int diff = 0;
        for (int c = 0; c < channels; ++c) {
            diff += std::abs(static_cast<int>(image.pixels[a * channels + c]) -
                             static_cast<int>(image.pixels[b * channels + c]));
        }
        return 1.0 + beta * (static_cast<double>(diff) / (255.0 * channels));
    };

    using Entry = std::pair<double, std::size_t>;
    std::priority_queue<Entry, std::vector<Entry>, std::greater<>> queue;
    auto d = dist.data();
    for (const std::size_t s : seeds) {
        if (d[s] != 0.0) {
            d[s] = 0.0;
            queue.emplace(0.0, s);
        }
    }
    while (!queue.empty()) {
        const auto [du, u] = queue.top();
        queue.pop();
        if (du > d[u]) {
            continue;
        }
        const int x = static_cast<int>(u % static_cast<std::size_t>(w));
        const int y = static_cast<int>(u / static_cast<std::size_t>(w));
        const auto relax = [&](std::size_t v) {
            const double nd = du + step_cost(u, v);
            if (nd < d[v]) {
                d[v] = nd;
                queue.emplace(nd, v);
            }
        };
        if (x > 0) relax(u - 1);
        if (x + 1 < w) relax(u + 1);
        if (y > 0) relax(u - static_cast<std::size_t>(w));
        if (y + 1 < h) relax(u + static_cast<std::size_t>(w));
    }
    return dist;
}

BinaryMask geodesic_predict(const PredictRequest& request, const GeodesicParams& params) {
    const Image& image = request.image;
    const int w = image.width;
    const int h = image.height;
    if (params.beta < 0.0) {
        throw std::invalid_argument("geodesic_predict: beta must be >= 0");
    }

    BinaryMask pos_seed(w, h);
    BinaryMask neg_seed(w, h);
    bool any_pos = false;
    bool any_neg = false;
    for (const Annotation& a : request.annotations) {
        validate(a, w, h);
        BinaryMask& target = a.sign == Sign::Positive ? pos_seed : neg_seed;
        for (const Point p : annotation_pixels(a)) {
            target[p] = 1;
        }
        (a.sign == Sign::Positive ? any_pos : any_neg) = true;
    }

    BinaryMask out(w, h);
    if (!any_pos) {
        return out;
    }
    if (!any_neg && params.implicit_border_negatives) {
        for (int y = 0; y < h; ++y) {
            for (int x = 0; x < w; ++x) {
                const bool border = x == 0 || y == 0 || x == w - 1 || y == h - 1;
                if (border && !pos_seed(x, y)) {
                    neg_seed(x, y) = 1;
                }
            }
        }
    }

    const auto indices_of = [](const BinaryMask& m) {
        std::vector<std::size_t> idx;
        for (std::size_t i = 0; i < m.size(); ++i) {
            if (m.data()[i]) {
                idx.push_back(i);
            }
        }
        return idx;
    };
    const auto pos_idx = indices_of(pos_seed);
    const auto neg_idx = indices_of(neg_seed);
    const Field dpos = geodesic_distance(image, pos_idx, params.beta);
    const Field dneg = neg_idx.empty() ? Field(w, h, std::numeric_limits<double>::infinity())
                                       : geodesic_distance(image, neg_idx, params.beta);
    for (std::size_t i = 0; i < out.size(); ++i) {
        out.data()[i] = dpos.data()[i] < dneg.data()[i] ? 1 : 0;
    }
    return out;
}

GeodesicPredictor::GeodesicPredictor(GeodesicParams params) : params_(params) {
    if (params_.beta < 0.0) {
        throw std::invalid_argument("GeodesicPredictor: beta must be >= 0");
    }
}

BinaryMask GeodesicPredictor::predict(const PredictRequest& request) {
    return geodesic_predict(request, params_);
}

nlohmann::json request_to_wire(const PredictRequest& request) {
    nlohmann::json annotations = nlohmann::json::array();
    for (const Annotation& a : request.annotations) {
        nlohmann::json points = nlohmann::json::array();
        for (const Point p : a.points) {
            points.push_back({{"x", p.x}, {"y", p.y}});
        }
        annotations.push_back(
            {{"kind", to_string(a.kind)}, {"sign", to_string(a.sign)}, {"points", std::move(points)}});
    }
    nlohmann::json j = {
        {"width", request.image.width},
        {"height", request.image.height},
        {"image_b64", base64_encode(encode_png(request.image))},
        {"annotations", std::move(annotations)},
    };
    if (request.previous != nullptr) {
        j["prev_mask_rle"] = rle_encode(*request.previous);
    }
    return j;
}

BinaryMask mask_from_wire(std::string_view body, int width, int height) {
    using Kind = PredictorError::Kind;
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(body);
    } catch (const nlohmann::json::parse_error& e) {
        throw PredictorError(Kind::Malformed, std::string("response is not JSON: ") + e.what());
    }
    if (!j.is_object() || !j.contains("mask_rle") || !j["mask_rle"].is_array()) {
        throw PredictorError(Kind::Malformed, "response lacks a mask_rle array");
    }
    for (const char* key : {"width", "height"}) {
        if (j.contains(key) && !j[key].is_number_integer()) {
            throw PredictorError(Kind::Malformed, std::string("response field '") + key + "' is not an integer");
        }
    }
    if ((j.contains("width") && j["width"].get<int>() != width) ||
        (j.contains("height") && j["height"].get<int>() != height)) {
        throw PredictorError(Kind::DimensionMismatch, "response dimensions differ from the request");
    }
    std::vector<std::int64_t> runs;
    runs.reserve(j["mask_rle"].size());
    for (const auto& v : j["mask_rle"]) {
        if (!v.is_number_integer() || v.get<std::int64_t>() < 0) {
            throw PredictorError(Kind::Malformed, "mask_rle entries must be non-negative integers");
        }
        runs.push_back(v.get<std::int64_t>());
    }
    try {
        return rle_decode(runs, width, height);
    } catch (const RleError& e) {
        throw PredictorError(Kind::DimensionMismatch, e.what());
    }
}

std::unique_ptr<Predictor> make_predictor(std::string_view spec, const GeodesicParams& params) {
    if (spec == "geodesic") {
        return std::make_unique<GeodesicPredictor>(params);
    }
    if (spec.starts_with("external:") && spec.size() > 9) {
        return std::make_unique<SubprocessPredictor>(std::string(spec.substr(9)));
    }
    if (spec.starts_with("http:") && spec.size() > 5) {
        return std::make_unique<HttpPredictor>(std::string(spec.substr(5)));
    }
    throw std::invalid_argument("unknown predictor '" + std::string(spec) +
                                "' (expected geodesic, external:CMD or http:URL)");
}

}  // namespace c2l
