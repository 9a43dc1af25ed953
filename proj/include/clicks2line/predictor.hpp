#pragma once

#include "clicks2line/annotation.hpp"
#include "clicks2line/mask.hpp"

#include <chrono>
#include <memory>
#include <mutex>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>

#include <json.hpp>

namespace c2l {

/// Everything a segmentation model sees for one round.
struct PredictRequest {
    const Image& image;
    std::span<const Annotation> annotations;
    const BinaryMask* previous = nullptr;
};

class PredictorError : public std::runtime_error {
public:
    enum class Kind { Transport, Malformed, DimensionMismatch };

    PredictorError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    Kind kind() const { return kind_; }

private:
    Kind kind_;
};

std::string_view to_string(PredictorError::Kind kind);

/// A segmentation model. predict() must be safe to call from several threads;
/// implementations that talk to a single endpoint serialize internally.
class Predictor {
public:
    virtual ~Predictor() = default;
    virtual std::string id() const = 0;
    virtual BinaryMask predict(const PredictRequest& request) = 0;
};

struct GeodesicParams {
    double beta = 8.0;                     // weight of the intensity step
    bool implicit_border_negatives = true; // border seeds when no negative input exists
};

/// Nearest-signed-seed labeling under the shortest-path metric of the 4-neighbor
/// grid with step cost 1 + beta * |dI|, dI the mean absolute per-channel
/// difference scaled to [0, 1]. A pixel is foreground iff strictly closer to a
/// positive seed than to any negative seed.
BinaryMask geodesic_predict(const PredictRequest& request, const GeodesicParams& params = {});

/// Multi-source shortest-path distances from the given seed pixel indices.
Field geodesic_distance(const Image& image, std::span<const std::size_t> seeds, double beta);

class GeodesicPredictor final : public Predictor {
public:
    explicit GeodesicPredictor(GeodesicParams params = {});
    std::string id() const override { return "geodesic"; }
    BinaryMask predict(const PredictRequest& request) override;

private:
    GeodesicParams params_;
};

/// JSON request body of the predictor wire protocol.
nlohmann::json request_to_wire(const PredictRequest& request);

/// Parses a {"mask_rle": [...]} response. Throws PredictorError (Malformed or
/// DimensionMismatch).
BinaryMask mask_from_wire(std::string_view body, int width, int height);

/// Talks the wire protocol over a child process's stdin/stdout, one JSON
/// document per line. The child is started lazily with /bin/sh -c and
/// restarted after a transport failure.
class SubprocessPredictor final : public Predictor {
public:
    explicit SubprocessPredictor(std::string command,
                                 std::chrono::milliseconds timeout = std::chrono::seconds(60));
    ~SubprocessPredictor() override;
    SubprocessPredictor(const SubprocessPredictor&) = delete;
    SubprocessPredictor& operator=(const SubprocessPredictor&) = delete;

    std::string id() const override { return "external:" + command_; }
    BinaryMask predict(const PredictRequest& request) override;

private:
    void start();
    void stop();
    std::string roundtrip(const std::string& line);

    std::string command_;
    std::chrono::milliseconds timeout_;
    std::mutex mu_;
    int pid_ = -1;
    int fd_ = -1;
    std::string buffer_;
};

/// POSTs the wire request to <url>/predict.
class HttpPredictor final : public Predictor {
public:
    explicit HttpPredictor(std::string url, std::chrono::milliseconds timeout = std::chrono::seconds(60));

    std::string id() const override { return "http:" + url_; }
    BinaryMask predict(const PredictRequest& request) override;

private:
    std::string url_;
    std::string host_;
    std::string path_;
    std::chrono::milliseconds timeout_;
    std::mutex mu_;
};

/// Builds a predictor from "geodesic", "external:CMD" or "http:URL".
/// Throws std::invalid_argument for anything else.
std::unique_ptr<Predictor> make_predictor(std::string_view spec, const GeodesicParams& params = {});

}  // namespace c2l
