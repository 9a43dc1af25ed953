#pragma once

#include "clicks2line/mask.hpp"

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace c2l {

/// Platform-stable random numbers: mt19937_64 output is fully specified, and
/// the conversions below do not go through the implementation-defined
/// standard distributions.
class Rng {
public:
    explicit Rng(std::seed_seq& seq) : engine_(seq) {}
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }
    /// Uniform in [0, 1).
    double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * unit(); }
    /// Uniform integer in [lo, hi].
    int integer(int lo, int hi) {
        const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
        return lo + static_cast<int>(engine_() % span);
    }

private:
    std::mt19937_64 engine_;
};

enum class ShapeKind { Bar, Blob };

std::string_view to_string(ShapeKind k);
/// Parses a comma-separated list of "bars" / "blobs".
std::vector<ShapeKind> parse_kinds(std::string_view list);

struct SynthParams {
    int size = 64;            // square image side
    double min_aspect = 6.0;  // bars
    double max_aspect = 12.0;
    double min_bar_width = 3.0;
    double max_bar_width = 6.0;
    double max_blob_elongation = 3.0;
    int min_background = 20;
    int max_background = 60;
    int min_contrast = 150;   // object minus background intensity
    int max_contrast = 200;
    int noise = 4;            // +- uniform intensity noise
};

struct SynthInstance {
    std::string id;
    Image image;
    BinaryMask mask;
};

/// Deterministic in (seed, kind, index). Bars are solid rotated rectangles;
/// blobs are unions of one to three overlapping ellipses.
SynthInstance make_instance(std::uint64_t seed, ShapeKind kind, int index, const SynthParams& params = {});

/// Writes <out>/images/<id>.png and <out>/masks/<id>.png for `count`
/// instances of each kind; returns the ids in write order.
std::vector<std::string> gen_synthetic(const std::filesystem::path& out, std::uint64_t seed, int count,
                                       const std::vector<ShapeKind>& kinds, const SynthParams& params = {});

}  // namespace c2l
