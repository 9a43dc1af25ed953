#pragma once

#include "clicks2line/mask.hpp"

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace c2l {

/// Row-major run lengths alternating background / foreground, starting with
/// the (possibly zero) count of leading background pixels. Runs sum to
/// width * height; no trailing zero run is emitted.
std::vector<std::int64_t> rle_encode(const BinaryMask& mask);

class RleError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Throws RleError on negative runs or when the runs do not sum to width * height.
BinaryMask rle_decode(std::span<const std::int64_t> runs, int width, int height);

}  // namespace c2l
