#include "clicks2line/rle.hpp"

#include <string>

namespace c2l {

std::vector<std::int64_t> rle_encode(const BinaryMask& mask) {
    std::vector<std::int64_t> runs;
    std::uint8_t current = 0;
    std::int64_t length = 0;
    for (const std::uint8_t v : mask.data()) {
        const std::uint8_t bit = v ? 1 : 0;
        if (bit != current) {
            runs.push_back(length);
            current = bit;
            length = 0;
        }
        ++length;
    }
    runs.push_back(length);
    return runs;
}

BinaryMask rle_decode(std::span<const std::int64_t> runs, int width, int height) {
    const std::int64_t total = static_cast<std::int64_t>(width) * height;
    std::int64_t sum = 0;
    for (const std::int64_t r : runs) {
        if (r < 0) {
            throw RleError("rle: negative run length");
        }
        sum += r;
        if (sum > total) {
            break;
        }
    }
    if (sum != total) {
        throw RleError("rle: runs cover " + std::to_string(sum) + " pixels, expected " +
                       std::to_string(total));
    }
    BinaryMask mask(width, height);
    std::size_t pos = 0;
    std::uint8_t bit = 0;
    for (const std::int64_t r : runs) {
        for (std::int64_t i = 0; i < r; ++i) {
            mask.data()[pos++] = bit;
        }
        bit ^= 1;
    }
    return mask;
}

}  // namespace c2l
