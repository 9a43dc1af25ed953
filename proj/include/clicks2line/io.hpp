#pragma once

#include "clicks2line/mask.hpp"

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace c2l {

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Decodes any PNG to 8-bit gray (1 channel) or RGB (3 channels); alpha is dropped.
Image decode_png(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> encode_png(const Image& image);

Image read_png(const std::filesystem::path& path);
void write_png(const std::filesystem::path& path, const Image& image);

/// Trinary decoding of an 8-bit mask image: 0 -> background, >= 200 -> foreground,
/// anything else -> ignore. RGB masks use their first channel.
LabelMask decode_label_mask(const Image& image);
LabelMask read_label_mask(const std::filesystem::path& path);

/// 0 / 255 grayscale rendering of a binary mask.
Image mask_to_image(const BinaryMask& mask);
/// Foreground / background as 255 / 0, ignore as 128.
Image label_mask_to_image(const LabelMask& mask);

std::string base64_encode(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> base64_decode(std::string_view text);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);

}  // namespace c2l
