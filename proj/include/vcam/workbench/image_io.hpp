#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "vcam/renderer.hpp"

namespace vcam::workbench {

/// 8-bit RGB PNG. Encoding is deterministic for a given frame.
std::vector<std::uint8_t> encode_png(const Frame& frame);
Frame decode_png(std::span<const std::uint8_t> bytes);

void write_png(const std::filesystem::path& path, const Frame& frame);
Frame read_png(const std::filesystem::path& path);

/// Every *.png in `dir`, sorted by file name.
std::vector<Frame> read_png_dir(const std::filesystem::path& dir);

std::string base64_encode(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> base64_decode(std::string_view text);

/// Base64 of the PNG encoding.
std::string frame_to_base64(const Frame& frame);
Frame frame_from_base64(std::string_view text);

}  // namespace vcam::workbench
