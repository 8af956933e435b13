#include "vcam/workbench/image_io.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>
#include <iterator>

#include <boost/beast/core/detail/base64.hpp>
#include <png.h>

#include "vcam/error.hpp"

namespace vcam::workbench {

namespace b64 = boost::beast::detail::base64;

std::vector<std::uint8_t> encode_png(const Frame& frame) {
    if (frame.width < 1 || frame.height < 1) throw Error(ErrorKind::invalid_argument, "cannot encode an empty frame");
    png_image image;
    std::memset(&image, 0, sizeof image);
    image.version = PNG_IMAGE_VERSION;
    image.width = static_cast<png_uint_32>(frame.width);
    image.height = static_cast<png_uint_32>(frame.height);
    image.format = PNG_FORMAT_RGB;
    png_alloc_size_t size = 0;
    if (!png_image_write_get_memory_size(image, size, 0, frame.rgb.data(), 0, nullptr))
        throw Error(ErrorKind::io_error, std::string("PNG encode failed: ") + image.message);
    std::vector<std::uint8_t> out(size);
    if (!png_image_write_to_memory(&image, out.data(), &size, 0, frame.rgb.data(), 0, nullptr))
        throw Error(ErrorKind::io_error, std::string("PNG encode failed: ") + image.message);
    out.resize(size);
    return out;
}

Frame decode_png(std::span<const std::uint8_t> bytes) {
    png_image image;
    std::memset(&image, 0, sizeof image);
    image.version = PNG_IMAGE_VERSION;
    if (!png_image_begin_read_from_memory(&image, bytes.data(), bytes.size()))
        throw Error(ErrorKind::parse_error, std::string("PNG decode failed: ") + image.message);
    image.format = PNG_FORMAT_RGB;
    Frame frame(static_cast<int>(image.width), static_cast<int>(image.height));
    if (!png_image_finish_read(&image, nullptr, frame.rgb.data(), 0, nullptr)) {
        png_image_free(&image);
        throw Error(ErrorKind::parse_error, std::string("PNG decode failed: ") + image.message);
    }
    return frame;
}

void write_png(const std::filesystem::path& path, const Frame& frame) {
    const auto bytes = encode_png(frame);
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::io_error, "cannot write " + path.string());
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error(ErrorKind::io_error, "write failed for " + path.string());
}

Frame read_png(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::io_error, "cannot open " + path.string());
    const std::vector<std::uint8_t> bytes{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
    try {
        return decode_png(bytes);
    } catch (const Error& e) {
        throw Error(e.kind(), path.string() + ": " + e.what());
    }
}

std::vector<Frame> read_png_dir(const std::filesystem::path& dir) {
    if (!std::filesystem::is_directory(dir)) throw Error(ErrorKind::io_error, "not a directory: " + dir.string());
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(dir))
        if (entry.is_regular_file() && entry.path().extension() == ".png") files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    std::vector<Frame> frames;
    frames.reserve(files.size());
    for (const auto& f : files) frames.push_back(read_png(f));
    return frames;
}

std::string base64_encode(std::span<const std::uint8_t> bytes) {
    std::string out(b64::encoded_size(bytes.size()), '\0');
    out.resize(b64::encode(out.data(), bytes.data(), bytes.size()));
    return out;
}

std::vector<std::uint8_t> base64_decode(std::string_view text) {
    std::vector<std::uint8_t> out(b64::decoded_size(text.size()));
    const auto [written, read] = b64::decode(out.data(), text.data(), text.size());
    const auto padding = text.substr(read);
    if (padding.size() > 2 || padding.find_first_not_of('=') != std::string_view::npos)
        throw Error(ErrorKind::parse_error, "invalid base64");
    out.resize(written);
    return out;
}

std::string frame_to_base64(const Frame& frame) { return base64_encode(encode_png(frame)); }

Frame frame_from_base64(std::string_view text) { return decode_png(base64_decode(text)); }

}  // namespace vcam::workbench
