#ifndef VKRL_PNG_IO_HPP
#define VKRL_PNG_IO_HPP

#include <png.h>

#include <cstdint>
#include <string>
#include <vector>

#include "vkrl/common.hpp"

namespace vkrl {

/// 8-bit grayscale raster, row 0 at the top as stored in the file.
struct GrayImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> pixels;

    std::uint8_t at(int col, int row) const { return pixels[static_cast<std::size_t>(row) * width + col]; }
};

inline GrayImage read_png_gray(const std::string& path) {
    png_image image{};
    image.version = PNG_IMAGE_VERSION;
    if (!png_image_begin_read_from_file(&image, path.c_str())) {
        throw Error("cannot read image '" + path + "': " + image.message);
    }
    image.format = PNG_FORMAT_GRAY;
    GrayImage out;
    out.width = static_cast<int>(image.width);
    out.height = static_cast<int>(image.height);
    out.pixels.resize(PNG_IMAGE_SIZE(image));
    if (!png_image_finish_read(&image, nullptr, out.pixels.data(), 0, nullptr)) {
        png_image_free(&image);
        throw Error("cannot decode image '" + path + "': " + image.message);
    }
    return out;
}

inline void write_png_gray(const std::string& path, const GrayImage& img) {
    png_image image{};
    image.version = PNG_IMAGE_VERSION;
    image.width = static_cast<png_uint_32>(img.width);
    image.height = static_cast<png_uint_32>(img.height);
    image.format = PNG_FORMAT_GRAY;
    if (!png_image_write_to_file(&image, path.c_str(), 0, img.pixels.data(), 0, nullptr)) {
        throw Error("cannot write image '" + path + "': " + image.message);
    }
}

}  // namespace vkrl

#endif  // VKRL_PNG_IO_HPP
