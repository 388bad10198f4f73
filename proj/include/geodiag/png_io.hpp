#pragma once

// 8-bit grayscale PNG reading and writing, enough for diagram images.

#include <cstdint>
#include <string>
#include <vector>

namespace geodiag {

struct GrayImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> pixels;  // row-major, 255 = white

    GrayImage() = default;
    GrayImage(int w, int h, std::uint8_t fill = 255)
        : width(w), height(h), pixels(static_cast<std::size_t>(w) * h, fill) {}

    std::uint8_t& at(int x, int y) { return pixels[static_cast<std::size_t>(y) * width + x]; }
    std::uint8_t at(int x, int y) const { return pixels[static_cast<std::size_t>(y) * width + x]; }
    bool inside(int x, int y) const { return x >= 0 && y >= 0 && x < width && y < height; }
};

void write_png_gray(const std::string& path, const GrayImage& img);
GrayImage read_png_gray(const std::string& path);  // throws std::runtime_error on malformed input

}  // namespace geodiag
