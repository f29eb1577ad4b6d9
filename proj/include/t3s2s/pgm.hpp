#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace t3s2s {

struct GrayImage {
    int h = 0;
    int w = 0;
    int maxval = 255;
    std::vector<uint8_t> px;  // row-major
};

struct RgbImage {
    int h = 0;
    int w = 0;
    std::vector<uint8_t> px;  // row-major, 3 bytes per pixel
};

// P2 (ascii) and P5 (binary), maxval <= 255
GrayImage read_pgm(const std::string& path);
void write_pgm(const std::string& path, const GrayImage& img);

// P6 only
RgbImage read_ppm(const std::string& path);

// Min-max normalized P5 dump; a constant matrix renders mid-gray 128.
void render_heatmap(const std::vector<double>& values, int h, int w, const std::string& path);

}  // namespace t3s2s
