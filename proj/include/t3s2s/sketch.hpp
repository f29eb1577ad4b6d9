#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "t3s2s/keywords.hpp"
#include "t3s2s/pgm.hpp"

namespace t3s2s {

// Raster sketch where each cell stores an instance id (0 = background).
struct SketchLabelMap {
    int h = 0;
    int w = 0;
    int instance_count = 0;
    std::vector<uint8_t> cells;  // row-major

    uint8_t at(int r, int c) const { return cells[static_cast<size_t>(r) * w + c]; }
};

struct InstanceMask {
    int h = 0;
    int w = 0;
    std::vector<uint8_t> cells;  // row-major, {0,1}

    uint8_t at(int r, int c) const { return cells[static_cast<size_t>(r) * w + c]; }
    size_t popcount() const;
};

SketchLabelMap load_label_map(const std::string& path, int expected_instances);
SketchLabelMap label_map_from_gray(const GrayImage& img, int expected_instances);

// PPM variant: exact color -> id table; black and unlisted colors are background.
using ColorTable = std::vector<std::pair<std::array<uint8_t, 3>, int>>;
SketchLabelMap label_map_from_color(const RgbImage& img, const ColorTable& table,
                                    int expected_instances);

InstanceMask instance_mask(const SketchLabelMap& map, int id);

// Any-coverage pooling: a target cell is set iff any source pixel in its
// proportional window is set. Guarantees single-pixel instances survive
// every level.
InstanceMask downsample_any(const InstanceMask& mask, int target_h, int target_w);

// Flattened per-instance binary masks at each attention-layer resolution.
struct MaskPyramid {
    struct Level {
        int h = 0;
        int w = 0;
        std::map<int, std::vector<uint8_t>> masks;  // instance id -> flattened, length h*w
    };

    std::vector<Level> levels;
    std::vector<int> instance_ids;
    bool warning_empty_instance = false;
};

MaskPyramid build_pyramid(const SketchLabelMap& map, const KeywordIndices& binding,
                          const std::vector<std::pair<int, int>>& resolutions,
                          bool allow_empty = false);

// Overlapping scenes supply one full-resolution mask per instance.
MaskPyramid build_pyramid_from_masks(const std::map<int, InstanceMask>& instance_masks,
                                     const std::vector<std::pair<int, int>>& resolutions,
                                     bool allow_empty = false);

}  // namespace t3s2s
