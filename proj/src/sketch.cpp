#include "t3s2s/sketch.hpp"

#include <algorithm>
#include <numeric>

#include "t3s2s/error.hpp"

namespace t3s2s {

size_t InstanceMask::popcount() const {
    size_t count = 0;
    for (uint8_t c : cells) count += c;
    return count;
}

SketchLabelMap label_map_from_gray(const GrayImage& img, int expected_instances) {
    if (expected_instances < 0 || expected_instances > 255) {
        throw Error(ErrorKind::ConfigError, "instance count must be in [0,255]");
    }
    SketchLabelMap map;
    map.h = img.h;
    map.w = img.w;
    map.instance_count = expected_instances;
    map.cells = img.px;
    for (uint8_t c : map.cells) {
        if (c > expected_instances) {
            throw Error(ErrorKind::LabelOutOfRange,
                        "label " + std::to_string(c) + " exceeds declared instance count " +
                            std::to_string(expected_instances));
        }
    }
    return map;
}

SketchLabelMap load_label_map(const std::string& path, int expected_instances) {
    return label_map_from_gray(read_pgm(path), expected_instances);
}

SketchLabelMap label_map_from_color(const RgbImage& img, const ColorTable& table,
                                    int expected_instances) {
    SketchLabelMap map;
    map.h = img.h;
    map.w = img.w;
    map.instance_count = expected_instances;
    map.cells.assign(static_cast<size_t>(img.h) * img.w, 0);
    for (size_t i = 0; i < map.cells.size(); ++i) {
        uint8_t r = img.px[i * 3], g = img.px[i * 3 + 1], b = img.px[i * 3 + 2];
        if (r == 0 && g == 0 && b == 0) continue;
        int id = 0;
        for (const auto& [color, cid] : table) {
            if (color[0] == r && color[1] == g && color[2] == b) {
                id = cid;
                break;
            }
        }
        if (id == 0) {
            throw Error(ErrorKind::ParseError,
                        "color sketch pixel (" + std::to_string(r) + "," + std::to_string(g) +
                            "," + std::to_string(b) + ") not in the scene color table");
        }
        if (id > expected_instances) {
            throw Error(ErrorKind::LabelOutOfRange, "color table id exceeds instance count");
        }
        map.cells[i] = static_cast<uint8_t>(id);
    }
    return map;
}

InstanceMask instance_mask(const SketchLabelMap& map, int id) {
    if (id < 1 || id > map.instance_count) {
        throw Error(ErrorKind::UnknownInstance,
                    "instance id " + std::to_string(id) + " outside [1," +
                        std::to_string(map.instance_count) + "]");
    }
    InstanceMask mask;
    mask.h = map.h;
    mask.w = map.w;
    mask.cells.resize(map.cells.size());
    for (size_t i = 0; i < map.cells.size(); ++i) {
        mask.cells[i] = map.cells[i] == id ? 1 : 0;
    }
    return mask;
}

InstanceMask downsample_any(const InstanceMask& mask, int target_h, int target_w) {
    if (target_h < 1 || target_w < 1) {
        throw Error(ErrorKind::BadTarget, "downsample_any: zero target dimension");
    }
    if (target_h > mask.h || target_w > mask.w) {
        throw Error(ErrorKind::BadTarget, "downsample_any: target exceeds source");
    }
    InstanceMask out;
    out.h = target_h;
    out.w = target_w;
    out.cells.assign(static_cast<size_t>(target_h) * target_w, 0);

    // proportional window tiling: target cell r covers source rows
    // [r*h/h', (r+1)*h/h') — windows partition the source exactly
    for (int r = 0; r < target_h; ++r) {
        int r0 = static_cast<int>(static_cast<int64_t>(r) * mask.h / target_h);
        int r1 = static_cast<int>(static_cast<int64_t>(r + 1) * mask.h / target_h);
        for (int c = 0; c < target_w; ++c) {
            int c0 = static_cast<int>(static_cast<int64_t>(c) * mask.w / target_w);
            int c1 = static_cast<int>(static_cast<int64_t>(c + 1) * mask.w / target_w);
            uint8_t hit = 0;
            for (int sr = r0; sr < r1 && !hit; ++sr) {
                for (int sc = c0; sc < c1; ++sc) {
                    if (mask.at(sr, sc)) {
                        hit = 1;
                        break;
                    }
                }
            }
            out.cells[static_cast<size_t>(r) * target_w + c] = hit;
        }
    }
    return out;
}

namespace {

MaskPyramid pyramid_from(const std::map<int, InstanceMask>& instance_masks,
                         const std::vector<std::pair<int, int>>& resolutions, bool allow_empty) {
    if (resolutions.empty()) {
        throw Error(ErrorKind::ConfigError, "build_pyramid: no resolutions");
    }
    MaskPyramid pyr;
    for (const auto& [id, mask] : instance_masks) {
        pyr.instance_ids.push_back(id);
        if (mask.popcount() == 0) {
            if (!allow_empty) {
                throw Error(ErrorKind::UnknownInstance,
                            "instance " + std::to_string(id) + " has no sketch coverage");
            }
            pyr.warning_empty_instance = true;
        }
    }
    for (const auto& [lh, lw] : resolutions) {
        MaskPyramid::Level level;
        level.h = lh;
        level.w = lw;
        for (const auto& [id, mask] : instance_masks) {
            InstanceMask small = downsample_any(mask, lh, lw);
            level.masks.emplace(id, std::move(small.cells));
        }
        pyr.levels.push_back(std::move(level));
    }
    return pyr;
}

}  // namespace

MaskPyramid build_pyramid(const SketchLabelMap& map, const KeywordIndices& binding,
                          const std::vector<std::pair<int, int>>& resolutions, bool allow_empty) {
    std::map<int, InstanceMask> instance_masks;
    for (int id : binding.instance_ids) {
        instance_masks.emplace(id, instance_mask(map, id));
    }
    return pyramid_from(instance_masks, resolutions, allow_empty);
}

MaskPyramid build_pyramid_from_masks(const std::map<int, InstanceMask>& instance_masks,
                                     const std::vector<std::pair<int, int>>& resolutions,
                                     bool allow_empty) {
    return pyramid_from(instance_masks, resolutions, allow_empty);
}

}  // namespace t3s2s
