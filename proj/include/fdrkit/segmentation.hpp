#pragma once

#include <cstdint>
#include <vector>

#include "fdrkit/geometry.hpp"
#include "fdrkit/image.hpp"

namespace fdr {

// Semantic sky classes, also the byte values stored in label rasters.
enum SkyClass : uint8_t {
    kClassBorder = 0,  // outside the mapped sky domain
    kClassSky = 1,
    kClassCloud = 2,
    kClassCorona = 3,  // circumsolar region
    kClassDisk = 4,    // solar disk
};
constexpr uint8_t kSkyClassCount = 5;

struct BinaryMask {
    int width = 0;
    int height = 0;
    std::vector<uint8_t> data;  // 0 or 1

    BinaryMask() = default;
    BinaryMask(int w, int h) : width(w), height(h), data(static_cast<size_t>(w) * h, 0) {}
    uint8_t at(int row, int col) const { return data[static_cast<size_t>(row) * width + col]; }
    uint8_t& at(int row, int col) { return data[static_cast<size_t>(row) * width + col]; }
};

struct SegmentationLabel {
    int width = 0;
    int height = 0;
    MapFormat format = MapFormat::None;
    std::vector<uint8_t> classes;

    SegmentationLabel() = default;
    SegmentationLabel(int w, int h, MapFormat f)
        : width(w), height(h), format(f), classes(static_cast<size_t>(w) * h, 0) {}
    uint8_t at(int row, int col) const { return classes[static_cast<size_t>(row) * width + col]; }
    uint8_t& at(int row, int col) { return classes[static_cast<size_t>(row) * width + col]; }
};

// Blue/red chromaticity cloud detector. The image is mu-law tone mapped
// per channel, then Y = (B - R)/(B + R) (0 where B + R == 0); a pixel is
// cloud when Y <= threshold. Only the R and B channels participate.
BinaryMask cloud_mask(const Image& img, double threshold = 0.30);

// Morphological opening followed by closing with a circular structuring
// element of the given odd diameter; smooths a mask toward hand-drawn
// strokes. Neighborhoods are clipped at the raster edge (an all-ones mask is
// a fixed point).
BinaryMask hand_drawn(const BinaryMask& mask, int diameter = 15);

struct SolarMasks {
    BinaryMask disk;
    BinaryMask corona;
};

// Disk: pixel centers within 0.25 deg of the sun direction; when that set is
// empty (sub-pixel sun) the angularly nearest mapped pixel is promoted.
// Corona: within 2.5 deg, excluding disk pixels. The sun must be at or above
// the horizon.
SolarMasks solar_mask(MapFormat f, int width, int height, const Direction& sun);

// Combines masks by priority disk > corona > cloud > sky; everything outside
// the mapped domain is border (class 0).
SegmentationLabel composite_label(const BinaryMask& cloud, const SolarMasks& solar,
                                  MapFormat f);

}  // namespace fdr
