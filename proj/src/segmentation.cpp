#include "fdrkit/segmentation.hpp"

#include <cmath>
#include <utility>

#include "fdrkit/tonemap.hpp"

namespace fdr {

static const double kPi = 3.14159265358979323846;
static const double kDiskRadiusDeg = 0.25;   // solar disk: 0.5 deg diameter
static const double kCoronaRadiusDeg = 2.5;  // circumsolar region: 5 deg diameter

BinaryMask cloud_mask(const Image& img, double threshold) {
    validate_radiance(img);
    if (img.channels != 3)
        throw std::invalid_argument("cloud_mask: needs 3-channel input");
    const ToneMapper tm = ToneMapper::mu_law_log2();
    BinaryMask mask(img.width, img.height);
    for (size_t p = 0; p < img.pixel_count(); ++p) {
        const double r = tm.apply(img.data[p * 3 + 0]);
        const double b = tm.apply(img.data[p * 3 + 2]);
        const double sum = b + r;
        const double y = (sum == 0.0) ? 0.0 : (b - r) / sum;
        mask.data[p] = (y <= threshold) ? 1 : 0;
    }
    return mask;
}

namespace {

// Offsets of a circular structuring element with the given odd diameter.
std::vector<std::pair<int, int>> disk_offsets(int diameter) {
    const int radius = diameter / 2;
    const double r2 = (diameter / 2.0) * (diameter / 2.0);
    std::vector<std::pair<int, int>> offsets;
    for (int di = -radius; di <= radius; ++di)
        for (int dj = -radius; dj <= radius; ++dj)
            if (di * di + dj * dj <= r2) offsets.emplace_back(di, dj);
    return offsets;
}

// Neighborhoods are intersected with the raster, so a constant mask is a
// fixed point of both operators.
BinaryMask morph(const BinaryMask& mask, const std::vector<std::pair<int, int>>& se,
                 bool erode) {
    BinaryMask out(mask.width, mask.height);
    for (int i = 0; i < mask.height; ++i) {
        for (int j = 0; j < mask.width; ++j) {
            uint8_t v = erode ? 1 : 0;
            for (const auto& [di, dj] : se) {
                const int ii = i + di, jj = j + dj;
                if (ii < 0 || ii >= mask.height || jj < 0 || jj >= mask.width) continue;
                const uint8_t s = mask.at(ii, jj);
                if (erode) {
                    if (!s) { v = 0; break; }
                } else {
                    if (s) { v = 1; break; }
                }
            }
            out.at(i, j) = v;
        }
    }
    return out;
}

}  // namespace

BinaryMask hand_drawn(const BinaryMask& mask, int diameter) {
    if (mask.width <= 0 || mask.height <= 0)
        throw std::invalid_argument("hand_drawn: empty mask");
    if (diameter <= 0 || diameter % 2 == 0)
        throw std::invalid_argument("hand_drawn: diameter must be odd and > 0");
    const auto se = disk_offsets(diameter);
    // Opening removes specks, closing fills pinholes.
    BinaryMask opened = morph(morph(mask, se, true), se, false);
    return morph(morph(opened, se, false), se, true);
}

SolarMasks solar_mask(MapFormat f, int width, int height, const Direction& sun) {
    const Direction s = sun.normalized();
    if (s.z < 0.0)
        throw std::invalid_argument("solar_mask: sun must be at or above the horizon");
    const double disk_rad = kDiskRadiusDeg * kPi / 180.0;
    const double corona_rad = kCoronaRadiusDeg * kPi / 180.0;

    SolarMasks masks;
    masks.disk = BinaryMask(width, height);
    masks.corona = BinaryMask(width, height);

    bool disk_hit = false;
    double best_angle = 2.0 * kPi;
    int best_i = -1, best_j = -1;
    for (int i = 0; i < height; ++i) {
        for (int j = 0; j < width; ++j) {
            const auto dir = pixel_direction(f, width, height, i, j);
            if (!dir) continue;
            const double a = dir->angle_to(s);
            if (a <= disk_rad) {
                masks.disk.at(i, j) = 1;
                disk_hit = true;
            } else if (a <= corona_rad) {
                masks.corona.at(i, j) = 1;
            }
            if (a < best_angle) {
                best_angle = a;
                best_i = i;
                best_j = j;
            }
        }
    }
    if (!disk_hit) {
        if (best_i < 0)
            throw std::invalid_argument("solar_mask: raster has no mapped pixels");
        // Sub-pixel sun: promote the nearest mapped pixel.
        masks.disk.at(best_i, best_j) = 1;
        masks.corona.at(best_i, best_j) = 0;
    }
    return masks;
}

SegmentationLabel composite_label(const BinaryMask& cloud, const SolarMasks& solar,
                                  MapFormat f) {
    const int w = cloud.width, h = cloud.height;
    if (w <= 0 || h <= 0) throw std::invalid_argument("composite_label: empty masks");
    if (solar.disk.width != w || solar.disk.height != h || solar.corona.width != w ||
        solar.corona.height != h)
        throw std::invalid_argument("composite_label: mask shapes differ");

    SegmentationLabel label(w, h, f);
    for (int i = 0; i < h; ++i) {
        for (int j = 0; j < w; ++j) {
            if (f != MapFormat::None && !pixel_direction(f, w, h, i, j)) {
                label.at(i, j) = kClassBorder;
                continue;
            }
            if (solar.disk.at(i, j))
                label.at(i, j) = kClassDisk;
            else if (solar.corona.at(i, j))
                label.at(i, j) = kClassCorona;
            else if (cloud.at(i, j))
                label.at(i, j) = kClassCloud;
            else
                label.at(i, j) = kClassSky;
        }
    }
    return label;
}

}  // namespace fdr
