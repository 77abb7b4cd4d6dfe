#pragma once

#include <optional>

#include "fdrkit/image.hpp"

namespace fdr {

// Unit direction, +z up. Azimuth is measured from +x toward +y; elevation from
// the horizon plane.
struct Direction {
    double x = 0.0, y = 0.0, z = 1.0;

    static Direction from_azimuth_elevation(double azimuth_rad, double elevation_rad);
    Direction normalized() const;
    double dot(const Direction& o) const { return x * o.x + y * o.y + z * o.z; }
    // Angle to another unit direction, radians in [0, pi].
    double angle_to(const Direction& o) const;
};

// Continuous pixel coordinates (row, col); pixel centers sit at integers.
struct PixelCoord {
    double row = 0.0;
    double col = 0.0;
};

struct Resolution {
    int width = 0;
    int height = 0;
    bool operator==(const Resolution&) const = default;
};

// Canonical raster shape for a format and its scalar size parameter:
// sky-angular size S -> S x S, sky-latlong height H -> H x 4H,
// latlong height H -> H x 2H.
Resolution canonical_resolution(MapFormat f, int size);

// Solid angle of a spherical cap of angular *diameter* theta (radians):
// 2*pi*(1 - cos(theta/2)).
double solid_angle_of_disk(double theta);

// Direction of the pixel center at (row, col), or nullopt for rasters
// positions outside the mapped domain (sky-angular corners).
std::optional<Direction> pixel_direction(MapFormat f, int width, int height,
                                         int row, int col);

// Inverse lookup: continuous raster coordinates of a direction, or nullopt if
// the direction is outside the format's coverage (below the horizon for the
// sky formats). Columns are reported in [-0.5, width - 0.5) with azimuth wrap.
std::optional<PixelCoord> direction_to_pixel(MapFormat f, int width, int height,
                                             const Direction& d);

// Per-pixel solid angles. Pixels outside the mapped domain get 0.
struct SolidAngleMap {
    int width = 0;
    int height = 0;
    MapFormat format = MapFormat::None;
    std::vector<double> omega;

    double at(int row, int col) const {
        return omega[static_cast<size_t>(row) * width + col];
    }
};

SolidAngleMap solid_angle_map(MapFormat f, int width, int height);
SolidAngleMap solid_angle_map(MapFormat f, int size);

// Smallest power-of-two raster that resolves a disk of angular diameter theta.
// The modeling format (sky-angular) uses the direct criterion: max pixel solid
// angle <= solid_angle_of_disk(theta). The conversion formats (latlong,
// sky-latlong) carry 2x linear headroom on top of that so they survive
// resampling into the minimal sky-angular raster.
Resolution min_viable_resolution(double theta, MapFormat f);

// Block-mean downsampling; dimensions must be divisible by factor.
Image downsample_avg(const Image& img, int factor);

// Reprojects between environment-map formats. Resampling happens on a working
// grid of the target format at max(source detail, 2x target) resolution via
// inverse-mapped bilinear lookups, then block-averages down to the target.
// Directions outside the source coverage contribute 0.
Image convert_format(const Image& img, MapFormat target, int target_size);

}  // namespace fdr
