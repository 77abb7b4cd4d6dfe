#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace fdr {

// Environment-map projection carried by an image. None means "just a raster".
enum class MapFormat {
    None,
    SkyAngular,   // square fisheye of the upper hemisphere, equi-angular in zenith angle
    SkyLatlong,   // upper hemisphere, rows linear in zenith angle over [0, pi/2]
    Latlong       // full sphere, rows linear in zenith angle over [0, pi]
};

std::string to_string(MapFormat f);
MapFormat parse_map_format(const std::string& s);

// Row-major interleaved raster, top-to-bottom. Radiance images are linear and
// non-negative; LDR images additionally live in [0, 1]. Samples are doubles in
// memory; file formats quantize on write as documented in io.hpp.
struct Image {
    int width = 0;
    int height = 0;
    int channels = 0;
    MapFormat format = MapFormat::None;
    std::vector<double> data;

    Image() = default;
    Image(int w, int h, int c, MapFormat f = MapFormat::None)
        : width(w), height(h), channels(c), format(f),
          data(static_cast<size_t>(w) * h * c, 0.0) {
        if (w <= 0 || h <= 0 || c <= 0)
            throw std::invalid_argument("Image: dimensions must be positive");
    }

    size_t index(int row, int col, int ch) const {
        return (static_cast<size_t>(row) * width + col) * channels + ch;
    }
    double& at(int row, int col, int ch) { return data[index(row, col, ch)]; }
    double at(int row, int col, int ch) const { return data[index(row, col, ch)]; }

    size_t pixel_count() const { return static_cast<size_t>(width) * height; }
    size_t sample_count() const { return data.size(); }

    bool same_shape(const Image& o) const {
        return width == o.width && height == o.height && channels == o.channels;
    }
};

// Throws std::invalid_argument when the image is not a valid radiance map
// (finite, >= 0, non-empty; sky-angular maps must be square).
void validate_radiance(const Image& img);

// Additionally requires all samples in [0, 1].
void validate_ldr(const Image& img);

// Rec.709 luma for 3-channel images, pass-through copy for single-channel.
Image grayscale(const Image& img);

// Pixelwise RGB <-> HSV. Hue in degrees [0, 360), saturation in [0, 1], value
// unbounded above (HDR). Achromatic pixels map to H = 0, S = 0.
Image rgb_to_hsv(const Image& img);
Image hsv_to_rgb(const Image& img);

// Scalar-pixel variants used by the conversions above; exposed for reuse.
void rgb_to_hsv_pixel(double r, double g, double b, double& h, double& s, double& v);
void hsv_to_rgb_pixel(double h, double s, double v, double& r, double& g, double& b);

// Emulates a sensor of the given dynamic range: every channel value v becomes
// min(v, m + 2^ev - 1) where m is the minimum grayscale value of the input.
// With equalize set, the clipped image is rescaled so its integrated
// illumination matches the input (solid angles from the image's format, or
// uniform weights when format == None).
Image clip_to_ev(const Image& img, double ev_target, bool equalize = false);

}  // namespace fdr
