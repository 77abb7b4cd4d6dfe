#include "fdrkit/image.hpp"

#include <algorithm>
#include <cmath>

#include "fdrkit/geometry.hpp"
#include "fdrkit/metrics.hpp"

namespace fdr {

// Rec.709 luma weights
static const double kLumaR = 0.2126;
static const double kLumaG = 0.7152;
static const double kLumaB = 0.0722;

std::string to_string(MapFormat f) {
    switch (f) {
        case MapFormat::None: return "none";
        case MapFormat::SkyAngular: return "sky-angular";
        case MapFormat::SkyLatlong: return "sky-latlong";
        case MapFormat::Latlong: return "latlong";
    }
    throw std::invalid_argument("to_string: bad MapFormat");
}

MapFormat parse_map_format(const std::string& s) {
    if (s == "none") return MapFormat::None;
    if (s == "sky-angular") return MapFormat::SkyAngular;
    if (s == "sky-latlong") return MapFormat::SkyLatlong;
    if (s == "latlong") return MapFormat::Latlong;
    throw std::invalid_argument("unknown map format '" + s + "'");
}

void validate_radiance(const Image& img) {
    if (img.width <= 0 || img.height <= 0 || img.channels <= 0)
        throw std::invalid_argument("radiance image: empty");
    if (img.data.size() != img.sample_count() || img.sample_count() !=
        static_cast<size_t>(img.width) * img.height * img.channels)
        throw std::invalid_argument("radiance image: data size mismatch");
    if (img.format == MapFormat::SkyAngular && img.width != img.height)
        throw std::invalid_argument("radiance image: sky-angular maps must be square");
    for (double v : img.data)
        if (!std::isfinite(v) || v < 0.0)
            throw std::invalid_argument("radiance image: samples must be finite and >= 0");
}

void validate_ldr(const Image& img) {
    validate_radiance(img);
    for (double v : img.data)
        if (v > 1.0)
            throw std::invalid_argument("ldr image: samples must be <= 1");
}

Image grayscale(const Image& img) {
    if (img.channels == 1) {
        Image out = img;
        for (double& v : out.data) v = std::abs(v);
        return out;
    }
    if (img.channels != 3)
        throw std::invalid_argument("grayscale: expected 1 or 3 channels");
    Image out(img.width, img.height, 1, img.format);
    const double* src = img.data.data();
    for (size_t p = 0; p < img.pixel_count(); ++p) {
        const double* px = src + p * 3;
        out.data[p] = kLumaR * std::abs(px[0]) + kLumaG * std::abs(px[1]) +
                      kLumaB * std::abs(px[2]);
    }
    return out;
}

void rgb_to_hsv_pixel(double r, double g, double b, double& h, double& s, double& v) {
    v = std::max({r, g, b});
    const double mn = std::min({r, g, b});
    const double c = v - mn;
    s = (v == 0.0) ? 0.0 : c / v;
    if (c == 0.0) {
        h = 0.0;
        return;
    }
    if (v == r)
        h = 60.0 * (g - b) / c;
    else if (v == g)
        h = 120.0 + 60.0 * (b - r) / c;
    else
        h = 240.0 + 60.0 * (r - g) / c;
    if (h < 0.0) h += 360.0;
    if (h >= 360.0) h -= 360.0;
}

void hsv_to_rgb_pixel(double h, double s, double v, double& r, double& g, double& b) {
    if (s == 0.0) {
        r = g = b = v;
        return;
    }
    double hp = h / 60.0;
    hp = hp - 6.0 * std::floor(hp / 6.0);  // wrap into [0, 6)
    const double c = v * s;
    const double x = c * (1.0 - std::abs(std::fmod(hp, 2.0) - 1.0));
    const double m = v - c;
    double rp = 0, gp = 0, bp = 0;
    switch (static_cast<int>(hp)) {
        case 0: rp = c; gp = x; break;
        case 1: rp = x; gp = c; break;
        case 2: gp = c; bp = x; break;
        case 3: gp = x; bp = c; break;
        case 4: rp = x; bp = c; break;
        default: rp = c; bp = x; break;
    }
    r = rp + m;
    g = gp + m;
    b = bp + m;
}

Image rgb_to_hsv(const Image& img) {
    if (img.channels != 3)
        throw std::invalid_argument("rgb_to_hsv: expected 3 channels");
    Image out(img.width, img.height, 3, img.format);
    for (size_t p = 0; p < img.pixel_count(); ++p) {
        const double* px = img.data.data() + p * 3;
        double* q = out.data.data() + p * 3;
        rgb_to_hsv_pixel(px[0], px[1], px[2], q[0], q[1], q[2]);
    }
    return out;
}

Image hsv_to_rgb(const Image& img) {
    if (img.channels != 3)
        throw std::invalid_argument("hsv_to_rgb: expected 3 channels");
    Image out(img.width, img.height, 3, img.format);
    for (size_t p = 0; p < img.pixel_count(); ++p) {
        const double* px = img.data.data() + p * 3;
        double* q = out.data.data() + p * 3;
        hsv_to_rgb_pixel(px[0], px[1], px[2], q[0], q[1], q[2]);
    }
    return out;
}

Image clip_to_ev(const Image& img, double ev_target, bool equalize) {
    validate_radiance(img);
    if (ev_target < 0.0 || !std::isfinite(ev_target))
        throw std::invalid_argument("clip_to_ev: ev_target must be >= 0");

    const Image gray = grayscale(img);
    const double m = *std::min_element(gray.data.begin(), gray.data.end());
    const double threshold = m + std::exp2(ev_target) - 1.0;

    Image out = img;
    for (double& v : out.data) v = std::min(v, threshold);

    if (equalize) {
        SolidAngleMap omega;
        if (img.format != MapFormat::None) {
            omega = solid_angle_map(img.format, img.width, img.height);
        } else {
            omega.width = img.width;
            omega.height = img.height;
            omega.format = MapFormat::None;
            omega.omega.assign(img.pixel_count(), 1.0);
        }
        const double before = integrated_illumination(img, omega);
        const double after = integrated_illumination(out, omega);
        if (after > 0.0) {
            const double scale = before / after;
            for (double& v : out.data) v *= scale;
        }
    }
    return out;
}

}  // namespace fdr
