#include "fdrkit/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace fdr {

static const double kPi = 3.14159265358979323846;

Direction Direction::from_azimuth_elevation(double azimuth_rad, double elevation_rad) {
    Direction d;
    const double ce = std::cos(elevation_rad);
    d.x = ce * std::cos(azimuth_rad);
    d.y = ce * std::sin(azimuth_rad);
    d.z = std::sin(elevation_rad);
    return d;
}

Direction Direction::normalized() const {
    const double n = std::sqrt(x * x + y * y + z * z);
    if (!(n > 0.0) || !std::isfinite(n))
        throw std::invalid_argument("Direction: cannot normalize zero/non-finite vector");
    return Direction{x / n, y / n, z / n};
}

double Direction::angle_to(const Direction& o) const {
    return std::acos(std::clamp(dot(o), -1.0, 1.0));
}

Resolution canonical_resolution(MapFormat f, int size) {
    if (size <= 0) throw std::invalid_argument("canonical_resolution: size must be > 0");
    switch (f) {
        case MapFormat::SkyAngular: return {size, size};
        case MapFormat::SkyLatlong: return {4 * size, size};
        case MapFormat::Latlong: return {2 * size, size};
        case MapFormat::None: break;
    }
    throw std::invalid_argument("canonical_resolution: format has no raster layout");
}

double solid_angle_of_disk(double theta) {
    if (!(theta >= 0.0) || theta > 2.0 * kPi || !std::isfinite(theta))
        throw std::invalid_argument("solid_angle_of_disk: theta must be in [0, 2*pi]");
    return 2.0 * kPi * (1.0 - std::cos(theta / 2.0));
}

static void check_raster(MapFormat f, int width, int height, int row, int col) {
    if (width <= 0 || height <= 0)
        throw std::invalid_argument("pixel mapping: empty raster");
    if (f == MapFormat::None)
        throw std::invalid_argument("pixel mapping: format 'none' has no geometry");
    if (f == MapFormat::SkyAngular && width != height)
        throw std::invalid_argument("pixel mapping: sky-angular raster must be square");
    if (row < 0 || row >= height || col < 0 || col >= width)
        throw std::out_of_range("pixel mapping: pixel index out of range");
}

std::optional<Direction> pixel_direction(MapFormat f, int width, int height,
                                         int row, int col) {
    check_raster(f, width, height, row, col);
    switch (f) {
        case MapFormat::SkyAngular: {
            const int s = width;
            const double u = (2.0 * col + 1.0) / s - 1.0;
            const double v = (2.0 * row + 1.0) / s - 1.0;
            const double r = std::sqrt(u * u + v * v);
            if (r > 1.0) return std::nullopt;
            const double theta_z = r * kPi / 2.0;
            const double phi = std::atan2(v, u);
            const double st = std::sin(theta_z);
            return Direction{st * std::cos(phi), st * std::sin(phi), std::cos(theta_z)};
        }
        case MapFormat::SkyLatlong:
        case MapFormat::Latlong: {
            const double span = (f == MapFormat::SkyLatlong) ? kPi / 2.0 : kPi;
            const double theta_z = (row + 0.5) / height * span;
            const double phi = (col + 0.5) / width * 2.0 * kPi;
            const double st = std::sin(theta_z);
            return Direction{st * std::cos(phi), st * std::sin(phi), std::cos(theta_z)};
        }
        case MapFormat::None: break;
    }
    return std::nullopt;
}

std::optional<PixelCoord> direction_to_pixel(MapFormat f, int width, int height,
                                             const Direction& d) {
    if (width <= 0 || height <= 0)
        throw std::invalid_argument("direction_to_pixel: empty raster");
    const double theta_z = std::acos(std::clamp(d.z, -1.0, 1.0));
    switch (f) {
        case MapFormat::SkyAngular: {
            if (d.z < 0.0) return std::nullopt;
            const int s = width;
            const double r = theta_z / (kPi / 2.0);
            const double phi = std::atan2(d.y, d.x);
            const double u = r * std::cos(phi);
            const double v = r * std::sin(phi);
            return PixelCoord{((v + 1.0) * s - 1.0) / 2.0, ((u + 1.0) * s - 1.0) / 2.0};
        }
        case MapFormat::SkyLatlong:
        case MapFormat::Latlong: {
            const double span = (f == MapFormat::SkyLatlong) ? kPi / 2.0 : kPi;
            if (f == MapFormat::SkyLatlong && d.z < 0.0) return std::nullopt;
            double phi = std::atan2(d.y, d.x);
            if (phi < 0.0) phi += 2.0 * kPi;
            return PixelCoord{theta_z / span * height - 0.5, phi / (2.0 * kPi) * width - 0.5};
        }
        case MapFormat::None:
            throw std::invalid_argument("direction_to_pixel: format 'none' has no geometry");
    }
    return std::nullopt;
}

SolidAngleMap solid_angle_map(MapFormat f, int width, int height) {
    if (width <= 0 || height <= 0)
        throw std::invalid_argument("solid_angle_map: empty raster");
    SolidAngleMap map;
    map.width = width;
    map.height = height;
    map.format = f;
    map.omega.assign(static_cast<size_t>(width) * height, 0.0);

    switch (f) {
        case MapFormat::SkyAngular: {
            if (width != height)
                throw std::invalid_argument("solid_angle_map: sky-angular raster must be square");
            const int s = width;
            const double cell = (2.0 / s) * (2.0 / s);
            for (int i = 0; i < s; ++i) {
                for (int j = 0; j < s; ++j) {
                    const double u = (2.0 * j + 1.0) / s - 1.0;
                    const double v = (2.0 * i + 1.0) / s - 1.0;
                    const double r = std::sqrt(u * u + v * v);
                    if (r > 1.0) continue;
                    // Area element ratio dOmega/dA = (pi/2) sin(r pi/2)/r,
                    // with the removable singularity at r = 0.
                    const double jac = (r == 0.0)
                                           ? (kPi / 2.0) * (kPi / 2.0)
                                           : (kPi / 2.0) * std::sin(r * kPi / 2.0) / r;
                    map.omega[static_cast<size_t>(i) * s + j] = jac * cell;
                }
            }
            break;
        }
        case MapFormat::SkyLatlong:
        case MapFormat::Latlong: {
            const double span = (f == MapFormat::SkyLatlong) ? kPi / 2.0 : kPi;
            const double dphi = 2.0 * kPi / width;
            for (int i = 0; i < height; ++i) {
                const double t0 = static_cast<double>(i) / height * span;
                const double t1 = static_cast<double>(i + 1) / height * span;
                const double band = dphi * (std::cos(t0) - std::cos(t1));
                for (int j = 0; j < width; ++j)
                    map.omega[static_cast<size_t>(i) * width + j] = band;
            }
            break;
        }
        case MapFormat::None:
            throw std::invalid_argument("solid_angle_map: format 'none' has no geometry");
    }
    return map;
}

SolidAngleMap solid_angle_map(MapFormat f, int size) {
    const Resolution res = canonical_resolution(f, size);
    return solid_angle_map(f, res.width, res.height);
}

// Largest pixel solid angle at the canonical raster of this size, computed
// without materializing the map (the search below may probe large sizes).
static double max_pixel_omega(MapFormat f, int size) {
    const Resolution res = canonical_resolution(f, size);
    switch (f) {
        case MapFormat::SkyAngular: {
            // The most-central pixel has the largest area ratio.
            double jac;
            if (size % 2 == 1) {
                jac = (kPi / 2.0) * (kPi / 2.0);
            } else {
                const double r = std::sqrt(2.0) / size;
                jac = (kPi / 2.0) * std::sin(r * kPi / 2.0) / r;
            }
            return jac * (2.0 / size) * (2.0 / size);
        }
        case MapFormat::SkyLatlong:
        case MapFormat::Latlong: {
            const double span = (f == MapFormat::SkyLatlong) ? kPi / 2.0 : kPi;
            const double dphi = 2.0 * kPi / res.width;
            double best = 0.0;
            for (int i = 0; i < res.height; ++i) {
                const double t0 = static_cast<double>(i) / res.height * span;
                const double t1 = static_cast<double>(i + 1) / res.height * span;
                best = std::max(best, dphi * (std::cos(t0) - std::cos(t1)));
            }
            return best;
        }
        case MapFormat::None: break;
    }
    throw std::invalid_argument("max_pixel_omega: format 'none' has no geometry");
}

Resolution min_viable_resolution(double theta, MapFormat f) {
    if (!(theta > 0.0))
        throw std::invalid_argument("min_viable_resolution: theta must be > 0");
    const double target = solid_angle_of_disk(theta);
    if (f == MapFormat::None)
        throw std::invalid_argument("min_viable_resolution: format 'none' has no geometry");
    for (int size = 2; size <= (1 << 16); size *= 2) {
        if (max_pixel_omega(f, size) <= target) {
            // Conversion formats need 2x linear headroom to survive
            // resampling into the minimal sky-angular raster.
            const int final_size = (f == MapFormat::SkyAngular) ? size : 2 * size;
            return canonical_resolution(f, final_size);
        }
    }
    throw std::invalid_argument("min_viable_resolution: theta too small");
}

Image downsample_avg(const Image& img, int factor) {
    if (factor <= 0) throw std::invalid_argument("downsample_avg: factor must be > 0");
    if (img.width % factor != 0 || img.height % factor != 0)
        throw std::invalid_argument("downsample_avg: dimensions not divisible by factor");
    if (factor == 1) return img;
    Image out(img.width / factor, img.height / factor, img.channels, img.format);
    const double inv = 1.0 / (static_cast<double>(factor) * factor);
    for (int i = 0; i < out.height; ++i) {
        for (int j = 0; j < out.width; ++j) {
            for (int c = 0; c < img.channels; ++c) {
                double acc = 0.0;
                for (int di = 0; di < factor; ++di)
                    for (int dj = 0; dj < factor; ++dj)
                        acc += img.at(i * factor + di, j * factor + dj, c);
                out.at(i, j, c) = acc * inv;
            }
        }
    }
    return out;
}

namespace {

// Bilinear lookup with azimuth wrap for the latlong family and zeros outside
// the mapped domain (sky-angular corners / missing rows).
double sample_bilinear(const Image& img, double row, double col, int ch) {
    const bool wrap = img.format == MapFormat::SkyLatlong || img.format == MapFormat::Latlong;
    const int i0 = static_cast<int>(std::floor(row));
    const int j0 = static_cast<int>(std::floor(col));
    const double fi = row - i0;
    const double fj = col - j0;
    double acc = 0.0;
    for (int di = 0; di <= 1; ++di) {
        int i = i0 + di;
        i = std::clamp(i, 0, img.height - 1);
        for (int dj = 0; dj <= 1; ++dj) {
            int j = j0 + dj;
            if (wrap) {
                j = ((j % img.width) + img.width) % img.width;
            } else {
                j = std::clamp(j, 0, img.width - 1);
            }
            const double w = (di ? fi : 1.0 - fi) * (dj ? fj : 1.0 - fj);
            acc += w * img.at(i, j, ch);
        }
    }
    return acc;
}

int size_parameter(const Image& img) {
    // The scalar size in canonical_resolution terms.
    return img.height;
}

// Pixels along the zenith-to-horizon arc, the format-independent detail measure.
double arc_resolution(MapFormat f, int size) {
    switch (f) {
        case MapFormat::SkyAngular: return size / 2.0;
        case MapFormat::SkyLatlong: return size;
        case MapFormat::Latlong: return size / 2.0;
        case MapFormat::None: break;
    }
    throw std::invalid_argument("arc_resolution: format 'none' has no geometry");
}

int size_for_arc(MapFormat f, double arc) {
    switch (f) {
        case MapFormat::SkyAngular: return static_cast<int>(std::ceil(arc * 2.0));
        case MapFormat::SkyLatlong: return static_cast<int>(std::ceil(arc));
        case MapFormat::Latlong: return static_cast<int>(std::ceil(arc * 2.0));
        case MapFormat::None: break;
    }
    throw std::invalid_argument("size_for_arc: format 'none' has no geometry");
}

void zero_outside_disk(Image& img) {
    const int s = img.width;
    for (int i = 0; i < s; ++i) {
        for (int j = 0; j < s; ++j) {
            const double u = (2.0 * j + 1.0) / s - 1.0;
            const double v = (2.0 * i + 1.0) / s - 1.0;
            if (u * u + v * v > 1.0)
                for (int c = 0; c < img.channels; ++c) img.at(i, j, c) = 0.0;
        }
    }
}

}  // namespace

Image convert_format(const Image& img, MapFormat target, int target_size) {
    validate_radiance(img);
    if (img.format == MapFormat::None || target == MapFormat::None)
        throw std::invalid_argument("convert_format: source and target need a map format");
    if (target_size <= 0)
        throw std::invalid_argument("convert_format: target size must be > 0");

    const int src_size = size_parameter(img);
    const bool src_canonical =
        canonical_resolution(img.format, src_size) == Resolution{img.width, img.height};

    // Grid-identical request: nothing to resample.
    if (img.format == target && src_size == target_size && src_canonical) {
        Image out = img;
        if (target == MapFormat::SkyAngular) zero_outside_disk(out);
        return out;
    }

    // Samples outside the fisheye disk are 0 by convention; enforce it so
    // rim lookups never mix in stray corner values.
    Image source = img;
    if (source.format == MapFormat::SkyAngular) zero_outside_disk(source);

    // Work at max(source detail, 2x target), rounded up to a multiple of the
    // target so the final block average is exact.
    const double arc = std::max(arc_resolution(img.format, src_size),
                                2.0 * arc_resolution(target, target_size));
    int work_size = size_for_arc(target, arc);
    work_size = ((work_size + target_size - 1) / target_size) * target_size;
    const int factor = work_size / target_size;

    const Resolution work_res = canonical_resolution(target, work_size);
    Image work(work_res.width, work_res.height, img.channels, target);

    const bool same_format = img.format == target && src_canonical;
    for (int i = 0; i < work.height; ++i) {
        for (int j = 0; j < work.width; ++j) {
            double row, col;
            if (same_format) {
                // Same projection: plain grid scaling, no trig round trip.
                const double scale = static_cast<double>(src_size) / work_size;
                row = (i + 0.5) * scale - 0.5;
                col = (j + 0.5) * scale - 0.5;
                if (target == MapFormat::SkyAngular) {
                    const int s = work.width;
                    const double u = (2.0 * j + 1.0) / s - 1.0;
                    const double v = (2.0 * i + 1.0) / s - 1.0;
                    if (u * u + v * v > 1.0) continue;
                }
            } else {
                const auto dir = pixel_direction(target, work.width, work.height, i, j);
                if (!dir) continue;
                const auto pc = direction_to_pixel(source.format, source.width,
                                                   source.height, *dir);
                if (!pc) continue;
                row = pc->row;
                col = pc->col;
            }
            for (int c = 0; c < source.channels; ++c)
                work.at(i, j, c) = sample_bilinear(source, row, col, c);
        }
    }

    Image out = downsample_avg(work, factor);
    if (target == MapFormat::SkyAngular) zero_outside_disk(out);
    return out;
}

}  // namespace fdr
