#include "fdrkit/synth.hpp"

#include <cmath>
#include <stdexcept>

namespace fdr {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kDegToRad = kPi / 180.0;

uint64_t splitmix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

// Uniform [0,1) hash of a lattice point.
double lattice(uint64_t seed, int64_t xi, int64_t yi) {
    uint64_t h = splitmix64(seed);
    h = splitmix64(h ^ static_cast<uint64_t>(xi));
    h = splitmix64(h ^ static_cast<uint64_t>(yi));
    return static_cast<double>(h >> 11) * 0x1.0p-53;
}

double fade(double t) { return t * t * (3.0 - 2.0 * t); }

double lerp(double a, double b, double t) { return a + (b - a) * t; }

// Smoothly interpolated value noise in [0,1).
double value_noise(uint64_t seed, double x, double y) {
    const double fx = std::floor(x), fy = std::floor(y);
    const int64_t xi = static_cast<int64_t>(fx), yi = static_cast<int64_t>(fy);
    const double tx = fade(x - fx), ty = fade(y - fy);
    const double v00 = lattice(seed, xi, yi), v10 = lattice(seed, xi + 1, yi);
    const double v01 = lattice(seed, xi, yi + 1), v11 = lattice(seed, xi + 1, yi + 1);
    return lerp(lerp(v00, v10, tx), lerp(v01, v11, tx), ty);
}

// Four-octave fractal sum, normalized back into [0,1).
double fbm(uint64_t seed, double x, double y) {
    double sum = 0.0, amp = 0.5, freq = 1.0, norm = 0.0;
    for (int octave = 0; octave < 4; ++octave) {
        sum += amp * value_noise(seed + static_cast<uint64_t>(octave), x * freq, y * freq);
        norm += amp;
        freq *= 2.0;
        amp *= 0.5;
    }
    return sum / norm;
}

double smoothstep(double e0, double e1, double x) {
    const double t = std::clamp((x - e0) / (e1 - e0), 0.0, 1.0);
    return fade(t);
}

}  // namespace

Image synth_sky(const SynthParams& params) {
    if (params.size <= 0) throw std::invalid_argument("synth_sky: size must be positive");
    if (params.format == MapFormat::None)
        throw std::invalid_argument("synth_sky: an environment-map format is required");
    if (!(params.sun_intensity >= 0.0))
        throw std::invalid_argument("synth_sky: sun_intensity must be >= 0");
    if (!(params.cloud_amount >= 0.0 && params.cloud_amount <= 1.0))
        throw std::invalid_argument("synth_sky: cloud_amount must be in [0,1]");
    if (!(params.base_brightness > 0.0))
        throw std::invalid_argument("synth_sky: base_brightness must be positive");

    const Resolution res = canonical_resolution(params.format, params.size);
    Image img(res.width, res.height, 3, params.format);

    const Direction sun = Direction::from_azimuth_elevation(
        params.sun_azimuth_deg * kDegToRad, params.sun_elevation_deg * kDegToRad);
    const double disk_radius = 0.25 * kDegToRad;
    const double corona_sigma = 1.5 * kDegToRad;

    // Cloud coverage: pixels whose fbm value exceeds the moving threshold
    // become cloud, so cloud_amount ~ area fraction.
    const double cover = 1.0 - params.cloud_amount;

    for (int i = 0; i < img.height; ++i) {
        for (int j = 0; j < img.width; ++j) {
            const auto dir =
                pixel_direction(params.format, img.width, img.height, i, j);
            if (!dir) continue;  // outside the sky-angular disk: stays zero
            const Direction d = *dir;
            double r, g, b;
            if (d.z >= 0.0) {
                // Azimuth-continuous noise coordinates: polar map of the dome.
                const double theta = std::acos(std::clamp(d.z, -1.0, 1.0));
                const double phi = std::atan2(d.y, d.x);
                const double nx = std::cos(phi) * theta * 2.0;
                const double ny = std::sin(phi) * theta * 2.0;

                // Blue gradient, mildly brighter toward the horizon.
                const double base = params.base_brightness * (1.0 + (1.0 - d.z));
                r = base * 0.35;
                g = base * 0.55;
                b = base * 1.00;

                // Gray clouds (B ~ R) blended over the sky.
                const double n = fbm(params.seed, nx, ny);
                const double w = smoothstep(cover - 0.15, cover + 0.15, n);
                const double cloud = base * (1.2 + 0.8 * n);
                r = lerp(r, cloud, w);
                g = lerp(g, cloud, w);
                b = lerp(b, cloud * 1.02, w);

                // Solar disk plus a Gaussian corona glow.
                const double angle = d.angle_to(sun);
                const double glow =
                    params.sun_intensity * 0.05 *
                    std::exp(-(angle * angle) / (2.0 * corona_sigma * corona_sigma));
                r += glow;
                g += glow * 0.97;
                b += glow * 0.90;
                if (angle <= disk_radius) {
                    r += params.sun_intensity;
                    g += params.sun_intensity * 0.97;
                    b += params.sun_intensity * 0.90;
                }
            } else {
                // Below the horizon (full-sphere latitude-longitude): dim ground.
                const double n =
                    value_noise(params.seed + 97, d.x * 6.0, d.y * 6.0);
                const double ground = params.base_brightness * 0.05 * (0.8 + 0.4 * n);
                r = ground;
                g = ground * 0.9;
                b = ground * 0.75;
            }
            img.at(i, j, 0) = r;
            img.at(i, j, 1) = g;
            img.at(i, j, 2) = b;
        }
    }
    return img;
}

}  // namespace fdr
