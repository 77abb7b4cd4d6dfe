#pragma once

#include <optional>
#include <string>

#include "fdrkit/geometry.hpp"
#include "fdrkit/image.hpp"

namespace fdr {

// Dynamic range in stops: log2(max|I| - min|I| + 1) over grayscale intensity.
// With a solid-angle map, pixels with omega == 0 are excluded by default
// (exclude_zero_omega toggles that).
double exposure_value(const Image& img);
double exposure_value(const Image& img, const SolidAngleMap& omega,
                      bool exclude_zero_omega = true);

// Total illumination energy: sum of omega * |I| over grayscale intensity,
// accumulated with compensated summation in row-major order.
double integrated_illumination(const Image& img, const SolidAngleMap& omega);

// max over pixels of omega * |I| (grayscale).
double peak_luminance(const Image& img, const SolidAngleMap& omega);

struct IlluminationReport {
    double ev = 0.0;
    double integrated_illumination = 0.0;
    double peak_luminance = 0.0;
    long pixels = 0;  // pixels measured (omega > 0 when a map participates)

    // Flat JSON object with keys exactly:
    // ev, integrated_illumination, peak_luminance, pixels.
    std::string to_json() const;
};

IlluminationReport illumination_report(const Image& img, const SolidAngleMap& omega);

}  // namespace fdr
