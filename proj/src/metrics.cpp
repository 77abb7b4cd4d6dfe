#include "fdrkit/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace fdr {

namespace {

// Neumaier-compensated accumulator; deterministic for a fixed visit order.
struct CompensatedSum {
    double sum = 0.0;
    double cor = 0.0;

    void add(double v) {
        const double t = sum + v;
        if (std::abs(sum) >= std::abs(v))
            cor += (sum - t) + v;
        else
            cor += (v - t) + sum;
        sum = t;
    }
    double value() const { return sum + cor; }
};

void check_pair(const Image& gray, const SolidAngleMap& omega) {
    if (gray.width != omega.width || gray.height != omega.height)
        throw std::invalid_argument("metrics: image and solid-angle map shapes differ");
}

}  // namespace

double exposure_value(const Image& img) {
    validate_radiance(img);
    const Image gray = grayscale(img);
    const auto [mn, mx] = std::minmax_element(gray.data.begin(), gray.data.end());
    return std::log2(*mx - *mn + 1.0);
}

double exposure_value(const Image& img, const SolidAngleMap& omega,
                      bool exclude_zero_omega) {
    validate_radiance(img);
    const Image gray = grayscale(img);
    check_pair(gray, omega);
    double mn = 0.0, mx = 0.0;
    bool seen = false;
    for (size_t p = 0; p < gray.data.size(); ++p) {
        if (exclude_zero_omega && omega.omega[p] <= 0.0) continue;
        const double v = gray.data[p];
        if (!seen) {
            mn = mx = v;
            seen = true;
        } else {
            mn = std::min(mn, v);
            mx = std::max(mx, v);
        }
    }
    if (!seen) throw std::invalid_argument("exposure_value: no pixels with omega > 0");
    return std::log2(mx - mn + 1.0);
}

double integrated_illumination(const Image& img, const SolidAngleMap& omega) {
    validate_radiance(img);
    const Image gray = grayscale(img);
    check_pair(gray, omega);
    CompensatedSum acc;
    for (size_t p = 0; p < gray.data.size(); ++p) acc.add(omega.omega[p] * gray.data[p]);
    return acc.value();
}

double peak_luminance(const Image& img, const SolidAngleMap& omega) {
    validate_radiance(img);
    const Image gray = grayscale(img);
    check_pair(gray, omega);
    double peak = 0.0;
    for (size_t p = 0; p < gray.data.size(); ++p)
        peak = std::max(peak, omega.omega[p] * gray.data[p]);
    return peak;
}

std::string IlluminationReport::to_json() const {
    std::ostringstream os;
    os.precision(17);
    os << "{\"ev\": " << ev << ", \"integrated_illumination\": " << integrated_illumination
       << ", \"peak_luminance\": " << peak_luminance << ", \"pixels\": " << pixels << "}";
    return os.str();
}

IlluminationReport illumination_report(const Image& img, const SolidAngleMap& omega) {
    IlluminationReport report;
    report.ev = exposure_value(img, omega);
    report.integrated_illumination = integrated_illumination(img, omega);
    report.peak_luminance = peak_luminance(img, omega);
    report.pixels = static_cast<long>(
        std::count_if(omega.omega.begin(), omega.omega.end(), [](double w) { return w > 0.0; }));
    return report;
}

}  // namespace fdr
