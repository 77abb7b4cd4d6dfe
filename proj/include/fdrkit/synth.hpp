#pragma once

#include <cstdint>

#include "fdrkit/geometry.hpp"
#include "fdrkit/image.hpp"

namespace fdr {

// Procedural clear-to-cloudy sky with a hot solar disk; deterministic in the
// seed. Intended for exercising the pipeline without captured data: values
// span roughly [1e-2, sun_intensity], clouds are gray (B ~ R) against a blue
// sky so the chromaticity segmenter has something to find.
struct SynthParams {
    int size = 512;                  // sky-angular size / latlong rows
    MapFormat format = MapFormat::SkyAngular;
    double sun_azimuth_deg = 135.0;
    double sun_elevation_deg = 40.0;
    double sun_intensity = 16384.0;  // ~2^14
    double cloud_amount = 0.4;       // 0 = clear, 1 = overcast
    double base_brightness = 1.0;
    uint64_t seed = 1;
};

Image synth_sky(const SynthParams& params);

}  // namespace fdr
