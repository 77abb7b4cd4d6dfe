#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "fdrkit/bracket.hpp"
#include "fdrkit/image.hpp"
#include "fdrkit/segmentation.hpp"

namespace fdr {

// File-level failures: missing files, bad magic, malformed headers, corrupt
// payloads, schema violations. Distinct from std::invalid_argument so the CLI
// can map them to the data-error exit code.
class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

// --- PFM (portable float map) -------------------------------------------
// Header "PF\n<w> <h>\n<scale>\n" (grayscale "Pf"), 32-bit float samples,
// scanlines stored bottom-to-top, negative scale = little-endian payload.
// Written with scale -1.0; read applies byte swapping per the scale sign.
Image read_pfm(const std::filesystem::path& path);
void write_pfm(const Image& img, const std::filesystem::path& path);

// --- Radiance HDR (RGBE) --------------------------------------------------
// "#?RADIANCE" signature, "-Y h +X w" resolution line, flat or adaptive-RLE
// scanlines. Decode: E == 0 -> black, else v = mantissa/256 * 2^(E-128).
Image read_hdr(const std::filesystem::path& path);
void write_hdr(const Image& img, const std::filesystem::path& path);

// --- PGM label rasters -----------------------------------------------------
// Binary P5, maxval 255; class bytes as stored in SegmentationLabel.
SegmentationLabel read_pgm(const std::filesystem::path& path);
void write_pgm(const SegmentationLabel& label, const std::filesystem::path& path);

// 8-bit PPM (P6) export of an LDR image; lossy, for previews only.
void write_ppm8(const Image& img, const std::filesystem::path& path);

// --- Bracket manifest ------------------------------------------------------
// JSON object with keys exactly {version, tonemapper, eps_lo, eps_hi, format,
// exposures}; each exposure entry has keys exactly {ev, path}. Paths are
// resolved relative to the manifest file. Unknown keys are rejected.
struct ManifestEntry {
    double ev = 0.0;
    std::string path;
    bool operator==(const ManifestEntry&) const = default;
};

struct BracketManifest {
    int version = 1;
    std::string tonemapper = "identity";
    double eps_lo = kDefaultEpsLo;
    double eps_hi = kDefaultEpsHi;
    MapFormat format = MapFormat::None;
    std::vector<ManifestEntry> exposures;

    bool operator==(const BracketManifest&) const = default;
};

BracketManifest read_manifest(const std::filesystem::path& path);
void write_manifest(const BracketManifest& manifest, const std::filesystem::path& path);
std::string manifest_to_json(const BracketManifest& manifest);

// Reads the manifest and every referenced exposure image.
ExposureBracket load_bracket(const std::filesystem::path& manifest_path);

// Writes exposures as exposure_<n>.pfm plus manifest.json into dir and
// returns the manifest path.
std::filesystem::path save_bracket(const ExposureBracket& bracket, MapFormat format,
                                   const std::filesystem::path& dir,
                                   bool force = false, bool export_8bit = false);

}  // namespace fdr
