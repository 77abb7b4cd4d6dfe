#include "fdrkit/io.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace fdr {

namespace {

using json = nlohmann::json;

std::ifstream open_in(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
    return in;
}

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    return out;
}

// Next whitespace-delimited token; '#' starts a comment running to
// end-of-line (PNM convention).
std::string next_token(std::istream& in) {
    std::string tok;
    int c;
    while ((c = in.get()) != EOF) {
        if (c == '#') {
            while ((c = in.get()) != EOF && c != '\n') {}
            continue;
        }
        if (!std::isspace(c)) break;
    }
    if (c == EOF) throw IoError("unexpected end of header");
    do {
        tok.push_back(static_cast<char>(c));
    } while ((c = in.get()) != EOF && !std::isspace(c));
    return tok;
}

int parse_int_token(std::istream& in, const char* what) {
    const std::string tok = next_token(in);
    try {
        size_t pos = 0;
        const int v = std::stoi(tok, &pos);
        if (pos != tok.size()) throw std::invalid_argument(tok);
        return v;
    } catch (const std::exception&) {
        throw IoError(std::string("bad ") + what + " '" + tok + "' in header");
    }
}

double parse_double_token(std::istream& in, const char* what) {
    const std::string tok = next_token(in);
    try {
        size_t pos = 0;
        const double v = std::stod(tok, &pos);
        if (pos != tok.size()) throw std::invalid_argument(tok);
        return v;
    } catch (const std::exception&) {
        throw IoError(std::string("bad ") + what + " '" + tok + "' in header");
    }
}

float byteswap_float(float v) {
    uint32_t bits;
    std::memcpy(&bits, &v, 4);
    bits = ((bits & 0xff000000u) >> 24) | ((bits & 0x00ff0000u) >> 8) |
           ((bits & 0x0000ff00u) << 8) | ((bits & 0x000000ffu) << 24);
    std::memcpy(&v, &bits, 4);
    return v;
}

constexpr bool host_little_endian() {
    return std::endian::native == std::endian::little;
}

}  // namespace

// --------------------------------------------------------------------------
// PFM

Image read_pfm(const std::filesystem::path& path) {
    std::ifstream in = open_in(path);
    const std::string magic = next_token(in);
    int channels;
    if (magic == "PF")
        channels = 3;
    else if (magic == "Pf")
        channels = 1;
    else
        throw IoError("not a PFM file (magic '" + magic + "')");

    const int width = parse_int_token(in, "width");
    const int height = parse_int_token(in, "height");
    if (width <= 0 || height <= 0) throw IoError("PFM: non-positive dimensions");
    const double scale = parse_double_token(in, "scale");
    if (scale == 0.0) throw IoError("PFM: zero scale");
    // next_token consumed exactly one whitespace byte after the scale; the
    // payload starts here.
    const bool file_little = scale < 0.0;

    Image img(width, height, channels);
    std::vector<float> row(static_cast<size_t>(width) * channels);
    const std::streamsize row_bytes = static_cast<std::streamsize>(row.size() * 4);
    for (int i = 0; i < height; ++i) {
        if (!in.read(reinterpret_cast<char*>(row.data()), row_bytes))
            throw IoError("PFM: truncated payload");
        const int dst = height - 1 - i;  // scanlines are stored bottom-to-top
        for (size_t k = 0; k < row.size(); ++k) {
            float v = row[k];
            if (file_little != host_little_endian()) v = byteswap_float(v);
            img.data[static_cast<size_t>(dst) * width * channels + k] = v;
        }
    }
    return img;
}

void write_pfm(const Image& img, const std::filesystem::path& path) {
    if (img.channels != 1 && img.channels != 3)
        throw std::invalid_argument("write_pfm: 1 or 3 channels required");
    if (img.width <= 0 || img.height <= 0)
        throw std::invalid_argument("write_pfm: empty image");
    std::ofstream out = open_out(path);
    out << (img.channels == 3 ? "PF" : "Pf") << "\n"
        << img.width << " " << img.height << "\n"
        << "-1.0\n";
    std::vector<float> row(static_cast<size_t>(img.width) * img.channels);
    for (int i = img.height - 1; i >= 0; --i) {
        for (size_t k = 0; k < row.size(); ++k) {
            float v = static_cast<float>(
                img.data[static_cast<size_t>(i) * img.width * img.channels + k]);
            if (!host_little_endian()) v = byteswap_float(v);
            row[k] = v;
        }
        out.write(reinterpret_cast<const char*>(row.data()),
                  static_cast<std::streamsize>(row.size() * 4));
    }
    if (!out) throw IoError("PFM: write failed for '" + path.string() + "'");
}

// --------------------------------------------------------------------------
// Radiance HDR (RGBE)

namespace {

void rgbe_decode(const uint8_t rgbe[4], double* rgb) {
    if (rgbe[3] == 0) {
        rgb[0] = rgb[1] = rgb[2] = 0.0;
        return;
    }
    // value = mantissa/256 * 2^(E-128)
    const int e = static_cast<int>(rgbe[3]) - 136;
    rgb[0] = std::ldexp(static_cast<double>(rgbe[0]), e);
    rgb[1] = std::ldexp(static_cast<double>(rgbe[1]), e);
    rgb[2] = std::ldexp(static_cast<double>(rgbe[2]), e);
}

void rgbe_encode(const double* rgb, uint8_t rgbe[4]) {
    const double m = std::max({rgb[0], rgb[1], rgb[2]});
    if (!(m >= 1e-38)) {
        rgbe[0] = rgbe[1] = rgbe[2] = rgbe[3] = 0;
        return;
    }
    int e;
    std::frexp(m, &e);  // m = f * 2^e, f in [0.5, 1)
    // Round-to-nearest mantissas; bump the exponent if the max channel
    // rounds up to 256.
    if (std::lround(std::ldexp(m, 8 - e)) >= 256) ++e;
    if (e + 128 > 255) throw std::invalid_argument("rgbe_encode: value too large");
    if (e + 128 < 1) {
        rgbe[0] = rgbe[1] = rgbe[2] = rgbe[3] = 0;
        return;
    }
    for (int c = 0; c < 3; ++c)
        rgbe[c] = static_cast<uint8_t>(std::lround(std::ldexp(rgb[c], 8 - e)));
    rgbe[3] = static_cast<uint8_t>(e + 128);
}

void read_exact(std::istream& in, uint8_t* dst, size_t n) {
    if (!in.read(reinterpret_cast<char*>(dst), static_cast<std::streamsize>(n)))
        throw IoError("HDR: truncated payload");
}

// Adaptive RLE: per component plane, <count> <value> runs (count > 128) or
// <count> literal bytes.
void decode_rle_plane(std::istream& in, uint8_t* plane, int width) {
    int pos = 0;
    while (pos < width) {
        uint8_t count;
        read_exact(in, &count, 1);
        if (count > 128) {
            const int n = count - 128;
            if (pos + n > width) throw IoError("HDR: corrupt RLE run");
            uint8_t value;
            read_exact(in, &value, 1);
            std::memset(plane + pos, value, static_cast<size_t>(n));
            pos += n;
        } else {
            if (count == 0 || pos + count > width) throw IoError("HDR: corrupt RLE run");
            read_exact(in, plane + pos, count);
            pos += count;
        }
    }
}

void encode_rle_plane(std::ostream& out, const uint8_t* plane, int width) {
    static const int kMinRun = 4;
    int cur = 0;
    while (cur < width) {
        int beg_run = cur;
        int run_count = 0, old_run_count = 0;
        while (run_count < kMinRun && beg_run < width) {
            beg_run += run_count;
            old_run_count = run_count;
            run_count = 1;
            while (beg_run + run_count < width && run_count < 127 &&
                   plane[beg_run] == plane[beg_run + run_count])
                ++run_count;
        }
        // Short run just before a long one is cheaper written as a run.
        if (old_run_count > 1 && old_run_count == beg_run - cur) {
            const uint8_t header = static_cast<uint8_t>(128 + old_run_count);
            out.put(static_cast<char>(header));
            out.put(static_cast<char>(plane[cur]));
            cur = beg_run;
        }
        while (cur < beg_run) {
            const int n = std::min(128, beg_run - cur);
            out.put(static_cast<char>(n));
            out.write(reinterpret_cast<const char*>(plane + cur), n);
            cur += n;
        }
        if (run_count >= kMinRun) {
            out.put(static_cast<char>(128 + run_count));
            out.put(static_cast<char>(plane[beg_run]));
            cur = beg_run + run_count;
        }
    }
}

}  // namespace

Image read_hdr(const std::filesystem::path& path) {
    std::ifstream in = open_in(path);
    std::string line;
    if (!std::getline(in, line) || line.rfind("#?RADIANCE", 0) != 0)
        throw IoError("HDR: missing #?RADIANCE signature");
    bool format_seen = false;
    while (std::getline(in, line)) {
        if (line.empty()) break;
        if (line[0] == '#') continue;
        if (line.rfind("FORMAT=", 0) == 0) {
            if (line != "FORMAT=32-bit_rle_rgbe")
                throw IoError("HDR: unsupported " + line);
            format_seen = true;
        }
        // EXPOSURE=, PRIMARIES=, ... carry no pixel data; ignored.
    }
    (void)format_seen;
    if (!std::getline(in, line)) throw IoError("HDR: missing resolution line");
    int width = 0, height = 0;
    {
        std::istringstream rs(line);
        std::string ymark, xmark;
        if (!(rs >> ymark >> height >> xmark >> width) || ymark != "-Y" || xmark != "+X")
            throw IoError("HDR: unsupported resolution line '" + line + "'");
    }
    if (width <= 0 || height <= 0) throw IoError("HDR: non-positive dimensions");

    Image img(width, height, 3);
    std::vector<uint8_t> scanline(static_cast<size_t>(width) * 4);
    for (int i = 0; i < height; ++i) {
        uint8_t head[4];
        read_exact(in, head, 4);
        const bool rle = head[0] == 2 && head[1] == 2 &&
                         ((head[2] << 8) | head[3]) == width && width >= 8 &&
                         width <= 32767;
        if (rle) {
            std::vector<uint8_t> planes(static_cast<size_t>(width) * 4);
            for (int c = 0; c < 4; ++c)
                decode_rle_plane(in, planes.data() + static_cast<size_t>(c) * width, width);
            for (int j = 0; j < width; ++j)
                for (int c = 0; c < 4; ++c)
                    scanline[static_cast<size_t>(j) * 4 + c] =
                        planes[static_cast<size_t>(c) * width + j];
        } else {
            std::memcpy(scanline.data(), head, 4);
            if (width > 1)
                read_exact(in, scanline.data() + 4, (static_cast<size_t>(width) - 1) * 4);
        }
        for (int j = 0; j < width; ++j)
            rgbe_decode(scanline.data() + static_cast<size_t>(j) * 4,
                        img.data.data() + img.index(i, j, 0));
    }
    return img;
}

void write_hdr(const Image& img, const std::filesystem::path& path) {
    if (img.channels != 3) throw std::invalid_argument("write_hdr: 3 channels required");
    if (img.width <= 0 || img.height <= 0)
        throw std::invalid_argument("write_hdr: empty image");
    std::ofstream out = open_out(path);
    out << "#?RADIANCE\nFORMAT=32-bit_rle_rgbe\n\n-Y " << img.height << " +X "
        << img.width << "\n";

    const bool rle = img.width >= 8 && img.width <= 32767;
    std::vector<uint8_t> planes(static_cast<size_t>(img.width) * 4);
    for (int i = 0; i < img.height; ++i) {
        for (int j = 0; j < img.width; ++j) {
            uint8_t rgbe[4];
            rgbe_encode(img.data.data() + img.index(i, j, 0), rgbe);
            for (int c = 0; c < 4; ++c)
                planes[static_cast<size_t>(c) * img.width + j] = rgbe[c];
        }
        if (rle) {
            const uint8_t head[4] = {2, 2, static_cast<uint8_t>(img.width >> 8),
                                     static_cast<uint8_t>(img.width & 0xff)};
            out.write(reinterpret_cast<const char*>(head), 4);
            for (int c = 0; c < 4; ++c)
                encode_rle_plane(out, planes.data() + static_cast<size_t>(c) * img.width,
                                 img.width);
        } else {
            for (int j = 0; j < img.width; ++j)
                for (int c = 0; c < 4; ++c)
                    out.put(static_cast<char>(planes[static_cast<size_t>(c) * img.width + j]));
        }
    }
    if (!out) throw IoError("HDR: write failed for '" + path.string() + "'");
}

// --------------------------------------------------------------------------
// PGM / PPM

SegmentationLabel read_pgm(const std::filesystem::path& path) {
    std::ifstream in = open_in(path);
    const std::string magic = next_token(in);
    if (magic != "P5") throw IoError("not a binary PGM file (magic '" + magic + "')");
    const int width = parse_int_token(in, "width");
    const int height = parse_int_token(in, "height");
    if (width <= 0 || height <= 0) throw IoError("PGM: non-positive dimensions");
    const int maxval = parse_int_token(in, "maxval");
    if (maxval != 255) throw IoError("PGM: maxval must be 255");

    SegmentationLabel label(width, height, MapFormat::None);
    if (!in.read(reinterpret_cast<char*>(label.classes.data()),
                 static_cast<std::streamsize>(label.classes.size())))
        throw IoError("PGM: truncated payload");
    for (uint8_t c : label.classes)
        if (c >= kSkyClassCount) throw IoError("PGM: label class out of range");
    return label;
}

void write_pgm(const SegmentationLabel& label, const std::filesystem::path& path) {
    if (label.width <= 0 || label.height <= 0)
        throw std::invalid_argument("write_pgm: empty label");
    std::ofstream out = open_out(path);
    out << "P5\n" << label.width << " " << label.height << "\n255\n";
    out.write(reinterpret_cast<const char*>(label.classes.data()),
              static_cast<std::streamsize>(label.classes.size()));
    if (!out) throw IoError("PGM: write failed for '" + path.string() + "'");
}

void write_ppm8(const Image& img, const std::filesystem::path& path) {
    if (img.channels != 3) throw std::invalid_argument("write_ppm8: 3 channels required");
    std::ofstream out = open_out(path);
    out << "P6\n" << img.width << " " << img.height << "\n255\n";
    for (size_t k = 0; k < img.data.size(); ++k) {
        const double v = std::clamp(img.data[k], 0.0, 1.0);
        out.put(static_cast<char>(std::lround(v * 255.0)));
    }
    if (!out) throw IoError("PPM: write failed for '" + path.string() + "'");
}

// --------------------------------------------------------------------------
// Bracket manifest

namespace {

void require_keys(const json& obj, std::initializer_list<const char*> keys,
                  const char* where) {
    for (const char* k : keys)
        if (!obj.contains(k))
            throw IoError(std::string("manifest: missing key '") + k + "' in " + where);
    for (const auto& item : obj.items()) {
        bool known = false;
        for (const char* k : keys)
            if (item.key() == k) known = true;
        if (!known)
            throw IoError("manifest: unknown key '" + item.key() + "' in " + where);
    }
}

}  // namespace

std::string manifest_to_json(const BracketManifest& manifest) {
    json exposures = json::array();
    for (const auto& e : manifest.exposures)
        exposures.push_back(json{{"ev", e.ev}, {"path", e.path}});
    const json doc{{"version", manifest.version},
                   {"tonemapper", manifest.tonemapper},
                   {"eps_lo", manifest.eps_lo},
                   {"eps_hi", manifest.eps_hi},
                   {"format", to_string(manifest.format)},
                   {"exposures", exposures}};
    return doc.dump(2) + "\n";
}

void write_manifest(const BracketManifest& manifest, const std::filesystem::path& path) {
    if (manifest.exposures.empty())
        throw std::invalid_argument("manifest: needs at least one exposure");
    std::ofstream out = open_out(path);
    out << manifest_to_json(manifest);
    if (!out) throw IoError("manifest: write failed for '" + path.string() + "'");
}

BracketManifest read_manifest(const std::filesystem::path& path) {
    std::ifstream in = open_in(path);
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::exception& e) {
        throw IoError("manifest: invalid JSON in '" + path.string() + "': " + e.what());
    }
    if (!doc.is_object()) throw IoError("manifest: top level must be an object");
    require_keys(doc, {"version", "tonemapper", "eps_lo", "eps_hi", "format", "exposures"},
                 "manifest");

    BracketManifest m;
    if (!doc["version"].is_number_integer())
        throw IoError("manifest: 'version' must be an integer");
    m.version = doc["version"].get<int>();
    if (m.version != 1) throw IoError("manifest: unsupported version");
    if (!doc["tonemapper"].is_string())
        throw IoError("manifest: 'tonemapper' must be a string");
    m.tonemapper = doc["tonemapper"].get<std::string>();
    try {
        ToneMapper::parse(m.tonemapper);
    } catch (const std::exception& e) {
        throw IoError(std::string("manifest: 'tonemapper': ") + e.what());
    }
    if (!doc["eps_lo"].is_number() || !doc["eps_hi"].is_number())
        throw IoError("manifest: 'eps_lo'/'eps_hi' must be numbers");
    m.eps_lo = doc["eps_lo"].get<double>();
    m.eps_hi = doc["eps_hi"].get<double>();
    if (!(m.eps_lo > 0.0) || !(m.eps_lo < m.eps_hi) || !(m.eps_hi <= 1.0))
        throw IoError("manifest: need 0 < eps_lo < eps_hi <= 1");
    if (!doc["format"].is_string()) throw IoError("manifest: 'format' must be a string");
    try {
        m.format = parse_map_format(doc["format"].get<std::string>());
    } catch (const std::exception& e) {
        throw IoError(std::string("manifest: 'format': ") + e.what());
    }
    if (!doc["exposures"].is_array() || doc["exposures"].empty())
        throw IoError("manifest: 'exposures' must be a non-empty array");
    double prev_ev = 0.0;
    bool first = true;
    for (const auto& entry : doc["exposures"]) {
        if (!entry.is_object()) throw IoError("manifest: exposure entries must be objects");
        require_keys(entry, {"ev", "path"}, "exposure entry");
        if (!entry["ev"].is_number())
            throw IoError("manifest: exposure 'ev' must be a number");
        if (!entry["path"].is_string() || entry["path"].get<std::string>().empty())
            throw IoError("manifest: exposure 'path' must be a non-empty string");
        ManifestEntry e;
        e.ev = entry["ev"].get<double>();
        e.path = entry["path"].get<std::string>();
        if (!first && !(e.ev < prev_ev))
            throw IoError("manifest: exposure EVs must be strictly decreasing");
        prev_ev = e.ev;
        first = false;
        m.exposures.push_back(std::move(e));
    }
    // Referenced files must exist at load time.
    const auto base = path.parent_path();
    for (const auto& e : m.exposures) {
        const auto p = base / e.path;
        if (!std::filesystem::exists(p))
            throw IoError("manifest: missing exposure file '" + p.string() + "'");
    }
    return m;
}

ExposureBracket load_bracket(const std::filesystem::path& manifest_path) {
    const BracketManifest m = read_manifest(manifest_path);
    ExposureBracket bracket;
    bracket.tonemapper = ToneMapper::parse(m.tonemapper);
    bracket.eps_lo = m.eps_lo;
    bracket.eps_hi = m.eps_hi;
    const auto base = manifest_path.parent_path();
    for (const auto& e : m.exposures) {
        bracket.times.push_back(std::exp2(e.ev));
        Image img = read_pfm(base / e.path);
        img.format = m.format;
        bracket.exposures.push_back(std::move(img));
    }
    try {
        bracket.validate();
    } catch (const std::exception& e) {
        throw IoError(std::string("bracket: ") + e.what());
    }
    return bracket;
}

std::filesystem::path save_bracket(const ExposureBracket& bracket, MapFormat format,
                                   const std::filesystem::path& dir, bool force,
                                   bool export_8bit) {
    bracket.validate();
    std::filesystem::create_directories(dir);
    BracketManifest m;
    m.tonemapper = bracket.tonemapper.to_string();
    m.eps_lo = bracket.eps_lo;
    m.eps_hi = bracket.eps_hi;
    m.format = format;
    const auto manifest_path = dir / "manifest.json";
    if (!force && std::filesystem::exists(manifest_path))
        throw IoError("refusing to overwrite '" + manifest_path.string() +
                      "' (use force)");
    for (size_t n = 0; n < bracket.size(); ++n) {
        char pfm_name[32], ppm_name[32];
        std::snprintf(pfm_name, sizeof(pfm_name), "exposure_%03zu.pfm", n);
        std::snprintf(ppm_name, sizeof(ppm_name), "exposure_%03zu.ppm", n);
        const auto p = dir / pfm_name;
        if (!force && std::filesystem::exists(p))
            throw IoError("refusing to overwrite '" + p.string() + "' (use force)");
        write_pfm(bracket.exposures[n], p);
        if (export_8bit) write_ppm8(bracket.exposures[n], dir / ppm_name);
        m.exposures.push_back({std::log2(bracket.times[n]), std::string(pfm_name)});
    }
    write_manifest(m, manifest_path);
    return manifest_path;
}

}  // namespace fdr
