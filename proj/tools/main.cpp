// fdrkit: batch CLI over the radiance-map toolkit.
//
// Exit codes: 0 success, 1 usage error (bad flags/grammar), 2 data or format
// error (unreadable/malformed files, invalid image contents).

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fdrkit/bracket.hpp"
#include "fdrkit/fusion.hpp"
#include "fdrkit/geometry.hpp"
#include "fdrkit/image.hpp"
#include "fdrkit/io.hpp"
#include "fdrkit/metrics.hpp"
#include "fdrkit/segmentation.hpp"
#include "fdrkit/synth.hpp"
#include "fdrkit/tonemap.hpp"

namespace fs = std::filesystem;

namespace {

constexpr double kDegToRad = 3.14159265358979323846 / 180.0;

// Runs a flag-grammar conversion; failures become usage errors (exit 1).
template <typename F>
auto usage(const std::string& flag, F&& f) {
    try {
        return f();
    } catch (const std::exception& e) {
        throw CLI::ValidationError(flag, e.what());
    }
}

std::string lower_ext(const fs::path& p) {
    std::string e = p.extension().string();
    std::transform(e.begin(), e.end(), e.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return e;
}

fdr::Image read_image(const fs::path& p) {
    const std::string ext = lower_ext(p);
    if (ext == ".pfm") return fdr::read_pfm(p);
    if (ext == ".hdr") return fdr::read_hdr(p);
    throw fdr::IoError("unsupported input extension '" + ext + "' (use .pfm or .hdr)");
}

void check_overwrite(const fs::path& p, bool force) {
    if (!force && fs::exists(p))
        throw fdr::IoError("refusing to overwrite '" + p.string() + "' (use --force)");
}

void write_image(const fdr::Image& img, const fs::path& p, bool force) {
    check_overwrite(p, force);
    const std::string ext = lower_ext(p);
    if (ext == ".pfm")
        fdr::write_pfm(img, p);
    else if (ext == ".hdr")
        fdr::write_hdr(img, p);
    else if (ext == ".ppm")
        fdr::write_ppm8(img, p);
    else
        throw fdr::IoError("unsupported output extension '" + ext +
                           "' (use .pfm, .hdr or .ppm)");
}

// ---------------------------------------------------------------------------

void setup_decompose(CLI::App& app, const bool* force) {
    auto* sub = app.add_subcommand(
        "decompose", "Split a radiance image into a tone-mapped LDR exposure bracket");
    sub->fallthrough();
    struct Opts {
        std::string input, exposures, tonemap = "identity", format = "none", out;
        double eps_lo = fdr::kDefaultEpsLo, eps_hi = fdr::kDefaultEpsHi;
        bool export_8bit = false;
    };
    auto o = std::make_shared<Opts>();
    sub->add_option("input", o->input, "Radiance image (.pfm/.hdr)")->required();
    sub->add_option("--exposures", o->exposures,
                    "Comma-separated EVs k, exposure time 2^k (e.g. 0,-8,-15)")
        ->required();
    sub->add_option("--tonemap", o->tonemap,
                    "identity | gamma:<g> | logn:<n> | ln:<a>,<b>,<e> | mulog2:<mu> | inverted");
    sub->add_option("--eps-lo", o->eps_lo, "Lower saturation bound (default 1/255)");
    sub->add_option("--eps-hi", o->eps_hi, "Upper saturation bound (default 254/255)");
    sub->add_option("--format", o->format,
                    "Map format tag for the manifest: none | sky-angular | sky-latlong | latlong");
    sub->add_option("--out", o->out, "Output directory for exposures + manifest")->required();
    sub->add_flag("--export-8bit", o->export_8bit, "Also write 8-bit PPM previews");
    sub->callback([o, force] {
        const auto times = usage("--exposures", [&] { return fdr::ExposureSet::parse(o->exposures); });
        const auto tm = usage("--tonemap", [&] { return fdr::ToneMapper::parse(o->tonemap); });
        const auto format = usage("--format", [&] { return fdr::parse_map_format(o->format); });
        if (!(o->eps_lo > 0.0 && o->eps_lo < o->eps_hi && o->eps_hi <= 1.0))
            throw CLI::ValidationError("--eps-lo/--eps-hi", "need 0 < eps_lo < eps_hi <= 1");
        fdr::Image img = read_image(o->input);
        img.format = format;
        const fdr::ExposureBracket bracket =
            fdr::decompose(img, times, tm, o->eps_lo, o->eps_hi);
        const fs::path manifest =
            fdr::save_bracket(bracket, format, o->out, *force, o->export_8bit);
        std::cout << manifest.string() << "\n";
    });
}

void setup_fuse(CLI::App& app, const bool* force) {
    auto* sub = app.add_subcommand("fuse", "Merge an LDR exposure bracket back to radiance");
    sub->fallthrough();
    struct Opts {
        std::string manifest, method, label, classmask, out;
        std::vector<std::string> weights;
    };
    auto o = std::make_shared<Opts>();
    sub->add_option("manifest", o->manifest, "Bracket manifest.json")->required();
    sub->add_option("--method", o->method,
                    "rgb | robertson | hsv:rgb | hsv:robertson | weighted")
        ->required();
    sub->add_option("--weights", o->weights,
                    "Per-exposure weight images (.pfm), comma separated; required for "
                    "--method weighted")
        ->delimiter(',');
    sub->add_option("--label", o->label, "Segmentation label (.pgm) for --classmask");
    sub->add_option("--classmask", o->classmask,
                    "Per-exposure class keep-sets, e.g. '0,1,2;3,4'");
    sub->add_option("--out", o->out, "Fused radiance output (.pfm/.hdr)")->required();
    sub->callback([o, force] {
        const std::string& m = o->method;
        if (m != "rgb" && m != "robertson" && m != "hsv:rgb" && m != "hsv:robertson" &&
            m != "weighted")
            throw CLI::ValidationError("--method", "unknown method '" + m + "'");
        if ((m == "weighted") != !o->weights.empty())
            throw CLI::ValidationError(
                "--weights", "required for --method weighted and rejected otherwise");
        if (o->classmask.empty() != o->label.empty())
            throw CLI::ValidationError("--classmask", "--label and --classmask go together");
        fdr::ClassMaskSpec spec;
        if (!o->classmask.empty())
            spec = usage("--classmask", [&] { return fdr::ClassMaskSpec::parse(o->classmask); });

        fdr::ExposureBracket bracket = fdr::load_bracket(o->manifest);
        if (!o->classmask.empty()) {
            const fdr::SegmentationLabel label = fdr::read_pgm(o->label);
            spec.validate(bracket.size());
            bracket = fdr::mask_classes(bracket, label, spec);
        }
        fdr::Image fused;
        if (m == "rgb")
            fused = fdr::fuse_rgb(bracket, fdr::validity_mask(bracket));
        else if (m == "robertson")
            fused = fdr::fuse_robertson(bracket);
        else if (m == "hsv:rgb")
            fused = fdr::fuse_hsv(bracket, fdr::ScalarFusion::Rgb);
        else if (m == "hsv:robertson")
            fused = fdr::fuse_hsv(bracket, fdr::ScalarFusion::Robertson);
        else {
            if (o->weights.size() != bracket.size())
                throw fdr::IoError("need exactly one weight image per exposure");
            fdr::WeightStack weights;
            for (const auto& w : o->weights) weights.weights.push_back(fdr::read_pfm(w));
            weights.validate_against(bracket);
            fused = fdr::fuse_weighted(bracket, weights);
        }
        write_image(fused, o->out, *force);
        std::cout << o->out << "\n";
    });
}

void setup_metrics(CLI::App& app) {
    auto* sub = app.add_subcommand(
        "metrics", "Illumination report (EV, integrated illumination, peak luminance)");
    sub->fallthrough();
    struct Opts {
        std::string input, format;
    };
    auto o = std::make_shared<Opts>();
    sub->add_option("input", o->input, "Radiance image (.pfm/.hdr)")->required();
    sub->add_option("--format", o->format, "sky-angular | sky-latlong | latlong")
        ->required();
    sub->callback([o] {
        const auto format = usage("--format", [&] { return fdr::parse_map_format(o->format); });
        if (format == fdr::MapFormat::None)
            throw CLI::ValidationError("--format", "metrics needs an environment-map format");
        fdr::Image img = read_image(o->input);
        img.format = format;
        const fdr::SolidAngleMap omega =
            fdr::solid_angle_map(format, img.width, img.height);
        std::cout << fdr::illumination_report(img, omega).to_json() << "\n";
    });
}

void setup_convert(CLI::App& app, const bool* force) {
    auto* sub = app.add_subcommand("convert", "Reproject between environment-map formats");
    sub->fallthrough();
    struct Opts {
        std::string input, from, to, out;
        int size = 0;
    };
    auto o = std::make_shared<Opts>();
    sub->add_option("input", o->input, "Source map (.pfm/.hdr)")->required();
    sub->add_option("--from-format", o->from, "Format of the source map")->required();
    sub->add_option("--to", o->to, "Target format")->required();
    sub->add_option("--size", o->size, "Target size parameter (rows; sky-angular: side)")
        ->required();
    sub->add_option("--out", o->out, "Output map (.pfm/.hdr)")->required();
    sub->callback([o, force] {
        const auto from = usage("--from-format", [&] { return fdr::parse_map_format(o->from); });
        const auto to = usage("--to", [&] { return fdr::parse_map_format(o->to); });
        if (from == fdr::MapFormat::None || to == fdr::MapFormat::None)
            throw CLI::ValidationError("--to", "conversion needs environment-map formats");
        if (o->size <= 0) throw CLI::ValidationError("--size", "must be positive");
        fdr::Image img = read_image(o->input);
        img.format = from;
        const fdr::Image out = fdr::convert_format(img, to, o->size);
        write_image(out, o->out, *force);
        std::cout << o->out << "\n";
    });
}

void setup_downsample(CLI::App& app, const bool* force) {
    auto* sub = app.add_subcommand("downsample", "Block-mean downsample by an integer factor");
    sub->fallthrough();
    struct Opts {
        std::string input, out;
        int factor = 0;
    };
    auto o = std::make_shared<Opts>();
    sub->add_option("input", o->input, "Input image (.pfm/.hdr)")->required();
    sub->add_option("--factor", o->factor, "Linear reduction factor (dims must divide)")
        ->required();
    sub->add_option("--out", o->out, "Output image (.pfm/.hdr)")->required();
    sub->callback([o, force] {
        if (o->factor < 1) throw CLI::ValidationError("--factor", "must be >= 1");
        const fdr::Image img = read_image(o->input);
        write_image(fdr::downsample_avg(img, o->factor), o->out, *force);
        std::cout << o->out << "\n";
    });
}

void setup_clip_ev(CLI::App& app, const bool* force) {
    auto* sub = app.add_subcommand("clip-ev", "Clip an image to a target dynamic range");
    sub->fallthrough();
    struct Opts {
        std::string input, format = "none", out;
        double ev = 0.0;
        bool equalize = false;
    };
    auto o = std::make_shared<Opts>();
    sub->add_option("input", o->input, "Input image (.pfm/.hdr)")->required();
    sub->add_option("--ev", o->ev, "Target dynamic range in stops")->required();
    sub->add_flag("--equalize", o->equalize,
                  "Rescale so integrated illumination is preserved");
    sub->add_option("--format", o->format,
                    "Map format for solid-angle weighting (default none = uniform)");
    sub->add_option("--out", o->out, "Output image (.pfm/.hdr)")->required();
    sub->callback([o, force] {
        const auto format = usage("--format", [&] { return fdr::parse_map_format(o->format); });
        if (!(o->ev >= 0.0)) throw CLI::ValidationError("--ev", "must be >= 0");
        fdr::Image img = read_image(o->input);
        img.format = format;
        write_image(fdr::clip_to_ev(img, o->ev, o->equalize), o->out, *force);
        std::cout << o->out << "\n";
    });
}

void setup_analyze_bracket(CLI::App& app) {
    auto* sub = app.add_subcommand(
        "analyze-bracket", "Candlestick table and coverage report for an exposure set");
    sub->fallthrough();
    struct Opts {
        std::string exposures, tonemap = "identity";
        double eps = fdr::kDefaultEpsLo;
        double range_lo = 1e-3, range_hi = 32768.0;
    };
    auto o = std::make_shared<Opts>();
    sub->add_option("--exposures", o->exposures, "Comma-separated EVs (e.g. 0,-8,-15)")
        ->required();
    sub->add_option("--tonemap", o->tonemap, "Tone mapper spec");
    sub->add_option("--eps", o->eps, "Body saturation margin (default 1/255)");
    sub->add_option("--range-lo", o->range_lo, "Coverage check: radiance range start");
    sub->add_option("--range-hi", o->range_hi, "Coverage check: radiance range end");
    sub->callback([o] {
        const auto times = usage("--exposures", [&] { return fdr::ExposureSet::parse(o->exposures); });
        const auto tm = usage("--tonemap", [&] { return fdr::ToneMapper::parse(o->tonemap); });
        if (!(o->eps > 0.0 && o->eps < 0.5))
            throw CLI::ValidationError("--eps", "need 0 < eps < 0.5");
        if (!(o->range_lo > 0.0 && o->range_lo < o->range_hi))
            throw CLI::ValidationError("--range-lo/--range-hi", "need 0 < lo < hi");
        std::cout.precision(17);
        std::cout << "index,delta_t,limit_lo,body_lo,marker,body_hi,limit_hi\n";
        const auto rows = fdr::candlestick(times, tm, o->eps);
        for (size_t n = 0; n < rows.size(); ++n) {
            const auto& r = rows[n];
            std::cout << n << "," << r.delta_t << "," << r.limit_lo << "," << r.body_lo
                      << "," << r.marker << "," << r.body_hi << "," << r.limit_hi << "\n";
        }
        const auto report =
            fdr::validate_coverage(times, tm, o->eps, o->range_lo, o->range_hi);
        std::cout << "kind,lo,hi\n";
        for (const auto& g : report.gaps)
            std::cout << "gap," << g.lo << "," << g.hi << "\n";
        for (const auto& v : report.overlaps)
            std::cout << "overlap," << v.lo << "," << v.hi << "\n";
    });
}

void setup_segment(CLI::App& app, const bool* force) {
    auto* sub = app.add_subcommand(
        "segment", "Label a sky image: border/sky/cloud/corona/disk");
    sub->fallthrough();
    struct Opts {
        std::string input, format, out;
        double sun_az = 0.0, sun_el = 90.0, threshold = 0.30;
        int brush = 15;
    };
    auto o = std::make_shared<Opts>();
    sub->add_option("input", o->input, "Radiance sky image (.pfm/.hdr)")->required();
    sub->add_option("--format", o->format, "sky-angular | sky-latlong | latlong")
        ->required();
    sub->add_option("--sun-az", o->sun_az, "Sun azimuth, degrees from +x toward +y")
        ->required();
    sub->add_option("--sun-el", o->sun_el, "Sun elevation, degrees above horizon")
        ->required();
    sub->add_option("--threshold", o->threshold,
                    "Blue/red chromaticity cloud threshold (default 0.30)");
    sub->add_option("--brush", o->brush, "Smoothing brush diameter, odd (default 15)");
    sub->add_option("--out", o->out, "Label output (.pgm)")->required();
    sub->callback([o, force] {
        const auto format = usage("--format", [&] { return fdr::parse_map_format(o->format); });
        if (format == fdr::MapFormat::None)
            throw CLI::ValidationError("--format", "segmentation needs an environment-map format");
        if (o->brush < 1 || o->brush % 2 == 0)
            throw CLI::ValidationError("--brush", "diameter must be odd and >= 1");
        fdr::Image img = read_image(o->input);
        img.format = format;
        const fdr::BinaryMask cloud =
            fdr::hand_drawn(fdr::cloud_mask(img, o->threshold), o->brush);
        const fdr::Direction sun = fdr::Direction::from_azimuth_elevation(
            o->sun_az * kDegToRad, o->sun_el * kDegToRad);
        const fdr::SolarMasks solar =
            fdr::solar_mask(format, img.width, img.height, sun);
        const fdr::SegmentationLabel label = fdr::composite_label(cloud, solar, format);
        check_overwrite(o->out, *force);
        fdr::write_pgm(label, o->out);
        std::cout << o->out << "\n";
    });
}

void setup_schedule(CLI::App& app) {
    auto* sub = app.add_subcommand(
        "schedule", "Per-epoch exposure-time decay schedule as CSV");
    sub->fallthrough();
    struct Opts {
        std::string targets;
        int epochs = 0;
    };
    auto o = std::make_shared<Opts>();
    sub->add_option("--targets", o->targets, "Target EVs (e.g. 0,-8,-15)")->required();
    sub->add_option("--epochs", o->epochs, "Epochs until targets are reached")->required();
    sub->callback([o] {
        const auto targets = usage("--targets", [&] { return fdr::ExposureSet::parse(o->targets); });
        if (o->epochs < 1) throw CLI::ValidationError("--epochs", "must be >= 1");
        std::cout.precision(17);
        std::cout << "epoch";
        for (size_t n = 0; n < targets.size(); ++n) std::cout << ",t_" << n;
        std::cout << "\n";
        for (int e = 0; e <= o->epochs; ++e) {
            const auto times = fdr::decay_schedule(targets, o->epochs, e);
            std::cout << e;
            for (double t : times) std::cout << "," << t;
            std::cout << "\n";
        }
    });
}

void setup_synth(CLI::App& app, const bool* force) {
    auto* sub = app.add_subcommand("synth", "Deterministic synthetic sky generator");
    sub->fallthrough();
    auto o = std::make_shared<fdr::SynthParams>();
    struct Extra {
        std::string format = "sky-angular", out;
    };
    auto x = std::make_shared<Extra>();
    sub->add_option("--size", o->size, "Size parameter (default 512)");
    sub->add_option("--format", x->format, "sky-angular | sky-latlong | latlong");
    sub->add_option("--sun-az", o->sun_azimuth_deg, "Sun azimuth, degrees");
    sub->add_option("--sun-el", o->sun_elevation_deg, "Sun elevation, degrees");
    sub->add_option("--sun-intensity", o->sun_intensity, "Solar disk radiance (default 16384)");
    sub->add_option("--clouds", o->cloud_amount, "Cloud amount in [0,1] (default 0.4)");
    sub->add_option("--brightness", o->base_brightness, "Base sky brightness (default 1)");
    sub->add_option("--seed", o->seed, "Noise seed");
    sub->add_option("--out", x->out, "Output image (.pfm/.hdr)")->required();
    sub->callback([o, x, force] {
        o->format = usage("--format", [&] { return fdr::parse_map_format(x->format); });
        if (o->format == fdr::MapFormat::None)
            throw CLI::ValidationError("--format", "synth needs an environment-map format");
        write_image(fdr::synth_sky(*o), x->out, *force);
        std::cout << x->out << "\n";
    });
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"fdrkit: radiance-map bracketing, fusion, geometry and metrics toolkit"};
    app.require_subcommand(1);
    bool force = false;
    app.add_flag("--force", force, "Allow overwriting existing output files");

    setup_decompose(app, &force);
    setup_fuse(app, &force);
    setup_metrics(app);
    setup_convert(app, &force);
    setup_downsample(app, &force);
    setup_clip_ev(app, &force);
    setup_analyze_bracket(app);
    setup_segment(app, &force);
    setup_schedule(app);
    setup_synth(app, &force);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    } catch (const fdr::IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
