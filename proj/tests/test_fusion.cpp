#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "fdrkit/fusion.hpp"

using fdr::ExposureBracket;
using fdr::ExposureSet;
using fdr::Image;
using fdr::ToneMapper;
using fdr::WeightStack;

namespace {

Image single(double v) {
    Image img(1, 1, 1);
    img.data = {v};
    return img;
}

// Bracket whose exposures hold the given raw LDR levels (no decomposition).
ExposureBracket raw_bracket(const std::vector<double>& levels,
                            const std::vector<double>& times,
                            ToneMapper tm = ToneMapper::identity()) {
    ExposureBracket b;
    b.times = times;
    b.tonemapper = tm;
    for (double v : levels) b.exposures.push_back(single(v));
    return b;
}

Image random_radiance(int w, int h, int c, uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> mag(-4.0, 15.0);
    Image img(w, h, c);
    for (double& v : img.data) v = std::exp2(mag(rng));
    return img;
}

}  // namespace

TEST_CASE("robertson weight endpoints are exact and the bell peaks at 1") {
    CHECK(fdr::robertson_weight(0.0) == 0.0);
    CHECK(fdr::robertson_weight(1.0) == 0.0);
    CHECK(fdr::robertson_weight(0.5) == 1.0);
    CHECK(fdr::robertson_weight(0.25) ==
          doctest::Approx(0.3560857401120277).epsilon(1e-14));
    CHECK(fdr::robertson_weight(0.1) ==
          doctest::Approx(0.06008968247980436).epsilon(1e-14));
    // Symmetry of the squared exponent.
    for (double y : {0.05, 0.2, 0.35, 0.49})
        CHECK(fdr::robertson_weight(y) ==
              doctest::Approx(fdr::robertson_weight(1.0 - y)).epsilon(1e-13));
    CHECK_THROWS_AS(fdr::robertson_weight(-0.01), std::invalid_argument);
    CHECK_THROWS_AS(fdr::robertson_weight(1.01), std::invalid_argument);
}

TEST_CASE("the literal exponent variant is monotone, not bell-shaped") {
    double prev = fdr::robertson_weight(0.0, fdr::RobertsonExponent::Literal);
    for (int k = 1; k <= 20; ++k) {
        const double y = k / 20.0;
        const double w = fdr::robertson_weight(y, fdr::RobertsonExponent::Literal);
        CHECK(w > prev);
        prev = w;
    }
}

TEST_CASE("validity mask flags exactly the unsaturated samples") {
    Image img(6, 1, 1);
    img.data = {0.0, 0.0005, 1.0 / 255.0, 0.5, 254.0 / 255.0, 1.0};
    ExposureBracket b;
    b.times = {1.0};
    b.exposures = {img};
    const WeightStack w = fdr::validity_mask(b);
    CHECK(w.weights[0].data == std::vector<double>{0, 0, 1, 1, 1, 0});
}

TEST_CASE("fuse_rgb: single exposure identity is a pass-through") {
    const ExposureBracket b = raw_bracket({0.5}, {1.0});
    const Image fused = fdr::fuse_rgb(b, fdr::validity_mask(b));
    CHECK(fused.data[0] == 0.5);
}

TEST_CASE("fuse_rgb recovers a saturated sample from the short exposure") {
    const ExposureSet times = ExposureSet::parse("0,-3");
    const ExposureBracket b =
        fdr::decompose(single(2.0), times, ToneMapper::identity());
    CHECK(b.exposures[0].data[0] == 0.0);   // saturated at dt = 1
    CHECK(b.exposures[1].data[0] == 0.25);  // in range at dt = 1/8
    const Image fused = fdr::fuse_rgb(b, fdr::validity_mask(b));
    CHECK(fused.data[0] == 2.0);
}

TEST_CASE("fuse_rgb averages all valid exposures") {
    // Identity, dt {1, 1/2}, levels {0.5, 0.25}: both valid,
    // estimates {0.5, 0.5} -> 0.5.
    const ExposureBracket b = raw_bracket({0.5, 0.25}, {1.0, 0.5});
    WeightStack w = fdr::validity_mask(b);
    CHECK(fdr::fuse_rgb(b, w).data[0] == 0.5);

    // Disagreeing estimates {0.5, 0.6} with unequal weights {0.25, 0.75}:
    // expected (0.25*0.5 + 0.75*0.6) = 0.575.
    const ExposureBracket c = raw_bracket({0.5, 0.3}, {1.0, 0.5});
    WeightStack wc;
    wc.weights = {single(0.25), single(0.75)};
    CHECK(fdr::fuse_rgb(c, wc).data[0] == doctest::Approx(0.575).epsilon(1e-15));
}

TEST_CASE("all-weights-zero fallback: bright, dark, and black samples") {
    const ToneMapper id = ToneMapper::identity();
    // Saturated bright everywhere: recover from the shortest exposure.
    const ExposureBracket bright = raw_bracket({1.0, 1.0}, {1.0, 0.25}, id);
    CHECK(fdr::fuse_rgb(bright, fdr::validity_mask(bright)).data[0] == 4.0);
    CHECK(fdr::fuse_weighted(bright, fdr::robertson_weights(bright)).data[0] == 4.0);

    // Under-exposed everywhere: the shortest exposure wins when nonzero...
    const ExposureBracket dark = raw_bracket({0.002, 0.0005}, {1.0, 0.25}, id);
    CHECK(fdr::fuse_rgb(dark, fdr::validity_mask(dark)).data[0] == 0.002);
    // ...and the longest is the fallback when the shortest recorded nothing.
    const ExposureBracket dim = raw_bracket({0.003, 0.0}, {1.0, 0.25}, id);
    CHECK(fdr::fuse_rgb(dim, fdr::validity_mask(dim)).data[0] == 0.003);

    // All-zero samples recover zero.
    const ExposureBracket black = raw_bracket({0.0, 0.0}, {1.0, 0.25}, id);
    CHECK(fdr::fuse_rgb(black, fdr::validity_mask(black)).data[0] == 0.0);
    CHECK(fdr::fuse_robertson(black).data[0] == 0.0);
}

TEST_CASE("fuse_weighted implements the time-weighted ML estimator") {
    // Identity, levels {0.5, 0.2}, dt {1, 1/2}, unit weights:
    // (1*0.5 + 0.5*0.2) / (1 + 0.25) = 0.48.
    const ExposureBracket b = raw_bracket({0.5, 0.2}, {1.0, 0.5});
    WeightStack w;
    w.weights = {single(1.0), single(1.0)};
    CHECK(fdr::fuse_weighted(b, w).data[0] == doctest::Approx(0.48).epsilon(1e-15));
}

TEST_CASE("fuse_robertson delegates bit-identically to fuse_weighted") {
    for (uint64_t seed = 0; seed < 20; ++seed) {
        const Image img = random_radiance(16, 8, 3, 100 + seed);
        const ExposureSet times = ExposureSet::parse("0,-8,-15");
        const ToneMapper tm =
            (seed % 2) ? ToneMapper::power_law(2.2) : ToneMapper::mu_law_log2(5000.0);
        const ExposureBracket b = fdr::decompose(img, times, tm);
        const Image a = fdr::fuse_robertson(b);
        const Image c = fdr::fuse_weighted(b, fdr::robertson_weights(b));
        REQUIRE(a.data.size() == c.data.size());
        for (size_t k = 0; k < a.data.size(); ++k) CHECK(a.data[k] == c.data[k]);
    }
}

TEST_CASE("weight stacks validate shapes and ranges") {
    const ExposureBracket b = raw_bracket({0.5, 0.25}, {1.0, 0.5});
    WeightStack w;
    w.weights = {single(0.5)};
    CHECK_THROWS_AS(w.validate_against(b), std::invalid_argument);  // count
    w.weights = {single(0.5), Image(2, 1, 1)};
    CHECK_THROWS_AS(w.validate_against(b), std::invalid_argument);  // shape
    w.weights = {single(0.5), single(1.5)};
    CHECK_THROWS_AS(w.validate_against(b), std::invalid_argument);  // range
    w.weights = {single(0.5), single(1.0)};
    CHECK_NOTHROW(w.validate_against(b));
}

TEST_CASE("round trip: fusion reproduces coverage-area radiance to 1e-3") {
    const ExposureSet times = ExposureSet::parse("0,-8,-15");
    for (const ToneMapper& tm : {ToneMapper::identity(), ToneMapper::power_law(2.2)}) {
        const Image img = random_radiance(32, 16, 3, 7);
        const ExposureBracket b = fdr::decompose(img, times, tm);
        const Image rgb = fdr::fuse_rgb(b, fdr::validity_mask(b));
        const Image rob = fdr::fuse_robertson(b);
        int covered = 0;
        for (size_t k = 0; k < img.data.size(); ++k) {
            bool in_coverage = false;
            for (size_t n = 0; n < b.size(); ++n)
                if (b.exposures[n].data[k] != 0.0) in_coverage = true;
            if (!in_coverage) continue;
            ++covered;
            CHECK(std::abs(rgb.data[k] - img.data[k]) <= 1e-3 * img.data[k]);
            CHECK(std::abs(rob.data[k] - img.data[k]) <= 1e-3 * img.data[k]);
        }
        CHECK(covered > 1000);  // the bracket sees most of the image
    }
}

TEST_CASE("fuse_hsv on achromatic brackets matches scalar fusion") {
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> mag(-4.0, 15.0);
    Image gray3(16, 16, 3);
    Image gray1(16, 16, 1);
    for (size_t p = 0; p < gray1.data.size(); ++p) {
        const double v = std::exp2(mag(rng));
        gray1.data[p] = v;
        gray3.data[p * 3 + 0] = gray3.data[p * 3 + 1] = gray3.data[p * 3 + 2] = v;
    }
    const ExposureSet times = ExposureSet::parse("0,-8,-15");
    const ToneMapper id = ToneMapper::identity();
    const ExposureBracket b3 = fdr::decompose(gray3, times, id);
    const ExposureBracket b1 = fdr::decompose(gray1, times, id);

    const Image hsv_rob = fdr::fuse_hsv(b3, fdr::ScalarFusion::Robertson);
    const Image rob = fdr::fuse_robertson(b1);
    const Image hsv_rgb = fdr::fuse_hsv(b3, fdr::ScalarFusion::Rgb);
    const Image rgb = fdr::fuse_rgb(b1, fdr::validity_mask(b1));
    for (size_t p = 0; p < gray1.data.size(); ++p) {
        for (int c = 0; c < 3; ++c) {
            CHECK(std::abs(hsv_rob.data[p * 3 + c] - rob.data[p]) <=
                  1e-9 * std::max(1.0, rob.data[p]));
            CHECK(std::abs(hsv_rgb.data[p * 3 + c] - rgb.data[p]) <=
                  1e-9 * std::max(1.0, rgb.data[p]));
        }
    }
}

TEST_CASE("fuse_hsv keeps the first exposure's hue on chromatic data") {
    // Saturated colors at radiance scale ~1 so exposure 0 is unsaturated.
    Image img(8, 8, 3);
    std::mt19937_64 rng(29);
    std::uniform_real_distribution<double> unit(0.05, 0.9);
    for (size_t p = 0; p < img.pixel_count(); ++p) {
        img.data[p * 3 + 0] = unit(rng);
        img.data[p * 3 + 1] = unit(rng) * 0.5;
        img.data[p * 3 + 2] = unit(rng) * 0.25;
    }
    const ExposureBracket b =
        fdr::decompose(img, ExposureSet::parse("0,-8"), ToneMapper::identity());
    const Image fused = fdr::fuse_hsv(b, fdr::ScalarFusion::Rgb);
    const Image hsv_in = fdr::rgb_to_hsv(img);
    const Image hsv_out = fdr::rgb_to_hsv(fused);
    for (size_t p = 0; p < img.pixel_count(); ++p) {
        // Hue is only pinned where exposure 0 kept all three channels.
        bool unsaturated = true;
        for (int c = 0; c < 3; ++c)
            if (b.exposures[0].data[p * 3 + c] == 0.0) unsaturated = false;
        if (!unsaturated) continue;
        double d = std::abs(hsv_out.data[p * 3] - hsv_in.data[p * 3]);
        d = std::min(d, 360.0 - d);
        CHECK(d <= 1.0);
    }
}

TEST_CASE("class mask spec parses and validates") {
    const auto spec = fdr::ClassMaskSpec::parse("0,1,2;3,4");
    REQUIRE(spec.keep.size() == 2);
    CHECK(spec.keep[0] == std::set<int>{0, 1, 2});
    CHECK(spec.keep[1] == std::set<int>{3, 4});
    CHECK_NOTHROW(spec.validate(2));
    CHECK_THROWS_AS(spec.validate(3), std::invalid_argument);
    CHECK_THROWS_AS(fdr::ClassMaskSpec::parse("0,5"), std::invalid_argument);
    CHECK_THROWS_AS(fdr::ClassMaskSpec::parse("a;b"), std::invalid_argument);
    CHECK_THROWS_AS(fdr::ClassMaskSpec::parse(""), std::invalid_argument);
    CHECK_THROWS_AS(fdr::ClassMaskSpec::parse("0,-1"), std::invalid_argument);
}

TEST_CASE("mask_classes zeroes samples outside each exposure's keep-set") {
    Image e0(2, 1, 3), e1(2, 1, 3);
    for (size_t k = 0; k < 6; ++k) {
        e0.data[k] = 0.5;
        e1.data[k] = 0.25;
    }
    ExposureBracket b;
    b.times = {1.0, 0.5};
    b.exposures = {e0, e1};

    fdr::SegmentationLabel label(2, 1, fdr::MapFormat::None);
    label.classes = {fdr::kClassSky, fdr::kClassDisk};

    const auto spec = fdr::ClassMaskSpec::parse("1;4");
    const ExposureBracket masked = fdr::mask_classes(b, label, spec);
    // Exposure 0 keeps sky (pixel 0), exposure 1 keeps disk (pixel 1).
    CHECK(masked.exposures[0].data[0] == 0.5);
    CHECK(masked.exposures[0].data[3] == 0.0);
    CHECK(masked.exposures[1].data[0] == 0.0);
    CHECK(masked.exposures[1].data[3] == 0.25);

    fdr::SegmentationLabel wrong(3, 1, fdr::MapFormat::None);
    CHECK_THROWS_AS(fdr::mask_classes(b, wrong, spec), std::invalid_argument);
    fdr::SegmentationLabel bad(2, 1, fdr::MapFormat::None);
    bad.classes = {7, 0};
    CHECK_THROWS_AS(fdr::mask_classes(b, bad, spec), std::invalid_argument);
}
