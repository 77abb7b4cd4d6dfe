#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "fdrkit/geometry.hpp"
#include "fdrkit/image.hpp"
#include "fdrkit/metrics.hpp"

using fdr::Image;
using fdr::MapFormat;

namespace {

Image rgb1x1(double r, double g, double b) {
    Image img(1, 1, 3);
    img.data = {r, g, b};
    return img;
}

// Circular hue distance in degrees.
double hue_dist(double a, double b) {
    double d = std::abs(a - b);
    return std::min(d, 360.0 - d);
}

}  // namespace

TEST_CASE("format names round-trip exactly") {
    for (MapFormat f : {MapFormat::None, MapFormat::SkyAngular, MapFormat::SkyLatlong,
                        MapFormat::Latlong})
        CHECK(fdr::parse_map_format(fdr::to_string(f)) == f);
    CHECK(fdr::to_string(MapFormat::SkyAngular) == "sky-angular");
    CHECK(fdr::to_string(MapFormat::SkyLatlong) == "sky-latlong");
    CHECK(fdr::to_string(MapFormat::Latlong) == "latlong");
    CHECK_THROWS_AS(fdr::parse_map_format("angular"), std::invalid_argument);
}

TEST_CASE("radiance validation rejects bad images") {
    Image ok(4, 4, 3, MapFormat::SkyAngular);
    CHECK_NOTHROW(fdr::validate_radiance(ok));

    Image negative = ok;
    negative.data[5] = -1e-9;
    CHECK_THROWS_AS(fdr::validate_radiance(negative), std::invalid_argument);

    Image nan_img = ok;
    nan_img.data[0] = std::nan("");
    CHECK_THROWS_AS(fdr::validate_radiance(nan_img), std::invalid_argument);

    Image rect(6, 4, 3, MapFormat::SkyAngular);  // sky-angular must be square
    CHECK_THROWS_AS(fdr::validate_radiance(rect), std::invalid_argument);
    rect.format = MapFormat::None;
    CHECK_NOTHROW(fdr::validate_radiance(rect));

    Image ldr(2, 2, 1);
    ldr.data = {0.0, 0.5, 1.0, 1.0 + 1e-12};
    CHECK_THROWS_AS(fdr::validate_ldr(ldr), std::invalid_argument);
    ldr.data[3] = 1.0;
    CHECK_NOTHROW(fdr::validate_ldr(ldr));
}

TEST_CASE("grayscale uses Rec.709 luma on 3 channels, magnitude on 1") {
    const Image g = fdr::grayscale(rgb1x1(1.0, 2.0, 4.0));
    CHECK(g.channels == 1);
    CHECK(g.data[0] == doctest::Approx(0.2126 * 1 + 0.7152 * 2 + 0.0722 * 4).epsilon(1e-15));

    const Image w = fdr::grayscale(rgb1x1(1.0, 1.0, 1.0));
    CHECK(w.data[0] == doctest::Approx(1.0).epsilon(1e-15));

    Image mono(1, 1, 1);
    mono.data = {3.5};
    CHECK(fdr::grayscale(mono).data[0] == 3.5);
}

TEST_CASE("RGB to HSV pins the primary and secondary colors") {
    double h, s, v;
    fdr::rgb_to_hsv_pixel(1, 0, 0, h, s, v);
    CHECK(h == 0.0); CHECK(s == 1.0); CHECK(v == 1.0);
    fdr::rgb_to_hsv_pixel(0, 1, 0, h, s, v);
    CHECK(h == 120.0);
    fdr::rgb_to_hsv_pixel(0, 0, 1, h, s, v);
    CHECK(h == 240.0);
    fdr::rgb_to_hsv_pixel(1, 1, 0, h, s, v);
    CHECK(h == 60.0);
    fdr::rgb_to_hsv_pixel(0, 1, 1, h, s, v);
    CHECK(h == 180.0);
    fdr::rgb_to_hsv_pixel(1, 0, 1, h, s, v);
    CHECK(h == 300.0);
    fdr::rgb_to_hsv_pixel(0.5, 0.5, 0.5, h, s, v);
    CHECK(h == 0.0); CHECK(s == 0.0); CHECK(v == 0.5);
    fdr::rgb_to_hsv_pixel(0, 0, 0, h, s, v);
    CHECK(h == 0.0); CHECK(s == 0.0); CHECK(v == 0.0);
}

TEST_CASE("HSV value channel carries HDR magnitudes") {
    double h, s, v;
    fdr::rgb_to_hsv_pixel(8.0, 4.0, 2.0, h, s, v);
    CHECK(v == 8.0);
    CHECK(s == doctest::Approx(0.75).epsilon(1e-15));
    CHECK(h == doctest::Approx(20.0).epsilon(1e-12));
    double r, g, b;
    fdr::hsv_to_rgb_pixel(h, s, v, r, g, b);
    CHECK(r == doctest::Approx(8.0).epsilon(1e-14));
    CHECK(g == doctest::Approx(4.0).epsilon(1e-14));
    CHECK(b == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("HSV round-trips 100k random HDR triples") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> mag(-4.0, 15.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int k = 0; k < 100000; ++k) {
        double rgb[3];
        const double scale = std::exp2(mag(rng));
        for (double& c : rgb) c = unit(rng) * scale;
        if (k % 17 == 0) rgb[1] = rgb[0];              // partial ties
        if (k % 29 == 0) rgb[2] = rgb[1] = rgb[0];     // achromatic
        double h, s, v, r, g, b;
        fdr::rgb_to_hsv_pixel(rgb[0], rgb[1], rgb[2], h, s, v);
        CHECK(h >= 0.0);
        CHECK(h < 360.0);
        fdr::hsv_to_rgb_pixel(h, s, v, r, g, b);
        const double tol = 1e-9 * std::max(1.0, v);
        CHECK(std::abs(r - rgb[0]) <= tol);
        CHECK(std::abs(g - rgb[1]) <= tol);
        CHECK(std::abs(b - rgb[2]) <= tol);
    }
}

TEST_CASE("hue wrap: conversion accepts hue outside [0,360)") {
    double r1, g1, b1, r2, g2, b2;
    fdr::hsv_to_rgb_pixel(380.0, 0.5, 1.0, r1, g1, b1);
    fdr::hsv_to_rgb_pixel(20.0, 0.5, 1.0, r2, g2, b2);
    CHECK(r1 == doctest::Approx(r2).epsilon(1e-14));
    CHECK(g1 == doctest::Approx(g2).epsilon(1e-14));
    CHECK(b1 == doctest::Approx(b2).epsilon(1e-14));
    fdr::hsv_to_rgb_pixel(-340.0, 0.5, 1.0, r1, g1, b1);
    CHECK(r1 == doctest::Approx(r2).epsilon(1e-12));
    (void)hue_dist;
}

TEST_CASE("image-level HSV conversion matches the pixel functions") {
    Image img(2, 1, 3);
    img.data = {0.25, 0.5, 0.75, 3.0, 1.0, 2.0};
    const Image hsv = fdr::rgb_to_hsv(img);
    const Image back = fdr::hsv_to_rgb(hsv);
    for (size_t k = 0; k < img.data.size(); ++k)
        CHECK(back.data[k] == doctest::Approx(img.data[k]).epsilon(1e-13));
    CHECK_THROWS_AS(fdr::rgb_to_hsv(Image(2, 2, 1)), std::invalid_argument);
}

TEST_CASE("clip_to_ev caps channels at min + 2^ev - 1") {
    Image img(2, 1, 1);
    img.data = {0.0, 100.0};
    const Image clipped = fdr::clip_to_ev(img, 4.0);
    CHECK(clipped.data[0] == 0.0);
    CHECK(clipped.data[1] == 15.0);  // 0 + 2^4 - 1
    CHECK(fdr::exposure_value(clipped) == doctest::Approx(4.0).epsilon(1e-15));

    // Values already inside the range are untouched.
    const Image wide = fdr::clip_to_ev(img, 8.0);
    CHECK(wide.data[1] == 100.0);
}

TEST_CASE("clip_to_ev with a nonzero floor offsets the threshold") {
    Image img(3, 1, 1);
    img.data = {2.0, 5.0, 40.0};
    const Image clipped = fdr::clip_to_ev(img, 3.0);
    CHECK(clipped.data[0] == 2.0);
    CHECK(clipped.data[1] == 5.0);
    CHECK(clipped.data[2] == 9.0);  // 2 + 2^3 - 1
}

TEST_CASE("clip_to_ev is idempotent on single-channel images") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    Image img(16, 16, 1);
    for (double& v : img.data) v = std::exp2(unit(rng) * 12.0) - 1.0;
    const Image once = fdr::clip_to_ev(img, 5.0);
    const Image twice = fdr::clip_to_ev(once, 5.0);
    for (size_t k = 0; k < img.data.size(); ++k) CHECK(twice.data[k] == once.data[k]);
}

TEST_CASE("equalized clipping preserves integrated illumination to 1e-9") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    SUBCASE("uniform weights (format none)") {
        Image img(32, 32, 3);
        for (double& v : img.data) v = std::exp2(unit(rng) * 14.0) - 1.0;
        fdr::SolidAngleMap ones;
        ones.width = ones.height = 32;
        ones.omega.assign(1024, 1.0);
        const double before = fdr::integrated_illumination(img, ones);
        const Image out = fdr::clip_to_ev(img, 3.0, true);
        const double after = fdr::integrated_illumination(out, ones);
        CHECK(std::abs(after - before) <= 1e-9 * before);
    }

    SUBCASE("sky-angular solid angles") {
        Image img(64, 64, 3, MapFormat::SkyAngular);
        for (double& v : img.data) v = std::exp2(unit(rng) * 14.0) - 1.0;
        const auto omega = fdr::solid_angle_map(MapFormat::SkyAngular, 64, 64);
        const double before = fdr::integrated_illumination(img, omega);
        const Image out = fdr::clip_to_ev(img, 4.0, true);
        const double after = fdr::integrated_illumination(out, omega);
        CHECK(std::abs(after - before) <= 1e-9 * before);
    }
}

TEST_CASE("clip_to_ev rejects bad targets") {
    Image img(2, 2, 1);
    CHECK_THROWS_AS(fdr::clip_to_ev(img, -1.0), std::invalid_argument);
    CHECK_THROWS_AS(fdr::clip_to_ev(img, std::nan("")), std::invalid_argument);
}
