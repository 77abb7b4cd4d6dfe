#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "fdrkit/segmentation.hpp"
#include "fdrkit/tonemap.hpp"

using fdr::BinaryMask;
using fdr::Direction;
using fdr::Image;
using fdr::MapFormat;

namespace {

constexpr double kDegToRad = 3.14159265358979323846 / 180.0;

// Reference morphology: same circular element rule, written independently.
bool se_member(int di, int dj, int diameter) {
    return di * di + dj * dj <= (diameter / 2.0) * (diameter / 2.0);
}

BinaryMask ref_morph(const BinaryMask& m, int diameter, bool erode) {
    const int radius = diameter / 2;
    BinaryMask out(m.width, m.height);
    for (int i = 0; i < m.height; ++i) {
        for (int j = 0; j < m.width; ++j) {
            bool all = true, any = false;
            for (int di = -radius; di <= radius; ++di) {
                for (int dj = -radius; dj <= radius; ++dj) {
                    if (!se_member(di, dj, diameter)) continue;
                    const int ii = i + di, jj = j + dj;
                    if (ii < 0 || ii >= m.height || jj < 0 || jj >= m.width) continue;
                    if (m.at(ii, jj))
                        any = true;
                    else
                        all = false;
                }
            }
            out.at(i, j) = erode ? (all ? 1 : 0) : (any ? 1 : 0);
        }
    }
    return out;
}

BinaryMask ref_hand_drawn(const BinaryMask& m, int diameter) {
    BinaryMask opened = ref_morph(ref_morph(m, diameter, true), diameter, false);
    return ref_morph(ref_morph(opened, diameter, false), diameter, true);
}

Image pixel_rgb(double r, double g, double b) {
    Image img(1, 1, 3);
    img.data = {r, g, b};
    return img;
}

}  // namespace

TEST_CASE("cloud detector separates blue sky from gray cloud") {
    // Strongly blue pixel: chromaticity well above any sane threshold.
    CHECK(fdr::cloud_mask(pixel_rgb(0.0, 0.2, 5.0)).data[0] == 0);
    // Gray pixel: zero chromaticity.
    CHECK(fdr::cloud_mask(pixel_rgb(3.0, 3.0, 3.0)).data[0] == 1);
    // Black pixel: undefined ratio resolves to cloud.
    CHECK(fdr::cloud_mask(pixel_rgb(0.0, 0.0, 0.0)).data[0] == 1);
    // Green does not participate.
    CHECK(fdr::cloud_mask(pixel_rgb(0.0, 100.0, 5.0)).data[0] == 0);

    CHECK_THROWS_AS(fdr::cloud_mask(Image(2, 2, 1)), std::invalid_argument);
    CHECK_THROWS_AS(fdr::cloud_mask(pixel_rgb(-1.0, 0.0, 0.0)),
                    std::invalid_argument);
}

TEST_CASE("cloud threshold is inclusive and compresses via mu-law") {
    const Image img = pixel_rgb(2.0, 0.0, 4.0);
    const fdr::ToneMapper tm = fdr::ToneMapper::mu_law_log2();
    const double r = tm.apply(2.0), b = tm.apply(4.0);
    const double y = (b - r) / (b + r);
    CHECK(y > 0.0);
    CHECK(fdr::cloud_mask(img, y).data[0] == 1);  // y <= threshold keeps cloud
    CHECK(fdr::cloud_mask(img, std::nextafter(y, 0.0)).data[0] == 0);
    // Without compression the raw ratio (4-2)/(4+2) = 1/3 would flip this
    // threshold; mu-law squeezes bright channels together.
    CHECK(y < 1.0 / 3.0);
}

TEST_CASE("mask smoothing matches the reference opening-then-closing") {
    std::mt19937_64 rng(42);
    std::bernoulli_distribution coin(0.5);
    for (int diameter : {3, 5}) {
        for (int trial = 0; trial < 4; ++trial) {
            BinaryMask m(20, 20);
            for (auto& v : m.data) v = coin(rng) ? 1 : 0;
            const BinaryMask got = fdr::hand_drawn(m, diameter);
            const BinaryMask want = ref_hand_drawn(m, diameter);
            CHECK(got.data == want.data);
        }
    }
}

TEST_CASE("mask smoothing fixed points and speck removal") {
    BinaryMask ones(16, 16);
    for (auto& v : ones.data) v = 1;
    CHECK(fdr::hand_drawn(ones, 15).data == ones.data);

    BinaryMask zeros(16, 16);
    CHECK(fdr::hand_drawn(zeros, 15).data == zeros.data);

    BinaryMask speck(9, 9);
    speck.at(4, 4) = 1;
    CHECK(fdr::hand_drawn(speck, 3).data == std::vector<uint8_t>(81, 0));

    BinaryMask hole(9, 9);
    for (auto& v : hole.data) v = 1;
    hole.at(4, 4) = 0;
    const BinaryMask filled = fdr::hand_drawn(hole, 3);
    CHECK(filled.data == std::vector<uint8_t>(81, 1));

    CHECK_THROWS_AS(fdr::hand_drawn(ones, 4), std::invalid_argument);
    CHECK_THROWS_AS(fdr::hand_drawn(ones, 0), std::invalid_argument);
    CHECK_THROWS_AS(fdr::hand_drawn(BinaryMask(), 3), std::invalid_argument);
}

TEST_CASE("solar disk and corona pixels honor their angular radii") {
    const Direction zenith{0.0, 0.0, 1.0};
    const auto masks = fdr::solar_mask(MapFormat::SkyAngular, 512, 512, zenith);

    int disk = 0, corona = 0;
    for (int i = 0; i < 512; ++i) {
        for (int j = 0; j < 512; ++j) {
            const auto dir = fdr::pixel_direction(MapFormat::SkyAngular, 512, 512, i, j);
            if (masks.disk.at(i, j)) {
                ++disk;
                REQUIRE(dir.has_value());
                CHECK(dir->angle_to(zenith) <= 0.25 * kDegToRad);
                CHECK(masks.corona.at(i, j) == 0);
            }
            if (masks.corona.at(i, j)) {
                ++corona;
                REQUIRE(dir.has_value());
                CHECK(dir->angle_to(zenith) > 0.25 * kDegToRad);
                CHECK(dir->angle_to(zenith) <= 2.5 * kDegToRad);
            }
        }
    }
    // The four pixel centers adjacent to the zenith all sit 0.2487 deg away.
    CHECK(disk == 4);
    // Solid-angle estimate: ring area / pixel area ~ 158.7 pixels.
    CHECK(corona >= 140);
    CHECK(corona <= 180);
}

TEST_CASE("a sub-pixel sun promotes exactly one nearest pixel") {
    const Direction zenith{0.0, 0.0, 1.0};
    // On an 8x8 sky-angular raster the nearest pixel center is ~16 deg away.
    const auto masks = fdr::solar_mask(MapFormat::SkyAngular, 8, 8, zenith);
    int disk = 0, corona = 0;
    int di = -1, dj = -1;
    for (int i = 0; i < 8; ++i) {
        for (int j = 0; j < 8; ++j) {
            if (masks.disk.at(i, j)) {
                ++disk;
                di = i;
                dj = j;
            }
            corona += masks.corona.at(i, j);
        }
    }
    CHECK(disk == 1);
    CHECK(corona == 0);
    // The winner is one of the four center pixels tied nearest the zenith.
    CHECK((di == 3 || di == 4));
    CHECK((dj == 3 || dj == 4));
}

TEST_CASE("solar mask accepts a horizon sun and rejects one below") {
    const auto masks =
        fdr::solar_mask(MapFormat::SkyLatlong, 64, 16, Direction{1.0, 0.0, 0.0});
    int disk = 0;
    for (auto v : masks.disk.data) disk += v;
    CHECK(disk >= 1);

    CHECK_THROWS_AS(
        fdr::solar_mask(MapFormat::SkyAngular, 64, 64, Direction{0.0, 0.0, -1.0}),
        std::invalid_argument);
}

TEST_CASE("composite labels follow disk > corona > cloud > sky priority") {
    BinaryMask cloud(2, 2);
    cloud.data = {1, 1, 1, 0};
    fdr::SolarMasks solar;
    solar.disk = BinaryMask(2, 2);
    solar.corona = BinaryMask(2, 2);
    solar.disk.at(0, 0) = 1;
    solar.corona.at(0, 0) = 1;  // loses to the disk
    solar.corona.at(0, 1) = 1;  // beats the cloud

    const auto label = fdr::composite_label(cloud, solar, MapFormat::None);
    CHECK(label.at(0, 0) == fdr::kClassDisk);
    CHECK(label.at(0, 1) == fdr::kClassCorona);
    CHECK(label.at(1, 0) == fdr::kClassCloud);
    CHECK(label.at(1, 1) == fdr::kClassSky);

    fdr::SolarMasks wrong;
    wrong.disk = BinaryMask(3, 2);
    wrong.corona = BinaryMask(2, 2);
    CHECK_THROWS_AS(fdr::composite_label(cloud, wrong, MapFormat::None),
                    std::invalid_argument);
}

TEST_CASE("pixels outside the mapped domain label as border") {
    const int n = 8;
    BinaryMask cloud(n, n);
    for (auto& v : cloud.data) v = 1;
    const auto solar =
        fdr::solar_mask(MapFormat::SkyAngular, n, n, Direction{0.0, 0.0, 1.0});
    const auto label = fdr::composite_label(cloud, solar, MapFormat::SkyAngular);
    int border = 0;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            const bool mapped =
                fdr::pixel_direction(MapFormat::SkyAngular, n, n, i, j).has_value();
            if (!mapped) {
                ++border;
                CHECK(label.at(i, j) == fdr::kClassBorder);
            } else {
                CHECK(label.at(i, j) != fdr::kClassBorder);
            }
        }
    }
    CHECK(label.at(0, 0) == fdr::kClassBorder);  // corner is off the disk
    CHECK(border > 0);
}
