#include <doctest.h>

#include <cmath>
#include <numbers>

#include "helpers.hpp"
#include "statsim/char_features.hpp"
#include "statsim/error.hpp"
#include "statsim/glyphs.hpp"

using namespace statsim;

namespace {

GrayImage random_image(Rng& rng, std::size_t w, std::size_t h) {
    GrayImage img(w, h);
    for (double& p : img.pixels) p = rng.uniform01();
    return img;
}

double max_abs_diff(const GrayImage& a, const GrayImage& b) {
    double d = 0.0;
    for (std::size_t i = 0; i < a.pixels.size(); ++i) d = std::max(d, std::abs(a.pixels[i] - b.pixels[i]));
    return d;
}

std::size_t ink_count(const GrayImage& img) {
    std::size_t n = 0;
    for (double p : img.pixels) n += p != 0.0;
    return n;
}

GrayImage rendered_digit(int digit, std::uint64_t seed) {
    Rng rng(seed);
    const glyphs::WriterStyle w = glyphs::random_writer({}, rng);
    return glyphs::render(digit, w.digits[static_cast<std::size_t>(digit)]);
}

}  // namespace

TEST_CASE("crop of a full frame is the identity") {
    const GrayImage img(40, 40, 1.0);
    CHECK(max_abs_diff(crop_and_scale(img), img) <= 1e-6);
}

TEST_CASE("a 20x80 bar becomes a centered 10x40 bar") {
    GrayImage img(100, 100);
    for (std::size_t y = 10; y < 90; ++y) {
        for (std::size_t x = 30; x < 50; ++x) img.at(x, y) = 1.0;
    }
    const GrayImage out = crop_and_scale(img);
    REQUIRE(out.width == 40);
    REQUIRE(out.height == 40);
    for (std::size_t y = 0; y < 40; ++y) {
        for (std::size_t x = 0; x < 40; ++x) {
            const double expected = (x >= 15 && x < 25) ? 1.0 : 0.0;
            CHECK(out.at(x, y) == doctest::Approx(expected).epsilon(1e-9));
        }
    }
}

TEST_CASE("blank images are rejected") {
    CHECK_THROWS_AS(crop_and_scale(GrayImage(28, 28)), EmptyImageError);
    CHECK_THROWS_AS(extract(GrayImage(28, 28)), EmptyImageError);
    CHECK_THROWS_AS(crop_and_scale(GrayImage(28, 28, 0.5)), EmptyImageError);
}

TEST_CASE("slant correction leaves a symmetric blob alone") {
    GrayImage img(40, 40);
    for (std::size_t y = 8; y < 32; ++y) {
        for (std::size_t x = 12; x < 28; ++x) img.at(x, y) = 1.0;
    }
    CHECK(max_abs_diff(slant_correct(img), img) <= 1e-6);
}

TEST_CASE("slant correction removes the mixed moment of a 45 degree line") {
    GrayImage img(40, 40);
    for (std::size_t y = 5; y < 35; ++y) {
        for (std::size_t x = 0; x < 40; ++x) {
            const double d = std::abs(static_cast<double>(x) - static_cast<double>(y));
            img.at(x, y) = d <= 1.0 ? 1.0 : 0.0;
        }
    }
    const double before = image_moments(img).mu11;
    const double after = image_moments(slant_correct(img)).mu11;
    CHECK(std::abs(before) > 1.0);
    CHECK(std::abs(after) < 0.05 * std::abs(before));
}

TEST_CASE("slant correction falls back on a single row") {
    GrayImage img(40, 40);
    for (std::size_t x = 5; x < 30; ++x) img.at(x, 17) = 1.0;
    CHECK(slant_correct(img) == img);
}

TEST_CASE("derivatives of a constant image vanish") {
    GrayImage img(40, 40, 0.7);
    // zero padding makes the frame border respond; the interior must be flat
    const auto maps = directional_derivatives(img);
    for (const GrayImage& m : maps) {
        for (std::size_t y = 1; y < 39; ++y) {
            for (std::size_t x = 1; x < 39; ++x) CHECK(m.at(x, y) == 0.0);
        }
    }
}

TEST_CASE("vertical step edge response follows |cos(k pi/5)|") {
    GrayImage img(40, 40);
    for (std::size_t y = 0; y < 40; ++y) {
        for (std::size_t x = 20; x < 40; ++x) img.at(x, y) = 1.0;
    }
    const auto maps = directional_derivatives(img);
    double interior_max = 0.0;
    for (std::size_t y = 1; y < 39; ++y) {
        for (std::size_t x = 1; x < 39; ++x) interior_max = std::max(interior_max, maps[0].at(x, y));
    }
    CHECK(maps[0].at(19, 20) == interior_max);
    CHECK(maps[0].at(20, 20) == interior_max);
    CHECK(maps[0].at(19, 20) == doctest::Approx(0.25));
    for (std::size_t k = 0; k < 5; ++k) {
        const double expected = 0.25 * std::abs(std::cos(static_cast<double>(k) * std::numbers::pi / 5.0));
        CHECK(maps[k].at(19, 20) == doctest::Approx(expected).epsilon(1e-12));
    }
}

TEST_CASE("derivative maps are mirror partners and rotation preserves energy") {
    Rng rng(4);
    const GrayImage img = random_image(rng, 40, 40);
    GrayImage mirrored(40, 40), rotated(40, 40);
    for (std::size_t y = 0; y < 40; ++y) {
        for (std::size_t x = 0; x < 40; ++x) {
            mirrored.at(x, y) = img.at(39 - x, y);
            rotated.at(x, y) = img.at(y, 39 - x);
        }
    }
    const auto a = directional_derivatives(img);
    const auto m = directional_derivatives(mirrored);
    const auto r = directional_derivatives(rotated);
    for (std::size_t k = 0; k < 5; ++k) {
        const std::size_t partner = (5 - k) % 5;
        for (std::size_t y = 0; y < 40; ++y) {
            for (std::size_t x = 0; x < 40; ++x) CHECK(std::abs(m[k].at(x, y) - a[partner].at(39 - x, y)) < 1e-12);
        }
    }
    auto energy = [](const std::array<GrayImage, 5>& maps) {
        double e = 0.0;
        for (const GrayImage& g : maps) {
            for (double v : g.pixels) e += v * v;
        }
        return e;
    };
    CHECK(energy(r) == doctest::Approx(energy(a)).epsilon(1e-12));
    for (const GrayImage& g : a) {
        for (double v : g.pixels) {
            CHECK(v >= 0.0);
            CHECK(v <= 1.0);
        }
    }
}

TEST_CASE("thin horizontal bar has two endpoints") {
    GrayImage img(40, 40);
    for (std::size_t x = 10; x < 20; ++x) img.at(x, 20) = 1.0;
    const SkeletonMaps s = skeleton_maps(img);
    CHECK(ink_count(s.endpoints) == 2);
    CHECK(s.endpoints.at(10, 20) == 1.0);
    CHECK(s.endpoints.at(19, 20) == 1.0);
    CHECK(ink_count(s.junctions) == 0);
    CHECK(ink_count(s.interior) == 0);
    CHECK(zhang_suen_thin(img) == img);
}

TEST_CASE("solid square interior is the inner square") {
    GrayImage img(40, 40);
    for (std::size_t y = 15; y < 25; ++y) {
        for (std::size_t x = 15; x < 25; ++x) img.at(x, y) = 1.0;
    }
    const SkeletonMaps s = skeleton_maps(img);
    for (std::size_t y = 0; y < 40; ++y) {
        for (std::size_t x = 0; x < 40; ++x) {
            const bool inner = x >= 16 && x < 24 && y >= 16 && y < 24;
            CHECK(s.interior.at(x, y) == (inner ? 1.0 : 0.0));
        }
    }
}

TEST_CASE("plus sign skeleton has four endpoints and a junction") {
    GrayImage img(40, 40);
    for (std::size_t i = 8; i < 33; ++i) {
        for (std::size_t t = 19; t < 22; ++t) {
            img.at(i, t) = 1.0;
            img.at(t, i) = 1.0;
        }
    }
    const SkeletonMaps s = skeleton_maps(img);
    CHECK(ink_count(s.endpoints) == 4);
    CHECK(ink_count(s.junctions) >= 1);
}

TEST_CASE("blank image gives empty skeleton maps") {
    const SkeletonMaps s = skeleton_maps(GrayImage(40, 40));
    CHECK(ink_count(s.interior) + ink_count(s.endpoints) + ink_count(s.junctions) == 0);
}

TEST_CASE("downsampling") {
    const GrayImage c = downsample10(GrayImage(40, 40, 0.3));
    for (double v : c.pixels) CHECK(v == doctest::Approx(0.3).epsilon(1e-15));

    GrayImage one(40, 40);
    one.at(13, 27) = 1.0;
    const GrayImage d = downsample10(one);
    CHECK(ink_count(d) == 1);
    CHECK(d.at(3, 6) == 1.0 / 16.0);

    CHECK_THROWS_AS(downsample10(GrayImage(28, 28)), ShapeError);

    Rng rng(10);
    const GrayImage img = random_image(rng, 40, 40);
    const GrayImage out = downsample10(img);
    for (std::size_t gy = 0; gy < 10; ++gy) {
        for (std::size_t gx = 0; gx < 10; ++gx) {
            double s = 0.0;
            for (std::size_t k = 0; k < 16; ++k) s += img.pixels[(4 * gy + k / 4) * 40 + 4 * gx + k % 4];
            CHECK(std::abs(out.at(gx, gy) - s / 16.0) <= 1e-12);
        }
    }
}

TEST_CASE("feature vector shape, range and raw block") {
    for (int d = 0; d < 10; ++d) {
        const GrayImage img = rendered_digit(d, 100 + static_cast<std::uint64_t>(d));
        const FeatureVector v = extract(img);
        REQUIRE(v.size() == kFeatureDim);
        for (double x : v) {
            CHECK(x >= 0.0);
            CHECK(x <= 1.0);
        }
        const GrayImage raw = downsample10(crop_and_scale(img));
        for (std::size_t i = 0; i < 100; ++i) CHECK(v[i] == raw.pixels[i]);
        CHECK(extract(img) == v);
    }
}

TEST_CASE("map selections pick blocks in order") {
    const GrayImage img = rendered_digit(3, 7);
    const FeatureVector all = extract(img);
    const FeatureVector raw = extract(img, kRawOnly);
    const FeatureVector seven = extract(img, kRawSlantDerivs);
    CHECK(raw.size() == 100);
    CHECK(seven.size() == 700);
    CHECK(std::equal(seven.begin(), seven.end(), all.begin()));
}

TEST_CASE("translation within the canvas does not change features") {
    const GrayImage glyph = rendered_digit(5, 3);
    GrayImage a(60, 60), b(60, 60);
    for (std::size_t y = 0; y < glyph.height; ++y) {
        for (std::size_t x = 0; x < glyph.width; ++x) {
            a.at(x + 2, y + 5) = glyph.at(x, y);
            b.at(x + 29, y + 17) = glyph.at(x, y);
        }
    }
    const FeatureVector fa = extract(a), fb = extract(b);
    double d = 0.0;
    for (std::size_t i = 0; i < fa.size(); ++i) d = std::max(d, std::abs(fa[i] - fb[i]));
    CHECK(d <= 1e-6);
}

TEST_CASE("slant correction is approximately idempotent") {
    double worst_single = 0.0, worst_repeat = 0.0;
    for (int d = 0; d < 10; ++d) {
        const GrayImage n = crop_and_scale(rendered_digit(d, 50 + static_cast<std::uint64_t>(d)));
        const GrayImage once = slant_correct(n);
        const GrayImage twice = slant_correct(once);
        worst_single = std::max(worst_single, max_abs_diff(n, once));
        worst_repeat = std::max(worst_repeat, max_abs_diff(once, twice));
        CHECK(std::abs(image_moments(once).mu11) < std::abs(image_moments(n).mu11) + 1e-9);
    }
    CHECK(worst_repeat <= worst_single);
}
