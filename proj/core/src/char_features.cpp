#include "statsim/char_features.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "statsim/error.hpp"

namespace statsim {

namespace {

void require_size(const GrayImage& img, std::size_t w, std::size_t h, const char* what) {
    if (img.width != w || img.height != h || img.pixels.size() != w * h) {
        throw ShapeError(std::string(what) + ": unexpected image size " + std::to_string(img.width) +
                         "x" + std::to_string(img.height));
    }
}

GrayImage binarize(const GrayImage& img) {
    GrayImage b(img.width, img.height);
    for (std::size_t i = 0; i < img.pixels.size(); ++i) b.pixels[i] = img.pixels[i] > kInkThreshold ? 1.0 : 0.0;
    return b;
}

// Neighbors P2..P9, clockwise from north.
std::array<int, 8> ring(const GrayImage& b, long x, long y) {
    return {b.at_or_zero(x, y - 1) != 0.0,     b.at_or_zero(x + 1, y - 1) != 0.0,
            b.at_or_zero(x + 1, y) != 0.0,     b.at_or_zero(x + 1, y + 1) != 0.0,
            b.at_or_zero(x, y + 1) != 0.0,     b.at_or_zero(x - 1, y + 1) != 0.0,
            b.at_or_zero(x - 1, y) != 0.0,     b.at_or_zero(x - 1, y - 1) != 0.0};
}

}  // namespace

double GrayImage::sample(double x, double y) const {
    const double fx0 = std::floor(x);
    const double fy0 = std::floor(y);
    const double fx = x - fx0;
    const double fy = y - fy0;
    const long x0 = static_cast<long>(fx0);
    const long y0 = static_cast<long>(fy0);
    const double top = (1.0 - fx) * at_or_zero(x0, y0) + fx * at_or_zero(x0 + 1, y0);
    const double bottom = (1.0 - fx) * at_or_zero(x0, y0 + 1) + fx * at_or_zero(x0 + 1, y0 + 1);
    return std::clamp((1.0 - fy) * top + fy * bottom, 0.0, 1.0);
}

Moments image_moments(const GrayImage& img) {
    Moments m;
    for (std::size_t y = 0; y < img.height; ++y) {
        for (std::size_t x = 0; x < img.width; ++x) {
            const double v = img.at(x, y);
            m.mass += v;
            m.cx += v * static_cast<double>(x);
            m.cy += v * static_cast<double>(y);
        }
    }
    if (m.mass <= 0.0) return m;
    m.cx /= m.mass;
    m.cy /= m.mass;
    for (std::size_t y = 0; y < img.height; ++y) {
        for (std::size_t x = 0; x < img.width; ++x) {
            const double v = img.at(x, y);
            const double dx = static_cast<double>(x) - m.cx;
            const double dy = static_cast<double>(y) - m.cy;
            m.mu20 += v * dx * dx;
            m.mu02 += v * dy * dy;
            m.mu11 += v * dx * dy;
        }
    }
    m.mu20 /= m.mass;
    m.mu02 /= m.mass;
    m.mu11 /= m.mass;
    return m;
}

GrayImage crop_and_scale(const GrayImage& img) {
    require_size(img, img.width, img.height, "crop_and_scale");
    std::size_t x0 = img.width, y0 = img.height, x1 = 0, y1 = 0;
    bool any = false;
    for (std::size_t y = 0; y < img.height; ++y) {
        for (std::size_t x = 0; x < img.width; ++x) {
            if (img.at(x, y) > kInkThreshold) {
                any = true;
                x0 = std::min(x0, x);
                x1 = std::max(x1, x);
                y0 = std::min(y0, y);
                y1 = std::max(y1, y);
            }
        }
    }
    if (!any) throw EmptyImageError("image has no pixel above the ink threshold");

    const std::size_t bw = x1 - x0 + 1;
    const std::size_t bh = y1 - y0 + 1;
    const double scale = static_cast<double>(kNormSize) / static_cast<double>(std::max(bw, bh));
    auto scaled = [&](std::size_t n) {
        const auto r = static_cast<std::size_t>(std::lround(static_cast<double>(n) * scale));
        return std::clamp<std::size_t>(r, 1, kNormSize);
    };
    const std::size_t out_w = scaled(bw);
    const std::size_t out_h = scaled(bh);
    const std::size_t ox = (kNormSize - out_w) / 2;
    const std::size_t oy = (kNormSize - out_h) / 2;

    GrayImage out(kNormSize, kNormSize);
    for (std::size_t v = 0; v < out_h; ++v) {
        const double sy = static_cast<double>(y0) + (static_cast<double>(v) + 0.5) / scale - 0.5;
        for (std::size_t u = 0; u < out_w; ++u) {
            const double sx = static_cast<double>(x0) + (static_cast<double>(u) + 0.5) / scale - 0.5;
            out.at(ox + u, oy + v) = img.sample(sx, sy);
        }
    }
    return out;
}

GrayImage slant_correct(const GrayImage& img40) {
    require_size(img40, kNormSize, kNormSize, "slant_correct");
    const Moments m = image_moments(img40);
    if (m.mass <= 0.0 || m.mu02 < 1e-9) return img40;
    const double shear = m.mu11 / m.mu02;
    GrayImage out(kNormSize, kNormSize);
    for (std::size_t y = 0; y < kNormSize; ++y) {
        const double offset = shear * (static_cast<double>(y) - m.cy);
        for (std::size_t x = 0; x < kNormSize; ++x) {
            out.at(x, y) = img40.sample(static_cast<double>(x) + offset, static_cast<double>(y));
        }
    }
    return out;
}

std::array<GrayImage, 5> directional_derivatives(const GrayImage& img40) {
    require_size(img40, kNormSize, kNormSize, "directional_derivatives");
    std::array<GrayImage, 5> maps;
    std::array<double, 5> c{}, s{};
    for (std::size_t k = 0; k < 5; ++k) {
        maps[k] = GrayImage(kNormSize, kNormSize);
        const double angle = static_cast<double>(k) * std::numbers::pi / 5.0;
        c[k] = k == 0 ? 1.0 : std::cos(angle);
        s[k] = k == 0 ? 0.0 : std::sin(angle);
    }
    for (long y = 0; y < static_cast<long>(kNormSize); ++y) {
        for (long x = 0; x < static_cast<long>(kNormSize); ++x) {
            const double dx = 0.5 * (img40.at_or_zero(x + 1, y) - img40.at_or_zero(x - 1, y));
            const double dy = 0.5 * (img40.at_or_zero(x, y + 1) - img40.at_or_zero(x, y - 1));
            for (std::size_t k = 0; k < 5; ++k) {
                maps[k].at(static_cast<std::size_t>(x), static_cast<std::size_t>(y)) =
                    0.5 * std::abs(c[k] * dx + s[k] * dy);
            }
        }
    }
    return maps;
}

GrayImage zhang_suen_thin(const GrayImage& binary) {
    GrayImage img = binary;
    std::vector<std::size_t> marked;
    bool changed = true;
    while (changed) {
        changed = false;
        for (int pass = 0; pass < 2; ++pass) {
            marked.clear();
            for (long y = 0; y < static_cast<long>(img.height); ++y) {
                for (long x = 0; x < static_cast<long>(img.width); ++x) {
                    if (img.at_or_zero(x, y) == 0.0) continue;
                    const auto p = ring(img, x, y);
                    int b = 0, a = 0;
                    for (int i = 0; i < 8; ++i) {
                        b += p[i];
                        a += (p[i] == 0 && p[(i + 1) % 8] == 1);
                    }
                    if (b < 2 || b > 6 || a != 1) continue;
                    // p[0]=P2 (N), p[2]=P4 (E), p[4]=P6 (S), p[6]=P8 (W)
                    const bool ok = pass == 0 ? (p[0] * p[2] * p[4] == 0 && p[2] * p[4] * p[6] == 0)
                                              : (p[0] * p[2] * p[6] == 0 && p[0] * p[4] * p[6] == 0);
                    if (ok) marked.push_back(static_cast<std::size_t>(y) * img.width + static_cast<std::size_t>(x));
                }
            }
            for (std::size_t i : marked) img.pixels[i] = 0.0;
            changed = changed || !marked.empty();
        }
    }
    return img;
}

SkeletonMaps skeleton_maps(const GrayImage& img40) {
    const GrayImage b = binarize(img40);
    SkeletonMaps out{GrayImage(b.width, b.height), GrayImage(b.width, b.height),
                     GrayImage(b.width, b.height)};
    for (long y = 0; y < static_cast<long>(b.height); ++y) {
        for (long x = 0; x < static_cast<long>(b.width); ++x) {
            if (b.at_or_zero(x, y) == 0.0) continue;
            const auto p = ring(b, x, y);
            if (std::ranges::all_of(p, [](int v) { return v == 1; })) {
                out.interior.at(static_cast<std::size_t>(x), static_cast<std::size_t>(y)) = 1.0;
            }
        }
    }
    const GrayImage skel = zhang_suen_thin(b);
    for (long y = 0; y < static_cast<long>(skel.height); ++y) {
        for (long x = 0; x < static_cast<long>(skel.width); ++x) {
            if (skel.at_or_zero(x, y) == 0.0) continue;
            const auto p = ring(skel, x, y);
            int n = 0;
            for (int v : p) n += v;
            const auto ux = static_cast<std::size_t>(x);
            const auto uy = static_cast<std::size_t>(y);
            if (n == 1) out.endpoints.at(ux, uy) = 1.0;
            if (n >= 3) out.junctions.at(ux, uy) = 1.0;
        }
    }
    return out;
}

GrayImage downsample10(const GrayImage& map40) {
    require_size(map40, kNormSize, kNormSize, "downsample10");
    constexpr std::size_t block = kNormSize / kGridSize;
    GrayImage out(kGridSize, kGridSize);
    for (std::size_t gy = 0; gy < kGridSize; ++gy) {
        for (std::size_t gx = 0; gx < kGridSize; ++gx) {
            double s = 0.0;
            for (std::size_t y = 0; y < block; ++y) {
                for (std::size_t x = 0; x < block; ++x) s += map40.at(gx * block + x, gy * block + y);
            }
            out.at(gx, gy) = s / static_cast<double>(block * block);
        }
    }
    return out;
}

FeatureVector extract(const GrayImage& img, const MapSelection& maps) {
    const GrayImage normalized = crop_and_scale(img);
    const GrayImage corrected = slant_correct(normalized);
    const auto derivs = directional_derivatives(corrected);
    const SkeletonMaps skel = skeleton_maps(corrected);
    const std::array<const GrayImage*, kMapCount> order = {
        &normalized, &corrected,      &derivs[0],     &derivs[1], &derivs[2],
        &derivs[3],  &derivs[4],      &skel.interior, &skel.endpoints, &skel.junctions};
    FeatureVector v;
    v.reserve(maps.count() * kGridSize * kGridSize);
    for (std::size_t m = 0; m < kMapCount; ++m) {
        if (!maps.test(m)) continue;
        const GrayImage small = downsample10(*order[m]);
        v.insert(v.end(), small.pixels.begin(), small.pixels.end());
    }
    return v;
}

}  // namespace statsim
