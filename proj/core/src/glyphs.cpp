#include "statsim/glyphs.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

namespace statsim::glyphs {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr std::size_t kKnotStep = 6;

Stroke arc(double cx, double cy, double rx, double ry, double a0_deg, double a1_deg, int n) {
    Stroke s;
    for (int i = 0; i <= n; ++i) {
        const double a = (a0_deg + (a1_deg - a0_deg) * i / n) * kPi / 180.0;
        s.push_back({cx + rx * std::cos(a), cy + ry * std::sin(a)});
    }
    return s;
}

Stroke join(Stroke a, const Stroke& b) {
    a.insert(a.end(), b.begin(), b.end());
    return a;
}

Stroke line(std::initializer_list<Point> pts) { return Stroke(pts); }

Allograph glyph(std::initializer_list<Stroke> strokes) { return Allograph{std::vector<Stroke>(strokes)}; }

std::vector<std::vector<Allograph>> build_templates() {
    std::vector<std::vector<Allograph>> t(10);
    t[0] = {glyph({arc(0.5, 0.5, 0.30, 0.42, -90, 270, 24)}),
            glyph({arc(0.5, 0.5, 0.24, 0.43, -60, 310, 24)})};
    t[1] = {glyph({line({{0.5, 0.05}, {0.5, 0.95}})}),
            glyph({line({{0.32, 0.25}, {0.5, 0.05}, {0.5, 0.95}})}),
            glyph({line({{0.32, 0.25}, {0.5, 0.05}, {0.5, 0.95}}), line({{0.3, 0.95}, {0.7, 0.95}})})};
    t[2] = {glyph({join(arc(0.5, 0.3, 0.28, 0.25, -180, 20, 12), line({{0.18, 0.95}, {0.85, 0.95}}))}),
            glyph({join(arc(0.5, 0.32, 0.27, 0.27, -160, 0, 10),
                        join(line({{0.2, 0.95}}), arc(0.32, 0.86, 0.1, 0.08, 90, 380, 8))),
                   line({{0.38, 0.92}, {0.85, 0.92}})})};
    t[3] = {glyph({arc(0.48, 0.28, 0.27, 0.23, -160, 90, 14), arc(0.48, 0.73, 0.30, 0.22, -90, 160, 14)}),
            glyph({join(line({{0.2, 0.05}, {0.8, 0.05}, {0.45, 0.42}}),
                        arc(0.48, 0.68, 0.30, 0.26, -100, 165, 14))})};
    t[4] = {glyph({line({{0.62, 0.95}, {0.62, 0.05}, {0.15, 0.66}, {0.85, 0.66}})}),
            glyph({line({{0.25, 0.05}, {0.2, 0.6}, {0.85, 0.6}}), line({{0.65, 0.25}, {0.65, 0.95}})})};
    t[5] = {glyph({join(line({{0.78, 0.05}, {0.3, 0.05}, {0.26, 0.45}}),
                        arc(0.48, 0.66, 0.30, 0.28, -120, 150, 14))}),
            glyph({join(line({{0.3, 0.05}, {0.26, 0.45}}), arc(0.48, 0.66, 0.30, 0.28, -120, 150, 14)),
                   line({{0.3, 0.05}, {0.8, 0.03}})})};
    t[6] = {glyph({join(line({{0.72, 0.05}, {0.5, 0.15}, {0.33, 0.38}, {0.25, 0.65}}),
                        arc(0.5, 0.7, 0.25, 0.24, 180, 540, 20))}),
            glyph({join(line({{0.65, 0.05}, {0.3, 0.6}}), arc(0.5, 0.72, 0.24, 0.22, 200, 560, 20))})};
    t[7] = {glyph({line({{0.15, 0.05}, {0.85, 0.05}, {0.4, 0.95}})}),
            glyph({line({{0.15, 0.05}, {0.85, 0.05}, {0.4, 0.95}}), line({{0.35, 0.52}, {0.75, 0.52}})}),
            glyph({line({{0.15, 0.15}, {0.2, 0.05}, {0.85, 0.05}, {0.45, 0.95}})})};
    t[8] = {glyph({arc(0.5, 0.28, 0.22, 0.22, 90, 450, 20), arc(0.5, 0.72, 0.27, 0.23, -90, 270, 20)}),
            glyph({arc(0.52, 0.27, 0.20, 0.21, 90, 450, 20), arc(0.48, 0.72, 0.28, 0.23, -90, 270, 20)})};
    t[9] = {glyph({arc(0.48, 0.3, 0.24, 0.23, 0, 360, 20), line({{0.72, 0.3}, {0.7, 0.95}})}),
            glyph({arc(0.48, 0.3, 0.24, 0.23, 0, 360, 20),
                   line({{0.72, 0.3}, {0.7, 0.65}, {0.55, 0.9}, {0.3, 0.9}})})};
    return t;
}

Warp random_warp(double amplitude, Rng& rng) {
    Warp w;
    w.ax = rng.uniform(-amplitude, amplitude);
    w.ay = rng.uniform(-amplitude, amplitude);
    w.fx1 = rng.uniform(-1.5, 1.5);
    w.fy1 = rng.uniform(-1.5, 1.5);
    w.fx2 = rng.uniform(-1.5, 1.5);
    w.fy2 = rng.uniform(-1.5, 1.5);
    w.px = rng.uniform(0.0, 2.0 * kPi);
    w.py = rng.uniform(0.0, 2.0 * kPi);
    return w;
}

Point apply(const Warp& w, Point q) {
    const double dx = w.ax * std::sin(2.0 * kPi * (w.fx1 * q.x + w.fy1 * q.y) + w.px);
    const double dy = w.ay * std::sin(2.0 * kPi * (w.fx2 * q.x + w.fy2 * q.y) + w.py);
    return {q.x + dx, q.y + dy};
}

double segment_distance(double px, double py, Point a, Point b) {
    const double vx = b.x - a.x, vy = b.y - a.y;
    const double len2 = vx * vx + vy * vy;
    double t = len2 > 0.0 ? ((px - a.x) * vx + (py - a.y) * vy) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    return std::hypot(px - (a.x + t * vx), py - (a.y + t * vy));
}

}  // namespace

const std::vector<std::vector<Allograph>>& digit_templates() {
    static const auto templates = build_templates();
    return templates;
}

WriterStyle random_writer(const StyleRanges& r, Rng& rng) {
    GlyphStyle shared;
    shared.rotation = rng.uniform(-r.rotation_deg, r.rotation_deg) * kPi / 180.0;
    shared.shear = rng.uniform(-r.shear, r.shear);
    shared.x_scale = rng.uniform(r.x_scale_lo, r.x_scale_hi);
    shared.y_scale = rng.uniform(r.y_scale_lo, r.y_scale_hi);
    shared.thickness = rng.uniform(r.thickness_lo, r.thickness_hi);
    WriterStyle w;
    const auto& templates = digit_templates();
    for (std::size_t d = 0; d < templates.size(); ++d) {
        GlyphStyle g = shared;
        g.allograph = rng.below(templates[d].size());
        g.warp = random_warp(r.warp, rng);
        g.writer_wobble = r.wobble;
        g.writer_wobble_seed = rng.next_u64();
        w.digits.push_back(g);
    }
    return w;
}

GlyphStyle jitter(const GlyphStyle& base, const SampleJitter& j, Rng& rng) {
    GlyphStyle g = base;
    g.rotation += rng.uniform(-j.rotation_deg, j.rotation_deg) * kPi / 180.0;
    g.shear += rng.uniform(-j.shear, j.shear);
    g.x_scale *= 1.0 + rng.uniform(-j.scale, j.scale);
    g.y_scale *= 1.0 + rng.uniform(-j.scale, j.scale);
    g.thickness = std::max(0.6, g.thickness + rng.uniform(-j.thickness, j.thickness));
    const Warp extra = random_warp(j.warp, rng);
    g.warp.ax += extra.ax;
    g.warp.ay += extra.ay;
    g.warp.px += rng.uniform(-0.3, 0.3);
    g.warp.py += rng.uniform(-0.3, 0.3);
    g.sample_wobble = j.wobble;
    g.sample_wobble_seed = rng.next_u64();
    return g;
}

GrayImage render(int digit, const GlyphStyle& style, std::size_t canvas) {
    const auto& allographs = digit_templates().at(static_cast<std::size_t>(digit));
    const Allograph& shape = allographs[style.allograph % allographs.size()];
    const double box = static_cast<double>(canvas) * 20.0 / 28.0;
    const double half = static_cast<double>(canvas) / 2.0;
    const double c = std::cos(style.rotation), s = std::sin(style.rotation);
    auto place = [&](Point p) -> Point {
        Point q = apply(style.warp, {p.x - 0.5, p.y - 0.5});
        q.x *= style.x_scale;
        q.y *= style.y_scale;
        q.x -= style.shear * q.y;
        const Point r{c * q.x - s * q.y, s * q.x + c * q.y};
        return {r.x * box + half, r.y * box + half};
    };

    GrayImage img(canvas, canvas);
    const double radius = style.thickness;
    Rng writer_rng(style.writer_wobble_seed), sample_rng(style.sample_wobble_seed);
    for (const Stroke& stroke : shape.strokes) {
        // Offsets are drawn at knots every kKnotStep points and interpolated in between.
        const std::size_t n = stroke.size();
        const std::size_t knots = (n - 1 + kKnotStep - 1) / kKnotStep + 1;
        std::vector<Point> offsets(knots);
        for (Point& o : offsets) {
            o.x = style.writer_wobble * writer_rng.normal() + style.sample_wobble * sample_rng.normal();
            o.y = style.writer_wobble * writer_rng.normal() + style.sample_wobble * sample_rng.normal();
        }
        std::vector<Point> pts;
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t k = std::min(i / kKnotStep, knots - 2 + (knots == 1));
            const std::size_t k1 = std::min(k + 1, knots - 1);
            const std::size_t span = std::max<std::size_t>(1, std::min(kKnotStep, n - 1 - k * kKnotStep));
            const double t = std::clamp(static_cast<double>(i - k * kKnotStep) / static_cast<double>(span), 0.0, 1.0);
            const Point o{offsets[k].x + t * (offsets[k1].x - offsets[k].x), offsets[k].y + t * (offsets[k1].y - offsets[k].y)};
            pts.push_back(place({stroke[i].x + o.x, stroke[i].y + o.y}));
        }
        for (std::size_t k = 0; k + 1 < pts.size(); ++k) {
            const Point a = pts[k], b = pts[k + 1];
            const double reach = radius + 1.0;
            const long x0 = std::max(0L, static_cast<long>(std::floor(std::min(a.x, b.x) - reach)));
            const long x1 = std::min(static_cast<long>(canvas) - 1, static_cast<long>(std::ceil(std::max(a.x, b.x) + reach)));
            const long y0 = std::max(0L, static_cast<long>(std::floor(std::min(a.y, b.y) - reach)));
            const long y1 = std::min(static_cast<long>(canvas) - 1, static_cast<long>(std::ceil(std::max(a.y, b.y) + reach)));
            for (long y = y0; y <= y1; ++y) {
                for (long x = x0; x <= x1; ++x) {
                    const double d = segment_distance(static_cast<double>(x) + 0.5, static_cast<double>(y) + 0.5, a, b);
                    const double v = std::clamp(radius + 0.5 - d, 0.0, 1.0);
                    double& px = img.at(static_cast<std::size_t>(x), static_cast<std::size_t>(y));
                    px = std::max(px, v);
                }
            }
        }
    }
    return img;
}

Dataset synth_digits(const SynthConfig& cfg, std::uint64_t seed) {
    Rng rng(seed);
    Dataset ds;
    std::vector<int> order;
    for (std::size_t r = 0; r < cfg.samples_per_digit; ++r) {
        for (int d = 0; d < 10; ++d) order.push_back(d);
    }
    for (std::size_t w = 0; w < cfg.writers; ++w) {
        const WriterStyle writer = random_writer(cfg.ranges, rng);
        rng.shuffle(order.begin(), order.end());
        char gid[32];
        std::snprintf(gid, sizeof gid, "%s%04zu", cfg.group_prefix.c_str(), w);
        for (int d : order) {
            const GlyphStyle g = jitter(writer.digits[static_cast<std::size_t>(d)], cfg.jitter, rng);
            ds.images.push_back(render(d, g, cfg.canvas));
            ds.labels.push_back(d);
            ds.group_ids.emplace_back(gid);
        }
    }
    return ds;
}

}  // namespace statsim::glyphs
