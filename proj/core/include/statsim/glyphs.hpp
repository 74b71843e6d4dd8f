#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "statsim/dataset.hpp"

namespace statsim::glyphs {

/// Point in glyph space: the unit box, x to the right, y down.
struct Point {
    double x = 0.0;
    double y = 0.0;
};
using Stroke = std::vector<Point>;

/// One way of writing a digit; a digit has one or more allographs.
struct Allograph {
    std::vector<Stroke> strokes;
};

/// Stroke templates for digits 0..9.
const std::vector<std::vector<Allograph>>& digit_templates();

/// Global geometric and stroke-shape variability.
struct StyleRanges {
    double rotation_deg = 15.0;
    double shear = 0.5;
    double x_scale_lo = 0.75, x_scale_hi = 1.15;
    double y_scale_lo = 0.9, y_scale_hi = 1.1;
    double thickness_lo = 0.9, thickness_hi = 2.2;  // stroke radius in canvas pixels
    double warp = 0.1;                              // smooth displacement amplitude (glyph units)
    double wobble = 0.04;                           // control-point offset std-dev
};

/// Per-sample jitter on top of a writer's style.
struct SampleJitter {
    double rotation_deg = 4.0;
    double shear = 0.08;
    double scale = 0.05;
    double thickness = 0.25;
    double warp = 0.025;
    double wobble = 0.02;
};

/// Affine placement and low-frequency warp applied to a template.
struct Warp {
    double ax = 0.0, fx1 = 0.0, fy1 = 0.0, px = 0.0;
    double ay = 0.0, fx2 = 0.0, fy2 = 0.0, py = 0.0;
};

struct GlyphStyle {
    std::size_t allograph = 0;
    double rotation = 0.0;  // radians
    double shear = 0.0;
    double x_scale = 1.0;
    double y_scale = 1.0;
    double thickness = 1.5;
    Warp warp;
    // Independent Gaussian offsets of every template control point, in glyph units:
    // one layer fixed per writer, one redrawn per sample.
    double writer_wobble = 0.0;
    std::uint64_t writer_wobble_seed = 0;
    double sample_wobble = 0.0;
    std::uint64_t sample_wobble_seed = 0;
};

/// A writer: one fixed style per digit.
struct WriterStyle {
    std::vector<GlyphStyle> digits;
};

WriterStyle random_writer(const StyleRanges& ranges, Rng& rng);

/// Writer style perturbed by per-sample jitter.
GlyphStyle jitter(const GlyphStyle& base, const SampleJitter& j, Rng& rng);

/// Anti-aliased rendering into a canvas x canvas image; the glyph box spans 20/28 of it.
GrayImage render(int digit, const GlyphStyle& style, std::size_t canvas = 28);

struct SynthConfig {
    std::size_t writers = 100;
    std::size_t samples_per_digit = 1;  // per writer
    std::size_t canvas = 28;
    std::string group_prefix = "w";
    StyleRanges ranges{};
    SampleJitter jitter{};
};

/// Writers in order, each writing samples_per_digit copies of every digit in a shuffled
/// order. Group ids are group_prefix followed by a 4-digit writer index.
Dataset synth_digits(const SynthConfig& cfg, std::uint64_t seed);

}  // namespace statsim::glyphs
