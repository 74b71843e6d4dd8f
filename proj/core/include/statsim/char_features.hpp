#pragma once

#include <array>
#include <bitset>
#include <cstddef>
#include <vector>

namespace statsim {

/// Row-major grayscale raster; 1 is ink, 0 background.
struct GrayImage {
    std::size_t width = 0;
    std::size_t height = 0;
    std::vector<double> pixels;

    GrayImage() = default;
    GrayImage(std::size_t w, std::size_t h, double fill = 0.0)
        : width(w), height(h), pixels(w * h, fill) {}

    double& at(std::size_t x, std::size_t y) { return pixels[y * width + x]; }
    double at(std::size_t x, std::size_t y) const { return pixels[y * width + x]; }
    /// Zero outside the frame.
    double at_or_zero(long x, long y) const {
        if (x < 0 || y < 0 || x >= static_cast<long>(width) || y >= static_cast<long>(height)) return 0.0;
        return pixels[static_cast<std::size_t>(y) * width + static_cast<std::size_t>(x)];
    }
    /// Bilinear sample at pixel-center coordinates; zero outside the frame.
    double sample(double x, double y) const;

    friend bool operator==(const GrayImage&, const GrayImage&) = default;
};

inline constexpr std::size_t kNormSize = 40;
inline constexpr std::size_t kGridSize = 10;
inline constexpr std::size_t kMapCount = 10;
inline constexpr std::size_t kFeatureDim = kMapCount * kGridSize * kGridSize;
inline constexpr double kInkThreshold = 0.5;

/// Feature map slots, in output order.
enum class MapKind : std::size_t {
    Raw = 0,
    SlantCorrected,
    Deriv0,
    Deriv1,
    Deriv2,
    Deriv3,
    Deriv4,
    Interior,
    Endpoints,
    Junctions,
};

using MapSelection = std::bitset<kMapCount>;
inline const MapSelection kAllMaps = MapSelection{}.set();
/// Raw image only (100 values).
inline const MapSelection kRawOnly = MapSelection{0b0000000001};
/// Raw, slant-corrected and the five derivatives (700 values).
inline const MapSelection kRawSlantDerivs = MapSelection{0b0001111111};

using FeatureVector = std::vector<double>;

/// Tight bounding box of pixels above the ink threshold, scaled uniformly so its larger
/// side is 40 and centered in a 40x40 frame. Throws EmptyImageError on a blank image.
GrayImage crop_and_scale(const GrayImage& img);

/// Horizontal shear about the intensity centroid that removes the mixed second moment.
/// Images whose vertical second moment is below 1e-9 are returned unchanged.
GrayImage slant_correct(const GrayImage& img40);

/// |cos(k pi/5) dI/dx + sin(k pi/5) dI/dy| / 2 for k = 0..4, central differences.
std::array<GrayImage, 5> directional_derivatives(const GrayImage& img40);

struct SkeletonMaps {
    GrayImage interior;
    GrayImage endpoints;
    GrayImage junctions;
};

/// Zhang-Suen thinning of a binary {0,1} image.
GrayImage zhang_suen_thin(const GrayImage& binary);

/// Interior (8-neighborhood erosion), skeleton endpoints and junctions as {0,1} maps.
SkeletonMaps skeleton_maps(const GrayImage& img40);

/// Mean of each 4x4 block of a 40x40 map. Throws ShapeError for other sizes.
GrayImage downsample10(const GrayImage& map40);

/// Full pipeline; 100 values per selected map, in MapKind order.
FeatureVector extract(const GrayImage& img, const MapSelection& maps = kAllMaps);

/// Central moments of the intensity distribution, normalised by total mass.
struct Moments {
    double mass = 0.0;
    double cx = 0.0;
    double cy = 0.0;
    double mu11 = 0.0;
    double mu20 = 0.0;
    double mu02 = 0.0;
};
Moments image_moments(const GrayImage& img);

}  // namespace statsim
