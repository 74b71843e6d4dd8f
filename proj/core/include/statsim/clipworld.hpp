#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "statsim/mlp.hpp"
#include "statsim/proto_knn.hpp"
#include "statsim/rng.hpp"
#include "statsim/similarity.hpp"

namespace statsim::clip {

inline constexpr std::size_t kSegments = 5;
using Point3 = std::array<double, 3>;
using Point2 = std::array<double, 2>;

/// Chain of five unit segments starting at the (implicit) origin.
struct ClipModel {
    std::array<Point3, kSegments> points{};

    std::vector<double> flattened() const;
    friend bool operator==(const ClipModel&, const ClipModel&) = default;
};

/// Rotations about the two axes perpendicular to the optical axis, in radians.
struct ViewParams {
    double slant = 0.0;
    double tilt = 0.0;
};

/// Projected vertices in model vertex order; `origin` is the image of the chain's
/// starting vertex.
struct View {
    Point2 origin{};
    std::array<Point2, kSegments> points{};
};

enum class ReprKind { Locations, Angles, FeatureMap };

inline constexpr std::size_t kMapCells = 40;
inline constexpr double kMapHalfWidth = 5.0;
inline constexpr double kMapCellSide = 2.0 * kMapHalfWidth / static_cast<double>(kMapCells);

/// Input length of one view for each representation.
constexpr std::size_t repr_size(ReprKind kind) {
    switch (kind) {
        case ReprKind::Locations: return 2 * kSegments;
        case ReprKind::Angles: return kSegments - 1;
        case ReprKind::FeatureMap: return kMapCells * kMapCells;
    }
    return 0;
}

struct ViewRepr {
    ReprKind kind = ReprKind::Locations;
    std::vector<double> values;
};

struct NoiseSpec {
    double sigma = 0.0;
};

enum class TrialKind { PairVerification, Lineup };
enum class ViewCondition { Uniform40, Discrete45 };

struct TrialSpec {
    TrialKind kind = TrialKind::Lineup;
    ViewCondition condition = ViewCondition::Uniform40;
    ReprKind repr = ReprKind::Locations;
    NoiseSpec noise{};
    /// Use one view-parameter draw for every view of a trial.
    bool shared_view = false;
};

/// Target, a view of the same model, and a view of a different model. The generating
/// models are kept for auditing.
struct LineupTrial {
    ViewRepr target;
    ViewRepr same;
    ViewRepr other;
    ClipModel target_model;
    ClipModel other_model;
};

struct PairTrial {
    ViewRepr target;
    ViewRepr candidate;
    bool same = false;
    ClipModel target_model;
    ClipModel candidate_model;
};

/// Five directions uniform on the sphere (normalised Gaussian triples), summed.
ClipModel generate_clip(Rng& rng);

ViewParams sample_view_params(ViewCondition condition, Rng& rng);

/// Rotation R_y(tilt) * R_x(slant), applied to a 3D point.
Point3 rotate(const Point3& p, const ViewParams& v);

/// Mean of the six chain vertices (origin included); views rotate about this point.
Point3 centroid(const ClipModel& model);

/// Rotate about the centroid, drop z, then add N(0, sigma^2) to every image coordinate
/// (origin vertex included) when sigma > 0.
View project(const ClipModel& model, const ViewParams& v, const NoiseSpec& noise, Rng& rng);

/// Throws DegenerateViewError for a zero-length projected edge (Angles only).
ViewRepr represent(const View& view, ReprKind kind);

/// Throws ConfigError when a pool is given with fewer than two models.
LineupTrial make_lineup_trial(const TrialSpec& spec, Rng& rng,
                              std::optional<std::span<const ClipModel>> model_pool = std::nullopt);

/// Target plus one candidate that is a same-model view with probability 1/2.
PairTrial make_pair_trial(const TrialSpec& spec, Rng& rng,
                          std::optional<std::span<const ClipModel>> model_pool = std::nullopt);

/// Larger means "more likely the same model".
using ReprScore = std::function<double(const ViewRepr&, const ViewRepr&)>;

/// Error when the other view scores at least as high as the same-model view.
/// labels = {0: same-model view chosen, 1: other view chosen}.
EvalReport forced_choice_eval(std::span<const LineupTrial> trials, const ReprScore& score);

/// Draws n_trials lineups on fresh models and scores them with `sim`.
EvalReport forced_choice_eval(const SimilarityModel& sim, const TrialSpec& spec,
                              std::size_t n_trials, Rng& rng);

/// Training pairs drawn from a fixed model pool. Sample i of epoch e is a pure function
/// of (seed, e, i); positives are interleaved to meet the requested fraction exactly.
class ClipPairStream final : public SampleStream {
public:
    ClipPairStream(std::span<const ClipModel> pool, TrialSpec spec, std::size_t pairs_per_epoch,
                   double positive_fraction, std::uint64_t seed);

    std::size_t size() const override { return pairs_; }
    void fill(std::size_t epoch, std::size_t index, PairSample& out) const override;

private:
    std::span<const ClipModel> pool_;
    TrialSpec spec_;
    std::size_t pairs_;
    double positive_fraction_;
    std::uint64_t seed_;
};

/// Degrees to radians.
constexpr double deg(double d) { return d * 3.14159265358979323846 / 180.0; }

}  // namespace statsim::clip
