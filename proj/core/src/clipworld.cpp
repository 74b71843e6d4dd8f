#include "statsim/clipworld.hpp"

#include <algorithm>
#include <cmath>

#include "statsim/error.hpp"

namespace statsim::clip {

namespace {

constexpr int kMaxRedraws = 64;

std::size_t map_cell(double v) {
    const double c = std::floor((v + kMapHalfWidth) / kMapCellSide);
    return static_cast<std::size_t>(std::clamp(c, 0.0, static_cast<double>(kMapCells - 1)));
}

// Draws a view and its representation; projection collapse (Angles only) is redrawn.
ViewRepr draw_repr(const ClipModel& model, const ViewParams* fixed, const TrialSpec& spec, Rng& rng) {
    for (int attempt = 0;; ++attempt) {
        const ViewParams v = fixed ? *fixed : sample_view_params(spec.condition, rng);
        const View view = project(model, v, spec.noise, rng);
        try {
            return represent(view, spec.repr);
        } catch (const DegenerateViewError&) {
            if (attempt >= kMaxRedraws) throw;
        }
    }
}

}  // namespace

std::vector<double> ClipModel::flattened() const {
    std::vector<double> v;
    v.reserve(3 * kSegments);
    for (const Point3& p : points) v.insert(v.end(), p.begin(), p.end());
    return v;
}

ClipModel generate_clip(Rng& rng) {
    ClipModel m;
    Point3 cursor{0.0, 0.0, 0.0};
    for (std::size_t i = 0; i < kSegments; ++i) {
        Point3 d;
        double norm;
        do {
            d = {rng.normal(), rng.normal(), rng.normal()};
            norm = std::sqrt(d[0] * d[0] + d[1] * d[1] + d[2] * d[2]);
        } while (norm < 1e-12);
        for (int k = 0; k < 3; ++k) cursor[k] += d[k] / norm;
        m.points[i] = cursor;
    }
    return m;
}

ViewParams sample_view_params(ViewCondition condition, Rng& rng) {
    ViewParams v;
    if (condition == ViewCondition::Uniform40) {
        v.slant = rng.uniform(-deg(40.0), deg(40.0));
        v.tilt = rng.uniform(-deg(40.0), deg(40.0));
    } else {
        v.slant = rng.coin() ? deg(45.0) : -deg(45.0);
        v.tilt = rng.coin() ? deg(45.0) : -deg(45.0);
    }
    return v;
}

Point3 rotate(const Point3& p, const ViewParams& v) {
    const double cs = std::cos(v.slant), ss = std::sin(v.slant);
    const double ct = std::cos(v.tilt), st = std::sin(v.tilt);
    // R_x(slant)
    const double x1 = p[0];
    const double y1 = cs * p[1] - ss * p[2];
    const double z1 = ss * p[1] + cs * p[2];
    // R_y(tilt)
    return {ct * x1 + st * z1, y1, -st * x1 + ct * z1};
}

Point3 centroid(const ClipModel& model) {
    Point3 c{0.0, 0.0, 0.0};
    for (const Point3& p : model.points) {
        for (int k = 0; k < 3; ++k) c[k] += p[k];
    }
    for (double& v : c) v /= static_cast<double>(kSegments + 1);
    return c;
}

View project(const ClipModel& model, const ViewParams& v, const NoiseSpec& noise, Rng& rng) {
    if (!(noise.sigma >= 0.0)) throw ConfigError("noise sigma must be nonnegative");
    const Point3 c = centroid(model);
    const auto image = [&](const Point3& p) -> Point2 {
        const Point3 r = rotate({p[0] - c[0], p[1] - c[1], p[2] - c[2]}, v);
        return {r[0] + c[0], r[1] + c[1]};
    };
    View view;
    view.origin = image({0.0, 0.0, 0.0});
    for (std::size_t i = 0; i < kSegments; ++i) view.points[i] = image(model.points[i]);
    if (noise.sigma > 0.0) {
        view.origin[0] += noise.sigma * rng.normal();
        view.origin[1] += noise.sigma * rng.normal();
        for (Point2& p : view.points) {
            p[0] += noise.sigma * rng.normal();
            p[1] += noise.sigma * rng.normal();
        }
    }
    return view;
}

ViewRepr represent(const View& view, ReprKind kind) {
    ViewRepr r{kind, {}};
    switch (kind) {
        case ReprKind::Locations:
            for (const Point2& p : view.points) r.values.insert(r.values.end(), p.begin(), p.end());
            break;
        case ReprKind::Angles: {
            std::array<Point2, kSegments + 1> poly{};
            poly[0] = view.origin;
            std::copy(view.points.begin(), view.points.end(), poly.begin() + 1);
            std::array<Point2, kSegments> edges{};
            for (std::size_t i = 0; i < kSegments; ++i) {
                edges[i] = {poly[i + 1][0] - poly[i][0], poly[i + 1][1] - poly[i][1]};
                if (std::hypot(edges[i][0], edges[i][1]) < 1e-12) {
                    throw DegenerateViewError("projected edge " + std::to_string(i) + " has zero length");
                }
            }
            for (std::size_t i = 0; i + 1 < kSegments; ++i) {
                const Point2& a = edges[i];
                const Point2& b = edges[i + 1];
                double angle = std::atan2(a[0] * b[1] - a[1] * b[0], a[0] * b[0] + a[1] * b[1]);
                if (angle <= -3.14159265358979323846) angle = 3.14159265358979323846;
                r.values.push_back(angle);
            }
            break;
        }
        case ReprKind::FeatureMap: {
            r.values.assign(kMapCells * kMapCells, 0.0);
            r.values[map_cell(view.origin[1]) * kMapCells + map_cell(view.origin[0])] = 1.0;
            for (const Point2& p : view.points) r.values[map_cell(p[1]) * kMapCells + map_cell(p[0])] = 1.0;
            break;
        }
    }
    return r;
}

LineupTrial make_lineup_trial(const TrialSpec& spec, Rng& rng,
                              std::optional<std::span<const ClipModel>> model_pool) {
    if (model_pool && model_pool->size() < 2) {
        throw ConfigError("a lineup needs a model pool of at least two clips");
    }
    LineupTrial t;
    if (model_pool) {
        const std::size_t a = rng.below(model_pool->size());
        std::size_t b = rng.below(model_pool->size() - 1);
        if (b >= a) ++b;
        t.target_model = (*model_pool)[a];
        t.other_model = (*model_pool)[b];
    } else {
        t.target_model = generate_clip(rng);
        t.other_model = generate_clip(rng);
    }
    std::optional<ViewParams> shared;
    if (spec.shared_view) shared = sample_view_params(spec.condition, rng);
    const ViewParams* fixed = shared ? &*shared : nullptr;
    t.target = draw_repr(t.target_model, fixed, spec, rng);
    t.same = draw_repr(t.target_model, fixed, spec, rng);
    t.other = draw_repr(t.other_model, fixed, spec, rng);
    return t;
}

PairTrial make_pair_trial(const TrialSpec& spec, Rng& rng,
                          std::optional<std::span<const ClipModel>> model_pool) {
    if (model_pool && model_pool->size() < 2) {
        throw ConfigError("pair trials need a model pool of at least two clips");
    }
    PairTrial t;
    t.same = rng.coin();
    if (model_pool) {
        const std::size_t a = rng.below(model_pool->size());
        std::size_t b = a;
        if (!t.same) {
            b = rng.below(model_pool->size() - 1);
            if (b >= a) ++b;
        }
        t.target_model = (*model_pool)[a];
        t.candidate_model = (*model_pool)[b];
    } else {
        t.target_model = generate_clip(rng);
        t.candidate_model = t.same ? t.target_model : generate_clip(rng);
    }
    std::optional<ViewParams> shared;
    if (spec.shared_view) shared = sample_view_params(spec.condition, rng);
    const ViewParams* fixed = shared ? &*shared : nullptr;
    t.target = draw_repr(t.target_model, fixed, spec, rng);
    t.candidate = draw_repr(t.candidate_model, fixed, spec, rng);
    return t;
}

EvalReport forced_choice_eval(std::span<const LineupTrial> trials, const ReprScore& score) {
    std::vector<Label> truth(trials.size(), 0);
    std::vector<Label> picked(trials.size(), 0);
    for (std::size_t i = 0; i < trials.size(); ++i) {
        const LineupTrial& t = trials[i];
        // ties count against the observer
        if (score(t.target, t.other) >= score(t.target, t.same)) picked[i] = 1;
    }
    EvalReport r = make_report(truth, picked);
    if (r.labels.size() == 1) {
        r.labels = {0, 1};
        r.confusion = {{r.confusion[0][0], 0}, {0, 0}};
    }
    return r;
}

EvalReport forced_choice_eval(const SimilarityModel& sim, const TrialSpec& spec,
                              std::size_t n_trials, Rng& rng) {
    if (n_trials == 0) throw ConfigError("forced choice needs at least one trial");
    std::vector<LineupTrial> trials;
    trials.reserve(n_trials);
    for (std::size_t i = 0; i < n_trials; ++i) trials.push_back(make_lineup_trial(spec, rng));
    const PairScorer scorer(sim);
    return forced_choice_eval(trials, [&](const ViewRepr& a, const ViewRepr& b) {
        return scorer.score(scorer.prepare(a.values), scorer.prepare(b.values));
    });
}

ClipPairStream::ClipPairStream(std::span<const ClipModel> pool, TrialSpec spec,
                               std::size_t pairs_per_epoch, double positive_fraction,
                               std::uint64_t seed)
    : pool_(pool), spec_(spec), pairs_(pairs_per_epoch), positive_fraction_(positive_fraction),
      seed_(seed) {
    if (pool_.size() < 2) throw ConfigError("training pool needs at least two clips");
    if (!(positive_fraction_ > 0.0 && positive_fraction_ < 1.0)) {
        throw ConfigError("positive fraction must lie in (0,1)");
    }
}

void ClipPairStream::fill(std::size_t epoch, std::size_t index, PairSample& out) const {
    Rng rng(splitmix64(seed_ ^ splitmix64((static_cast<std::uint64_t>(epoch) << 40) ^ index)));
    const auto quota = [&](std::size_t i) {
        return static_cast<std::size_t>(std::floor(static_cast<double>(i) * positive_fraction_));
    };
    const bool positive = quota(index + 1) > quota(index);
    const std::size_t a = rng.below(pool_.size());
    std::size_t b = a;
    if (!positive) {
        b = rng.below(pool_.size() - 1);
        if (b >= a) ++b;
    }
    std::optional<ViewParams> shared;
    if (spec_.shared_view) shared = sample_view_params(spec_.condition, rng);
    const ViewParams* fixed = shared ? &*shared : nullptr;
    const ViewRepr first = draw_repr(pool_[a], fixed, spec_, rng);
    const ViewRepr second = draw_repr(pool_[b], fixed, spec_, rng);
    out.input.clear();
    out.input.insert(out.input.end(), first.values.begin(), first.values.end());
    out.input.insert(out.input.end(), second.values.begin(), second.values.end());
    out.target = positive ? 1.0 : 0.0;
}

}  // namespace statsim::clip
