#include "statsim/proto_knn.hpp"

#include <algorithm>
#include <limits>

#include "statsim/error.hpp"

namespace statsim {

PrototypeIndex::PrototypeIndex(const SimilarityModel& sim) : scorer_(sim) {}

PrototypeIndex::PrototypeIndex(const SimilarityModel& sim, const PrototypeSet& protos)
    : scorer_(sim) {
    for (const Exemplar& e : protos.prototypes) add(e);
}

void PrototypeIndex::add(const Exemplar& e) {
    if (labels_.empty()) {
        dim_ = e.point.size();
    } else if (e.point.size() != dim_) {
        throw ShapeError("prototype dimension differs from the set");
    }
    prepared_.push_back(scorer_.prepare(e.point));
    labels_.push_back(e.label);
}

std::size_t PrototypeIndex::nearest(const PreparedVector& query) const {
    if (labels_.empty()) throw StateError("empty prototype set");
    std::size_t best = 0;
    double best_score = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < prepared_.size(); ++i) {
        const double s = scorer_.score(query, prepared_[i]);
        if (s > best_score) {
            best_score = s;
            best = i;
        }
    }
    return best;
}

Label PrototypeIndex::classify(std::span<const double> x) const {
    if (labels_.empty()) throw StateError("empty prototype set");
    if (x.size() != dim_) throw ShapeError("query dimension differs from the prototypes");
    return labels_[nearest(scorer_.prepare(x))];
}

Label classify(std::span<const double> x, const PrototypeSet& protos, const SimilarityModel& sim) {
    if (protos.empty()) throw StateError("empty prototype set");
    return PrototypeIndex(sim, protos).classify(x);
}

PrototypeSet select_prototypes(std::span<const Exemplar> stream, const SimilarityModel& sim,
                               std::size_t cap) {
    if (cap == 0) throw ConfigError("prototype cap must be at least 1");
    PrototypeSet set;
    set.cap = cap;
    PrototypeIndex index(sim);
    for (std::size_t i = 0; i < stream.size() && set.size() < cap; ++i) {
        const Exemplar& item = stream[i];
        if (index.size() == 0 || index.classify(item.point) != item.label) {
            index.add(item);
            set.prototypes.push_back(item);
            set.source_indices.push_back(i);
        }
    }
    return set;
}

bool replay_is_sound(std::span<const Exemplar> stream, const PrototypeSet& protos,
                     const SimilarityModel& sim) {
    if (protos.source_indices.size() != protos.size() || protos.size() > protos.cap) return false;
    PrototypeIndex index(sim);
    std::size_t next = 0;
    for (std::size_t i = 0; i < stream.size() && index.size() < protos.cap; ++i) {
        const bool insert = index.size() == 0 || index.classify(stream[i].point) != stream[i].label;
        const bool recorded = next < protos.size() && protos.source_indices[next] == i;
        if (insert != recorded) return false;
        if (insert) {
            if (!std::ranges::equal(protos.prototypes[next].point, stream[i].point) ||
                protos.prototypes[next].label != stream[i].label) {
                return false;
            }
            index.add(stream[i]);
            ++next;
        }
    }
    return next == protos.size();
}

EvalReport make_report(std::span<const Label> truth, std::span<const Label> predicted) {
    if (truth.size() != predicted.size()) throw ShapeError("label lists differ in length");
    EvalReport r;
    r.labels.assign(truth.begin(), truth.end());
    r.labels.insert(r.labels.end(), predicted.begin(), predicted.end());
    std::ranges::sort(r.labels);
    r.labels.erase(std::unique(r.labels.begin(), r.labels.end()), r.labels.end());
    r.confusion.assign(r.labels.size(), std::vector<std::size_t>(r.labels.size(), 0));
    auto pos = [&](Label l) {
        return static_cast<std::size_t>(std::ranges::lower_bound(r.labels, l) - r.labels.begin());
    };
    for (std::size_t i = 0; i < truth.size(); ++i) {
        ++r.confusion[pos(truth[i])][pos(predicted[i])];
        if (truth[i] != predicted[i]) ++r.n_errors;
    }
    r.n_tested = truth.size();
    r.error_rate = r.n_tested ? static_cast<double>(r.n_errors) / static_cast<double>(r.n_tested) : 0.0;
    return r;
}

EvalReport evaluate(std::span<const Exemplar> test, const PrototypeSet& protos,
                    const SimilarityModel& sim) {
    if (protos.empty()) throw StateError("empty prototype set");
    const PrototypeIndex index(sim, protos);
    std::vector<Label> truth, predicted;
    truth.reserve(test.size());
    predicted.reserve(test.size());
    for (const Exemplar& item : test) {
        truth.push_back(item.label);
        predicted.push_back(index.classify(item.point));
    }
    return make_report(truth, predicted);
}

}  // namespace statsim
