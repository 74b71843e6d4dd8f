#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "statsim/similarity.hpp"

namespace statsim {

/// Ordered labeled exemplars used as nearest-neighbor references.
struct PrototypeSet {
    std::vector<Exemplar> prototypes;
    std::size_t cap = 0;
    /// Stream position each prototype was taken from (filled by select_prototypes).
    std::vector<std::size_t> source_indices;

    bool empty() const { return prototypes.empty(); }
    std::size_t size() const { return prototypes.size(); }
};

struct EvalReport {
    std::size_t n_tested = 0;
    std::size_t n_errors = 0;
    double error_rate = 0.0;
    /// Row/column label order of `confusion`.
    std::vector<Label> labels;
    /// confusion[true][predicted], indexed through `labels`.
    std::vector<std::vector<std::size_t>> confusion;
};

/// Label of the most similar prototype; lowest index wins ties. StateError when empty.
Label classify(std::span<const double> x, const PrototypeSet& protos, const SimilarityModel& sim);

/// Error-driven growth: each stream item is classified against the current set and
/// appended when misclassified (the first item always is). Stops at `cap`.
PrototypeSet select_prototypes(std::span<const Exemplar> stream, const SimilarityModel& sim,
                               std::size_t cap);

/// Replays the stream against insertion-time prefixes of `protos` and checks that every
/// recorded insertion (and only those) would be made again.
bool replay_is_sound(std::span<const Exemplar> stream, const PrototypeSet& protos,
                     const SimilarityModel& sim);

/// Classifies every test item against a frozen prototype set.
EvalReport evaluate(std::span<const Exemplar> test, const PrototypeSet& protos,
                    const SimilarityModel& sim);

/// Builds an EvalReport from parallel true/predicted label lists.
EvalReport make_report(std::span<const Label> truth, std::span<const Label> predicted);

/// Prototype set with every prototype pre-projected for repeated queries.
class PrototypeIndex {
public:
    explicit PrototypeIndex(const SimilarityModel& sim);
    PrototypeIndex(const SimilarityModel& sim, const PrototypeSet& protos);

    void add(const Exemplar& e);
    std::size_t size() const { return labels_.size(); }

    /// Index of the best-scoring prototype for a prepared query.
    std::size_t nearest(const PreparedVector& query) const;
    Label classify(std::span<const double> x) const;
    Label label(std::size_t i) const { return labels_[i]; }
    const PairScorer& scorer() const { return scorer_; }

private:
    PairScorer scorer_;
    std::vector<PreparedVector> prepared_;
    std::vector<Label> labels_;
    std::size_t dim_ = 0;
};

}  // namespace statsim
