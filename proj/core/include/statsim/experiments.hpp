#pragma once

#include <string>
#include <vector>

#include "statsim/clipworld.hpp"
#include "statsim/config.hpp"
#include "statsim/dataset.hpp"
#include "statsim/mlp.hpp"
#include "statsim/proto_knn.hpp"
#include "statsim/report.hpp"

namespace statsim {

/// Arm names used in every report.
inline const std::string kSimilarityArm = "similarity";
inline const std::string kEuclideanArm = "euclidean";

/// Feature tables for the training and test splits plus a line describing the source.
struct CharData {
    FeatureTable train;
    FeatureTable test;
    std::string source_note;
};

/// Loads (or synthesises) the configured character data and extracts features.
/// For the char experiment the training table is shuffled with the "shuffle" sub-seed
/// and the test table is a shuffled prefix of char.test_count items.
CharData load_char_data(const ExperimentConfig& cfg);

/// Trains the pair network on pairs drawn from `table`; per-epoch mean losses are
/// appended to `epoch_losses` when given.
Mlp train_pair_similarity(const ExperimentConfig& cfg, const FeatureTable& table, bool within_group,
                          std::vector<double>* epoch_losses = nullptr);

/// Trains the clip pair network on the fixed pool.
Mlp train_clip_similarity(const ExperimentConfig& cfg, std::span<const clip::ClipModel> pool,
                          std::vector<double>* epoch_losses = nullptr);

/// The configured number of training clips, drawn from the "clip-pool" sub-seed.
std::vector<clip::ClipModel> draw_training_pool(const ExperimentConfig& cfg);

struct CharRun {
    ExperimentReport report;
    Mlp net;
    PrototypeSet euclidean_protos;
    PrototypeSet similarity_protos;
    /// Both prototype sets pass the replay check against the training stream.
    bool replay_sound = false;
};

struct WriterRun {
    ExperimentReport report;
    Mlp net;
    std::size_t groups_tested = 0;
    std::size_t groups_skipped = 0;
};

struct ClipRun {
    ExperimentReport report;
    Mlp net;
};

/// Prototype NN with learned similarity vs Euclidean distance on held-out characters.
CharRun run_char_experiment(const ExperimentConfig& cfg);

/// Within-writer similarity; per test writer the first sample of each label is a prototype.
WriterRun run_writer_adaptation(const ExperimentConfig& cfg, const WarningSink& warn = {});

/// Forced-choice lineups on unseen clips, learned similarity vs Euclidean distance.
ClipRun run_clip_experiment(const ExperimentConfig& cfg);

/// Prototype selection + evaluation of a given (e.g. loaded) network on the char data.
ExperimentReport classify_with_model(const ExperimentConfig& cfg, const Mlp& net);

}  // namespace statsim
