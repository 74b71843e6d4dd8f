#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "statsim/char_features.hpp"
#include "statsim/clipworld.hpp"
#include "statsim/mlp.hpp"

namespace statsim {

enum class ExperimentKind { Char, WriterAdapt, Clips };
enum class DataSource { Synthetic, Idx, Pgm };

/// Every knob of the three experiment programs. Keys are listed by config_keys().
struct ExperimentConfig {
    ExperimentKind experiment = ExperimentKind::Char;
    std::uint64_t seed = 1;

    // character data
    DataSource source = DataSource::Synthetic;
    std::string train_images, train_labels, test_images, test_labels;
    std::string pgm_root;
    std::size_t synth_train_writers = 700;
    std::size_t synth_test_writers = 300;
    std::size_t synth_samples_per_digit = 1;
    std::string maps = "all";
    std::size_t test_count = 3000;
    std::size_t prototype_cap = 200;
    std::size_t train_groups = 0;  // writer-adapt: 0 means two thirds of the groups

    // clips
    clip::ReprKind repr = clip::ReprKind::Locations;
    clip::ViewCondition condition = clip::ViewCondition::Uniform40;
    double noise_sigma = 0.0;
    std::size_t train_clips = 200;
    std::size_t test_trials = 10000;

    // similarity network and training
    std::size_t hidden = 50;
    std::size_t pairs = 100000;
    double positive_fraction = 0.3;
    bool symmetrize = true;
    TrainConfig train{0.1, 10, 0, 0.1};

    // model files (train-sim / classify)
    std::string model_out;
    std::string model_in;
    std::string report_json;

    /// Network layer sizes implied by the experiment and representation.
    std::vector<std::size_t> architecture() const;
    MapSelection map_selection() const;
    /// Throws ConfigError on inconsistent settings.
    void validate() const;

    /// Sets one key from its textual value; throws ConfigError for unknown keys or bad values.
    void set(std::string_view key, std::string_view value);
    std::string get(std::string_view key) const;

    /// "key = value" lines in registry order; stable across runs.
    std::string to_text() const;
    /// FNV-1a of to_text(), hex.
    std::string digest() const;
};

struct ConfigKey {
    std::string_view name;
    std::string_view help;
};

/// All recognised keys with one-line help.
const std::vector<ConfigKey>& config_keys();

/// Flat "key = value" text; '#' starts a comment.
ExperimentConfig parse_config(std::string_view text, ExperimentConfig base = {});
ExperimentConfig load_config(const std::filesystem::path& path, ExperimentConfig base = {});

/// Defaults tuned for each experiment program.
ExperimentConfig default_config(ExperimentKind kind);

std::string to_string(ExperimentKind kind);
ExperimentKind parse_experiment(std::string_view s);

}  // namespace statsim
