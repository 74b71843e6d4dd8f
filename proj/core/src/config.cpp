#include "statsim/config.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>

#include "statsim/error.hpp"
#include "statsim/rng.hpp"

namespace statsim {

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

[[noreturn]] void bad_value(std::string_view key, std::string_view value) {
    throw ConfigError("invalid value '" + std::string(value) + "' for key '" + std::string(key) + "'");
}

std::size_t parse_size(std::string_view key, std::string_view v) {
    std::size_t out = 0;
    const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || p != v.data() + v.size()) bad_value(key, v);
    return out;
}

std::uint64_t parse_u64(std::string_view key, std::string_view v) {
    std::uint64_t out = 0;
    const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || p != v.data() + v.size()) bad_value(key, v);
    return out;
}

double parse_real(std::string_view key, std::string_view v) {
    double out = 0;
    const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || p != v.data() + v.size()) bad_value(key, v);
    return out;
}

bool parse_bool(std::string_view key, std::string_view v) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    bad_value(key, v);
}

std::string real_text(double v) {
    char buf[64];
    const auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, p);
}

std::string_view repr_name(clip::ReprKind k) {
    switch (k) {
        case clip::ReprKind::Locations: return "locations";
        case clip::ReprKind::Angles: return "angles";
        case clip::ReprKind::FeatureMap: return "featuremap";
    }
    return "?";
}

std::string_view source_name(DataSource s) {
    switch (s) {
        case DataSource::Synthetic: return "synthetic";
        case DataSource::Idx: return "idx";
        case DataSource::Pgm: return "pgm";
    }
    return "?";
}

struct KeyHandler {
    ConfigKey key;
    std::function<void(ExperimentConfig&, std::string_view)> set;
    std::function<std::string(const ExperimentConfig&)> get;
};

#define STATSIM_STR_KEY(name, field, help)                                                \
    KeyHandler{{name, help},                                                              \
               [](ExperimentConfig& c, std::string_view v) { c.field = std::string(v); }, \
               [](const ExperimentConfig& c) { return c.field; }}
#define STATSIM_SIZE_KEY(name, field, help)                                                     \
    KeyHandler{{name, help},                                                                    \
               [](ExperimentConfig& c, std::string_view v) { c.field = parse_size(name, v); }, \
               [](const ExperimentConfig& c) { return std::to_string(c.field); }}
#define STATSIM_REAL_KEY(name, field, help)                                                     \
    KeyHandler{{name, help},                                                                    \
               [](ExperimentConfig& c, std::string_view v) { c.field = parse_real(name, v); }, \
               [](const ExperimentConfig& c) { return real_text(c.field); }}

const std::vector<KeyHandler>& handlers() {
    static const std::vector<KeyHandler> table = {
        KeyHandler{{"experiment", "char | writer-adapt | clips"},
                   [](ExperimentConfig& c, std::string_view v) { c.experiment = parse_experiment(v); },
                   [](const ExperimentConfig& c) { return to_string(c.experiment); }},
        KeyHandler{{"seed", "master seed; every random stream is derived from it"},
                   [](ExperimentConfig& c, std::string_view v) { c.seed = parse_u64("seed", v); },
                   [](const ExperimentConfig& c) { return std::to_string(c.seed); }},
        KeyHandler{{"data.source", "synthetic | idx | pgm"},
                   [](ExperimentConfig& c, std::string_view v) {
                       if (v == "synthetic") c.source = DataSource::Synthetic;
                       else if (v == "idx") c.source = DataSource::Idx;
                       else if (v == "pgm") c.source = DataSource::Pgm;
                       else bad_value("data.source", v);
                   },
                   [](const ExperimentConfig& c) { return std::string(source_name(c.source)); }},
        STATSIM_STR_KEY("data.train_images", train_images, "IDX training images"),
        STATSIM_STR_KEY("data.train_labels", train_labels, "IDX training labels"),
        STATSIM_STR_KEY("data.test_images", test_images, "IDX test images"),
        STATSIM_STR_KEY("data.test_labels", test_labels, "IDX test labels"),
        STATSIM_STR_KEY("data.pgm_root", pgm_root, "grouped PGM tree root/<group>/<label>_<n>.pgm"),
        STATSIM_SIZE_KEY("synth.train_writers", synth_train_writers, "synthetic writers for training"),
        STATSIM_SIZE_KEY("synth.test_writers", synth_test_writers, "synthetic writers for testing"),
        STATSIM_SIZE_KEY("synth.samples_per_digit", synth_samples_per_digit,
                         "samples of each digit per synthetic writer"),
        STATSIM_STR_KEY("char.maps", maps, "feature maps: all | raw | raw-slant-derivs"),
        STATSIM_SIZE_KEY("char.test_count", test_count, "test items evaluated (0 = all)"),
        STATSIM_SIZE_KEY("char.prototype_cap", prototype_cap, "prototype set cap"),
        STATSIM_SIZE_KEY("writer.train_groups", train_groups,
                         "groups used for training (0 = two thirds)"),
        KeyHandler{{"clips.repr", "locations | angles | featuremap"},
                   [](ExperimentConfig& c, std::string_view v) {
                       if (v == "locations") c.repr = clip::ReprKind::Locations;
                       else if (v == "angles") c.repr = clip::ReprKind::Angles;
                       else if (v == "featuremap") c.repr = clip::ReprKind::FeatureMap;
                       else bad_value("clips.repr", v);
                   },
                   [](const ExperimentConfig& c) { return std::string(repr_name(c.repr)); }},
        KeyHandler{{"clips.condition", "uniform40 (slant, tilt ~ U[-40,40] deg) | discrete45 ({-45,45})"},
                   [](ExperimentConfig& c, std::string_view v) {
                       if (v == "uniform40") c.condition = clip::ViewCondition::Uniform40;
                       else if (v == "discrete45") c.condition = clip::ViewCondition::Discrete45;
                       else bad_value("clips.condition", v);
                   },
                   [](const ExperimentConfig& c) {
                       return std::string(c.condition == clip::ViewCondition::Uniform40 ? "uniform40"
                                                                                          : "discrete45");
                   }},
        STATSIM_REAL_KEY("clips.noise_sigma", noise_sigma, "std-dev of image-coordinate noise"),
        STATSIM_SIZE_KEY("clips.train_clips", train_clips, "fixed training pool size"),
        STATSIM_SIZE_KEY("clips.test_trials", test_trials, "lineup trials on unseen clips"),
        STATSIM_SIZE_KEY("net.hidden", hidden, "hidden units"),
        KeyHandler{{"net.symmetrize", "average both input orders at inference"},
                   [](ExperimentConfig& c, std::string_view v) { c.symmetrize = parse_bool("net.symmetrize", v); },
                   [](const ExperimentConfig& c) { return std::string(c.symmetrize ? "true" : "false"); }},
        STATSIM_SIZE_KEY("train.pairs", pairs, "training pairs per epoch"),
        STATSIM_REAL_KEY("train.positive_fraction", positive_fraction, "share of same-class pairs"),
        STATSIM_REAL_KEY("train.learning_rate", train.learning_rate, "SGD step size"),
        STATSIM_SIZE_KEY("train.epochs", train.epochs, "passes over the pair stream"),
        STATSIM_REAL_KEY("train.init_scale", train.init_scale, "uniform weight-init half-width"),
        STATSIM_STR_KEY("model.out", model_out, "archive written by train-sim"),
        STATSIM_STR_KEY("model.in", model_in, "archive read by classify"),
        STATSIM_STR_KEY("report.json", report_json, "machine-readable report path"),
    };
    return table;
}

#undef STATSIM_STR_KEY
#undef STATSIM_SIZE_KEY
#undef STATSIM_REAL_KEY

const KeyHandler& handler(std::string_view key) {
    for (const KeyHandler& h : handlers()) {
        if (h.key.name == key) return h;
    }
    throw ConfigError("unknown config key '" + std::string(key) + "'");
}

}  // namespace

std::string to_string(ExperimentKind kind) {
    switch (kind) {
        case ExperimentKind::Char: return "char";
        case ExperimentKind::WriterAdapt: return "writer-adapt";
        case ExperimentKind::Clips: return "clips";
    }
    return "?";
}

ExperimentKind parse_experiment(std::string_view s) {
    if (s == "char") return ExperimentKind::Char;
    if (s == "writer-adapt") return ExperimentKind::WriterAdapt;
    if (s == "clips") return ExperimentKind::Clips;
    throw ConfigError("unknown experiment '" + std::string(s) + "'");
}

const std::vector<ConfigKey>& config_keys() {
    static const std::vector<ConfigKey> keys = [] {
        std::vector<ConfigKey> k;
        for (const KeyHandler& h : handlers()) k.push_back(h.key);
        return k;
    }();
    return keys;
}

void ExperimentConfig::set(std::string_view key, std::string_view value) {
    handler(key).set(*this, trim(value));
}

std::string ExperimentConfig::get(std::string_view key) const { return handler(key).get(*this); }

std::string ExperimentConfig::to_text() const {
    std::string out;
    for (const KeyHandler& h : handlers()) {
        out += h.key.name;
        out += " = ";
        out += h.get(*this);
        out += '\n';
    }
    return out;
}

std::string ExperimentConfig::digest() const {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(to_text())));
    return buf;
}

MapSelection ExperimentConfig::map_selection() const {
    if (maps == "all") return kAllMaps;
    if (maps == "raw") return kRawOnly;
    if (maps == "raw-slant-derivs") return kRawSlantDerivs;
    throw ConfigError("unknown map selection '" + maps + "'");
}

std::vector<std::size_t> ExperimentConfig::architecture() const {
    const std::size_t per_item = experiment == ExperimentKind::Clips
                                     ? clip::repr_size(repr)
                                     : map_selection().count() * kGridSize * kGridSize;
    return {2 * per_item, hidden, 1};
}

void ExperimentConfig::validate() const {
    if (hidden == 0) throw ConfigError("net.hidden must be positive");
    if (!(positive_fraction > 0.0 && positive_fraction < 1.0)) {
        throw ConfigError("train.positive_fraction must lie in (0,1)");
    }
    if (!(train.learning_rate >= 0.0)) throw ConfigError("train.learning_rate must be nonnegative");
    if (!(train.init_scale >= 0.0)) throw ConfigError("train.init_scale must be nonnegative");
    if (!(noise_sigma >= 0.0)) throw ConfigError("clips.noise_sigma must be nonnegative");
    if (prototype_cap == 0) throw ConfigError("char.prototype_cap must be at least 1");
    map_selection();
    if (experiment == ExperimentKind::Clips) {
        if (train_clips < 2) throw ConfigError("clips.train_clips must be at least 2");
        if (test_trials == 0) throw ConfigError("clips.test_trials must be at least 1");
    } else if (source == DataSource::Idx) {
        if (train_images.empty() || train_labels.empty() || test_images.empty() || test_labels.empty()) {
            throw ConfigError("data.source = idx needs all four data.* IDX paths");
        }
    } else if (source == DataSource::Pgm && pgm_root.empty()) {
        throw ConfigError("data.source = pgm needs data.pgm_root");
    }
}

ExperimentConfig parse_config(std::string_view text, ExperimentConfig base) {
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        const std::string body = trim(line);
        if (body.empty()) continue;
        const auto eq = body.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
        }
        base.set(trim(std::string_view(body).substr(0, eq)), trim(std::string_view(body).substr(eq + 1)));
    }
    return base;
}

ExperimentConfig load_config(const std::filesystem::path& path, ExperimentConfig base) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), std::move(base));
}

ExperimentConfig default_config(ExperimentKind kind) {
    ExperimentConfig c;
    c.experiment = kind;
    switch (kind) {
        case ExperimentKind::Char:
            break;
        case ExperimentKind::WriterAdapt:
            c.synth_train_writers = 300;
            c.synth_test_writers = 200;
            c.synth_samples_per_digit = 5;
            break;
        case ExperimentKind::Clips:
            c.hidden = 100;
            c.pairs = 100000;
            c.train.epochs = 30;
            break;
    }
    return c;
}

}  // namespace statsim
