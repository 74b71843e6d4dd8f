#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "statsim/archive.hpp"
#include "statsim/dataset.hpp"
#include "statsim/error.hpp"
#include "statsim/experiments.hpp"
#include "statsim/glyphs.hpp"

namespace {

using namespace statsim;

struct CommonArgs {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::vector<std::string> overrides;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--config", args.config_path, "flat key = value configuration file")->check(CLI::ExistingFile);
    cmd->add_option("--seed", args.seed, "master seed (overrides the config file)");
    cmd->add_option("--set", args.overrides, "key=value override, repeatable")->allow_extra_args(false);
}

ExperimentConfig resolve(ExperimentKind kind, const CommonArgs& args) {
    ExperimentConfig cfg = default_config(kind);
    if (!args.config_path.empty()) cfg = load_config(args.config_path, cfg);
    if (args.seed) cfg.seed = *args.seed;
    for (const std::string& kv : args.overrides) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + kv + "'");
        cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
    }
    cfg.experiment = kind;
    cfg.validate();
    return cfg;
}

void emit(const ExperimentConfig& cfg, const ExperimentReport& report) {
    std::cout << report.to_text();
    if (!cfg.report_json.empty()) {
        std::ofstream out(cfg.report_json, std::ios::binary);
        if (!out) throw Error("cannot write " + cfg.report_json);
        out << report.to_json() << '\n';
    }
}

void maybe_save(const ExperimentConfig& cfg, const Mlp& net) {
    if (cfg.model_out.empty()) return;
    save_model(net, cfg.model_out, {cfg.seed, cfg.digest(), cfg.symmetrize});
    std::cerr << "model written to " << cfg.model_out << '\n';
}

std::string key_listing() {
    std::string s = "\nConfiguration keys (use --set key=value or a config file):\n";
    for (const ConfigKey& k : config_keys()) {
        std::string name(k.name);
        name.resize(std::max<std::size_t>(name.size(), 26), ' ');
        s += "  " + name + " " + std::string(k.help) + "\n";
    }
    return s;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Learned statistical similarity for nearest-prototype classification"};
    app.require_subcommand(1);
    app.footer(key_listing());

    CommonArgs char_args, writer_args, clip_args, train_args, classify_args;
    auto* char_cmd = app.add_subcommand("char", "character recognition: learned similarity vs Euclidean");
    auto* writer_cmd = app.add_subcommand("writer-adapt", "per-writer adaptation from one sample per label");
    auto* clip_cmd = app.add_subcommand("clips", "paperclip single-view generalization lineups");
    auto* train_cmd = app.add_subcommand("train-sim", "train the character similarity network and save it");
    auto* classify_cmd = app.add_subcommand("classify", "evaluate a saved similarity network on character data");
    add_common(char_cmd, char_args);
    add_common(writer_cmd, writer_args);
    add_common(clip_cmd, clip_args);
    add_common(train_cmd, train_args);
    add_common(classify_cmd, classify_args);

    auto* synth_cmd = app.add_subcommand("synth-digits", "write synthetic digit fixtures as IDX or a PGM tree");
    std::size_t writers = 100, samples = 1;
    std::uint64_t synth_seed = 1;
    std::string format = "idx", out_dir = ".", prefix = "synth";
    synth_cmd->add_option("--writers", writers, "number of writers")->check(CLI::PositiveNumber);
    synth_cmd->add_option("--samples", samples, "samples per digit per writer")->check(CLI::PositiveNumber);
    synth_cmd->add_option("--seed", synth_seed, "generator seed");
    synth_cmd->add_option("--format", format, "idx or pgm")->check(CLI::IsMember({"idx", "pgm"}));
    synth_cmd->add_option("--out", out_dir, "output directory");
    synth_cmd->add_option("--prefix", prefix, "IDX file name prefix");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*char_cmd) {
            const auto cfg = resolve(ExperimentKind::Char, char_args);
            const CharRun run = run_char_experiment(cfg);
            emit(cfg, run.report);
            maybe_save(cfg, run.net);
        } else if (*writer_cmd) {
            const auto cfg = resolve(ExperimentKind::WriterAdapt, writer_args);
            const WriterRun run = run_writer_adaptation(cfg);
            emit(cfg, run.report);
            maybe_save(cfg, run.net);
        } else if (*clip_cmd) {
            const auto cfg = resolve(ExperimentKind::Clips, clip_args);
            const ClipRun run = run_clip_experiment(cfg);
            emit(cfg, run.report);
            maybe_save(cfg, run.net);
        } else if (*train_cmd) {
            const auto cfg = resolve(ExperimentKind::Char, train_args);
            if (cfg.model_out.empty()) throw ConfigError("train-sim needs model.out");
            const CharData data = load_char_data(cfg);
            std::vector<double> losses;
            const Mlp net = train_pair_similarity(cfg, data.train, false, &losses);
            for (std::size_t e = 0; e < losses.size(); ++e) {
                std::cout << "epoch " << e + 1 << " mean loss " << format_real(losses[e]) << '\n';
            }
            maybe_save(cfg, net);
        } else if (*classify_cmd) {
            const auto cfg = resolve(ExperimentKind::Char, classify_args);
            if (cfg.model_in.empty()) throw ConfigError("classify needs model.in");
            const LoadedModel model = load_model(cfg.model_in);
            ExperimentConfig eval_cfg = cfg;
            eval_cfg.symmetrize = model.meta.symmetrize;
            emit(eval_cfg, classify_with_model(eval_cfg, model.net));
        } else if (*synth_cmd) {
            glyphs::SynthConfig sc;
            sc.writers = writers;
            sc.samples_per_digit = samples;
            const Dataset ds = glyphs::synth_digits(sc, synth_seed);
            const std::filesystem::path dir(out_dir);
            std::filesystem::create_directories(dir);
            if (format == "idx") {
                write_idx(ds, dir / (prefix + "-images-idx3-ubyte"), dir / (prefix + "-labels-idx1-ubyte"));
            } else {
                write_pgm_groups(ds, dir);
            }
            std::cout << "wrote " << ds.size() << " images to " << dir.string() << '\n';
        }
    } catch (const statsim::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
