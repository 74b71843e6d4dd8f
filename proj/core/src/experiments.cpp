#include "statsim/experiments.hpp"

#include <algorithm>
#include <cstdio>
#include <iostream>
#include <map>
#include <set>

#include "statsim/error.hpp"
#include "statsim/glyphs.hpp"
#include "statsim/rng.hpp"

namespace statsim {

namespace {

std::string pct(double rate) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f%%", 100.0 * rate);
    return buf;
}

std::string ratio_text(double num, double den) {
    if (den == 0.0) return num == 0.0 ? "n/a (both zero)" : "inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", num / den);
    return buf;
}

std::string arch_text(const std::vector<std::size_t>& sizes) {
    std::string s = "(";
    for (std::size_t i = 0; i < sizes.size(); ++i) s += (i ? ":" : "") + std::to_string(sizes[i]);
    return s + ")";
}

std::string losses_text(const std::vector<double>& losses) {
    if (losses.empty()) return "-";
    return format_real(losses.front()) + " -> " + format_real(losses.back());
}

std::vector<Exemplar> as_exemplars(const FeatureTable& t) {
    std::vector<Exemplar> out;
    out.reserve(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) out.push_back({t.vectors[i], t.labels[i]});
    return out;
}

FeatureTable subset(const FeatureTable& t, std::span<const std::size_t> idx) {
    FeatureTable out;
    for (std::size_t i : idx) {
        out.vectors.push_back(t.vectors[i]);
        out.labels.push_back(t.labels[i]);
        if (!t.group_ids.empty()) out.group_ids.push_back(t.group_ids[i]);
    }
    return out;
}

FeatureTable shuffled(const FeatureTable& t, std::uint64_t seed, std::size_t keep) {
    std::vector<std::size_t> idx(t.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    Rng rng(seed);
    rng.shuffle(idx.begin(), idx.end());
    if (keep != 0 && keep < idx.size()) idx.resize(keep);
    return subset(t, idx);
}

// Splits a grouped table into training and held-out groups, in order of first appearance.
std::pair<FeatureTable, FeatureTable> split_groups(const FeatureTable& t, std::size_t train_groups) {
    std::vector<std::string> order;
    std::set<std::string> seen;
    for (const std::string& g : t.group_ids) {
        if (seen.insert(g).second) order.push_back(g);
    }
    const std::size_t n_train = train_groups ? std::min(train_groups, order.size()) : (2 * order.size()) / 3;
    const std::set<std::string> train_set(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_train));
    std::vector<std::size_t> tr, te;
    for (std::size_t i = 0; i < t.size(); ++i) (train_set.count(t.group_ids[i]) ? tr : te).push_back(i);
    return {subset(t, tr), subset(t, te)};
}

Dataset synth(const ExperimentConfig& cfg, std::size_t writers, const char* tag, const char* prefix) {
    glyphs::SynthConfig sc;
    sc.writers = writers;
    sc.samples_per_digit = cfg.synth_samples_per_digit;
    sc.group_prefix = prefix;
    return glyphs::synth_digits(sc, derive_seed(cfg.seed, tag));
}

std::vector<std::pair<std::string, std::string>> common_header(const ExperimentConfig& cfg) {
    return {{"experiment", to_string(cfg.experiment)},
            {"seed", std::to_string(cfg.seed)},
            {"config digest", cfg.digest()},
            {"network", arch_text(cfg.architecture())},
            {"training", std::to_string(cfg.train.epochs) + " epochs x " + std::to_string(cfg.pairs) +
                             " pairs, lr " + format_real(cfg.train.learning_rate) + ", positive fraction " +
                             format_real(cfg.positive_fraction)}};
}

void add_comparison(ExperimentReport& r) {
    const double s = r.arm(kSimilarityArm).eval.error_rate;
    const double e = r.arm(kEuclideanArm).eval.error_rate;
    r.summary.emplace_back("similarity error", pct(s));
    r.summary.emplace_back("euclidean error", pct(e));
    r.summary.emplace_back("error ratio (similarity / euclidean)", ratio_text(s, e));
}

}  // namespace

CharData load_char_data(const ExperimentConfig& cfg) {
    cfg.validate();
    const MapSelection maps = cfg.map_selection();
    CharData data;
    if (cfg.experiment == ExperimentKind::WriterAdapt) {
        if (cfg.source == DataSource::Idx) throw ConfigError("writer adaptation needs grouped data (pgm or synthetic)");
        if (cfg.source == DataSource::Pgm) {
            const FeatureTable all = extract_all(load_pgm_groups(cfg.pgm_root), maps);
            std::tie(data.train, data.test) = split_groups(all, cfg.train_groups);
            data.source_note = "grouped PGM tree " + cfg.pgm_root;
        } else {
            data.train = extract_all(synth(cfg, cfg.synth_train_writers, "synth-train", "w"), maps);
            data.test = extract_all(synth(cfg, cfg.synth_test_writers, "synth-test", "t"), maps);
            data.source_note = "synthetic writers (per-writer affine style of template glyphs)";
        }
        return data;
    }

    FeatureTable train, test;
    switch (cfg.source) {
        case DataSource::Idx:
            train = extract_all(load_idx(cfg.train_images, cfg.train_labels), maps);
            test = extract_all(load_idx(cfg.test_images, cfg.test_labels), maps);
            data.source_note = "IDX files " + cfg.train_images + " / " + cfg.test_images;
            break;
        case DataSource::Pgm: {
            const FeatureTable all = extract_all(load_pgm_groups(cfg.pgm_root), maps);
            std::tie(train, test) = split_groups(all, cfg.train_groups);
            data.source_note = "grouped PGM tree " + cfg.pgm_root;
            break;
        }
        case DataSource::Synthetic:
            train = extract_all(synth(cfg, cfg.synth_train_writers, "synth-train", "w"), maps);
            test = extract_all(synth(cfg, cfg.synth_test_writers, "synth-test", "t"), maps);
            data.source_note = "synthetic digit glyphs";
            break;
    }
    data.source_note += " (substitute data; not comparable to NIST SD-3 figures)";
    data.train = shuffled(train, derive_seed(cfg.seed, "shuffle"), 0);
    data.test = shuffled(test, derive_seed(cfg.seed, "test-order"), cfg.test_count);
    return data;
}

Mlp train_pair_similarity(const ExperimentConfig& cfg, const FeatureTable& table, bool within_group,
                          std::vector<double>* epoch_losses) {
    Rng rng(derive_seed(cfg.seed, "pairs"));
    auto pairs = sample_pairs(table.labels, table.group_ids, cfg.pairs, cfg.positive_fraction, within_group, rng);
    const FeaturePairStream stream(table, std::move(pairs));
    TrainConfig tc = cfg.train;
    tc.seed = derive_seed(cfg.seed, "init");
    const auto sizes = cfg.architecture();
    if (!table.vectors.empty() && 2 * table.vectors.front().size() != sizes.front()) {
        throw ConfigError("feature length does not match the network input size");
    }
    return train(mlp_init(sizes, tc), stream, tc, [&](std::size_t, double l) {
        if (epoch_losses) epoch_losses->push_back(l);
    });
}

std::vector<clip::ClipModel> draw_training_pool(const ExperimentConfig& cfg) {
    Rng rng(derive_seed(cfg.seed, "clip-pool"));
    std::vector<clip::ClipModel> pool;
    pool.reserve(cfg.train_clips);
    for (std::size_t i = 0; i < cfg.train_clips; ++i) pool.push_back(clip::generate_clip(rng));
    return pool;
}

namespace {

clip::TrialSpec trial_spec(const ExperimentConfig& cfg) {
    clip::TrialSpec spec;
    spec.kind = clip::TrialKind::Lineup;
    spec.condition = cfg.condition;
    spec.repr = cfg.repr;
    spec.noise.sigma = cfg.noise_sigma;
    return spec;
}

}  // namespace

Mlp train_clip_similarity(const ExperimentConfig& cfg, std::span<const clip::ClipModel> pool,
                          std::vector<double>* epoch_losses) {
    const clip::ClipPairStream stream(pool, trial_spec(cfg), cfg.pairs, cfg.positive_fraction,
                                      derive_seed(cfg.seed, "clip-pairs"));
    TrainConfig tc = cfg.train;
    tc.seed = derive_seed(cfg.seed, "init");
    return train(mlp_init(cfg.architecture(), tc), stream, tc, [&](std::size_t, double l) {
        if (epoch_losses) epoch_losses->push_back(l);
    });
}

CharRun run_char_experiment(const ExperimentConfig& cfg) {
    const CharData data = load_char_data(cfg);
    CharRun run;
    std::vector<double> losses;
    run.net = train_pair_similarity(cfg, data.train, false, &losses);

    const std::vector<Exemplar> stream = as_exemplars(data.train);
    const std::vector<Exemplar> test = as_exemplars(data.test);
    const SimilarityModel euclid = EuclideanDistance{};
    const SimilarityModel learned = LearnedSimilarity{run.net, cfg.symmetrize};

    run.euclidean_protos = select_prototypes(stream, euclid, cfg.prototype_cap);
    run.similarity_protos = select_prototypes(stream, learned, cfg.prototype_cap);
    run.replay_sound = replay_is_sound(stream, run.euclidean_protos, euclid) &&
                       replay_is_sound(stream, run.similarity_protos, learned);

    ExperimentReport& r = run.report;
    r.title = "nearest-prototype character classification";
    r.header = common_header(cfg);
    r.header.emplace_back("data", data.source_note);
    r.header.emplace_back("training items", std::to_string(data.train.size()));
    r.header.emplace_back("prototype cap", std::to_string(cfg.prototype_cap));
    r.header.emplace_back("mean loss first -> last epoch", losses_text(losses));
    r.arms.push_back({kSimilarityArm, evaluate(test, run.similarity_protos, learned), run.similarity_protos.size()});
    r.arms.push_back({kEuclideanArm, evaluate(test, run.euclidean_protos, euclid), run.euclidean_protos.size()});
    add_comparison(r);
    r.summary.emplace_back("prototype replay check", run.replay_sound ? "sound" : "FAILED");
    return run;
}

ExperimentReport classify_with_model(const ExperimentConfig& cfg, const Mlp& net) {
    const CharData data = load_char_data(cfg);
    if (net.input_size() != cfg.architecture().front()) {
        throw ConfigError("model input size does not match the configured features");
    }
    const std::vector<Exemplar> stream = as_exemplars(data.train);
    const std::vector<Exemplar> test = as_exemplars(data.test);
    const SimilarityModel euclid = EuclideanDistance{};
    const SimilarityModel learned = LearnedSimilarity{net, cfg.symmetrize};
    const PrototypeSet pe = select_prototypes(stream, euclid, cfg.prototype_cap);
    const PrototypeSet ps = select_prototypes(stream, learned, cfg.prototype_cap);

    ExperimentReport r;
    r.title = "nearest-prototype classification with a stored similarity model";
    r.header = {{"seed", std::to_string(cfg.seed)},
                {"data", data.source_note},
                {"network", arch_text(net.layer_sizes())},
                {"prototype cap", std::to_string(cfg.prototype_cap)}};
    r.arms.push_back({kSimilarityArm, evaluate(test, ps, learned), ps.size()});
    r.arms.push_back({kEuclideanArm, evaluate(test, pe, euclid), pe.size()});
    add_comparison(r);
    return r;
}

WriterRun run_writer_adaptation(const ExperimentConfig& cfg, const WarningSink& warn) {
    const WarningSink sink = warn ? warn : [](const std::string& m) { std::clog << "warning: " << m << '\n'; };
    const CharData data = load_char_data(cfg);
    WriterRun run;
    std::vector<double> losses;
    run.net = train_pair_similarity(cfg, data.train, true, &losses);
    const SimilarityModel euclid = EuclideanDistance{};
    const SimilarityModel learned = LearnedSimilarity{run.net, cfg.symmetrize};

    std::vector<std::string> order;
    std::map<std::string, std::vector<std::size_t>> members;
    for (std::size_t i = 0; i < data.test.size(); ++i) {
        auto& m = members[data.test.group_ids[i]];
        if (m.empty()) order.push_back(data.test.group_ids[i]);
        m.push_back(i);
    }

    std::vector<Label> truth, pred_sim, pred_euc;
    std::size_t prototype_total = 0;
    for (const std::string& g : order) {
        const auto& idx = members[g];
        if (idx.size() < 2) {
            sink("group " + g + " has fewer than 2 samples; skipped");
            ++run.groups_skipped;
            continue;
        }
        PrototypeIndex sim_index(learned), euc_index(euclid);
        std::set<Label> have;
        std::vector<std::size_t> rest;
        for (std::size_t i : idx) {
            if (have.insert(data.test.labels[i]).second) {
                const Exemplar e{data.test.vectors[i], data.test.labels[i]};
                sim_index.add(e);
                euc_index.add(e);
            } else {
                rest.push_back(i);
            }
        }
        prototype_total += have.size();
        for (std::size_t i : rest) {
            truth.push_back(data.test.labels[i]);
            pred_sim.push_back(sim_index.classify(data.test.vectors[i]));
            pred_euc.push_back(euc_index.classify(data.test.vectors[i]));
        }
        ++run.groups_tested;
    }

    ExperimentReport& r = run.report;
    r.title = "rapid writer adaptation (first sample of each label per writer as prototype)";
    r.header = common_header(cfg);
    r.header.emplace_back("data", data.source_note);
    r.header.emplace_back("training groups / items",
                          std::to_string(std::set<std::string>(data.train.group_ids.begin(), data.train.group_ids.end()).size()) +
                              " / " + std::to_string(data.train.size()));
    r.header.emplace_back("test groups tested / skipped",
                          std::to_string(run.groups_tested) + " / " + std::to_string(run.groups_skipped));
    r.header.emplace_back("mean loss first -> last epoch", losses_text(losses));
    const std::size_t per_group = run.groups_tested ? prototype_total / run.groups_tested : 0;
    r.arms.push_back({kSimilarityArm, make_report(truth, pred_sim), per_group});
    r.arms.push_back({kEuclideanArm, make_report(truth, pred_euc), per_group});
    add_comparison(r);
    r.summary.emplace_back("prototypes per group (mean)", std::to_string(per_group));
    return run;
}

ClipRun run_clip_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    const std::vector<clip::ClipModel> pool = draw_training_pool(cfg);
    ClipRun run;
    std::vector<double> losses;
    run.net = train_clip_similarity(cfg, pool, &losses);

    const clip::TrialSpec spec = trial_spec(cfg);
    Rng rng(derive_seed(cfg.seed, "clip-trials"));
    std::vector<clip::LineupTrial> trials;
    trials.reserve(cfg.test_trials);
    for (std::size_t i = 0; i < cfg.test_trials; ++i) trials.push_back(clip::make_lineup_trial(spec, rng));

    const SimilarityModel learned = LearnedSimilarity{run.net, cfg.symmetrize};
    const SimilarityModel euclid = EuclideanDistance{};
    const auto scorer_for = [](const SimilarityModel& m) {
        return [scorer = PairScorer(m)](const clip::ViewRepr& a, const clip::ViewRepr& b) {
            return scorer.score(scorer.prepare(a.values), scorer.prepare(b.values));
        };
    };

    static const char* const repr_names[] = {"ordered locations", "ordered angles", "feature map"};
    ExperimentReport& r = run.report;
    r.title = "single-view generalization on paperclips (forced-choice lineup)";
    r.header = common_header(cfg);
    r.header.emplace_back("representation", repr_names[static_cast<int>(cfg.repr)]);
    r.header.emplace_back("view condition", cfg.condition == clip::ViewCondition::Uniform40
                                                ? "slant, tilt ~ U[-40, +40] deg"
                                                : "slant, tilt in {-45, +45} deg");
    r.header.emplace_back("noise sigma", format_real(cfg.noise_sigma));
    r.header.emplace_back("training clips", std::to_string(pool.size()));
    r.header.emplace_back("mean loss first -> last epoch", losses_text(losses));
    r.arms.push_back({kSimilarityArm, clip::forced_choice_eval(trials, scorer_for(learned)), 0});
    r.arms.push_back({kEuclideanArm, clip::forced_choice_eval(trials, scorer_for(euclid)), 0});
    add_comparison(r);
    return run;
}

}  // namespace statsim
