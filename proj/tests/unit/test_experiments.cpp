#include <doctest.h>

#include "helpers.hpp"
#include "statsim/error.hpp"
#include "statsim/experiments.hpp"
#include "statsim/glyphs.hpp"

using namespace statsim;
namespace fs = std::filesystem;

namespace {

ExperimentConfig tiny_char() {
    ExperimentConfig c = default_config(ExperimentKind::Char);
    c.synth_train_writers = 20;
    c.synth_test_writers = 10;
    c.maps = "raw";
    c.hidden = 8;
    c.pairs = 2000;
    c.train.epochs = 2;
    c.prototype_cap = 30;
    c.test_count = 80;
    return c;
}

void check_recount(const ExperimentReport& r) {
    for (const ArmResult& a : r.arms) {
        CHECK(a.eval.error_rate * static_cast<double>(a.eval.n_tested) == doctest::Approx(static_cast<double>(a.eval.n_errors)));
        CHECK(a.eval.error_rate == static_cast<double>(a.eval.n_errors) / static_cast<double>(a.eval.n_tested));
    }
    CHECK(r.arm(kSimilarityArm).eval.n_tested == r.arm(kEuclideanArm).eval.n_tested);
}

}  // namespace

TEST_CASE("char experiment is deterministic and respects the cap") {
    const ExperimentConfig c = tiny_char();
    const CharRun a = run_char_experiment(c);
    const CharRun b = run_char_experiment(c);
    CHECK(a.report.to_text() == b.report.to_text());
    CHECK(a.report.to_json() == b.report.to_json());
    CHECK(a.net == b.net);
    CHECK(a.replay_sound);
    CHECK(a.euclidean_protos.size() <= c.prototype_cap);
    CHECK(a.similarity_protos.size() <= c.prototype_cap);
    CHECK(a.report.arm(kSimilarityArm).eval.n_tested == 80);
    check_recount(a.report);

    ExperimentConfig other = c;
    other.seed = 2;
    CHECK(run_char_experiment(other).report.to_text() != a.report.to_text());
}

TEST_CASE("cap of one reduces both arms to the first stream item") {
    ExperimentConfig c = tiny_char();
    c.prototype_cap = 1;
    const CharRun run = run_char_experiment(c);
    const CharData data = load_char_data(c);
    const Label only = data.train.labels.front();
    std::size_t errors = 0;
    for (Label l : data.test.labels) errors += l != only;
    const double expected = static_cast<double>(errors) / static_cast<double>(data.test.size());
    CHECK(run.report.arm(kSimilarityArm).eval.error_rate == expected);
    CHECK(run.report.arm(kEuclideanArm).eval.error_rate == expected);
}

TEST_CASE("idx data source reads files written by the IDX writer") {
    testutil::TempDir dir("expidx");
    glyphs::SynthConfig sc;
    sc.writers = 12;
    write_idx(glyphs::synth_digits(sc, 1), dir.path() / "tr-i", dir.path() / "tr-l");
    sc.writers = 4;
    write_idx(glyphs::synth_digits(sc, 2), dir.path() / "te-i", dir.path() / "te-l");
    ExperimentConfig c = tiny_char();
    c.source = DataSource::Idx;
    c.train_images = (dir.path() / "tr-i").string();
    c.train_labels = (dir.path() / "tr-l").string();
    c.test_images = (dir.path() / "te-i").string();
    c.test_labels = (dir.path() / "te-l").string();
    c.test_count = 0;
    const CharData d = load_char_data(c);
    CHECK(d.train.size() == 120);
    CHECK(d.test.size() == 40);
    const CharRun run = run_char_experiment(c);
    check_recount(run.report);
}

TEST_CASE("writer adaptation with identical samples is error free") {
    testutil::TempDir dir("writer");
    Dataset ds;
    Rng rng(3);
    for (int g = 0; g < 21; ++g) {
        const glyphs::WriterStyle w = glyphs::random_writer({}, rng);
        for (int rep = 0; rep < 2; ++rep) {
            for (int d = 0; d < 10; ++d) {
                ds.images.push_back(glyphs::render(d, w.digits[static_cast<std::size_t>(d)]));
                ds.labels.push_back(d);
                ds.group_ids.push_back("g" + std::to_string(100 + g));
            }
        }
    }
    // a lone sample in its own group is skipped
    ds.images.push_back(ds.images.front());
    ds.labels.push_back(0);
    ds.group_ids.push_back("z");
    write_pgm_groups(ds, dir.path());

    ExperimentConfig c = default_config(ExperimentKind::WriterAdapt);
    c.source = DataSource::Pgm;
    c.pgm_root = dir.path().string();
    c.train_groups = 20;
    c.maps = "raw";
    c.hidden = 20;
    c.pairs = 20000;
    c.train.epochs = 5;
    std::vector<std::string> warnings;
    const WriterRun run = run_writer_adaptation(c, [&](const std::string& m) { warnings.push_back(m); });
    CHECK(run.groups_tested == 1);
    CHECK(run.groups_skipped == 1);
    CHECK(warnings.size() == 1);
    CHECK(run.report.arm(kSimilarityArm).eval.n_tested == 10);
    CHECK(run.report.arm(kSimilarityArm).eval.error_rate == 0.0);
    CHECK(run.report.arm(kEuclideanArm).eval.error_rate == 0.0);
    CHECK(run.report.arm(kEuclideanArm).prototypes == 10);
}

TEST_CASE("writer adaptation rejects ungrouped IDX data") {
    ExperimentConfig c = default_config(ExperimentKind::WriterAdapt);
    c.source = DataSource::Idx;
    c.train_images = c.train_labels = c.test_images = c.test_labels = "x";
    CHECK_THROWS_AS(load_char_data(c), ConfigError);
}

TEST_CASE("synthetic writer adaptation runs deterministically") {
    ExperimentConfig c = default_config(ExperimentKind::WriterAdapt);
    c.synth_train_writers = 10;
    c.synth_test_writers = 5;
    c.synth_samples_per_digit = 2;
    c.maps = "raw";
    c.hidden = 6;
    c.pairs = 1000;
    c.train.epochs = 1;
    const WriterRun a = run_writer_adaptation(c);
    const WriterRun b = run_writer_adaptation(c);
    CHECK(a.report.to_text() == b.report.to_text());
    CHECK(a.groups_tested == 5);
    CHECK(a.report.arm(kEuclideanArm).eval.n_tested == 50);
    check_recount(a.report);
}

TEST_CASE("clip experiment is deterministic") {
    ExperimentConfig c = default_config(ExperimentKind::Clips);
    c.hidden = 10;
    c.pairs = 2000;
    c.train.epochs = 2;
    c.test_trials = 300;
    c.train_clips = 20;
    const ClipRun a = run_clip_experiment(c);
    const ClipRun b = run_clip_experiment(c);
    CHECK(a.report.to_text() == b.report.to_text());
    CHECK(a.report.to_json() == b.report.to_json());
    CHECK(a.report.arm(kSimilarityArm).eval.n_tested == 300);
    check_recount(a.report);
    const auto pool = draw_training_pool(c);
    CHECK(pool.size() == 20);
}

TEST_CASE("classify with a mismatched model is rejected") {
    ExperimentConfig c = tiny_char();
    TrainConfig tc;
    const std::size_t sizes[] = {10, 3, 1};
    CHECK_THROWS_AS(classify_with_model(c, mlp_init(sizes, tc)), ConfigError);
}

TEST_CASE("classify with a trained model reproduces the char run") {
    const ExperimentConfig c = tiny_char();
    const CharRun run = run_char_experiment(c);
    const ExperimentReport r = classify_with_model(c, run.net);
    CHECK(r.arm(kSimilarityArm).eval.n_errors == run.report.arm(kSimilarityArm).eval.n_errors);
    CHECK(r.arm(kEuclideanArm).eval.n_errors == run.report.arm(kEuclideanArm).eval.n_errors);
}
