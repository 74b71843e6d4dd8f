#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "statsim/char_features.hpp"
#include "statsim/mlp.hpp"
#include "statsim/rng.hpp"
#include "statsim/similarity.hpp"

namespace statsim {

/// Labeled images with optional writer/group identifiers (empty when ungrouped).
struct Dataset {
    std::vector<GrayImage> images;
    std::vector<Label> labels;
    std::vector<std::string> group_ids;

    std::size_t size() const { return images.size(); }
    bool grouped() const { return !group_ids.empty(); }
    /// Throws ConfigError if the parallel lists disagree in length.
    void validate() const;
};

using WarningSink = std::function<void(const std::string&)>;

inline constexpr std::uint32_t kIdxImageMagic = 2051;
inline constexpr std::uint32_t kIdxLabelMagic = 2049;

/// IDX image/label pair (big-endian, unsigned-byte payloads). Intensities are scaled to
/// [0,1]. Throws FormatError naming the byte offset of the problem.
Dataset load_idx(const std::filesystem::path& image_path, const std::filesystem::path& label_path);

/// Writes `ds` as IDX; every image must share one size.
void write_idx(const Dataset& ds, const std::filesystem::path& image_path,
               const std::filesystem::path& label_path);

/// Binary PGM (P5) reader/writer for a single image.
GrayImage read_pgm(const std::filesystem::path& path);
void write_pgm(const GrayImage& img, const std::filesystem::path& path);

/// root/<group>/<label>_<n>.pgm, directories and files visited in name order.
Dataset load_pgm_groups(const std::filesystem::path& root, const WarningSink& warn = {});
void write_pgm_groups(const Dataset& ds, const std::filesystem::path& root);

/// Extracted feature vectors with the dataset's labels and groups.
struct FeatureTable {
    std::vector<FeatureVector> vectors;
    std::vector<Label> labels;
    std::vector<std::string> group_ids;

    std::size_t size() const { return vectors.size(); }
};

FeatureTable extract_all(const Dataset& ds, const MapSelection& maps = kAllMaps);

struct PairIndex {
    std::size_t first = 0;
    std::size_t second = 0;
    double target = 0.0;
};

/// Draws n index pairs; exactly round(n * positive_fraction) are same-label, interleaved
/// through the list. Members of a pair are distinct items, drawn by rejection.
/// `within_group` restricts both members to one group. Throws SamplingError when the
/// requested pair kinds cannot exist.
std::vector<PairIndex> sample_pairs(std::span<const Label> labels,
                                    std::span<const std::string> group_ids, std::size_t n,
                                    double positive_fraction, bool within_group, Rng& rng);

/// Training stream over index pairs; inputs are [x_first || x_second].
class FeaturePairStream final : public SampleStream {
public:
    FeaturePairStream(const FeatureTable& table, std::vector<PairIndex> pairs)
        : table_(&table), pairs_(std::move(pairs)) {}

    std::size_t size() const override { return pairs_.size(); }
    void fill(std::size_t epoch, std::size_t index, PairSample& out) const override;
    std::span<const PairIndex> pairs() const { return pairs_; }

private:
    const FeatureTable* table_;
    std::vector<PairIndex> pairs_;
};

}  // namespace statsim
