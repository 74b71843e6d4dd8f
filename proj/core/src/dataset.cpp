#include "statsim/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <iterator>
#include <map>

#include "statsim/error.hpp"

namespace statsim {

namespace fs = std::filesystem;

namespace {

std::vector<unsigned char> read_bytes(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open " + path.string());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::uint32_t be32(std::span<const unsigned char> b, std::size_t offset, const fs::path& path) {
    if (offset + 4 > b.size()) {
        throw FormatError(path.string() + ": truncated header at offset " + std::to_string(offset));
    }
    return (std::uint32_t{b[offset]} << 24) | (std::uint32_t{b[offset + 1]} << 16) |
           (std::uint32_t{b[offset + 2]} << 8) | std::uint32_t{b[offset + 3]};
}

void put_be32(std::ofstream& out, std::uint32_t v) {
    const char bytes[4] = {static_cast<char>(v >> 24), static_cast<char>(v >> 16),
                           static_cast<char>(v >> 8), static_cast<char>(v)};
    out.write(bytes, 4);
}

unsigned char to_byte(double v) {
    return static_cast<unsigned char>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0));
}

}  // namespace

void Dataset::validate() const {
    if (labels.size() != images.size() || (!group_ids.empty() && group_ids.size() != images.size())) {
        throw ConfigError("dataset lists differ in length");
    }
}

Dataset load_idx(const fs::path& image_path, const fs::path& label_path) {
    const auto img = read_bytes(image_path);
    const auto lab = read_bytes(label_path);

    const std::uint32_t img_magic = be32(img, 0, image_path);
    if (img_magic != kIdxImageMagic) {
        throw FormatError(image_path.string() + ": bad magic " + std::to_string(img_magic) +
                          " at offset 0 (expected 2051)");
    }
    const std::uint32_t lab_magic = be32(lab, 0, label_path);
    if (lab_magic != kIdxLabelMagic) {
        throw FormatError(label_path.string() + ": bad magic " + std::to_string(lab_magic) +
                          " at offset 0 (expected 2049)");
    }
    const std::size_t n = be32(img, 4, image_path);
    const std::size_t rows = be32(img, 8, image_path);
    const std::size_t cols = be32(img, 12, image_path);
    const std::size_t n_labels = be32(lab, 4, label_path);
    if (n_labels != n) {
        throw FormatError(label_path.string() + ": label count " + std::to_string(n_labels) +
                          " at offset 4 does not match image count " + std::to_string(n));
    }
    const std::size_t img_payload = n * rows * cols;
    if (img.size() < 16 + img_payload) {
        throw FormatError(image_path.string() + ": payload truncated at offset " +
                          std::to_string(img.size()) + " (expected " +
                          std::to_string(16 + img_payload) + " bytes)");
    }
    if (lab.size() < 8 + n) {
        throw FormatError(label_path.string() + ": payload truncated at offset " +
                          std::to_string(lab.size()) + " (expected " + std::to_string(8 + n) +
                          " bytes)");
    }
    Dataset ds;
    ds.images.reserve(n);
    ds.labels.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        GrayImage g(cols, rows);
        const unsigned char* p = img.data() + 16 + i * rows * cols;
        for (std::size_t k = 0; k < rows * cols; ++k) g.pixels[k] = static_cast<double>(p[k]) / 255.0;
        ds.images.push_back(std::move(g));
        ds.labels.push_back(lab[8 + i]);
    }
    return ds;
}

void write_idx(const Dataset& ds, const fs::path& image_path, const fs::path& label_path) {
    ds.validate();
    const std::size_t w = ds.images.empty() ? 0 : ds.images.front().width;
    const std::size_t h = ds.images.empty() ? 0 : ds.images.front().height;
    std::ofstream img(image_path, std::ios::binary);
    std::ofstream lab(label_path, std::ios::binary);
    if (!img || !lab) throw FormatError("cannot write IDX files");
    put_be32(img, kIdxImageMagic);
    put_be32(img, static_cast<std::uint32_t>(ds.size()));
    put_be32(img, static_cast<std::uint32_t>(h));
    put_be32(img, static_cast<std::uint32_t>(w));
    put_be32(lab, kIdxLabelMagic);
    put_be32(lab, static_cast<std::uint32_t>(ds.size()));
    for (std::size_t i = 0; i < ds.size(); ++i) {
        const GrayImage& g = ds.images[i];
        if (g.width != w || g.height != h) throw ShapeError("IDX images must share one size");
        for (double v : g.pixels) img.put(static_cast<char>(to_byte(v)));
        if (ds.labels[i] < 0 || ds.labels[i] > 255) throw FormatError("IDX labels must fit in a byte");
        lab.put(static_cast<char>(ds.labels[i]));
    }
}

GrayImage read_pgm(const fs::path& path) {
    const auto bytes = read_bytes(path);
    std::size_t pos = 0;
    auto fail = [&](const std::string& what) {
        throw FormatError(path.string() + ": " + what + " at offset " + std::to_string(pos));
    };
    auto skip_space = [&] {
        while (pos < bytes.size()) {
            if (bytes[pos] == '#') {
                while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
            } else if (std::isspace(bytes[pos])) {
                ++pos;
            } else {
                break;
            }
        }
    };
    auto number = [&] {
        skip_space();
        std::size_t v = 0;
        const auto* first = reinterpret_cast<const char*>(bytes.data() + pos);
        const auto* last = reinterpret_cast<const char*>(bytes.data() + bytes.size());
        const auto [ptr, ec] = std::from_chars(first, last, v);
        if (ec != std::errc() || ptr == first) fail("malformed header number");
        pos += static_cast<std::size_t>(ptr - first);
        return v;
    };
    if (bytes.size() < 2 || bytes[0] != 'P' || bytes[1] != '5') fail("not a binary PGM (P5)");
    pos = 2;
    const std::size_t w = number();
    const std::size_t h = number();
    const std::size_t maxval = number();
    if (w == 0 || h == 0 || maxval == 0 || maxval > 65535) fail("invalid PGM dimensions or maxval");
    if (pos >= bytes.size() || !std::isspace(bytes[pos])) fail("missing whitespace after header");
    ++pos;
    const std::size_t bpp = maxval < 256 ? 1 : 2;
    if (bytes.size() - pos < w * h * bpp) fail("pixel data truncated");
    GrayImage g(w, h);
    for (std::size_t i = 0; i < w * h; ++i) {
        std::size_t v = bytes[pos + i * bpp];
        if (bpp == 2) v = (v << 8) | bytes[pos + i * bpp + 1];
        g.pixels[i] = std::min(1.0, static_cast<double>(v) / static_cast<double>(maxval));
    }
    return g;
}

void write_pgm(const GrayImage& img, const fs::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw FormatError("cannot write " + path.string());
    out << "P5\n" << img.width << ' ' << img.height << "\n255\n";
    for (double v : img.pixels) out.put(static_cast<char>(to_byte(v)));
}

Dataset load_pgm_groups(const fs::path& root, const WarningSink& warn) {
    const WarningSink sink = warn ? warn : [](const std::string& m) { std::clog << "warning: " << m << '\n'; };
    if (!fs::is_directory(root)) throw FormatError(root.string() + " is not a directory");
    std::vector<fs::path> groups;
    for (const auto& e : fs::directory_iterator(root)) {
        if (e.is_directory()) groups.push_back(e.path());
    }
    std::ranges::sort(groups);
    Dataset ds;
    for (const fs::path& g : groups) {
        std::vector<fs::path> files;
        for (const auto& e : fs::directory_iterator(g)) {
            if (e.is_regular_file() && e.path().extension() == ".pgm") files.push_back(e.path());
        }
        std::ranges::sort(files);
        for (const fs::path& f : files) {
            const std::string stem = f.stem().string();
            const auto cut = stem.find('_');
            const std::string prefix = stem.substr(0, cut);
            int label = 0;
            const auto [ptr, ec] = std::from_chars(prefix.data(), prefix.data() + prefix.size(), label);
            if (cut == std::string::npos || ec != std::errc() || ptr != prefix.data() + prefix.size()) {
                throw FormatError(f.string() + ": file name does not start with an integer label");
            }
            ds.images.push_back(read_pgm(f));
            ds.labels.push_back(label);
            ds.group_ids.push_back(g.filename().string());
        }
    }
    if (ds.size() == 0) sink("no PGM images found under " + root.string());
    return ds;
}

void write_pgm_groups(const Dataset& ds, const fs::path& root) {
    ds.validate();
    if (!ds.grouped()) throw ConfigError("write_pgm_groups needs group ids");
    std::map<std::pair<std::string, Label>, std::size_t> counters;
    for (std::size_t i = 0; i < ds.size(); ++i) {
        const fs::path dir = root / ds.group_ids[i];
        fs::create_directories(dir);
        const std::size_t n = counters[{ds.group_ids[i], ds.labels[i]}]++;
        char name[64];
        std::snprintf(name, sizeof name, "%d_%05zu.pgm", ds.labels[i], n);
        write_pgm(ds.images[i], dir / name);
    }
}

FeatureTable extract_all(const Dataset& ds, const MapSelection& maps) {
    ds.validate();
    FeatureTable t;
    t.vectors.reserve(ds.size());
    for (const GrayImage& img : ds.images) t.vectors.push_back(extract(img, maps));
    t.labels = ds.labels;
    t.group_ids = ds.group_ids;
    return t;
}

std::vector<PairIndex> sample_pairs(std::span<const Label> labels,
                                    std::span<const std::string> group_ids, std::size_t n,
                                    double positive_fraction, bool within_group, Rng& rng) {
    if (!(positive_fraction > 0.0 && positive_fraction < 1.0)) {
        throw ConfigError("positive fraction must lie in (0,1)");
    }
    if (labels.size() < 2) throw SamplingError("pair sampling needs at least two items");
    if (within_group && group_ids.size() != labels.size()) {
        throw SamplingError("within-group sampling needs a group id per item");
    }

    // Members of each partition cell: one cell per group, or a single cell.
    std::map<std::string, std::vector<std::size_t>> cells;
    for (std::size_t i = 0; i < labels.size(); ++i) cells[within_group ? group_ids[i] : ""].push_back(i);
    std::vector<std::size_t> cell_of(labels.size());
    std::vector<const std::vector<std::size_t>*> cell_list;
    for (const auto& [key, members] : cells) {
        for (std::size_t i : members) cell_of[i] = cell_list.size();
        cell_list.push_back(&members);
    }

    bool can_pos = false, can_neg = false;
    for (const auto* members : cell_list) {
        std::map<Label, std::size_t> counts;
        for (std::size_t i : *members) ++counts[labels[i]];
        for (const auto& [l, c] : counts) can_pos = can_pos || c >= 2;
        can_neg = can_neg || counts.size() >= 2;
    }
    const auto n_pos = static_cast<std::size_t>(std::llround(static_cast<double>(n) * positive_fraction));
    if (n_pos > 0 && !can_pos) throw SamplingError("no two items share a label; positive pairs impossible");
    if (n_pos < n && !can_neg) throw SamplingError("all candidate pairs share a label; negative pairs impossible");

    const auto quota = [&](std::size_t i) { return (i * n_pos) / std::max<std::size_t>(n, 1); };
    std::vector<PairIndex> pairs;
    pairs.reserve(n);
    for (std::size_t k = 0; k < n; ++k) {
        const bool positive = quota(k + 1) > quota(k);
        for (;;) {
            const std::size_t a = rng.below(labels.size());
            const auto& members = *cell_list[cell_of[a]];
            if (members.size() < 2) continue;
            std::size_t b = members[rng.below(members.size())];
            if (b == a) continue;
            if ((labels[a] == labels[b]) != positive) continue;
            pairs.push_back({a, b, positive ? 1.0 : 0.0});
            break;
        }
    }
    return pairs;
}

void FeaturePairStream::fill(std::size_t, std::size_t index, PairSample& out) const {
    const PairIndex& p = pairs_[index];
    const FeatureVector& a = table_->vectors[p.first];
    const FeatureVector& b = table_->vectors[p.second];
    out.input.resize(a.size() + b.size());
    std::copy(a.begin(), a.end(), out.input.begin());
    std::copy(b.begin(), b.end(), out.input.begin() + static_cast<std::ptrdiff_t>(a.size()));
    out.target = p.target;
}

}  // namespace statsim
