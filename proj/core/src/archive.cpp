#include "statsim/archive.hpp"

#include <bit>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "statsim/error.hpp"
#include "statsim/rng.hpp"

namespace statsim {

namespace {

constexpr const char* kFormatTag = "statsim-mlp";

std::uint64_t mix(std::uint64_t h, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) {
        h ^= (v >> (8 * i)) & 0xffU;
        h *= 0x100000001b3ULL;
    }
    return h;
}

}  // namespace

std::string parameter_digest(const Mlp& net) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (std::size_t s : net.layer_sizes()) h = mix(h, s);
    for (const DenseLayer& layer : net.layers()) {
        for (double w : layer.weights) h = mix(h, std::bit_cast<std::uint64_t>(w));
        for (double b : layer.biases) h = mix(h, std::bit_cast<std::uint64_t>(b));
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

void save_model(const Mlp& net, const std::filesystem::path& path, const ArchiveMeta& meta) {
    nlohmann::json doc;
    doc["format"] = kFormatTag;
    doc["version"] = kArchiveVersion;
    doc["layer_sizes"] = net.layer_sizes();
    auto& layers = doc["layers"] = nlohmann::json::array();
    for (const DenseLayer& layer : net.layers()) {
        layers.push_back({{"weights", layer.weights}, {"biases", layer.biases}});
    }
    doc["meta"] = {{"seed", meta.seed},
                   {"config_digest", meta.config_digest},
                   {"symmetrize", meta.symmetrize}};
    doc["digest"] = parameter_digest(net);

    std::ofstream out(path);
    if (!out) throw ArchiveError("cannot write " + path.string());
    out << doc.dump(1) << '\n';
    if (!out) throw ArchiveError("write failed for " + path.string());
}

LoadedModel load_model(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ArchiveError("cannot read " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();

    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(ss.str());
    } catch (const nlohmann::json::exception& e) {
        throw ArchiveError(path.string() + ": malformed archive (" + e.what() + ")");
    }
    try {
        if (doc.at("format").get<std::string>() != kFormatTag) {
            throw ArchiveError(path.string() + ": not a statsim model archive");
        }
        const int version = doc.at("version").get<int>();
        if (version != kArchiveVersion) {
            throw ArchiveError(path.string() + ": archive version " + std::to_string(version) +
                               " is not supported (expected " + std::to_string(kArchiveVersion) + ")");
        }
        const auto sizes = doc.at("layer_sizes").get<std::vector<std::size_t>>();
        const auto& jl = doc.at("layers");
        if (sizes.size() < 2 || jl.size() != sizes.size() - 1) {
            throw ArchiveError(path.string() + ": layer list does not match layer sizes");
        }
        std::vector<DenseLayer> layers;
        for (std::size_t l = 0; l < jl.size(); ++l) {
            DenseLayer layer;
            layer.inputs = sizes[l];
            layer.outputs = sizes[l + 1];
            layer.weights = jl[l].at("weights").get<std::vector<double>>();
            layer.biases = jl[l].at("biases").get<std::vector<double>>();
            layers.push_back(std::move(layer));
        }
        LoadedModel m{Mlp(std::move(layers)), {}};
        const auto& jm = doc.at("meta");
        m.meta.seed = jm.at("seed").get<std::uint64_t>();
        m.meta.config_digest = jm.at("config_digest").get<std::string>();
        m.meta.symmetrize = jm.at("symmetrize").get<bool>();
        if (doc.at("digest").get<std::string>() != parameter_digest(m.net)) {
            throw ArchiveError(path.string() + ": parameter digest mismatch");
        }
        return m;
    } catch (const nlohmann::json::exception& e) {
        throw ArchiveError(path.string() + ": malformed archive (" + e.what() + ")");
    } catch (const ShapeError& e) {
        throw ArchiveError(path.string() + ": " + e.what());
    }
}

}  // namespace statsim
