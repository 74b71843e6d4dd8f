#pragma once

#include <cstddef>
#include <vector>

#include "statsim/rng.hpp"
#include "statsim/similarity.hpp"

namespace testutil {

inline std::vector<double> random_vector(statsim::Rng& rng, std::size_t n, double lo = -1.0, double hi = 1.0) {
    std::vector<double> v(n);
    for (double& x : v) x = rng.uniform(lo, hi);
    return v;
}

inline std::vector<double> random_simplex(statsim::Rng& rng, std::size_t n) {
    std::vector<double> v(n);
    double sum = 0.0;
    for (double& x : v) {
        x = rng.uniform01() + 1e-3;
        sum += x;
    }
    for (double& x : v) x /= sum;
    return v;
}

}  // namespace testutil

#include <filesystem>
#include <string>

#include <unistd.h>

namespace testutil {

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag)
        : path_(std::filesystem::temp_directory_path() / ("statsim_" + tag + "_" + std::to_string(::getpid()))) {
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

}  // namespace testutil
