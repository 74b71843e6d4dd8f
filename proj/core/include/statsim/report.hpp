#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "statsim/proto_knn.hpp"

namespace statsim {

struct ArmResult {
    std::string name;
    EvalReport eval;
    std::size_t prototypes = 0;
};

/// Result table of one experiment run. Contains no timings, so equal runs render to
/// equal bytes.
struct ExperimentReport {
    std::string title;
    std::vector<std::pair<std::string, std::string>> header;
    std::vector<ArmResult> arms;
    std::vector<std::pair<std::string, std::string>> summary;

    const ArmResult& arm(const std::string& name) const;

    /// Aligned plain-text table.
    std::string to_text() const;
    /// Structured twin of to_text(), including confusion matrices.
    std::string to_json() const;
};

/// Shortest round-trip decimal.
std::string format_real(double v);

}  // namespace statsim
