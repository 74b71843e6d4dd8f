#include "statsim/report.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>

#include <json.hpp>

#include "statsim/error.hpp"

namespace statsim {

std::string format_real(double v) {
    char buf[64];
    const auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, p);
}

const ArmResult& ExperimentReport::arm(const std::string& name) const {
    for (const ArmResult& a : arms) {
        if (a.name == name) return a;
    }
    throw StateError("report has no arm named " + name);
}

std::string ExperimentReport::to_text() const {
    std::string out = "# " + title + "\n";
    std::size_t key_w = 0;
    for (const auto& [k, v] : header) key_w = std::max(key_w, k.size());
    for (const auto& [k, v] : header) {
        out += "# " + k + std::string(key_w - k.size(), ' ') + " : " + v + "\n";
    }
    out += "\n";

    const std::vector<std::string> cols = {"arm", "tested", "errors", "error %", "prototypes"};
    std::vector<std::vector<std::string>> rows;
    for (const ArmResult& a : arms) {
        char pct[32];
        std::snprintf(pct, sizeof pct, "%.2f", 100.0 * a.eval.error_rate);
        rows.push_back({a.name, std::to_string(a.eval.n_tested), std::to_string(a.eval.n_errors), pct,
                        a.prototypes ? std::to_string(a.prototypes) : "-"});
    }
    std::vector<std::size_t> width(cols.size());
    for (std::size_t c = 0; c < cols.size(); ++c) {
        width[c] = cols[c].size();
        for (const auto& r : rows) width[c] = std::max(width[c], r[c].size());
    }
    auto emit = [&](const std::vector<std::string>& r) {
        for (std::size_t c = 0; c < r.size(); ++c) {
            const std::string pad(width[c] - r[c].size(), ' ');
            out += c == 0 ? r[c] + pad : pad + r[c];
            out += c + 1 < r.size() ? "  " : "\n";
        }
    };
    emit(cols);
    std::string rule;
    for (std::size_t c = 0; c < cols.size(); ++c) rule += std::string(width[c], '-') + (c + 1 < cols.size() ? "  " : "");
    out += rule + "\n";
    for (const auto& r : rows) emit(r);

    if (!summary.empty()) {
        out += "\n";
        std::size_t sw = 0;
        for (const auto& [k, v] : summary) sw = std::max(sw, k.size());
        for (const auto& [k, v] : summary) out += k + std::string(sw - k.size(), ' ') + " : " + v + "\n";
    }
    return out;
}

std::string ExperimentReport::to_json() const {
    nlohmann::ordered_json doc;
    doc["title"] = title;
    auto& h = doc["header"] = nlohmann::ordered_json::object();
    for (const auto& [k, v] : header) h[k] = v;
    auto& jarms = doc["arms"] = nlohmann::ordered_json::array();
    for (const ArmResult& a : arms) {
        jarms.push_back({{"name", a.name},
                         {"n_tested", a.eval.n_tested},
                         {"n_errors", a.eval.n_errors},
                         {"error_rate", a.eval.error_rate},
                         {"prototypes", a.prototypes},
                         {"labels", a.eval.labels},
                         {"confusion", a.eval.confusion}});
    }
    auto& s = doc["summary"] = nlohmann::ordered_json::object();
    for (const auto& [k, v] : summary) s[k] = v;
    return doc.dump(2) + "\n";
}

}  // namespace statsim
