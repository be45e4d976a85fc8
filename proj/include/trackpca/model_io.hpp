#pragma once

#include <cmath>
#include <string>
#include <vector>

#include <json.hpp>

#include "trackpca/csv.hpp"
#include "trackpca/errors.hpp"
#include "trackpca/pca.hpp"

namespace trackpca {

inline constexpr int kModelFormatVersion = 1;

namespace detail {

inline void append_numbers(std::string& out, const std::vector<double>& xs) {
    out += '[';
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i) out += ", ";
        out += csv::format_scientific(xs[i]);
    }
    out += ']';
}

inline void append_strings(std::string& out, const std::vector<std::string>& xs) {
    out += '[';
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i) out += ", ";
        out += nlohmann::json(xs[i]).dump();
    }
    out += ']';
}

}  // namespace detail

/// JSON text of a model. Numbers use shortest round-trip scientific notation,
/// so parsing the text back yields bit-identical doubles.
inline std::string model_to_json(const PcaModel& m) {
    std::string out = "{\n";
    out += "  \"format\": \"trackpca.pca_model\",\n";
    out += "  \"format_version\": " + std::to_string(kModelFormatVersion) + ",\n";
    out += "  \"n_samples\": " + std::to_string(m.n_samples) + ",\n";
    out += "  \"total_variance\": " + csv::format_scientific(m.total_variance) + ",\n";
    out += "  \"standardization\": {\n    \"stat_names\": ";
    detail::append_strings(out, m.standardization.stat_names);
    out += ",\n    \"means\": ";
    detail::append_numbers(out, m.standardization.means);
    out += ",\n    \"std_devs\": ";
    detail::append_numbers(out, m.standardization.std_devs);
    out += "\n  },\n  \"component_variances\": ";
    detail::append_numbers(out, m.component_variances);
    out += ",\n  \"loadings\": [";
    for (std::size_t c = 0; c < m.loadings.size(); ++c) {
        out += c ? ",\n    " : "\n    ";
        detail::append_numbers(out, m.loadings[c]);
    }
    out += "\n  ],\n  \"spectrum\": ";
    detail::append_numbers(out, m.spectrum);
    out += "\n}\n";
    return out;
}

inline PcaModel model_from_json(const std::string& text) {
    PcaModel m;
    try {
        const auto j = nlohmann::json::parse(text);
        if (j.value("format", std::string{}) != "trackpca.pca_model")
            throw SchemaError("not a trackpca model document");
        const int version = j.at("format_version").get<int>();
        if (version != kModelFormatVersion)
            throw SchemaError("unsupported model format_version " + std::to_string(version));
        m.n_samples = j.at("n_samples").get<std::size_t>();
        m.total_variance = j.at("total_variance").get<double>();
        const auto& s = j.at("standardization");
        m.standardization.stat_names = s.at("stat_names").get<std::vector<std::string>>();
        m.standardization.means = s.at("means").get<std::vector<double>>();
        m.standardization.std_devs = s.at("std_devs").get<std::vector<double>>();
        m.component_variances = j.at("component_variances").get<std::vector<double>>();
        m.loadings = j.at("loadings").get<std::vector<std::vector<double>>>();
        m.spectrum = j.value("spectrum", std::vector<double>{});
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError(std::string("malformed model: ") + e.what());
    }

    const std::size_t p = m.standardization.stat_names.size();
    if (p == 0) throw SchemaError("model has no statistics");
    if (m.standardization.means.size() != p || m.standardization.std_devs.size() != p)
        throw SchemaError("standardization vectors do not match stat_names length");
    for (double sd : m.standardization.std_devs)
        if (!(sd > 0)) throw SchemaError("standardization std_devs must be positive");
    if (m.loadings.empty() || m.loadings.size() != m.component_variances.size())
        throw SchemaError("loadings and component_variances lengths differ");
    for (const auto& w : m.loadings) {
        if (w.size() != p) throw SchemaError("loading vector length differs from stat count");
        if (std::abs(norm(w) - 1.0) > 1e-10) throw SchemaError("loading vector is not unit norm");
    }
    if (!(m.total_variance > 0)) throw SchemaError("total_variance must be positive");
    return m;
}

inline void save_model(const PcaModel& m, const std::string& path) { csv::write_file(path, model_to_json(m)); }

inline PcaModel load_model(const std::string& path) {
    try {
        return model_from_json(csv::read_file(path));
    } catch (const SchemaError& e) {
        throw SchemaError("'" + path + "': " + e.what());
    }
}

}  // namespace trackpca
