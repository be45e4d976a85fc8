#pragma once

// Plot-ready output files. Numbers are written in shortest round-trip form and
// rows in a fixed order, so identical inputs give byte-identical files.

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "trackpca/csv.hpp"
#include "trackpca/pca.hpp"
#include "trackpca/regression.hpp"
#include "trackpca/scoring.hpp"
#include "trackpca/similarity.hpp"

namespace trackpca::report {

enum class Format { csv, json };

inline std::string component_label(std::size_t c) { return "pc" + std::to_string(c + 1); }

inline std::string dump(const nlohmann::json& j) { return j.dump(2) + "\n"; }

inline std::string scree(const std::vector<ScreeRow>& rows, Format format) {
    if (format == Format::json) {
        nlohmann::json j = nlohmann::json::array();
        for (const auto& r : rows)
            j.push_back({{"component", r.component},
                         {"variance", r.variance},
                         {"ratio", r.ratio},
                         {"cumulative_ratio", r.cumulative_ratio}});
        return dump(j);
    }
    std::string out;
    csv::append_row(out, {"component", "variance", "ratio", "cumulative_ratio"});
    for (const auto& r : rows)
        csv::append_row(out, {std::to_string(r.component), csv::format_double(r.variance), csv::format_double(r.ratio),
                              csv::format_double(r.cumulative_ratio)});
    return out;
}

inline std::string loadings(const PcaModel& model, Format format) {
    const auto& names = model.standardization.stat_names;
    if (format == Format::json) {
        nlohmann::json j = nlohmann::json::array();
        for (std::size_t s = 0; s < names.size(); ++s) {
            nlohmann::json row = {{"statistic", names[s]}};
            for (std::size_t c = 0; c < model.k(); ++c) row[component_label(c)] = model.loadings[c][s];
            j.push_back(row);
        }
        return dump(j);
    }
    std::string out;
    std::vector<std::string> header = {"statistic"};
    for (std::size_t c = 0; c < model.k(); ++c) header.push_back(component_label(c));
    csv::append_row(out, header);
    for (std::size_t s = 0; s < names.size(); ++s) {
        std::vector<std::string> row = {names[s]};
        for (std::size_t c = 0; c < model.k(); ++c) row.push_back(csv::format_double(model.loadings[c][s]));
        csv::append_row(out, row);
    }
    return out;
}

inline std::string scores(const ScoreSet& s, Format format) {
    const std::size_t k = s.scores.cols();
    if (format == Format::json) {
        nlohmann::json j = nlohmann::json::array();
        for (std::size_t i = 0; i < s.size(); ++i) {
            nlohmann::json row = {{"entity_id", s.entity_ids[i]}, {"entity_name", s.entity_names[i]}, {"minutes", s.minutes[i]}};
            for (std::size_t c = 0; c < k; ++c) row[component_label(c)] = s.scores(i, c);
            j.push_back(row);
        }
        return dump(j);
    }
    std::string out;
    std::vector<std::string> header = {"entity_id", "entity_name", "minutes"};
    for (std::size_t c = 0; c < k; ++c) header.push_back(component_label(c));
    csv::append_row(out, header);
    for (std::size_t i = 0; i < s.size(); ++i) {
        std::vector<std::string> row = {s.entity_ids[i], s.entity_names[i], csv::format_double(s.minutes[i])};
        for (std::size_t c = 0; c < k; ++c) row.push_back(csv::format_double(s.scores(i, c)));
        csv::append_row(out, row);
    }
    return out;
}

/// Team table; win_pct and weighted_score columns appear only when supplied.
inline std::string teams(const TeamScoreSet& t, const std::optional<std::vector<double>>& weighted, Format format) {
    const std::size_t k = t.scores.cols();
    if (format == Format::json) {
        nlohmann::json j = nlohmann::json::array();
        for (std::size_t r = 0; r < t.size(); ++r) {
            nlohmann::json row = {{"team", t.team_codes[r]}, {"total_minutes", t.total_minutes[r]}};
            for (std::size_t c = 0; c < k; ++c) row[component_label(c)] = t.scores(r, c);
            if (t.win_pct) row["win_pct"] = (*t.win_pct)[r];
            if (weighted) row["weighted_score"] = (*weighted)[r];
            j.push_back(row);
        }
        return dump(j);
    }
    std::string out;
    std::vector<std::string> header = {"team", "total_minutes"};
    for (std::size_t c = 0; c < k; ++c) header.push_back(component_label(c));
    if (t.win_pct) header.push_back("win_pct");
    if (weighted) header.push_back("weighted_score");
    csv::append_row(out, header);
    for (std::size_t r = 0; r < t.size(); ++r) {
        std::vector<std::string> row = {t.team_codes[r], csv::format_double(t.total_minutes[r])};
        for (std::size_t c = 0; c < k; ++c) row.push_back(csv::format_double(t.scores(r, c)));
        if (t.win_pct) row.push_back(csv::format_double((*t.win_pct)[r]));
        if (weighted) row.push_back(csv::format_double((*weighted)[r]));
        csv::append_row(out, row);
    }
    return out;
}

inline std::string ranking(const SdiRanking& r, Format format) {
    if (format == Format::json) {
        nlohmann::json entries = nlohmann::json::array();
        for (std::size_t i = 0; i < r.entries.size(); ++i)
            entries.push_back({{"rank", i + 1},
                               {"entity_id", r.entries[i].entity_id},
                               {"entity_name", r.entries[i].entity_name},
                               {"sdi", r.entries[i].sdi}});
        std::vector<std::size_t> comps;
        for (std::size_t c : r.components_used) comps.push_back(c + 1);
        return dump({{"query_id", r.query_id}, {"components", comps}, {"entries", entries}});
    }
    std::string out;
    csv::append_row(out, {"rank", "entity_id", "entity_name", "sdi"});
    for (std::size_t i = 0; i < r.entries.size(); ++i)
        csv::append_row(out, {std::to_string(i + 1), r.entries[i].entity_id, r.entries[i].entity_name,
                              csv::format_double(r.entries[i].sdi)});
    return out;
}

inline std::string regression(const RegressionFit& fit, Format format) {
    if (format == Format::json) return dump(regression_to_json(fit));
    std::string out;
    csv::append_row(out, {"term", "coefficient", "std_error", "t_value", "p_value"});
    for (std::size_t c = 0; c < fit.coefficients.size(); ++c)
        csv::append_row(out, {fit.term_names[c], csv::format_double(fit.coefficients[c]),
                              csv::format_double(fit.std_errors[c]), csv::format_double(fit.t_values[c]),
                              csv::format_double(fit.p_values[c])});
    return out;
}

}  // namespace trackpca::report
