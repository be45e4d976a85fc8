#pragma once

// Raw per-player statistic tables: CSV parsing, record/column filtering and
// assembly into a clean numeric StatTable.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <regex>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include <json.hpp>

#include "trackpca/csv.hpp"
#include "trackpca/errors.hpp"
#include "trackpca/matrix.hpp"

namespace trackpca {

/// Team code of the combined record for a player who appeared for several teams.
inline constexpr std::string_view kCombinedTeamCode = "TOT";

struct StatCell {
    std::string name;
    std::optional<double> value;  // nullopt marks a missing or unparseable cell

    friend bool operator==(const StatCell&, const StatCell&) = default;
};

struct RawRecord {
    std::string player_id;
    std::string player_name;
    std::string team_code;
    std::uint32_t games_played = 0;
    double minutes_total = 0.0;
    std::vector<StatCell> stats;  // input column order

    const StatCell* find(std::string_view stat) const {
        for (const auto& c : stats)
            if (c.name == stat) return &c;
        return nullptr;
    }

    friend bool operator==(const RawRecord&, const RawRecord&) = default;
};

/// Which header columns carry record metadata. Every other column is a statistic.
/// When `id_column` is absent from the header the player name doubles as the id.
struct CsvSchema {
    std::string id_column = "player_id";
    std::string name_column = "name";
    std::string team_column = "team";
    std::string games_column = "gp";
    std::string minutes_column = "min";
};

enum class ColumnMode { rate_only, all };

struct FilterPolicy {
    std::uint32_t min_games = 41;
    ColumnMode column_mode = ColumnMode::rate_only;
    /// ECMAScript regular expressions, matched case-insensitively anywhere in a
    /// column name. Defaults catch "season" totals and per-game ("_pg") columns.
    std::vector<std::string> excluded_column_patterns = {
        R"((^|[_ ])season([_ ]|$))",
        R"((^|[_ ])(pg|per_game|per game)$)",
    };
};

struct StatTable {
    std::vector<std::string> entity_ids;
    std::vector<std::string> entity_names;
    std::vector<std::string> team_codes;
    std::vector<std::uint32_t> games_played;
    std::vector<double> minutes;
    std::vector<std::string> stat_names;
    Matrix values;  // entities x statistics

    std::size_t size() const noexcept { return entity_ids.size(); }
    std::size_t stat_count() const noexcept { return stat_names.size(); }

    /// Copy restricted to `names`, in that order.
    StatTable select(const std::vector<std::string>& names) const {
        std::vector<std::size_t> idx;
        std::vector<std::string> missing;
        for (const auto& n : names) {
            auto it = std::find(stat_names.begin(), stat_names.end(), n);
            if (it == stat_names.end())
                missing.push_back(n);
            else
                idx.push_back(static_cast<std::size_t>(it - stat_names.begin()));
        }
        if (!missing.empty()) {
            std::string msg = "table lacks statistics:";
            for (const auto& m : missing) msg += " '" + m + "'";
            throw SchemaError(msg);
        }
        StatTable out = *this;
        out.stat_names = names;
        out.values = Matrix(size(), idx.size());
        for (std::size_t i = 0; i < size(); ++i)
            for (std::size_t j = 0; j < idx.size(); ++j) out.values(i, j) = values(i, idx[j]);
        return out;
    }
};

namespace detail {

inline std::string line_prefix(std::size_t line) { return "line " + std::to_string(line) + ": "; }

inline std::uint32_t parse_count(std::string_view cell, std::size_t line, std::string_view column) {
    double v = 0.0;
    if (!csv::parse_double(cell, v) || v < 0 || v != std::floor(v) || v > 4294967295.0)
        throw ParseError(line_prefix(line) + "column '" + std::string(column) +
                         "' is not a nonnegative integer: '" + std::string(cell) + "'");
    return static_cast<std::uint32_t>(v);
}

inline double parse_minutes(std::string_view cell, std::size_t line, std::string_view column) {
    double v = 0.0;
    if (!csv::parse_double(cell, v) || v < 0)
        throw ParseError(line_prefix(line) + "column '" + std::string(column) +
                         "' is not a nonnegative number: '" + std::string(cell) + "'");
    return v;
}

}  // namespace detail

/// One RawRecord per data row. Statistic cells that do not parse as finite
/// numbers become missing markers; metadata cells must be well formed.
inline std::vector<RawRecord> parse_csv(std::string_view source, const CsvSchema& schema = {}) {
    const csv::Document doc = csv::parse(source);

    auto require = [&](const std::string& col) {
        const std::size_t j = doc.column_index(col);
        if (j == csv::Document::npos) throw SchemaError("required column '" + col + "' not in header");
        return j;
    };
    const std::size_t name_col = require(schema.name_column);
    const std::size_t team_col = require(schema.team_column);
    const std::size_t games_col = require(schema.games_column);
    const std::size_t minutes_col = require(schema.minutes_column);
    const std::size_t id_col = doc.column_index(schema.id_column);

    std::vector<std::size_t> stat_cols;
    for (std::size_t j = 0; j < doc.header.size(); ++j)
        if (j != name_col && j != team_col && j != games_col && j != minutes_col && j != id_col)
            stat_cols.push_back(j);

    std::vector<RawRecord> records;
    records.reserve(doc.rows.size());
    for (const auto& row : doc.rows) {
        const auto& f = row.fields;
        RawRecord r;
        r.player_name = std::string(csv::trim(f[name_col]));
        r.player_id = id_col == csv::Document::npos ? r.player_name : std::string(csv::trim(f[id_col]));
        r.team_code = std::string(csv::trim(f[team_col]));
        r.games_played = detail::parse_count(f[games_col], row.line, schema.games_column);
        r.minutes_total = detail::parse_minutes(f[minutes_col], row.line, schema.minutes_column);
        if (r.player_id.empty()) throw ParseError(detail::line_prefix(row.line) + "empty player id");
        r.stats.reserve(stat_cols.size());
        for (std::size_t j : stat_cols) {
            double v = 0.0;
            StatCell cell{doc.header[j], std::nullopt};
            if (csv::parse_double(f[j], v)) cell.value = v;
            r.stats.push_back(std::move(cell));
        }
        records.push_back(std::move(r));
    }
    return records;
}

inline bool column_excluded(std::string_view name, const FilterPolicy& policy) {
    if (policy.column_mode == ColumnMode::all) return false;
    for (const auto& pattern : policy.excluded_column_patterns) {
        const std::regex re(pattern, std::regex::ECMAScript | std::regex::icase);
        if (std::regex_search(name.begin(), name.end(), re)) return true;
    }
    return false;
}

/// Keeps the combined record for multi-team players, drops players below the
/// game threshold, and (in rate-only mode) drops columns matching the excluded
/// patterns. Record order is preserved.
inline std::vector<RawRecord> apply_filter(const std::vector<RawRecord>& records, const FilterPolicy& policy) {
    std::unordered_set<std::string> has_combined;
    for (const auto& r : records)
        if (r.team_code == kCombinedTeamCode) has_combined.insert(r.player_id);

    for (const auto& pattern : policy.excluded_column_patterns) {
        try {
            std::regex re(pattern, std::regex::ECMAScript);
        } catch (const std::regex_error&) {
            throw ParameterError("invalid column pattern '" + pattern + "'");
        }
    }

    std::map<std::string, bool, std::less<>> exclusion_cache;
    auto excluded = [&](const std::string& name) {
        auto it = exclusion_cache.find(name);
        if (it == exclusion_cache.end()) it = exclusion_cache.emplace(name, column_excluded(name, policy)).first;
        return it->second;
    };

    std::vector<RawRecord> out;
    for (const auto& r : records) {
        if (has_combined.contains(r.player_id) && r.team_code != kCombinedTeamCode) continue;
        if (r.games_played < policy.min_games) continue;
        RawRecord kept = r;
        std::erase_if(kept.stats, [&](const StatCell& c) { return excluded(c.name); });
        out.push_back(std::move(kept));
    }
    return out;
}

/// Assembles the numeric table. Missing cells are rejected, never imputed.
inline StatTable build_table(const std::vector<RawRecord>& records) {
    if (records.size() < 2)
        throw ValidationError("at least 2 records are required, got " + std::to_string(records.size()));

    StatTable t;
    for (const auto& c : records.front().stats) t.stat_names.push_back(c.name);
    if (t.stat_names.empty()) throw ValidationError("no statistic columns remain");

    const std::size_t n = records.size();
    const std::size_t p = t.stat_names.size();
    t.values = Matrix(n, p);

    std::unordered_set<std::string> ids;
    std::vector<std::string> missing;
    for (std::size_t i = 0; i < n; ++i) {
        const RawRecord& r = records[i];
        bool same_columns = r.stats.size() == p;
        for (std::size_t j = 0; same_columns && j < p; ++j) same_columns = r.stats[j].name == t.stat_names[j];
        if (!same_columns)
            throw SchemaError("record '" + r.player_id + "' has a different statistic set than '" +
                              records.front().player_id + "'");
        if (!ids.insert(r.player_id).second) throw ValidationError("duplicate entity id '" + r.player_id + "'");

        for (std::size_t j = 0; j < p; ++j) {
            if (r.stats[j].value)
                t.values(i, j) = *r.stats[j].value;
            else
                missing.push_back("(" + r.player_id + ", " + t.stat_names[j] + ")");
        }
        t.entity_ids.push_back(r.player_id);
        t.entity_names.push_back(r.player_name);
        t.team_codes.push_back(r.team_code);
        t.games_played.push_back(r.games_played);
        t.minutes.push_back(r.minutes_total);
    }
    if (!missing.empty()) {
        std::string msg = std::to_string(missing.size()) + " missing value(s):";
        for (const auto& m : missing) msg += " " + m;
        throw ValidationError(msg);
    }
    return t;
}

/// Writes a table in the layout parse_csv reads with the default schema.
inline std::string table_to_csv(const StatTable& t, const CsvSchema& schema = {}) {
    std::string out;
    std::vector<std::string> header = {schema.id_column, schema.name_column, schema.team_column,
                                       schema.games_column, schema.minutes_column};
    header.insert(header.end(), t.stat_names.begin(), t.stat_names.end());
    csv::append_row(out, header);
    for (std::size_t i = 0; i < t.size(); ++i) {
        std::vector<std::string> row = {t.entity_ids[i], t.entity_names[i], t.team_codes[i],
                                        std::to_string(t.games_played[i]), csv::format_double(t.minutes[i])};
        for (double v : t.values.row(i)) row.push_back(csv::format_double(v));
        csv::append_row(out, row);
    }
    return out;
}

inline FilterPolicy filter_policy_from_json(const nlohmann::json& j) {
    FilterPolicy policy;
    if (!j.is_object()) throw SchemaError("filter policy must be a JSON object");
    if (j.contains("min_games")) {
        const auto& v = j.at("min_games");
        if (!v.is_number_integer() || v.get<long long>() < 0)
            throw SchemaError("min_games must be a nonnegative integer");
        policy.min_games = v.get<std::uint32_t>();
    }
    if (j.contains("column_mode")) {
        const auto mode = j.at("column_mode").get<std::string>();
        if (mode == "rate-only")
            policy.column_mode = ColumnMode::rate_only;
        else if (mode == "all")
            policy.column_mode = ColumnMode::all;
        else
            throw SchemaError("column_mode must be 'rate-only' or 'all', got '" + mode + "'");
    }
    if (j.contains("excluded_column_patterns"))
        policy.excluded_column_patterns = j.at("excluded_column_patterns").get<std::vector<std::string>>();
    return policy;
}

inline FilterPolicy load_filter_policy(const std::string& path) {
    try {
        return filter_policy_from_json(nlohmann::json::parse(csv::read_file(path)));
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError("'" + path + "': " + e.what());
    }
}

}  // namespace trackpca
