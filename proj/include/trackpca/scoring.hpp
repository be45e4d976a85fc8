#pragma once

// Team-level aggregation of player component scores.

#include <algorithm>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "trackpca/csv.hpp"
#include "trackpca/errors.hpp"
#include "trackpca/matrix.hpp"
#include "trackpca/pca.hpp"

namespace trackpca {

using Membership = std::map<std::string, std::string>;  // player id -> team code

struct TeamScoreSet {
    std::vector<std::string> team_codes;  // sorted
    Matrix scores;                        // teams x components
    std::vector<double> total_minutes;
    std::optional<std::vector<double>> win_pct;
    /// Scored players that had no membership entry; they do not contribute.
    std::vector<std::string> unassigned_players;

    std::size_t size() const noexcept { return team_codes.size(); }
};

/// Minutes-weighted average of member scores for every team:
/// t_k(team) = sum_i m_i t_k(i) / sum_i m_i. Membership entries for players
/// absent from `players` (for example, removed by the game filter) are ignored.
inline TeamScoreSet team_scores(const ScoreSet& players, const Membership& membership) {
    const std::size_t k = players.scores.cols();
    std::map<std::string, std::vector<std::size_t>> members;
    TeamScoreSet out;
    for (std::size_t i = 0; i < players.size(); ++i) {
        auto it = membership.find(players.entity_ids[i]);
        if (it == membership.end())
            out.unassigned_players.push_back(players.entity_ids[i]);
        else
            members[it->second].push_back(i);
    }

    out.scores = Matrix(members.size(), k);
    std::size_t t = 0;
    for (const auto& [team, rows] : members) {
        double total = 0.0;
        for (std::size_t i : rows) {
            if (players.minutes[i] < 0) throw AggregationError("negative minutes for '" + players.entity_ids[i] + "'");
            total += players.minutes[i];
        }
        if (!(total > 0)) throw AggregationError("team '" + team + "' has zero total minutes");
        for (std::size_t c = 0; c < k; ++c) {
            double s = 0.0;
            for (std::size_t i : rows) s += players.minutes[i] * players.scores(i, c);
            out.scores(t, c) = s / total;
        }
        out.team_codes.push_back(team);
        out.total_minutes.push_back(total);
        ++t;
    }
    return out;
}

/// Attaches win percentages; every team must have one.
inline void attach_win_pct(TeamScoreSet& teams, const std::map<std::string, double>& win_pct) {
    std::vector<double> v;
    for (const auto& team : teams.team_codes) {
        auto it = win_pct.find(team);
        if (it == win_pct.end()) throw LookupError("no win percentage for team '" + team + "'");
        v.push_back(it->second);
    }
    teams.win_pct = std::move(v);
}

/// Per team, sum over weighted components of weight * score (0-based indices).
inline std::vector<double> regression_weighted_score(const TeamScoreSet& teams,
                                                     const std::map<std::size_t, double>& weights) {
    for (const auto& [c, w] : weights)
        if (c >= teams.scores.cols())
            throw ParameterError("weight for component " + std::to_string(c + 1) + " but only " +
                                 std::to_string(teams.scores.cols()) + " components");
    std::vector<double> out(teams.size(), 0.0);
    for (std::size_t t = 0; t < teams.size(); ++t)
        for (const auto& [c, w] : weights) out[t] += w * teams.scores(t, c);
    return out;
}

namespace detail {

inline csv::Document two_column_csv(const std::string& text, const std::string& what) {
    csv::Document doc = csv::parse(text);
    if (doc.header.size() != 2) throw SchemaError(what + " CSV must have exactly two columns");
    return doc;
}

}  // namespace detail

/// Two-column CSV (player_id, team_code) with a header row.
inline Membership parse_membership(const std::string& text) {
    const auto doc = detail::two_column_csv(text, "membership");
    Membership m;
    for (const auto& r : doc.rows) {
        const std::string player(csv::trim(r.fields[0]));
        const std::string team(csv::trim(r.fields[1]));
        if (player.empty() || team.empty())
            throw ParseError("line " + std::to_string(r.line) + ": empty membership field");
        if (!m.emplace(player, team).second)
            throw ValidationError("line " + std::to_string(r.line) + ": player '" + player + "' listed twice");
    }
    return m;
}

/// Two-column CSV (team_code, win_pct) with a header row; values in [0, 1].
inline std::map<std::string, double> parse_win_pct(const std::string& text) {
    const auto doc = detail::two_column_csv(text, "win percentage");
    std::map<std::string, double> m;
    for (const auto& r : doc.rows) {
        double v = 0.0;
        if (!csv::parse_double(r.fields[1], v) || v < 0 || v > 1)
            throw ParseError("line " + std::to_string(r.line) + ": win_pct must be a number in [0, 1]");
        const std::string team(csv::trim(r.fields[0]));
        if (!m.emplace(team, v).second)
            throw ValidationError("line " + std::to_string(r.line) + ": team '" + team + "' listed twice");
    }
    return m;
}

}  // namespace trackpca
