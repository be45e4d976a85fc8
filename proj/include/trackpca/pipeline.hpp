#pragma once

// End-to-end composition used by the command-line tool.

#include <string>

#include "trackpca/ingest.hpp"
#include "trackpca/pca.hpp"
#include "trackpca/scoring.hpp"
#include "trackpca/similarity.hpp"

namespace trackpca {

/// Parse, filter and assemble a players CSV.
inline StatTable load_players(const std::string& path, const FilterPolicy& policy, const CsvSchema& schema = {}) {
    return build_table(apply_filter(parse_csv(csv::read_file(path), schema), policy));
}

/// Scores for `table` after restricting it to the model's statistics.
inline ScoreSet score_table(const PcaModel& model, const StatTable& table) {
    return transform(model, table.select(model.standardization.stat_names));
}

/// Membership taken from each record's own team code. Combined multi-team
/// records ("TOT") have no single team and are left out.
inline Membership membership_from_table(const StatTable& table) {
    Membership m;
    for (std::size_t i = 0; i < table.size(); ++i)
        if (table.team_codes[i] != kCombinedTeamCode) m.emplace(table.entity_ids[i], table.team_codes[i]);
    return m;
}

/// Team score columns for the chosen components, in component order.
inline Matrix team_design(const TeamScoreSet& teams, const ComponentSet& components) {
    check_components(components, teams.scores.cols());
    Matrix x(teams.size(), components.size());
    for (std::size_t t = 0; t < teams.size(); ++t) {
        std::size_t c = 0;
        for (std::size_t k : components) x(t, c++) = teams.scores(t, k);
    }
    return x;
}

}  // namespace trackpca
