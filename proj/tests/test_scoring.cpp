#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "test_support.hpp"
#include "trackpca/scoring.hpp"

namespace trackpca {
namespace {

ScoreSet score_set(std::vector<std::string> ids, std::vector<double> minutes, const Matrix& scores) {
    ScoreSet s;
    s.entity_names = ids;
    s.entity_ids = std::move(ids);
    s.minutes = std::move(minutes);
    s.scores = scores;
    return s;
}

TEST(TeamScores, MinutesWeightedAverage) {
    const ScoreSet s = score_set({"a", "b"}, {100, 300}, Matrix{{1.0}, {2.0}});
    const TeamScoreSet t = team_scores(s, {{"a", "BOS"}, {"b", "BOS"}});
    ASSERT_EQ(t.size(), 1u);
    EXPECT_EQ(t.scores(0, 0), 1.75);
    EXPECT_EQ(t.total_minutes[0], 400.0);
}

TEST(TeamScores, SinglePlayerTeamCopiesScores) {
    const ScoreSet s = score_set({"a", "b"}, {100, 300}, Matrix{{1.5, -2.0, 0.25}, {2.0, 3.0, 4.0}});
    const TeamScoreSet t = team_scores(s, {{"a", "BOS"}, {"b", "NYK"}});
    EXPECT_EQ(t.team_codes, (std::vector<std::string>{"BOS", "NYK"}));
    for (std::size_t c = 0; c < 3; ++c) EXPECT_EQ(t.scores(0, c), s.scores(0, c));
}

TEST(TeamScores, EqualMinutesGiveUnweightedMean) {
    const ScoreSet s = score_set({"a", "b", "c"}, {500, 500, 500}, Matrix{{1.0}, {2.0}, {6.0}});
    const TeamScoreSet t = team_scores(s, {{"a", "X"}, {"b", "X"}, {"c", "X"}});
    EXPECT_NEAR(t.scores(0, 0), 3.0, 1e-15);
}

TEST(TeamScores, ZeroMinuteTeamIsAggregationError) {
    const ScoreSet s = score_set({"a", "b"}, {0, 300}, Matrix{{1.0}, {2.0}});
    try {
        team_scores(s, {{"a", "BOS"}, {"b", "NYK"}});
        FAIL();
    } catch (const AggregationError& e) {
        EXPECT_NE(std::string(e.what()).find("'BOS'"), std::string::npos);
    }
}

TEST(TeamScores, PlayersWithoutTeamAreReportedAndExcluded) {
    const ScoreSet s = score_set({"a", "b", "c"}, {100, 100, 100}, Matrix{{1.0}, {2.0}, {100.0}});
    const TeamScoreSet t = team_scores(s, {{"a", "X"}, {"b", "X"}, {"ghost", "X"}});
    EXPECT_EQ(t.unassigned_players, std::vector<std::string>{"c"});
    EXPECT_EQ(t.scores(0, 0), 1.5);
}

// Random rosters: team scores stay inside member extremes, are unchanged when a
// player is split into two halves, and ignore member order.
TEST(TeamScores, ConvexSplitAndPermutationInvariant) {
    std::mt19937_64 rng(31);
    std::normal_distribution<double> g(0.0, 1.5);
    std::uniform_real_distribution<double> mins(1.0, 3000.0);
    std::uniform_int_distribution<int> size(1, 12);
    for (int trial = 0; trial < 100; ++trial) {
        const int n = size(rng);
        std::vector<std::string> ids;
        std::vector<double> minutes;
        Matrix scores(n, 4);
        Membership m;
        for (int i = 0; i < n; ++i) {
            ids.push_back("p" + std::to_string(i));
            minutes.push_back(mins(rng));
            for (int c = 0; c < 4; ++c) scores(i, c) = g(rng);
            m[ids.back()] = "T";
        }
        const TeamScoreSet t = team_scores(score_set(ids, minutes, scores), m);
        for (int c = 0; c < 4; ++c) {
            const auto col = scores.column(c);
            EXPECT_GE(t.scores(0, c), *std::min_element(col.begin(), col.end()) - 1e-12);
            EXPECT_LE(t.scores(0, c), *std::max_element(col.begin(), col.end()) + 1e-12);
        }

        // Split player 0 into two rows with half the minutes each.
        std::vector<std::string> ids2 = ids;
        std::vector<double> minutes2 = minutes;
        Matrix scores2(n + 1, 4);
        for (int i = 0; i < n; ++i)
            for (int c = 0; c < 4; ++c) scores2(i, c) = scores(i, c);
        for (int c = 0; c < 4; ++c) scores2(n, c) = scores(0, c);
        minutes2[0] /= 2;
        minutes2.push_back(minutes[0] / 2);
        ids2.push_back("p0_split");
        Membership m2 = m;
        m2["p0_split"] = "T";
        const TeamScoreSet split = team_scores(score_set(ids2, minutes2, scores2), m2);
        for (int c = 0; c < 4; ++c) EXPECT_NEAR(split.scores(0, c), t.scores(0, c), 1e-12);

        // Reverse member order.
        std::vector<std::string> ids3(ids.rbegin(), ids.rend());
        std::vector<double> minutes3(minutes.rbegin(), minutes.rend());
        Matrix scores3(n, 4);
        for (int i = 0; i < n; ++i)
            for (int c = 0; c < 4; ++c) scores3(i, c) = scores(n - 1 - i, c);
        const TeamScoreSet rev = team_scores(score_set(ids3, minutes3, scores3), m);
        for (int c = 0; c < 4; ++c) EXPECT_NEAR(rev.scores(0, c), t.scores(0, c), 1e-12);
    }
}

TeamScoreSet four_component_team(double pc1, double pc2, double pc3, double pc4) {
    TeamScoreSet t;
    t.team_codes = {"T"};
    t.scores = Matrix{{pc1, pc2, pc3, pc4}};
    t.total_minutes = {1.0};
    return t;
}

TEST(RegressionWeightedScore, HandEvaluatedCombination) {
    const auto v = regression_weighted_score(four_component_team(9.0, 1.0, -4.0, 2.0), {{1, 0.17}, {3, 0.09}});
    EXPECT_NEAR(v[0], 0.35, 1e-15);
}

TEST(RegressionWeightedScore, EmptyWeightsAndIdentity) {
    const TeamScoreSet t = four_component_team(1.25, 1.0, -4.0, 2.0);
    EXPECT_EQ(regression_weighted_score(t, {}), std::vector<double>{0.0});
    EXPECT_EQ(regression_weighted_score(t, {{0, 1.0}}), std::vector<double>{1.25});
    EXPECT_THROW(regression_weighted_score(t, {{4, 1.0}}), ParameterError);
}

TEST(TeamCsv, MembershipAndWinPctLoaders) {
    const Membership m = parse_membership("player_id,team_code\np1,BOS\np2,NYK\n");
    EXPECT_EQ(m.at("p2"), "NYK");
    EXPECT_THROW(parse_membership("player_id,team_code\np1,BOS\np1,NYK\n"), ValidationError);
    EXPECT_THROW(parse_membership("a,b,c\n1,2,3\n"), SchemaError);

    const auto w = parse_win_pct("team_code,win_pct\nBOS,0.305\nSAS,0.756\n");
    EXPECT_EQ(w.at("SAS"), 0.756);
    EXPECT_THROW(parse_win_pct("team_code,win_pct\nBOS,1.2\n"), ParseError);

    TeamScoreSet t = four_component_team(0, 0, 0, 0);
    t.team_codes = {"BOS"};
    attach_win_pct(t, w);
    EXPECT_EQ(t.win_pct->front(), 0.305);
    t.team_codes = {"LAL"};
    EXPECT_THROW(attach_win_pct(t, w), LookupError);
}

}  // namespace
}  // namespace trackpca
