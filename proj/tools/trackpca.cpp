// trackpca: principal component profiles of per-player tracking statistics.
//
//   trackpca fit     --input players.csv [--k 4] [--min-games 41] --out DIR
//   trackpca scree   --model DIR/model.json --out DIR
//   trackpca scores  --model M --input players.csv --out DIR
//   trackpca teams   --model M --input players.csv [--membership m.csv] [--winpct w.csv] [--weights 2:0.17,4:0.09]
//   trackpca similar --model M --input players.csv --query ID [--top 5] [--components 1,2,3,4]
//   trackpca regress --model M --input players.csv --winpct w.csv [--membership m.csv] [--components 1,2,3,4]
//
// Component numbers on the command line are 1-based. Exit status: 0 success,
// 2 usage error, 3 data/validation error, 4 numerical error.

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "trackpca/trackpca.hpp"

namespace fs = std::filesystem;
using namespace trackpca;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitNumerical = 4;

struct Options {
    std::string input;
    std::string model;
    std::string membership;
    std::string winpct;
    std::string weights;
    std::string components = "1,2,3,4";
    std::string query;
    std::string out = ".";
    std::string format = "csv";
    std::string config;
    std::size_t top = 5;
    std::size_t k = 4;
    std::uint32_t min_games = 41;
    bool components_given = false;
};

void report_error(const std::string& kind, const std::string& message) {
    std::cerr << nlohmann::json{{"error", kind}, {"message", message}}.dump() << "\n";
}

void report_warning(const std::string& message) {
    std::cerr << nlohmann::json{{"warning", message}}.dump() << "\n";
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            parts.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    parts.push_back(cur);
    return parts;
}

std::size_t parse_component_number(const std::string& text) {
    double v = 0.0;
    if (!csv::parse_double(text, v) || v < 1 || v != static_cast<double>(static_cast<std::size_t>(v)))
        throw ParameterError("component numbers are 1-based integers, got '" + text + "'");
    return static_cast<std::size_t>(v) - 1;
}

ComponentSet parse_components(const std::string& text) {
    std::vector<std::size_t> ids;
    for (const auto& part : split(text, ',')) ids.push_back(parse_component_number(std::string(csv::trim(part))));
    return ComponentSet(std::move(ids));
}

std::map<std::size_t, double> parse_weights(const std::string& text) {
    std::map<std::size_t, double> weights;
    if (csv::trim(text).empty()) return weights;
    for (const auto& part : split(text, ',')) {
        const auto kv = split(part, ':');
        double w = 0.0;
        if (kv.size() != 2 || !csv::parse_double(kv[1], w))
            throw ParameterError("weights look like '2:0.17,4:0.09', got '" + part + "'");
        weights[parse_component_number(std::string(csv::trim(kv[0])))] = w;
    }
    return weights;
}

report::Format parse_format(const std::string& f) {
    if (f == "csv") return report::Format::csv;
    if (f == "json") return report::Format::json;
    throw ParameterError("format must be csv or json, got '" + f + "'");
}

std::string extension(report::Format f) { return f == report::Format::json ? ".json" : ".csv"; }

/// Fills options the command line left unset from a JSON config object.
void merge_config(const nlohmann::json& cfg, CLI::App& sub, Options& o) {
    auto unset = [&](const std::string& flag) {
        const CLI::Option* opt = sub.get_option_no_throw("--" + flag);
        return opt == nullptr || opt->count() == 0;
    };
    auto lookup = [&](const std::string& key) -> const nlohmann::json* {
        if (cfg.contains(key)) return &cfg.at(key);
        std::string dashed = key;
        std::replace(dashed.begin(), dashed.end(), '_', '-');
        if (cfg.contains(dashed)) return &cfg.at(dashed);
        return nullptr;
    };
    auto take_string = [&](const std::string& key, std::string& dst) {
        const auto* v = lookup(key);
        std::string flag = key;
        std::replace(flag.begin(), flag.end(), '_', '-');
        if (v && unset(flag)) dst = v->get<std::string>();
    };
    take_string("input", o.input);
    take_string("model", o.model);
    take_string("membership", o.membership);
    take_string("winpct", o.winpct);
    take_string("query", o.query);
    take_string("out", o.out);
    take_string("format", o.format);

    if (const auto* v = lookup("top"); v && unset("top")) o.top = v->get<std::size_t>();
    if (const auto* v = lookup("k"); v && unset("k")) o.k = v->get<std::size_t>();
    if (const auto* v = lookup("min_games"); v && unset("min-games")) o.min_games = v->get<std::uint32_t>();
    if (const auto* v = lookup("components"); v && unset("components")) {
        o.components_given = true;
        if (v->is_string()) {
            o.components = v->get<std::string>();
        } else {
            std::string s;
            for (const auto& c : *v) s += (s.empty() ? "" : ",") + std::to_string(c.get<long long>());
            o.components = s;
        }
    }
    if (const auto* v = lookup("weights"); v && unset("weights")) {
        if (v->is_string()) {
            o.weights = v->get<std::string>();
        } else {
            std::string s;
            for (const auto& [key, w] : v->items()) s += (s.empty() ? "" : ",") + key + ":" + csv::format_double(w.get<double>());
            o.weights = s;
        }
    }
}

class Runner {
public:
    Runner(Options o, FilterPolicy policy) : o_(std::move(o)), policy_(std::move(policy)), format_(parse_format(o_.format)) {}

    int fit() {
        const StatTable table = load_players(require(o_.input, "input"), policy_);
        PcaOptions options;
        options.k = o_.k;
        options.constant_columns = ConstantColumns::remove;
        if (o_.k < 1 || o_.k > table.stat_count())
            throw ParameterError("k = " + std::to_string(o_.k) + " must lie in [1, " + std::to_string(table.stat_count()) + "]");
        const PcaFit result = trackpca::fit(table, options);
        for (const auto& col : result.removed_columns) report_warning("removed constant column '" + col + "'");

        prepare_out();
        const std::string model_path = o_.model.empty() ? path("model.json") : o_.model;
        save_model(result.model, model_path);
        written(model_path);
        write("scree" + extension(format_), report::scree(trackpca::scree(result.model), format_));
        write("loadings" + extension(format_), report::loadings(result.model, format_));
        return 0;
    }

    int scree() {
        const PcaModel model = load_model(require(o_.model, "model"));
        prepare_out();
        write("scree" + extension(format_), report::scree(trackpca::scree(model), format_));
        return 0;
    }

    int scores() {
        const PcaModel model = load_model(require(o_.model, "model"));
        const ScoreSet s = score_table(model, load_players(require(o_.input, "input"), policy_));
        prepare_out();
        write("scores" + extension(format_), report::scores(s, format_));
        return 0;
    }

    int teams() {
        const PcaModel model = load_model(require(o_.model, "model"));
        TeamScoreSet t = team_table(model);
        if (!o_.winpct.empty()) attach_win_pct(t, parse_win_pct(csv::read_file(o_.winpct)));
        std::optional<std::vector<double>> weighted;
        if (!o_.weights.empty()) weighted = regression_weighted_score(t, parse_weights(o_.weights));
        prepare_out();
        write("teams" + extension(format_), report::teams(t, weighted, format_));
        return 0;
    }

    int similar() {
        const PcaModel model = load_model(require(o_.model, "model"));
        const ScoreSet s = score_table(model, load_players(require(o_.input, "input"), policy_));
        const SdiRanking r = rank_similar(s, require(o_.query, "query"), o_.top, parse_components(o_.components));
        prepare_out();
        write("similar" + extension(format_), report::ranking(r, format_));
        return 0;
    }

    int regress() {
        const PcaModel model = load_model(require(o_.model, "model"));
        TeamScoreSet t = team_table(model);
        attach_win_pct(t, parse_win_pct(csv::read_file(require(o_.winpct, "winpct"))));
        const ComponentSet comps = components_for(model);
        std::vector<std::string> names;
        for (std::size_t c : comps) names.push_back("PC " + std::to_string(c + 1) + " Score");
        const RegressionFit f = fit_ols(team_design(t, comps), *t.win_pct, true, names);
        for (const auto& w : f.warnings) report_warning(w);

        prepare_out();
        const std::string table = regression_summary_table(f);
        std::cout << table;
        write("regression.txt", table);
        write("regression" + extension(format_), report::regression(f, format_));
        return 0;
    }

private:
    static const std::string& require(const std::string& value, const std::string& flag) {
        if (value.empty()) throw ParameterError("--" + flag + " is required");
        return value;
    }

    TeamScoreSet team_table(const PcaModel& model) {
        const StatTable table = load_players(require(o_.input, "input"), policy_);
        const ScoreSet s = score_table(model, table);
        const Membership m = o_.membership.empty() ? membership_from_table(table) : parse_membership(csv::read_file(o_.membership));
        TeamScoreSet t = team_scores(s, m);
        if (!t.unassigned_players.empty())
            report_warning(std::to_string(t.unassigned_players.size()) + " player(s) without a team were left out");
        if (t.size() == 0) throw AggregationError("no player could be assigned to a team");
        return t;
    }

    /// Regression predictors: --components when given explicitly, else all k.
    ComponentSet components_for(const PcaModel& model) const {
        if (o_.components_given) return parse_components(o_.components);
        return ComponentSet::leading(model.k());
    }

    void prepare_out() const {
        std::error_code ec;
        fs::create_directories(o_.out, ec);
        if (ec) throw IoError("cannot create output directory '" + o_.out + "': " + ec.message());
    }

    std::string path(const std::string& name) const { return (fs::path(o_.out) / name).string(); }

    void write(const std::string& name, const std::string& content) const {
        const std::string p = path(name);
        csv::write_file(p, content);
        written(p);
    }

    static void written(const std::string& p) { std::cerr << nlohmann::json{{"wrote", p}}.dump() << "\n"; }

    Options o_;
    FilterPolicy policy_;
    report::Format format_;
};

void add_flags(CLI::App& sub, Options& o) {
    sub.add_option("--input", o.input, "players CSV");
    sub.add_option("--model", o.model, "model JSON (output path for fit, input otherwise)");
    sub.add_option("--min-games", o.min_games, "minimum games played (default 41)");
    sub.add_option("--k", o.k, "number of components to keep (default 4)");
    sub.add_option("--components", o.components, "1-based component list, e.g. 1,2,3,4");
    sub.add_option("--top", o.top, "number of similar entities (default 5)");
    sub.add_option("--query", o.query, "entity id to compare against");
    sub.add_option("--membership", o.membership, "CSV of player_id,team_code");
    sub.add_option("--winpct", o.winpct, "CSV of team_code,win_pct");
    sub.add_option("--weights", o.weights, "component weights, e.g. 2:0.17,4:0.09");
    sub.add_option("--out", o.out, "output directory (default .)");
    sub.add_option("--format", o.format, "csv or json (default csv)");
    sub.add_option("--config", o.config, "JSON file supplying any of the flags above");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Principal component profiles of player tracking statistics"};
    app.require_subcommand(1);
    Options o;

    const std::vector<std::pair<std::string, std::string>> commands = {
        {"fit", "standardize, fit components, write model, scree and loadings"},
        {"scree", "write scree data from a model"},
        {"scores", "write player component scores"},
        {"teams", "write minutes-weighted team scores"},
        {"similar", "rank players by statistical diversity index"},
        {"regress", "regress team win percentage on team scores"},
    };
    std::map<std::string, CLI::App*> subs;
    for (const auto& [name, help] : commands) {
        subs[name] = app.add_subcommand(name, help);
        add_flags(*subs[name], o);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        report_error("usage_error", e.what());
        return kExitUsage;
    }

    try {
        CLI::App* sub = app.get_subcommands().front();
        o.components_given = sub->get_option("--components")->count() > 0;
        FilterPolicy policy;
        if (!o.config.empty()) {
            try {
                const auto cfg = nlohmann::json::parse(csv::read_file(o.config));
                merge_config(cfg, *sub, o);
                policy = filter_policy_from_json(cfg);
            } catch (const nlohmann::json::exception& e) {
                throw SchemaError("config '" + o.config + "': " + e.what());
            }
        }
        policy.min_games = o.min_games;  // command line, then config, then default

        Runner runner(o, policy);
        const std::string& name = sub->get_name();
        if (name == "fit") return runner.fit();
        if (name == "scree") return runner.scree();
        if (name == "scores") return runner.scores();
        if (name == "teams") return runner.teams();
        if (name == "similar") return runner.similar();
        return runner.regress();
    } catch (const Error& e) {
        report_error(e.kind(), e.what());
        switch (e.category()) {
        case ErrorCategory::usage: return kExitUsage;
        case ErrorCategory::data: return kExitData;
        case ErrorCategory::numerical: return kExitNumerical;
        }
        return kExitData;
    } catch (const std::exception& e) {
        report_error("error", e.what());
        return kExitData;
    }
}
