// Command-line front end of the exposure engine.
//
// Exit codes: 0 success, 1 validation error (bad input document, bad
// arguments), 2 I/O error.

#include <csignal>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "exposure/clustering.hpp"
#include "exposure/errors.hpp"
#include "exposure/http_server.hpp"
#include "exposure/io.hpp"
#include "exposure/kb_graph.hpp"
#include "exposure/metrics.hpp"
#include "exposure/profile.hpp"
#include "exposure/recommender.hpp"
#include "exposure/reports.hpp"
#include "exposure/scoring.hpp"
#include "exposure/service.hpp"

namespace fs = std::filesystem;
using namespace exposure;
using nlohmann::json;

namespace {

constexpr int kExitValidation = 1;
constexpr int kExitIo = 2;

struct Globals {
    std::string data_dir;
    std::string out;
};

std::optional<fs::path> data_dir(const Globals& g) {
    if (!g.data_dir.empty()) return fs::path(g.data_dir);
    if (const char* env = std::getenv("EXPOSURE_ENGINE_DATA_DIR"); env && *env) return fs::path(env);
    return std::nullopt;
}

void emit(const Globals& g, const std::string& text) {
    if (g.out.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream f(g.out, std::ios::binary);
    if (!f) throw IoError("cannot write '" + g.out + "'");
    f << text;
    if (!f) throw IoError("failed writing '" + g.out + "'");
}

void emit(const Globals& g, const json& j) { emit(g, j.dump(2) + "\n"); }

KnowledgeGraph resolve_kb(const Globals& g, const std::string& kb_file) {
    if (!kb_file.empty()) return load_kb(read_text_file(kb_file));
    if (auto dir = data_dir(g)) return load_kb(read_text_file(*dir / "kb.json"));
    throw IoError("no knowledge base: pass --kb or set --data-dir / EXPOSURE_ENGINE_DATA_DIR");
}

MetricRegistry resolve_registry(const std::string& registry_file) {
    MetricRegistry reg = default_registry();
    if (!registry_file.empty()) reg = apply_registry_overrides(reg, read_text_file(registry_file));
    return reg;
}

ScoringParams resolve_params(const std::string& params_file) {
    return params_file.empty() ? ScoringParams{} : parse_params(read_text_file(params_file));
}

std::pair<std::size_t, std::size_t> parse_k_range(const std::string& text) {
    const auto dots = text.find("..");
    if (dots == std::string::npos) throw SchemaError("--k-range must look like a..b");
    try {
        std::size_t used = 0;
        const std::string a = text.substr(0, dots), b = text.substr(dots + 2);
        const unsigned long lo = std::stoul(a, &used);
        if (used != a.size()) throw SchemaError("bad k range");
        const unsigned long hi = std::stoul(b, &used);
        if (used != b.size()) throw SchemaError("bad k range");
        if (lo < 1 || hi < lo) throw RangeError("--k-range needs 1 <= a <= b");
        return {lo, hi};
    } catch (const std::logic_error&) {
        throw SchemaError("--k-range must look like a..b");
    }
}

HttpServer* g_server = nullptr;

void on_signal(int) {
    if (g_server) g_server->stop();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Cyber exposure likelihood engine"};
    app.require_subcommand(1);
    Globals g;
    app.add_option("--data-dir", g.data_dir, "Data directory (default: $EXPOSURE_ENGINE_DATA_DIR)");
    app.add_option("-o,--out", g.out, "Write output to a file instead of stdout");

    // ingest-kb
    std::string kb_file;
    auto* ingest = app.add_subcommand("ingest-kb", "Validate a knowledge base and store it in the data directory");
    ingest->add_option("file", kb_file, "KB JSON document")->required();

    // validate-kb
    std::string validate_file;
    auto* validate = app.add_subcommand("validate-kb", "Report every integrity issue of a knowledge base");
    validate->add_option("file", validate_file, "KB JSON document")->required();

    // profile score
    auto* profile_cmd = app.add_subcommand("profile", "Profile operations");
    profile_cmd->require_subcommand(1);
    std::string score_profile, params_file, registry_file, score_format = "json";
    auto* score = profile_cmd->add_subcommand("score", "Compute E, T, M, U and the likelihood of a profile");
    score->add_option("profile", score_profile, "Profile JSON document")->required();
    score->add_option("--params", params_file, "Scoring parameter file");
    score->add_option("--registry", registry_file, "Metric registry overrides");
    score->add_option("--format", score_format, "json or csv")->check(CLI::IsMember({"json", "csv"}));

    // recommend
    std::string rec_profile, rec_kb, rec_costs, rec_format = "json";
    auto* rec = app.add_subcommand("recommend", "Rank countermeasures for a profile");
    rec->add_option("profile", rec_profile, "Profile JSON document")->required();
    rec->add_option("--kb", rec_kb, "KB JSON document (default: <data-dir>/kb.json)");
    rec->add_option("--costs", rec_costs, "Control cost file {control: cost}");
    rec->add_option("--registry", registry_file, "Metric registry overrides");
    rec->add_option("--format", rec_format, "json or csv")->check(CLI::IsMember({"json", "csv"}));

    // cluster
    std::string corpus_file, k_range = "1..8", stopword_file, cluster_format = "json";
    std::uint64_t seed = 42;
    std::size_t pca_k = 10;
    auto* cluster = app.add_subcommand("cluster", "Cluster incident descriptions");
    cluster->add_option("corpus", corpus_file, "Corpus JSON document")->required();
    cluster->add_option("--k-range", k_range, "Candidate k values, a..b")->capture_default_str();
    cluster->add_option("--seed", seed, "Random seed")->capture_default_str();
    cluster->add_option("--pca-k", pca_k, "PCA dimensions")->capture_default_str();
    cluster->add_option("--stopwords", stopword_file, "Stop-word file");
    cluster->add_option("--format", cluster_format, "json or table")->check(CLI::IsMember({"json", "table"}));

    // evaluate
    std::string before_file, after_file, eval_format = "json";
    std::uint64_t before_count = 0, after_count = 0;
    auto* evaluate = app.add_subcommand("evaluate", "Compare a profile before and after new controls");
    evaluate->add_option("before", before_file, "Profile before")->required();
    evaluate->add_option("after", after_file, "Profile after")->required();
    evaluate->add_option("--before-count", before_count, "Incidents observed before");
    evaluate->add_option("--after-count", after_count, "Incidents observed after");
    evaluate->add_option("--params", params_file, "Scoring parameter file");
    evaluate->add_option("--registry", registry_file, "Metric registry overrides");
    evaluate->add_option("--format", eval_format, "json or table")->check(CLI::IsMember({"json", "table"}));

    // serve
    int port = 8080;
    std::string host = "127.0.0.1";
    auto* serve = app.add_subcommand("serve", "Serve the HTTP API");
    serve->add_option("--port", port, "TCP port")->capture_default_str();
    serve->add_option("--host", host, "Bind address")->capture_default_str();

    // report
    std::string report_profile, report_format = "json", report_section = "all", report_kb;
    auto* report_cmd = app.add_subcommand("report", "Scores and recommendations for one or more profiles");
    report_cmd->add_option("profile", report_profile, "Profile JSON document (default: every profile in the data dir)");
    report_cmd->add_option("--format", report_format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
    report_cmd->add_option("--section", report_section, "all, metrics or recommendations")
        ->check(CLI::IsMember({"all", "metrics", "recommendations"}));
    report_cmd->add_option("--kb", report_kb, "KB JSON document (default: <data-dir>/kb.json)");
    report_cmd->add_option("--costs", rec_costs, "Control cost file {control: cost}");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitValidation;
    }

    try {
        if (*ingest) {
            const KbDocument doc = parse_kb_document(read_text_file(kb_file));
            const auto found = validate_kb(doc);
            const KnowledgeGraph graph = KnowledgeGraph::from_document(doc);
            json out = report::kb_summary(graph);
            out["issues"] = report::issues(found);
            try {
                out["weights"] = report::weights(control_weights(graph));
            } catch (const EmptyMappingError&) {
                out["weights"] = nullptr;
            }
            if (auto dir = data_dir(g)) {
                fs::create_directories(*dir);
                std::ofstream f(*dir / "kb.json", std::ios::binary);
                if (!f) throw IoError("cannot write " + (*dir / "kb.json").string());
                f << serialize_kb(graph);
                out["stored"] = (*dir / "kb.json").string();
            }
            emit(g, out);
        } else if (*validate) {
            const KbDocument doc = parse_kb_document(read_text_file(validate_file));
            const auto found = validate_kb(doc);
            bool errors = false;
            for (const auto& i : found) errors = errors || i.severity == IssueSeverity::Error;
            emit(g, json{{"valid", !errors}, {"issues", report::issues(found)}});
            return errors ? kExitValidation : 0;
        } else if (*score) {
            const OrgProfile profile = parse_profile(read_text_file(score_profile));
            const MetricRegistry reg = resolve_registry(registry_file);
            const ScoringParams params = resolve_params(params_file);
            if (score_format == "csv") {
                emit(g, report::metrics_csv(compute_variable_scores(profile, reg), reg));
            } else {
                emit(g, report::profile_score(profile, reg, params));
            }
        } else if (*rec) {
            const KnowledgeGraph graph = resolve_kb(g, rec_kb);
            const OrgProfile profile = parse_profile(read_text_file(rec_profile));
            const MetricRegistry reg = resolve_registry(registry_file);
            const VariableScores scores = compute_variable_scores(profile, reg);
            ControlWeightTable weights;
            try {
                weights = control_weights(graph);
            } catch (const EmptyMappingError&) {
            }
            auto recs = recommend(graph, profile, scores, weights);
            if (!rec_costs.empty()) apply_cost_gate(recs, parse_control_costs(read_text_file(rec_costs)), profile.revenue);
            if (rec_format == "csv") {
                emit(g, report::recommendations_csv(recs));
            } else {
                emit(g, json{{"org_id", profile.org_id},
                             {"recommendations", report::recommendations(recs)},
                             {"uncovered_techniques", [&] {
                                  json a = json::array();
                                  for (const auto& t : uncovered_techniques(graph, profile)) a.push_back(t.str());
                                  return a;
                              }()},
                             {"actions", report::metric_actions(metric_actions(scores, reg))}});
            }
        } else if (*cluster) {
            ClusterConfig config;
            std::tie(config.k_min, config.k_max) = parse_k_range(k_range);
            config.seed = seed;
            config.pca_k = pca_k;
            if (!stopword_file.empty()) config.stopwords = parse_stopwords(read_text_file(stopword_file));
            const ClusterReport r = cluster_incidents(parse_corpus(read_text_file(corpus_file)), config);
            if (cluster_format == "table") {
                emit(g, report::cluster_table(r));
            } else {
                emit(g, report::cluster_report(r));
            }
        } else if (*evaluate) {
            StrategySide before{parse_profile(read_text_file(before_file)), before_count};
            StrategySide after{parse_profile(read_text_file(after_file)), after_count};
            const auto e = evaluate_strategy(before, after, resolve_registry(registry_file),
                                             resolve_params(params_file).likelihood);
            const auto rows = report::strategy_rows(e, before.profile, after.profile);
            if (eval_format == "table") {
                std::string text;
                std::string section;
                for (const auto& r : rows) {
                    if (r.section != section) {
                        section = r.section;
                        text += section + "\n";
                    }
                    text += "  " + r.criterion + std::string(r.criterion.size() < 24 ? 24 - r.criterion.size() : 1, ' ') +
                            r.value + "\n";
                }
                text += "Likelihood (raw)        " + report::fixed(e.before.likelihood.raw) + " -> " +
                        report::fixed(e.after.likelihood.raw) + "\n";
                emit(g, text);
            } else {
                json out = report::strategy(e);
                json table = json::array();
                for (const auto& r : rows)
                    table.push_back({{"section", r.section}, {"criterion", r.criterion}, {"value", r.value}});
                out["table"] = table;
                emit(g, out);
            }
        } else if (*serve) {
            const auto dir = data_dir(g);
            if (!dir) throw IoError("serve needs --data-dir or EXPOSURE_ENGINE_DATA_DIR");
            SessionState state(load_snapshot(*dir));
            Api api(state, *dir);
            HttpServer server(api);
            const int bound = server.bind(host, port);
            if (bound < 0) throw IoError("cannot bind " + host + ":" + std::to_string(port));
            g_server = &server;
            std::signal(SIGINT, on_signal);
            std::signal(SIGTERM, on_signal);
            std::cerr << "listening on http://" << host << ":" << bound << "\n";
            server.listen_after_bind();
            g_server = nullptr;
        } else if (*report_cmd) {
            const KnowledgeGraph graph = resolve_kb(g, report_kb);
            std::vector<OrgProfile> profiles;
            if (!report_profile.empty()) {
                profiles.push_back(parse_profile(read_text_file(report_profile)));
            } else if (auto dir = data_dir(g)) {
                const auto snap = load_snapshot(*dir);
                for (const auto& [id, p] : snap->profiles) profiles.push_back(p);
            } else {
                throw IoError("report needs a profile or a data directory");
            }
            std::optional<std::map<NodeId, double>> costs;
            if (!rec_costs.empty()) costs = parse_control_costs(read_text_file(rec_costs));
            ControlWeightTable weights;
            try {
                weights = control_weights(graph);
            } catch (const EmptyMappingError&) {
            }
            const MetricRegistry reg = default_registry();
            std::string csv;
            json all = json::array();
            for (const auto& profile : profiles) {
                const VariableScores scores = compute_variable_scores(profile, reg);
                auto recs = recommend(graph, profile, scores, weights);
                if (costs) apply_cost_gate(recs, *costs, profile.revenue);
                if (report_format == "csv") {
                    if (profiles.size() > 1) csv += "# " + profile.org_id + "\n";
                    if (report_section != "recommendations") csv += report::metrics_csv(scores, reg);
                    if (report_section == "all") csv += "\n";
                    if (report_section != "metrics") csv += report::recommendations_csv(recs);
                } else {
                    json entry = {{"org_id", profile.org_id}};
                    if (report_section != "recommendations") {
                        entry["scores"] = report::scores(scores, reg);
                        entry["likelihood"] = report::likelihood(likelihood(scores));
                        entry["actions"] = report::metric_actions(metric_actions(scores, reg));
                    }
                    if (report_section != "metrics") {
                        entry["recommendations"] = report::recommendations(recs);
                        if (costs) entry["expected_loss_basis"] = "0.4% of revenue unless stated (industry prior)";
                    }
                    all.push_back(std::move(entry));
                }
            }
            if (report_format == "csv") {
                emit(g, csv);
            } else {
                emit(g, json{{"reports", all}});
            }
        }
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    } catch (const fs::filesystem_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    } catch (const Error& e) {
        std::cerr << "error [" << e.kind() << "]: " << e.what() << "\n";
        return kExitValidation;
    }
    return 0;
}
