#include "exposure/reports.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace exposure::report {

namespace {

std::string_view normalization_name(Normalization n) {
    switch (n) {
        case Normalization::Fraction: return "fraction";
        case Normalization::Excess: return "excess";
        case Normalization::Deviation: return "deviation";
        case Normalization::Time: return "time";
        case Normalization::PassThrough: return "pass_through";
        case Normalization::VersionLag: return "version_lag";
    }
    return "fraction";
}

json id_list(const NodeIdSet& ids) {
    json out = json::array();
    for (const auto& id : ids) out.push_back(id.str());
    return out;
}

json attribute_list(const AttributeSet& attrs) {
    json out = json::array();
    for (auto a : attrs) out.push_back(std::string(to_string(a)));
    return out;
}

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

double logging_fraction(const OrgProfile& p) {
    const double total = static_cast<double>(p.assets.total_devices());
    if (total == 0.0) return 0.0;
    if (p.logging) return static_cast<double>(p.logging->devices_with_logging) / total;
    std::size_t n = 0;
    for (const auto& d : p.assets.devices) n += d.logging_enabled ? 1 : 0;
    return static_cast<double>(n) / total;
}

std::string percent(double pct) {
    char buf[32];
    if (pct == std::round(pct)) {
        std::snprintf(buf, sizeof buf, "%.0f%%", pct);
    } else {
        std::snprintf(buf, sizeof buf, "%.1f%%", pct);
    }
    return buf;
}

}  // namespace

std::string fixed(double value, int decimals) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, value);
    return buf;
}

json kb_summary(const KnowledgeGraph& graph) {
    json nodes = json::object(), edges = json::object();
    for (std::size_t i = 0; i < kNodeKindCount; ++i) {
        const auto k = static_cast<NodeKind>(i);
        nodes[std::string(to_string(k))] = graph.count(k);
    }
    for (std::size_t i = 0; i < kEdgeKindCount; ++i) {
        const auto k = static_cast<EdgeKind>(i);
        edges[std::string(to_string(k))] = graph.count(k);
    }
    return {{"node_count", graph.nodes().size()},
            {"edge_count", graph.edges().size()},
            {"nodes_by_kind", nodes},
            {"edges_by_kind", edges}};
}

json weights(const ControlWeightTable& table) {
    json rows = json::array();
    for (const auto& [id, w] : table.weights) {
        rows.push_back({{"control", id.str()}, {"references", table.references.at(id)}, {"weight", w}});
    }
    return {{"total_references", table.total_references}, {"weights", rows}};
}

json scores(const VariableScores& s, const MetricRegistry& reg) {
    json metrics = json::array();
    for (const auto& v : s.per_metric) {
        const MetricSpec* spec = find_spec(reg, v.metric_id);
        json row = {{"metric_id", v.metric_id},
                    {"raw", v.raw},
                    {"normalized", optional_number(v.normalized)},
                    {"available", v.available()}};
        if (spec) {
            row["variable"] = std::string(short_name(spec->variable));
            row["action"] = spec->action_template;
        }
        metrics.push_back(std::move(row));
    }
    return {{"E", s.exposure}, {"T", s.traceability}, {"M", s.motivation}, {"U", s.systems_update},
            {"per_metric", metrics}};
}

json likelihood(const LikelihoodResult& r) {
    return {{"raw", r.raw},
            {"bounded", r.bounded},
            {"contributions",
             {{"e_factor", r.contributions.e_factor},
              {"m_factor", r.contributions.m_factor},
              {"t_factor", r.contributions.t_factor},
              {"u_factor", r.contributions.u_factor}}}};
}

json recommendation(const ControlRecommendation& rec) {
    json out = {{"control", rec.control.str()},
                {"name", rec.name},
                {"weight", rec.weight},
                {"covered_techniques", id_list(rec.covered_techniques)},
                {"coverage", rec.coverage},
                {"residual_coverage", rec.residual_coverage},
                {"score", rec.score},
                {"attributes", attribute_list(rec.attributes)},
                {"already_implemented", rec.already_implemented},
                {"actions", rec.actions}};
    out["cost_verdict"] = rec.cost_verdict ? json(std::string(to_string(*rec.cost_verdict))) : json(nullptr);
    return out;
}

json recommendations(const std::vector<ControlRecommendation>& recs) {
    json out = json::array();
    for (const auto& r : recs) out.push_back(recommendation(r));
    return out;
}

json metric_actions(const std::vector<MetricAction>& actions) {
    json out = json::array();
    for (const auto& a : actions) {
        out.push_back({{"metric_id", a.metric_id}, {"normalized", a.normalized}, {"action", a.action}});
    }
    return out;
}

json registry(const MetricRegistry& reg) {
    json out = json::array();
    for (const auto& s : reg) {
        out.push_back({{"metric_id", s.metric_id},
                       {"variable", std::string(short_name(s.variable))},
                       {"direction", std::string(to_string(s.direction))},
                       {"normalization", std::string(normalization_name(s.normalization))},
                       {"weight", s.weight},
                       {"action", s.action_template}});
    }
    return out;
}

json cluster_report(const ClusterReport& r) {
    json clusters = json::array();
    for (const auto& c : r.clusters) {
        json terms = json::array();
        for (const auto& t : c.top_terms) terms.push_back({{"term", t.term}, {"score", t.score}});
        json hist = json::object();
        for (const auto& [id, n] : c.technique_histogram) hist[id.str()] = n;
        clusters.push_back({{"index", c.index},
                            {"size", c.size()},
                            {"incident_ids", c.incident_ids},
                            {"top_terms", terms},
                            {"technique_histogram", hist},
                            {"suggested_variable", c.suggested_variable
                                                       ? json(std::string(short_name(*c.suggested_variable)))
                                                       : json(nullptr)}});
    }
    json curve = json::array();
    for (std::size_t i = 0; i < r.k_candidates.size(); ++i)
        curve.push_back({{"k", r.k_candidates[i]}, {"inertia", r.k_inertia[i]}});
    return {{"k", r.k},
            {"documents", r.documents},
            {"vocabulary_size", r.vocabulary_size},
            {"pca_dimensions", r.pca_dimensions},
            {"pca_eigenvalues", r.pca_eigenvalues},
            {"inertia_curve", curve},
            {"seed", r.seed},
            {"clusters", clusters}};
}

json strategy(const StrategyEvaluation& e) {
    auto side = [](const StrategySnapshot& s) {
        return json{{"E", s.scores.exposure},
                    {"T", s.scores.traceability},
                    {"M", s.scores.motivation},
                    {"U", s.scores.systems_update},
                    {"likelihood", likelihood(s.likelihood)},
                    {"incident_count", s.incident_count}};
    };
    json deltas = json::array();
    for (const auto& d : e.per_metric_deltas) {
        deltas.push_back({{"metric_id", d.metric_id},
                          {"before", optional_number(d.before)},
                          {"after", optional_number(d.after)},
                          {"delta", optional_number(d.delta)}});
    }
    return {{"before", side(e.before)},
            {"after", side(e.after)},
            {"incident_reduction_pct", optional_number(e.incident_reduction_pct)},
            {"division_unavailable", e.division_unavailable},
            {"likelihood_delta", e.likelihood_delta},
            {"bounded_delta", e.bounded_delta},
            {"per_metric_deltas", deltas}};
}

json issues(const std::vector<ValidationIssue>& list) {
    json out = json::array();
    for (const auto& i : list) {
        out.push_back({{"severity", i.severity == IssueSeverity::Error ? "error" : "warning"},
                       {"code", i.code},
                       {"locus", i.locus},
                       {"message", i.message}});
    }
    return out;
}

json profile_score(const OrgProfile& profile, const MetricRegistry& reg, const ScoringParams& params) {
    const VariableScores s = compute_variable_scores(profile, reg);
    const LikelihoodResult l = exposure::likelihood(s, params.likelihood);
    return {{"org_id", profile.org_id},
            {"scores", scores(s, reg)},
            {"likelihood", likelihood(l)},
            {"actions", metric_actions(exposure::metric_actions(s, reg))}};
}

std::vector<StrategyRow> strategy_rows(const StrategyEvaluation& e, const OrgProfile& before,
                                       const OrgProfile& after) {
    std::vector<StrategyRow> rows;
    const std::string b = "Baseline", p = "Post-Implementation", o = "Outcome";
    rows.push_back({b, "Total Devices", std::to_string(before.assets.total_devices())});
    rows.push_back({b, "Unregistered Devices", std::to_string(before.assets.unregistered_devices())});
    rows.push_back({b, "Privileged Users", std::to_string(before.users.privileged_users())});
    rows.push_back({b, "Devices with Logging", logging_band(logging_fraction(before))});
    rows.push_back({p, "Registered Devices", std::to_string(after.assets.registered_devices())});
    rows.push_back({p, "Privileged Users", std::to_string(after.users.privileged_users())});
    rows.push_back({p, "Devices with Logging", logging_band(logging_fraction(after))});
    rows.push_back({o, "Reduction in Incidents",
                    e.incident_reduction_pct ? percent(*e.incident_reduction_pct) : std::string("n/a")});
    return rows;
}

std::string recommendations_csv(const std::vector<ControlRecommendation>& recs) {
    std::ostringstream out;
    out << "control,weight,coverage,score,attributes,verdict\n";
    for (const auto& r : recs) {
        std::string attrs;
        for (auto a : r.attributes) {
            if (!attrs.empty()) attrs += ';';
            attrs += '#';
            attrs += to_string(a);
        }
        out << csv_field(r.control.str()) << ',' << fixed(r.weight) << ',' << fixed(r.coverage) << ','
            << fixed(r.score) << ',' << csv_field(attrs) << ','
            << (r.cost_verdict ? std::string(to_string(*r.cost_verdict)) : std::string()) << '\n';
    }
    return out.str();
}

std::string metrics_csv(const VariableScores& s, const MetricRegistry& reg) {
    std::ostringstream out;
    out << "metric_id,variable,raw,normalized,available,action\n";
    for (const auto& v : s.per_metric) {
        const MetricSpec* spec = find_spec(reg, v.metric_id);
        out << csv_field(v.metric_id) << ',' << (spec ? std::string(short_name(spec->variable)) : std::string())
            << ',' << fixed(v.raw) << ',' << (v.normalized ? fixed(*v.normalized) : std::string()) << ','
            << (v.available() ? "true" : "false") << ',' << csv_field(spec ? spec->action_template : std::string())
            << '\n';
    }
    return out.str();
}

std::string cluster_table(const ClusterReport& r) {
    std::ostringstream out;
    out << "k=" << r.k << "  documents=" << r.documents << "  vocabulary=" << r.vocabulary_size
        << "  pca_dimensions=" << r.pca_dimensions << "  seed=" << r.seed << "\n";
    out << "inertia:";
    for (std::size_t i = 0; i < r.k_candidates.size(); ++i)
        out << "  k=" << r.k_candidates[i] << ':' << fixed(r.k_inertia[i], 4);
    out << "\n\n";
    for (const auto& c : r.clusters) {
        out << "cluster " << c.index << "  size=" << c.size() << "  variable="
            << (c.suggested_variable ? std::string(short_name(*c.suggested_variable)) : std::string("-")) << "\n";
        out << "  terms:";
        for (const auto& t : c.top_terms) out << ' ' << t.term;
        out << "\n  techniques:";
        if (c.technique_histogram.empty()) out << " -";
        for (const auto& [id, n] : c.technique_histogram) out << ' ' << id.str() << 'x' << n;
        out << "\n  members:";
        for (const auto& id : c.incident_ids) out << ' ' << id;
        out << "\n";
    }
    return out.str();
}

}  // namespace exposure::report
