#include "exposure/recommender.hpp"

#include <algorithm>
#include <cmath>

#include "exposure/errors.hpp"
#include "json_util.hpp"

namespace exposure {

namespace {

bool mitigated_by_other_implemented(const KnowledgeGraph& graph, const NodeId& technique, const NodeId& self,
                                    const NodeIdSet& implemented) {
    for (const auto& m : mitigators_of(graph, technique)) {
        if (m != self && implemented.count(m)) return true;
    }
    return false;
}

std::optional<double> normalized_of(const VariableScores& s, const std::string& id) {
    for (const auto& v : s.per_metric) {
        if (v.metric_id == id) return v.normalized;
    }
    return std::nullopt;
}

}  // namespace

std::string_view to_string(CostVerdict v) {
    switch (v) {
        case CostVerdict::Pass: return "Pass";
        case CostVerdict::Fail: return "Fail";
        case CostVerdict::Unknown: return "Unknown";
    }
    return "Unknown";
}

std::vector<ControlRecommendation> recommend(const KnowledgeGraph& graph, const OrgProfile& profile,
                                             [[maybe_unused]] const VariableScores& scores,
                                             const ControlWeightTable& weights) {
    const NodeIdSet relevant = techniques_for_baseline(graph, profile.assets.technologies_in_use);
    std::map<NodeId, std::size_t> mitigator_count;
    for (const auto& t : relevant) mitigator_count[t] = mitigators_of(graph, t).size();

    std::vector<ControlRecommendation> out;
    for (const auto& [control, covered] : countermeasures_for(graph, relevant)) {
        const KbNode* node = graph.find(control);
        ControlRecommendation rec;
        rec.control = control;
        rec.name = node->name;
        rec.weight = weights.weight(control);
        rec.covered_techniques = covered;
        rec.attributes = node->attributes;
        rec.already_implemented = profile.implemented_controls.count(control) > 0;
        for (const auto& t : covered) {
            const double share = 1.0 / static_cast<double>(mitigator_count.at(t));
            rec.coverage += share;
            if (!mitigated_by_other_implemented(graph, t, control, profile.implemented_controls))
                rec.residual_coverage += share;
            const KbNode* tn = graph.find(t);
            rec.actions.push_back("mitigate " + t.str() + (tn->name.empty() ? "" : " (" + tn->name + ")"));
        }
        rec.score = rec.coverage * rec.weight;
        out.push_back(std::move(rec));
    }
    std::sort(out.begin(), out.end(), [](const ControlRecommendation& a, const ControlRecommendation& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.control < b.control;
    });
    return out;
}

NodeIdSet uncovered_techniques(const KnowledgeGraph& graph, const OrgProfile& profile) {
    NodeIdSet out;
    for (const auto& t : techniques_for_baseline(graph, profile.assets.technologies_in_use)) {
        const NodeIdSet mitigators = mitigators_of(graph, t);
        if (mitigators.empty()) continue;
        const bool covered = std::any_of(mitigators.begin(), mitigators.end(),
                                         [&](const NodeId& m) { return profile.implemented_controls.count(m) > 0; });
        if (!covered) out.insert(t);
    }
    return out;
}

CostGateResult cost_gate([[maybe_unused]] const ControlRecommendation& rec, const CostGainInput& input) {
    CostGateResult r;
    if (input.expected_loss) {
        r.expected_loss = input.expected_loss;
    } else if (input.revenue) {
        r.expected_loss = kRevenueLossFraction * *input.revenue;
        r.revenue_prior = true;
    }
    if (!r.expected_loss) return r;
    r.verdict = input.control_cost < *r.expected_loss ? CostVerdict::Pass : CostVerdict::Fail;
    if (*r.expected_loss > 0.0) r.ratio = input.control_cost / *r.expected_loss;
    return r;
}

void apply_cost_gate(std::vector<ControlRecommendation>& recs, const std::map<NodeId, double>& costs,
                     std::optional<double> revenue, std::optional<double> expected_loss) {
    for (auto& rec : recs) {
        const auto it = costs.find(rec.control);
        if (it == costs.end()) {
            rec.cost_verdict = CostVerdict::Unknown;
            continue;
        }
        rec.cost_verdict = cost_gate(rec, {it->second, expected_loss, revenue}).verdict;
    }
}

std::map<NodeId, double> parse_control_costs(std::string_view text) {
    using namespace detail;
    const json root = parse_json(text);
    require_object(root, "costs");
    std::map<NodeId, double> out;
    for (auto it = root.begin(); it != root.end(); ++it) {
        if (!NodeId::is_valid(it.key())) throw SchemaError("costs: invalid control id '" + it.key() + "'");
        out.emplace(NodeId(it.key()), get_non_negative(it.value(), "costs." + it.key()));
    }
    return out;
}

std::vector<MetricAction> metric_actions(const VariableScores& scores, const MetricRegistry& registry,
                                         double threshold) {
    std::vector<MetricAction> out;
    for (const auto& v : scores.per_metric) {
        if (!v.normalized || !(*v.normalized > threshold)) continue;
        const MetricSpec* spec = find_spec(registry, v.metric_id);
        if (!spec) continue;
        out.push_back({v.metric_id, *v.normalized, spec->action_template});
    }
    std::sort(out.begin(), out.end(), [](const MetricAction& a, const MetricAction& b) {
        if (a.normalized != b.normalized) return a.normalized > b.normalized;
        return a.metric_id < b.metric_id;
    });
    return out;
}

std::vector<NodeId> root_cause_candidates(const IncidentRecord& incident, const KnowledgeGraph& graph,
                                          const OrgProfile& profile) {
    if (incident.breach_properties.empty()) throw DomainError("incident has no breach properties");
    for (auto tag : incident.breach_properties) {
        if (!is_security_property(tag))
            throw DomainError("'" + std::string(to_string(tag)) + "' is not a security property");
    }
    ControlWeightTable weights;
    try {
        weights = control_weights(graph);
    } catch (const EmptyMappingError&) {
        // every weight stays 0
    }

    struct Candidate {
        NodeId id;
        bool mitigates;
        double weight;
    };
    std::vector<Candidate> found;
    for (const auto& control : profile.implemented_controls) {
        const KbNode* node = graph.find(control);
        if (!node || node->kind != NodeKind::Countermeasure) continue;
        bool mitigates = false;
        for (auto idx : graph.out_edges(control, EdgeKind::Mitigates)) {
            if (incident.technique_refs.count(graph.edges()[idx].dst)) mitigates = true;
        }
        const bool tagged = std::any_of(incident.breach_properties.begin(), incident.breach_properties.end(),
                                        [&](AttributeTag t) { return node->attributes.count(t) > 0; });
        if (mitigates || tagged) found.push_back({control, mitigates, weights.weight(control)});
    }
    std::sort(found.begin(), found.end(), [](const Candidate& a, const Candidate& b) {
        if (a.mitigates != b.mitigates) return a.mitigates;
        if (a.weight != b.weight) return a.weight > b.weight;
        return a.id < b.id;
    });
    std::vector<NodeId> out;
    for (auto& c : found) out.push_back(std::move(c.id));
    return out;
}

StrategyEvaluation evaluate_strategy(const StrategySide& before, const StrategySide& after,
                                     const MetricRegistry& registry, const LikelihoodParams& params) {
    StrategyEvaluation e;
    auto snapshot = [&](const StrategySide& side) {
        StrategySnapshot s;
        s.scores = compute_variable_scores(side.profile, registry);
        s.likelihood = likelihood(s.scores, params);
        s.incident_count = side.incident_count;
        return s;
    };
    e.before = snapshot(before);
    e.after = snapshot(after);
    e.likelihood_delta = e.after.likelihood.raw - e.before.likelihood.raw;
    e.bounded_delta = e.after.likelihood.bounded - e.before.likelihood.bounded;
    if (before.incident_count == 0) {
        e.division_unavailable = true;
    } else {
        const double b = static_cast<double>(before.incident_count);
        const double a = static_cast<double>(after.incident_count);
        e.incident_reduction_pct = 100.0 * (b - a) / b;
    }
    for (const auto& spec : registry) {
        MetricDelta d;
        d.metric_id = spec.metric_id;
        d.before = normalized_of(e.before.scores, spec.metric_id);
        d.after = normalized_of(e.after.scores, spec.metric_id);
        if (d.before && d.after) d.delta = *d.after - *d.before;
        e.per_metric_deltas.push_back(std::move(d));
    }
    return e;
}

std::string logging_band(double fraction) {
    if (fraction < 0.30) return "Minimal (below 30%)";
    if (fraction < 0.50) return "Inconsistent (below 50%)";
    if (fraction <= 0.80) return "Partial (50% to 80%)";
    if (fraction <= 0.90) return "Standardized (over 80%)";
    return "Comprehensive (over 90%)";
}

}  // namespace exposure
