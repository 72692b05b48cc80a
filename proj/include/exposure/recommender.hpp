#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "exposure/kb_graph.hpp"
#include "exposure/metrics.hpp"
#include "exposure/profile.hpp"
#include "exposure/scoring.hpp"

namespace exposure {

enum class CostVerdict { Pass, Fail, Unknown };
std::string_view to_string(CostVerdict v);

struct ControlRecommendation {
    NodeId control;
    std::string name;
    double weight = 0.0;
    NodeIdSet covered_techniques;
    double coverage = 0.0;           // sum over covered techniques of 1/|mitigators|
    double residual_coverage = 0.0;  // same sum, skipping techniques another implemented control mitigates
    double score = 0.0;              // coverage * weight, the ranking key
    AttributeSet attributes;
    bool already_implemented = false;
    std::vector<std::string> actions;
    std::optional<CostVerdict> cost_verdict;
};

// Ranked by score descending, then control id ascending. Implemented
// controls are kept and flagged. Throws UnknownNodeError when a profile
// technology is not in the graph.
std::vector<ControlRecommendation> recommend(const KnowledgeGraph& graph, const OrgProfile& profile,
                                             const VariableScores& scores, const ControlWeightTable& weights);

// Relevant techniques with at least one mitigator but no implemented one.
NodeIdSet uncovered_techniques(const KnowledgeGraph& graph, const OrgProfile& profile);

inline constexpr double kRevenueLossFraction = 0.004;

struct CostGainInput {
    double control_cost = 0.0;
    std::optional<double> expected_loss;
    std::optional<double> revenue;
};

struct CostGateResult {
    CostVerdict verdict = CostVerdict::Unknown;
    std::optional<double> ratio;          // control_cost / expected_loss
    std::optional<double> expected_loss;  // as used for the verdict
    bool revenue_prior = false;           // expected loss came from the revenue fraction
};

// Pass iff control_cost < expected loss; the expected loss defaults to
// 0.4% of revenue when not given.
CostGateResult cost_gate(const ControlRecommendation& rec, const CostGainInput& input);

// Sets cost_verdict on every recommendation from a control -> cost map.
// Controls without a cost entry get Unknown.
void apply_cost_gate(std::vector<ControlRecommendation>& recs, const std::map<NodeId, double>& costs,
                     std::optional<double> revenue, std::optional<double> expected_loss = std::nullopt);

// {control_id: cost} JSON document. Throws SyntaxError, SchemaError or RangeError.
std::map<NodeId, double> parse_control_costs(std::string_view text);

inline constexpr double kDefaultActionThreshold = 0.5;

struct MetricAction {
    std::string metric_id;
    double normalized = 0.0;
    std::string action;
};

// Action text of every available metric whose risk-oriented value exceeds
// the threshold, highest first (ties by metric id).
std::vector<MetricAction> metric_actions(const VariableScores& scores, const MetricRegistry& registry,
                                         double threshold = kDefaultActionThreshold);

struct IncidentRecord {
    std::string incident_id;
    AttributeSet breach_properties;  // Confidentiality / Integrity / Availability
    NodeIdSet technique_refs;
    std::vector<std::string> affected_assets;
    std::optional<Severity> severity;
};

// Implemented controls tagged with a breached property or mitigating one of
// the incident's techniques. Mitigating controls come first, then by weight
// descending and id. Throws DomainError when breach_properties is empty or
// holds a tag that is not a security property.
std::vector<NodeId> root_cause_candidates(const IncidentRecord& incident, const KnowledgeGraph& graph,
                                          const OrgProfile& profile);

struct StrategySide {
    OrgProfile profile;
    std::uint64_t incident_count = 0;
};

struct StrategySnapshot {
    VariableScores scores;
    LikelihoodResult likelihood;
    std::uint64_t incident_count = 0;
};

struct MetricDelta {
    std::string metric_id;
    std::optional<double> before;
    std::optional<double> after;
    std::optional<double> delta;  // after - before, when both are available
};

struct StrategyEvaluation {
    StrategySnapshot before;
    StrategySnapshot after;
    std::optional<double> incident_reduction_pct;  // unset when the before count is 0
    bool division_unavailable = false;
    double likelihood_delta = 0.0;                 // after.raw - before.raw
    double bounded_delta = 0.0;
    std::vector<MetricDelta> per_metric_deltas;
};

StrategyEvaluation evaluate_strategy(const StrategySide& before, const StrategySide& after,
                                     const MetricRegistry& registry, const LikelihoodParams& params = {});

// Qualitative band for a logging coverage fraction, e.g. "Minimal (below 30%)".
std::string logging_band(double fraction);

}  // namespace exposure
