#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "exposure/clustering.hpp"
#include "exposure/kb_graph.hpp"
#include "exposure/metrics.hpp"
#include "exposure/recommender.hpp"
#include "exposure/scoring.hpp"

// JSON and CSV renderings shared by the CLI and the HTTP API. Objects use
// nlohmann::json's ordered-by-key maps, so output is byte-stable.
namespace exposure::report {

using nlohmann::json;

json kb_summary(const KnowledgeGraph& graph);
json weights(const ControlWeightTable& table);
json scores(const VariableScores& scores, const MetricRegistry& registry);
json likelihood(const LikelihoodResult& result);
json recommendation(const ControlRecommendation& rec);
json recommendations(const std::vector<ControlRecommendation>& recs);
json metric_actions(const std::vector<MetricAction>& actions);
json registry(const MetricRegistry& registry);
json cluster_report(const ClusterReport& report);
json strategy(const StrategyEvaluation& evaluation);
json issues(const std::vector<ValidationIssue>& issues);

// Full scoring report for one profile.
json profile_score(const OrgProfile& profile, const MetricRegistry& registry, const ScoringParams& params);

// Rows follow the before/after evaluation table layout.
struct StrategyRow {
    std::string section;    // "Baseline", "Post-Implementation", "Outcome"
    std::string criterion;  // e.g. "Total Devices"
    std::string value;
};
std::vector<StrategyRow> strategy_rows(const StrategyEvaluation& evaluation, const OrgProfile& before,
                                       const OrgProfile& after);

// control,weight,coverage,score,attributes,verdict
std::string recommendations_csv(const std::vector<ControlRecommendation>& recs);
// metric_id,variable,raw,normalized,available,action
std::string metrics_csv(const VariableScores& scores, const MetricRegistry& registry);

std::string cluster_table(const ClusterReport& report);

// Fixed-precision rendering used by CSV and text tables.
std::string fixed(double value, int decimals = 6);

}  // namespace exposure::report
