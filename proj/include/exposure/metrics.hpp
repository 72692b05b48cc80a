#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "exposure/profile.hpp"

namespace exposure {

enum class Variable { Exposure, Traceability, Motivation, SystemsUpdate };
enum class Direction { RiskIncreasing, RiskDecreasing };

// How a raw metric is mapped into [0,1].
enum class Normalization {
    Fraction,     // x/total, passed through
    Excess,       // actual/necessary -> min(1, max(0, ratio - 1))
    Deviation,    // min(1, |observed - expected| / max(1, expected))
    Time,         // min(1, days / 365)
    PassThrough,  // already in [0,1]
    VersionLag,   // min(1, versions / 4)
};

// Built-in evaluator rules, one per metric row.
enum class Evaluator {
    PublicIpExcess,
    VisiblePortExcess,
    PrivilegedUserRatio,
    AuthenticatedUserRatio,
    SharedAccountRatio,
    RegisteredDeviceRatio,
    InternetAccessibleRatio,
    AuthenticationDeviation,
    TransactionDeviation,
    LoggingCoverage,
    DeviceReportingRatio,
    AuthorizationRatio,
    AssetValue,
    RestorableAssets,
    PublicHarm,
    ResidualVulnerabilities,
    ControlMaturity,
    PatchedRatio,
    UpdateDelay,
    VersionLag,
    LegacyRatio,
    CriticalPatchTime,
};

std::string_view to_string(Variable v);
std::string_view short_name(Variable v);  // "E", "T", "M", "U"
std::string_view to_string(Direction d);
std::optional<Variable> parse_variable(std::string_view text);

// T and U are mitigators: their aggregate is reported so that higher means
// more mitigation.
inline bool is_mitigator(Variable v) { return v == Variable::Traceability || v == Variable::SystemsUpdate; }

struct MetricSpec {
    std::string metric_id;
    Variable variable = Variable::Exposure;
    Direction direction = Direction::RiskIncreasing;
    Normalization normalization = Normalization::Fraction;
    double weight = 1.0;
    std::string action_template;
    Evaluator evaluator = Evaluator::PublicIpExcess;
};

using MetricRegistry = std::vector<MetricSpec>;

// `normalized` is in risk orientation (1 = worst) and is unset when the
// metric could not be evaluated.
struct MetricValue {
    std::string metric_id;
    double raw = 0.0;
    std::optional<double> normalized;

    bool available() const { return normalized.has_value(); }
};

struct VariableScores {
    double exposure = 0.5;
    double traceability = 0.5;
    double motivation = 0.5;
    double systems_update = 0.5;
    std::vector<MetricValue> per_metric;

    double get(Variable v) const;
};

MetricRegistry default_registry();

// Applies a JSON override list [{metric_id, weight?, enabled?}].
// Unknown ids raise SchemaError, non-positive weights RangeError.
MetricRegistry apply_registry_overrides(const MetricRegistry& registry, std::string_view override_json);

const MetricSpec* find_spec(const MetricRegistry& registry, std::string_view metric_id);

MetricValue evaluate_metric(const MetricSpec& spec, const OrgProfile& profile);

// Weighted mean of the available values in risk orientation, flipped to
// mitigation orientation for T and U; 0.5 when nothing is available.
double aggregate_variable(Variable variable, const std::vector<MetricValue>& values, const MetricRegistry& registry);

VariableScores compute_variable_scores(const OrgProfile& profile, const MetricRegistry& registry);

// Re-aggregates already evaluated metric values (used after overrides).
VariableScores aggregate_scores(std::vector<MetricValue> values, const MetricRegistry& registry);

}  // namespace exposure
