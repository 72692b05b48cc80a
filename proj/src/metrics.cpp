#include "exposure/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "exposure/errors.hpp"
#include "json_util.hpp"

namespace exposure {

namespace {

constexpr std::array<std::string_view, 4> kVariableNames{"Exposure", "Traceability", "Motivation", "SystemsUpdate"};
constexpr std::array<std::string_view, 4> kVariableShort{"E", "T", "M", "U"};

double clamp01(double x) { return std::clamp(x, 0.0, 1.0); }

struct Raw {
    double value;
    bool available;
};

Raw ratio(double num, double den) {
    if (den <= 0.0) return {0.0, false};
    return {num / den, true};
}

template <typename Pred>
double count_devices(const OrgProfile& p, Pred pred) {
    return static_cast<double>(std::count_if(p.assets.devices.begin(), p.assets.devices.end(), pred));
}

template <typename Pred>
double count_users(const OrgProfile& p, Pred pred) {
    return static_cast<double>(std::count_if(p.users.users.begin(), p.users.users.end(), pred));
}

double as_double(std::uint64_t v) { return static_cast<double>(v); }

Raw compute_raw(Evaluator e, const OrgProfile& p) {
    const double devices = as_double(p.assets.devices.size());
    const double users = as_double(p.users.users.size());
    switch (e) {
        case Evaluator::PublicIpExcess:
            if (!p.network) return {0.0, false};
            return ratio(as_double(p.network->public_ips), as_double(p.network->necessary_public_ips));
        case Evaluator::VisiblePortExcess:
            if (!p.network) return {0.0, false};
            return ratio(as_double(p.network->visible_ports), as_double(p.network->necessary_visible_ports));
        case Evaluator::PrivilegedUserRatio:
            return ratio(count_users(p, [](const User& u) { return u.privileged; }), users);
        case Evaluator::AuthenticatedUserRatio:
            return ratio(count_users(p, [](const User& u) { return u.authenticated; }), users);
        case Evaluator::SharedAccountRatio:
            return ratio(count_users(p, [](const User& u) { return u.shared_account; }), users);
        case Evaluator::RegisteredDeviceRatio:
            return ratio(count_devices(p, [](const Device& d) { return d.registered; }), devices);
        case Evaluator::InternetAccessibleRatio:
            return ratio(count_devices(p,
                                       [](const Device& d) {
                                           return d.location_access.count(LocationAccess::Internet) ||
                                                  d.location_access.count(LocationAccess::Cloud);
                                       }),
                         devices);
        case Evaluator::AuthenticationDeviation:
            if (!p.logging) return {0.0, false};
            return ratio(as_double(p.logging->observed_authentications), as_double(p.logging->expected_authentications));
        case Evaluator::TransactionDeviation:
            if (!p.logging) return {0.0, false};
            return ratio(as_double(p.logging->observed_transactions), as_double(p.logging->expected_transactions));
        case Evaluator::LoggingCoverage:
            if (!p.logging) return {0.0, false};
            return ratio(as_double(p.logging->devices_with_logging), devices);
        case Evaluator::DeviceReportingRatio: {
            const double registered = count_devices(p, [](const Device& d) { return d.registered; });
            return ratio(count_devices(p, [](const Device& d) { return d.registered && d.logging_enabled; }),
                         registered);
        }
        case Evaluator::AuthorizationRatio:
            if (!p.logging) return {0.0, false};
            return ratio(as_double(p.logging->role_authorized_actions), as_double(p.logging->total_actions_observed));
        case Evaluator::AssetValue: return {p.motivation.asset_value_class, true};
        case Evaluator::RestorableAssets: return {p.motivation.restorable_fraction, true};
        case Evaluator::PublicHarm: return {p.motivation.public_harm_fraction, true};
        case Evaluator::ResidualVulnerabilities: return {p.motivation.residual_vuln_fraction, true};
        case Evaluator::ControlMaturity: return {p.motivation.control_maturity, true};
        case Evaluator::PatchedRatio:
            if (!p.updates) return {0.0, false};
            return ratio(as_double(p.updates->patched_systems), as_double(p.updates->total_systems));
        case Evaluator::UpdateDelay:
            if (!p.updates) return {0.0, false};
            return {p.updates->update_delay_days, true};
        case Evaluator::VersionLag:
            if (!p.updates) return {0.0, false};
            return {as_double(p.updates->policy_version_lag), true};
        case Evaluator::LegacyRatio:
            if (!p.updates) return {0.0, false};
            return ratio(as_double(p.updates->legacy_unupdatable), as_double(p.updates->total_systems));
        case Evaluator::CriticalPatchTime:
            if (!p.updates) return {0.0, false};
            return {p.updates->critical_patch_days, true};
    }
    return {0.0, false};
}

double normalize(Normalization rule, double raw) {
    switch (rule) {
        case Normalization::Fraction: return clamp01(raw);
        case Normalization::Excess: return std::min(1.0, std::max(0.0, raw - 1.0));
        // raw = observed / expected, so |observed - expected| / expected = |raw - 1|
        case Normalization::Deviation: return std::min(1.0, std::abs(raw - 1.0));
        case Normalization::Time: return std::min(1.0, std::max(0.0, raw) / 365.0);
        case Normalization::PassThrough: return clamp01(raw);
        case Normalization::VersionLag: return std::min(1.0, std::max(0.0, raw) / 4.0);
    }
    return clamp01(raw);
}

MetricSpec spec(std::string id, Variable v, Direction d, Normalization n, Evaluator e, std::string action) {
    return MetricSpec{std::move(id), v, d, n, 1.0, std::move(action), e};
}

}  // namespace

std::string_view to_string(Variable v) { return kVariableNames[static_cast<std::size_t>(v)]; }
std::string_view short_name(Variable v) { return kVariableShort[static_cast<std::size_t>(v)]; }
std::string_view to_string(Direction d) {
    return d == Direction::RiskIncreasing ? "RiskIncreasing" : "RiskDecreasing";
}

std::optional<Variable> parse_variable(std::string_view text) {
    for (std::size_t i = 0; i < kVariableNames.size(); ++i) {
        if (kVariableNames[i] == text || kVariableShort[i] == text) return static_cast<Variable>(i);
    }
    return std::nullopt;
}

double VariableScores::get(Variable v) const {
    switch (v) {
        case Variable::Exposure: return exposure;
        case Variable::Traceability: return traceability;
        case Variable::Motivation: return motivation;
        case Variable::SystemsUpdate: return systems_update;
    }
    return 0.5;
}

MetricRegistry default_registry() {
    using V = Variable;
    using D = Direction;
    using N = Normalization;
    using E = Evaluator;
    return {
        // Exposure
        spec("public_ip_excess", V::Exposure, D::RiskIncreasing, N::Excess, E::PublicIpExcess,
             "reduce public IP addresses to those required by business rules"),
        spec("visible_port_excess", V::Exposure, D::RiskIncreasing, N::Excess, E::VisiblePortExcess,
             "close visible ports and services that are not required"),
        spec("privileged_user_ratio", V::Exposure, D::RiskIncreasing, N::Fraction, E::PrivilegedUserRatio,
             "review the need for each privileged user and log their activity"),
        spec("authenticated_user_ratio", V::Exposure, D::RiskDecreasing, N::Fraction, E::AuthenticatedUserRatio,
             "require authentication for every user"),
        spec("shared_account_ratio", V::Exposure, D::RiskIncreasing, N::Fraction, E::SharedAccountRatio,
             "replace shared accounts with individual accounts"),
        spec("registered_device_ratio", V::Exposure, D::RiskDecreasing, N::Fraction, E::RegisteredDeviceRatio,
             "register unregistered devices"),
        spec("internet_accessible_ratio", V::Exposure, D::RiskIncreasing, N::Fraction, E::InternetAccessibleRatio,
             "restrict asset access to the locations business rules require"),
        // Traceability
        spec("authentication_deviation", V::Traceability, D::RiskIncreasing, N::Deviation,
             E::AuthenticationDeviation, "log user authentication and correlate it with expected authentication"),
        spec("transaction_deviation", V::Traceability, D::RiskIncreasing, N::Deviation, E::TransactionDeviation,
             "monitor automated activities against expected transaction volume"),
        spec("logging_coverage", V::Traceability, D::RiskDecreasing, N::Fraction, E::LoggingCoverage,
             "enable activity logging"),
        spec("device_reporting_ratio", V::Traceability, D::RiskDecreasing, N::Fraction, E::DeviceReportingRatio,
             "forward logs from every registered device"),
        spec("authorization_ratio", V::Traceability, D::RiskDecreasing, N::Fraction, E::AuthorizationRatio,
             "align user authorizations with roles and responsibilities"),
        // Motivation
        spec("asset_value", V::Motivation, D::RiskIncreasing, N::PassThrough, E::AssetValue,
             "classify information and assets by value and reduce what is held"),
        spec("restorable_assets", V::Motivation, D::RiskIncreasing, N::PassThrough, E::RestorableAssets,
             "back up information and assets so they can be restored"),
        spec("public_harm", V::Motivation, D::RiskIncreasing, N::PassThrough, E::PublicHarm,
             "limit information whose disclosure would harm the organization"),
        spec("residual_vulnerabilities", V::Motivation, D::RiskIncreasing, N::PassThrough,
             E::ResidualVulnerabilities, "remediate findings from vulnerability analysis and pen-testing"),
        spec("control_maturity", V::Motivation, D::RiskIncreasing, N::PassThrough, E::ControlMaturity,
             "raise the maturity of implemented controls"),
        // Systems update
        spec("patched_ratio", V::SystemsUpdate, D::RiskDecreasing, N::Fraction, E::PatchedRatio,
             "apply pending updates and patches"),
        spec("update_delay", V::SystemsUpdate, D::RiskIncreasing, N::Time, E::UpdateDelay,
             "shorten the update deferral policy"),
        spec("version_lag", V::SystemsUpdate, D::RiskIncreasing, N::VersionLag, E::VersionLag,
             "bring systems closer to the current version"),
        spec("legacy_ratio", V::SystemsUpdate, D::RiskIncreasing, N::Fraction, E::LegacyRatio,
             "apply complementary controls to systems that cannot be updated"),
        spec("critical_patch_time", V::SystemsUpdate, D::RiskIncreasing, N::Time, E::CriticalPatchTime,
             "reduce the time to deploy critical updates"),
    };
}

const MetricSpec* find_spec(const MetricRegistry& registry, std::string_view metric_id) {
    for (const auto& s : registry) {
        if (s.metric_id == metric_id) return &s;
    }
    return nullptr;
}

MetricRegistry apply_registry_overrides(const MetricRegistry& registry, std::string_view override_json) {
    using namespace detail;
    const json root = parse_json(override_json);
    require_array(root, "registry overrides");
    MetricRegistry out = registry;
    std::set<std::string> disabled;
    for (std::size_t i = 0; i < root.size(); ++i) {
        const std::string where = "overrides[" + std::to_string(i) + "]";
        const auto& item = require_object(root[i], where);
        check_keys(item, {"metric_id", "weight", "enabled"}, where);
        if (!item.contains("metric_id")) throw SchemaError(where + ": missing 'metric_id'");
        const std::string id = get_string(item["metric_id"], where + ".metric_id");
        auto it = std::find_if(out.begin(), out.end(), [&](const MetricSpec& s) { return s.metric_id == id; });
        if (it == out.end()) throw SchemaError(where + ": unknown metric_id '" + id + "'");
        if (item.contains("weight")) {
            const double w = get_number(item["weight"], where + ".weight");
            if (!(w > 0.0)) throw RangeError(where + ": weight must be positive");
            it->weight = w;
        }
        if (item.contains("enabled") && !get_bool(item["enabled"], where + ".enabled")) disabled.insert(id);
    }
    std::erase_if(out, [&](const MetricSpec& s) { return disabled.count(s.metric_id) > 0; });
    return out;
}

MetricValue evaluate_metric(const MetricSpec& spec, const OrgProfile& profile) {
    const Raw raw = compute_raw(spec.evaluator, profile);
    MetricValue value{spec.metric_id, raw.value, std::nullopt};
    if (!raw.available) return value;
    const double n = normalize(spec.normalization, raw.value);
    value.normalized = spec.direction == Direction::RiskDecreasing ? 1.0 - n : n;
    return value;
}

double aggregate_variable(Variable variable, const std::vector<MetricValue>& values, const MetricRegistry& registry) {
    double weighted = 0.0;
    double total_weight = 0.0;
    std::size_t used = 0;
    double only = 0.0;
    for (const auto& v : values) {
        if (!v.available()) continue;
        const MetricSpec* s = find_spec(registry, v.metric_id);
        if (!s || s->variable != variable || s->weight <= 0.0) continue;
        weighted += s->weight * *v.normalized;
        total_weight += s->weight;
        only = *v.normalized;
        ++used;
    }
    if (used == 0) return 0.5;
    // A lone metric is passed through untouched so w*x/w rounding cannot creep in.
    const double risk = clamp01(used == 1 ? only : weighted / total_weight);
    return is_mitigator(variable) ? 1.0 - risk : risk;
}

VariableScores aggregate_scores(std::vector<MetricValue> values, const MetricRegistry& registry) {
    VariableScores scores;
    scores.exposure = aggregate_variable(Variable::Exposure, values, registry);
    scores.traceability = aggregate_variable(Variable::Traceability, values, registry);
    scores.motivation = aggregate_variable(Variable::Motivation, values, registry);
    scores.systems_update = aggregate_variable(Variable::SystemsUpdate, values, registry);
    scores.per_metric = std::move(values);
    return scores;
}

VariableScores compute_variable_scores(const OrgProfile& profile, const MetricRegistry& registry) {
    std::vector<MetricValue> values;
    values.reserve(registry.size());
    for (const auto& s : registry) values.push_back(evaluate_metric(s, profile));
    return aggregate_scores(std::move(values), registry);
}

}  // namespace exposure
