#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>

#include <json.hpp>

#include "exposure/kb_graph.hpp"
#include "exposure/metrics.hpp"
#include "exposure/profile.hpp"
#include "exposure/recommender.hpp"
#include "exposure/scoring.hpp"

namespace exposure {

// One immutable view of everything the service serves. Readers hold a
// shared_ptr, so a snapshot stays valid after newer ones are published.
struct Snapshot {
    std::uint64_t version = 0;
    std::shared_ptr<const KnowledgeGraph> graph;
    ControlWeightTable weights;  // empty when the KB has no control references
    MetricRegistry registry;
    std::map<std::string, OrgProfile> profiles;
    std::map<std::string, ScoringParams> params;  // always holds "default"
    std::map<NodeId, double> control_costs;

    const OrgProfile& profile(const std::string& id) const;  // NotFoundError
    const ScoringParams& param_set(const std::string& name) const;  // NotFoundError
};

// Data directory layout: kb.json, profiles/*.json, optional params/*.json
// (named by file stem), optional registry.json overrides, optional
// costs.json. Throws IoError or the parser's error.
std::shared_ptr<const Snapshot> load_snapshot(const std::filesystem::path& data_dir, std::uint64_t version = 1);

// Holder of the current snapshot. Publishing swaps the pointer under a
// mutex; readers copy it and never wait on a writer for longer than that.
class SessionState {
public:
    explicit SessionState(std::shared_ptr<const Snapshot> initial);

    std::shared_ptr<const Snapshot> snapshot() const;

    // Validates the profile against the KB and publishes a new snapshot.
    // Returns the new version.
    std::uint64_t upload_profile(OrgProfile profile);

    // Reloads from `data_dir` and publishes the result as the next version.
    std::uint64_t reload(const std::filesystem::path& data_dir);

private:
    mutable std::mutex mutex_;
    std::shared_ptr<const Snapshot> current_;
};

struct WhatIfRequest {
    std::string profile_id;
    std::map<std::string, double> metric_overrides;  // metric id -> normalized risk value
    std::map<NodeId, bool> toggle_controls;          // control -> implemented
    std::optional<LikelihoodParams> params_override;
};

struct VariableDeltas {
    double exposure = 0.0;
    double traceability = 0.0;
    double motivation = 0.0;
    double systems_update = 0.0;
};

struct WhatIfResponse {
    std::string profile_id;
    VariableScores scores;
    LikelihoodResult likelihood;
    std::vector<ControlRecommendation> recommendations;
    NodeIdSet uncovered_techniques;
    double likelihood_delta = 0.0;  // raw, versus the unmodified profile
    double bounded_delta = 0.0;
    VariableDeltas per_variable_deltas;
    long long uncovered_delta = 0;
};

// Throws SyntaxError / SchemaError for malformed requests and RangeError
// for override values outside [0,1].
WhatIfRequest parse_whatif_request(std::string_view body);

// Recomputes everything downstream of the profile for a modified copy of
// the profile. Throws NotFoundError for unknown profile, metric or control
// ids and RangeError for override values outside [0,1].
WhatIfResponse whatif(const Snapshot& snapshot, const WhatIfRequest& request);

nlohmann::json to_json(const WhatIfResponse& response, const MetricRegistry& registry);

struct ApiResponse {
    int status = 200;
    nlohmann::json body;
};

// Transport-independent router for the /api/v1 endpoints.
class Api {
public:
    explicit Api(SessionState& state, std::optional<std::filesystem::path> data_dir = std::nullopt)
        : state_(state), data_dir_(std::move(data_dir)) {}

    // `target` may carry a query string.
    ApiResponse handle(std::string_view method, std::string_view target, std::string_view body) const;

private:
    SessionState& state_;
    std::optional<std::filesystem::path> data_dir_;
};

}  // namespace exposure
