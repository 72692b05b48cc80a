#include "exposure/service.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "exposure/errors.hpp"
#include "exposure/io.hpp"
#include "exposure/reports.hpp"
#include "json_util.hpp"

namespace exposure {

namespace fs = std::filesystem;
using nlohmann::json;

const OrgProfile& Snapshot::profile(const std::string& id) const {
    const auto it = profiles.find(id);
    if (it == profiles.end()) throw NotFoundError("unknown profile '" + id + "'");
    return it->second;
}

const ScoringParams& Snapshot::param_set(const std::string& name) const {
    const auto it = params.find(name);
    if (it == params.end()) throw NotFoundError("unknown parameter set '" + name + "'");
    return it->second;
}

namespace {

std::vector<fs::path> json_files(const fs::path& dir) {
    std::vector<fs::path> out;
    std::error_code ec;
    if (!fs::is_directory(dir, ec)) return out;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".json") out.push_back(entry.path());
    }
    std::sort(out.begin(), out.end());
    return out;
}

void check_profile(const KnowledgeGraph& graph, const OrgProfile& profile) {
    techniques_for_baseline(graph, profile.assets.technologies_in_use);
}

}  // namespace

std::shared_ptr<const Snapshot> load_snapshot(const fs::path& data_dir, std::uint64_t version) {
    auto snap = std::make_shared<Snapshot>();
    snap->version = version;
    snap->graph = std::make_shared<const KnowledgeGraph>(load_kb(read_text_file(data_dir / "kb.json")));
    try {
        snap->weights = control_weights(*snap->graph);
    } catch (const EmptyMappingError&) {
        // served with every weight at 0
    }
    snap->registry = default_registry();
    if (fs::exists(data_dir / "registry.json"))
        snap->registry = apply_registry_overrides(snap->registry, read_text_file(data_dir / "registry.json"));
    snap->params["default"] = ScoringParams{};
    for (const auto& p : json_files(data_dir / "params")) snap->params[p.stem().string()] = parse_params(read_text_file(p));
    for (const auto& p : json_files(data_dir / "profiles")) {
        OrgProfile profile = parse_profile(read_text_file(p));
        check_profile(*snap->graph, profile);
        const std::string id = profile.org_id;
        if (!snap->profiles.emplace(id, std::move(profile)).second)
            throw SchemaError("duplicate profile id '" + id + "' in " + p.string());
    }
    if (fs::exists(data_dir / "costs.json")) snap->control_costs = parse_control_costs(read_text_file(data_dir / "costs.json"));
    return snap;
}

SessionState::SessionState(std::shared_ptr<const Snapshot> initial) : current_(std::move(initial)) {}

std::shared_ptr<const Snapshot> SessionState::snapshot() const {
    std::lock_guard lock(mutex_);
    return current_;
}

std::uint64_t SessionState::upload_profile(OrgProfile profile) {
    std::lock_guard lock(mutex_);
    check_profile(*current_->graph, profile);
    auto next = std::make_shared<Snapshot>(*current_);
    next->version = current_->version + 1;
    const std::string id = profile.org_id;
    next->profiles.insert_or_assign(id, std::move(profile));
    current_ = std::move(next);
    return current_->version;
}

std::uint64_t SessionState::reload(const fs::path& data_dir) {
    const std::uint64_t base = snapshot()->version;
    auto fresh = load_snapshot(data_dir, base + 1);
    std::lock_guard lock(mutex_);
    // A concurrent upload may have advanced the version meanwhile.
    if (current_->version >= fresh->version) {
        auto copy = std::make_shared<Snapshot>(*fresh);
        copy->version = current_->version + 1;
        fresh = std::move(copy);
    }
    current_ = std::move(fresh);
    return current_->version;
}

WhatIfRequest parse_whatif_request(std::string_view body) {
    using namespace detail;
    const json root = parse_json(body);
    require_object(root, "whatif");
    check_keys(root, {"profile_id", "metric_overrides", "toggle_controls", "params_override"}, "whatif");
    if (!root.contains("profile_id")) throw SchemaError("whatif: 'profile_id' is required");
    WhatIfRequest req;
    req.profile_id = get_string(root["profile_id"], "whatif.profile_id");
    if (root.contains("metric_overrides")) {
        const auto& o = require_object(root["metric_overrides"], "whatif.metric_overrides");
        for (auto it = o.begin(); it != o.end(); ++it)
            req.metric_overrides[it.key()] = get_fraction(it.value(), "whatif.metric_overrides." + it.key());
    }
    if (root.contains("toggle_controls")) {
        const auto& t = require_object(root["toggle_controls"], "whatif.toggle_controls");
        for (auto it = t.begin(); it != t.end(); ++it) {
            if (!NodeId::is_valid(it.key())) throw SchemaError("whatif: invalid control id '" + it.key() + "'");
            req.toggle_controls[NodeId(it.key())] = get_bool(it.value(), "whatif.toggle_controls." + it.key());
        }
    }
    if (root.contains("params_override")) {
        const auto& p = require_object(root["params_override"], "whatif.params_override");
        check_keys(p, {"exp_e", "exp_m", "exp_t", "exp_u", "floor_epsilon"}, "whatif.params_override");
        LikelihoodParams lp;
        if (p.contains("exp_e")) lp.exp_e = get_number(p["exp_e"], "params_override.exp_e");
        if (p.contains("exp_m")) lp.exp_m = get_number(p["exp_m"], "params_override.exp_m");
        if (p.contains("exp_t")) lp.exp_t = get_number(p["exp_t"], "params_override.exp_t");
        if (p.contains("exp_u")) lp.exp_u = get_number(p["exp_u"], "params_override.exp_u");
        if (p.contains("floor_epsilon")) lp.floor_epsilon = get_number(p["floor_epsilon"], "params_override.floor_epsilon");
        try {
            lp.validate();
        } catch (const DomainError& e) {
            throw RangeError(std::string("whatif.params_override: ") + e.what());
        }
        req.params_override = lp;
    }
    return req;
}

WhatIfResponse whatif(const Snapshot& snap, const WhatIfRequest& req) {
    const OrgProfile& base = snap.profile(req.profile_id);
    const KnowledgeGraph& graph = *snap.graph;
    for (const auto& [id, value] : req.metric_overrides) {
        if (!find_spec(snap.registry, id)) throw NotFoundError("unknown metric '" + id + "'");
        if (!(value >= 0.0 && value <= 1.0)) throw RangeError("override for '" + id + "' must lie in [0,1]");
    }
    for (const auto& [id, on] : req.toggle_controls) {
        const KbNode* node = graph.find(id);
        if (!node || node->kind != NodeKind::Countermeasure)
            throw NotFoundError("unknown control '" + id.str() + "'");
    }
    const LikelihoodParams& base_params = snap.param_set("default").likelihood;
    if (req.params_override) req.params_override->validate();

    const VariableScores base_scores = compute_variable_scores(base, snap.registry);
    const LikelihoodResult base_likelihood = likelihood(base_scores, base_params);
    const NodeIdSet base_uncovered = uncovered_techniques(graph, base);

    OrgProfile modified = base;
    for (const auto& [id, on] : req.toggle_controls) {
        if (on) {
            modified.implemented_controls.insert(id);
        } else {
            modified.implemented_controls.erase(id);
        }
    }

    WhatIfResponse r;
    r.profile_id = req.profile_id;
    if (req.metric_overrides.empty()) {
        r.scores = base_scores;
    } else {
        std::vector<MetricValue> values = base_scores.per_metric;
        for (const auto& [id, value] : req.metric_overrides) {
            auto it = std::find_if(values.begin(), values.end(), [&](const MetricValue& v) { return v.metric_id == id; });
            if (it == values.end()) {
                values.push_back({id, value, value});
            } else {
                it->normalized = value;
            }
        }
        r.scores = aggregate_scores(std::move(values), snap.registry);
    }
    r.likelihood = likelihood(r.scores, req.params_override.value_or(base_params));
    r.recommendations = recommend(graph, modified, r.scores, snap.weights);
    if (!snap.control_costs.empty()) apply_cost_gate(r.recommendations, snap.control_costs, modified.revenue);
    r.uncovered_techniques = uncovered_techniques(graph, modified);

    r.likelihood_delta = r.likelihood.raw - base_likelihood.raw;
    r.bounded_delta = r.likelihood.bounded - base_likelihood.bounded;
    r.per_variable_deltas = {r.scores.exposure - base_scores.exposure,
                             r.scores.traceability - base_scores.traceability,
                             r.scores.motivation - base_scores.motivation,
                             r.scores.systems_update - base_scores.systems_update};
    r.uncovered_delta = static_cast<long long>(r.uncovered_techniques.size()) -
                        static_cast<long long>(base_uncovered.size());
    return r;
}

json to_json(const WhatIfResponse& r, const MetricRegistry& registry) {
    json uncovered = json::array();
    for (const auto& t : r.uncovered_techniques) uncovered.push_back(t.str());
    const auto& d = r.per_variable_deltas;
    return {{"profile_id", r.profile_id},
            {"scores", report::scores(r.scores, registry)},
            {"likelihood", report::likelihood(r.likelihood)},
            {"recommendations", report::recommendations(r.recommendations)},
            {"uncovered_techniques", uncovered},
            {"delta_vs_base",
             {{"likelihood_delta", r.likelihood_delta},
              {"bounded_delta", r.bounded_delta},
              {"uncovered_delta", r.uncovered_delta},
              {"per_variable_deltas",
               {{"E", d.exposure}, {"T", d.traceability}, {"M", d.motivation}, {"U", d.systems_update}}}}}};
}

// ---------------------------------------------------------------------------

namespace {

struct MethodNotAllowed {};

ApiResponse error_response(int status, const std::string& error, const std::string& detail) {
    return {status, {{"error", error}, {"detail", detail}}};
}

std::vector<std::string_view> split_path(std::string_view path) {
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    while (start <= path.size()) {
        auto end = path.find('/', start);
        if (end == std::string_view::npos) end = path.size();
        if (end > start) parts.push_back(path.substr(start, end - start));
        start = end + 1;
    }
    return parts;
}

std::optional<std::string> query_value(std::string_view query, std::string_view key) {
    std::size_t start = 0;
    while (start < query.size()) {
        auto end = query.find('&', start);
        if (end == std::string_view::npos) end = query.size();
        const auto pair = query.substr(start, end - start);
        const auto eq = pair.find('=');
        if (pair.substr(0, eq) == key) return std::string(eq == std::string_view::npos ? "" : pair.substr(eq + 1));
        start = end + 1;
    }
    return std::nullopt;
}

}  // namespace

ApiResponse Api::handle(std::string_view method, std::string_view target, std::string_view body) const {
    const auto qpos = target.find('?');
    const std::string_view path = target.substr(0, qpos);
    const std::string_view query = qpos == std::string_view::npos ? std::string_view{} : target.substr(qpos + 1);
    const auto parts = split_path(path);
    auto snap = state_.snapshot();

    ApiResponse res;
    try {
        auto route = [&](std::string_view m, std::initializer_list<std::string_view> pattern) {
            if (parts.size() != pattern.size()) return false;
            std::size_t i = 0;
            for (auto p : pattern) {
                if (p != "*" && p != parts[i]) return false;
                ++i;
            }
            if (method != m) throw MethodNotAllowed{};
            return true;
        };
        const bool v1 = parts.size() >= 2 && parts[0] == "api" && parts[1] == "v1";
        if (!v1) {
            res = error_response(404, "not_found", "no route for " + std::string(path));
        } else if (route("GET", {"api", "v1", "kb", "summary"})) {
            res.body = report::kb_summary(*snap->graph);
            res.body["weights"] = report::weights(snap->weights);
            res.body["profiles"] = snap->profiles.size();
        } else if (route("GET", {"api", "v1", "metrics", "registry"})) {
            res.body = {{"metrics", report::registry(snap->registry)}};
        } else if (route("POST", {"api", "v1", "profiles"})) {
            OrgProfile profile = parse_profile(body);
            const std::string id = profile.org_id;
            state_.upload_profile(std::move(profile));
            snap = state_.snapshot();
            res.status = 201;
            res.body = {{"profile_id", id}};
        } else if (route("GET", {"api", "v1", "profiles", "*", "scores"})) {
            const std::string id(parts[3]);
            const auto scores = compute_variable_scores(snap->profile(id), snap->registry);
            res.body = {{"profile_id", id}, {"scores", report::scores(scores, snap->registry)}};
        } else if (route("GET", {"api", "v1", "profiles", "*", "likelihood"})) {
            const std::string id(parts[3]);
            const std::string set = query_value(query, "params").value_or("default");
            const ScoringParams& params = snap->param_set(set);
            const auto scores = compute_variable_scores(snap->profile(id), snap->registry);
            res.body = {{"profile_id", id},
                        {"params", set},
                        {"E", scores.exposure},
                        {"T", scores.traceability},
                        {"M", scores.motivation},
                        {"U", scores.systems_update},
                        {"likelihood", report::likelihood(likelihood(scores, params.likelihood))}};
        } else if (route("GET", {"api", "v1", "profiles", "*", "recommendations"})) {
            const std::string id(parts[3]);
            const OrgProfile& profile = snap->profile(id);
            const auto scores = compute_variable_scores(profile, snap->registry);
            auto recs = recommend(*snap->graph, profile, scores, snap->weights);
            if (!snap->control_costs.empty()) apply_cost_gate(recs, snap->control_costs, profile.revenue);
            res.body = {{"profile_id", id},
                        {"recommendations", report::recommendations(recs)},
                        {"actions", report::metric_actions(metric_actions(scores, snap->registry))}};
        } else if (route("POST", {"api", "v1", "whatif"})) {
            const WhatIfRequest req = parse_whatif_request(body);
            res.body = to_json(whatif(*snap, req), snap->registry);
        } else if (route("POST", {"api", "v1", "reload"})) {
            if (!data_dir_) throw NotFoundError("no data directory configured");
            state_.reload(*data_dir_);
            snap = state_.snapshot();
            res.body = {{"reloaded", true}};
        } else {
            res = error_response(404, "not_found", "no route for " + std::string(path));
        }
    } catch (const MethodNotAllowed&) {
        res = error_response(405, "method_not_allowed", std::string(method) + " not allowed on " + std::string(path));
    } catch (const NotFoundError& e) {
        res = error_response(404, "not_found", e.what());
    } catch (const UnknownNodeError& e) {
        res = error_response(400, "validation_error", e.what());
    } catch (const RangeError& e) {
        res = error_response(422, "range_error", e.what());
    } catch (const DomainError& e) {
        res = error_response(422, "range_error", e.what());
    } catch (const Error& e) {
        res = error_response(400, "validation_error", std::string(e.kind()) + ": " + e.what());
    } catch (const std::exception& e) {
        res = error_response(500, "internal_error", e.what());
    }
    res.body["snapshot_version"] = snap->version;
    return res;
}

}  // namespace exposure
