#include "exposure/profile.hpp"

#include <algorithm>
#include <array>
#include <map>

#include "exposure/errors.hpp"
#include "exposure/io.hpp"
#include "json_util.hpp"

namespace exposure {

using namespace detail;

namespace {

constexpr std::array<std::string_view, 5> kLocationNames{"Physical", "OnPremises", "Vpn", "Internet",
                                                         "Cloud"};
constexpr std::array<std::string_view, 3> kSymmetryNames{"TimeAsymmetric", "GainAsymmetric",
                                                         "LikelihoodAsymmetric"};

template <typename Enum, std::size_t N>
Enum parse_enum(const std::array<std::string_view, N>& names, const json& j, const std::string& where) {
    const std::string text = get_string(j, where);
    for (std::size_t i = 0; i < N; ++i) {
        if (names[i] == text) return static_cast<Enum>(i);
    }
    throw SchemaError(where + ": unknown value '" + text + "'");
}

NodeIdSet parse_id_set(const json& j, const std::string& where) {
    require_array(j, where);
    NodeIdSet out;
    for (const auto& item : j) {
        const std::string id = get_string(item, where);
        if (!NodeId::is_valid(id)) throw SchemaError(where + ": invalid node id '" + id + "'");
        out.insert(NodeId(id));
    }
    return out;
}

Device parse_device(const json& j, const std::string& where) {
    require_object(j, where);
    check_keys(j, {"device_id", "registered", "technology_ids", "logging_enabled", "updatable", "patched",
                   "location_access"},
               where);
    Device d;
    if (!j.contains("device_id")) throw SchemaError(where + ": missing 'device_id'");
    d.device_id = get_string(j["device_id"], where + ".device_id");
    if (d.device_id.empty()) throw SchemaError(where + ": empty device_id");
    if (j.contains("registered")) d.registered = get_bool(j["registered"], where + ".registered");
    if (j.contains("technology_ids")) d.technology_ids = parse_id_set(j["technology_ids"], where + ".technology_ids");
    if (j.contains("logging_enabled"))
        d.logging_enabled = get_bool(j["logging_enabled"], where + ".logging_enabled");
    if (j.contains("updatable")) d.updatable = get_bool(j["updatable"], where + ".updatable");
    if (j.contains("patched")) d.patched = get_bool(j["patched"], where + ".patched");
    if (j.contains("location_access")) {
        require_array(j["location_access"], where + ".location_access");
        for (const auto& a : j["location_access"])
            d.location_access.insert(parse_enum<LocationAccess>(kLocationNames, a, where + ".location_access"));
    }
    return d;
}

User parse_user(const json& j, const std::string& where) {
    require_object(j, where);
    check_keys(j, {"user_id", "privileged", "authenticated", "shared_account"}, where);
    User u;
    if (!j.contains("user_id")) throw SchemaError(where + ": missing 'user_id'");
    u.user_id = get_string(j["user_id"], where + ".user_id");
    if (u.user_id.empty()) throw SchemaError(where + ": empty user_id");
    if (j.contains("privileged")) u.privileged = get_bool(j["privileged"], where + ".privileged");
    if (j.contains("authenticated")) u.authenticated = get_bool(j["authenticated"], where + ".authenticated");
    if (j.contains("shared_account")) u.shared_account = get_bool(j["shared_account"], where + ".shared_account");
    return u;
}

NetworkFragment parse_network(const json& j) {
    require_object(j, "network");
    check_keys(j, {"public_ips", "necessary_public_ips", "visible_ports", "necessary_visible_ports"}, "network");
    NetworkFragment n;
    auto field = [&](const char* name, std::optional<std::uint64_t>& out) {
        if (j.contains(name)) out = get_count(j[name], std::string("network.") + name);
    };
    field("public_ips", n.public_ips);
    field("necessary_public_ips", n.necessary_public_ips);
    field("visible_ports", n.visible_ports);
    field("necessary_visible_ports", n.necessary_visible_ports);
    return n;
}

LoggingPosture parse_logging(const json& j) {
    require_object(j, "logging");
    check_keys(j, {"expected_authentications", "observed_authentications", "expected_transactions",
                   "observed_transactions", "devices_with_logging", "role_authorized_actions",
                   "total_actions_observed"},
               "logging");
    LoggingPosture l;
    auto field = [&](const char* name, std::uint64_t& out) {
        if (j.contains(name)) out = get_count(j[name], std::string("logging.") + name);
    };
    field("expected_authentications", l.expected_authentications);
    field("observed_authentications", l.observed_authentications);
    field("expected_transactions", l.expected_transactions);
    field("observed_transactions", l.observed_transactions);
    field("devices_with_logging", l.devices_with_logging);
    field("role_authorized_actions", l.role_authorized_actions);
    field("total_actions_observed", l.total_actions_observed);
    return l;
}

UpdatePosture parse_updates(const json& j) {
    require_object(j, "updates");
    check_keys(j, {"total_systems", "patched_systems", "legacy_unupdatable", "update_delay_days",
                   "critical_patch_days", "policy_version_lag"},
               "updates");
    UpdatePosture u;
    if (j.contains("total_systems")) u.total_systems = get_count(j["total_systems"], "updates.total_systems");
    if (j.contains("patched_systems")) u.patched_systems = get_count(j["patched_systems"], "updates.patched_systems");
    if (j.contains("legacy_unupdatable"))
        u.legacy_unupdatable = get_count(j["legacy_unupdatable"], "updates.legacy_unupdatable");
    if (j.contains("update_delay_days"))
        u.update_delay_days = get_non_negative(j["update_delay_days"], "updates.update_delay_days");
    if (j.contains("critical_patch_days"))
        u.critical_patch_days = get_non_negative(j["critical_patch_days"], "updates.critical_patch_days");
    if (j.contains("policy_version_lag"))
        u.policy_version_lag = get_count(j["policy_version_lag"], "updates.policy_version_lag");
    if (u.patched_systems + u.legacy_unupdatable > u.total_systems)
        throw RangeError("updates: patched_systems + legacy_unupdatable exceeds total_systems");
    return u;
}

MotivationInputs parse_motivation(const json& j) {
    require_object(j, "motivation");
    check_keys(j, {"asset_value_class", "restorable_fraction", "public_harm_fraction", "residual_vuln_fraction",
                   "control_maturity"},
               "motivation");
    MotivationInputs m;
    auto field = [&](const char* name, double& out) {
        if (j.contains(name)) out = get_fraction(j[name], std::string("motivation.") + name);
    };
    field("asset_value_class", m.asset_value_class);
    field("restorable_fraction", m.restorable_fraction);
    field("public_harm_fraction", m.public_harm_fraction);
    field("residual_vuln_fraction", m.residual_vuln_fraction);
    field("control_maturity", m.control_maturity);
    return m;
}

// Parses every section shared by profiles and fragments.
ProfileFragment parse_sections(const json& root, const std::string& doc_name) {
    ProfileFragment f;
    if (root.contains("assets")) {
        const auto& assets = require_object(root["assets"], "assets");
        check_keys(assets, {"devices", "technologies_in_use"}, "assets");
        if (assets.contains("devices")) {
            require_array(assets["devices"], "assets.devices");
            std::set<std::string> seen;
            for (std::size_t i = 0; i < assets["devices"].size(); ++i) {
                Device d = parse_device(assets["devices"][i], "assets.devices[" + std::to_string(i) + "]");
                if (!seen.insert(d.device_id).second)
                    throw SchemaError(doc_name + ": duplicate device_id '" + d.device_id + "'");
                f.devices.push_back(std::move(d));
            }
        }
        if (assets.contains("technologies_in_use"))
            f.technologies_in_use = parse_id_set(assets["technologies_in_use"], "assets.technologies_in_use");
    }
    if (root.contains("users")) {
        require_array(root["users"], "users");
        std::set<std::string> seen;
        for (std::size_t i = 0; i < root["users"].size(); ++i) {
            User u = parse_user(root["users"][i], "users[" + std::to_string(i) + "]");
            if (!seen.insert(u.user_id).second)
                throw SchemaError(doc_name + ": duplicate user_id '" + u.user_id + "'");
            f.users.push_back(std::move(u));
        }
    }
    if (root.contains("network")) f.network = parse_network(root["network"]);
    if (root.contains("logging")) f.logging = parse_logging(root["logging"]);
    if (root.contains("updates")) f.updates = parse_updates(root["updates"]);
    if (root.contains("motivation")) f.motivation = parse_motivation(root["motivation"]);
    if (root.contains("implemented_controls"))
        f.implemented_controls = parse_id_set(root["implemented_controls"], "implemented_controls");
    if (root.contains("symmetry_tags")) {
        require_array(root["symmetry_tags"], "symmetry_tags");
        for (const auto& t : root["symmetry_tags"])
            f.symmetry_tags.insert(parse_enum<SymmetryTag>(kSymmetryNames, t, "symmetry_tags"));
    }
    if (root.contains("revenue")) f.revenue = get_non_negative(root["revenue"], "revenue");
    return f;
}

void add_device_technologies(AssetInventory& assets) {
    for (const auto& d : assets.devices)
        assets.technologies_in_use.insert(d.technology_ids.begin(), d.technology_ids.end());
}

NetworkSurface resolve_network(const NetworkFragment& n, NetworkSurface base = {}) {
    if (n.public_ips) base.public_ips = *n.public_ips;
    if (n.necessary_public_ips) base.necessary_public_ips = *n.necessary_public_ips;
    if (n.visible_ports) base.visible_ports = *n.visible_ports;
    if (n.necessary_visible_ports) base.necessary_visible_ports = *n.necessary_visible_ports;
    return base;
}

bool has_any(const NetworkFragment& n) {
    return n.public_ips || n.necessary_public_ips || n.visible_ports || n.necessary_visible_ports;
}

}  // namespace

std::string_view to_string(LocationAccess access) { return kLocationNames[static_cast<std::size_t>(access)]; }
std::string_view to_string(SymmetryTag tag) { return kSymmetryNames[static_cast<std::size_t>(tag)]; }

std::size_t AssetInventory::registered_devices() const {
    return static_cast<std::size_t>(
        std::count_if(devices.begin(), devices.end(), [](const Device& d) { return d.registered; }));
}

std::size_t UserInventory::privileged_users() const {
    return static_cast<std::size_t>(
        std::count_if(users.begin(), users.end(), [](const User& u) { return u.privileged; }));
}

OrgProfile parse_profile(std::string_view text) {
    const json root = parse_json(text);
    require_object(root, "profile");
    check_keys(root, {"org_id", "sector", "assets", "users", "network", "logging", "updates", "motivation",
                      "implemented_controls", "symmetry_tags", "revenue"},
               "profile");
    if (!root.contains("org_id")) throw SchemaError("profile: missing 'org_id'");

    OrgProfile p;
    p.org_id = get_string(root["org_id"], "org_id");
    if (p.org_id.empty()) throw SchemaError("profile: org_id must be non-empty");
    if (root.contains("sector")) p.sector = get_string(root["sector"], "sector");

    ProfileFragment f = parse_sections(root, "profile");
    p.assets.devices = std::move(f.devices);
    p.assets.technologies_in_use = std::move(f.technologies_in_use);
    add_device_technologies(p.assets);
    p.users.users = std::move(f.users);
    if (root.contains("network")) p.network = resolve_network(f.network);
    p.logging = f.logging;
    p.updates = f.updates;
    if (f.motivation) p.motivation = *f.motivation;
    p.implemented_controls = std::move(f.implemented_controls);
    p.symmetry_tags = std::move(f.symmetry_tags);
    p.revenue = f.revenue;
    return p;
}

ProfileFragment parse_fragment(std::string_view text) {
    const json root = parse_json(text);
    require_object(root, "fragment");
    check_keys(root, {"source", "assets", "users", "network", "logging", "updates", "motivation",
                      "implemented_controls", "symmetry_tags", "revenue"},
               "fragment");
    ProfileFragment f = parse_sections(root, "fragment");
    if (root.contains("source")) f.source = get_string(root["source"], "source");
    return f;
}

std::string serialize_profile(const OrgProfile& p) {
    json root;
    root["org_id"] = p.org_id;
    if (p.sector) root["sector"] = *p.sector;

    json devices = json::array();
    for (const auto& d : p.assets.devices) {
        json tech = json::array();
        for (const auto& t : d.technology_ids) tech.push_back(t.str());
        json loc = json::array();
        for (auto a : d.location_access) loc.push_back(to_string(a));
        devices.push_back({{"device_id", d.device_id},
                           {"registered", d.registered},
                           {"technology_ids", std::move(tech)},
                           {"logging_enabled", d.logging_enabled},
                           {"updatable", d.updatable},
                           {"patched", d.patched},
                           {"location_access", std::move(loc)}});
    }
    json techs = json::array();
    for (const auto& t : p.assets.technologies_in_use) techs.push_back(t.str());
    root["assets"] = {{"devices", std::move(devices)}, {"technologies_in_use", std::move(techs)}};

    json users = json::array();
    for (const auto& u : p.users.users)
        users.push_back({{"user_id", u.user_id},
                         {"privileged", u.privileged},
                         {"authenticated", u.authenticated},
                         {"shared_account", u.shared_account}});
    root["users"] = std::move(users);

    if (p.network)
        root["network"] = {{"public_ips", p.network->public_ips},
                           {"necessary_public_ips", p.network->necessary_public_ips},
                           {"visible_ports", p.network->visible_ports},
                           {"necessary_visible_ports", p.network->necessary_visible_ports}};
    if (p.logging)
        root["logging"] = {{"expected_authentications", p.logging->expected_authentications},
                           {"observed_authentications", p.logging->observed_authentications},
                           {"expected_transactions", p.logging->expected_transactions},
                           {"observed_transactions", p.logging->observed_transactions},
                           {"devices_with_logging", p.logging->devices_with_logging},
                           {"role_authorized_actions", p.logging->role_authorized_actions},
                           {"total_actions_observed", p.logging->total_actions_observed}};
    if (p.updates)
        root["updates"] = {{"total_systems", p.updates->total_systems},
                           {"patched_systems", p.updates->patched_systems},
                           {"legacy_unupdatable", p.updates->legacy_unupdatable},
                           {"update_delay_days", p.updates->update_delay_days},
                           {"critical_patch_days", p.updates->critical_patch_days},
                           {"policy_version_lag", p.updates->policy_version_lag}};
    root["motivation"] = {{"asset_value_class", p.motivation.asset_value_class},
                          {"restorable_fraction", p.motivation.restorable_fraction},
                          {"public_harm_fraction", p.motivation.public_harm_fraction},
                          {"residual_vuln_fraction", p.motivation.residual_vuln_fraction},
                          {"control_maturity", p.motivation.control_maturity}};

    json controls = json::array();
    for (const auto& c : p.implemented_controls) controls.push_back(c.str());
    root["implemented_controls"] = std::move(controls);
    json tags = json::array();
    for (auto t : p.symmetry_tags) tags.push_back(to_string(t));
    root["symmetry_tags"] = std::move(tags);
    if (p.revenue) root["revenue"] = *p.revenue;
    return root.dump(2) + "\n";
}

OrgProfile merge_profile(const OrgProfile& base, const std::vector<ProfileFragment>& fragments) {
    OrgProfile out = base;

    std::set<std::string> device_ids, user_ids;
    for (const auto& d : base.assets.devices) device_ids.insert(d.device_id);
    for (const auto& u : base.users.users) user_ids.insert(u.user_id);

    // Which fragment already claimed a scalar field.
    std::map<std::string, std::string> claimed;
    auto claim = [&](const std::string& field, const ProfileFragment& f) {
        auto [it, inserted] = claimed.emplace(field, f.source);
        if (!inserted)
            throw ConflictError("field '" + field + "' set by more than one fragment ('" + it->second + "', '" +
                                f.source + "')");
    };

    for (const auto& f : fragments) {
        for (const auto& d : f.devices) {
            if (!device_ids.insert(d.device_id).second)
                throw ConflictError("duplicate device_id '" + d.device_id + "'");
            out.assets.devices.push_back(d);
        }
        for (const auto& u : f.users) {
            if (!user_ids.insert(u.user_id).second) throw ConflictError("duplicate user_id '" + u.user_id + "'");
            out.users.users.push_back(u);
        }
        out.assets.technologies_in_use.insert(f.technologies_in_use.begin(), f.technologies_in_use.end());

        if (has_any(f.network)) {
            if (f.network.public_ips) claim("network.public_ips", f);
            if (f.network.necessary_public_ips) claim("network.necessary_public_ips", f);
            if (f.network.visible_ports) claim("network.visible_ports", f);
            if (f.network.necessary_visible_ports) claim("network.necessary_visible_ports", f);
            out.network = resolve_network(f.network, out.network.value_or(NetworkSurface{}));
        }
        if (f.logging) {
            claim("logging", f);
            out.logging = f.logging;
        }
        if (f.updates) {
            claim("updates", f);
            out.updates = f.updates;
        }
        if (f.motivation) {
            claim("motivation", f);
            out.motivation = *f.motivation;
        }
        if (f.revenue) {
            claim("revenue", f);
            out.revenue = f.revenue;
        }
        out.implemented_controls.insert(f.implemented_controls.begin(), f.implemented_controls.end());
        out.symmetry_tags.insert(f.symmetry_tags.begin(), f.symmetry_tags.end());
    }

    // Device and user order must not depend on fragment order.
    if (out.assets.devices.size() != base.assets.devices.size())
        std::sort(out.assets.devices.begin(), out.assets.devices.end(),
                  [](const Device& a, const Device& b) { return a.device_id < b.device_id; });
    if (out.users.users.size() != base.users.users.size())
        std::sort(out.users.users.begin(), out.users.users.end(),
                  [](const User& a, const User& b) { return a.user_id < b.user_id; });
    add_device_technologies(out.assets);
    return out;
}

FileReplayConnector::FileReplayConnector(std::string name, SourceCategory category, std::filesystem::path path)
    : name_(std::move(name)), category_(category), path_(std::move(path)) {}

ProfileFragment FileReplayConnector::fetch() {
    const std::string text = read_text_file(path_);
    ProfileFragment f =
        path_.extension() == ".xml" ? parse_port_scan_xml(text).to_fragment() : parse_fragment(text);
    if (f.source.empty()) f.source = name_;
    return f;
}

}  // namespace exposure
