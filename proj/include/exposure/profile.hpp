#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "exposure/kb_graph.hpp"

namespace exposure {

enum class LocationAccess { Physical, OnPremises, Vpn, Internet, Cloud };
enum class SymmetryTag { TimeAsymmetric, GainAsymmetric, LikelihoodAsymmetric };

std::string_view to_string(LocationAccess access);
std::string_view to_string(SymmetryTag tag);

struct Device {
    std::string device_id;
    bool registered = false;
    NodeIdSet technology_ids;
    bool logging_enabled = false;
    bool updatable = true;
    bool patched = false;
    std::set<LocationAccess> location_access;

    friend bool operator==(const Device&, const Device&) = default;
};

struct AssetInventory {
    std::vector<Device> devices;
    NodeIdSet technologies_in_use;  // always a superset of the device technologies

    std::size_t total_devices() const { return devices.size(); }
    std::size_t registered_devices() const;
    std::size_t unregistered_devices() const { return total_devices() - registered_devices(); }

    friend bool operator==(const AssetInventory&, const AssetInventory&) = default;
};

struct User {
    std::string user_id;
    bool privileged = false;
    bool authenticated = false;
    bool shared_account = false;

    friend bool operator==(const User&, const User&) = default;
};

struct UserInventory {
    std::vector<User> users;

    std::size_t privileged_users() const;

    friend bool operator==(const UserInventory&, const UserInventory&) = default;
};

struct NetworkSurface {
    std::uint64_t public_ips = 0;
    std::uint64_t necessary_public_ips = 0;
    std::uint64_t visible_ports = 0;
    std::uint64_t necessary_visible_ports = 0;

    friend bool operator==(const NetworkSurface&, const NetworkSurface&) = default;
};

struct LoggingPosture {
    std::uint64_t expected_authentications = 0;
    std::uint64_t observed_authentications = 0;
    std::uint64_t expected_transactions = 0;
    std::uint64_t observed_transactions = 0;
    std::uint64_t devices_with_logging = 0;
    std::uint64_t role_authorized_actions = 0;
    std::uint64_t total_actions_observed = 0;

    friend bool operator==(const LoggingPosture&, const LoggingPosture&) = default;
};

struct UpdatePosture {
    std::uint64_t total_systems = 0;
    std::uint64_t patched_systems = 0;
    std::uint64_t legacy_unupdatable = 0;
    double update_delay_days = 0.0;
    double critical_patch_days = 0.0;
    std::uint64_t policy_version_lag = 0;

    friend bool operator==(const UpdatePosture&, const UpdatePosture&) = default;
};

// All fields in [0,1], oriented so that 1 is the most attractive target.
// Absent evidence defaults to the 0.5 midpoint.
struct MotivationInputs {
    double asset_value_class = 0.5;
    double restorable_fraction = 0.5;
    double public_harm_fraction = 0.5;
    double residual_vuln_fraction = 0.5;
    double control_maturity = 0.5;

    friend bool operator==(const MotivationInputs&, const MotivationInputs&) = default;
};

// The cyber exposure profile of one organization. Sections that were not
// supplied stay empty (nullopt) so scoring can tell "no evidence" from zero.
struct OrgProfile {
    std::string org_id;
    std::optional<std::string> sector;  // opaque label, not scored
    AssetInventory assets;
    UserInventory users;
    std::optional<NetworkSurface> network;
    std::optional<LoggingPosture> logging;
    std::optional<UpdatePosture> updates;
    MotivationInputs motivation;
    NodeIdSet implemented_controls;
    std::set<SymmetryTag> symmetry_tags;
    std::optional<double> revenue;

    friend bool operator==(const OrgProfile&, const OrgProfile&) = default;
};

// Partial telemetry from one source. Network fields merge one by one so a
// port scan can supply visible ports while the operator declares the
// "necessary" counts.
struct NetworkFragment {
    std::optional<std::uint64_t> public_ips;
    std::optional<std::uint64_t> necessary_public_ips;
    std::optional<std::uint64_t> visible_ports;
    std::optional<std::uint64_t> necessary_visible_ports;
};

struct ProfileFragment {
    std::string source;
    std::vector<Device> devices;
    NodeIdSet technologies_in_use;
    std::vector<User> users;
    NetworkFragment network;
    std::optional<LoggingPosture> logging;
    std::optional<UpdatePosture> updates;
    std::optional<MotivationInputs> motivation;
    NodeIdSet implemented_controls;
    std::set<SymmetryTag> symmetry_tags;
    std::optional<double> revenue;
};

// Profile documents. Throws SyntaxError, SchemaError or RangeError.
OrgProfile parse_profile(std::string_view text);
std::string serialize_profile(const OrgProfile& profile);

// Fragment documents use the profile schema with every field optional.
ProfileFragment parse_fragment(std::string_view text);

// Fragment values override the base. Devices and users concatenate; a
// repeated device or user id, or two fragments setting the same scalar
// field, raises ConflictError.
OrgProfile merge_profile(const OrgProfile& base, const std::vector<ProfileFragment>& fragments);

// ---------------------------------------------------------------------------
// Port-scan XML (nmaprun > host > address + ports > port > state)

struct ScannedPort {
    std::uint32_t port = 0;
    std::string protocol;
    std::string state;
};

struct ScannedHost {
    std::string address;
    std::vector<ScannedPort> ports;

    std::size_t open_ports() const;
};

struct PortScanResult {
    std::vector<ScannedHost> hosts;  // ordered by address
    std::size_t port_elements = 0;
    std::uint64_t visible_ports = 0;
    std::uint64_t public_hosts = 0;

    ProfileFragment to_fragment() const;
};

PortScanResult parse_port_scan_xml(std::string_view text);

bool is_public_address(std::string_view address);

// ---------------------------------------------------------------------------
// Account files (name:uid:group[:...])

UserInventory parse_account_file(std::string_view text, const std::set<std::string>& privileged_markers);

// ---------------------------------------------------------------------------
// Connectors. Live intelligence sources are replayed from files on disk.

enum class SourceCategory { Inventory, MalwareIntelligence, IndicatorsOfCompromise, AdversaryBehaviour };

class TelemetryConnector {
public:
    virtual ~TelemetryConnector() = default;
    virtual std::string name() const = 0;
    virtual SourceCategory category() const = 0;
    virtual ProfileFragment fetch() = 0;
};

class FileReplayConnector final : public TelemetryConnector {
public:
    FileReplayConnector(std::string name, SourceCategory category, std::filesystem::path path);

    std::string name() const override { return name_; }
    SourceCategory category() const override { return category_; }
    ProfileFragment fetch() override;

private:
    std::string name_;
    SourceCategory category_;
    std::filesystem::path path_;
};

}  // namespace exposure
