#include "exposure/attributes.hpp"

#include <array>
#include <utility>

namespace exposure {
namespace {

constexpr std::array<std::pair<AttributeTag, std::string_view>, 30> kNames{{
    {AttributeTag::Preventive, "Preventive"},
    {AttributeTag::Detective, "Detective"},
    {AttributeTag::Corrective, "Corrective"},
    {AttributeTag::Confidentiality, "Confidentiality"},
    {AttributeTag::Integrity, "Integrity"},
    {AttributeTag::Availability, "Availability"},
    {AttributeTag::Identify, "Identify"},
    {AttributeTag::Protect, "Protect"},
    {AttributeTag::Detect, "Detect"},
    {AttributeTag::Respond, "Respond"},
    {AttributeTag::Recover, "Recover"},
    {AttributeTag::Governance, "Governance"},
    {AttributeTag::Asset_management, "Asset_management"},
    {AttributeTag::Information_protection, "Information_protection"},
    {AttributeTag::Human_resource_security, "Human_resource_security"},
    {AttributeTag::Physical_security, "Physical_security"},
    {AttributeTag::System_and_network_security, "System_and_network_security"},
    {AttributeTag::Application_security, "Application_security"},
    {AttributeTag::Secure_configuration, "Secure_configuration"},
    {AttributeTag::Identity_and_access_management, "Identity_and_access_management"},
    {AttributeTag::Threat_and_vulnerability_management, "Threat_and_vulnerability_management"},
    {AttributeTag::Continuity, "Continuity"},
    {AttributeTag::Supplier_relationships_security, "Supplier_relationships_security"},
    {AttributeTag::Legal_and_compliance, "Legal_and_compliance"},
    {AttributeTag::Information_security_event_management, "Information_security_event_management"},
    {AttributeTag::Information_security_assurance, "Information_security_assurance"},
    {AttributeTag::Governance_and_Ecosystem, "Governance_and_Ecosystem"},
    {AttributeTag::Protection, "Protection"},
    {AttributeTag::Defence, "Defence"},
    {AttributeTag::Resilience, "Resilience"},
}};

}  // namespace

std::string_view to_string(AttributeTag tag) {
    return kNames[static_cast<std::size_t>(tag)].second;
}

std::optional<AttributeTag> parse_attribute(std::string_view name) {
    if (!name.empty() && name.front() == '#') name.remove_prefix(1);
    for (const auto& [tag, text] : kNames) {
        if (text == name) return tag;
    }
    return std::nullopt;
}

AttributeFamily family_of(AttributeTag tag) {
    if (tag <= AttributeTag::Corrective) return AttributeFamily::ControlType;
    if (tag <= AttributeTag::Availability) return AttributeFamily::SecurityProperty;
    if (tag <= AttributeTag::Recover) return AttributeFamily::CybersecurityConcept;
    if (tag <= AttributeTag::Information_security_assurance) return AttributeFamily::OperationalCapability;
    return AttributeFamily::SecurityDomain;
}

}  // namespace exposure
