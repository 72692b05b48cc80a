#pragma once

#include <optional>
#include <set>
#include <string>
#include <string_view>

namespace exposure {

// Control attribute vocabulary, grouped by family: control types, security
// properties, cybersecurity concepts, operational capabilities and security
// domains. Only these values are representable.
enum class AttributeTag {
    // control types
    Preventive,
    Detective,
    Corrective,
    // security properties
    Confidentiality,
    Integrity,
    Availability,
    // cybersecurity concepts
    Identify,
    Protect,
    Detect,
    Respond,
    Recover,
    // operational capabilities
    Governance,
    Asset_management,
    Information_protection,
    Human_resource_security,
    Physical_security,
    System_and_network_security,
    Application_security,
    Secure_configuration,
    Identity_and_access_management,
    Threat_and_vulnerability_management,
    Continuity,
    Supplier_relationships_security,
    Legal_and_compliance,
    Information_security_event_management,
    Information_security_assurance,
    // security domains
    Governance_and_Ecosystem,
    Protection,
    Defence,
    Resilience,
};

enum class AttributeFamily {
    ControlType,
    SecurityProperty,
    CybersecurityConcept,
    OperationalCapability,
    SecurityDomain,
};

using AttributeSet = std::set<AttributeTag>;

std::string_view to_string(AttributeTag tag);
std::optional<AttributeTag> parse_attribute(std::string_view name);
AttributeFamily family_of(AttributeTag tag);

inline bool is_security_property(AttributeTag tag) {
    return family_of(tag) == AttributeFamily::SecurityProperty;
}

}  // namespace exposure
