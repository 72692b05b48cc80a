#pragma once

// Minimal well-formedness-checking XML reader for scanner output. Handles
// elements, attributes, character/entity references, comments, processing
// instructions, CDATA and a DOCTYPE without an internal subset. Text content
// is discarded.

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace exposure::detail {

struct XmlElement {
    std::string name;
    std::vector<std::pair<std::string, std::string>> attributes;
    std::vector<XmlElement> children;
    std::size_t line = 0;

    std::optional<std::string> attribute(std::string_view key) const {
        for (const auto& [k, v] : attributes) {
            if (k == key) return v;
        }
        return std::nullopt;
    }
};

// Throws SyntaxError with the line and column of the first problem.
XmlElement parse_xml(std::string_view text);

}  // namespace exposure::detail
