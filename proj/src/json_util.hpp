#pragma once

// Shared helpers for the JSON document parsers. Not part of the public API.

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <string>
#include <string_view>

#include <json.hpp>

#include "exposure/errors.hpp"

namespace exposure::detail {

using nlohmann::json;

inline json parse_json(std::string_view text) {
    try {
        return json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        const std::string copy(text);
        const std::size_t offset = e.byte > 0 ? e.byte - 1 : 0;
        auto [line, col] = line_column(copy, offset);
        throw SyntaxError("malformed JSON document: " + std::string(e.what()), line, col);
    }
}

inline const json& require_object(const json& j, const std::string& where) {
    if (!j.is_object()) throw SchemaError(where + ": expected an object");
    return j;
}

inline const json& require_array(const json& j, const std::string& where) {
    if (!j.is_array()) throw SchemaError(where + ": expected an array");
    return j;
}

inline void check_keys(const json& obj, std::initializer_list<std::string_view> allowed,
                       const std::string& where) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool ok = false;
        for (auto name : allowed) {
            if (it.key() == name) {
                ok = true;
                break;
            }
        }
        if (!ok) throw SchemaError(where + ": unknown field '" + it.key() + "'");
    }
}

inline std::string get_string(const json& j, const std::string& where) {
    if (!j.is_string()) throw SchemaError(where + ": expected a string");
    return j.get<std::string>();
}

inline bool get_bool(const json& j, const std::string& where) {
    if (!j.is_boolean()) throw SchemaError(where + ": expected a boolean");
    return j.get<bool>();
}

inline double get_number(const json& j, const std::string& where) {
    if (!j.is_number()) throw SchemaError(where + ": expected a number");
    const double v = j.get<double>();
    if (!std::isfinite(v)) throw RangeError(where + ": value must be finite");
    return v;
}

inline double get_non_negative(const json& j, const std::string& where) {
    const double v = get_number(j, where);
    if (v < 0.0) throw RangeError(where + ": value must be non-negative");
    return v;
}

inline double get_fraction(const json& j, const std::string& where) {
    const double v = get_number(j, where);
    if (v < 0.0 || v > 1.0) throw RangeError(where + ": value must lie in [0,1]");
    return v;
}

inline std::uint64_t get_count(const json& j, const std::string& where) {
    if (j.is_number_integer()) {
        if (j.is_number_unsigned()) return j.get<std::uint64_t>();
        const auto v = j.get<std::int64_t>();
        if (v < 0) throw RangeError(where + ": count must be non-negative");
        return static_cast<std::uint64_t>(v);
    }
    if (j.is_number_float()) {
        const double v = j.get<double>();
        if (v < 0.0) throw RangeError(where + ": count must be non-negative");
        throw SchemaError(where + ": count must be an integer");
    }
    throw SchemaError(where + ": expected a count");
}

}  // namespace exposure::detail
