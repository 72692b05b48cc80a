#include <arpa/inet.h>

#include <algorithm>
#include <charconv>
#include <map>

#include "exposure/errors.hpp"
#include "exposure/profile.hpp"
#include "xml_reader.hpp"

namespace exposure {

namespace {

std::optional<std::array<unsigned, 4>> parse_ipv4(std::string_view text) {
    std::array<unsigned, 4> octets{};
    std::size_t i = 0;
    for (std::size_t part = 0; part < 4; ++part) {
        if (part > 0) {
            if (i >= text.size() || text[i] != '.') return std::nullopt;
            ++i;
        }
        unsigned value = 0;
        const auto [ptr, ec] = std::from_chars(text.data() + i, text.data() + text.size(), value);
        if (ec != std::errc{} || ptr == text.data() + i || value > 255) return std::nullopt;
        i = static_cast<std::size_t>(ptr - text.data());
        octets[part] = value;
    }
    if (i != text.size()) return std::nullopt;
    return octets;
}

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

}  // namespace

bool is_public_address(std::string_view address) {
    if (auto ip = parse_ipv4(address)) {
        const auto [a, b, c, d] = *ip;
        (void)c;
        (void)d;
        if (a == 10 || a == 127 || a == 0) return false;
        if (a == 172 && b >= 16 && b <= 31) return false;
        if (a == 192 && b == 168) return false;
        if (a == 169 && b == 254) return false;
        if (a == 100 && b >= 64 && b <= 127) return false;  // carrier-grade NAT
        if (a >= 224) return false;                         // multicast / reserved
        return true;
    }
    if (address.find(':') != std::string_view::npos) {
        const std::string v6 = lower(address);
        in6_addr parsed{};
        if (::inet_pton(AF_INET6, v6.c_str(), &parsed) != 1) return false;
        if (v6 == "::1" || v6 == "::") return false;
        if (v6.rfind("fe8", 0) == 0 || v6.rfind("fe9", 0) == 0 || v6.rfind("fea", 0) == 0 ||
            v6.rfind("feb", 0) == 0)
            return false;
        if (v6.rfind("fc", 0) == 0 || v6.rfind("fd", 0) == 0) return false;
        return true;
    }
    return false;  // MAC or hostname
}

std::size_t ScannedHost::open_ports() const {
    return static_cast<std::size_t>(
        std::count_if(ports.begin(), ports.end(), [](const ScannedPort& p) { return p.state == "open"; }));
}

PortScanResult parse_port_scan_xml(std::string_view text) {
    const detail::XmlElement root = detail::parse_xml(text);
    if (root.name != "nmaprun") throw SchemaError("port scan: root element must be <nmaprun>, got <" + root.name + ">");

    std::map<std::string, ScannedHost> hosts;
    PortScanResult result;
    for (const auto& host : root.children) {
        if (host.name != "host") continue;
        const std::string where = "port scan: host at line " + std::to_string(host.line);

        std::optional<std::string> address;
        for (const auto& child : host.children) {
            if (child.name != "address") continue;
            auto addr = child.attribute("addr");
            if (!addr || addr->empty()) throw SchemaError(where + ": <address> without addr attribute");
            if (child.attribute("addrtype").value_or("") == "mac") {
                if (!address) address = *addr;  // fallback only
                continue;
            }
            address = *addr;
            break;
        }
        if (!address) throw SchemaError(where + ": missing <address>");

        ScannedHost& entry = hosts[*address];
        entry.address = *address;
        for (const auto& ports : host.children) {
            if (ports.name != "ports") continue;
            for (const auto& port : ports.children) {
                if (port.name != "port") continue;
                const std::string pwhere = where + ", port at line " + std::to_string(port.line);
                ++result.port_elements;
                ScannedPort sp;
                auto portid = port.attribute("portid");
                if (!portid) throw SchemaError(pwhere + ": missing portid");
                const auto [ptr, ec] = std::from_chars(portid->data(), portid->data() + portid->size(), sp.port);
                if (ec != std::errc{} || ptr != portid->data() + portid->size() || sp.port > 65535)
                    throw SchemaError(pwhere + ": invalid portid '" + *portid + "'");
                sp.protocol = port.attribute("protocol").value_or("");
                const detail::XmlElement* state = nullptr;
                for (const auto& c : port.children) {
                    if (c.name == "state") {
                        state = &c;
                        break;
                    }
                }
                if (!state) throw SchemaError(pwhere + ": missing <state>");
                auto st = state->attribute("state");
                if (!st) throw SchemaError(pwhere + ": <state> without state attribute");
                sp.state = *st;
                entry.ports.push_back(std::move(sp));
            }
        }
    }

    for (auto& [addr, host] : hosts) {
        result.visible_ports += host.open_ports();
        if (is_public_address(addr)) ++result.public_hosts;
        result.hosts.push_back(std::move(host));
    }
    return result;
}

ProfileFragment PortScanResult::to_fragment() const {
    ProfileFragment f;
    f.source = "port-scan";
    f.network.visible_ports = visible_ports;
    f.network.public_ips = public_hosts;
    return f;
}

UserInventory parse_account_file(std::string_view text, const std::set<std::string>& privileged_markers) {
    UserInventory inv;
    std::set<std::string> seen;
    std::size_t line_no = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
        auto end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        std::string_view line = text.substr(start, end - start);
        ++line_no;
        start = end + 1;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);

        const auto first = line.find_first_not_of(" \t");
        if (first == std::string_view::npos || line[first] == '#') {
            if (end == text.size()) break;
            continue;
        }

        std::vector<std::string_view> fields;
        std::size_t fstart = 0;
        for (;;) {
            auto colon = line.find(':', fstart);
            fields.push_back(line.substr(fstart, colon == std::string_view::npos ? line.size() - fstart : colon - fstart));
            if (colon == std::string_view::npos) break;
            fstart = colon + 1;
        }
        if (fields.size() < 3)
            throw SyntaxError("account file: expected name:uid:group", line_no, 1);
        if (fields[0].empty()) throw SyntaxError("account file: empty account name", line_no, 1);

        User u;
        u.user_id = std::string(fields[0]);
        u.privileged = fields[1] == "0" || privileged_markers.count(std::string(fields[2])) > 0;
        if (!seen.insert(u.user_id).second)
            throw SyntaxError("account file: duplicate account '" + u.user_id + "'", line_no, 1);
        inv.users.push_back(std::move(u));
        if (end == text.size()) break;
    }
    return inv;
}

}  // namespace exposure
