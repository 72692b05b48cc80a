#include <doctest.h>

#include <filesystem>
#include <random>

#include "exposure/errors.hpp"
#include "exposure/kb_graph.hpp"
#include "exposure/profile.hpp"
#include "exposure/scoring.hpp"
#include "exposure/service.hpp"
#include "exposure/text.hpp"
#include "test_paths.hpp"

using namespace exposure;

namespace {

OrgProfile random_profile(std::mt19937_64& rng, int serial) {
    std::uniform_int_distribution<int> small(0, 12);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::bernoulli_distribution coin(0.5);
    OrgProfile p;
    p.org_id = "org-" + std::to_string(serial);
    if (coin(rng)) p.sector = "sector-" + std::to_string(small(rng));
    const int devices = small(rng);
    for (int i = 0; i < devices; ++i) {
        Device d;
        d.device_id = "d" + std::to_string(i);
        d.registered = coin(rng);
        d.logging_enabled = coin(rng);
        d.updatable = coin(rng);
        d.patched = coin(rng);
        if (coin(rng)) d.technology_ids.insert(NodeId("tech." + std::to_string(small(rng))));
        if (coin(rng)) d.location_access.insert(LocationAccess::Internet);
        if (coin(rng)) d.location_access.insert(LocationAccess::Vpn);
        for (const auto& t : d.technology_ids) p.assets.technologies_in_use.insert(t);
        p.assets.devices.push_back(std::move(d));
    }
    if (coin(rng)) p.assets.technologies_in_use.insert(NodeId("tech.extra"));
    const int users = small(rng);
    for (int i = 0; i < users; ++i)
        p.users.users.push_back({"u" + std::to_string(i), coin(rng), coin(rng), coin(rng)});
    if (coin(rng)) p.network = NetworkSurface{std::uint64_t(small(rng)), std::uint64_t(small(rng)),
                                              std::uint64_t(small(rng)), std::uint64_t(small(rng))};
    if (coin(rng)) {
        LoggingPosture l;
        l.expected_authentications = small(rng);
        l.observed_authentications = small(rng);
        l.devices_with_logging = small(rng);
        l.total_actions_observed = small(rng);
        p.logging = l;
    }
    if (coin(rng)) {
        UpdatePosture u;
        u.total_systems = 20;
        u.patched_systems = small(rng);
        u.legacy_unupdatable = small(rng) % 8;
        u.update_delay_days = unit(rng) * 100;
        u.critical_patch_days = unit(rng) * 30;
        u.policy_version_lag = small(rng) % 5;
        p.updates = u;
    }
    p.motivation = {unit(rng), unit(rng), unit(rng), unit(rng), unit(rng)};
    if (coin(rng)) p.implemented_controls.insert(NodeId("D3-SU"));
    if (coin(rng)) p.symmetry_tags.insert(SymmetryTag::GainAsymmetric);
    if (coin(rng)) p.revenue = unit(rng) * 1e6;
    return p;
}

void parse_by_prefix(const std::string& parser, const std::string& text) {
    if (parser == "kb") {
        load_kb(text);
    } else if (parser == "profile") {
        parse_profile(text);
    } else if (parser == "portscan") {
        parse_port_scan_xml(text);
    } else if (parser == "accounts") {
        parse_account_file(text, {"wheel"});
    } else if (parser == "corpus") {
        parse_corpus(text);
    } else if (parser == "params") {
        parse_params(text);
    } else if (parser == "whatif") {
        parse_whatif_request(text);
    } else {
        FAIL("unknown parser prefix " << parser);
    }
}

}  // namespace

TEST_CASE("minimal profile gets documented defaults") {
    const auto p = parse_profile(R"({"org_id": "x"})");
    CHECK(p.org_id == "x");
    CHECK(p.assets.devices.empty());
    CHECK(p.users.users.empty());
    CHECK_FALSE(p.network.has_value());
    CHECK_FALSE(p.logging.has_value());
    CHECK_FALSE(p.updates.has_value());
    CHECK(p.motivation == MotivationInputs{0.5, 0.5, 0.5, 0.5, 0.5});
    CHECK(p.implemented_controls.empty());
}

TEST_CASE("org_a_before fixture carries the reference counts") {
    const auto p = parse_profile(testing::read_data("profiles/org_a_before.json"));
    CHECK(p.assets.total_devices() == 275);
    CHECK(p.assets.unregistered_devices() == 86);
    CHECK(p.users.privileged_users() == 27);
    const auto after = parse_profile(testing::read_data("profiles/org_a_after.json"));
    CHECK(after.assets.registered_devices() == 200);
    CHECK(after.users.privileged_users() == 9);
}

TEST_CASE("before/after fixtures carry the reference device and user counts") {
    struct Row {
        const char* org;
        std::size_t total, unregistered, priv_before, registered_after, priv_after;
        double log_before_max, log_after_min;
    };
    const Row rows[] = {{"a", 275, 86, 27, 200, 9, 0.30, 0.90},
                        {"b", 361, 134, 19, 250, 11, 0.30, 0.90},
                        {"c", 437, 369, 45, 400, 16, 0.50, 0.80}};
    for (const auto& r : rows) {
        CAPTURE(r.org);
        const auto b = parse_profile(testing::read_data(std::string("profiles/org_") + r.org + "_before.json"));
        const auto a = parse_profile(testing::read_data(std::string("profiles/org_") + r.org + "_after.json"));
        CHECK(b.assets.total_devices() == r.total);
        CHECK(b.assets.unregistered_devices() == r.unregistered);
        CHECK(b.users.privileged_users() == r.priv_before);
        CHECK(a.assets.registered_devices() == r.registered_after);
        CHECK(a.users.privileged_users() == r.priv_after);
        const double lb = double(b.logging->devices_with_logging) / double(b.assets.total_devices());
        const double la = double(a.logging->devices_with_logging) / double(a.assets.total_devices());
        CHECK(lb < r.log_before_max);
        CHECK(la > r.log_after_min);
    }
}

TEST_CASE("out-of-range motivation input is a RangeError") {
    CHECK_THROWS_AS(parse_profile(R"({"org_id": "x", "motivation": {"restorable_fraction": 1.5}})"), RangeError);
}

TEST_CASE("port scan parsing") {
    SUBCASE("no hosts") {
        const auto r = parse_port_scan_xml(testing::read_fixture("telemetry/empty.xml"));
        CHECK(r.hosts.empty());
        CHECK(r.visible_ports == 0);
        CHECK(r.public_hosts == 0);
    }
    SUBCASE("two hosts with three open and one closed port") {
        const auto r = parse_port_scan_xml(testing::read_fixture("telemetry/two_hosts.xml"));
        CHECK(r.hosts.size() == 2);
        CHECK(r.visible_ports == 3);
        CHECK(r.port_elements == 4);
        CHECK(r.public_hosts == 1);
        const auto f = r.to_fragment();
        CHECK(f.network.visible_ports == 3u);
        CHECK(f.network.public_ips == 1u);
    }
    SUBCASE("state without a state attribute") {
        CHECK_THROWS_AS(parse_port_scan_xml(testing::read_fixture("invalid/portscan__SchemaError__missing_state.xml")),
                        SchemaError);
    }
    SUBCASE("mismatched tag reports its line") {
        try {
            parse_port_scan_xml(testing::read_fixture("invalid/portscan__SyntaxError__mismatched.xml"));
            FAIL("expected SyntaxError");
        } catch (const SyntaxError& e) {
            CHECK(e.line() == 3);
        }
    }
    SUBCASE("entities and CDATA") {
        const auto r = parse_port_scan_xml(
            "<nmaprun><![CDATA[ <ignored> ]]><host comment=\"a &amp; b\"><address addr=\"8.8.8.8\"/>"
            "<ports><port portid=\"80\"><state state=\"open\"/></port></ports></host></nmaprun>");
        CHECK(r.visible_ports == 1);
        CHECK(r.public_hosts == 1);
    }
}

TEST_CASE("property: port-scan counts never exceed the number of port elements") {
    std::mt19937_64 rng(5);
    const char* states[] = {"open", "closed", "filtered", "open|filtered"};
    for (int trial = 0; trial < 200; ++trial) {
        std::string xml = "<nmaprun>";
        std::size_t elements = 0;
        const int hosts = int(rng() % 5);
        for (int h = 0; h < hosts; ++h) {
            xml += "<host><address addr=\"192.0.2." + std::to_string(rng() % 4) + "\"/><ports>";
            const int ports = int(rng() % 6);
            for (int p = 0; p < ports; ++p, ++elements)
                xml += "<port portid=\"" + std::to_string(rng() % 1024) + "\"><state state=\"" + states[rng() % 4] +
                       "\"/></port>";
            xml += "</ports></host>";
        }
        xml += "</nmaprun>";
        const auto r = parse_port_scan_xml(xml);
        CHECK(r.port_elements == elements);
        CHECK(r.visible_ports <= elements);
    }
}

TEST_CASE("public address classification") {
    CHECK(is_public_address("8.8.8.8"));
    CHECK(is_public_address("203.0.113.5"));
    CHECK_FALSE(is_public_address("10.1.2.3"));
    CHECK_FALSE(is_public_address("172.16.0.1"));
    CHECK_FALSE(is_public_address("192.168.1.1"));
    CHECK_FALSE(is_public_address("127.0.0.1"));
    CHECK_FALSE(is_public_address("169.254.1.1"));
    CHECK_FALSE(is_public_address("100.64.0.1"));
    CHECK(is_public_address("2001:4860::8888"));
    CHECK_FALSE(is_public_address("fd00::1"));
    CHECK_FALSE(is_public_address("::1"));
    CHECK_FALSE(is_public_address("00:11:22:33:44:55"));
}

TEST_CASE("account files") {
    const auto inv = parse_account_file("root:0:wheel\nalice:1001:staff", {"wheel"});
    CHECK(inv.users.size() == 2);
    CHECK(inv.privileged_users() == 1);
    CHECK(parse_account_file("", {}).users.empty());
    try {
        parse_account_file("bad-line", {});
        FAIL("expected SyntaxError");
    } catch (const SyntaxError& e) {
        CHECK(e.line() == 1);
    }
    const auto commented = parse_account_file("# comment\n\nbob:1002:wheel\n", {"wheel"});
    CHECK(commented.privileged_users() == 1);
}

TEST_CASE("merge_profile") {
    const auto base = parse_profile(R"({"org_id": "x", "assets": {"devices": [{"device_id": "d0"}]}})");
    CHECK(merge_profile(base, {}) == base);

    const auto net = parse_fragment(testing::read_fixture("telemetry/network_fragment.json"));
    const auto merged = merge_profile(base, {net});
    REQUIRE(merged.network.has_value());
    CHECK(merged.network->public_ips == 4);
    CHECK(merged.network->visible_ports == 9);
    CHECK(merged.assets.devices == base.assets.devices);

    const auto f1 = parse_fragment(R"({"assets": {"devices": [{"device_id": "d1"}]}})");
    const auto f2 = parse_fragment(R"({"assets": {"devices": [{"device_id": "d1", "registered": true}]}})");
    CHECK_THROWS_AS(merge_profile(base, {f1, f2}), ConflictError);
    const auto f3 = parse_fragment(R"({"assets": {"devices": [{"device_id": "d0"}]}})");
    CHECK_THROWS_AS(merge_profile(base, {f3}), ConflictError);

    const auto l1 = parse_fragment(R"({"logging": {"devices_with_logging": 1}})");
    const auto l2 = parse_fragment(R"({"logging": {"devices_with_logging": 2}})");
    CHECK_THROWS_AS(merge_profile(base, {l1, l2}), ConflictError);
}

TEST_CASE("property: disjoint fragment merges commute and associate") {
    const auto base = parse_profile(R"({"org_id": "x"})");
    const auto a = parse_fragment(R"({"assets": {"devices": [{"device_id": "a1", "technology_ids": ["tech.a"]}]},
                                      "users": [{"user_id": "ua"}], "network": {"visible_ports": 3}})");
    const auto b = parse_fragment(R"({"assets": {"devices": [{"device_id": "b1"}, {"device_id": "a0"}]},
                                      "network": {"public_ips": 2}, "implemented_controls": ["D3-SU"]})");
    const auto c = parse_fragment(R"({"users": [{"user_id": "uc", "privileged": true}],
                                      "updates": {"total_systems": 3, "patched_systems": 1}, "revenue": 10})");
    const auto abc = merge_profile(base, {a, b, c});
    CHECK(merge_profile(base, {c, b, a}) == abc);
    CHECK(merge_profile(base, {b, a, c}) == abc);
    CHECK(merge_profile(merge_profile(base, {a}), {b, c}) == abc);
    CHECK(merge_profile(merge_profile(base, {a, b}), {c}) == abc);
}

TEST_CASE("file replay connectors") {
    FileReplayConnector scan("scanner", SourceCategory::Inventory, testing::fixture_path("telemetry/two_hosts.xml"));
    CHECK(scan.name() == "scanner");
    const auto frag = scan.fetch();
    CHECK(frag.network.visible_ports == 3u);
    FileReplayConnector json_frag("inventory", SourceCategory::Inventory,
                                  testing::fixture_path("telemetry/network_fragment.json"));
    CHECK(json_frag.fetch().network.public_ips == 4u);
    FileReplayConnector missing("x", SourceCategory::Inventory, testing::fixture_path("telemetry/nope.json"));
    CHECK_THROWS_AS(missing.fetch(), IoError);
}

TEST_CASE("property: profile parse/serialize round trip") {
    std::mt19937_64 rng(11);
    for (int i = 0; i < 300; ++i) {
        const OrgProfile p = random_profile(rng, i);
        const std::string text = serialize_profile(p);
        const OrgProfile back = parse_profile(text);
        CHECK(back == p);
        CHECK(serialize_profile(back) == text);
    }
}

TEST_CASE("every invalid-input fixture is rejected with its documented error class") {
    std::size_t checked = 0;
    for (const auto& entry : std::filesystem::directory_iterator(testing::fixture_path("invalid"))) {
        const std::string name = entry.path().filename().string();
        const auto first = name.find("__");
        const auto second = name.find("__", first + 2);
        REQUIRE(second != std::string::npos);
        const std::string parser = name.substr(0, first);
        const std::string expected = name.substr(first + 2, second - first - 2);
        CAPTURE(name);
        std::string actual = "no error";
        try {
            parse_by_prefix(parser, read_text_file(entry.path()));
        } catch (const Error& e) {
            actual = e.kind();
        }
        CHECK(actual == expected);
        ++checked;
    }
    CHECK(checked >= 20);
}
