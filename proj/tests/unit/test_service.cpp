#include <doctest.h>

#include <httplib.h>

#include <future>
#include <thread>

#include "exposure/errors.hpp"
#include "exposure/http_server.hpp"
#include "exposure/service.hpp"
#include "test_paths.hpp"

using namespace exposure;
using nlohmann::json;

namespace {

std::shared_ptr<const Snapshot> data_snapshot() { return load_snapshot(testing::data_path("")); }
std::shared_ptr<const Snapshot> whatif_snapshot() { return load_snapshot(testing::fixture_path("whatif")); }

struct Call {
    std::string method, target, body;
};

std::vector<Call> read_only_calls() {
    std::vector<Call> calls = {{"GET", "/api/v1/kb/summary", ""}, {"GET", "/api/v1/metrics/registry", ""}};
    for (const char* org : {"org_a_before", "org_a_after", "org_b_before", "org_c_after"}) {
        const std::string base = std::string("/api/v1/profiles/") + org;
        calls.push_back({"GET", base + "/scores", ""});
        calls.push_back({"GET", base + "/likelihood", ""});
        calls.push_back({"GET", base + "/recommendations", ""});
        calls.push_back({"POST", "/api/v1/whatif",
                         std::string(R"({"profile_id": ")") + org +
                             R"(", "metric_overrides": {"patched_ratio": 0.2}, "toggle_controls": {"D3-NTA": true}})"});
    }
    calls.push_back({"POST", "/api/v1/whatif", R"({"profile_id": "nobody"})"});
    calls.push_back({"GET", "/api/v1/nothing", ""});
    return calls;
}

}  // namespace

TEST_CASE("snapshot loading") {
    const auto snap = data_snapshot();
    CHECK(snap->version == 1);
    CHECK(snap->profiles.size() == 6);
    CHECK(snap->params.count("default") == 1);
    CHECK_FALSE(snap->control_costs.empty());
    CHECK(snap->graph->nodes().size() == 25);
    CHECK_THROWS_AS(snap->profile("nope"), NotFoundError);
    CHECK_THROWS_AS(load_snapshot(testing::fixture_path("does-not-exist")), IoError);
}

TEST_CASE("whatif: empty request is an exact no-op") {
    const auto snap = data_snapshot();
    for (const auto& [id, profile] : snap->profiles) {
        CAPTURE(id);
        const auto r = whatif(*snap, parse_whatif_request(R"({"profile_id": ")" + id + "\"}"));
        CHECK(r.likelihood_delta == 0.0);
        CHECK(r.bounded_delta == 0.0);
        CHECK(r.uncovered_delta == 0);
        CHECK(r.per_variable_deltas.exposure == 0.0);
        CHECK(r.per_variable_deltas.traceability == 0.0);
        CHECK(r.per_variable_deltas.motivation == 0.0);
        CHECK(r.per_variable_deltas.systems_update == 0.0);
    }
    // The stored profile is not modified by a what-if run.
    const OrgProfile before = snap->profile("org_a_before");
    whatif(*snap, parse_whatif_request(R"({"profile_id": "org_a_before", "toggle_controls": {"D3-NTA": true}})"));
    CHECK(snap->profile("org_a_before") == before);
}

TEST_CASE("whatif: toggling c1 covers the technique only c1 mitigates") {
    const auto snap = whatif_snapshot();
    const auto base = whatif(*snap, parse_whatif_request(R"({"profile_id": "base"})"));
    CHECK(base.uncovered_techniques == NodeIdSet{NodeId("t2")});
    const auto r = whatif(*snap, parse_whatif_request(R"({"profile_id": "base", "toggle_controls": {"c1": true}})"));
    CHECK(r.uncovered_delta == -1);
    CHECK(r.uncovered_techniques.empty());
    bool flagged = false;
    for (const auto& rec : r.recommendations)
        if (rec.control == NodeId("c1")) flagged = rec.already_implemented;
    CHECK(flagged);
    const auto off = whatif(*snap, parse_whatif_request(R"({"profile_id": "base", "toggle_controls": {"c2": false}})"));
    CHECK(off.uncovered_delta == 1);
}

TEST_CASE("whatif: patching everything raises U and lowers the likelihood") {
    const auto snap = whatif_snapshot();
    const auto base = whatif(*snap, parse_whatif_request(R"({"profile_id": "base"})"));
    REQUIRE(base.scores.exposure > 0.0);
    REQUIRE(base.scores.motivation > 0.0);
    const auto r = whatif(*snap, parse_whatif_request(R"({"profile_id": "base", "metric_overrides": {"patched_ratio": 0.0}})"));
    // Overrides are risk-oriented: 0 means no residual risk from unpatched systems.
    CHECK(r.per_variable_deltas.systems_update > 0.0);
    CHECK(r.likelihood_delta < 0.0);
    const auto worse = whatif(*snap, parse_whatif_request(R"({"profile_id": "base", "metric_overrides": {"patched_ratio": 1.0}})"));
    CHECK(worse.per_variable_deltas.systems_update < 0.0);
    CHECK(worse.likelihood_delta > 0.0);
}

TEST_CASE("whatif: params override") {
    const auto snap = whatif_snapshot();
    const auto r = whatif(*snap, parse_whatif_request(R"({"profile_id": "base", "params_override": {"exp_e": 2}})"));
    CHECK(r.likelihood.contributions.e_factor == doctest::Approx(r.scores.exposure * r.scores.exposure));
    CHECK_THROWS_AS(parse_whatif_request(R"({"profile_id": "base", "params_override": {"exp_e": -1}})"), RangeError);
}

TEST_CASE("api status codes") {
    SessionState state(whatif_snapshot());
    const Api api(state);
    auto status = [&](const char* method, const char* target, const char* body = "") {
        return api.handle(method, target, body).status;
    };
    CHECK(status("POST", "/api/v1/whatif", R"({"profile_id": "nobody"})") == 404);
    CHECK(api.handle("POST", "/api/v1/whatif", R"({"profile_id": "nobody"})").body.at("error") == "not_found");
    CHECK(status("POST", "/api/v1/whatif", R"({"profile_id": "base", "metric_overrides": {"nope": 0.5}})") == 404);
    CHECK(status("POST", "/api/v1/whatif", R"({"profile_id": "base", "toggle_controls": {"t1": true}})") == 404);
    CHECK(status("POST", "/api/v1/whatif", R"({"profile_id": "base", "metric_overrides": {"patched_ratio": 1.5}})") ==
          422);
    CHECK(status("POST", "/api/v1/whatif", R"({"profile_id": "base", "params_override": {"exp_e": 0}})") == 422);
    CHECK(status("POST", "/api/v1/whatif", R"({"metric_overrides": {}})") == 400);
    CHECK(status("POST", "/api/v1/whatif", "{") == 400);
    CHECK(status("GET", "/api/v1/profiles/nobody/scores") == 404);
    CHECK(status("GET", "/api/v1/profiles/base/likelihood?params=missing") == 404);
    CHECK(status("GET", "/api/v1/unknown") == 404);
    CHECK(status("GET", "/elsewhere") == 404);
    CHECK(status("DELETE", "/api/v1/kb/summary") == 405);
    CHECK(status("GET", "/api/v1/whatif") == 405);
    CHECK(status("POST", "/api/v1/reload") == 404);  // no data directory configured
    CHECK(status("POST", "/api/v1/profiles", R"({"org_id": "z", "assets": {"technologies_in_use": ["tech.nope"]}})") ==
          400);

    for (const char* target : {"/api/v1/unknown", "/api/v1/profiles/nobody/scores"}) {
        const auto body = api.handle("GET", target, "").body;
        CHECK(body.contains("error"));
        CHECK(body.contains("detail"));
        CHECK(body.contains("snapshot_version"));
    }
}

TEST_CASE("api response shapes") {
    SessionState state(data_snapshot());
    const Api api(state);

    const auto summary = api.handle("GET", "/api/v1/kb/summary", "");
    REQUIRE(summary.status == 200);
    CHECK(summary.body.at("nodes_by_kind").at("Technique") == 12);
    CHECK(summary.body.at("nodes_by_kind").at("Countermeasure") == 8);
    CHECK(summary.body.at("nodes_by_kind").at("Technology") == 5);
    CHECK(summary.body.at("edge_count") == 20);
    CHECK(summary.body.at("snapshot_version") == 1);

    const auto reg = api.handle("GET", "/api/v1/metrics/registry", "");
    CHECK(reg.body.at("metrics").size() == default_registry().size());

    const auto scores = api.handle("GET", "/api/v1/profiles/org_a_before/scores", "");
    REQUIRE(scores.status == 200);
    for (const char* v : {"E", "T", "M", "U"}) {
        const double x = scores.body.at("scores").at(v).get<double>();
        CHECK(x >= 0.0);
        CHECK(x <= 1.0);
    }
    CHECK(scores.body.at("scores").at("per_metric").size() == default_registry().size());

    const auto lik = api.handle("GET", "/api/v1/profiles/org_a_before/likelihood", "");
    REQUIRE(lik.status == 200);
    CHECK(lik.body.at("likelihood").at("raw").get<double>() > 0.0);
    CHECK(lik.body.at("likelihood").at("bounded").get<double>() < 1.0);
    CHECK(lik.body.at("params") == "default");

    const auto recs = api.handle("GET", "/api/v1/profiles/org_a_before/recommendations", "");
    REQUIRE(recs.status == 200);
    CHECK_FALSE(recs.body.at("recommendations").empty());
    CHECK(recs.body.at("recommendations")[0].contains("cost_verdict"));
    CHECK(recs.body.at("actions").is_array());

    const auto w = api.handle("POST", "/api/v1/whatif", R"({"profile_id": "org_a_before"})");
    REQUIRE(w.status == 200);
    CHECK(w.body.at("delta_vs_base").at("likelihood_delta") == 0.0);
    CHECK(w.body.contains("snapshot_version"));
}

TEST_CASE("uploading a profile publishes a new snapshot") {
    SessionState state(whatif_snapshot());
    const Api api(state);
    const auto old = state.snapshot();
    const auto res = api.handle("POST", "/api/v1/profiles",
                                R"({"org_id": "new-org", "assets": {"technologies_in_use": ["tech.x"]}})");
    REQUIRE(res.status == 201);
    CHECK(res.body.at("snapshot_version") == 2);
    CHECK(api.handle("GET", "/api/v1/profiles/new-org/scores", "").status == 200);
    // Readers holding the old snapshot still see the old contents.
    CHECK(old->profiles.count("new-org") == 0);
    CHECK(old->version == 1);
}

TEST_CASE("reload bumps the version") {
    SessionState state(whatif_snapshot());
    const Api api(state, testing::fixture_path("whatif"));
    const auto res = api.handle("POST", "/api/v1/reload", "");
    CHECK(res.status == 200);
    CHECK(res.body.at("snapshot_version") == 2);
}

TEST_CASE("concurrent requests equal serial ones") {
    SessionState state(data_snapshot());
    const Api api(state);
    const auto calls = read_only_calls();
    std::vector<std::string> serial;
    for (const auto& c : calls) {
        const auto r = api.handle(c.method, c.target, c.body);
        serial.push_back(std::to_string(r.status) + r.body.dump());
    }
    constexpr int kThreads = 8;
    std::vector<std::future<std::vector<std::string>>> futures;
    for (int t = 0; t < kThreads; ++t) {
        futures.push_back(std::async(std::launch::async, [&, t] {
            std::vector<std::string> out(calls.size());
            for (int round = 0; round < 3; ++round) {
                for (std::size_t k = 0; k < calls.size(); ++k) {
                    // Each thread walks the calls in a different order.
                    const std::size_t i = (k * 7 + t) % calls.size();
                    const auto r = api.handle(calls[i].method, calls[i].target, calls[i].body);
                    out[i] = std::to_string(r.status) + r.body.dump();
                }
            }
            return out;
        }));
    }
    for (auto& f : futures) CHECK(f.get() == serial);
}

TEST_CASE("http round trip") {
    SessionState state(data_snapshot());
    const Api api(state);
    HttpServer server(api);
    const int port = server.bind("127.0.0.1", 0);
    REQUIRE(port > 0);
    std::thread runner([&] { server.listen_after_bind(); });

    httplib::Client client("127.0.0.1", port);
    const auto get = client.Get("/api/v1/profiles/org_b_before/scores");
    REQUIRE(get);
    CHECK(get->status == 200);
    CHECK(get->get_header_value("Content-Type").find("application/json") != std::string::npos);
    CHECK(json::parse(get->body) == api.handle("GET", "/api/v1/profiles/org_b_before/scores", "").body);

    const auto post = client.Post("/api/v1/whatif", R"({"profile_id": "ghost"})", "application/json");
    REQUIRE(post);
    CHECK(post->status == 404);
    CHECK(json::parse(post->body).at("error") == "not_found");

    const auto missing = client.Get("/nowhere");
    REQUIRE(missing);
    CHECK(missing->status == 404);

    server.stop();
    runner.join();
}
