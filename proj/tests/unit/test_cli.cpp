#include <doctest.h>

#include <json.hpp>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>

#include "test_paths.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string q(const fs::path& p) { return "'" + p.string() + "'"; }

struct TempDir {
    fs::path path;
    TempDir() : path(fs::temp_directory_path() / ("exposure-cli-" + std::to_string(::getpid()))) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("ingest-kb stores a canonical knowledge base") {
    TempDir tmp;
    const auto r = testing::run_cli("--data-dir " + q(tmp.path) + " ingest-kb " + q(testing::data_path("kb.json")));
    REQUIRE(r.exit_code == 0);
    const auto out = json::parse(r.out);
    CHECK(out.at("node_count") == 25);
    CHECK(out.at("edge_count") == 20);
    CHECK(fs::exists(tmp.path / "kb.json"));
    // Re-ingesting the stored copy reproduces it byte for byte.
    const std::string stored = exposure::read_text_file(tmp.path / "kb.json");
    REQUIRE(testing::run_cli("--data-dir " + q(tmp.path / "again") + " ingest-kb " + q(tmp.path / "kb.json"))
                .exit_code == 0);
    CHECK(exposure::read_text_file(tmp.path / "again" / "kb.json") == stored);
}

TEST_CASE("exit codes") {
    CHECK(testing::run_cli("validate-kb " + q(testing::data_path("kb.json"))).exit_code == 0);
    CHECK(testing::run_cli("validate-kb " + q(testing::fixture_path("invalid/kb__IntegrityError__dangling.json")))
              .exit_code == 1);
    CHECK(testing::run_cli("profile score " + q(testing::fixture_path("invalid/profile__RangeError__restorable.json")))
              .exit_code == 1);
    CHECK(testing::run_cli("profile score /nonexistent/profile.json").exit_code == 2);
    CHECK(testing::run_cli("no-such-command").exit_code == 1);
    CHECK(testing::run_cli("cluster " + q(testing::data_path("corpus/incidents.json")) + " --k-range 3..1").exit_code ==
          1);
    const auto env_less = testing::run_cli("recommend " + q(testing::data_path("profiles/org_a_before.json")));
    CHECK(env_less.exit_code == 2);
}

TEST_CASE("profile score output") {
    const auto r = testing::run_cli("profile score " + q(testing::data_path("profiles/org_a_before.json")));
    REQUIRE(r.exit_code == 0);
    const auto out = json::parse(r.out);
    CHECK(out.contains("likelihood"));
    const auto csv = testing::run_cli("profile score --format csv " + q(testing::data_path("profiles/org_a_before.json")));
    REQUIRE(csv.exit_code == 0);
    CHECK(csv.out.rfind("metric_id,variable,raw,normalized,available,action\n", 0) == 0);
}

TEST_CASE("recommend honours the data directory environment variable") {
    const std::string profile = q(testing::data_path("profiles/org_a_before.json"));
    const auto by_flag = testing::run_cli("--data-dir " + q(testing::data_path("")) + " recommend " + profile);
    REQUIRE(by_flag.exit_code == 0);
    ::setenv("EXPOSURE_ENGINE_DATA_DIR", testing::data_path("").c_str(), 1);
    const auto env = testing::run_cli("recommend " + profile);
    ::unsetenv("EXPOSURE_ENGINE_DATA_DIR");
    REQUIRE(env.exit_code == 0);
    CHECK(env.out == by_flag.out);
    CHECK_FALSE(json::parse(env.out).at("recommendations").empty());
}

TEST_CASE("reports are byte-identical across runs") {
    const std::string dd = "--data-dir " + q(testing::data_path("")) + " ";
    const std::string profile = q(testing::data_path("profiles/org_c_before.json"));
    for (const std::string& cmd : std::vector<std::string>{"profile score " + profile, "recommend --costs " + q(testing::data_path("costs.json")) + " " + profile,
                                  "report", "cluster --stopwords " + q(testing::data_path("corpus/stopwords.txt")) + " " +
                                                q(testing::data_path("corpus/incidents.json"))}) {
        CAPTURE(cmd);
        const auto a = testing::run_cli(dd + cmd);
        const auto b = testing::run_cli(dd + cmd);
        CHECK(a.exit_code == 0);
        CHECK(a.out == b.out);
        CHECK_FALSE(a.out.empty());
    }
}

TEST_CASE("evaluate prints the before/after table") {
    const auto r = testing::run_cli("evaluate --before-count 100 --after-count 53 --format table " +
                                    q(testing::data_path("profiles/org_b_before.json")) + " " +
                                    q(testing::data_path("profiles/org_b_after.json")));
    REQUIRE(r.exit_code == 0);
    CHECK(r.out.find("Total Devices") != std::string::npos);
    CHECK(r.out.find("361") != std::string::npos);
    CHECK(r.out.find("47%") != std::string::npos);
    const auto j = testing::run_cli("evaluate --before-count 100 --after-count 61 " +
                                    q(testing::data_path("profiles/org_a_before.json")) + " " +
                                    q(testing::data_path("profiles/org_a_after.json")));
    REQUIRE(j.exit_code == 0);
    const auto out = json::parse(j.out);
    CHECK(out.at("incident_reduction_pct") == 39.0);
    CHECK(out.at("likelihood_delta").get<double>() < 0.0);
}

TEST_CASE("output file option") {
    TempDir tmp;
    const auto r = testing::run_cli("-o " + q(tmp.path / "score.json") + " profile score " +
                                    q(testing::data_path("profiles/org_a_after.json")));
    REQUIRE(r.exit_code == 0);
    CHECK(r.out.empty());
    CHECK(json::parse(exposure::read_text_file(tmp.path / "score.json")).contains("likelihood"));
    CHECK(testing::run_cli("-o /nonexistent/dir/x.json profile score " +
                           q(testing::data_path("profiles/org_a_after.json")))
              .exit_code == 2);
}
