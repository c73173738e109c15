#include "abr/cli.hpp"

#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace abr;
using namespace abr::cli;

namespace {

std::string temp_path(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / "abr_cli_tests";
    std::filesystem::create_directories(dir);
    const auto p = dir / name;
    std::filesystem::remove(p);
    return p.string();
}

}  // namespace

TEST_CASE("run config round trips through JSON") {
    RunConfig c;
    c.command = "verify-bounds";
    c.alpha = -0.3;
    c.grid.n_r = 40;
    c.seed = 77;
    c.samples = 123;
    const RunConfig d = RunConfig::from_json(c.to_json());
    CHECK(d.to_json() == c.to_json());
    CHECK(d.hash() == c.hash());
}

TEST_CASE("run config rejects unknown keys and invalid values") {
    CHECK_THROWS_AS(RunConfig::from_json(json{{"alhpa", 0.5}}), std::invalid_argument);
    CHECK_THROWS_AS(RunConfig::from_json(json::array()), std::invalid_argument);
    RunConfig c;
    c.alpha = 1.0;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    c.alpha = 0.5;
    c.samples = 0;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
}

TEST_CASE("config hash ignores output location and thread count only") {
    RunConfig a, b;
    b.out_dir = "/elsewhere";
    b.threads = 7;
    CHECK(a.hash() == b.hash());
    CHECK(a.hash().size() == 16);
    b.seed = 2;
    CHECK(a.hash() != b.hash());
    RunConfig c;
    c.alpha = 0.25;
    CHECK(a.hash() != c.hash());
}

TEST_CASE("constants ledger appends and returns the latest entry") {
    const std::string path = temp_path("ledger.jsonl");
    ConstantsLedger ledger(path);
    CHECK_THROWS_AS(ledger.read("missing"), std::out_of_range);
    ledger.record({"claim_a", 1.5, 100, "pass", "abc"});
    ledger.record({"claim_b", 0.25, 10, "fail", "abc"});
    ledger.record({"claim_a", 2.5, 200, "pass", "def"});
    const auto e = ledger.read("claim_a");
    CHECK(e.constant == 2.5);
    CHECK(e.samples == 200);
    CHECK(e.config_hash == "def");
    CHECK(ledger.read("claim_b").verdict == "fail");
    CHECK(ledger.entries().size() == 3);
    CHECK_THROWS_AS(ledger.read("claim_c"), std::out_of_range);
}

TEST_CASE("ledger path honours the environment override") {
    const std::string path = temp_path("override.jsonl");
    ::setenv("AB_RESOLVENT_LEDGER", path.c_str(), 1);
    CHECK(ConstantsLedger::default_path("/tmp/out") == path);
    ::unsetenv("AB_RESOLVENT_LEDGER");
    CHECK(ConstantsLedger::default_path("/tmp/out") == "/tmp/out/constants_ledger.jsonl");
}

TEST_CASE("report serialization") {
    verify::BoundCheckReport r;
    r.claim_id = "demo";
    r.sample_count = 3;
    r.max_ratio = 0.1;
    r.js = {2, 3};
    r.max_ratio_by_j = {0.05, 0.1};
    r.slope = 1.0;
    r.pass = true;
    r.worst.push_back({3, 0.1, {{"r1", 0.5}, {"theta", 1.0 / 3.0}}});
    const json j = report_json(r);
    CHECK(j.at("claim_id") == "demo");
    CHECK(j.at("verdict") == "pass");
    CHECK(j.at("constant").get<double>() == 0.1);
    CHECK(j.at("js").size() == 2);

    std::ostringstream os;
    write_worst_csv(os, {r});
    CHECK(os.str() == "claim_id,rank,j,ratio,params\ndemo,0,3,0.10000000000000001,r1=0.5;theta=0.33333333333333331\n");
    const auto e = ledger_entry(r, "h");
    CHECK(e.claim_id == "demo");
    CHECK(e.samples == 3);
    CHECK(e.verdict == "pass");
}

TEST_CASE("format_double round trips") {
    for (double v : {0.1, 1.0 / 3.0, 1e-300, -2.5e17}) CHECK(std::stod(format_double(v)) == v);
}

TEST_CASE("oscillatory corpus loads and its fixtures pass") {
    const auto fixtures = load_corpus(ABR_CORPUS_PATH);
    REQUIRE(fixtures.size() >= 5);
    bool has_stationary = false, has_nonstationary = false;
    for (const auto& f : fixtures) {
        has_stationary |= f.kind == "stationary";
        has_nonstationary |= f.kind == "nonstationary";
    }
    CHECK(has_stationary);
    CHECK(has_nonstationary);
    for (const auto& row : run_corpus(fixtures, 1)) {
        INFO(row.id);
        CHECK(row.pass);
    }
}

TEST_CASE("potentials file loads and rejects bad radii") {
    const std::string path = temp_path("potentials.json");
    std::ofstream(path) << R"([{"radius": 1.5, "re": -2, "im": 0.5}, {"re": 3}])";
    const auto v = load_potentials(path);
    REQUIRE(v.size() == 2);
    CHECK(v[0].radius == 1.5);
    CHECK(v[0].value == cplx(-2.0, 0.5));
    CHECK(v[1].radius == 1.0);
    std::ofstream(path) << R"([{"radius": 0}])";
    CHECK_THROWS_AS(load_potentials(path), std::invalid_argument);
    CHECK(default_potentials().size() == 20);
}

TEST_CASE("self-test output is byte-identical across runs") {
    RunConfig c;
    c.seed = 5;
    std::ostringstream a, b;
    write_selftest_csv(a, c);
    write_selftest_csv(b, c);
    CHECK(!a.str().empty());
    CHECK(a.str() == b.str());
}
