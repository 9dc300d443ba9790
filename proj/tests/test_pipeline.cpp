#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "kmsspec/pipeline.hpp"

using namespace kms::pipeline;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

RunConfig cfg_from(const char* text) { return parse_config(json::parse(text)); }

fs::path scratch(const std::string& name) {
    auto p = fs::temp_directory_path() / ("kmsspec_test_" + name);
    fs::remove_all(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    return {std::istreambuf_iterator<char>(in), {}};
}

}  // namespace

TEST_CASE("config validation") {
    CHECK_THROWS_AS(validate(cfg_from(R"({"mode": "wreath", "K": {"intervals": [["1", "2"]]}})")), kms::Error);
    CHECK_THROWS_AS(validate(cfg_from(R"({"mode": "free-product", "K": {"points": ["0", "2"]}})")), kms::Error);
    CHECK_THROWS_AS(validate(cfg_from(R"({"mode": "free-product", "K": {"points": ["2"]}, "lambda0_order": 3})")), kms::Error);
    CHECK_THROWS_AS(validate(cfg_from(R"({"mode": "padic", "padic": {"p": 9}})")), kms::Error);
    CHECK_THROWS_AS(validate(cfg_from(R"({"mode": "padic", "padic": {"max_len": 11}})")), kms::Error);
    CHECK_THROWS_AS(validate(cfg_from(R"({"mode": "growth", "growth": {"dim": 2}})")), kms::Error);
    CHECK_THROWS(cfg_from(R"({"mode": "wreath", "K": {"points": ["0"]}, "t": 2.0})"));
    CHECK_THROWS(cfg_from(R"({"mode": "sideways"})"));
    CHECK_NOTHROW(validate(cfg_from(R"({"mode": "wreath", "K": {"points": ["0"]}, "t": "2"})")));
}

TEST_CASE("canonical form round-trips and hashes stably") {
    const auto c = cfg_from(R"({"mode": "free-product", "K": {"intervals": [["1", "2"]]}, "k": 2, "grid": {"R": "10", "n": 2000, "tol": "1e-6"}})");
    const auto j = to_json(c);
    CHECK(to_json(parse_config(j)) == j);
    CHECK(sha256_hex(j.dump()) == sha256_hex(to_json(parse_config(j)).dump()));
    CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("free-product run, write and verify") {
    const auto cfg = cfg_from(R"({"mode": "free-product", "K": {"intervals": [["1", "2"]]}, "k": 2, "grid": {"R": "10", "n": 2000, "tol": "1e-6"}})");
    const auto r = run(cfg);
    CHECK(r.pass);
    for (const auto& c : r.certificates) CHECK_MESSAGE(c.pass, c.name);
    const auto dir = scratch("fp");
    write_run(cfg, r, dir);
    for (const char* f : {"manifest.json", "report.json", "pair.json", "samples.csv"}) CHECK(fs::exists(dir / f));
    const auto v = verify(dir);
    CHECK(v.pass);

    SUBCASE("perturbed stored weight fails at conformality") {
        auto m = json::parse(slurp(dir / "manifest.json"));
        auto& w = m["stored"]["measures"][3][0];  // beta = 1, first atom
        w = kms::dec(kms::parse_dec(w.get<std::string>()) + 1e-3);
        std::ofstream(dir / "manifest.json") << m.dump();
        const auto bad = verify(dir);
        CHECK_FALSE(bad.pass);
        CHECK(bad.first_failure.find("conformality") != std::string::npos);
    }
    SUBCASE("truncated csv fails at integrity") {
        const auto csv = slurp(dir / "samples.csv");
        std::ofstream(dir / "samples.csv") << csv.substr(0, csv.size() / 2);
        const auto bad = verify(dir);
        CHECK_FALSE(bad.pass);
        CHECK(bad.first_failure.find("integrity") != std::string::npos);
    }
    SUBCASE("missing manifest") {
        fs::remove(dir / "manifest.json");
        CHECK_FALSE(verify(dir).pass);
    }
}

TEST_CASE("growth and padic runs") {
    const auto g = cfg_from(R"({"mode": "growth", "growth": {"preset": "homomorphism", "c": "1", "beta": "0", "s": ["0.5"], "expect": "{0}"}})");
    const auto rg = run(g);
    CHECK(rg.pass);
    CHECK(rg.report.at("classification").dump().find("{0}") != std::string::npos);
    const auto wrong = cfg_from(R"({"mode": "growth", "growth": {"preset": "coboundary", "s": ["0.5"], "expect": "{0}"}})");
    CHECK_FALSE(run(wrong).pass);
    const auto p = cfg_from(R"({"mode": "padic", "padic": {"p": 3, "N": [1, 2], "max_len": 5}})");
    const auto rp = run(p);
    CHECK(rp.pass);
    CHECK(run(p).files.at("report.json") == rp.files.at("report.json"));
}

TEST_CASE("wreath run for K = {0} is rejected without 0 and recovers {0} otherwise") {
    CHECK_THROWS(run(cfg_from(R"({"mode": "wreath", "K": {"points": ["1"]}})")));
    const auto c = cfg_from(R"({"mode": "wreath", "K": {"points": ["0"]}, "stages": 1, "grid": {"R": "10", "n": 2001, "tol": "1e-6"}})");
    const auto r = run(c);
    CHECK(r.pass);
    const auto& s = r.report.at("spectrum");
    REQUIRE(s.at("isolated_roots").size() == 1);
    CHECK(std::abs(kms::parse_dec(s.at("isolated_roots")[0].get<std::string>())) <= 1e-6);
    CHECK(s.at("flat_intervals").empty());
}
