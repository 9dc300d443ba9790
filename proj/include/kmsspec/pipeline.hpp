#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "kmsspec/closedset.hpp"

namespace kms::pipeline {

enum class Mode { Wreath, FreeProduct, Growth, Padic };
std::string to_string(Mode m);

struct GridSpec {
    double R = 10.0;
    std::size_t n = 10000;
    double tol = 1e-6;
};

struct GrowthSpec {
    int dim = 1;
    std::string preset = "coboundary";
    double amp = 1.0, c = 1.0;
    int M = 10007;
    int horizon = 64;
    int census_radius = 16;
    std::vector<double> s{0.5, 0.1, 0.01, 0.001};
    double beta = 1.0;
    int x = 0;
    std::string expect;  // optional classifier expectation
};

struct PadicSpec {
    std::uint64_t p = 3;
    std::vector<int> N{1, 2};
    int max_len = 8;
    int h_lo = -2, h_hi = 2;
};

struct RunConfig {
    Mode mode = Mode::Wreath;
    std::optional<spectra::ClosedSetSpec> K;
    double t = 2.0;
    int k = 2;
    int lambda0_order = 0;  // 0: 2k
    int stages = 2;
    double build_R = 20.0;
    GridSpec grid;
    GrowthSpec growth;
    PadicSpec padic;
};

// Decimal strings for reals; see the README for the schema.
RunConfig parse_config(const nlohmann::json& j);
nlohmann::json to_json(const RunConfig& c);  // canonical form, hashed into the manifest
void validate(const RunConfig& c);

std::string sha256_hex(const std::string& data);

struct Certificate {
    std::string name;
    bool pass = false;
    nlohmann::json detail;
};

struct RunResult {
    nlohmann::json report;
    std::map<std::string, std::string> files;  // artifact name -> contents, report.json included
    nlohmann::json stored;                      // data the verifier rechecks, kept in the manifest
    std::vector<Certificate> certificates;
    std::vector<std::pair<std::string, double>> timings;
    bool pass = false;
};

RunResult run(const RunConfig& cfg);

// Writes every artifact plus manifest.json into dir.
nlohmann::json write_run(const RunConfig& cfg, const RunResult& r, const std::filesystem::path& dir);

struct VerifyResult {
    bool pass = false;
    std::string first_failure;
    std::vector<Certificate> checks;
};

VerifyResult verify(const std::filesystem::path& dir);

}  // namespace kms::pipeline
