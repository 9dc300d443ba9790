#include <cstdio>
#include <fstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "kmsspec/common.hpp"
#include "kmsspec/pipeline.hpp"

namespace {

using kms::pipeline::Mode;

struct Overrides {
    std::string config, out = "out";
    std::size_t grid_n = 0;
    std::string tol, range;
};

kms::pipeline::RunConfig load(const Overrides& o, std::optional<Mode> force) {
    std::ifstream in(o.config);
    if (!in) throw kms::Error(kms::ErrorKind::InvalidInput, "cannot open config " + o.config);
    auto cfg = kms::pipeline::parse_config(nlohmann::json::parse(in));
    if (force && cfg.mode != *force)
        throw kms::Error(kms::ErrorKind::InvalidInput,
                         "config mode is " + kms::pipeline::to_string(cfg.mode) + ", expected " + kms::pipeline::to_string(*force));
    if (o.grid_n) cfg.grid.n = o.grid_n;
    if (!o.tol.empty()) cfg.grid.tol = kms::parse_dec(o.tol);
    if (!o.range.empty()) cfg.grid.R = kms::parse_dec(o.range);
    return cfg;
}

int execute(const Overrides& o, std::optional<Mode> force) {
    const auto cfg = load(o, force);
    const auto r = kms::pipeline::run(cfg);
    kms::pipeline::write_run(cfg, r, o.out);
    for (const auto& c : r.certificates) std::printf("%-22s %s\n", c.name.c_str(), c.pass ? "ok" : "FAILED");
    std::printf("%s: %s\n", o.out.c_str(), r.pass ? "all certificates pass" : "certificate failure");
    return r.pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"KMS spectrum construction and certificates"};
    app.require_subcommand(1);

    Overrides ov;
    auto add_run_flags = [&](CLI::App* sub) {
        sub->add_option("--config", ov.config, "run configuration (JSON)")->required()->check(CLI::ExistingFile);
        sub->add_option("--out", ov.out, "output directory");
        sub->add_option("--grid-n", ov.grid_n, "spectrum grid points");
        sub->add_option("--tol", ov.tol, "solver tolerance (decimal)");
        sub->add_option("--range", ov.range, "solve on [-R, R] (decimal R)");
    };

    auto* build = app.add_subcommand("build-spectrum", "run the wreath or free-product pipeline");
    add_run_flags(build);
    auto* grow = app.add_subcommand("growth", "word growth, limsup classifier and measure nets");
    add_run_flags(grow);
    auto* pad = app.add_subcommand("padic", "closure and freeness certificates");
    add_run_flags(pad);

    std::string dir;
    auto* ver = app.add_subcommand("verify", "recheck a finished run");
    ver->add_option("dir", dir, "run directory holding manifest.json")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*build) {
            const auto cfg = load(ov, std::nullopt);
            if (cfg.mode != Mode::Wreath && cfg.mode != Mode::FreeProduct)
                throw kms::Error(kms::ErrorKind::InvalidInput, "build-spectrum needs mode wreath or free-product");
            return execute(ov, cfg.mode);
        }
        if (*grow) return execute(ov, Mode::Growth);
        if (*pad) return execute(ov, Mode::Padic);
        const auto v = kms::pipeline::verify(dir);
        for (const auto& c : v.checks)
            if (!c.pass) std::printf("%-28s FAILED %s\n", c.name.c_str(), c.detail.dump().c_str());
        if (v.pass) {
            std::printf("verify: pass (%zu checks)\n", v.checks.size());
            return 0;
        }
        std::printf("verify: fail at %s\n", v.first_failure.c_str());
        return 1;
    } catch (const kms::Error& e) {
        std::fprintf(stderr, "error [%s]: %s\n", kms::to_string(e.kind()), e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
}
