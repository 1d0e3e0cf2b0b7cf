#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <string>

#include "liouville/liouville.hpp"

namespace {

// Exit codes: 0 success, 1 usage/parse, 2 hypothesis/branch violation,
// 3 solver failure.
constexpr int exit_ok = 0;
constexpr int exit_usage = 1;
constexpr int exit_hypothesis = 2;
constexpr int exit_solver = 3;

int code_for(const liouville::error& e) {
    switch (e.code()) {
        case liouville::errc::not_stationary:
        case liouville::errc::hypothesis_h1_violated:
        case liouville::errc::nonpositive_curvature:
        case liouville::errc::degenerate:
        case liouville::errc::tangential:
        case liouville::errc::wrong_branch:
            return exit_hypothesis;
        default:
            return exit_solver;
    }
}

struct Options {
    std::string config_path;
    std::string out_dir;
    std::size_t grid = 0;
    bool quiet = false;
};

liouville::ScenarioConfig load(const Options& opt) {
    liouville::ScenarioConfig cfg = liouville::load_config(opt.config_path);
    if (opt.grid) {
        cfg.n_grid = opt.grid;
        liouville::validate(cfg);
    }
    if (!opt.out_dir.empty()) cfg.output_dir = opt.out_dir;
    return cfg;
}

void note(const Options& opt, const std::string& line) {
    if (!opt.quiet) std::printf("%s\n", line.c_str());
}

int cmd_check(const Options& opt) {
    const auto cfg = load(opt);
    const nlohmann::json j = liouville::run_check(cfg);
    const auto path = std::filesystem::path(cfg.output_dir) / "check.json";
    liouville::write_json(path, j);
    note(opt, "check: wrote " + path.string());
    if (std::abs(j.at("k_at_1").get<double>()) > cfg.tolerance("stationarity", 1e-8))
        std::fprintf(stderr, "warning: k(1) = %g is not zero; the construction assumes k(1) = 0\n",
                     j.at("k_at_1").get<double>());
    if (!j.at("satisfied").get<bool>()) {
        note(opt, "check: hypothesis failed, reason = " + j.at("reason").get<std::string>());
        return exit_hypothesis;
    }
    return exit_ok;
}

int cmd_scan(const Options& opt) {
    const auto cfg = load(opt);
    const liouville::ScanResult res = liouville::run_scan(cfg);
    const auto dir = std::filesystem::path(cfg.output_dir);
    liouville::write_file(dir / "scan.csv", res.csv);
    liouville::write_json(dir / "scan_slopes.json", res.slopes);
    note(opt, "scan: wrote " + (dir / "scan.csv").string() + " and scan_slopes.json");
    return exit_ok;
}

int cmd_reduce(const Options& opt) {
    const auto cfg = load(opt);
    const nlohmann::json j = liouville::run_reduce(cfg);
    const auto path = std::filesystem::path(cfg.output_dir) / "reduce.json";
    liouville::write_json(path, j);
    note(opt, "reduce: wrote " + path.string() + ", d0 = " + std::to_string(j.at("d0").get<double>()) +
                  ", branch = " + j.at("branch").get<std::string>());
    return exit_ok;
}

int cmd_trace(const Options& opt) {
    const auto cfg = load(opt);
    const liouville::TraceResult res = liouville::run_trace(cfg);
    const auto dir = std::filesystem::path(cfg.output_dir);
    liouville::write_file(dir / "trace.csv", res.csv);
    liouville::write_json(dir / "trace_rates.json", res.rates);
    note(opt, "trace: wrote " + (dir / "trace.csv").string() + ", rate_d = " +
                  std::to_string(res.rates.at("rate_d").get<double>()));
    return exit_ok;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Spectral toolkit for the non-local Liouville equation on the circle"};
    app.require_subcommand(1);
    app.fallthrough(); // global flags may follow the subcommand

    Options opt;
    app.add_option("--config", opt.config_path, "Path to the scenario JSON")->required();
    app.add_option("--out", opt.out_dir, "Output directory (overrides config)");
    app.add_option("--grid", opt.grid, "Grid size override (power of two >= 64)");
    app.add_flag("--quiet", opt.quiet, "Suppress progress output");

    auto* check = app.add_subcommand("check", "Evaluate the standing hypotheses at xi0 = 1");
    auto* scan = app.add_subcommand("scan", "Scan the ansatz error norms over the delta window");
    auto* reduce = app.add_subcommand("reduce", "Assemble and solve the reduced 2x2 rate system");
    auto* trace = app.add_subcommand("trace", "Continuation over eps_list with bubble fitting");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return e.get_exit_code() == 0 ? exit_ok : exit_usage;
    }

    try {
        if (check->parsed()) return cmd_check(opt);
        if (scan->parsed()) return cmd_scan(opt);
        if (reduce->parsed()) return cmd_reduce(opt);
        if (trace->parsed()) return cmd_trace(opt);
    } catch (const liouville::error& e) {
        std::fprintf(stderr, "%s\n", e.what());
        return code_for(e);
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "%s\n", e.what());
        return exit_usage;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "%s\n", e.what());
        return exit_solver;
    }
    return exit_usage;
}
