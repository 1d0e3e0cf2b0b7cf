#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "liouville/ansatz.hpp"
#include "liouville/circle_function.hpp"
#include "liouville/fitting.hpp"
#include "liouville/hypothesis.hpp"
#include "liouville/reduction.hpp"
#include "liouville/solver.hpp"

namespace liouville {

// Curvature-family configuration: trig-polynomial coefficients for h and k,
// grid size, the eps values to trace and the delta window to scan.
struct ScenarioConfig {
    std::vector<double> h_cos{1.0}; // h_cos[0] is the constant term
    std::vector<double> h_sin;
    std::vector<double> k_cos;
    std::vector<double> k_sin;
    std::size_t n_grid = 1024;
    std::vector<double> eps_list;
    struct DeltaScan {
        double min = 1e-3;
        double max = 1e-1;
        int count = 8;
    } delta_scan;
    std::map<std::string, double> tolerances;
    std::string output_dir = ".";

    double tolerance(const std::string& name, double fallback) const {
        auto it = tolerances.find(name);
        return it == tolerances.end() ? fallback : it->second;
    }
};

inline void validate(const ScenarioConfig& cfg) {
    if (cfg.n_grid < CircleFunction::min_grid || (cfg.n_grid & (cfg.n_grid - 1)) != 0)
        throw std::invalid_argument("config: n_grid must be a power of two >= 64");
    const std::size_t cap = cfg.n_grid / 8 + 1;
    if (cfg.h_cos.size() > cap || cfg.h_sin.size() > cap || cfg.k_cos.size() > cap || cfg.k_sin.size() > cap)
        throw std::invalid_argument("config: coefficient lists longer than n_grid/8");
    if (cfg.delta_scan.count < 2 || !(cfg.delta_scan.min > 0.0) || !(cfg.delta_scan.max > cfg.delta_scan.min))
        throw std::invalid_argument("config: bad delta_scan range");
}

inline ScenarioConfig parse_config(const nlohmann::json& j) {
    ScenarioConfig cfg;
    try {
        if (j.contains("h_cos")) cfg.h_cos = j.at("h_cos").get<std::vector<double>>();
        if (j.contains("h_sin")) cfg.h_sin = j.at("h_sin").get<std::vector<double>>();
        if (j.contains("k_cos")) cfg.k_cos = j.at("k_cos").get<std::vector<double>>();
        if (j.contains("k_sin")) cfg.k_sin = j.at("k_sin").get<std::vector<double>>();
        if (j.contains("n_grid")) cfg.n_grid = j.at("n_grid").get<std::size_t>();
        if (j.contains("eps_list")) cfg.eps_list = j.at("eps_list").get<std::vector<double>>();
        if (j.contains("delta_scan")) {
            const auto& d = j.at("delta_scan");
            cfg.delta_scan.min = d.at("min").get<double>();
            cfg.delta_scan.max = d.at("max").get<double>();
            cfg.delta_scan.count = d.at("count").get<int>();
        }
        if (j.contains("tolerances"))
            cfg.tolerances = j.at("tolerances").get<std::map<std::string, double>>();
        if (j.contains("output_dir")) cfg.output_dir = j.at("output_dir").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("config: ") + e.what());
    }
    validate(cfg);
    return cfg;
}

inline ScenarioConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("config: cannot open " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("config: ") + e.what());
    }
    return parse_config(j);
}

inline CircleFunction build_h(const ScenarioConfig& cfg) { return make_trig_poly(cfg.n_grid, cfg.h_cos, cfg.h_sin); }
inline CircleFunction build_k(const ScenarioConfig& cfg) {
    if (cfg.k_cos.empty() && cfg.k_sin.empty()) return CircleFunction::constant(cfg.n_grid, 0.0);
    return make_trig_poly(cfg.n_grid, cfg.k_cos, cfg.k_sin);
}

namespace detail {

inline std::string fmt(double x) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.12e", x);
    return buf;
}

} // namespace detail

// ---------------------------------------------------------------- check ---

inline nlohmann::json hypothesis_json(const HypothesisReport& r) {
    nlohmann::json j;
    j["h_at_1"] = r.h_at_1;
    j["hp_at_1"] = r.hp_at_1;
    j["hpp_at_1"] = r.hpp_at_1;
    j["flap_h_at_1"] = r.flap_h_at_1;
    j["flap_hp_at_1"] = r.flap_hp_at_1;
    j["k_at_1"] = r.k_at_1;
    j["kp_at_1"] = r.kp_at_1;
    j["flap_k_at_1"] = r.flap_k_at_1;
    j["q_of_h"] = r.q_of_h;
    j["nondeg_value"] = r.nondeg_value;
    j["cond_value"] = r.cond_value;
    j["h1_satisfied"] = r.h1_satisfied;
    j["nondeg_satisfied"] = r.nondeg_satisfied;
    j["cond_satisfied"] = r.cond_satisfied;
    const bool ok = r.h1_satisfied && r.nondeg_satisfied && r.cond_satisfied;
    j["satisfied"] = ok;
    j["reason"] = ok ? "" : (!r.h1_satisfied ? "h1" : (!r.nondeg_satisfied ? "nondeg" : "cond"));
    return j;
}

inline nlohmann::json run_check(const ScenarioConfig& cfg) {
    const CircleFunction h = build_h(cfg);
    const CircleFunction k = build_k(cfg);
    const double tol = cfg.tolerance("stationarity", 1e-8);
    return hypothesis_json(hypothesis_report(h, k, tol, /*strict=*/false));
}

// ---------------------------------------------------------------- reduce ---

inline nlohmann::json reduced_json(const ReducedSystem& s) {
    nlohmann::json j;
    j["a11"] = s.a11;
    j["a12"] = s.a12;
    j["a21"] = s.a21;
    j["a22"] = s.a22;
    j["b1"] = s.b1;
    j["b2"] = s.b2;
    j["det_A"] = s.det_A;
    j["d0"] = s.d0;
    j["s0"] = s.s0;
    j["branch"] = branch_name(s.branch);
    return j;
}

inline nlohmann::json run_reduce(const ScenarioConfig& cfg) {
    const CircleFunction h = build_h(cfg);
    const CircleFunction k = build_k(cfg);
    const HypothesisReport r = hypothesis_report(h, k, cfg.tolerance("stationarity", 1e-8));
    ReducedSystem rs = assemble_reduced(r, cfg.tolerance("degenerate", 1e-10));
    solve_reduced(rs, r.cond_satisfied);
    return reduced_json(rs);
}

// ------------------------------------------------------------------ scan ---

struct ScanResult {
    std::string csv;       // RFC-4180, CRLF line endings
    nlohmann::json slopes; // companion JSON with fitted log-log slopes
};

// One row per scan point at eta = eps = tau = 0; norms of W, E, phi and the
// leading-order multipliers. Points are independent pure computations and
// evaluated concurrently.
inline ScanResult run_scan(const ScenarioConfig& cfg) {
    const std::vector<double> deltas = log_spaced(cfg.delta_scan.min, cfg.delta_scan.max, cfg.delta_scan.count);
    struct Row {
        double delta, norm_W, norm_E, norm_phi, c0, c1, c2;
    };
    std::vector<std::future<Row>> jobs;
    for (double d : deltas) {
        jobs.push_back(std::async(std::launch::async, [d, &cfg]() {
            const std::size_t n = grid_for_delta(d, cfg.n_grid);
            ScenarioConfig local = cfg;
            local.n_grid = n;
            const CircleFunction h = build_h(local);
            const CircleFunction k = build_k(local);
            const AnsatzBundle b = build_ansatz(h, k, MobiusParam(d, 0.0), 0.0, 0.0);
            Row row{d, lp_norm(b.W, 2.0).value, lp_norm(residual_E(b).E, 1.5).value, 0.0, 0.0, 0.0, 0.0};
            const ProjectedSolution sol = solve_projected(b, cfg.tolerance("fixed_point", 1e-12));
            row.norm_phi = dirichlet_norm(sol.phi);
            row.c0 = sol.c0;
            row.c1 = sol.c1;
            row.c2 = sol.c2;
            return row;
        }));
    }
    std::vector<Row> rows;
    for (auto& f : jobs) rows.push_back(f.get());

    std::string csv = "delta,eta,eps,tau,norm_W_L2,norm_E_L32,norm_phi,c0,c1,c2\r\n";
    std::vector<double> ws, es, ps;
    bool all_positive = true;
    for (const auto& r : rows) {
        csv += detail::fmt(r.delta) + ",0,0,0," + detail::fmt(r.norm_W) + "," + detail::fmt(r.norm_E) + "," +
               detail::fmt(r.norm_phi) + "," + detail::fmt(r.c0) + "," + detail::fmt(r.c1) + "," +
               detail::fmt(r.c2) + "\r\n";
        ws.push_back(r.norm_W);
        es.push_back(r.norm_E);
        ps.push_back(r.norm_phi);
        all_positive = all_positive && r.norm_W > 0.0 && r.norm_E > 0.0 && r.norm_phi > 0.0;
    }
    ScanResult out;
    out.csv = std::move(csv);
    if (all_positive) {
        out.slopes["slope_W_L2"] = loglog_slope(deltas, ws);
        out.slopes["slope_E_L32"] = loglog_slope(deltas, es);
        out.slopes["slope_phi"] = loglog_slope(deltas, ps);
    } else {
        out.slopes["slope_W_L2"] = nullptr;
        out.slopes["slope_E_L32"] = nullptr;
        out.slopes["slope_phi"] = nullptr;
    }
    return out;
}

// ----------------------------------------------------------------- trace ---

struct TraceResult {
    std::string csv; // per-eps rows
    nlohmann::json rates;
};

inline TraceResult run_trace(const ScenarioConfig& cfg) {
    if (cfg.eps_list.empty()) throw std::invalid_argument("config: eps_list required for trace");
    const CircleFunction h = build_h(cfg);
    const CircleFunction k = build_k(cfg);
    const HypothesisReport r = hypothesis_report(h, k, cfg.tolerance("stationarity", 1e-8));
    ReducedSystem rs = assemble_reduced(r, cfg.tolerance("degenerate", 1e-10));
    solve_reduced(rs, r.cond_satisfied);

    ContinuationOptions opts;
    opts.newton_tol = cfg.tolerance("newton", 1e-10);
    const ContinuationTrace trace = continuation(h, k, rs, r, cfg.eps_list, opts);

    std::string csv = "epsilon,delta_fit,eta_fit,tau_fit,max_u,mass,iters,cond\r\n";
    for (const auto& rec : trace.records) {
        const double max_u = *std::max_element(rec.u.values().begin(), rec.u.values().end());
        csv += detail::fmt(rec.epsilon) + "," + detail::fmt(rec.fitted.delta) + "," + detail::fmt(rec.fitted.eta) +
               "," + detail::fmt(rec.tau_fit) + "," + detail::fmt(max_u) + "," + detail::fmt(rec.mass) + "," +
               std::to_string(rec.newton_iters) + "," + detail::fmt(rec.jacobian_condition) + "\r\n";
    }
    TraceResult out;
    out.csv = std::move(csv);
    out.rates["rate_d"] = trace.rate_d;
    out.rates["rate_s"] = trace.rate_s;
    out.rates["d0"] = rs.d0;
    out.rates["s0"] = rs.s0;
    return out;
}

// ------------------------------------------------------------- file sink ---

inline void write_file(const std::filesystem::path& path, const std::string& content) {
    std::filesystem::create_directories(path.parent_path().empty() ? "." : path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << content;
}

inline void write_json(const std::filesystem::path& path, const nlohmann::json& j) {
    write_file(path, j.dump(2) + "\n");
}

} // namespace liouville
