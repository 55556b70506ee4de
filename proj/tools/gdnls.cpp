// gdnls: configuration-driven front end for the solitary-wave workbench.
//
// Subcommands: profile, degeneracy, hessian, decompose, simulate,
// instability, verify. JSON configs in, CSV/JSON artifacts out; every JSON
// artifact embeds the tool version, the config hash and the seed.
#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include "gdnls/experiments.hpp"
#include "gdnls/field_io.hpp"
#include "gdnls/verify.hpp"
#include "gdnls/version.hpp"

using nlohmann::json;
using namespace gdnls;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitGateFailure = 1;
constexpr int kExitBadConfig = 2;

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw ConfigError("cannot open config: " + path);
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

std::string fnv1a_hex(const std::string& bytes) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

struct Common {
    std::string config_path;
    std::string out_dir = ".";
    std::uint64_t seed = 20240801ull;
    int threads = 1;
    json config;
    std::string config_hash = "none";

    void load() {
        if (!config_path.empty()) {
            const std::string bytes = read_file(config_path);
            config_hash = fnv1a_hex(bytes);
            config = json::parse(bytes, nullptr, true, true);  // allow comments
        } else {
            config = json::object();
        }
        std::filesystem::create_directories(out_dir);
    }
    std::string path(const std::string& name) const {
        return (std::filesystem::path(out_dir) / name).string();
    }
    json stamp() const {
        return json{{"version", kVersion},
                    {"config_hash", config_hash},
                    {"seed", seed}};
    }
    void write_json(const std::string& name, json j) const {
        j["meta"] = stamp();
        std::ofstream os(path(name));
        os << j.dump(2) << '\n';
    }
};

double need_positive(const json& j, const std::string& key, double dflt) {
    const double v = j.value(key, dflt);
    if (!(v > 0.0)) throw ConfigError(key + " must be positive");
    return v;
}

SolitonParams params_from(const json& j, std::optional<double> c_override = {}) {
    const double sigma = j.value("sigma", 1.5);
    const double omega = need_positive(j, "omega", 1.0);
    double c = c_override ? *c_override : j.value("c", 0.0);
    if (!(sigma > 1.0 && sigma < 2.0)) throw ConfigError("sigma must lie in (1,2)");
    if (!(4.0 * omega - c * c > 0.0)) throw ConfigError("need 4*omega > c^2");
    return SolitonParams(sigma, omega, c);
}

GridSpec grid_from(const json& j, double dflt_L = 80.0, std::size_t dflt_N = 2048) {
    const double L = need_positive(j, "length", dflt_L);
    const std::size_t N = j.value("count", dflt_N);
    return GridSpec(L, N);
}

std::string csv_num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

// --- subcommands -------------------------------------------------------------

int cmd_profile(Common& cm) {
    SolitonParams p = params_from(cm.config);
    GridSpec g = grid_from(cm.config);
    SolitonProfile prof = build_profile(p, g);
    const double resid = soliton_residual(prof);
    write_field_csv(cm.path("profile.csv"), prof.Q);
    cm.write_json("profile.json",
                  json{{"sigma", p.sigma},
                       {"omega", p.omega},
                       {"c", p.speed},
                       {"length", g.length},
                       {"count", g.count},
                       {"residual", resid},
                       {"boundary_magnitude", prof.boundary_magnitude},
                       {"c0_est", prof.c0_est},
                       {"c0_inv_est", prof.c0_inv_est}});
    return resid < cm.config.value("residual_gate", 1e-8) ? kExitOk : kExitGateFailure;
}

int cmd_degeneracy(Common& cm) {
    const double lo = cm.config.value("sigma_min", 1.05);
    const double hi = cm.config.value("sigma_max", 1.95);
    const double step = need_positive(cm.config, "sigma_step", 0.05);
    const double tol = need_positive(cm.config, "tol", 1e-10);
    if (!(lo > 1.0 && hi < 2.0 && hi >= lo))
        throw ConfigError("sigma grid must lie inside (1,2)");
    std::vector<double> sigmas;
    for (double s = lo; s <= hi + 0.5 * step; s += step)
        sigmas.push_back(std::min(s, hi));
    auto rows = z0_sweep(sigmas, tol, cm.threads);

    std::ofstream csv(cm.path("degeneracy.csv"));
    csv << "sigma,z0,F_residual\n";
    for (const auto& r : rows)
        csv << csv_num(r.sigma) << ',' << csv_num(r.z0) << ','
            << csv_num(r.F_residual) << '\n';

    bool decreasing = true;
    for (std::size_t i = 1; i < rows.size(); ++i)
        if (!(rows[i].z0 < rows[i - 1].z0)) decreasing = false;
    double worst = 0.0;
    for (const auto& r : rows) worst = std::max(worst, r.F_residual);
    cm.write_json("degeneracy.json", json{{"points", rows.size()},
                                          {"strictly_decreasing", decreasing},
                                          {"worst_F_residual", worst}});
    return decreasing && worst < tol ? kExitOk : kExitGateFailure;
}

int cmd_hessian(Common& cm) {
    const double sigma = cm.config.value("sigma", 1.5);
    const double omega = need_positive(cm.config, "omega", 1.0);
    std::optional<double> c;
    if (cm.config.contains("c") && cm.config["c"].is_number())
        c = cm.config["c"].get<double>();
    const double h = need_positive(cm.config, "h", 1e-4);
    const double d3_step = need_positive(cm.config, "d3_step", 1e-2);

    const double c_star = c ? *c : 2.0 * find_z0(sigma) * std::sqrt(omega);
    SolitonParams p = params_from(json{{"sigma", sigma}, {"omega", omega}}, c_star);
    GridSpec g = cm.config.contains("length") ? grid_from(cm.config)
                                              : suggest_grid(p, 1e-10, 80.0);

    DSurface ds = d_surface(p, g, h);
    std::array<double, 2> xi{};
    double hessian_residual = -1.0;
    json d3_fd = nullptr, d3_half = nullptr, d3_identity = nullptr,
         rel_gap = nullptr, d3_note = nullptr;
    try {
        xi = null_vector(ds.hessian);
        ThirdDerivative t3 = d_third_directional(p, xi.data(), g, d3_step);
        OrientedXi ox = orient_xi(xi, t3.value);
        xi = ox.xi;
        const double flip = t3.value < 0 ? 1.0 : -1.0;
        const auto& H = ds.hessian;
        const double hx0 = H[0][0] * xi[0] + H[0][1] * xi[1];
        const double hx1 = H[1][0] * xi[0] + H[1][1] * xi[1];
        hessian_residual = std::hypot(hx0, hx1) /
                           std::sqrt(H[0][0] * H[0][0] + 2.0 * H[0][1] * H[0][1] +
                                     H[1][1] * H[1][1]);
        d3_fd = ox.d3;
        d3_half = flip * t3.value_half;
        d3_identity = flip * t3.identity;
        rel_gap = t3.rel_gap;
    } catch (const std::exception& e) {
        d3_note = std::string("null-vector analysis skipped: ") + e.what();
    }

    const double tr = ds.hessian[0][0] + ds.hessian[1][1];
    const double disc = std::sqrt(std::max(
        (ds.hessian[0][0] - ds.hessian[1][1]) * (ds.hessian[0][0] - ds.hessian[1][1]) +
            4.0 * ds.hessian[0][1] * ds.hessian[0][1],
        0.0));
    cm.write_json(
        "hessian.json",
        json{{"sigma", sigma},
             {"omega", omega},
             {"c", p.speed},
             {"d", ds.d},
             {"grad", {ds.grad[0], ds.grad[1]}},
             {"hessian",
              {{ds.hessian[0][0], ds.hessian[0][1]},
               {ds.hessian[1][0], ds.hessian[1][1]}}},
             {"det", ds.det()},
             {"eigs", {0.5 * (tr - disc), 0.5 * (tr + disc)}},
             {"symmetry_defect", ds.symmetry_defect},
             {"fd_step", h},
             {"xi", {xi[0], xi[1]}},
             {"hessian_residual", hessian_residual},
             {"d3_fd", d3_fd},
             {"d3_fd_half_step", d3_half},
             {"d3_identity", d3_identity},
             {"rel_gap", rel_gap},
             {"d3_note", d3_note}});
    return kExitOk;
}

int cmd_decompose(Common& cm) {
    if (!cm.config.contains("field"))
        throw ConfigError("decompose config needs a 'field' csv path");
    ComplexField u = read_field_csv(cm.config["field"].get<std::string>());
    const double sigma = cm.config.value("sigma", 1.5);
    const double omega = need_positive(cm.config, "omega", 1.0);
    DegenerateSetup s = make_degenerate_setup(sigma, omega, u.grid);
    std::array<double, 3> seed = {cm.config.value("seed_y", 0.0),
                                  cm.config.value("seed_gamma", 0.0),
                                  cm.config.value("seed_lambda", 0.0)};
    ModulationState st = decompose(u, s.prof, s.phi(), s.xi(), seed);
    cm.write_json("decompose.json", json{{"y", st.y},
                                         {"gamma", st.gamma},
                                         {"lambda", st.lambda},
                                         {"eps_h1", st.eps_h1},
                                         {"eps_BQ", st.eps_BQ},
                                         {"iters", st.newton_iters},
                                         {"residual", st.residual_norm},
                                         {"converged", st.converged},
                                         {"c_star", s.params.speed}});
    return st.converged ? kExitOk : kExitGateFailure;
}

void write_trajectory_csv(const std::string& path, const TrajectoryRecord& rec,
                          const ModulationSeries& ms, const VirialSeries& vs,
                          const DistanceSeries& ds) {
    std::ofstream csv(path);
    csv << "t,M,P,E,y,gamma,lambda,eps_h1,I,dIdt,dist\n";
    for (std::size_t i = 0; i < rec.times.size(); ++i) {
        csv << csv_num(rec.times[i]) << ',' << csv_num(rec.mass_series[i]) << ','
            << csv_num(rec.momentum_series[i]) << ','
            << csv_num(rec.energy_series[i]) << ',';
        if (i < ms.times.size()) {
            csv << csv_num(ms.y[i]) << ',' << csv_num(ms.gamma[i]) << ','
                << csv_num(ms.lambda[i]) << ',' << csv_num(ms.eps_h1[i]) << ','
                << csv_num(vs.I[i]) << ',' << csv_num(vs.I_dot[i]);
        } else {
            csv << "nan,nan,nan,nan,nan,nan";  // tracking stopped (tube exit)
        }
        csv << ',' << (i < ds.dist.size() ? csv_num(ds.dist[i]) : "nan") << '\n';
    }
}

int cmd_simulate(Common& cm) {
    const double sigma = cm.config.value("sigma", 1.5);
    const double omega = need_positive(cm.config, "omega", 1.0);
    GridSpec g = grid_from(cm.config);
    DegenerateSetup s = cm.config.contains("c")
                            ? DegenerateSetup{}
                            : make_degenerate_setup(sigma, omega, g);
    SolitonProfile prof;
    SolitonParams p = cm.config.contains("c") ? params_from(cm.config)
                                              : s.params;
    if (cm.config.contains("c")) {
        prof = build_profile(p, g);
    } else {
        prof = s.prof;
    }

    SimConfig sim;
    sim.grid = g;
    sim.params = p;
    sim.dt = need_positive(cm.config, "dt", 5e-4);
    sim.T = need_positive(cm.config, "T", 5.0);
    sim.sample_stride = cm.config.value("stride", std::size_t{100});
    sim.mass_drift_halt = need_positive(cm.config, "mass_drift_halt", 1e-5);
    const double lambda0 = cm.config.value("lambda0", 0.0);

    ComplexField u0 = prof.Q;
    ModulationSeries ms;
    VirialSeries vs;
    DistanceSeries dist;
    TrajectoryRecord rec;
    if (!cm.config.contains("c")) {
        if (lambda0 != 0.0) u0 = build_unstable_data(s.prof, s.phi(), s.xi(), lambda0);
        rec = evolve(sim, u0);
        const double tube = cm.config.value("tube_radius", 0.3 * h1_norm(prof.Q));
        ms = track_modulation(rec, s.prof, s.phi(), s.xi(), tube);
        VirialCoeffs vc = virial_coefficients(s.prof, s.phi(), s.xi());
        vs = virial_series(ms, s.prof, s.phi(), vc, s.d3);
    } else {
        rec = evolve(sim, u0);
    }
    dist.times = rec.times;
    for (const auto& f : rec.fields) dist.dist.push_back(orbital_distance(f, prof));

    write_trajectory_csv(cm.path("trajectory.csv"), rec, ms, vs, dist);
    if (cm.config.contains("snapshot_times"))
        for (const auto& jt : cm.config["snapshot_times"]) {
            const double t = jt.get<double>();
            std::size_t best = 0;
            for (std::size_t i = 0; i < rec.times.size(); ++i)
                if (std::abs(rec.times[i] - t) < std::abs(rec.times[best] - t))
                    best = i;
            char name[64];
            std::snprintf(name, sizeof(name), "snapshot_t%.6g.csv", rec.times[best]);
            write_field_csv(cm.path(name), rec.fields[best]);
        }

    cm.write_json("simulate.json",
                  json{{"sigma", p.sigma},
                       {"omega", p.omega},
                       {"c", p.speed},
                       {"dt_used", rec.dt_used},
                       {"cfl_reduced", rec.cfl_reduced},
                       {"halted_early", rec.halted_early},
                       {"halt_time", rec.halt_time},
                       {"halt_reason", rec.halt_reason},
                       {"samples", rec.times.size()},
                       {"tube_exit",
                        ms.exit_time ? json(*ms.exit_time) : json(nullptr)},
                       {"lambda0", lambda0}});
    return rec.halted_early && lambda0 == 0.0 ? kExitGateFailure : kExitOk;
}

int cmd_instability(Common& cm) {
    InstabilityConfig cfg;
    cfg.sigma = cm.config.value("sigma", 1.5);
    cfg.omega = need_positive(cm.config, "omega", 1.0);
    cfg.grid = grid_from(cm.config);
    cfg.kappa_grid = GridSpec(cm.config.value("kappa_length", 60.0),
                              cm.config.value("kappa_count", std::size_t{512}));
    cfg.dt = need_positive(cm.config, "dt", 5e-4);
    cfg.T = need_positive(cm.config, "T", 60.0);
    cfg.sample_stride = cm.config.value("stride", std::size_t{100});
    cfg.lambda0 = cm.config.value("lambda0", 0.05);
    if (cfg.lambda0 < 0.0)
        throw ConfigError("lambda0 must be >= 0 (the certified branch is positive)");
    cfg.tube_radius = cm.config.value("tube_radius", 0.0);
    cfg.mass_drift_halt = need_positive(cm.config, "mass_drift_halt", 1e-4);
    cfg.transient = cm.config.value("transient", 1.0);
    cfg.run_mirror = cm.config.value("run_mirror", false);

    InstabilityResult res = run_instability_experiment(cfg);

    write_trajectory_csv(cm.path("instability_perturbed.csv"), res.perturbed,
                         res.series, res.virial_series, res.perturbed_dist);
    {
        std::ofstream csv(cm.path("instability_control.csv"));
        csv << "t,dist\n";
        for (std::size_t i = 0; i < res.control_dist.times.size(); ++i)
            csv << csv_num(res.control_dist.times[i]) << ','
                << csv_num(res.control_dist.dist[i]) << '\n';
    }

    // lambda0 = 0 is the stable control: staying near the orbit is the pass
    const bool expect_crossing = cfg.lambda0 != 0.0;
    const bool all_ok = res.lambda_bound_ok && res.eet_ok && res.idot_ok &&
                        res.alpha0_crossed == expect_crossing && res.control_ok;
    cm.write_json(
        "instability.json",
        json{{"t0", res.exit_time ? json(*res.exit_time) : json(nullptr)},
             {"alpha0_crossed", res.alpha0_crossed},
             {"alpha0_cross_time",
              res.alpha0_cross_time ? json(*res.alpha0_cross_time) : json(nullptr)},
             {"Idot_ratio_range", {res.idot_ratio_min, res.idot_ratio_max}},
             {"eet_bound_ok", res.eet_ok},
             {"eet_worst_ratio", res.eet_worst_ratio},
             {"lt_bound_ok", res.lambda_bound_ok},
             {"control_ok", res.control_ok},
             {"control_max_distance", res.control_max_distance},
             {"initial_distance", res.initial_distance},
             {"kappa", res.kappa},
             {"kappa_subspace", res.kappa_subspace},
             {"d3", res.d3},
             {"tube_radius", res.tube_radius},
             {"mirror_cross_time",
              res.mirror_cross_time ? json(*res.mirror_cross_time) : json(nullptr)},
             {"verdict", !all_ok            ? "gates-failed"
                         : expect_crossing  ? "unstable-as-predicted"
                                            : "stable-control-as-predicted"}});
    return all_ok ? kExitOk : kExitGateFailure;
}

int cmd_verify(Common& cm) {
    verify::Options opt;
    opt.threads = cm.threads;
    opt.seed = cm.seed;
    opt.include_long = cm.config.value("include_long", true);
    if (cm.config.contains("only"))
        for (const auto& s : cm.config["only"])
            opt.only.push_back(s.get<std::string>());

    auto results = verify::run_all(opt);
    json arr = json::array();
    bool ok = !results.empty();
    for (const auto& r : results) {
        std::printf("[%s] %-4s %s (%.1fs)\n        %s\n", r.pass ? "PASS" : "FAIL",
                    r.id.c_str(), r.label.c_str(), r.seconds, r.detail.c_str());
        std::fflush(stdout);
        arr.push_back(json{{"id", r.id},
                           {"label", r.label},
                           {"pass", r.pass},
                           {"detail", r.detail},
                           {"seconds", r.seconds}});
        ok = ok && r.pass;
    }
    cm.write_json("verify.json", json{{"criteria", arr}, {"all_passed", ok}});
    return ok ? kExitOk : kExitGateFailure;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"gdnls solitary-wave workbench"};
    app.require_subcommand(1);
    app.fallthrough();  // global flags may follow the subcommand name

    Common cm;
    app.add_option("--config", cm.config_path, "JSON config path")
        ->envname("GDNLS_CONFIG");
    app.add_option("--out", cm.out_dir, "output directory")->envname("GDNLS_OUT");
    app.add_option("--seed", cm.seed, "RNG seed recorded in outputs")
        ->envname("GDNLS_SEED");
    app.add_option("--threads", cm.threads, "worker threads for sweeps")
        ->envname("GDNLS_THREADS");

    auto* profile = app.add_subcommand("profile", "build a solitary wave, emit CSV + report");
    auto* degeneracy = app.add_subcommand("degeneracy", "z0(sigma) sweep CSV");
    auto* hessian = app.add_subcommand("hessian", "d(omega,c) surface report");
    auto* decomp = app.add_subcommand("decompose", "modulation decomposition of a field CSV");
    auto* simulate = app.add_subcommand("simulate", "time evolution with tracking");
    auto* instability = app.add_subcommand("instability", "the Theorem-style experiment");
    auto* verify_cmd = app.add_subcommand("verify", "run the full acceptance gate");

    CLI11_PARSE(app, argc, argv);

    try {
        cm.load();
        if (profile->parsed()) return cmd_profile(cm);
        if (degeneracy->parsed()) return cmd_degeneracy(cm);
        if (hessian->parsed()) return cmd_hessian(cm);
        if (decomp->parsed()) return cmd_decompose(cm);
        if (simulate->parsed()) return cmd_simulate(cm);
        if (instability->parsed()) return cmd_instability(cm);
        if (verify_cmd->parsed()) return cmd_verify(cm);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitBadConfig;
    } catch (const json::exception& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitBadConfig;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitBadConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitGateFailure;
    }
    return kExitBadConfig;
}
