// perthull: simulation and numerical-verification CLI for convex hulls of
// perturbed random point sets.
//
// Subcommands: regimes, simulate, limit, constants, verify.
// Exit codes: 0 ok, 1 verification/acceptance failure, 2 configuration error.
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "perthull/experiments.hpp"
#include "perthull/geometry.hpp"
#include "perthull/hull.hpp"
#include "perthull/limit.hpp"
#include "perthull/model.hpp"
#include "perthull/parallel.hpp"
#include "perthull/quadrature.hpp"
#include "perthull/scaling.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace perthull;

namespace {

constexpr const char* kVersion = "0.1.0";

std::string num17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

fs::path default_out_dir() {
    if (const char* env = std::getenv("PERTHULL_OUT")) return fs::path(env);
    return fs::path("out");
}

void write_file(const fs::path& path, const std::string& content) {
    fs::create_directories(path.parent_path().empty() ? "." : path.parent_path());
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open for writing: " + path.string());
    os << content;
    if (!os) throw std::runtime_error("write failed: " + path.string());
}

void write_manifest(const fs::path& dir, const std::string& command, const json& config) {
    json manifest;
    manifest["tool"] = "perthull";
    manifest["version"] = kVersion;
    manifest["command"] = command;
    manifest["config"] = config;
    write_file(dir / "manifest.json", manifest.dump(2) + "\n");
}

// Alpha may arrive as a rational literal ("2/3") for exact boundary handling.
RegimeParams parse_alpha(int d, const std::string& text, double& alpha_out) {
    const auto slash = text.find('/');
    if (slash != std::string::npos) {
        const long long num = std::stoll(text.substr(0, slash));
        const long long den = std::stoll(text.substr(slash + 1));
        RegimeParams rp = classify_rational(d, num, den);
        alpha_out = rp.alpha;
        return rp;
    }
    alpha_out = std::stod(text);
    return classify(d, alpha_out);
}

// ---------------------------------------------------------------------------
// regimes

int cmd_regimes(int d, double alpha_min, double alpha_max, double alpha_step,
                double h_max, double h_step, const fs::path& out_dir) {
    const double hi = 2.0 / (d + 1);
    const double lo = -2.0 / (d - 1);

    std::set<double> grid;
    for (double a = alpha_min; a <= alpha_max + 1e-12; a += alpha_step) grid.insert(a);
    for (double a : {hi, 0.0, lo})
        if (a >= alpha_min && a <= alpha_max) grid.insert(a);

    std::string beta_csv = "alpha,beta,regime\n";
    for (double a : grid) {
        const RegimeParams rp = classify(d, a);
        beta_csv += num17(a) + "," + num17(rp.beta) + "," + to_string(rp.regime) + "\n";
    }
    write_file(out_dir / "beta_curve.csv", beta_csv);

    // One representative alpha per limit-intensity shape.
    const std::vector<double> reps = {hi + 1.0, hi, hi / 2.0, 0.0, lo / 2.0, lo, lo - 1.0};
    std::string nu_csv = "alpha,h,density,regime\n";
    for (double a : reps) {
        const RegimeParams rp = classify(d, a);
        if (rp.regime == Regime::Sub) {
            // Point mass at 0: single sentinel row with infinite density.
            nu_csv += num17(a) + ",0," + num17(std::numeric_limits<double>::infinity()) +
                      "," + to_string(rp.regime) + "\n";
            continue;
        }
        for (double h = 0.0; h <= h_max + 1e-12; h += h_step) {
            nu_csv += num17(a) + "," + num17(h) + "," + num17(nu_limit_pdf(d, a, h)) +
                      "," + to_string(rp.regime) + "\n";
        }
    }
    write_file(out_dir / "nu_density.csv", nu_csv);

    json config = {{"d", d},
                   {"alpha_min", alpha_min},
                   {"alpha_max", alpha_max},
                   {"alpha_step", alpha_step},
                   {"h_max", h_max},
                   {"h_step", h_step}};
    write_manifest(out_dir, "regimes", config);
    std::printf("regimes: wrote %s and %s\n", (out_dir / "beta_curve.csv").c_str(),
                (out_dir / "nu_density.csv").c_str());
    return 0;
}

// ---------------------------------------------------------------------------
// simulate

const std::set<std::string> kSimulateKeys = {
    "d",       "alpha",        "kind",    "scales",        "replications",
    "ks",      "window_height", "seed",   "threads",       "experiments",
    "boundary", "pattern",      "clt_k"};

int cmd_simulate(const fs::path& config_path, fs::path out_dir, int threads_override,
                 long long seed_override) {
    std::ifstream is(config_path);
    if (!is) {
        std::fprintf(stderr, "config error: cannot open %s\n", config_path.c_str());
        return 2;
    }
    json cfg;
    try {
        cfg = json::parse(is);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    }
    for (const auto& [key, value] : cfg.items()) {
        (void)value;
        if (!kSimulateKeys.count(key)) {
            std::fprintf(stderr, "config error: unknown key '%s'\n", key.c_str());
            return 2;
        }
    }
    for (const char* required : {"d", "alpha", "kind", "scales", "replications"}) {
        if (!cfg.contains(required)) {
            std::fprintf(stderr, "config error: missing required key '%s'\n", required);
            return 2;
        }
    }

    ExperimentSpec spec;
    try {
        spec.d = cfg.at("d").get<int>();
        spec.alpha = cfg.at("alpha").get<double>();
        spec.kind = model_kind_from_string(cfg.at("kind").get<std::string>());
        spec.scales = cfg.at("scales").get<std::vector<double>>();
        spec.replications = cfg.at("replications").get<int>();
        if (cfg.contains("ks")) spec.ks = cfg.at("ks").get<std::vector<int>>();
        if (cfg.contains("window_height"))
            spec.window_height = cfg.at("window_height").get<double>();
        if (cfg.contains("seed")) spec.master_seed = cfg.at("seed").get<uint64_t>();
        if (cfg.contains("threads")) spec.threads = cfg.at("threads").get<int>();
        if (seed_override >= 0) spec.master_seed = static_cast<uint64_t>(seed_override);
        if (threads_override > 0) spec.threads = threads_override;
        if (spec.threads <= 0) spec.threads = default_thread_count();
        spec.validate();
    } catch (const std::exception& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    }

    std::vector<std::string> experiments = {"moments"};
    if (cfg.contains("experiments"))
        experiments = cfg.at("experiments").get<std::vector<std::string>>();

    json resolved = cfg;
    resolved["seed"] = spec.master_seed;
    resolved["threads"] = spec.threads;
    write_manifest(out_dir, "simulate", resolved);

    MomentReport report;
    for (const std::string& exp : experiments) {
        if (exp == "moments" || exp == "slope" || exp == "clt") {
            if (report.cells.empty()) report = run_moment_experiment(spec);
        }
        if (exp == "moments") {
            write_file(out_dir / "moments.json", moment_report_json(report));
            write_file(out_dir / "moments.csv", moment_report_csv(report));
        } else if (exp == "slope") {
            json out = json::object();
            for (int k : spec.ks) {
                const SlopeReport sr = scaling_slope(report, k);
                out[std::to_string(k)] = {{"slope", sr.full.slope},
                                          {"slope_se", sr.full.slope_se},
                                          {"headline_slope", sr.headline.slope},
                                          {"curvature", sr.curvature}};
            }
            write_file(out_dir / "slope.json", out.dump(2) + "\n");
        } else if (exp == "heights") {
            const auto rows = height_distribution_test(spec);
            std::string csv =
                "scale,ks,pooled_count,wide_error,sub_fraction_above_half,sub_fraction_"
                "above_fixed\n";
            for (const auto& r : rows)
                csv += num17(r.scale) + "," + num17(r.ks) + "," +
                       std::to_string(r.pooled_count) + "," +
                       std::to_string(static_cast<int>(r.wide_error)) + "," +
                       num17(r.sub_fraction_above_half) + "," +
                       num17(r.sub_fraction_above_fixed) + "\n";
            write_file(out_dir / "height_ks.csv", csv);
        } else if (exp == "boundary") {
            double L = 2.0;
            int points = 21;
            if (cfg.contains("boundary")) {
                L = cfg.at("boundary").value("L", 2.0);
                points = cfg.at("boundary").value("points", 21);
            }
            std::vector<Vec> grid;
            for (int i = 0; i < points; ++i) {
                Vec v(spec.d - 1);
                v[0] = -L + 2.0 * L * i / (points - 1);
                grid.push_back(v);
            }
            const auto rows = boundary_profile_compare(spec, grid);
            std::string csv = "scale,median_sup_distance,reps_failed\n";
            for (const auto& r : rows)
                csv += num17(r.scale) + "," + num17(r.median) + "," +
                       std::to_string(r.reps_failed) + "\n";
            write_file(out_dir / "boundary.csv", csv);
        } else if (exp == "clt") {
            const int k = cfg.value("clt_k", 0);
            const auto rows = clt_diagnostics(spec, k);
            std::string csv =
                "scale,k,reps,ks_stat,ks_pvalue,skewness,excess_kurtosis,looks_normal\n";
            for (const auto& r : rows)
                csv += num17(r.scale) + "," + std::to_string(r.k) + "," +
                       std::to_string(r.reps) + "," + num17(r.ks_stat) + "," +
                       num17(r.ks_pvalue) + "," + num17(r.shape.skewness) + "," +
                       num17(r.shape.excess_kurtosis) + "," +
                       std::to_string(static_cast<int>(r.looks_normal)) + "\n";
            write_file(out_dir / "clt.csv", csv);
        } else if (exp == "pattern") {
            int boxes = 8;
            double L = 4.0, H = 4.0;
            if (cfg.contains("pattern")) {
                boxes = cfg.at("pattern").value("boxes", 8);
                L = cfg.at("pattern").value("L", 4.0);
                H = cfg.at("pattern").value("H", 4.0);
            }
            const auto rows = extreme_point_pattern_compare(spec, boxes, L, H);
            std::string csv =
                "scale,tv_distance,model_ext_intensity,limit_ext_intensity\n";
            for (const auto& r : rows)
                csv += num17(r.scale) + "," + num17(r.tv_distance) + "," +
                       num17(r.model_ext_intensity) + "," +
                       num17(r.limit_ext_intensity) + "\n";
            write_file(out_dir / "pattern.csv", csv);
        } else {
            std::fprintf(stderr, "config error: unknown experiment '%s'\n", exp.c_str());
            return 2;
        }
    }
    std::printf("simulate: reports written to %s\n", out_dir.c_str());
    return 0;
}

// ---------------------------------------------------------------------------
// limit

int cmd_limit(int d, const std::string& alpha_text, double L, double H, int reps,
              uint64_t seed, int grid_points, const fs::path& out_dir) {
    double alpha = 0.0;
    parse_alpha(d, alpha_text, alpha);
    for (int rep = 0; rep < reps; ++rep) {
        RngStream rng = RngStream::derive(seed, static_cast<uint64_t>(rep), 0x71);
        const RescaledCloud cloud = sample_limit_process(d, alpha, L, H, rng);
        if (cloud.size() == 0) {
            write_file(out_dir / ("festoon_points_" + std::to_string(rep) + ".csv"),
                       "empty\n");
            continue;
        }
        const FestoonSample fs_sample = analyze_festoon(cloud);
        std::string points_csv;
        for (int j = 0; j + 1 < d; ++j) points_csv += "v" + std::to_string(j) + ",";
        points_csv += "h,is_ext";
        for (int k = 0; k < d; ++k) points_csv += ",xi_" + std::to_string(k);
        points_csv += "\n";
        for (int i = 0; i < cloud.size(); ++i) {
            const RescaledPoint& w = cloud.points[static_cast<size_t>(i)];
            for (int j = 0; j + 1 < d; ++j) points_csv += num17(w.v[j]) + ",";
            points_csv += num17(w.h) + "," + std::to_string(static_cast<int>(fs_sample.is_ext(i)));
            for (int k = 0; k < d; ++k) points_csv += "," + num17(fs_sample.xi(i, k));
            points_csv += "\n";
        }
        write_file(out_dir / ("festoon_points_" + std::to_string(rep) + ".csv"),
                   points_csv);

        // Envelope on a regular grid along the first spatial axis.
        std::string env_csv;
        for (int j = 0; j + 1 < d; ++j) env_csv += "v" + std::to_string(j) + ",";
        env_csv += "boundary_h\n";
        const double gl = 0.5 * L;
        for (int i = 0; i < grid_points; ++i) {
            Vec v(d - 1);
            v[0] = -gl + 2.0 * gl * i / (grid_points - 1);
            double b;
            try {
                b = fs_sample.boundary(v);
            } catch (const OutOfWindowError&) {
                continue;
            }
            for (int j = 0; j + 1 < d; ++j) env_csv += num17(v[j]) + ",";
            env_csv += num17(b) + "\n";
        }
        write_file(out_dir / ("festoon_envelope_" + std::to_string(rep) + ".csv"),
                   env_csv);
    }
    json config = {{"d", d},       {"alpha", alpha_text}, {"L", L},
                   {"H", H},       {"reps", reps},        {"seed", seed},
                   {"grid_points", grid_points}};
    write_manifest(out_dir, "limit", config);
    std::printf("limit: %d festoon samples written to %s\n", reps, out_dir.c_str());
    return 0;
}

// ---------------------------------------------------------------------------
// constants

int cmd_constants(int d, const std::string& alpha_text, int k, int reps, int nodes,
                  double hcap, double lhs_scale, int lhs_reps, bool sigma, int threads,
                  uint64_t seed, const fs::path& out_dir) {
    double alpha = 0.0;
    parse_alpha(d, alpha_text, alpha);
    json out;

    LimitConstantOptions opts;
    opts.mc.replications = reps;
    opts.mc.seed = seed;
    opts.nodes = nodes;
    opts.height_cap = hcap;
    opts.threads = threads;
    const Estimate rhs = estimate_limit_constant(d, alpha, k, opts);
    out["rhs"] = {{"value", rhs.value},
                  {"stderr", rhs.stderr_value},
                  {"sensitivity_shift", rhs.sensitivity_shift},
                  {"wide_error", rhs.wide_error}};
    std::printf("constants: RHS integral E xi_%d dnu = %.6f +- %.6f (window shift %.2e)\n",
                k, rhs.value, rhs.stderr_value, rhs.sensitivity_shift);

    if (lhs_scale > 0.0 && lhs_reps > 0) {
        ExperimentSpec spec;
        spec.d = d;
        spec.alpha = alpha;
        spec.kind = ModelKind::Poisson;
        spec.scales = {lhs_scale};
        spec.ks = {k};
        spec.replications = lhs_reps;
        spec.master_seed = seed ^ 0x1115ull;
        spec.threads = threads;
        const MomentReport report = run_moment_experiment(spec);
        const MomentCell& cell = report.cell(0, 0);
        out["lhs"] = {{"scale", lhs_scale},
                      {"rescaled_mean", cell.rescaled_mean},
                      {"stderr", cell.se_mean / cell.rescale},
                      {"reps_ok", cell.reps_ok},
                      {"reps_failed", cell.reps_failed}};
        std::printf("constants: LHS E f_%d / (d kappa_d u^{d-1}) at scale %.3g = %.6f +- %.6f\n",
                    k, lhs_scale, cell.rescaled_mean, cell.se_mean / cell.rescale);
    }
    if (sigma) {
        SigmaSqOptions sopts;
        sopts.mc.replications = std::max(100, reps / 4);
        sopts.mc.seed = seed ^ 0x51f3ull;
        sopts.mc.threads = threads;
        const Estimate s2 = estimate_sigma_sq(d, alpha, k, sopts);
        out["sigma_sq"] = {{"value", s2.value}, {"stderr", s2.stderr_value}};
        std::printf("constants: sigma^2(xi_%d) = %.6f +- %.6f\n", k, s2.value,
                    s2.stderr_value);
    }
    json config = {{"d", d},     {"alpha", alpha_text}, {"k", k},
                   {"reps", reps}, {"nodes", nodes},     {"hcap", hcap},
                   {"lhs_scale", lhs_scale}, {"lhs_reps", lhs_reps},
                   {"sigma", sigma}, {"seed", seed}, {"threads", threads}};
    write_manifest(out_dir, "constants", config);
    write_file(out_dir / "constants.json", out.dump(2) + "\n");
    return 0;
}

// ---------------------------------------------------------------------------
// verify

int cmd_verify(int d_max, double perturb_kappa) {
    int failures = 0;
    auto check = [&failures](bool ok, const std::string& label) {
        std::printf("[%s] %s\n", ok ? "PASS" : "FAIL", label.c_str());
        if (!ok) ++failures;
    };

    // Mass identity over regimes x dimensions x scales.
    for (int d : {2, 3, 4}) {
        const double hi = 2.0 / (d + 1);
        const double lo = -2.0 / (d - 1);
        const std::vector<double> alphas = {hi + 0.5, hi, hi / 2.0, 0.0, lo / 2.0, lo,
                                            lo - 2.0};
        for (double lambda : {1e3, 1e5}) {
            for (double alpha : alphas) {
                const ScaleContext ctx = make_scale_context(d, alpha, lambda);
                const double mass = phi_total_mass(ctx);
                const double target =
                    lambda / (d * unit_ball_volume(d) * std::pow(ctx.u, d - 1));
                const double rel = std::fabs(mass / target - 1.0);
                char label[160];
                std::snprintf(label, sizeof label,
                              "mass identity d=%d alpha=%+.4f lambda=%.0e rel=%.2e", d,
                              alpha, lambda, rel);
                check(rel < 1e-6, label);
            }
        }
    }

    // Beta-function normalization.
    for (int d = 2; d <= d_max; ++d) {
        const double resid = beta_normalization_residual(d, perturb_kappa);
        char label[96];
        std::snprintf(label, sizeof label, "beta normalization d=%d resid=%.2e", d, resid);
        check(resid < 1e-12, label);
    }

    // beta(alpha) continuity at the three regime boundaries.
    for (int d = 2; d <= d_max; ++d) {
        const double hi = 2.0 / (d + 1);
        const double lo = -2.0 / (d - 1);
        const double eps = 1e-13;
        bool ok = true;
        ok = ok && std::fabs(classify(d, hi + eps).beta - classify(d, hi).beta) < 1e-13;
        ok = ok && std::fabs(classify(d, hi - eps).beta - classify(d, hi).beta) < 1e-13;
        ok = ok && std::fabs(classify(d, eps).beta - classify(d, 0.0).beta) < 1e-13;
        ok = ok && std::fabs(classify(d, -eps).beta - classify(d, 0.0).beta) < 1e-13;
        ok = ok && std::fabs(classify(d, lo + eps).beta - classify(d, lo).beta) < 1e-13;
        ok = ok && std::fabs(classify(d, lo - eps).beta - classify(d, lo).beta) < 1e-13;
        char label[64];
        std::snprintf(label, sizeof label, "beta continuity d=%d", d);
        check(ok, label);
    }

    // s1/s2 consistency: closed forms vs quadrature and the small-h ratio.
    for (int d = 2; d <= d_max; ++d) {
        bool ok = true;
        for (double h : {1e-4, 0.1, 0.5, 1.0, 1.5, 1.999}) {
            // Closed form of int_0^phi sin^m by the reduction
            // I_m = (-cos phi sin^{m-1} phi + (m-1) I_{m-2}) / m.
            const double phi_angle = std::acos(1.0 - h);
            std::vector<double> integrals(static_cast<size_t>(std::max(2, d - 1)));
            integrals[0] = phi_angle;
            if (d >= 3) integrals[1] = 1.0 - std::cos(phi_angle);
            for (int m = 2; m <= d - 2; ++m)
                integrals[static_cast<size_t>(m)] =
                    (-std::cos(phi_angle) * std::pow(std::sin(phi_angle), m - 1) +
                     (m - 1) * integrals[static_cast<size_t>(m - 2)]) / m;
            const double closed = (d - 1) * unit_ball_volume(d - 1) /
                                  (d * unit_ball_volume(d)) *
                                  integrals[static_cast<size_t>(d - 2)];
            ok = ok && std::fabs(cap_s1(d, h) - closed) < 1e-10;
        }
        const double ratio = cap_s2(d, 1e-6) / cap_s1(d, 1e-6);
        ok = ok && std::fabs(ratio - 1.0) < 1e-3;
        char label[64];
        std::snprintf(label, sizeof label, "s1/s2 consistency d=%d", d);
        check(ok, label);
    }

    std::printf("verify: %d failure(s)\n", failures);
    return failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"perthull: convex hulls of perturbed random point sets"};
    app.require_subcommand(1);

    // regimes
    auto* regimes = app.add_subcommand("regimes", "emit beta curve and limit intensities");
    int r_d = 2;
    double r_amin = -3.0, r_amax = 1.5, r_astep = 0.005, r_hmax = 3.0, r_hstep = 0.01;
    std::string r_out;
    regimes->add_option("--d", r_d, "dimension");
    regimes->add_option("--alpha-min", r_amin);
    regimes->add_option("--alpha-max", r_amax);
    regimes->add_option("--alpha-step", r_astep);
    regimes->add_option("--h-max", r_hmax);
    regimes->add_option("--h-step", r_hstep);
    regimes->add_option("--out", r_out, "output directory");

    // simulate
    auto* simulate = app.add_subcommand("simulate", "run replication experiments");
    std::string s_config, s_out;
    int s_threads = 0;
    long long s_seed = -1;
    simulate->add_option("--config", s_config, "JSON config path")->required();
    simulate->add_option("--out", s_out, "output directory");
    simulate->add_option("--threads", s_threads, "worker threads (overrides config)");
    simulate->add_option("--seed", s_seed, "master seed (overrides config)");

    // limit
    auto* limit = app.add_subcommand("limit", "sample the limit process and festoon");
    int l_d = 2, l_reps = 3, l_grid = 64;
    std::string l_alpha = "0";
    double l_L = 8.0, l_H = 8.0;
    uint64_t l_seed = kDefaultSeed;
    std::string l_out;
    limit->add_option("--d", l_d);
    limit->add_option("--alpha", l_alpha, "alpha (decimal or rational p/q)");
    limit->add_option("--L", l_L, "spatial window radius");
    limit->add_option("--H", l_H, "height cap");
    limit->add_option("--reps", l_reps);
    limit->add_option("--grid", l_grid, "envelope grid points");
    limit->add_option("--seed", l_seed);
    limit->add_option("--out", l_out);

    // constants
    auto* constants = app.add_subcommand("constants", "estimate limit constants");
    int c_d = 2, c_k = 0, c_reps = 2000, c_nodes = 12, c_lhs_reps = 0, c_threads = 0;
    std::string c_alpha = "0";
    double c_hcap = 12.0, c_lhs_scale = 0.0;
    bool c_sigma = false;
    uint64_t c_seed = kDefaultSeed;
    std::string c_out;
    constants->add_option("--d", c_d);
    constants->add_option("--alpha", c_alpha);
    constants->add_option("--k", c_k);
    constants->add_option("--reps", c_reps, "MC replications per quadrature node");
    constants->add_option("--nodes", c_nodes);
    constants->add_option("--hcap", c_hcap);
    constants->add_option("--lhs-scale", c_lhs_scale, "also estimate the finite-scale LHS");
    constants->add_option("--lhs-reps", c_lhs_reps);
    constants->add_flag("--sigma", c_sigma, "estimate the limit variance too");
    constants->add_option("--threads", c_threads);
    constants->add_option("--seed", c_seed);
    constants->add_option("--out", c_out);

    // verify
    auto* verify = app.add_subcommand("verify", "check the analytic identities");
    int v_dmax = 8;
    double v_perturb = 0.0;
    verify->add_option("--d-max", v_dmax);
    verify->add_option("--test-perturb-kappa", v_perturb,
                       "perturb kappa_d (negative-control hook)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (regimes->parsed()) {
            const fs::path out = r_out.empty() ? default_out_dir() / "regimes" : fs::path(r_out);
            return cmd_regimes(r_d, r_amin, r_amax, r_astep, r_hmax, r_hstep, out);
        }
        if (simulate->parsed()) {
            const fs::path out =
                s_out.empty() ? default_out_dir() / "simulate" : fs::path(s_out);
            return cmd_simulate(s_config, out, s_threads, s_seed);
        }
        if (limit->parsed()) {
            const fs::path out = l_out.empty() ? default_out_dir() / "limit" : fs::path(l_out);
            return cmd_limit(l_d, l_alpha, l_L, l_H, l_reps, l_seed, l_grid, out);
        }
        if (constants->parsed()) {
            const fs::path out =
                c_out.empty() ? default_out_dir() / "constants" : fs::path(c_out);
            if (c_threads <= 0) c_threads = default_thread_count();
            return cmd_constants(c_d, c_alpha, c_k, c_reps, c_nodes, c_hcap, c_lhs_scale,
                                 c_lhs_reps, c_sigma, c_threads, c_seed, out);
        }
        if (verify->parsed()) return cmd_verify(v_dmax, v_perturb);
    } catch (const DomainError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 2;
}
