// hurstlab: batch front end for field sampling, fOU covariances, ergodic SDE
// simulation, Hurst estimation, Gaussian-product expansions and the bound
// verification engine. Every run writes a manifest with the resolved
// configuration; identical manifests reproduce every output byte for byte.

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <clocale>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "hurstlab/hurstlab.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace hurstlab;

namespace {

struct RunContext {
    std::string subcommand;
    fs::path out_dir;
    std::uint64_t seed = 0;
    int threads = 1;
    bool strict = false;
    std::vector<std::string> outputs;
    std::string resolved_config;
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
};

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

fs::path output_path(RunContext& ctx, const std::string& name) {
    fs::create_directories(ctx.out_dir);
    ctx.outputs.push_back(name);
    return ctx.out_dir / name;
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw validation_error("cannot open output file " + path.string());
    out << text;
}

void write_json(RunContext& ctx, const std::string& name, const json& j) {
    write_text(output_path(ctx, name), j.dump(2) + "\n");
}

// columns: (t, H, component, value) rows from a field-shaped container
template <class FieldLike>
std::string path_csv(const FieldLike& f) {
    std::string csv = "t,H,component,value\n";
    for (std::size_t it = 0; it < f.t_grid.size(); ++it)
        for (std::size_t ih = 0; ih < f.h_grid.size(); ++ih)
            for (int c = 0; c < f.dim; ++c)
                csv += format_double(f.t_grid[it]) + "," + format_double(f.h_grid[ih]) + "," +
                       std::to_string(c) + "," + format_double(f.at(it, ih, c)) + "\n";
    return csv;
}

void finish_run(RunContext& ctx) {
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - ctx.start).count();
    json manifest;
    manifest["toolkit_version"] = kVersion;
    manifest["subcommand"] = ctx.subcommand;
    manifest["master_seed"] = ctx.seed;
    manifest["seed_derivation"] =
        "per-task seed = splitmix64(master xor (task_index * 0x9E3779B97F4A7C15)); task indices "
        "are fixed per subcommand, replicate i uses task index i";
    manifest["threads"] = ctx.threads;
    manifest["strict"] = ctx.strict;
    manifest["config"] = ctx.resolved_config;
    manifest["outputs"] = ctx.outputs;
    manifest["wall_clock_seconds"] = wall;
    fs::create_directories(ctx.out_dir);
    write_text(ctx.out_dir / "manifest.json", manifest.dump(2) + "\n");
}

std::vector<double> parse_range(const std::string& text) {
    // "start:step:end" inclusive of end up to rounding
    const auto c1 = text.find(':');
    const auto c2 = text.rfind(':');
    if (c1 == std::string::npos || c2 == c1)
        throw validation_error("range must be start:step:end, got '" + text + "'");
    const double start = std::stod(text.substr(0, c1));
    const double step = std::stod(text.substr(c1 + 1, c2 - c1 - 1));
    const double end = std::stod(text.substr(c2 + 1));
    if (!(step > 0.0)) throw validation_error("range step must be > 0");
    std::vector<double> out;
    for (double v = start; v <= end + 0.5 * step; v += step) out.push_back(v);
    if (out.empty()) throw validation_error("empty range '" + text + "'");
    return out;
}

fbm::Normalization parse_mode(const std::string& mode) {
    if (mode == "unit") return fbm::Normalization::unit_variance;
    if (mode == "raw") return fbm::Normalization::raw;
    throw validation_error("mode must be 'unit' or 'raw', got '" + mode + "'");
}

sde::DriftSpec make_drift(const std::string& name, double kappa, double c) {
    if (name == "linear") return sde::linear_drift(kappa);
    if (name == "sin") return sde::sin_drift(kappa, c);
    throw validation_error("drift must be 'linear' or 'sin', got '" + name + "'");
}

// noise grid covering [t_min - margin, t_max]; lower bound either explicit or
// factor * horizon below the earliest field time
fbm::WhiteNoiseGrid make_noise(double dt, double t_min, double t_max, double l_factor,
                               double l_override, int dim, std::uint64_t seed) {
    double depth = l_override > 0.0 ? l_override
                                    : l_factor * std::max(1.0, t_max - std::min(0.0, t_min));
    const double lower = -dt * std::ceil((depth - std::min(0.0, t_min)) / dt);
    return fbm::WhiteNoiseGrid(dt, lower, t_max, dim, seed);
}

json report_to_json(const regcheck::BoundCheckReport& r) {
    json j;
    j["id"] = r.id;
    j["rule"] = r.rule;
    j["factor"] = r.factor;
    j["c_hat"] = r.c_hat;
    j["reference_index"] = r.reference;
    j["pass"] = r.pass;
    json pts = json::array();
    for (const auto& p : r.points) {
        json q;
        for (const auto& [k, v] : p.coords) q[k] = v;
        q["statistic"] = p.statistic;
        q["bound"] = p.bound;
        q["ratio"] = p.ratio;
        q["se"] = p.se;
        pts.push_back(q);
    }
    j["points"] = pts;
    return j;
}

std::string report_to_csv(const regcheck::BoundCheckReport& r) {
    std::string csv;
    if (r.points.empty()) return csv;
    csv = "";
    for (const auto& [k, v] : r.points.front().coords) csv += k + ",";
    csv += "statistic,bound,ratio,se\n";
    for (const auto& p : r.points) {
        for (const auto& [k, v] : p.coords) csv += format_double(v) + ",";
        csv += format_double(p.statistic) + "," + format_double(p.bound) + "," +
               format_double(p.ratio) + "," + format_double(p.se) + "\n";
    }
    return csv;
}

json regression_to_json(const regcheck::HolderRegression& r) {
    json j;
    j["lags"] = r.lags;
    j["moments"] = r.moments;
    j["slope"] = r.slope;
    j["slope_se"] = r.slope_se;
    j["intercept"] = r.intercept;
    j["residuals"] = r.residuals;
    return j;
}

// ---------------------------------------------------------------------------
// subcommand payloads
// ---------------------------------------------------------------------------

struct FieldOptions {
    std::string t_range = "0:0.25:2";
    std::vector<double> h_values{0.5};
    int dim = 1;
    std::string mode = "unit";
    std::string sampler = "mvn";
    double dt = 0.0625;
    double trunc_tol = 1e-4;
    double l_override = 0.0;
};

int run_sample_fbm(RunContext& ctx, const FieldOptions& opt) {
    fbm::CovarianceModel model;
    const auto t_grid = parse_range(opt.t_range);
    const auto mode = parse_mode(opt.mode);
    fbm::FbmField field;
    double lower = 0.0;
    if (opt.sampler == "exact") {
        field = fbm::sample_field_exact(model, t_grid, opt.h_values, opt.dim,
                                        rng::derive_seed(ctx.seed, 0), mode);
    } else if (opt.sampler == "mvn") {
        const double t_max = t_grid.back();
        double depth = opt.l_override;
        if (depth <= 0.0)
            depth = fbm::required_truncation(t_max, opt.h_values, opt.trunc_tol);
        const auto noise = make_noise(opt.dt, t_grid.front(), t_max, 0.0, depth, opt.dim,
                                      rng::derive_seed(ctx.seed, 0));
        lower = noise.lower();
        field = fbm::sample_field_mvn(model, noise, t_grid, opt.h_values, mode);
    } else {
        throw validation_error("sampler must be 'mvn' or 'exact'");
    }
    write_text(output_path(ctx, "field.csv"), path_csv(field));
    json meta;
    meta["seed"] = field.seed;
    meta["sampler"] = field.sampler_id;
    meta["mode"] = opt.mode;
    meta["dt"] = opt.dt;
    meta["noise_lower"] = lower;
    meta["trunc_tol"] = opt.trunc_tol;
    meta["quadrature_tol"] = model.tolerance();
    write_json(ctx, "field_meta.json", meta);
    std::cout << "field: " << field.t_grid.size() << " times x " << field.h_grid.size()
              << " Hurst values x " << field.dim << " components -> field.csv\n";
    return 0;
}

struct FouOptions {
    double t_max = 5.0;
    double dt = 0.05;
    std::vector<double> h_values{0.5};
    int dim = 1;
    double fou_tol = 1e-9;
    double noise_l_factor = 16.0;
};

int run_sample_fou(RunContext& ctx, const FouOptions& opt) {
    fbm::CovarianceModel model;
    const double depth = fou::required_negative_extension(
        *std::max_element(opt.h_values.begin(), opt.h_values.end()), opt.fou_tol);
    const double start = -opt.dt * std::ceil(depth / opt.dt);
    std::vector<double> ts;
    for (double t = start; t <= opt.t_max + 1e-9; t += opt.dt) ts.push_back(t);
    const auto noise = make_noise(opt.dt, start, opt.t_max, opt.noise_l_factor, 0.0, opt.dim,
                                  rng::derive_seed(ctx.seed, 0));
    const auto field = fbm::sample_field_mvn(model, noise, ts, opt.h_values);
    const auto path = fou::sample_fou(field, 0.0, opt.fou_tol * 10.0);
    write_text(output_path(ctx, "fou.csv"), path_csv(path));
    json meta;
    meta["seed"] = path.seed;
    meta["dt"] = opt.dt;
    meta["truncation_depth"] = path.truncation_depth;
    meta["fou_tol"] = opt.fou_tol;
    meta["noise_lower"] = noise.lower();
    write_json(ctx, "fou_meta.json", meta);
    std::cout << "fou path: " << path.t_grid.size() << " times -> fou.csv\n";
    return 0;
}

struct FouCovOptions {
    double H = 0.5, K = 0.5;
    std::string s_range = "0:0.5:10";
    std::string mode = "unit";
    bool unsym = false;
};

int run_fou_cov(RunContext& ctx, const FouCovOptions& opt) {
    fbm::CovarianceModel model;
    fou::FouCovariance fc(model);
    const auto s_grid = parse_range(opt.s_range);
    const auto mode = parse_mode(opt.mode);
    const auto profile = fc.decay_profile(opt.H, opt.K, s_grid, 0.0, mode);
    std::string csv = "s,r,envelope\n";
    for (const auto& p : profile.points)
        csv += format_double(p.s) + "," + format_double(p.r_sym_abs) + "," +
               format_double(p.envelope) + "\n";
    write_text(output_path(ctx, "fou_cov.csv"), csv);
    json meta;
    meta["H"] = opt.H;
    meta["K"] = opt.K;
    meta["mode"] = opt.mode;
    meta["h_max"] = profile.h_max;
    meta["c_hat"] = profile.c_hat;
    meta["unsym_tolerance"] = fc.unsym_tolerance();
    if (opt.unsym) {
        std::string ucsv = "s,r_unsym\n";
        for (double s : s_grid)
            ucsv += format_double(s) + "," +
                    format_double(fc.stationary_cross_covariance(opt.H, opt.K, s, mode)) + "\n";
        write_text(output_path(ctx, "fou_cov_unsym.csv"), ucsv);
    }
    write_json(ctx, "fou_cov_meta.json", meta);
    std::cout << "c_hat = " << format_double(profile.c_hat) << " (h_max = " << profile.h_max
              << ") -> fou_cov.csv\n";
    return 0;
}

struct SdeOptions {
    std::string drift = "linear";
    double kappa = 1.0;
    double c = 0.0;
    std::vector<double> h_values{0.5};
    double t_max = 10.0;
    double delta = 0.01;
    double y0 = 0.0;
    int dim = 1;
    double noise_l_factor = 16.0;
};

int run_simulate_sde(RunContext& ctx, const SdeOptions& opt) {
    fbm::CovarianceModel model;
    const auto spec = make_drift(opt.drift, opt.kappa, opt.c);
    if (ctx.strict) sde::validate_drift(spec, opt.dim, 1000, 10.0, rng::derive_seed(ctx.seed, 1));
    std::vector<double> ts;
    for (double t = 0.0; t <= opt.t_max + 1e-9; t += opt.delta) ts.push_back(t);
    const auto noise = make_noise(opt.delta, 0.0, opt.t_max, opt.noise_l_factor, 0.0, opt.dim,
                                  rng::derive_seed(ctx.seed, 0));
    const auto field = fbm::sample_field_mvn(model, noise, ts, opt.h_values);
    const std::vector<double> y0(static_cast<std::size_t>(opt.dim), opt.y0);
    const auto path = sde::solve_reference(field, spec, y0, ctx.strict);
    for (const auto& w : path.warnings) std::cerr << "warning: " << w << "\n";
    write_text(output_path(ctx, "sde_path.csv"), path_csv(path));
    json meta;
    meta["drift"] = spec.id;
    meta["kappa"] = spec.kappa;
    meta["lipschitz"] = spec.lipschitz;
    meta["gamma0"] = sde::gamma0(spec);
    meta["delta"] = opt.delta;
    meta["noise_lower"] = noise.lower();
    meta["seed"] = noise.seed();
    write_json(ctx, "sde_meta.json", meta);
    std::cout << "sde path -> sde_path.csv\n";
    return 0;
}

struct EulerOptions {
    std::string drift = "linear";
    double kappa = 1.0;
    double c = 0.0;
    std::vector<double> h_values{0.5};
    double gamma = 0.1;
    std::size_t steps = 100;
    double m0 = 0.0;
    int dim = 1;
    double noise_l_factor = 16.0;
};

int run_euler(RunContext& ctx, const EulerOptions& opt) {
    fbm::CovarianceModel model;
    const auto spec = make_drift(opt.drift, opt.kappa, opt.c);
    const double t_max = opt.gamma * static_cast<double>(opt.steps);
    std::vector<double> ts;
    for (std::size_t k = 0; k <= opt.steps; ++k)
        ts.push_back(static_cast<double>(k) * opt.gamma);
    const auto noise = make_noise(opt.gamma, 0.0, t_max, opt.noise_l_factor, 0.0, opt.dim,
                                  rng::derive_seed(ctx.seed, 0));
    const auto field = fbm::sample_field_mvn(model, noise, ts, opt.h_values);
    const std::vector<double> m0(static_cast<std::size_t>(opt.dim), opt.m0);
    const auto path = sde::euler_scheme(field, spec, m0, opt.gamma, opt.steps);
    write_text(output_path(ctx, "euler_path.csv"), path_csv(path));
    json meta;
    meta["drift"] = spec.id;
    meta["kappa"] = spec.kappa;
    meta["lipschitz"] = spec.lipschitz;
    meta["gamma"] = opt.gamma;
    meta["gamma0"] = sde::gamma0(spec);
    meta["steps"] = opt.steps;
    meta["noise_lower"] = noise.lower();
    meta["seed"] = noise.seed();
    write_json(ctx, "euler_meta.json", meta);
    std::cout << "euler path -> euler_path.csv\n";
    return 0;
}

struct EstimateOptions {
    std::string grid = "0.30:0.05:0.95";
    int p = 2;
    double gamma = 0.05;
    double h = 0.05;
    std::size_t n = 2000;
    std::size_t steps = 2000;
    std::string crn = "on";
    long burn_in = -1;
    std::string observed_file;
    double true_h = 0.0;
    std::string drift = "linear";
    double kappa = 1.0;
    double c = 0.0;
    double noise_l_factor = 16.0;
};

int run_estimate(RunContext& ctx, const EstimateOptions& opt) {
    fbm::CovarianceModel model;
    const auto spec = make_drift(opt.drift, opt.kappa, opt.c);
    est::EstimatorConfig cfg;
    cfg.k_grid = parse_range(opt.grid);
    cfg.p = opt.p;
    cfg.gamma = opt.gamma;
    cfg.h = opt.h;
    cfg.scheme_steps = opt.steps;
    cfg.crn = (opt.crn == "on");
    if (opt.crn != "on" && opt.crn != "off")
        throw validation_error("--crn must be 'on' or 'off'");
    cfg.burn_in = opt.burn_in;
    cfg.noise_l_factor = opt.noise_l_factor;

    std::vector<double> observed;
    if (!opt.observed_file.empty()) {
        std::ifstream in(opt.observed_file);
        if (!in) throw validation_error("cannot read observed file " + opt.observed_file);
        double v;
        while (in >> v) observed.push_back(v);
        if (observed.size() < 2) throw validation_error("observed file has fewer than 2 samples");
    } else if (opt.true_h > 0.0) {
        // generate the observed path with an independent seed at the true H
        const long burn = cfg.burn_in >= 0
                              ? cfg.burn_in
                              : static_cast<long>(std::ceil(1.0 / (spec.kappa * opt.h)));
        const std::size_t total = opt.n + static_cast<std::size_t>(burn);
        const double t_max = opt.h * static_cast<double>(total);
        const auto noise = make_noise(opt.h, 0.0, t_max, opt.noise_l_factor, 0.0, 1,
                                      rng::derive_seed(ctx.seed, 0xb5));
        std::vector<double> ts(total + 1);
        for (std::size_t k = 0; k <= total; ++k) ts[k] = static_cast<double>(k) * opt.h;
        const std::vector<double> hs{opt.true_h};
        const auto field = fbm::sample_field_mvn(model, noise, ts, hs);
        const std::vector<double> m0{0.0};
        const auto path = sde::euler_scheme(field, spec, m0, opt.h, total);
        for (std::size_t k = static_cast<std::size_t>(burn) + 1; k <= total; ++k)
            observed.push_back(path.at(k, 0, 0));
    } else {
        throw validation_error("estimate-hurst needs --observed FILE or --true-H");
    }

    const auto result = est::estimate_hurst(model, {observed}, spec, cfg, ctx.seed);
    json out;
    out["H_hat"] = result.h_hat;
    json prof = json::array();
    std::string csv = "K,d\n";
    for (const auto& p : result.profile) {
        prof.push_back(json{{"K", p.k}, {"d", p.distance}});
        csv += format_double(p.k) + "," + format_double(p.distance) + "\n";
    }
    out["profile"] = prof;
    out["burn_in"] = result.burn_in;
    out["noise_lower"] = result.noise_lower;
    out["crn"] = cfg.crn;
    out["adjacent_mean_sq_diff"] = result.adjacent_mean_sq_diff;
    write_json(ctx, "estimate.json", out);
    write_text(output_path(ctx, "profile.csv"), csv);
    std::cout << "H_hat = " << format_double(result.h_hat) << "\n";
    return 0;
}

struct WickOptions {
    int n = 2;
    std::string form = "square";
};

int run_wick(RunContext& ctx, const WickOptions& opt) {
    const auto expansion = (opt.form == "mixed") ? wick::mixed_product_expansion(opt.n)
                                                 : wick::centered_square_product_expansion(opt.n);
    if (opt.form != "mixed" && opt.form != "square")
        throw validation_error("--form must be 'square' or 'mixed'");
    json j;
    j["n"] = expansion.n;
    j["form"] = opt.form;
    json terms = json::array();
    for (const auto& term : expansion.terms) {
        json t;
        t["coefficient"] = term.coefficient;
        json pairs = json::array();
        for (const auto& [a, b] : term.pairs) pairs.push_back(json::array({a, b}));
        t["pairs"] = pairs;
        terms.push_back(t);
    }
    j["terms"] = terms;
    write_json(ctx, "wick.json", j);
    std::cout << j.dump(2) << "\n";
    return 0;
}

struct CovValueOptions {
    double u = 1.0, v = 1.0, H = 0.5, K = 0.5;
    std::string mode = "unit";
};

int run_covariance(RunContext& ctx, const CovValueOptions& opt) {
    fbm::CovarianceModel model;
    const double value = model.cross(opt.u, opt.H, opt.v, opt.K, parse_mode(opt.mode));
    json j;
    j["u"] = opt.u;
    j["H"] = opt.H;
    j["v"] = opt.v;
    j["K"] = opt.K;
    j["mode"] = opt.mode;
    j["value"] = value;
    write_json(ctx, "covariance.json", j);
    std::cout << format_double(value) << "\n";
    return 0;
}

struct VerifyOptions {
    std::string check = "holder-time";
    double H = 0.5, K = 0.6;
    double h2 = 0.0;
    double q = 2.0;
    double eps = 0.1;
    int p = 1;
    double kappa = 1.0;
    std::size_t paths = 2000;
    std::size_t seeds = 50;
    std::string deltas = "0.2,0.1,0.05";
    double gamma = 0.1;
    std::size_t steps = 400;
    double horizon = 16.0;
    double noise_l_factor = 40.0;
};

std::vector<double> parse_list(const std::string& text) {
    std::vector<double> out;
    std::string token;
    for (char ch : text + ",") {
        if (ch == ',') {
            if (!token.empty()) out.push_back(std::stod(token));
            token.clear();
        } else {
            token += ch;
        }
    }
    if (out.empty()) throw validation_error("empty list '" + text + "'");
    return out;
}

int run_verify(RunContext& ctx, const VerifyOptions& opt) {
    fbm::CovarianceModel model;
    bool pass = true;
    if (opt.check == "holder-time") {
        std::vector<double> lags{0.1, 0.16, 0.25, 0.4, 0.63, 1.0};
        const auto fit = regcheck::holder_time_exponent(model, opt.H, lags, opt.paths,
                                                        rng::derive_seed(ctx.seed, 0),
                                                        ctx.threads);
        json j = regression_to_json(fit);
        j["expected_slope"] = 2.0 * opt.H;
        pass = std::fabs(fit.slope - 2.0 * opt.H) < 0.05;
        j["pass"] = pass;
        write_json(ctx, "verify_holder_time.json", j);
        std::cout << "slope = " << format_double(fit.slope) << " (expected "
                  << format_double(2.0 * opt.H) << ")\n";
    } else if (opt.check == "hurst-direction") {
        const std::vector<double> ts{0.25, 0.5, 1.0, 2.0, 5.0, 10.0};
        const double h2 = opt.h2 > 0.0 ? opt.h2 : opt.K;
        const std::vector<std::pair<double, double>> pairs{{opt.H, h2}};
        const auto r = regcheck::hurst_direction_bound(model, ts, pairs);
        write_json(ctx, "verify_hurst_direction.json", report_to_json(r));
        write_text(output_path(ctx, "verify_hurst_direction.csv"), report_to_csv(r));
        pass = r.pass;
    } else if (opt.check == "rectangular") {
        const std::vector<std::pair<double, double>> tp{{0.0, 0.5}, {1.0, 1.5}, {1.0, 3.0},
                                                        {2.0, 7.0}};
        const double h2 = opt.h2 > 0.0 ? opt.h2 : opt.K;
        const std::vector<std::pair<double, double>> hp{{opt.H, h2}};
        const auto r = regcheck::rectangular_bound(model, tp, hp);
        write_json(ctx, "verify_rectangular.json", report_to_json(r));
        write_text(output_path(ctx, "verify_rectangular.csv"), report_to_csv(r));
        pass = r.pass;
    } else if (opt.check == "sup-h") {
        const std::vector<double> dts{0.01, 0.04, 0.16, 0.63, 2.5, 10.0};
        std::vector<double> hs;
        for (int i = 0; i < 8; ++i)
            hs.push_back(opt.H + (opt.K - opt.H) * static_cast<double>(i) / 7.0);
        const auto r = regcheck::sup_h_moment(model, 0.0, dts, opt.q, hs, opt.paths,
                                              rng::derive_seed(ctx.seed, 0), ctx.threads);
        write_json(ctx, "verify_sup_h.json", report_to_json(r));
        write_text(output_path(ctx, "verify_sup_h.csv"), report_to_csv(r));
        pass = r.pass;
    } else if (opt.check == "pathwise-holder" || opt.check == "pathwise-holder-rect") {
        std::vector<double> hs;
        for (int i = 0; i < 8; ++i)
            hs.push_back(opt.H + (opt.K - opt.H) * static_cast<double>(i) / 7.0);
        const auto mode = (opt.check == "pathwise-holder") ? regcheck::HolderMode::simple
                                                           : regcheck::HolderMode::rectangular;
        const auto r = regcheck::pathwise_holder_constant(model, opt.eps, mode, opt.horizon, 32,
                                                          hs, opt.seeds,
                                                          rng::derive_seed(ctx.seed, 0),
                                                          ctx.threads);
        json j;
        j["id"] = r.id;
        j["rule"] = r.rule;
        j["horizon1"] = r.horizon1;
        j["horizon2"] = r.horizon2;
        j["probs"] = r.probs;
        j["quantiles1"] = r.quantiles1;
        j["quantiles2"] = r.quantiles2;
        j["drift"] = r.drift;
        j["pass"] = r.pass;
        write_json(ctx, "verify_pathwise.json", j);
        pass = r.pass;
    } else if (opt.check == "sde-h") {
        const auto spec = sde::linear_drift(opt.kappa);
        const auto deltas = parse_list(opt.deltas);
        const std::vector<double> ts{1.0, 5.0, 20.0};
        regcheck::SdeRegularityConfig cfg;
        cfg.eps = opt.eps;
        cfg.noise_l_factor = opt.noise_l_factor;
        const auto r = regcheck::sde_h_regularity(model, spec, opt.H, deltas, ts, opt.seeds,
                                                  rng::derive_seed(ctx.seed, 0), cfg, ctx.threads);
        write_json(ctx, "verify_sde_h.json", report_to_json(r));
        write_text(output_path(ctx, "verify_sde_h.csv"), report_to_csv(r));
        pass = r.pass;
    } else if (opt.check == "ergodic-h" || opt.check == "ergodic-h-discrete") {
        const auto spec = sde::linear_drift(opt.kappa);
        const auto deltas = parse_list(opt.deltas);
        regcheck::ErgodicRegularityConfig cfg;
        cfg.gamma = opt.gamma;
        cfg.scheme_steps = opt.steps;
        cfg.horizon = opt.horizon;
        cfg.noise_l_factor = opt.noise_l_factor;
        const auto mode = (opt.check == "ergodic-h") ? sde::ErgodicMode::continuous
                                                     : sde::ErgodicMode::discrete;
        const auto r = regcheck::ergodic_h_regularity(model, spec, opt.H, deltas, opt.seeds,
                                                      rng::derive_seed(ctx.seed, 0), mode, cfg,
                                                      ctx.threads);
        json j;
        j["id"] = r.id;
        j["rule"] = r.rule;
        j["beta"] = r.beta;
        j["safety"] = r.safety;
        j["deltas"] = r.deltas;
        j["pass_fraction"] = r.pass_fraction;
        j["r_values"] = r.r_values;
        j["pass"] = r.pass;
        write_json(ctx, "verify_ergodic_h.json", j);
        pass = r.pass;
    } else if (opt.check == "v-decay") {
        fou::FouCovariance fc(model);
        const std::vector<double> ts{1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0, 100.0};
        regcheck::VDecayConfig cfg;
        cfg.noise_l_factor = opt.noise_l_factor;
        const auto r = regcheck::v_moment_decay(model, fc, opt.H, opt.K, opt.p, ts, opt.seeds,
                                                rng::derive_seed(ctx.seed, 0), cfg, ctx.threads);
        json j;
        j["id"] = r.id;
        j["rule"] = r.rule;
        j["threshold"] = r.threshold;
        j["regression"] = regression_to_json(r.regression);
        j["pass"] = r.pass;
        write_json(ctx, "verify_v_decay.json", j);
        std::cout << "slope = " << format_double(r.regression.slope) << " threshold "
                  << format_double(r.threshold) << "\n";
        pass = r.pass;
    } else {
        throw validation_error("unknown --check '" + opt.check + "'");
    }
    std::cout << (pass ? "VERDICT: pass" : "VERDICT: fail") << "\n";
    return pass ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
    std::setlocale(LC_NUMERIC, "C");
    CLI::App app{"hurstlab: fractional Brownian field, fOU and ergodic-estimation toolkit"};
    app.require_subcommand(1);
    app.set_config("--config", "", "key = value configuration file");

    RunContext ctx;
    std::string out_dir = "hurstlab_out";
    app.add_option("--seed", ctx.seed, "master seed")->capture_default_str();
    app.add_option("--out-dir", out_dir, "output directory")->capture_default_str();
    int threads = 0;
    app.add_option("--threads", threads, "worker threads (default HURSTLAB_THREADS or cores)");
    app.add_flag("--strict", ctx.strict, "escalate configuration warnings to errors");

    FieldOptions fopt;
    auto* sub_fbm = app.add_subcommand("sample-fbm", "sample the fractional Brownian field");
    sub_fbm->add_option("--t", fopt.t_range, "time grid start:step:end")->capture_default_str();
    sub_fbm->add_option("--H", fopt.h_values, "Hurst values")->capture_default_str();
    sub_fbm->add_option("--d", fopt.dim, "components")->capture_default_str();
    sub_fbm->add_option("--mode", fopt.mode, "unit|raw")->capture_default_str();
    sub_fbm->add_option("--sampler", fopt.sampler, "mvn|exact")->capture_default_str();
    sub_fbm->add_option("--dt", fopt.dt, "noise cell width (mvn)")->capture_default_str();
    sub_fbm->add_option("--trunc-tol", fopt.trunc_tol, "tail variance tolerance (mvn)")
        ->capture_default_str();
    sub_fbm->add_option("--L", fopt.l_override, "explicit truncation depth (mvn)")
        ->capture_default_str();

    FouOptions uopt;
    auto* sub_fou = app.add_subcommand("sample-fou", "sample stationary fOU paths");
    sub_fou->add_option("--t-max", uopt.t_max, "horizon")->capture_default_str();
    sub_fou->add_option("--dt", uopt.dt, "grid step")->capture_default_str();
    sub_fou->add_option("--H", uopt.h_values, "Hurst values")->capture_default_str();
    sub_fou->add_option("--d", uopt.dim, "components")->capture_default_str();
    sub_fou->add_option("--fou-tol", uopt.fou_tol, "stationarity truncation budget")
        ->capture_default_str();
    sub_fou->add_option("--L-factor", uopt.noise_l_factor, "noise depth factor")
        ->capture_default_str();

    FouCovOptions copt;
    auto* sub_fcov = app.add_subcommand("fou-cov", "stationary fOU covariance decay profile");
    sub_fcov->add_option("--H", copt.H, "first Hurst value")->capture_default_str();
    sub_fcov->add_option("--K", copt.K, "second Hurst value")->capture_default_str();
    sub_fcov->add_option("--s", copt.s_range, "lag grid start:step:end")->capture_default_str();
    sub_fcov->add_option("--mode", copt.mode, "unit|raw")->capture_default_str();
    sub_fcov->add_flag("--unsym", copt.unsym, "also emit the unsymmetrized covariance");

    SdeOptions sopt;
    auto* sub_sde = app.add_subcommand("simulate-sde", "reference solution of the dissipative SDE");
    sub_sde->add_option("--drift", sopt.drift, "linear|sin")->capture_default_str();
    sub_sde->add_option("--kappa", sopt.kappa, "contractivity scale")->capture_default_str();
    sub_sde->add_option("--c", sopt.c, "sin amplitude")->capture_default_str();
    sub_sde->add_option("--H", sopt.h_values, "Hurst values")->capture_default_str();
    sub_sde->add_option("--T", sopt.t_max, "horizon")->capture_default_str();
    sub_sde->add_option("--delta", sopt.delta, "fine Euler step")->capture_default_str();
    sub_sde->add_option("--y0", sopt.y0, "initial point (all components)")->capture_default_str();
    sub_sde->add_option("--d", sopt.dim, "components")->capture_default_str();
    sub_sde->add_option("--L-factor", sopt.noise_l_factor, "noise depth factor")
        ->capture_default_str();

    EulerOptions eopt;
    auto* sub_euler = app.add_subcommand("euler", "Euler scheme of the dissipative SDE");
    sub_euler->add_option("--drift", eopt.drift, "linear|sin")->capture_default_str();
    sub_euler->add_option("--kappa", eopt.kappa, "contractivity scale")->capture_default_str();
    sub_euler->add_option("--c", eopt.c, "sin amplitude")->capture_default_str();
    sub_euler->add_option("--H", eopt.h_values, "Hurst values")->capture_default_str();
    sub_euler->add_option("--gamma", eopt.gamma, "scheme step")->capture_default_str();
    sub_euler->add_option("--N", eopt.steps, "scheme length")->capture_default_str();
    sub_euler->add_option("--m0", eopt.m0, "initial point")->capture_default_str();
    sub_euler->add_option("--d", eopt.dim, "components")->capture_default_str();
    sub_euler->add_option("--L-factor", eopt.noise_l_factor, "noise depth factor")
        ->capture_default_str();

    EstimateOptions xopt;
    auto* sub_est = app.add_subcommand("estimate-hurst", "Wasserstein-argmin Hurst estimator");
    sub_est->add_option("--grid", xopt.grid, "candidate grid start:step:end")
        ->capture_default_str();
    sub_est->add_option("--p", xopt.p, "Wasserstein order 1|2")->capture_default_str();
    sub_est->add_option("--gamma", xopt.gamma, "scheme step")->capture_default_str();
    sub_est->add_option("--h", xopt.h, "observation step")->capture_default_str();
    sub_est->add_option("--n", xopt.n, "observation count")->capture_default_str();
    sub_est->add_option("--N", xopt.steps, "scheme length")->capture_default_str();
    sub_est->add_option("--crn", xopt.crn, "common random numbers on|off")->capture_default_str();
    sub_est->add_option("--burn-in", xopt.burn_in, "scheme burn-in (-1: auto)")
        ->capture_default_str();
    sub_est->add_option("--observed", xopt.observed_file, "file with observed samples");
    sub_est->add_option("--true-H", xopt.true_h, "generate observations at this Hurst value");
    sub_est->add_option("--drift", xopt.drift, "linear|sin")->capture_default_str();
    sub_est->add_option("--kappa", xopt.kappa, "contractivity scale")->capture_default_str();
    sub_est->add_option("--c", xopt.c, "sin amplitude")->capture_default_str();
    sub_est->add_option("--L-factor", xopt.noise_l_factor, "noise depth factor")
        ->capture_default_str();

    WickOptions wopt;
    auto* sub_wick = app.add_subcommand("wick", "Gaussian product pair-partition expansions");
    sub_wick->add_option("--n", wopt.n, "number of factors")->capture_default_str();
    sub_wick->add_option("--form", wopt.form, "square|mixed")->capture_default_str();

    CovValueOptions vopt;
    auto* sub_cov = app.add_subcommand("covariance", "cross covariance E B_u^H B_v^K");
    sub_cov->add_option("--u", vopt.u, "first time")->capture_default_str();
    sub_cov->add_option("--v", vopt.v, "second time")->capture_default_str();
    sub_cov->add_option("--H", vopt.H, "first Hurst value")->capture_default_str();
    sub_cov->add_option("--K", vopt.K, "second Hurst value")->capture_default_str();
    sub_cov->add_option("--mode", vopt.mode, "unit|raw")->capture_default_str();

    VerifyOptions yopt;
    auto* sub_verify = app.add_subcommand("verify", "bound verification engine");
    sub_verify->add_option("--check", yopt.check,
                           "holder-time|hurst-direction|rectangular|sup-h|pathwise-holder|"
                           "pathwise-holder-rect|sde-h|ergodic-h|ergodic-h-discrete|v-decay")
        ->capture_default_str();
    sub_verify->add_option("--H", yopt.H, "base Hurst value")->capture_default_str();
    sub_verify->add_option("--K", yopt.K, "second Hurst value / range end")->capture_default_str();
    sub_verify->add_option("--H2", yopt.h2, "explicit H' for pair checks");
    sub_verify->add_option("--q", yopt.q, "moment order")->capture_default_str();
    sub_verify->add_option("--eps", yopt.eps, "epsilon exponent")->capture_default_str();
    sub_verify->add_option("--p", yopt.p, "V moment half-order")->capture_default_str();
    sub_verify->add_option("--paths", yopt.paths, "Monte Carlo paths")->capture_default_str();
    sub_verify->add_option("--seeds", yopt.seeds, "Monte Carlo seeds")->capture_default_str();
    sub_verify->add_option("--deltas", yopt.deltas, "comma list of Hurst offsets")
        ->capture_default_str();
    sub_verify->add_option("--gamma", yopt.gamma, "scheme step")->capture_default_str();
    sub_verify->add_option("--N", yopt.steps, "scheme length")->capture_default_str();
    sub_verify->add_option("--horizon", yopt.horizon, "time horizon")->capture_default_str();
    sub_verify->add_option("--L-factor", yopt.noise_l_factor, "noise depth factor")
        ->capture_default_str();

    for (CLI::App* sub : {sub_fbm, sub_fou, sub_fcov, sub_sde, sub_euler, sub_est, sub_wick,
                          sub_cov, sub_verify})
        sub->configurable();
    sub_verify->add_option("--kappa", yopt.kappa, "contractivity scale")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    ctx.out_dir = out_dir;
    ctx.threads = threads > 0 ? threads : default_threads();
    int code = 0;
    try {
        CLI::App* sub = app.get_subcommands().front();
        ctx.subcommand = sub->get_name();
        ctx.resolved_config = app.config_to_str(true, true);
        if (sub == sub_fbm) code = run_sample_fbm(ctx, fopt);
        else if (sub == sub_fou) code = run_sample_fou(ctx, uopt);
        else if (sub == sub_fcov) code = run_fou_cov(ctx, copt);
        else if (sub == sub_sde) code = run_simulate_sde(ctx, sopt);
        else if (sub == sub_euler) code = run_euler(ctx, eopt);
        else if (sub == sub_est) code = run_estimate(ctx, xopt);
        else if (sub == sub_wick) code = run_wick(ctx, wopt);
        else if (sub == sub_cov) code = run_covariance(ctx, vopt);
        else if (sub == sub_verify) code = run_verify(ctx, yopt);
        finish_run(ctx);
    } catch (const validation_error& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 1;
    } catch (const numerical_error& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 2;
    } catch (const model_error& e) {
        std::cerr << "model error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return code;
}
