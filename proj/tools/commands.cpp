#include "commands.hpp"

#include "svg.hpp"

#include "dkm/analysis.hpp"
#include "dkm/bounds.hpp"
#include "dkm/construct.hpp"
#include "dkm/version.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

namespace dkm::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;
constexpr int kExitVerification = 4;

std::string fmt17(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << content;
}

json provenance(const CommandContext& ctx) {
    return {{"tool_version", kToolVersion}, {"seed", ctx.seed}, {"config_echo", ctx.config.raw_text()}};
}

ExactSolution solution_from(const Config& c) {
    ExactSolution sol;
    const std::string kind = c.get_string("solution", "kind");
    if (kind == "quadratic") {
        sol.kind = SolutionKind::quadratic;
    } else if (kind == "exponential") {
        sol.kind = SolutionKind::exponential;
    } else if (kind == "gaussian_kernel") {
        sol.kind = SolutionKind::gaussian_kernel;
    } else {
        throw ConfigError("solution.kind", "solution.kind must be quadratic, exponential, or gaussian_kernel");
    }
    sol.dim = static_cast<int>(c.get_int("solution", "dim"));
    sol.horizon = c.get_real("solution", "horizon");
    sol.kappa = c.get_real("solution", "kappa");
    if (sol.kind == SolutionKind::exponential) {
        if (!c.has_key("solution", "direction")) {
            throw ConfigError("solution.direction", "missing field solution.direction");
        }
        sol.direction = c.get_array("solution", "direction");
    }
    if (sol.kind == SolutionKind::gaussian_kernel) {
        if (!c.has_key("solution", "variance")) {
            throw ConfigError("solution.variance", "missing field solution.variance");
        }
        sol.sigma2 = c.get_real("solution", "variance");
    }
    sol.validate();
    return sol;
}

SpaceTimeBox box_from(const Config& c) {
    SpaceTimeBox box;
    box.t0 = c.get_real("box", "t0");
    box.t1 = c.get_real("box", "t1");
    box.lo = c.get_array("box", "lo");
    box.hi = c.get_array("box", "hi");
    box.validate();
    return box;
}

TrainConfig train_from(const Config& c, std::uint64_t seed) {
    TrainConfig cfg;
    cfg.arch = Architecture(c.get_int_array("train", "widths"));
    cfg.box_radius = c.get_real("train", "radius");
    const std::string opt = c.get_string("train", "optimizer");
    if (opt == "adam") {
        cfg.optimizer = OptimizerKind::adam;
    } else if (opt == "sgd") {
        cfg.optimizer = OptimizerKind::sgd;
    } else {
        throw ConfigError("train.optimizer", "train.optimizer must be adam or sgd");
    }
    cfg.learning_rate = c.get_real("train", "learning_rate");
    cfg.steps = static_cast<int>(c.get_int("train", "steps"));
    cfg.m1 = static_cast<int>(c.get_int("train", "m1"));
    cfg.m2 = static_cast<int>(c.get_int("train", "m2"));
    cfg.activation = static_cast<int>(c.get_int("train", "activation"));
    cfg.fresh_batch = c.get_bool("train", "fresh_batch");
    cfg.restarts = static_cast<int>(c.get_or<long long>("train", "restarts", 1));
    cfg.seed = seed;
    return cfg;
}

std::string history_csv(const TrainResult& result) {
    std::string out = "step,loss,grad_norm\n";
    for (std::size_t i = 0; i < result.loss_history.size(); ++i) {
        out += std::to_string(i + 1);
        out += ',';
        out += fmt17(result.loss_history[i]);
        out += ',';
        out += fmt17(result.grad_norm_history[i]);
        out += '\n';
    }
    return out;
}

std::string sweep_csv(const std::vector<double>& abscissae, const std::vector<double>& errors,
                      const std::vector<double>& stderrs) {
    std::string out = "abscissa,error,stderr\n";
    for (std::size_t i = 0; i < abscissae.size(); ++i) {
        out += fmt17(abscissae[i]);
        out += ',';
        out += fmt17(errors[i]);
        out += ',';
        out += fmt17(stderrs[i]);
        out += '\n';
    }
    return out;
}

json rate_fit_json(const RateFit& fit) {
    return {{"abscissae", fit.abscissae}, {"errors", fit.errors},   {"stderrs", fit.stderrs},
            {"slope", fit.slope},         {"slope_halfwidth", fit.slope_halfwidth},
            {"intercept", fit.intercept}};
}

} // namespace

int cmd_train(const CommandContext& ctx) {
    ctx.config.require_sections({"solution", "box", "train"});
    const auto sol = solution_from(ctx.config);
    const auto box = box_from(ctx.config);
    const auto cfg = train_from(ctx.config, ctx.seed);
    const int quad_points = static_cast<int>(ctx.config.get_or<long long>("train", "quad_points", 65536));

    const auto result = train(cfg, sol, box);
    const auto l2 = l2_error(cfg.arch, result.theta, sol, box, quad_points,
                             RngKey{ctx.seed, 0}.child(0x6c32), Activation{cfg.activation});

    std::optional<OptErrorProxy> proxy;
    if (cfg.restarts >= 2) proxy = opt_error_proxy(cfg, sol, box, cfg.restarts);
    auto report = decomposition_report(cfg, sol.dim, l2, proxy, std::nullopt, std::nullopt);

    const fs::path out_dir(ctx.out_dir);
    fs::create_directories(out_dir);
    save_network(cfg.arch, result.theta, (out_dir / "checkpoint.json").string());
    write_file(out_dir / "history.csv", history_csv(result));

    json j = json::parse(report.to_json());
    j["provenance"] = provenance(ctx);
    j["timing"] = {{"train_wall_ms", result.wall_ms}};
    j["final_loss"] = result.loss_history.back();
    j["max_param_inf"] = result.max_param_inf;
    write_file(out_dir / "report.json", j.dump(2) + "\n");
    return kExitOk;
}

int cmd_rates(const CommandContext& ctx) {
    ctx.config.require_sections({"solution", "box", "train", "rates"});
    const auto sol = solution_from(ctx.config);
    const auto box = box_from(ctx.config);
    const auto base = train_from(ctx.config, ctx.seed);
    const auto m1_list = ctx.config.get_int_array("rates", "m1_list");
    const auto width_list = ctx.config.get_int_array("rates", "width_list");
    if (m1_list.size() < 3) throw ConfigError("rates.m1_list", "rates.m1_list needs at least 3 entries");
    if (width_list.size() < 3) throw ConfigError("rates.width_list", "rates.width_list needs at least 3 entries");
    const int theta_samples = static_cast<int>(ctx.config.get_int("rates", "theta_samples"));
    const double theta_radius = ctx.config.get_real("rates", "theta_radius");
    const int gap_m2 = static_cast<int>(ctx.config.get_int("rates", "gap_m2"));
    const int gap_reps = static_cast<int>(ctx.config.get_or<long long>("rates", "gap_reps", 8));
    const int sweep_steps = static_cast<int>(ctx.config.get_int("rates", "sweep_steps"));
    const int sweep_seeds = static_cast<int>(ctx.config.get_int("rates", "sweep_seeds"));
    const bool svg = ctx.config.get_or<bool>("rates", "svg", true);
    const int quad_points = static_cast<int>(ctx.config.get_or<long long>("train", "quad_points", 65536));

    const fs::path out_dir(ctx.out_dir);
    fs::create_directories(out_dir);

    // Sample-count sweep: empirical-vs-population loss gap over m1.
    const auto gap_fit = generalization_gap(base.arch, box, sol, theta_samples, m1_list, gap_m2,
                                            RngKey{ctx.seed, 0}.child(0x676170), theta_radius,
                                            gap_reps, Activation{base.activation});
    write_file(out_dir / "m1_sweep.csv", sweep_csv(gap_fit.abscissae, gap_fit.errors, gap_fit.stderrs));
    if (svg) {
        write_file(out_dir / "m1_sweep.svg",
                   log_log_svg(gap_fit.abscissae, gap_fit.errors, "loss gap vs m1"));
    }

    // Width sweep: train at each width, same budget, and measure the L2 error.
    std::vector<double> widths, werrs, wstderrs;
    std::vector<std::vector<double>> per_seed(static_cast<std::size_t>(sweep_seeds));
    for (int w : width_list) {
        TrainConfig cfg = base;
        std::vector<int> arch_widths = base.arch.widths;
        for (std::size_t k = 1; k + 1 < arch_widths.size(); ++k) arch_widths[k] = w;
        cfg.arch = Architecture(arch_widths);
        cfg.steps = sweep_steps;
        std::vector<double> errs;
        for (int s = 0; s < sweep_seeds; ++s) {
            cfg.seed = ctx.seed + static_cast<std::uint64_t>(s);
            const auto result = train(cfg, sol, box);
            const auto l2 = l2_error(cfg.arch, result.theta, sol, box, quad_points,
                                     RngKey{cfg.seed, 0}.child(0x6c32), Activation{cfg.activation});
            errs.push_back(l2.estimate);
            per_seed[static_cast<std::size_t>(s)].push_back(l2.estimate);
        }
        double mean = 0.0;
        for (double e : errs) mean += e;
        mean /= static_cast<double>(errs.size());
        double sd = 0.0;
        for (double e : errs) sd += (e - mean) * (e - mean);
        sd = errs.size() > 1 ? std::sqrt(sd / static_cast<double>(errs.size() - 1) /
                                         static_cast<double>(errs.size()))
                             : 0.0;
        widths.push_back(static_cast<double>(w));
        werrs.push_back(mean);
        wstderrs.push_back(sd);
    }
    write_file(out_dir / "width_sweep.csv", sweep_csv(widths, werrs, wstderrs));
    if (svg) write_file(out_dir / "width_sweep.svg", log_log_svg(widths, werrs, "l2 error vs width"));
    const auto width_fit = rate_fit(widths, werrs, wstderrs);
    const double rho = spearman_rho(widths, werrs);

    json j;
    j["m1_fit"] = rate_fit_json(gap_fit);
    j["width_fit"] = rate_fit_json(width_fit);
    j["width_spearman_rho"] = rho;
    j["per_seed_width_errors"] = per_seed;
    j["provenance"] = provenance(ctx);
    write_file(out_dir / "rates_report.json", j.dump(2) + "\n");
    return kExitOk;
}

int cmd_bounds(const CommandContext& ctx) {
    ctx.config.require_sections({"bounds"});
    const int trials = static_cast<int>(ctx.config.get_int("bounds", "trials"));
    const int points = static_cast<int>(ctx.config.get_or<long long>("bounds", "points_per_case", 10000));
    const auto report = check_bounds(trials, ctx.seed, points);

    const fs::path out_dir(ctx.out_dir);
    fs::create_directories(out_dir);
    json j = json::parse(report.to_json());
    j["provenance"] = provenance(ctx);
    write_file(out_dir / "bounds_report.json", j.dump(2) + "\n");
    if (report.total_violations() > 0) {
        std::cerr << "bounds: " << report.total_violations() << " violation(s) found\n";
        return kExitVerification;
    }
    return kExitOk;
}

int cmd_fk_check(const CommandContext& ctx) {
    ctx.config.require_sections({"solution", "box", "fk"});
    const auto sol = solution_from(ctx.config);
    const auto box = box_from(ctx.config);
    const int samples = static_cast<int>(ctx.config.get_int("fk", "samples"));
    const int trials = static_cast<int>(ctx.config.get_int("fk", "trials"));

    const fs::path out_dir(ctx.out_dir);
    fs::create_directories(out_dir);
    json j;
    j["samples"] = samples;
    if (ctx.config.has_key("fk", "t")) {
        const double t = ctx.config.get_real("fk", "t");
        std::vector<double> x(static_cast<std::size_t>(sol.dim), 0.0);
        if (ctx.config.has_key("fk", "x")) x = ctx.config.get_array("fk", "x");
        const auto est = fk_estimate(sol, t, x, samples, RngKey{ctx.seed, 0}.child(0x666b));
        const double exact = exact_eval(sol, t, x);
        j["point"] = {{"t", t},
                      {"x", x},
                      {"mean", est.mean},
                      {"stderr", est.stderr_},
                      {"exact", exact},
                      {"abs_error", std::abs(est.mean - exact)}};
    } else {
        const RngKey key{ctx.seed, 0};
        int within = 0;
        double worst_z = 0.0;
        json rows = json::array();
        for (int r = 0; r < trials; ++r) {
            const RngKey trial_key = key.child(static_cast<std::uint64_t>(r));
            const auto pts = sample_points(box, 1, trial_key.child(1));
            const double t = pts.times[0];
            const auto x = pts.point(0, sol.dim);
            const auto est = fk_estimate(sol, t, x, samples, trial_key.child(2));
            const double exact = exact_eval(sol, t, x);
            const double err = std::abs(est.mean - exact);
            const bool ok = err <= 5.0 * est.stderr_;
            within += ok ? 1 : 0;
            if (est.stderr_ > 0.0) worst_z = std::max(worst_z, err / est.stderr_);
            rows.push_back({{"t", t}, {"mean", est.mean}, {"stderr", est.stderr_}, {"exact", exact}});
        }
        j["trials"] = trials;
        j["within_5_sigma"] = within;
        j["worst_z"] = worst_z;
        j["rows"] = rows;
    }
    j["provenance"] = provenance(ctx);
    write_file(out_dir / "fk_report.json", j.dump(2) + "\n");
    return kExitOk;
}

int cmd_mc_rate(const CommandContext& ctx) {
    ctx.config.require_sections({"mc"});
    const double p = ctx.config.get_real("mc", "p");
    const auto n_list = ctx.config.get_int_array("mc", "n_list");
    if (n_list.size() < 3) throw ConfigError("mc.n_list", "mc.n_list needs at least 3 entries");
    const int trials = static_cast<int>(ctx.config.get_int("mc", "trials"));
    const auto report = mc_rate_check(p, n_list, trials, RngKey{ctx.seed, 0});

    const fs::path out_dir(ctx.out_dir);
    fs::create_directories(out_dir);
    write_file(out_dir / "mc_rate.csv", sweep_csv(report.sample_sizes, report.errors, report.stderrs));
    json j;
    j["p"] = p;
    j["slope"] = report.slope;
    j["bound_ratios"] = report.bound_ratios;
    j["provenance"] = provenance(ctx);
    write_file(out_dir / "mc_report.json", j.dump(2) + "\n");
    return kExitOk;
}

int cmd_embed_check(const CommandContext& ctx) {
    ctx.config.require_sections({"embed"});
    const Architecture deep(ctx.config.get_int_array("embed", "deep_widths"));
    const std::string source = ctx.config.get_string("embed", "source");
    const int points = static_cast<int>(ctx.config.get_or<long long>("embed", "points", 1000));

    ShallowNet shallow;
    if (source == "identity") {
        shallow = identity_net();
    } else if (source == "random") {
        if (!ctx.config.has_key("embed", "shallow_widths")) {
            throw ConfigError("embed.shallow_widths", "missing field embed.shallow_widths");
        }
        Architecture arch(ctx.config.get_int_array("embed", "shallow_widths"));
        ParamVector params(param_count(arch));
        const RngKey key{ctx.seed, 0};
        for (std::size_t i = 0; i < params.size(); ++i) params[i] = uniform_in(key, i, -1.5, 1.5);
        shallow = ShallowNet(std::move(arch), std::move(params));
    } else {
        throw ConfigError("embed.source", "embed.source must be identity or random");
    }

    const auto theta = embed_shallow_to_deep(shallow, deep);
    Workspace ws_shallow, ws_deep;
    const RngKey key = RngKey{ctx.seed, 0}.child(0x656d62);
    double worst = 0.0;
    const auto d = static_cast<std::size_t>(shallow.input_width());
    std::vector<double> x(d);
    for (int i = 0; i < points; ++i) {
        for (std::size_t c = 0; c < d; ++c) {
            x[c] = uniform_in(key, static_cast<std::uint64_t>(i) * d + c, -3.0, 3.0);
        }
        const double a = forward_scalar(shallow.arch, shallow.params, x, Activation{0}, ws_shallow);
        const double b = forward_scalar(deep, theta, x, Activation{0}, ws_deep);
        worst = std::max(worst, std::abs(a - b));
    }

    const fs::path out_dir(ctx.out_dir);
    fs::create_directories(out_dir);
    json j;
    j["deep_widths"] = deep.widths;
    j["shallow_widths"] = shallow.arch.widths;
    j["points"] = points;
    j["max_discrepancy"] = worst;
    j["provenance"] = provenance(ctx);
    write_file(out_dir / "embed_report.json", j.dump(2) + "\n");
    if (worst > 1e-12) {
        std::cerr << "embed-check: max discrepancy " << worst << " exceeds 1e-12\n";
        return kExitVerification;
    }
    return kExitOk;
}

int run_command(const std::string& name, const std::string& config_path, const std::string& out_dir,
                std::optional<std::uint64_t> seed_override) {
    try {
        CommandContext ctx;
        ctx.config = Config::parse_file(config_path);
        ctx.config.check_schema();
        ctx.out_dir = out_dir;
        if (seed_override.has_value()) {
            ctx.seed = *seed_override;
        } else if (ctx.config.has_key("", "seed")) {
            ctx.seed = static_cast<std::uint64_t>(ctx.config.get_int("", "seed"));
        } else {
            throw ConfigError("seed", "missing field seed (set it in the config or pass --seed)");
        }
        if (name == "train") return cmd_train(ctx);
        if (name == "rates") return cmd_rates(ctx);
        if (name == "bounds") return cmd_bounds(ctx);
        if (name == "fk-check") return cmd_fk_check(ctx);
        if (name == "mc-rate") return cmd_mc_rate(ctx);
        if (name == "embed-check") return cmd_embed_check(ctx);
        std::cerr << "unknown command " << name << '\n';
        return kExitConfig;
    } catch (const ConfigError& e) {
        std::cerr << "config error [" << e.field << "]: " << e.what() << '\n';
        return kExitConfig;
    } catch (const NumericFailure& e) {
        std::cerr << "numeric failure: " << e.what() << '\n';
        return kExitNumeric;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}

} // namespace dkm::cli
