// Acceptance suite: runs every verification criterion end to end at full
// scale and prints one pass/fail line per criterion.  Criteria 4-8 write CSV
// artifacts; criterion 10 re-runs them and requires byte-identical output.
//
//   acceptance [--out DIR] [--only 1,2,...]
//
// Exits nonzero if any selected criterion fails.

#include "dkm/analysis.hpp"
#include "dkm/bounds.hpp"
#include "dkm/construct.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

using namespace dkm;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
    std::map<std::string, std::string> csvs;
};

std::string fmt(const char* format, auto... args) {
    char buf[256];
    std::snprintf(buf, sizeof buf, format, args...);
    return buf;
}

std::string fmt17(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// ---------------------------------------------------------------------------
// Criterion 1: identity net exact on a 1e6-point grid; shallow-to-deep
// embedding preserves realizations to 1e-12 across 50 random pairs.
Outcome criterion1() {
    Outcome out;
    const auto [id_arch, id_theta] = identity_net();
    Workspace ws;
    double worst_id = 0.0;
    const int grid = 1000000;
    for (int i = 0; i < grid; ++i) {
        const double x = -100.0 + 200.0 * static_cast<double>(i) / (grid - 1);
        const double y = forward_scalar(id_arch, id_theta, std::vector<double>{x}, Activation{0}, ws);
        worst_id = std::max(worst_id, std::abs(y - x));
    }

    double worst_embed = 0.0;
    const RngKey root{2101, 0};
    Workspace ws_deep;
    for (int pair = 0; pair < 50; ++pair) {
        const RngKey key = root.child(static_cast<std::uint64_t>(pair));
        const int d = 1 + static_cast<int>(uniform01(key, 0) * 3.0);
        const int m = 1 + static_cast<int>(uniform01(key, 1) * 6.0);
        const int deep_depth = 2 + static_cast<int>(uniform01(key, 2) * 4.0);
        std::vector<int> widths{d};
        widths.push_back(m + static_cast<int>(uniform01(key, 3) * 5.0));
        for (int k = 2; k < deep_depth; ++k) {
            widths.push_back(2 + static_cast<int>(uniform01(key, 3 + static_cast<std::uint64_t>(k)) * 5.0));
        }
        widths.push_back(1);
        const Architecture deep(widths);

        Architecture sarch({d, m, 1});
        ParamVector sparams(param_count(sarch));
        const RngKey pkey = key.child(77);
        for (std::size_t i = 0; i < sparams.size(); ++i) sparams[i] = uniform_in(pkey, i, -1.5, 1.5);
        const ShallowNet shallow{sarch, sparams};
        const auto theta = embed_shallow_to_deep(shallow, deep);

        const RngKey xkey = key.child(78);
        std::vector<double> x(static_cast<std::size_t>(d));
        for (int i = 0; i < 1000; ++i) {
            for (int c = 0; c < d; ++c) {
                x[static_cast<std::size_t>(c)] =
                    uniform_in(xkey, static_cast<std::uint64_t>(i) * d + static_cast<std::uint64_t>(c), -3.0, 3.0);
            }
            const double a = forward_scalar(sarch, sparams, x, Activation{0}, ws);
            const double b = forward_scalar(deep, theta, x, Activation{0}, ws_deep);
            worst_embed = std::max(worst_embed, std::abs(a - b));
        }
    }
    out.pass = worst_id <= 1e-12 && worst_embed <= 1e-12;
    out.detail = fmt("identity err %.1e, embed err %.1e", worst_id, worst_embed);
    return out;
}

// ---------------------------------------------------------------------------
// Criterion 2: parameter gradients match central finite differences to 1e-6
// relative error, for smoothed activations everywhere and for ReLU away from
// kinks; the loss gradient likewise matches differences of the loss.
Outcome criterion2() {
    Outcome out;
    const RngKey root{2202, 0};
    double worst = 0.0;
    Workspace ws;

    auto random_case = [&](RngKey key, int max_width) {
        const int depth = 2 + static_cast<int>(uniform01(key, 0) * 3.0);
        std::vector<int> widths{1 + static_cast<int>(uniform01(key, 1) * 3.0)};
        for (int k = 1; k < depth; ++k) {
            widths.push_back(1 + static_cast<int>(uniform01(key, 1 + static_cast<std::uint64_t>(k)) * max_width));
        }
        widths.push_back(1);
        Architecture arch(widths);
        ParamVector theta(param_count(arch));
        const RngKey tk = key.child(1);
        for (std::size_t i = 0; i < theta.size(); ++i) theta[i] = uniform_in(tk, i, -1.0, 1.0);
        std::vector<double> x(static_cast<std::size_t>(arch.input_width()));
        const RngKey xk = key.child(2);
        for (std::size_t i = 0; i < x.size(); ++i) x[i] = uniform_in(xk, i, -1.0, 1.0);
        return std::tuple{arch, theta, x};
    };

    auto fd_check = [&](const Architecture& arch, const ParamVector& theta,
                        const std::vector<double>& x, Activation act) {
        const auto got = grad_theta(arch, theta, x, act);
        ParamVector probe = theta;
        double num = 0.0, den = 0.0;
        const double h = 1e-5;
        for (std::size_t i = 0; i < theta.size(); ++i) {
            const double orig = probe[i];
            probe[i] = orig + h;
            const double fp = forward_scalar(arch, probe, x, act, ws);
            probe[i] = orig - h;
            const double fm = forward_scalar(arch, probe, x, act, ws);
            probe[i] = orig;
            const double fd = (fp - fm) / (2.0 * h);
            num += (got[i] - fd) * (got[i] - fd);
            den += fd * fd;
        }
        return den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
    };

    for (int t = 0; t < 100; ++t) {
        const auto [arch, theta, x] = random_case(root.child(static_cast<std::uint64_t>(t)), 16);
        worst = std::max(worst, fd_check(arch, theta, x, Activation{1 + t % 3}));
    }
    int relu_checked = 0;
    for (int t = 0; t < 600 && relu_checked < 100; ++t) {
        const auto [arch, theta, x] = random_case(root.child(10000 + static_cast<std::uint64_t>(t)), 16);
        const auto res = forward(arch, theta, x, Activation{0});
        bool near_kink = false;
        for (std::size_t k = 0; k + 1 < res.pre.size(); ++k) {
            for (double v : res.pre[k]) near_kink |= std::abs(v) < 1e-3;
        }
        if (near_kink) continue;
        worst = std::max(worst, fd_check(arch, theta, x, Activation{0}));
        ++relu_checked;
    }

    // Loss gradient against finite differences of the loss itself.
    const ExactSolution sol{SolutionKind::quadratic, 1, 1.0, 1.0, {}, 1.0};
    const SpaceTimeBox box{0.0, 1.0, {0.0}, {1.0}};
    double worst_loss = 0.0;
    for (int t = 0; t < 100; ++t) {
        const RngKey key = root.child(20000 + static_cast<std::uint64_t>(t));
        const int w = 2 + static_cast<int>(uniform01(key, 0) * 8.0);
        const Architecture arch({2, w, 1});
        ParamVector theta(param_count(arch));
        const RngKey tk = key.child(1);
        for (std::size_t i = 0; i < theta.size(); ++i) theta[i] = uniform_in(tk, i, -1.0, 1.0);
        const auto batch = build_batch(sol, box, 8, 4, key.child(2));
        const Activation act{1 + t % 2};
        const auto got = loss_grad(arch, theta, batch, act);
        double num = 0.0, den = 0.0;
        const double h = 1e-5;
        for (std::size_t i = 0; i < theta.size(); ++i) {
            const double orig = theta[i];
            ParamVector probe = theta;
            probe[i] = orig + h;
            const double fp = loss_eval(arch, probe, batch, act);
            probe[i] = orig - h;
            const double fm = loss_eval(arch, probe, batch, act);
            const double fd = (fp - fm) / (2.0 * h);
            num += (got[i] - fd) * (got[i] - fd);
            den += fd * fd;
        }
        worst_loss = std::max(worst_loss, den > 0.0 ? std::sqrt(num / den) : std::sqrt(num));
    }

    out.pass = worst <= 1e-6 && worst_loss <= 1e-6;
    out.detail = fmt("net grad rel err %.1e, loss grad rel err %.1e", worst, worst_loss);
    return out;
}

// ---------------------------------------------------------------------------
// Criterion 3: growth, parameter-Lipschitz, and gradient bounds dominate
// sampled suprema over 1000 random networks with >= 1e4 points per case.
Outcome criterion3() {
    Outcome out;
    const auto report = check_bounds(1000, 2303, 10000);
    out.pass = report.total_violations() == 0 && report.worst_ratio <= 1.0;
    out.detail = fmt("%d violations, worst realized/bound %.3f", report.total_violations(),
                     report.worst_ratio);
    return out;
}

// ---------------------------------------------------------------------------
// Criterion 4: Feynman-Kac estimates agree with the closed forms within five
// standard errors in at least 195 of 200 trials over the solution catalogue.
Outcome criterion4() {
    Outcome out;
    struct Case {
        SolutionKind kind;
        int d;
        double kappa;
    };
    std::vector<Case> cases;
    for (double kappa : {0.5, 1.0}) {
        for (int d : {1, 2, 5}) {
            cases.push_back({SolutionKind::quadratic, d, kappa});
            cases.push_back({SolutionKind::exponential, d, kappa});
        }
    }
    const RngKey root{2404, 0};
    int within = 0;
    std::string csv = "trial,kind,dim,kappa,t,estimate,stderr,exact\n";
    for (int trial = 0; trial < 200; ++trial) {
        const Case& c = cases[static_cast<std::size_t>(trial) % cases.size()];
        ExactSolution sol;
        sol.kind = c.kind;
        sol.dim = c.d;
        sol.horizon = 1.0;
        sol.kappa = c.kappa;
        if (c.kind == SolutionKind::exponential) {
            sol.direction.assign(static_cast<std::size_t>(c.d), 1.0 / std::sqrt(c.d));
        }
        const RngKey key = root.child(static_cast<std::uint64_t>(trial));
        const double t = uniform_in(key, 0, 0.0, sol.horizon);
        std::vector<double> x(static_cast<std::size_t>(c.d));
        for (int i = 0; i < c.d; ++i) {
            x[static_cast<std::size_t>(i)] = uniform_in(key, 1 + static_cast<std::uint64_t>(i), -1.0, 1.0);
        }
        const auto est = fk_estimate(sol, t, x, 100000, key.child(9));
        const double exact = exact_eval(sol, t, x);
        if (std::abs(est.mean - exact) <= 5.0 * est.stderr_) ++within;
        csv += std::to_string(trial + 1) + ',' +
               (c.kind == SolutionKind::quadratic ? "quadratic" : "exponential") + ',' +
               std::to_string(c.d) + ',' + fmt17(c.kappa) + ',' + fmt17(t) + ',' + fmt17(est.mean) +
               ',' + fmt17(est.stderr_) + ',' + fmt17(exact) + '\n';
    }
    out.csvs["fk_trials.csv"] = csv;
    out.pass = within >= 195;
    out.detail = fmt("%d/200 trials within 5 sigma", within);
    return out;
}

// ---------------------------------------------------------------------------
// Criterion 5: Monte-Carlo mean converges at rate -1/2 and never exceeds the
// moment bound (ratio exactly 1/2 at p = 2 up to trial noise).
Outcome criterion5() {
    Outcome out;
    const std::vector<int> sizes{100, 1000, 10000, 100000};
    const auto report = mc_rate_check(2.0, sizes, 200, RngKey{2505, 0});
    std::string csv = "abscissa,error,stderr\n";
    for (std::size_t i = 0; i < report.sample_sizes.size(); ++i) {
        csv += fmt17(report.sample_sizes[i]) + ',' + fmt17(report.errors[i]) + ',' +
               fmt17(report.stderrs[i]) + '\n';
    }
    out.csvs["mc_rate.csv"] = csv;
    const bool slope_ok = report.slope >= -0.6 && report.slope <= -0.4;
    bool ratios_ok = true;
    double worst_ratio = 0.0;
    for (double r : report.bound_ratios) {
        worst_ratio = std::max(worst_ratio, r);
        ratios_ok &= r <= 1.0;
    }
    out.pass = slope_ok && ratios_ok;
    out.detail = fmt("slope %.3f, worst error/bound %.3f", report.slope, worst_ratio);
    return out;
}

// ---------------------------------------------------------------------------
// Criterion 6: the sup-over-50-networks gap between the empirical loss and a
// high-accuracy reference decays in m1 with slope in [-0.65, -0.35].
Outcome criterion6() {
    Outcome out;
    const ExactSolution sol{SolutionKind::quadratic, 1, 1.0, 1.0, {}, 1.0};
    const SpaceTimeBox box{0.0, 1.0, {0.0}, {1.0}};
    const Architecture arch({2, 16, 16, 1});
    const std::vector<int> m1s{256, 1024, 4096, 16384};
    const auto fit = generalization_gap(arch, box, sol, 50, m1s, 4096, RngKey{2606, 0}, 1.0, 8);
    std::string csv = "abscissa,error,stderr\n";
    for (std::size_t i = 0; i < fit.abscissae.size(); ++i) {
        csv += fmt17(fit.abscissae[i]) + ',' + fmt17(fit.errors[i]) + ',' + fmt17(fit.stderrs[i]) + '\n';
    }
    out.csvs["gap_sweep.csv"] = csv;
    out.pass = fit.slope >= -0.65 && fit.slope <= -0.35;
    out.detail = fmt("gap slope %.3f +- %.3f", fit.slope, fit.slope_halfwidth);
    return out;
}

// ---------------------------------------------------------------------------
// Criterion 7: end-to-end training run at the reference configuration reaches
// relative L2 error <= 5e-2.
Outcome criterion7() {
    Outcome out;
    const ExactSolution sol{SolutionKind::quadratic, 1, 1.0, 1.0, {}, 1.0};
    const SpaceTimeBox box{0.0, 1.0, {0.0}, {1.0}};
    TrainConfig cfg;
    cfg.arch = Architecture({2, 32, 32, 1});
    cfg.box_radius = 10.0;
    cfg.optimizer = OptimizerKind::adam;
    cfg.learning_rate = 2e-3;
    cfg.steps = 20000;
    cfg.m1 = 4096;
    cfg.m2 = 64;
    cfg.activation = 0;
    cfg.seed = 2707;
    cfg.fresh_batch = true;

    const auto result = train(cfg, sol, box);
    const RngKey quad_key = RngKey{cfg.seed, 0}.child(0x6c32);
    const auto err = l2_error(cfg.arch, result.theta, sol, box, 65536, quad_key);
    const SpaceTimeFn zero = [](double, std::span<const double>) { return 0.0; };
    const auto norm = l2_error(zero, sol, box, 65536, quad_key);  // int u^2 over the box
    const double rel = err.estimate / norm.estimate;

    std::string csv = "step,loss,grad_norm\n";
    for (std::size_t i = 0; i < result.loss_history.size(); ++i) {
        csv += std::to_string(i + 1) + ',' + fmt17(result.loss_history[i]) + ',' +
               fmt17(result.grad_norm_history[i]) + '\n';
    }
    out.csvs["train_history.csv"] = csv;
    out.pass = rel <= 5e-2;
    out.detail = fmt("relative L2 error %.2e (abs %.2e / norm %.2e)", rel, err.estimate, norm.estimate);
    return out;
}

// ---------------------------------------------------------------------------
// Criterion 8: with a fixed large sampling budget, the final L2 error is
// monotone nonincreasing in width (Spearman rho <= -0.8 over per-width means
// across 3 seeds); the fitted rate is reported, not asserted.
Outcome criterion8() {
    Outcome out;
    const ExactSolution sol{SolutionKind::quadratic, 1, 1.0, 1.0, {}, 1.0};
    const SpaceTimeBox box{0.0, 1.0, {0.0}, {1.0}};
    const std::vector<int> widths{4, 8, 16, 32, 64};
    const int seeds = 3;

    std::string csv = "width,seed,error\n";
    std::vector<double> wd, mean_err, se_err;
    for (int w : widths) {
        TrainConfig cfg;
        cfg.arch = Architecture({2, w, w, 1});
        cfg.box_radius = 10.0;
        cfg.optimizer = OptimizerKind::adam;
        cfg.learning_rate = 3e-3;
        cfg.steps = 1200;
        cfg.m1 = 16384;
        cfg.m2 = 128;
        cfg.activation = 0;
        cfg.fresh_batch = false;
        std::vector<double> errs;
        for (int s = 0; s < seeds; ++s) {
            cfg.seed = 2808 + static_cast<std::uint64_t>(s);
            const auto result = train(cfg, sol, box);
            const auto err = l2_error(cfg.arch, result.theta, sol, box, 65536,
                                      RngKey{cfg.seed, 0}.child(0x6c32));
            errs.push_back(err.estimate);
            csv += std::to_string(w) + ',' + std::to_string(s + 1) + ',' + fmt17(err.estimate) + '\n';
        }
        double m = 0.0;
        for (double e : errs) m += e;
        m /= static_cast<double>(errs.size());
        double sd = 0.0;
        for (double e : errs) sd += (e - m) * (e - m);
        sd = std::sqrt(sd / static_cast<double>(errs.size() - 1) / static_cast<double>(errs.size()));
        wd.push_back(static_cast<double>(w));
        mean_err.push_back(m);
        se_err.push_back(sd);
    }
    out.csvs["width_sweep.csv"] = csv;
    const double rho = spearman_rho(wd, mean_err);
    const auto fit = rate_fit(wd, mean_err, se_err);
    out.pass = rho <= -0.8;
    out.detail = fmt("spearman rho %.2f, observed width rate %.2f (reported only)", rho, fit.slope);
    return out;
}

// ---------------------------------------------------------------------------
// Criterion 9: finite-difference PDE residual of every catalogued solution is
// below 1e-5 at 1000 random interior points.
Outcome criterion9() {
    Outcome out;
    const RngKey root{2909, 0};
    double worst = 0.0;
    int case_index = 0;
    for (double kappa : {0.5, 1.0}) {
        for (int d : {1, 2, 5}) {
            std::vector<ExactSolution> sols;
            sols.push_back({SolutionKind::quadratic, d, 1.0, kappa, {}, 1.0});
            sols.push_back({SolutionKind::exponential, d, 1.0, kappa,
                            std::vector<double>(static_cast<std::size_t>(d), 1.0 / std::sqrt(d)), 1.0});
            if (d <= 2) sols.push_back({SolutionKind::gaussian_kernel, d, 1.0, kappa, {}, 1.0});
            for (const auto& sol : sols) {
                const RngKey key = root.child(static_cast<std::uint64_t>(case_index++));
                for (int i = 0; i < 1000; ++i) {
                    const auto base = static_cast<std::uint64_t>(i) * (d + 1);
                    const double t = uniform_in(key, base, 0.01, 0.99);
                    std::vector<double> x(static_cast<std::size_t>(d));
                    for (int c = 0; c < d; ++c) {
                        x[static_cast<std::size_t>(c)] = uniform_in(key, base + 1 + c, -1.0, 1.0);
                    }
                    worst = std::max(worst, std::abs(pde_residual(sol, t, x)));
                }
            }
        }
    }
    out.pass = worst <= 1e-5;
    out.detail = fmt("worst |residual| %.2e over %d solutions x 1000 points", worst, case_index);
    return out;
}

} // namespace

int main(int argc, char** argv) {
    std::string out_dir = "acceptance_out";
    std::set<int> only;
    for (int i = 1; i < argc; ++i) {
        const std::string arg = argv[i];
        if (arg == "--out" && i + 1 < argc) {
            out_dir = argv[++i];
        } else if (arg == "--only" && i + 1 < argc) {
            std::stringstream ss(argv[++i]);
            std::string item;
            while (std::getline(ss, item, ',')) only.insert(std::stoi(item));
        } else {
            std::fprintf(stderr, "usage: acceptance [--out DIR] [--only 1,2,...]\n");
            return 2;
        }
    }
    const auto selected = [&](int id) { return only.empty() || only.count(id) > 0; };

    const std::map<int, std::pair<std::string, std::function<Outcome()>>> criteria = {
        {1, {"construction exactness (identity, embedding)", criterion1}},
        {2, {"gradient correctness vs finite differences", criterion2}},
        {3, {"a priori bound domination sweep", criterion3}},
        {4, {"Feynman-Kac estimates vs closed forms", criterion4}},
        {5, {"Monte-Carlo rate and moment bound", criterion5}},
        {6, {"empirical-loss gap rate in m1", criterion6}},
        {7, {"end-to-end training accuracy", criterion7}},
        {8, {"width trend of the final L2 error", criterion8}},
        {9, {"PDE residuals of the solution catalogue", criterion9}},
        {10, {"byte-identical determinism of criteria 4-8", nullptr}},
    };

    fs::create_directories(out_dir);
    std::map<int, Outcome> first_runs;
    bool all_pass = true;

    auto report = [&](int id, const Outcome& oc, double seconds) {
        std::printf("[%2d] %-48s %s  (%s) [%.1fs]\n", id, criteria.at(id).first.c_str(),
                    oc.pass ? "PASS" : "FAIL", oc.detail.c_str(), seconds);
        std::fflush(stdout);
        all_pass &= oc.pass;
        for (const auto& [name, content] : oc.csvs) {
            std::ofstream f(fs::path(out_dir) / name, std::ios::binary);
            f << content;
        }
    };

    for (int id = 1; id <= 9; ++id) {
        if (!selected(id)) continue;
        const auto t0 = std::chrono::steady_clock::now();
        const Outcome oc = criteria.at(id).second();
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        first_runs[id] = oc;
        report(id, oc, secs);
    }

    if (selected(10)) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome oc;
        oc.pass = true;
        std::string mismatches;
        const std::map<int, std::function<Outcome()>> reruns = {
            {4, criterion4}, {5, criterion5}, {6, criterion6}, {7, criterion7}, {8, criterion8}};
        for (const auto& [id, fn] : reruns) {
            if (first_runs.count(id) == 0) first_runs[id] = fn();
            const Outcome again = fn();
            for (const auto& [name, content] : first_runs[id].csvs) {
                if (again.csvs.at(name) != content) {
                    oc.pass = false;
                    mismatches += name + " ";
                }
                std::ofstream f(fs::path(out_dir) / ("rerun_" + name), std::ios::binary);
                f << again.csvs.at(name);
            }
        }
        oc.detail = oc.pass ? "all rerun CSVs byte-identical"
                            : "mismatched artifacts: " + mismatches;
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        report(10, oc, secs);
    }

    return all_pass ? 0 : 1;
}
