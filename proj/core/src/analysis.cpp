#include "dkm/analysis.hpp"

#include "dkm/numeric.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>

namespace dkm {

RateFit rate_fit(std::span<const double> abscissae, std::span<const double> errors,
                 std::span<const double> stderrs) {
    const std::size_t n = abscissae.size();
    if (n < 3) throw std::invalid_argument("rate_fit needs at least 3 points");
    if (errors.size() != n || stderrs.size() != n) throw std::invalid_argument("rate_fit input length mismatch");
    RateFit fit;
    fit.abscissae.assign(abscissae.begin(), abscissae.end());
    fit.errors.assign(errors.begin(), errors.end());
    fit.stderrs.assign(stderrs.begin(), stderrs.end());

    std::vector<double> x(n), y(n), w(n);
    bool weighted = true;
    for (std::size_t i = 0; i < n; ++i) {
        if (!(errors[i] > 0.0)) throw std::invalid_argument("rate_fit needs positive errors");
        if (stderrs[i] < 0.0) throw std::invalid_argument("rate_fit needs nonnegative stderrs");
        if (stderrs[i] == 0.0) weighted = false;
        x[i] = std::log(abscissae[i]);
        y[i] = std::log(errors[i]);
    }
    for (std::size_t i = 0; i < n; ++i) {
        const double sigma_log = weighted ? stderrs[i] / errors[i] : 1.0;
        w[i] = 1.0 / (sigma_log * sigma_log);
    }
    double sw = 0.0, swx = 0.0, swy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sw += w[i];
        swx += w[i] * x[i];
        swy += w[i] * y[i];
    }
    const double xbar = swx / sw;
    const double ybar = swy / sw;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += w[i] * (x[i] - xbar) * (x[i] - xbar);
        sxy += w[i] * (x[i] - xbar) * (y[i] - ybar);
    }
    fit.slope = sxy / sxx;
    fit.intercept = ybar - fit.slope * xbar;
    double var_slope;
    if (weighted) {
        var_slope = 1.0 / sxx;
    } else {
        double rss = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double r = y[i] - (fit.intercept + fit.slope * x[i]);
            rss += r * r;
        }
        var_slope = n > 2 ? rss / static_cast<double>(n - 2) / sxx : 0.0;
    }
    fit.slope_halfwidth = 1.96 * std::sqrt(var_slope);
    return fit;
}

L2Error l2_error(const SpaceTimeFn& f, const ExactSolution& sol, const SpaceTimeBox& box, int nq,
                 RngKey key) {
    sol.validate();
    box.validate();
    if (nq < 100) throw std::invalid_argument("l2_error needs at least 100 quadrature nodes");
    if (box.dim() != sol.dim) throw std::invalid_argument("box and solution dimension mismatch");
    const PointSet nodes = sample_points(box, nq, key);
    std::vector<double> sq(static_cast<std::size_t>(nq));
    for (std::size_t m = 0; m < sq.size(); ++m) {
        const auto x = nodes.point(m, box.dim());
        const double r = exact_eval(sol, nodes.times[m], x) - f(nodes.times[m], x);
        sq[m] = r * r;
    }
    const auto ms = mean_stderr(sq);
    const double vol = box.volume();
    return {vol * ms.mean, vol * ms.stderr_};
}

L2Error l2_error(const Architecture& arch, const ParamVector& theta, const ExactSolution& sol,
                 const SpaceTimeBox& box, int nq, RngKey key, Activation act) {
    if (arch.input_width() != sol.dim + 1) throw std::invalid_argument("network input width must be d + 1");
    Workspace ws;
    std::vector<double> in(static_cast<std::size_t>(sol.dim) + 1);
    auto f = [&](double t, std::span<const double> x) {
        in[0] = t;
        std::copy(x.begin(), x.end(), in.begin() + 1);
        return forward_scalar(arch, theta, in, act, ws);
    };
    return l2_error(f, sol, box, nq, key);
}

namespace {
constexpr std::uint64_t kTagThetaSet = 0x7468657461ULL;  // "theta"
constexpr std::uint64_t kTagReference = 0x726566ULL;     // "ref"
constexpr std::uint64_t kTagGapData = 0x676170ULL;       // "gap"
} // namespace

RateFit generalization_gap(const Architecture& arch, const SpaceTimeBox& box,
                           const ExactSolution& sol, int sample_count,
                           std::span<const int> m1_list, int m2, RngKey key, double theta_radius,
                           int reps, Activation act) {
    if (sample_count < 1) throw std::invalid_argument("generalization_gap needs sample_count >= 1");
    if (m1_list.empty()) throw std::invalid_argument("generalization_gap needs m1 values");
    if (reps < 2) throw std::invalid_argument("generalization_gap needs reps >= 2");
    if (arch.input_width() != sol.dim + 1) throw std::invalid_argument("network input width must be d + 1");

    const auto s = static_cast<std::size_t>(sample_count);
    std::vector<ParamVector> thetas(s);
    const RngKey theta_key = key.child(kTagThetaSet);
    for (std::size_t i = 0; i < s; ++i) {
        thetas[i].resize(param_count(arch));
        const RngKey ki = theta_key.with_stream(i);
        for (std::size_t j = 0; j < thetas[i].size(); ++j) {
            thetas[i][j] = uniform_in(ki, j, -theta_radius, theta_radius);
        }
    }

    // Reference loss on a large point set with exact conditional-expectation
    // targets u(t, x).
    const int max_m1 = *std::max_element(m1_list.begin(), m1_list.end());
    const int m1_ref = 64 * max_m1;
    const PointSet ref = sample_points(box, m1_ref, key.child(kTagReference));
    const auto d = static_cast<std::size_t>(box.dim());
    Workspace ws;
    std::vector<double> in(d + 1);
    std::vector<double> sq(static_cast<std::size_t>(m1_ref));
    std::vector<double> ref_loss(s);
    for (std::size_t i = 0; i < s; ++i) {
        for (std::size_t m = 0; m < sq.size(); ++m) {
            in[0] = ref.times[m];
            const auto x = ref.point(m, box.dim());
            std::copy(x.begin(), x.end(), in.begin() + 1);
            const double r = forward_scalar(arch, thetas[i], in, act, ws) -
                             exact_eval(sol, ref.times[m], x);
            sq[m] = r * r;
        }
        ref_loss[i] = pairwise_sum(sq) / static_cast<double>(m1_ref);
    }

    const RngKey data_key = key.child(kTagGapData);
    std::vector<double> gap_samples(static_cast<std::size_t>(reps));
    std::vector<double> abscissae, errors, stderrs;
    for (std::size_t ni = 0; ni < m1_list.size(); ++ni) {
        const int m1 = m1_list[ni];
        for (int r = 0; r < reps; ++r) {
            const TrainingBatch batch = build_batch(
                sol, box, m1, m2, data_key.child(ni * 1000 + static_cast<std::uint64_t>(r)));
            double sup_gap = 0.0;
            for (std::size_t i = 0; i < s; ++i) {
                const double f = loss_eval(arch, thetas[i], batch, act);
                sup_gap = std::max(sup_gap, std::abs(f - ref_loss[i]));
            }
            gap_samples[static_cast<std::size_t>(r)] = sup_gap;
        }
        const auto ms = mean_stderr(gap_samples);
        abscissae.push_back(static_cast<double>(m1));
        errors.push_back(ms.mean);
        stderrs.push_back(ms.stderr_);
    }
    return rate_fit(abscissae, errors, stderrs);
}

SobolevEstimate sobolev_sup_estimate(const PointFn& f, const GradFn& grad_f, double a, double b,
                                     int dim, double p, int nq, RngKey key) {
    if (!(b > a)) throw std::invalid_argument("sobolev_sup_estimate needs b > a");
    if (dim < 1) throw std::invalid_argument("dimension must be positive");
    const double p_min = std::max(2.0, static_cast<double>(dim) * static_cast<double>(dim));
    if (p < p_min) throw std::invalid_argument("sobolev_sup_estimate needs p >= max{2, d^2}");
    if (nq < 100) throw std::invalid_argument("sobolev_sup_estimate needs at least 100 nodes");

    const auto d = static_cast<std::size_t>(dim);
    std::vector<double> x(d);
    std::vector<double> g(d);
    std::vector<double> integrand(static_cast<std::size_t>(nq));
    double sup = 0.0;
    for (int m = 0; m < nq; ++m) {
        for (std::size_t c = 0; c < d; ++c) {
            x[c] = uniform_in(key, static_cast<std::uint64_t>(m) * d + c, a, b);
        }
        const double v = f(x);
        sup = std::max(sup, std::abs(v));
        grad_f(x, g);
        double gn = 0.0;
        for (double gc : g) gn += gc * gc;
        gn = std::sqrt(gn);
        integrand[static_cast<std::size_t>(m)] = std::pow(std::abs(v), p) + std::pow(gn, p);
    }
    const double volume = std::pow(b - a, dim);
    const double integral = volume * (pairwise_sum(integrand) / static_cast<double>(nq));
    const double factor = std::max(std::pow(b - a, -static_cast<double>(dim) / p), b - a);
    const double rhs = 16.0 * std::sqrt(std::numbers::e) * factor * std::pow(integral, 1.0 / p);
    return {sup, rhs};
}

DecompositionReport decomposition_report(const TrainConfig& config, int dim, L2Error measured,
                                         const std::optional<OptErrorProxy>& proxy,
                                         std::optional<RateFit> m1_fit,
                                         std::optional<RateFit> width_fit) {
    DecompositionReport report;
    report.measured = measured;
    report.m1_scale = 1.0 / std::sqrt(static_cast<double>(config.m1));
    int min_width = config.arch.widths[1];
    for (int k = 1; k < config.arch.depth(); ++k) {
        min_width = std::min(min_width, config.arch.widths[static_cast<std::size_t>(k)]);
    }
    report.width_scale = std::pow(static_cast<double>(min_width), -2.0 / (dim + 5.0));
    if (proxy.has_value()) {
        report.opt_proxy = proxy->proxy;
        report.opt_restarts = static_cast<int>(proxy->restart_losses.size());
    }
    report.config = config;
    report.m1_fit = std::move(m1_fit);
    report.width_fit = std::move(width_fit);
    return report;
}

double spearman_rho(std::span<const double> x, std::span<const double> y) {
    const std::size_t n = x.size();
    if (n != y.size() || n < 2) throw std::invalid_argument("spearman_rho needs two equal-length series");
    auto ranks = [](std::span<const double> v) {
        const std::size_t n = v.size();
        std::vector<std::size_t> idx(n);
        std::iota(idx.begin(), idx.end(), std::size_t{0});
        std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
        std::vector<double> r(n);
        std::size_t i = 0;
        while (i < n) {
            std::size_t j = i;
            while (j + 1 < n && v[idx[j + 1]] == v[idx[i]]) ++j;
            const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
            for (std::size_t k = i; k <= j; ++k) r[idx[k]] = avg;
            i = j + 1;
        }
        return r;
    };
    const auto rx = ranks(x);
    const auto ry = ranks(y);
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += rx[i];
        my += ry[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxy += (rx[i] - mx) * (ry[i] - my);
        sxx += (rx[i] - mx) * (rx[i] - mx);
        syy += (ry[i] - my) * (ry[i] - my);
    }
    return sxy / std::sqrt(sxx * syy);
}

namespace {

nlohmann::json rate_fit_json(const RateFit& fit) {
    nlohmann::json j;
    j["abscissae"] = fit.abscissae;
    j["errors"] = fit.errors;
    j["stderrs"] = fit.stderrs;
    j["slope"] = fit.slope;
    j["slope_halfwidth"] = fit.slope_halfwidth;
    j["intercept"] = fit.intercept;
    return j;
}

nlohmann::json config_json(const TrainConfig& c) {
    nlohmann::json j;
    j["widths"] = c.arch.widths;
    j["box_radius"] = c.box_radius;
    j["optimizer"] = c.optimizer == OptimizerKind::adam ? "adam" : "sgd";
    j["learning_rate"] = c.learning_rate;
    j["steps"] = c.steps;
    j["m1"] = c.m1;
    j["m2"] = c.m2;
    j["activation"] = c.activation;
    j["seed"] = c.seed;
    j["fresh_batch"] = c.fresh_batch;
    j["restarts"] = c.restarts;
    return j;
}

} // namespace

std::string DecompositionReport::to_json() const {
    nlohmann::json j;
    j["measured_l2"] = measured.estimate;
    j["measured_l2_stderr"] = measured.stderr_;
    j["terms"] = {
        {"sampling", {{"scale_m1_pow_minus_half", m1_scale}, {"constant", "unidentified theory constant"}}},
        {"approximation",
         {{"scale_min_width_pow", width_scale}, {"constant", "unidentified theory constant"}}},
        {"optimization", {{"proxy", opt_proxy}, {"restarts", opt_restarts}}},
    };
    j["config"] = config_json(config);
    if (m1_fit.has_value()) j["m1_fit"] = rate_fit_json(*m1_fit);
    if (width_fit.has_value()) j["width_fit"] = rate_fit_json(*width_fit);
    return j.dump(2);
}

std::string train_config_to_json(const TrainConfig& config) {
    return config_json(config).dump(2);
}

TrainConfig train_config_from_json(const std::string& text) {
    const auto j = nlohmann::json::parse(text);
    TrainConfig c;
    c.arch = Architecture(j.at("widths").get<std::vector<int>>());
    c.box_radius = j.at("box_radius").get<double>();
    c.optimizer = j.at("optimizer").get<std::string>() == "adam" ? OptimizerKind::adam : OptimizerKind::sgd;
    c.learning_rate = j.at("learning_rate").get<double>();
    c.steps = j.at("steps").get<int>();
    c.m1 = j.at("m1").get<int>();
    c.m2 = j.at("m2").get<int>();
    c.activation = j.at("activation").get<int>();
    c.seed = j.at("seed").get<std::uint64_t>();
    c.fresh_batch = j.at("fresh_batch").get<bool>();
    c.restarts = j.at("restarts").get<int>();
    return c;
}

bool operator==(const TrainConfig& a, const TrainConfig& b) {
    return a.arch.widths == b.arch.widths && a.box_radius == b.box_radius &&
           a.optimizer == b.optimizer && a.learning_rate == b.learning_rate && a.steps == b.steps &&
           a.m1 == b.m1 && a.m2 == b.m2 && a.activation == b.activation && a.seed == b.seed &&
           a.fresh_batch == b.fresh_batch && a.restarts == b.restarts;
}

} // namespace dkm
