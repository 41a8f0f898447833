#include "dkm/bounds.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dkm {

void BoundContext::validate(const Architecture& arch) const {
    if (!(b > a)) throw std::invalid_argument("bound context needs b > a");
    if (act_growth_c < 0.0) throw std::invalid_argument("bound context needs c >= 0");
    if (act_growth_q < 0.0) throw std::invalid_argument("bound context needs q >= 0");
    if (layer < 1 || layer > arch.depth()) throw std::invalid_argument("bound context layer out of range");
}

namespace {

double max_abs_prefix(const ParamVector& v, std::size_t n) {
    double m = 0.0;
    for (std::size_t i = 0; i < n; ++i) m = std::max(m, std::abs(v[i]));
    return m;
}

double max_width_below(const Architecture& arch, int k) {
    int m = 0;
    for (int h = 0; h < k; ++h) m = std::max(m, arch.widths[static_cast<std::size_t>(h)]);
    return static_cast<double>(m);
}

} // namespace

double growth_bound(const Architecture& arch, const ParamVector& theta, const BoundContext& ctx) {
    ctx.validate(arch);
    if (theta.size() != param_count(arch)) throw std::invalid_argument("theta length mismatch");
    const int k = ctx.layer;
    const double e = std::max(1.0, std::pow(ctx.act_growth_q, k - 1));
    const auto d_k = layer_offsets(arch)[static_cast<std::size_t>(k)];
    const double box = std::max({1.0, std::abs(ctx.a), std::abs(ctx.b)});
    const double par = std::max(1.0, max_abs_prefix(theta, d_k));
    const double wid = 1.0 + 2.0 * std::max(ctx.act_growth_c, 1.0) * max_width_below(arch, k);
    return std::pow(box, e) * std::pow(par, k * e) * std::pow(wid, k * e);
}

double lipschitz_bound(const Architecture& arch, const ParamVector& theta,
                       const ParamVector& vartheta, double a, double b, double act_c,
                       double act_at_zero) {
    if (theta.size() != vartheta.size()) throw std::invalid_argument("parameter vectors differ in length");
    if (theta.size() != param_count(arch)) throw std::invalid_argument("theta length mismatch");
    if (!(b > a)) throw std::invalid_argument("needs b > a");
    const int L = arch.depth();
    const double box = std::max({1.0, std::abs(a), std::abs(b)});
    const double fac = (3.0 + std::abs(act_at_zero)) * std::max(act_c, 1.0) * max_width_below(arch, L);
    double par = 1.0;
    double diff = 0.0;
    for (std::size_t i = 0; i < theta.size(); ++i) {
        par = std::max({par, std::abs(theta[i]), std::abs(vartheta[i])});
        diff = std::max(diff, std::abs(theta[i] - vartheta[i]));
    }
    return box * std::pow(fac, L) * std::pow(par, L) * diff;
}

double grad_bound(const Architecture& arch, const ParamVector& theta, double a, double b,
                  double act_deriv_sup, double act_at_zero) {
    if (theta.size() != param_count(arch)) throw std::invalid_argument("theta length mismatch");
    if (!(b > a)) throw std::invalid_argument("needs b > a");
    const int L = arch.depth();
    const double box = std::max({1.0, std::abs(a), std::abs(b)});
    const double par = std::max(1.0, max_abs_prefix(theta, theta.size()));
    const double inner = max_width_below(arch, L) * par * std::max(1.0, act_deriv_sup);
    return box * std::pow(3.0 + std::abs(act_at_zero), L) * std::pow(inner, L);
}

namespace {

constexpr std::uint64_t kTagArch = 0x61;
constexpr std::uint64_t kTagTheta = 0x62;
constexpr std::uint64_t kTagInput = 0x63;

Architecture random_architecture(RngKey key) {
    const int L = 2 + static_cast<int>(uniform01(key, 0) * 3.0);  // 2..4
    std::vector<int> widths(static_cast<std::size_t>(L) + 1);
    widths[0] = 1 + static_cast<int>(uniform01(key, 1) * 3.0);  // input dim 1..3
    for (int k = 1; k < L; ++k) {
        widths[static_cast<std::size_t>(k)] = 1 + static_cast<int>(uniform01(key, 1 + k) * 16.0);
    }
    widths[static_cast<std::size_t>(L)] = 1;
    return Architecture(widths);
}

ParamVector random_theta(const Architecture& arch, RngKey key, double radius) {
    ParamVector theta(param_count(arch));
    for (std::size_t i = 0; i < theta.size(); ++i) {
        theta[i] = uniform_in(key, i, -radius, radius);
    }
    return theta;
}

} // namespace

BoundCheckReport check_bounds(int trials, std::uint64_t seed, int points_per_case) {
    if (trials < 1) throw std::invalid_argument("check_bounds needs trials >= 1");
    if (points_per_case < 1) throw std::invalid_argument("check_bounds needs points_per_case >= 1");
    BoundCheckReport report;
    report.trials = trials;
    report.seed = seed;
    const RngKey root{seed, 0};
    Workspace ws;
    Workspace ws2;
    ParamVector grad;
    std::vector<double> x;
    for (int t = 0; t < trials; ++t) {
        const RngKey trial_key = root.child(static_cast<std::uint64_t>(t));
        const Architecture arch = random_architecture(trial_key.child(kTagArch));
        const ParamVector theta = random_theta(arch, trial_key.child(kTagTheta), 2.0);
        const ParamVector vartheta = random_theta(arch, trial_key.child(kTagTheta + 1), 2.0);
        const int L = arch.depth();
        const auto d = static_cast<std::size_t>(arch.input_width());
        grad.assign(theta.size(), 0.0);
        x.resize(d);

        std::vector<double> growth_sup(static_cast<std::size_t>(L), 0.0);
        double lip_sup = 0.0;
        double grad_sup = 0.0;
        const RngKey input_key = trial_key.child(kTagInput);
        const Activation relu{0};
        const Activation smooth{1};
        for (int s = 0; s < points_per_case; ++s) {
            for (std::size_t c = 0; c < d; ++c) {
                x[c] = uniform_in(input_key, static_cast<std::uint64_t>(s) * d + c, -1.0, 1.0);
            }
            forward(arch, theta, x, relu, ws);
            for (int k = 0; k < L; ++k) {
                for (double v : ws.pre[static_cast<std::size_t>(k)]) {
                    growth_sup[static_cast<std::size_t>(k)] =
                        std::max(growth_sup[static_cast<std::size_t>(k)], std::abs(v));
                }
            }
            forward(arch, vartheta, x, relu, ws2);
            lip_sup = std::max(lip_sup, std::abs(ws.pre.back()[0] - ws2.pre.back()[0]));

            forward(arch, theta, x, smooth, ws);
            std::fill(grad.begin(), grad.end(), 0.0);
            accumulate_grad_theta(arch, theta, x, smooth, ws, 1.0, grad);
            double nrm2 = 0.0;
            for (double g : grad) nrm2 += g * g;
            grad_sup = std::max(grad_sup, std::sqrt(nrm2));
        }

        for (int k = 1; k <= L; ++k) {
            BoundContext ctx{-1.0, 1.0, 1.0, 1.0, k};
            const double bound = growth_bound(arch, theta, ctx);
            const double realized = growth_sup[static_cast<std::size_t>(k - 1)];
            if (realized > bound) report.growth_violations += 1;
            if (bound > 0.0) report.worst_ratio = std::max(report.worst_ratio, realized / bound);
        }
        {
            const double bound = lipschitz_bound(arch, theta, vartheta, -1.0, 1.0, 1.0, 0.0);
            if (lip_sup > bound) report.lipschitz_violations += 1;
            if (bound > 0.0) report.worst_ratio = std::max(report.worst_ratio, lip_sup / bound);
        }
        {
            const double bound = grad_bound(arch, theta, -1.0, 1.0, 1.0, 0.0);
            if (grad_sup > bound) report.grad_violations += 1;
            if (bound > 0.0) report.worst_ratio = std::max(report.worst_ratio, grad_sup / bound);
        }
    }
    return report;
}

std::string BoundCheckReport::to_json() const {
    nlohmann::json j;
    j["trials"] = trials;
    j["seed"] = seed;
    j["violations"] = {{"growth", growth_violations},
                       {"lipschitz", lipschitz_violations},
                       {"gradient", grad_violations}};
    j["worst_ratio"] = worst_ratio;
    return j.dump(2);
}

} // namespace dkm
