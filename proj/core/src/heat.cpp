#include "dkm/heat.hpp"

#include "dkm/numeric.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace dkm {

void ExactSolution::validate() const {
    if (dim < 1) throw std::invalid_argument("solution dimension must be positive");
    if (!(horizon > 0.0)) throw std::invalid_argument("solution horizon must be positive");
    if (!(kappa > 0.0)) throw std::invalid_argument("solution diffusivity must be positive");
    if (kind == SolutionKind::exponential && direction.size() != static_cast<std::size_t>(dim)) {
        throw std::invalid_argument("exponential solution needs a direction of length dim");
    }
    if (kind == SolutionKind::gaussian_kernel && !(sigma2 > 0.0)) {
        throw std::invalid_argument("gaussian_kernel solution needs sigma2 > 0");
    }
}

double ExactSolution::growth_exponent() const {
    switch (kind) {
        case SolutionKind::quadratic: return 2.0;
        case SolutionKind::gaussian_kernel: return 0.0;
        case SolutionKind::exponential: return std::numeric_limits<double>::quiet_NaN();
    }
    return std::numeric_limits<double>::quiet_NaN();
}

double exact_eval(const ExactSolution& sol, double t, std::span<const double> x) {
    if (x.size() != static_cast<std::size_t>(sol.dim)) throw std::invalid_argument("point dimension mismatch");
    if (t < 0.0 || t > sol.horizon) throw std::invalid_argument("time outside [0, T]");
    const double tau = sol.horizon - t;
    const double k2 = sol.kappa * sol.kappa;
    switch (sol.kind) {
        case SolutionKind::quadratic: {
            double r2 = 0.0;
            for (double v : x) r2 += v * v;
            return r2 + k2 * static_cast<double>(sol.dim) * tau;
        }
        case SolutionKind::exponential: {
            double dot = 0.0;
            double a2 = 0.0;
            for (std::size_t i = 0; i < x.size(); ++i) {
                dot += sol.direction[i] * x[i];
                a2 += sol.direction[i] * sol.direction[i];
            }
            return std::exp(dot + 0.5 * k2 * a2 * tau);
        }
        case SolutionKind::gaussian_kernel: {
            const double s = sol.sigma2 + k2 * tau;
            double r2 = 0.0;
            for (double v : x) r2 += v * v;
            return std::pow(2.0 * std::numbers::pi * s, -0.5 * static_cast<double>(sol.dim)) *
                   std::exp(-r2 / (2.0 * s));
        }
    }
    throw std::logic_error("unreachable");
}

double pde_residual(const ExactSolution& sol, double t, std::span<const double> x, double step) {
    const double h = step;
    const double ut = (exact_eval(sol, t + h, x) - exact_eval(sol, t - h, x)) / (2.0 * h);
    std::vector<double> y(x.begin(), x.end());
    const double u0 = exact_eval(sol, t, x);
    double lap = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double xi = y[i];
        y[i] = xi + h;
        const double up = exact_eval(sol, t, y);
        y[i] = xi - h;
        const double um = exact_eval(sol, t, y);
        y[i] = xi;
        lap += (up - 2.0 * u0 + um) / (h * h);
    }
    return ut + 0.5 * sol.kappa * sol.kappa * lap;
}

std::vector<double> brownian_increment(RngKey key, int dim, double dt) {
    if (dt < 0.0) throw std::invalid_argument("brownian increment needs dt >= 0");
    std::vector<double> w(static_cast<std::size_t>(dim));
    if (dt == 0.0) return w;
    const double s = std::sqrt(dt);
    normal_fill(key, 0, w.data(), w.size());
    for (auto& v : w) v *= s;
    return w;
}

FkEstimate fk_estimate(const ExactSolution& sol, double t, std::span<const double> x, int m,
                       RngKey key) {
    sol.validate();
    if (m < 1) throw std::invalid_argument("fk_estimate needs m >= 1");
    if (t < 0.0 || t > sol.horizon) throw std::invalid_argument("time outside [0, T]");
    const double dt = sol.horizon - t;
    if (dt == 0.0) return {exact_eval(sol, t, x), 0.0};  // zero-time increment
    const double s = std::sqrt(dt);
    const auto d = static_cast<std::size_t>(sol.dim);
    std::vector<double> w(d);
    std::vector<double> y(d);
    std::vector<double> vals(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) {
        normal_fill(key.with_stream(key.stream + 1 + static_cast<std::uint64_t>(i)), 0, w.data(), d);
        for (std::size_t c = 0; c < d; ++c) y[c] = x[c] + sol.kappa * s * w[c];
        vals[static_cast<std::size_t>(i)] = exact_eval(sol, sol.horizon, y);
    }
    const auto ms = mean_stderr(vals);
    return {ms.mean, ms.stderr_};
}

double normal_pth_moment_root(double p) {
    // E|Z|^p = 2^{p/2} Gamma((p+1)/2) / sqrt(pi)
    const double log_moment = 0.5 * p * std::numbers::ln2 + std::lgamma(0.5 * (p + 1.0)) -
                              0.5 * std::log(std::numbers::pi);
    return std::exp(log_moment / p);
}

McRateReport mc_rate_check(double p, std::span<const int> sample_sizes, int trials, RngKey key) {
    if (p < 2.0) throw std::invalid_argument("mc_rate_check needs p >= 2");
    if (trials < 30) throw std::invalid_argument("mc_rate_check needs trials >= 30");
    if (sample_sizes.empty()) throw std::invalid_argument("mc_rate_check needs sample sizes");
    for (int n : sample_sizes) {
        if (n < 2) throw std::invalid_argument("mc_rate_check needs each n >= 2");
    }
    McRateReport report;
    report.p = p;
    const double xlp = normal_pth_moment_root(p);  // (E|X - EX|^p)^{1/p}, X standard normal
    std::vector<double> powers(static_cast<std::size_t>(trials));
    for (std::size_t ni = 0; ni < sample_sizes.size(); ++ni) {
        const int n = sample_sizes[ni];
        const RngKey size_key = key.child(ni);
        for (int tr = 0; tr < trials; ++tr) {
            const RngKey trial_key = size_key.with_stream(static_cast<std::uint64_t>(tr));
            double s = 0.0;
            for (int i = 0; i < n; ++i) s += normal(trial_key, static_cast<std::uint64_t>(i));
            const double mean = s / static_cast<double>(n);
            powers[static_cast<std::size_t>(tr)] = std::pow(std::abs(mean), p);
        }
        const auto ms = mean_stderr(powers);
        const double err = std::pow(ms.mean, 1.0 / p);
        // Delta method: d/dm m^{1/p} = m^{1/p - 1} / p.
        const double se = ms.mean > 0.0 ? ms.stderr_ * std::pow(ms.mean, 1.0 / p - 1.0) / p : 0.0;
        const double bound = 2.0 * std::sqrt((p - 1.0) / static_cast<double>(n)) * xlp;
        report.sample_sizes.push_back(static_cast<double>(n));
        report.errors.push_back(err);
        report.stderrs.push_back(se);
        report.bound_ratios.push_back(err / bound);
    }
    // OLS slope of log error against log n.
    const auto k = static_cast<double>(report.errors.size());
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < report.errors.size(); ++i) {
        const double lx = std::log(report.sample_sizes[i]);
        const double ly = std::log(report.errors[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    report.slope = (k * sxy - sx * sy) / (k * sxx - sx * sx);
    return report;
}

} // namespace dkm
