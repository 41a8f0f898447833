#pragma once

#include "dkm/rng.hpp"

#include <span>
#include <vector>

namespace dkm {

enum class SolutionKind { quadratic, exponential, gaussian_kernel };

// Closed-form solution of d/dt u + (kappa^2/2) Lap_x u = 0 on (0,T) x R^d:
//   quadratic:        u(t,x) = |x|^2 + kappa^2 d (T - t)
//   exponential:      u(t,x) = exp(a.x + kappa^2 |a|^2 (T - t) / 2)
//   gaussian_kernel:  u(t,x) = (2 pi s)^{-d/2} exp(-|x|^2 / (2 s)),
//                     s = sigma2 + kappa^2 (T - t)
struct ExactSolution {
    SolutionKind kind = SolutionKind::quadratic;
    int dim = 1;
    double horizon = 1.0;  // T
    double kappa = 1.0;
    std::vector<double> direction;  // a (exponential)
    double sigma2 = 1.0;            // terminal variance (gaussian_kernel)

    void validate() const;
    // Growth exponent used in reports; NaN for the exponential family, which
    // is not polynomially growing.
    [[nodiscard]] double growth_exponent() const;
};

double exact_eval(const ExactSolution& sol, double t, std::span<const double> x);

// Central-difference residual of d/dt u + (kappa^2/2) Lap u at (t, x).
double pde_residual(const ExactSolution& sol, double t, std::span<const double> x,
                    double step = 1e-4);

// sqrt(dt) * Z with Z standard d-variate normal drawn from key, coordinates
// at counters 0..d-1.
std::vector<double> brownian_increment(RngKey key, int dim, double dt);

struct FkEstimate {
    double mean = 0.0;
    double stderr_ = 0.0;
};

// Monte-Carlo Feynman-Kac estimate of u(t,x): mean of u(T, x + kappa W_i)
// over samples i = 1..m, W_i drawn from streams key.stream + i.
FkEstimate fk_estimate(const ExactSolution& sol, double t, std::span<const double> x, int m,
                       RngKey key);

struct McRateReport {
    double p = 2.0;
    std::vector<double> sample_sizes;
    std::vector<double> errors;    // empirical L^p error of the sample mean
    std::vector<double> stderrs;   // trial-to-trial spread of |mean|^p, propagated
    std::vector<double> bound_ratios;  // error / (2 [(p-1)/n]^{1/2} |X|_{L^p})
    double slope = 0.0;            // OLS slope of log error vs log n
};

// Empirical L^p convergence of the Monte-Carlo mean of a standard normal
// test variable, against the 2 [(p-1)/n]^{1/2} moment bound.
McRateReport mc_rate_check(double p, std::span<const int> sample_sizes, int trials, RngKey key);

// (E |Z|^p)^{1/p} for Z standard normal.
double normal_pth_moment_root(double p);

} // namespace dkm
