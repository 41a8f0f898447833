#pragma once

#include "dkm/batch.hpp"
#include "dkm/train.hpp"

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace dkm {

struct RateFit {
    std::vector<double> abscissae;
    std::vector<double> errors;
    std::vector<double> stderrs;
    double slope = 0.0;
    double slope_halfwidth = 0.0;  // 1.96 sigma, normal approximation
    double intercept = 0.0;
};

// Weighted least squares of log(error) against log(abscissa).  Weights are
// 1/sigma_log^2 with sigma_log = stderr/error; if any stderr is zero the fit
// falls back to equal weights with a residual-based slope variance.
RateFit rate_fit(std::span<const double> abscissae, std::span<const double> errors,
                 std::span<const double> stderrs);

struct L2Error {
    double estimate = 0.0;
    double stderr_ = 0.0;
};

using SpaceTimeFn = std::function<double(double t, std::span<const double> x)>;

// Monte-Carlo estimate of  int_box |u(y) - f(y)|^2 dy  with nq fixed-seed
// quadrature nodes (volume times the mean squared residual).
L2Error l2_error(const SpaceTimeFn& f, const ExactSolution& sol, const SpaceTimeBox& box, int nq,
                 RngKey key);
L2Error l2_error(const Architecture& arch, const ParamVector& theta, const ExactSolution& sol,
                 const SpaceTimeBox& box, int nq, RngKey key, Activation act = {});

// Empirical loss-vs-population gap.  For sample_count fixed random theta in
// [-theta_radius, theta_radius]^{d(l)} the gap at a given m1 is
//   sup_theta |F_{(m1,m2)}(theta) - S(theta)|,
// with S a reference empirical loss on 64 * max(m1_list) points whose targets
// are exact u(t, x) values (the conditional expectation of the Monte-Carlo
// targets).  Each m1 is repeated `reps` times on fresh data; the returned fit
// is over (m1, mean gap, stderr).
RateFit generalization_gap(const Architecture& arch, const SpaceTimeBox& box,
                           const ExactSolution& sol, int sample_count,
                           std::span<const int> m1_list, int m2, RngKey key,
                           double theta_radius = 1.0, int reps = 8, Activation act = {});

struct SobolevEstimate {
    double lhs = 0.0;  // sampled sup (an underestimate of the true sup)
    double rhs = 0.0;  // 16 sqrt(e) max{(b-a)^{-d/p}, b-a} [ int (|f|^p + |grad f|^p) ]^{1/p}
};

using PointFn = std::function<double(std::span<const double> x)>;
using GradFn = std::function<void(std::span<const double> x, std::span<double> grad_out)>;

// Both sides of the sup-norm Sobolev estimate on (a,b)^d for a C^1 function;
// the integral is Monte-Carlo estimated on nq nodes.  Requires p >= max{2, d^2}.
SobolevEstimate sobolev_sup_estimate(const PointFn& f, const GradFn& grad_f, double a, double b,
                                     int dim, double p, int nq, RngKey key);

struct DecompositionReport {
    L2Error measured;
    double m1_scale = 0.0;     // m1^{-1/2}; the theory-side constant is unidentified
    double width_scale = 0.0;  // min hidden width ^{-2/(d+5)}
    double opt_proxy = 0.0;
    int opt_restarts = 0;      // 0 when the proxy was not computed
    TrainConfig config;
    std::optional<RateFit> m1_fit;
    std::optional<RateFit> width_fit;

    [[nodiscard]] std::string to_json() const;
};

DecompositionReport decomposition_report(const TrainConfig& config, int dim, L2Error measured,
                                         const std::optional<OptErrorProxy>& proxy,
                                         std::optional<RateFit> m1_fit,
                                         std::optional<RateFit> width_fit);

// Spearman rank correlation (average ranks on ties).
double spearman_rho(std::span<const double> x, std::span<const double> y);

// TrainConfig serialization used for the report's configuration echo.
std::string train_config_to_json(const TrainConfig& config);
TrainConfig train_config_from_json(const std::string& text);
bool operator==(const TrainConfig& a, const TrainConfig& b);

} // namespace dkm
