#pragma once

#include "dkm/batch.hpp"

#include <cstdint>
#include <stdexcept>
#include <vector>

namespace dkm {

// Raised when a run produces a non-finite quantity (NaN/inf loss).
struct NumericFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class OptimizerKind { sgd, adam };

struct TrainConfig {
    Architecture arch;
    double box_radius = 10.0;  // R
    OptimizerKind optimizer = OptimizerKind::adam;
    double learning_rate = 2e-3;
    int steps = 1000;
    int m1 = 1024;
    int m2 = 64;
    int activation = 0;
    std::uint64_t seed = 0;
    bool fresh_batch = true;  // new batch every step; otherwise one frozen batch
    int restarts = 1;

    void validate(int dim) const;
};

// Coordinatewise clamp to [-R, R]; idempotent and nonexpansive.
ParamVector project_box(ParamVector theta, double radius);

struct TrainResult {
    ParamVector theta;
    std::vector<double> loss_history;       // loss on each step's batch
    std::vector<double> grad_norm_history;  // Euclidean norm of the step gradient
    double max_param_inf = 0.0;             // sup-norm over the whole trajectory
    double wall_ms = 0.0;                   // total wall time (not deterministic)
};

// Projected stochastic minimization of the batch loss inside
// [-R, R]^{d(l)}.  Deterministic given (config, seed): initialization, batch
// streams, and the update sequence are all keyed off config.seed.
TrainResult train(const TrainConfig& config, const ExactSolution& sol, const SpaceTimeBox& box);

struct OptErrorProxy {
    double best_loss = 0.0;
    std::vector<double> restart_losses;  // final losses on a shared evaluation batch
    double proxy = 0.0;                  // mean(restart_losses) - best_loss
};

// Restart-based stand-in for the optimization error: the box infimum of the
// loss is unobservable, so it is replaced by the best of K independent
// restarts run at a 4x step budget.  Restart k uses seeds[k]; all finals are
// scored on one evaluation batch keyed by config.seed.
OptErrorProxy opt_error_proxy(const TrainConfig& config, const ExactSolution& sol,
                              const SpaceTimeBox& box, std::span<const std::uint64_t> seeds,
                              int budget_multiplier = 4);

// Convenience overload with seeds (config.seed, config.seed + 1, ...).
OptErrorProxy opt_error_proxy(const TrainConfig& config, const ExactSolution& sol,
                              const SpaceTimeBox& box, int restarts, int budget_multiplier = 4);

} // namespace dkm
