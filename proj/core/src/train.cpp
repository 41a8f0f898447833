#include "dkm/train.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>

namespace dkm {

namespace {
constexpr std::uint64_t kTagInit = 0x696e6974ULL;   // "init"
constexpr std::uint64_t kTagData = 0x64617461ULL;   // "data"
constexpr std::uint64_t kTagEval = 0x6576616cULL;   // "eval"
} // namespace

void TrainConfig::validate(int dim) const {
    if (arch.input_width() != dim + 1) throw std::invalid_argument("architecture input width must be d + 1");
    if (arch.output_width() != 1) throw std::invalid_argument("architecture output width must be 1");
    if (!(box_radius >= 1.0)) throw std::invalid_argument("box radius must be >= 1");
    if (steps < 1) throw std::invalid_argument("step count must be >= 1");
    if (!(learning_rate > 0.0)) throw std::invalid_argument("learning rate must be positive");
    if (m1 < 1 || m2 < 1) throw std::invalid_argument("m1 and m2 must be >= 1");
    if (activation < 0) throw std::invalid_argument("activation index must be nonnegative");
    if (restarts < 1) throw std::invalid_argument("restart count must be >= 1");
}

ParamVector project_box(ParamVector theta, double radius) {
    if (!(radius > 0.0)) throw std::invalid_argument("projection radius must be positive");
    for (auto& v : theta) v = std::clamp(v, -radius, radius);
    return theta;
}

namespace {

// Uniform init in [-r0, r0] per entry with r0 = min(1, R) / sqrt(fan-in),
// keeping initial pre-activations O(1) and inside the box.
ParamVector init_params(const Architecture& arch, double radius, RngKey key) {
    ParamVector theta(param_count(arch));
    std::size_t pos = 0;
    std::uint64_t counter = 0;
    for (int k = 0; k < arch.depth(); ++k) {
        const auto rows = static_cast<std::size_t>(arch.widths[k + 1]);
        const auto cols = static_cast<std::size_t>(arch.widths[k]);
        const double r0 = std::min(1.0, radius) / std::sqrt(static_cast<double>(cols));
        for (std::size_t i = 0; i < rows * (cols + 1); ++i) {
            theta[pos++] = uniform_in(key, counter++, -r0, r0);
        }
    }
    return theta;
}

struct AdamState {
    std::vector<double> m;
    std::vector<double> v;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    int t = 0;
};

} // namespace

TrainResult train(const TrainConfig& config, const ExactSolution& sol, const SpaceTimeBox& box) {
    sol.validate();
    box.validate();
    config.validate(box.dim());
    const auto start = std::chrono::steady_clock::now();

    const RngKey root{config.seed, 0};
    const Activation act{config.activation};
    TrainResult result;
    result.theta = project_box(init_params(config.arch, config.box_radius, root.child(kTagInit)),
                               config.box_radius);
    result.loss_history.reserve(static_cast<std::size_t>(config.steps));
    result.grad_norm_history.reserve(static_cast<std::size_t>(config.steps));

    AdamState adam;
    if (config.optimizer == OptimizerKind::adam) {
        adam.m.assign(result.theta.size(), 0.0);
        adam.v.assign(result.theta.size(), 0.0);
    }

    Workspace ws;
    std::vector<double> scratch;
    std::vector<double> grad(result.theta.size());
    TrainingBatch batch;
    const RngKey data_key = root.child(kTagData);
    if (!config.fresh_batch) batch = build_batch(sol, box, config.m1, config.m2, data_key.child(0));

    auto track_inf = [&result](const ParamVector& theta) {
        for (double v : theta) result.max_param_inf = std::max(result.max_param_inf, std::abs(v));
    };
    track_inf(result.theta);

    for (int step = 0; step < config.steps; ++step) {
        if (config.fresh_batch) {
            batch = build_batch(sol, box, config.m1, config.m2,
                                data_key.child(static_cast<std::uint64_t>(step)));
        }
        const double loss = loss_and_grad(config.arch, result.theta, batch, act, ws, scratch, grad);
        if (!std::isfinite(loss)) throw NumericFailure("loss became non-finite at step " + std::to_string(step));
        double g2 = 0.0;
        for (double g : grad) g2 += g * g;
        result.loss_history.push_back(loss);
        result.grad_norm_history.push_back(std::sqrt(g2));

        if (config.optimizer == OptimizerKind::sgd) {
            for (std::size_t i = 0; i < result.theta.size(); ++i) {
                result.theta[i] -= config.learning_rate * grad[i];
            }
        } else {
            adam.t += 1;
            const double b1t = 1.0 - std::pow(adam.beta1, adam.t);
            const double b2t = 1.0 - std::pow(adam.beta2, adam.t);
            for (std::size_t i = 0; i < result.theta.size(); ++i) {
                adam.m[i] = adam.beta1 * adam.m[i] + (1.0 - adam.beta1) * grad[i];
                adam.v[i] = adam.beta2 * adam.v[i] + (1.0 - adam.beta2) * grad[i] * grad[i];
                const double mhat = adam.m[i] / b1t;
                const double vhat = adam.v[i] / b2t;
                result.theta[i] -= config.learning_rate * mhat / (std::sqrt(vhat) + adam.eps);
            }
        }
        for (auto& v : result.theta) v = std::clamp(v, -config.box_radius, config.box_radius);
        track_inf(result.theta);
    }

    result.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    return result;
}

OptErrorProxy opt_error_proxy(const TrainConfig& config, const ExactSolution& sol,
                              const SpaceTimeBox& box, std::span<const std::uint64_t> seeds,
                              int budget_multiplier) {
    if (seeds.size() < 2) throw std::invalid_argument("opt_error_proxy needs at least 2 restarts");
    if (budget_multiplier < 1) throw std::invalid_argument("budget multiplier must be >= 1");
    config.validate(box.dim());

    const RngKey eval_key = RngKey{config.seed, 0}.child(kTagEval);
    const TrainingBatch eval_batch = build_batch(sol, box, config.m1, config.m2, eval_key);
    const Activation act{config.activation};

    OptErrorProxy out;
    out.restart_losses.reserve(seeds.size());
    for (std::uint64_t s : seeds) {
        TrainConfig run = config;
        run.seed = s;
        run.steps = config.steps * budget_multiplier;
        const TrainResult res = train(run, sol, box);
        out.restart_losses.push_back(loss_eval(config.arch, res.theta, eval_batch, act));
    }
    out.best_loss = *std::min_element(out.restart_losses.begin(), out.restart_losses.end());
    double sum = 0.0;
    for (double v : out.restart_losses) sum += v;
    out.proxy = sum / static_cast<double>(out.restart_losses.size()) - out.best_loss;
    return out;
}

OptErrorProxy opt_error_proxy(const TrainConfig& config, const ExactSolution& sol,
                              const SpaceTimeBox& box, int restarts, int budget_multiplier) {
    if (restarts < 2) throw std::invalid_argument("opt_error_proxy needs at least 2 restarts");
    std::vector<std::uint64_t> seeds(static_cast<std::size_t>(restarts));
    for (int k = 0; k < restarts; ++k) seeds[static_cast<std::size_t>(k)] = config.seed + static_cast<std::uint64_t>(k);
    return opt_error_proxy(config, sol, box, seeds, budget_multiplier);
}

} // namespace dkm
