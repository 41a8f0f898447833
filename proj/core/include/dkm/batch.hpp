#pragma once

#include "dkm/heat.hpp"
#include "dkm/net.hpp"
#include "dkm/rng.hpp"

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

namespace dkm {

// Axis-aligned space-time sampling domain [t0,t1] x prod_i [lo_i, hi_i].
struct SpaceTimeBox {
    double t0 = 0.0;
    double t1 = 1.0;
    std::vector<double> lo;
    std::vector<double> hi;

    void validate() const;
    [[nodiscard]] int dim() const { return static_cast<int>(lo.size()); }
    [[nodiscard]] double volume() const;  // includes the time extent
    [[nodiscard]] bool contains(double t, std::span<const double> x) const;
};

struct PointSet {
    std::vector<double> times;   // m1
    std::vector<double> coords;  // m1 * d, row-major
    [[nodiscard]] std::span<const double> point(std::size_t m, int dim) const {
        return {coords.data() + m * static_cast<std::size_t>(dim), static_cast<std::size_t>(dim)};
    }
};

// m1 independent uniform draws from the box, deterministic in key.
PointSet sample_points(const SpaceTimeBox& box, int m1, RngKey key);

// Sampled points with frozen Monte-Carlo targets
//   Y_m = (1/m2) sum_n u(T, X_m + kappa W^{(m,n)}),
// every increment drawn from its own stream target_base + m*m2 + n
// (m, n 1-based), so regeneration is bit-exact and streams never collide.
struct TrainingBatch {
    int dim = 0;
    int m2 = 0;
    PointSet points;
    std::vector<double> targets;
    std::uint64_t seed = 0;
    std::uint64_t point_stream = 0;
    std::uint64_t target_seed = 0;
    std::uint64_t target_base = 0;

    [[nodiscard]] std::size_t size() const { return points.times.size(); }
    [[nodiscard]] std::uint64_t target_stream(std::size_t m, int n) const {
        return target_base + (m + 1) * static_cast<std::uint64_t>(m2) +
               static_cast<std::uint64_t>(n + 1);
    }
};

// Single Monte-Carlo target at (t, x) from m2 increments on streams
// key.stream + 1 .. key.stream + m2.
double mc_target(const ExactSolution& sol, double t, std::span<const double> x, int m2, RngKey key);

TrainingBatch build_batch(const ExactSolution& sol, const SpaceTimeBox& box, int m1, int m2,
                          RngKey key);

// CSV export with header m,t,x1..xd,y.
void write_batch_csv(const TrainingBatch& batch, std::ostream& out);

// (1/m1) sum_m |N^theta(T_m, X_m) - Y_m|^2.  The network input is the
// concatenated (t, x), so the architecture needs input width d + 1.
double loss_eval(const Architecture& arch, const ParamVector& theta, const TrainingBatch& batch,
                 Activation act);

// (1/m1) sum_m 2 (N^theta(T_m, X_m) - Y_m) grad_theta N^theta(T_m, X_m).
std::vector<double> loss_grad(const Architecture& arch, const ParamVector& theta,
                              const TrainingBatch& batch, Activation act);

// Fused pass filling grad and returning the loss; scratch buffers supplied by
// the caller so training steps do not allocate.
double loss_and_grad(const Architecture& arch, const ParamVector& theta,
                     const TrainingBatch& batch, Activation act, Workspace& ws,
                     std::vector<double>& residual_scratch, std::span<double> grad);

} // namespace dkm
