#include "dkm/batch.hpp"

#include "dkm/numeric.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

namespace dkm {

namespace {
constexpr std::uint64_t kTagPoints = 0x706f696e74ULL;   // "point"
constexpr std::uint64_t kTagTargets = 0x746172676574ULL;  // "target"
} // namespace

void SpaceTimeBox::validate() const {
    if (lo.size() != hi.size() || lo.empty()) throw std::invalid_argument("box needs matching lo/hi ranges");
    if (!(t0 < t1)) throw std::invalid_argument("box needs t0 < t1");
    for (std::size_t i = 0; i < lo.size(); ++i) {
        if (!(lo[i] < hi[i])) throw std::invalid_argument("box needs lo < hi in every coordinate");
    }
}

double SpaceTimeBox::volume() const {
    double v = t1 - t0;
    for (std::size_t i = 0; i < lo.size(); ++i) v *= hi[i] - lo[i];
    return v;
}

bool SpaceTimeBox::contains(double t, std::span<const double> x) const {
    if (t < t0 || t > t1 || x.size() != lo.size()) return false;
    for (std::size_t i = 0; i < lo.size(); ++i) {
        if (x[i] < lo[i] || x[i] > hi[i]) return false;
    }
    return true;
}

PointSet sample_points(const SpaceTimeBox& box, int m1, RngKey key) {
    box.validate();
    if (m1 < 1) throw std::invalid_argument("sample_points needs m1 >= 1");
    const auto d = static_cast<std::size_t>(box.dim());
    PointSet set;
    set.times.resize(static_cast<std::size_t>(m1));
    set.coords.resize(static_cast<std::size_t>(m1) * d);
    const std::uint64_t stride = d + 1;
    for (std::size_t m = 0; m < set.times.size(); ++m) {
        const std::uint64_t base = m * stride;
        set.times[m] = uniform_in(key, base, box.t0, box.t1);
        for (std::size_t c = 0; c < d; ++c) {
            set.coords[m * d + c] = uniform_in(key, base + 1 + c, box.lo[c], box.hi[c]);
        }
    }
    return set;
}

double mc_target(const ExactSolution& sol, double t, std::span<const double> x, int m2, RngKey key) {
    if (m2 < 1) throw std::invalid_argument("mc_target needs m2 >= 1");
    const double dt = sol.horizon - t;
    if (dt < 0.0) throw std::invalid_argument("target time beyond the horizon");
    if (dt == 0.0) return exact_eval(sol, t, x);  // zero-time increment: every sample is u(T, x)
    const double s = sol.kappa * std::sqrt(dt);
    const auto d = static_cast<std::size_t>(sol.dim);
    std::vector<double> w(d);
    std::vector<double> y(d);
    double acc = 0.0;
    for (int n = 0; n < m2; ++n) {
        normal_fill(key.with_stream(key.stream + 1 + static_cast<std::uint64_t>(n)), 0, w.data(), d);
        for (std::size_t c = 0; c < d; ++c) y[c] = x[c] + s * w[c];
        acc += exact_eval(sol, sol.horizon, y);
    }
    return acc / static_cast<double>(m2);
}

TrainingBatch build_batch(const ExactSolution& sol, const SpaceTimeBox& box, int m1, int m2,
                          RngKey key) {
    sol.validate();
    box.validate();
    if (box.dim() != sol.dim) throw std::invalid_argument("box and solution dimension mismatch");
    if (m1 < 1 || m2 < 1) throw std::invalid_argument("build_batch needs m1, m2 >= 1");
    if (box.t1 > sol.horizon) throw std::invalid_argument("box extends beyond the horizon");

    TrainingBatch batch;
    batch.dim = sol.dim;
    batch.m2 = m2;
    batch.seed = key.seed;
    const RngKey point_key = key.child(kTagPoints);
    const RngKey target_key = key.child(kTagTargets);
    batch.point_stream = point_key.stream;
    batch.target_seed = target_key.seed;
    batch.target_base = target_key.stream;
    batch.points = sample_points(box, m1, point_key);

    const auto d = static_cast<std::size_t>(sol.dim);
    const double k = sol.kappa;
    std::vector<double> w(d);
    std::vector<double> y(d);
    batch.targets.resize(static_cast<std::size_t>(m1));
    for (std::size_t m = 0; m < batch.targets.size(); ++m) {
        const double dt = sol.horizon - batch.points.times[m];
        const double* x = batch.points.coords.data() + m * d;
        if (dt == 0.0) {
            batch.targets[m] = exact_eval(sol, sol.horizon, {x, d});
            continue;
        }
        const double s = k * std::sqrt(dt);
        double acc = 0.0;
        for (int n = 0; n < m2; ++n) {
            const RngKey inc{target_key.seed, batch.target_stream(m, n)};
            normal_fill(inc, 0, w.data(), d);
            for (std::size_t c = 0; c < d; ++c) y[c] = x[c] + s * w[c];
            acc += exact_eval(sol, sol.horizon, y);
        }
        batch.targets[m] = acc / static_cast<double>(m2);
    }
    return batch;
}

void write_batch_csv(const TrainingBatch& batch, std::ostream& out) {
    out << "m,t";
    for (int c = 1; c <= batch.dim; ++c) out << ",x" << c;
    out << ",y\n";
    char buf[32];
    const auto d = static_cast<std::size_t>(batch.dim);
    for (std::size_t m = 0; m < batch.size(); ++m) {
        out << (m + 1);
        std::snprintf(buf, sizeof buf, "%.17g", batch.points.times[m]);
        out << ',' << buf;
        for (std::size_t c = 0; c < d; ++c) {
            std::snprintf(buf, sizeof buf, "%.17g", batch.points.coords[m * d + c]);
            out << ',' << buf;
        }
        std::snprintf(buf, sizeof buf, "%.17g", batch.targets[m]);
        out << ',' << buf << '\n';
    }
}

namespace {

void check_loss_dims(const Architecture& arch, const TrainingBatch& batch) {
    if (arch.input_width() != batch.dim + 1) {
        throw std::invalid_argument("loss needs a network with input width d + 1");
    }
    if (arch.output_width() != 1) throw std::invalid_argument("loss needs a scalar network");
}

} // namespace

double loss_eval(const Architecture& arch, const ParamVector& theta, const TrainingBatch& batch,
                 Activation act) {
    check_loss_dims(arch, batch);
    Workspace ws;
    const auto d = static_cast<std::size_t>(batch.dim);
    std::vector<double> in(d + 1);
    std::vector<double> sq(batch.size());
    for (std::size_t m = 0; m < batch.size(); ++m) {
        in[0] = batch.points.times[m];
        for (std::size_t c = 0; c < d; ++c) in[1 + c] = batch.points.coords[m * d + c];
        const double r = forward_scalar(arch, theta, in, act, ws) - batch.targets[m];
        sq[m] = r * r;
    }
    return pairwise_sum(sq) / static_cast<double>(batch.size());
}

double loss_and_grad(const Architecture& arch, const ParamVector& theta,
                     const TrainingBatch& batch, Activation act, Workspace& ws,
                     std::vector<double>& residual_scratch, std::span<double> grad) {
    check_loss_dims(arch, batch);
    if (grad.size() != theta.size()) throw std::invalid_argument("gradient buffer size mismatch");
    const auto d = static_cast<std::size_t>(batch.dim);
    const auto m1 = batch.size();
    std::fill(grad.begin(), grad.end(), 0.0);
    residual_scratch.resize(m1);
    ws.input.resize(d + 1);
    for (std::size_t m = 0; m < m1; ++m) {
        ws.input[0] = batch.points.times[m];
        for (std::size_t c = 0; c < d; ++c) ws.input[1 + c] = batch.points.coords[m * d + c];
        const double r = forward_scalar(arch, theta, ws.input, act, ws) - batch.targets[m];
        residual_scratch[m] = r * r;
        accumulate_grad_theta(arch, theta, ws.input, act, ws, 2.0 * r, grad);
    }
    const double inv = 1.0 / static_cast<double>(m1);
    for (auto& g : grad) g *= inv;
    return pairwise_sum(residual_scratch) * inv;
}

std::vector<double> loss_grad(const Architecture& arch, const ParamVector& theta,
                              const TrainingBatch& batch, Activation act) {
    Workspace ws;
    std::vector<double> scratch;
    std::vector<double> grad(theta.size(), 0.0);
    loss_and_grad(arch, theta, batch, act, ws, scratch, grad);
    return grad;
}

} // namespace dkm
