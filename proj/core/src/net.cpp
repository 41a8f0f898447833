#include "dkm/net.hpp"

#include <stdexcept>
#include <string>

namespace dkm {

Architecture::Architecture(std::vector<int> w) : widths(std::move(w)) {
    if (widths.size() < 2) throw std::invalid_argument("architecture needs at least two layers");
    for (int v : widths) {
        if (v < 1) throw std::invalid_argument("architecture widths must be positive");
    }
}

int Architecture::max_width() const {
    int m = 0;
    for (int v : widths) m = v > m ? v : m;
    return m;
}

std::size_t param_count(const Architecture& arch) {
    std::size_t n = 0;
    for (int k = 0; k < arch.depth(); ++k) {
        n += static_cast<std::size_t>(arch.widths[k + 1]) *
             static_cast<std::size_t>(arch.widths[k] + 1);
    }
    return n;
}

std::vector<std::size_t> layer_offsets(const Architecture& arch) {
    std::vector<std::size_t> d(arch.widths.size());
    d[0] = 0;
    for (int k = 0; k < arch.depth(); ++k) {
        d[k + 1] = d[k] + static_cast<std::size_t>(arch.widths[k + 1]) *
                              static_cast<std::size_t>(arch.widths[k] + 1);
    }
    return d;
}

namespace {

std::size_t offset_before(const Architecture& arch, int k) {
    std::size_t d = 0;
    for (int h = 0; h < k; ++h) {
        d += static_cast<std::size_t>(arch.widths[h + 1]) *
             static_cast<std::size_t>(arch.widths[h] + 1);
    }
    return d;
}

void check_transition(const Architecture& arch, int k) {
    if (k < 0 || k >= arch.depth()) throw std::invalid_argument("layer index out of range");
}

} // namespace

std::size_t weight_index(const Architecture& arch, int k, int i, int j) {
    check_transition(arch, k);
    if (i < 0 || i >= arch.widths[k + 1] || j < 0 || j >= arch.widths[k]) {
        throw std::invalid_argument("weight index out of range");
    }
    return offset_before(arch, k) +
           static_cast<std::size_t>(i) * static_cast<std::size_t>(arch.widths[k]) +
           static_cast<std::size_t>(j);
}

std::size_t bias_index(const Architecture& arch, int k, int i) {
    check_transition(arch, k);
    if (i < 0 || i >= arch.widths[k + 1]) throw std::invalid_argument("bias index out of range");
    return offset_before(arch, k) +
           static_cast<std::size_t>(arch.widths[k + 1]) * static_cast<std::size_t>(arch.widths[k]) +
           static_cast<std::size_t>(i);
}

ActivationValue smooth_activation(int n, double x) {
    if (n < 0) throw std::invalid_argument("activation index must be nonnegative");
    const Activation act{n};
    return {act.value(x), act.deriv(x)};
}

namespace {

void check_dims(const Architecture& arch, const ParamVector& theta, std::span<const double> x) {
    if (theta.size() != param_count(arch)) {
        throw std::invalid_argument("parameter vector has length " + std::to_string(theta.size()) +
                                    ", expected " + std::to_string(param_count(arch)));
    }
    if (x.size() != static_cast<std::size_t>(arch.input_width())) {
        throw std::invalid_argument("input has length " + std::to_string(x.size()) + ", expected " +
                                    std::to_string(arch.input_width()));
    }
}

void prepare(const Architecture& arch, Workspace& ws) {
    const auto layers = static_cast<std::size_t>(arch.depth());
    ws.pre.resize(layers);
    ws.post.resize(layers);
    for (std::size_t k = 0; k < layers; ++k) {
        ws.pre[k].resize(static_cast<std::size_t>(arch.widths[k + 1]));
        ws.post[k].resize(static_cast<std::size_t>(arch.widths[k + 1]));
    }
}

// Fixed-order dot product with four accumulators; deterministic and keeps the
// dependency chain short enough to vectorize without fast-math.
double dot(const double* w, const double* x, std::size_t n) {
    double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
    std::size_t j = 0;
    for (; j + 4 <= n; j += 4) {
        s0 += w[j] * x[j];
        s1 += w[j + 1] * x[j + 1];
        s2 += w[j + 2] * x[j + 2];
        s3 += w[j + 3] * x[j + 3];
    }
    for (; j < n; ++j) s0 += w[j] * x[j];
    return (s0 + s1) + (s2 + s3);
}

} // namespace

std::span<const double> forward(const Architecture& arch, const ParamVector& theta,
                                std::span<const double> x, Activation act, Workspace& ws) {
    check_dims(arch, theta, x);
    prepare(arch, ws);
    const double* p = theta.data();
    const double* in = x.data();
    std::size_t off = 0;
    const int depth = arch.depth();
    for (int k = 0; k < depth; ++k) {
        const auto rows = static_cast<std::size_t>(arch.widths[k + 1]);
        const auto cols = static_cast<std::size_t>(arch.widths[k]);
        double* pre = ws.pre[static_cast<std::size_t>(k)].data();
        const double* bias = p + off + rows * cols;
        for (std::size_t i = 0; i < rows; ++i) {
            pre[i] = bias[i] + dot(p + off + i * cols, in, cols);
        }
        off += rows * (cols + 1);
        if (k + 1 < depth) {
            double* post = ws.post[static_cast<std::size_t>(k)].data();
            for (std::size_t i = 0; i < rows; ++i) post[i] = act.value(pre[i]);
            in = post;
        }
    }
    return {ws.pre.back().data(), ws.pre.back().size()};
}

double forward_scalar(const Architecture& arch, const ParamVector& theta,
                      std::span<const double> x, Activation act, Workspace& ws) {
    if (arch.output_width() != 1) throw std::invalid_argument("scalar forward needs output width 1");
    return forward(arch, theta, x, act, ws)[0];
}

ForwardResult forward(const Architecture& arch, const ParamVector& theta,
                      std::span<const double> x, Activation act) {
    Workspace ws;
    auto out = forward(arch, theta, x, act, ws);
    return {std::vector<double>(out.begin(), out.end()), ws.pre};
}

void accumulate_grad_theta(const Architecture& arch, const ParamVector& theta,
                           std::span<const double> x, Activation act, Workspace& ws,
                           double coeff, std::span<double> grad) {
    if (arch.output_width() != 1) throw std::invalid_argument("grad_theta needs output width 1");
    if (grad.size() != theta.size()) throw std::invalid_argument("gradient buffer size mismatch");
    const int depth = arch.depth();
    const double* p = theta.data();
    auto& delta = ws.delta;
    auto& delta_prev = ws.delta_prev;
    delta.assign(1, coeff);
    std::size_t off = param_count(arch);
    for (int k = depth - 1; k >= 0; --k) {
        const auto rows = static_cast<std::size_t>(arch.widths[k + 1]);
        const auto cols = static_cast<std::size_t>(arch.widths[k]);
        off -= rows * (cols + 1);
        const double* in = (k == 0) ? x.data() : ws.post[static_cast<std::size_t>(k - 1)].data();
        double* gw = grad.data() + off;
        double* gb = gw + rows * cols;
        for (std::size_t i = 0; i < rows; ++i) {
            const double d = delta[i];
            double* g = gw + i * cols;
            for (std::size_t j = 0; j < cols; ++j) g[j] += d * in[j];
            gb[i] += d;
        }
        if (k > 0) {
            const double* pre_prev = ws.pre[static_cast<std::size_t>(k - 1)].data();
            delta_prev.assign(cols, 0.0);
            for (std::size_t i = 0; i < rows; ++i) {
                const double d = delta[i];
                const double* w = p + off + i * cols;
                for (std::size_t j = 0; j < cols; ++j) delta_prev[j] += d * w[j];
            }
            for (std::size_t j = 0; j < cols; ++j) delta_prev[j] *= act.deriv(pre_prev[j]);
            delta.swap(delta_prev);
        }
    }
}

ParamVector grad_theta(const Architecture& arch, const ParamVector& theta,
                       std::span<const double> x, Activation act) {
    Workspace ws;
    forward(arch, theta, x, act, ws);
    ParamVector grad(theta.size(), 0.0);
    accumulate_grad_theta(arch, theta, x, act, ws, 1.0, grad);
    return grad;
}

std::vector<double> grad_input(const Architecture& arch, const ParamVector& theta,
                               std::span<const double> x, Activation act) {
    if (arch.output_width() != 1) throw std::invalid_argument("grad_input needs output width 1");
    Workspace ws;
    forward(arch, theta, x, act, ws);
    const int depth = arch.depth();
    const double* p = theta.data();
    std::vector<double> delta(1, 1.0);
    std::vector<double> delta_prev;
    std::size_t off = param_count(arch);
    for (int k = depth - 1; k >= 0; --k) {
        const auto rows = static_cast<std::size_t>(arch.widths[k + 1]);
        const auto cols = static_cast<std::size_t>(arch.widths[k]);
        off -= rows * (cols + 1);
        delta_prev.assign(cols, 0.0);
        for (std::size_t i = 0; i < rows; ++i) {
            const double d = delta[i];
            const double* w = p + off + i * cols;
            for (std::size_t j = 0; j < cols; ++j) delta_prev[j] += d * w[j];
        }
        if (k > 0) {
            const double* pre_prev = ws.pre[static_cast<std::size_t>(k - 1)].data();
            for (std::size_t j = 0; j < cols; ++j) delta_prev[j] *= act.deriv(pre_prev[j]);
        }
        delta.swap(delta_prev);
    }
    return delta;
}

} // namespace dkm
