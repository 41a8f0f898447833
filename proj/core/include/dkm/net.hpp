#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace dkm {

// Layer-width vector (l_0, ..., l_L), L >= 1.  All widths >= 1.
struct Architecture {
    std::vector<int> widths;

    Architecture() = default;
    explicit Architecture(std::vector<int> w);

    [[nodiscard]] int depth() const { return static_cast<int>(widths.size()) - 1; }
    [[nodiscard]] int input_width() const { return widths.front(); }
    [[nodiscard]] int output_width() const { return widths.back(); }
    [[nodiscard]] int max_width() const;
};

// Flat parameter vector in the row-major per-layer layout: for transition k
// (0-based, from layer k to layer k+1) the weight for output i, input j sits
// at offset(k) + i*l_k + j and the bias for output i at
// offset(k) + l_{k+1}*l_k + i.
using ParamVector = std::vector<double>;

std::size_t param_count(const Architecture& arch);

// Cumulative per-layer offsets (d_0, ..., d_L); d_0 = 0, d_L = param_count.
std::vector<std::size_t> layer_offsets(const Architecture& arch);

// Flat index of the weight (transition k, output i, input j), all 0-based.
std::size_t weight_index(const Architecture& arch, int k, int i, int j);
// Flat index of the bias (transition k, output i).
std::size_t bias_index(const Architecture& arch, int k, int i);

// Activation family indexed by n.  n = 0 is exact ReLU with the subgradient
// convention A'(0) = 0.  For n >= 1, A_n is the C^1 piecewise-quadratic
// smoothing: 0 on (-inf,0], n x^2/2 on [0,1/n], x - 1/(2n) on [1/n,inf).
// |A_n'| <= 1 everywhere and A_n -> ReLU pointwise as n -> inf.
struct Activation {
    int n = 0;

    [[nodiscard]] double value(double x) const {
        if (n == 0) return x > 0.0 ? x : 0.0;
        if (x <= 0.0) return 0.0;
        const double inv = 1.0 / static_cast<double>(n);
        if (x >= inv) return x - 0.5 * inv;
        return 0.5 * static_cast<double>(n) * x * x;
    }
    [[nodiscard]] double deriv(double x) const {
        if (n == 0) return x > 0.0 ? 1.0 : 0.0;
        if (x <= 0.0) return 0.0;
        const double nx = static_cast<double>(n) * x;
        return nx >= 1.0 ? 1.0 : nx;
    }
};

struct ActivationValue {
    double value;
    double derivative;
};

// (A_n(x), A_n'(x)) in one call.
ActivationValue smooth_activation(int n, double x);

// Per-sample evaluation state.  pre[k] holds the layer-(k+1) pre-activations,
// post[k] the corresponding activations (post is not filled for the output
// layer).  Reused across samples to avoid reallocation.
struct Workspace {
    std::vector<std::vector<double>> pre;
    std::vector<std::vector<double>> post;
    std::vector<double> delta;
    std::vector<double> delta_prev;
    std::vector<double> input;
};

// Runs the affine/activation recursion, filling ws.pre and ws.post.
// Returns the output layer values (a view into ws.pre.back()).
std::span<const double> forward(const Architecture& arch, const ParamVector& theta,
                                std::span<const double> x, Activation act, Workspace& ws);

// Convenience scalar forward for nets with output width 1.
double forward_scalar(const Architecture& arch, const ParamVector& theta,
                      std::span<const double> x, Activation act, Workspace& ws);

// One-shot forward returning output and all hidden pre-activations.
struct ForwardResult {
    std::vector<double> output;
    std::vector<std::vector<double>> pre;
};
ForwardResult forward(const Architecture& arch, const ParamVector& theta,
                      std::span<const double> x, Activation act);

// Adds coeff * dN/dtheta at x to grad.  Requires a Workspace filled by a
// preceding forward() call for the same (theta, x) and scalar output.
void accumulate_grad_theta(const Architecture& arch, const ParamVector& theta,
                           std::span<const double> x, Activation act, Workspace& ws,
                           double coeff, std::span<double> grad);

// Reverse-mode parameter gradient of the scalar realization at x.
ParamVector grad_theta(const Architecture& arch, const ParamVector& theta,
                       std::span<const double> x, Activation act);

// Gradient of the scalar realization with respect to the input x.
std::vector<double> grad_input(const Architecture& arch, const ParamVector& theta,
                               std::span<const double> x, Activation act);

} // namespace dkm
