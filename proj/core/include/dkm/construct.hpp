#pragma once

#include "dkm/net.hpp"

#include <iosfwd>
#include <string>

namespace dkm {

// Single-hidden-layer net (d, m, 1).
struct ShallowNet {
    Architecture arch;
    ParamVector params;

    ShallowNet() = default;
    ShallowNet(Architecture a, ParamVector p);

    [[nodiscard]] int input_width() const { return arch.input_width(); }
    [[nodiscard]] int hidden_width() const { return arch.widths[1]; }
};

// The (1,2,1) net with parameters (1,-1,0,0,1,-1,0), whose ReLU realization
// is x -> relu(x) - relu(-x) = x on all of R.
ShallowNet identity_net();

// Embeds a shallow net into a deeper architecture without changing the
// realization anywhere on R^d.  The shallow scalar output s is formed at deep
// layer 2 and carried through the remaining hidden layers as the pair
// (relu(s), relu(-s)), recombined with weights (1, -1).  Requires the deep
// architecture to have the same input width, output width 1, first hidden
// width >= the shallow hidden width, and width >= 2 on later hidden layers.
// Entry magnitudes never exceed max{1, max_i |params_i|}.
ParamVector embed_shallow_to_deep(const ShallowNet& shallow, const Architecture& deep_arch);

// Reparametrizes a shallow net given on [-1,1]^d so that the result evaluated
// at y in [a,b]^d equals the input evaluated at x = (2y - (a+b)1)/(b-a).
// Only first-layer weights (scaled by 2/(b-a)) and first-layer biases change.
ShallowNet affine_rescale(const ShallowNet& shallow, double a, double b);

// Exact algebraic inverse of affine_rescale with the same (a, b).
ShallowNet affine_rescale_inverse(const ShallowNet& rescaled, double a, double b);

// JSON document {"widths": [...], "params": [...]}.
std::string network_to_json(const Architecture& arch, const ParamVector& params);
void save_network(const Architecture& arch, const ParamVector& params, const std::string& path);
std::pair<Architecture, ParamVector> network_from_json(const std::string& text);
std::pair<Architecture, ParamVector> load_network(const std::string& path);

} // namespace dkm
