#pragma once

#include "dkm/net.hpp"
#include "dkm/rng.hpp"

#include <cstdint>
#include <string>

namespace dkm {

// Hypotheses of the growth estimate: inputs range over [a,b]^{l_0} and the
// activation satisfies |A(x)| <= c (1 + |x|^q).
struct BoundContext {
    double a = -1.0;
    double b = 1.0;
    double act_growth_c = 1.0;  // c
    double act_growth_q = 1.0;  // q
    int layer = 1;              // k in 1..L

    void validate(const Architecture& arch) const;
};

// Upper bound on max_i sup_{x in [a,b]^{l_0}} |pre-activation_i at layer k|.
// Product of three factors, each raised to max{1, q^{k-1}} (times k for the
// last two): the input-box factor, the parameter-sup factor, and the
// width/growth factor 1 + 2 max{c,1} max{l_0,...,l_{k-1}}.
double growth_bound(const Architecture& arch, const ParamVector& theta, const BoundContext& ctx);

// Upper bound on sup_{x in [a,b]^{l_0}} |N^theta(x) - N^vartheta(x)| when the
// activation is c-Lipschitz with value act_at_zero at 0.
double lipschitz_bound(const Architecture& arch, const ParamVector& theta,
                       const ParamVector& vartheta, double a, double b, double act_c,
                       double act_at_zero);

// Upper bound on ||grad_theta N^theta(x)|| over [a,b]^{l_0} for a C^1
// activation with |A'| <= act_deriv_sup.
double grad_bound(const Architecture& arch, const ParamVector& theta, double a, double b,
                  double act_deriv_sup, double act_at_zero);

struct BoundCheckReport {
    int trials = 0;
    std::uint64_t seed = 0;
    int growth_violations = 0;
    int lipschitz_violations = 0;
    int grad_violations = 0;
    double worst_ratio = 0.0;  // realized / bound, expected <= 1

    [[nodiscard]] int total_violations() const {
        return growth_violations + lipschitz_violations + grad_violations;
    }
    [[nodiscard]] std::string to_json() const;
};

// Samples random architectures (L in {2,3,4}, widths <= 16), theta uniform in
// [-2,2]^{d(l)}, and checks all three bounds against sampled suprema on
// [-1,1]^{l_0} with ReLU constants c = 1, q = 1 (A_1 for the gradient check).
BoundCheckReport check_bounds(int trials, std::uint64_t seed, int points_per_case = 10000);

} // namespace dkm
