#pragma once

#include <cmath>
#include <cstddef>
#include <span>

namespace dkm {

// Fixed-order pairwise summation.  Deterministic for a given input order and
// better conditioned than a running sum on long accumulations.
inline double pairwise_sum(std::span<const double> v) {
    if (v.size() <= 16) {
        double s = 0.0;
        for (double x : v) s += x;
        return s;
    }
    const std::size_t half = v.size() / 2;
    return pairwise_sum(v.subspan(0, half)) + pairwise_sum(v.subspan(half));
}

struct MeanStderr {
    double mean = 0.0;
    double stderr_ = 0.0;
};

// Sample mean and standard error of the mean.
inline MeanStderr mean_stderr(std::span<const double> v) {
    const auto n = static_cast<double>(v.size());
    const double mean = pairwise_sum(v) / n;
    if (v.size() < 2) return {mean, 0.0};
    double ss = 0.0;
    for (double x : v) {
        const double d = x - mean;
        ss += d * d;
    }
    return {mean, std::sqrt(ss / (n - 1.0) / n)};
}

} // namespace dkm
