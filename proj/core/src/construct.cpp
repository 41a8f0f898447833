#include "dkm/construct.hpp"

#include <nlohmann/json.hpp>

#include <fstream>
#include <stdexcept>

namespace dkm {

ShallowNet::ShallowNet(Architecture a, ParamVector p) : arch(std::move(a)), params(std::move(p)) {
    if (arch.depth() != 2) throw std::invalid_argument("shallow net needs exactly one hidden layer");
    if (arch.output_width() != 1) throw std::invalid_argument("shallow net needs output width 1");
    if (params.size() != param_count(arch)) throw std::invalid_argument("shallow net parameter length mismatch");
}

ShallowNet identity_net() {
    return {Architecture({1, 2, 1}), {1.0, -1.0, 0.0, 0.0, 1.0, -1.0, 0.0}};
}

ParamVector embed_shallow_to_deep(const ShallowNet& shallow, const Architecture& deep_arch) {
    const int L = deep_arch.depth();
    const int d = shallow.input_width();
    const int m = shallow.hidden_width();
    if (L < 2) throw std::invalid_argument("deep architecture needs depth >= 2");
    if (deep_arch.input_width() != d) throw std::invalid_argument("input width mismatch");
    if (deep_arch.output_width() != 1) throw std::invalid_argument("deep architecture needs output width 1");
    if (deep_arch.widths[1] < m) throw std::invalid_argument("first hidden layer narrower than shallow net");
    for (int k = 2; k < L; ++k) {
        if (deep_arch.widths[static_cast<std::size_t>(k)] < 2) {
            throw std::invalid_argument("hidden layers beyond the first need width >= 2");
        }
    }

    ParamVector theta(param_count(deep_arch), 0.0);
    const auto& sp = shallow.params;
    const auto& sarch = shallow.arch;

    // Layer 1: shallow hidden layer, zero-padded.
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < d; ++j) {
            theta[weight_index(deep_arch, 0, i, j)] = sp[weight_index(sarch, 0, i, j)];
        }
        theta[bias_index(deep_arch, 0, i)] = sp[bias_index(sarch, 0, i)];
    }

    if (L == 2) {
        for (int j = 0; j < m; ++j) {
            theta[weight_index(deep_arch, 1, 0, j)] = sp[weight_index(sarch, 1, 0, j)];
        }
        theta[bias_index(deep_arch, 1, 0)] = sp[bias_index(sarch, 1, 0)];
        return theta;
    }

    // Layer 2: form s and -s from the shallow output map.
    for (int j = 0; j < m; ++j) {
        const double w = sp[weight_index(sarch, 1, 0, j)];
        theta[weight_index(deep_arch, 1, 0, j)] = w;
        theta[weight_index(deep_arch, 1, 1, j)] = -w;
    }
    const double sb = sp[bias_index(sarch, 1, 0)];
    theta[bias_index(deep_arch, 1, 0)] = sb;
    theta[bias_index(deep_arch, 1, 1)] = -sb;

    // Layers 3..L-1: carry (relu(s), relu(-s)) forward unchanged.
    for (int k = 2; k < L - 1; ++k) {
        theta[weight_index(deep_arch, k, 0, 0)] = 1.0;
        theta[weight_index(deep_arch, k, 0, 1)] = -1.0;
        theta[weight_index(deep_arch, k, 1, 0)] = -1.0;
        theta[weight_index(deep_arch, k, 1, 1)] = 1.0;
    }

    // Output layer: recombine the pair.
    theta[weight_index(deep_arch, L - 1, 0, 0)] = 1.0;
    theta[weight_index(deep_arch, L - 1, 0, 1)] = -1.0;
    return theta;
}

ShallowNet affine_rescale(const ShallowNet& shallow, double a, double b) {
    if (!(b > a)) throw std::invalid_argument("affine_rescale needs b > a");
    const int d = shallow.input_width();
    const int m = shallow.hidden_width();
    const double scale = 2.0 / (b - a);
    const double center = 0.5 * (a + b);
    ParamVector p = shallow.params;
    const auto& arch = shallow.arch;
    for (int i = 0; i < m; ++i) {
        double row_sum = 0.0;
        for (int j = 0; j < d; ++j) {
            auto& w = p[weight_index(arch, 0, i, j)];
            w = scale * w;
            row_sum += w;
        }
        p[bias_index(arch, 0, i)] -= center * row_sum;
    }
    return {arch, std::move(p)};
}

ShallowNet affine_rescale_inverse(const ShallowNet& rescaled, double a, double b) {
    if (!(b > a)) throw std::invalid_argument("affine_rescale_inverse needs b > a");
    const int d = rescaled.input_width();
    const int m = rescaled.hidden_width();
    const double scale = 2.0 / (b - a);
    const double center = 0.5 * (a + b);
    ParamVector p = rescaled.params;
    const auto& arch = rescaled.arch;
    for (int i = 0; i < m; ++i) {
        double row_sum = 0.0;
        for (int j = 0; j < d; ++j) {
            auto& w = p[weight_index(arch, 0, i, j)];
            row_sum += w;
            w = w / scale;
        }
        p[bias_index(arch, 0, i)] += center * row_sum;
    }
    return {arch, std::move(p)};
}

std::string network_to_json(const Architecture& arch, const ParamVector& params) {
    if (params.size() != param_count(arch)) throw std::invalid_argument("parameter length mismatch");
    nlohmann::json j;
    j["widths"] = arch.widths;
    j["params"] = params;
    return j.dump(2);
}

void save_network(const Architecture& arch, const ParamVector& params, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out << network_to_json(arch, params) << '\n';
}

std::pair<Architecture, ParamVector> network_from_json(const std::string& text) {
    const auto j = nlohmann::json::parse(text);
    Architecture arch(j.at("widths").get<std::vector<int>>());
    ParamVector params = j.at("params").get<std::vector<double>>();
    if (params.size() != param_count(arch)) throw std::invalid_argument("network document parameter length mismatch");
    return {std::move(arch), std::move(params)};
}

std::pair<Architecture, ParamVector> load_network(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return network_from_json(text);
}

} // namespace dkm
