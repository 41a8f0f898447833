#include "dkm/analysis.hpp"

#include <doctest.h>

#include "support/oracles.hpp"

#include <cmath>
#include <numbers>

using namespace dkm;

namespace {

ExactSolution quadratic_1d() { return {SolutionKind::quadratic, 1, 1.0, 1.0, {}, 1.0}; }

SpaceTimeBox unit_box_1d() { return {0.0, 1.0, {0.0}, {1.0}}; }

// Midpoint-rule oracle for int_box (u - f)^2 over [0,1] x (0,1).
double grid_l2_oracle(const ExactSolution& sol, const SpaceTimeFn& f, int n) {
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
        const double t = (i + 0.5) / n;
        for (int j = 0; j < n; ++j) {
            const std::vector<double> x{(j + 0.5) / n};
            const double r = exact_eval(sol, t, x) - f(t, x);
            acc += r * r;
        }
    }
    return acc / (static_cast<double>(n) * n);
}

} // namespace

TEST_CASE("rate_fit") {
    SUBCASE("recovers an exact inverse-sqrt law") {
        std::vector<double> a{100, 1000, 10000, 100000}, e(4), s(4, 0.0);
        for (int i = 0; i < 4; ++i) e[static_cast<std::size_t>(i)] = 10.0 / std::sqrt(a[static_cast<std::size_t>(i)]);
        const auto fit = rate_fit(a, e, s);
        CHECK(std::abs(fit.slope + 0.5) <= 1e-12);
    }
    SUBCASE("recovers the d=2 width law -2/7") {
        std::vector<double> a{4, 8, 16, 32, 64}, e(5), s(5, 0.0);
        for (int i = 0; i < 5; ++i) {
            e[static_cast<std::size_t>(i)] = 3.1 * std::pow(a[static_cast<std::size_t>(i)], -2.0 / 7.0);
        }
        const auto fit = rate_fit(a, e, s);
        CHECK(std::abs(fit.slope + 2.0 / 7.0) <= 1e-12);
    }
    SUBCASE("tolerates multiplicative noise") {
        const RngKey key{161, 0};
        std::vector<double> a, e, s;
        for (int i = 0; i < 8; ++i) {
            const double n = std::pow(4.0, i + 1);
            const double noise = 1.0 + 0.05 * (2.0 * uniform01(key, static_cast<std::uint64_t>(i)) - 1.0);
            a.push_back(n);
            e.push_back(2.0 * std::pow(n, -0.5) * noise);
            s.push_back(0.05 * e.back());
        }
        const auto fit = rate_fit(a, e, s);
        CHECK(std::abs(fit.slope + 0.5) <= 0.1);
    }
    SUBCASE("rejects bad inputs") {
        std::vector<double> two{1, 2}, e2{1, 1}, s2{0, 0};
        CHECK_THROWS(rate_fit(two, e2, s2));
        std::vector<double> a{1, 2, 3}, e{1, -1, 1}, s{0, 0, 0};
        CHECK_THROWS(rate_fit(a, e, s));
    }
}

TEST_CASE("l2_error") {
    const auto sol = quadratic_1d();
    const auto box = unit_box_1d();
    SUBCASE("the exact solution as surrogate gives exactly zero") {
        const SpaceTimeFn stub = [&](double t, std::span<const double> x) {
            return exact_eval(sol, t, x);
        };
        const auto err = l2_error(stub, sol, box, 4096, RngKey{162, 0});
        CHECK(err.estimate == 0.0);
        CHECK(err.stderr_ == 0.0);
    }
    SUBCASE("zero surrogate matches the closed form within 3 standard errors") {
        const SpaceTimeFn zero = [](double, std::span<const double>) { return 0.0; };
        // int_0^1 int_0^1 (x^2 + (1-t))^2 dx dt = 1/5 + 1/3 + 1/3 = 13/15.
        const double closed = grid_l2_oracle(sol, zero, 3000);
        CHECK(closed == doctest::Approx(13.0 / 15.0).epsilon(1e-6));
        const auto err = l2_error(zero, sol, box, 65536, RngKey{163, 0});
        CHECK(std::abs(err.estimate - closed) <= 3.0 * err.stderr_);
    }
    SUBCASE("halving the time extent halves the volume factor") {
        const SpaceTimeFn one = [](double, std::span<const double>) { return 0.0; };
        ExactSolution flat = sol;  // constant residual: use u itself minus offset
        const SpaceTimeFn off = [&](double t, std::span<const double> x) {
            return exact_eval(flat, t, x) - 1.0;  // residual identically 1
        };
        const auto full = l2_error(off, sol, box, 4096, RngKey{164, 0});
        const SpaceTimeBox half{0.0, 0.5, {0.0}, {1.0}};
        const auto halved = l2_error(off, sol, half, 4096, RngKey{164, 0});
        CHECK(full.estimate == doctest::Approx(1.0));
        CHECK(halved.estimate == doctest::Approx(0.5));
        (void)one;
    }
    SUBCASE("network overload agrees with the functional overload") {
        const Architecture arch({2, 6, 1});
        const auto theta = oracle::random_theta(arch, RngKey{165, 0});
        Workspace ws;
        const SpaceTimeFn fn = [&](double t, std::span<const double> x) {
            std::vector<double> in{t, x[0]};
            return forward_scalar(arch, theta, in, Activation{0}, ws);
        };
        const auto a = l2_error(fn, sol, box, 2048, RngKey{166, 0});
        const auto b = l2_error(arch, theta, sol, box, 2048, RngKey{166, 0});
        CHECK(a.estimate == doctest::Approx(b.estimate).epsilon(1e-12));
    }
}

TEST_CASE("sobolev_sup_estimate") {
    SUBCASE("constant one on the unit box") {
        const PointFn f = [](std::span<const double>) { return 1.0; };
        const GradFn g = [](std::span<const double>, std::span<double> out) {
            for (auto& v : out) v = 0.0;
        };
        for (int d : {1, 2, 3}) {
            const double p = std::max(2.0, static_cast<double>(d * d));
            const auto est = sobolev_sup_estimate(f, g, 0.0, 1.0, d, p, 4096, RngKey{171, 0});
            CHECK(est.lhs == doctest::Approx(1.0));
            CHECK(est.rhs == doctest::Approx(16.0 * std::sqrt(std::numbers::e)).epsilon(1e-9));
            CHECK(est.lhs <= est.rhs);
        }
    }
    SUBCASE("f(x) = x on (0,1)") {
        const PointFn f = [](std::span<const double> x) { return x[0]; };
        const GradFn g = [](std::span<const double>, std::span<double> out) { out[0] = 1.0; };
        const auto est = sobolev_sup_estimate(f, g, 0.0, 1.0, 1, 2.0, 200000, RngKey{172, 0});
        CHECK(est.lhs == doctest::Approx(1.0).epsilon(1e-3));
        // rhs = 16 sqrt(e) (1/3 + 1)^{1/2}
        CHECK(est.rhs == doctest::Approx(16.0 * std::sqrt(std::numbers::e) * std::sqrt(4.0 / 3.0))
                             .epsilon(5e-3));
    }
    SUBCASE("random smooth networks on (0,1)^2 never violate the estimate") {
        for (int t = 0; t < 100; ++t) {
            const RngKey key{173, static_cast<std::uint64_t>(t)};
            const Architecture arch({2, 6, 4, 1});
            const auto theta = oracle::random_theta(arch, key.child(1));
            Workspace ws;
            const Activation act{2};
            const PointFn f = [&](std::span<const double> x) {
                return forward_scalar(arch, theta, x, act, ws);
            };
            const GradFn g = [&](std::span<const double> x, std::span<double> out) {
                const auto gi = grad_input(arch, theta, x, act);
                std::copy(gi.begin(), gi.end(), out.begin());
            };
            const auto est = sobolev_sup_estimate(f, g, 0.0, 1.0, 2, 4.0, 2000, key.child(2));
            CHECK(est.lhs <= est.rhs);
        }
    }
    SUBCASE("p below max{2, d^2} is rejected") {
        const PointFn f = [](std::span<const double>) { return 1.0; };
        const GradFn g = [](std::span<const double>, std::span<double> out) { out[0] = 0.0; };
        CHECK_THROWS(sobolev_sup_estimate(f, g, 0.0, 1.0, 3, 4.0, 1000, RngKey{}));
    }
}

TEST_CASE("generalization_gap fits an m1 power law (light configuration)") {
    const Architecture arch({2, 8, 1});
    const auto sol = quadratic_1d();
    const auto box = unit_box_1d();
    const std::vector<int> m1s{128, 512, 2048};
    const auto fit = generalization_gap(arch, box, sol, 12, m1s, 1024, RngKey{181, 0}, 1.0, 6);
    CHECK(fit.slope <= -0.2);
    CHECK(fit.slope >= -0.8);
    CHECK(fit.errors.size() == 3);
    for (double e : fit.errors) CHECK(e > 0.0);
}

TEST_CASE("generalization_gap sup never shrinks when the theta set grows") {
    // The theta set is nested in sample_count by construction, so the sup
    // gap is monotone at every abscissa for identical keys.
    const Architecture arch({2, 6, 1});
    const auto sol = quadratic_1d();
    const auto box = unit_box_1d();
    const std::vector<int> m1s{64, 128, 256};
    const RngKey key{183, 0};
    const auto small = generalization_gap(arch, box, sol, 8, m1s, 64, key, 1.0, 3);
    const auto large = generalization_gap(arch, box, sol, 16, m1s, 64, key, 1.0, 3);
    for (std::size_t i = 0; i < small.errors.size(); ++i) {
        CHECK(large.errors[i] >= small.errors[i]);
    }
}

TEST_CASE("generalization_gap with one zero network reduces to plain MC deviation") {
    const Architecture arch({2, 4, 1});
    const auto sol = quadratic_1d();
    const auto box = unit_box_1d();
    // S = 1, theta radius 0: the only theta is 0, so N = 0 and the gap is
    // |mean Y^2 - reference mean u^2|.
    const std::vector<int> m1s{64, 256, 1024};
    const auto fit = generalization_gap(arch, box, sol, 1, m1s, 64, RngKey{182, 0}, 0.0, 4);
    for (double e : fit.errors) {
        CHECK(e >= 0.0);
        CHECK(e < 1.0);
    }
}

TEST_CASE("decomposition_report") {
    TrainConfig cfg;
    cfg.arch = Architecture({2, 32, 16, 1});
    cfg.m1 = 4096;
    cfg.seed = 99;
    const L2Error measured{1.25e-3, 3e-5};
    OptErrorProxy proxy;
    proxy.best_loss = 0.01;
    proxy.restart_losses = {0.01, 0.012, 0.011};
    proxy.proxy = 0.001;
    const auto report = decomposition_report(cfg, 1, measured, proxy, std::nullopt, std::nullopt);
    CHECK(report.m1_scale == doctest::Approx(1.0 / 64.0));
    CHECK(report.width_scale == doctest::Approx(std::pow(16.0, -2.0 / 6.0)));
    CHECK(report.opt_proxy == doctest::Approx(0.001));
    CHECK(report.opt_restarts == 3);
    CHECK(report.measured.estimate >= 0.0);

    SUBCASE("JSON marks the scaling constants unidentified and echoes the config") {
        const auto json = report.to_json();
        CHECK(json.find("unidentified theory constant") != std::string::npos);
        const auto echoed = train_config_from_json(train_config_to_json(cfg));
        CHECK(echoed == cfg);
    }
}

TEST_CASE("spearman_rho") {
    const std::vector<double> x{1, 2, 3, 4, 5};
    const std::vector<double> down{10, 8, 6, 4, 2};
    const std::vector<double> up{1, 2, 3, 4, 5};
    CHECK(spearman_rho(x, down) == doctest::Approx(-1.0));
    CHECK(spearman_rho(x, up) == doctest::Approx(1.0));
    const std::vector<double> one_swap{10, 8, 6, 2, 4};
    CHECK(spearman_rho(x, one_swap) == doctest::Approx(-0.9));
}
