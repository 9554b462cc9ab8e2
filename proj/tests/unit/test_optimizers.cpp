// Copyright 2026 The VQH Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "vqh/error.hpp"
#include "vqh/optimizers.hpp"
#include "vqh/qubo.hpp"
#include "vqh/statevector.hpp"

using namespace vqh;
using std::numbers::pi;

TEST_SUITE("spsa") {
    TEST_CASE("gains follow the power schedules") {
        SpsaSettings s;
        CHECK(spsa_gain_a(s, 0) == doctest::Approx(0.2 / std::pow(11.0, 0.602)));
        CHECK(spsa_gain_c(s, 9) == doctest::Approx(0.1 / std::pow(10.0, 0.101)));
    }

    TEST_CASE("1-parameter quadratic moves toward the minimum on >= 90 of 100 seeds") {
        const double target = 0.8;
        const Objective f = [&](std::span<const double> x) {
            return (x[0] - target) * (x[0] - target);
        };
        int toward = 0;
        for (std::uint64_t seed = 0; seed < 100; ++seed) {
            std::mt19937_64 rng(seed);
            const std::vector<double> x0{-1.0};
            const auto x1 = spsa_iteration(x0, f, {}, 0, rng);
            if (std::abs(x1[0] - target) < std::abs(x0[0] - target))
                ++toward;
        }
        CHECK(toward >= 90);
    }

    TEST_CASE("zero gain leaves parameters unchanged") {
        SpsaSettings s;
        s.a = 0.0;
        std::mt19937_64 rng(1);
        const std::vector<double> x0{0.3, -0.2, 1.5};
        const Objective f = [](std::span<const double> x) { return x[0] + 2 * x[1] * x[2]; };
        CHECK(spsa_iteration(x0, f, s, 3, rng) == x0);
    }

    TEST_CASE("identical seeds give identical trajectories") {
        const Objective f = [](std::span<const double> x) {
            return std::sin(x[0]) + std::cos(2 * x[1]) * x[2];
        };
        OptimizerConfig cfg;
        cfg.kind = OptimizerKind::spsa;
        cfg.seed = 42;
        auto run = [&] {
            auto opt = make_optimizer(cfg, 3);
            std::vector<double> x{0.1, 0.2, 0.3};
            std::vector<std::vector<double>> path;
            for (int i = 0; i < 30; ++i) {
                x = opt->propose(x, f(x), f).params;
                path.push_back(x);
            }
            return path;
        };
        CHECK(run() == run());
        auto other = cfg;
        other.seed = 43;
        auto opt = make_optimizer(other, 3);
        std::vector<double> x{0.1, 0.2, 0.3};
        CHECK(opt->propose(x, f(x), f).params != run().front());
    }
}

TEST_SUITE("nft") {
    TEST_CASE("cosine surrogate jumps to pi") {
        const Objective f = [](std::span<const double> x) { return std::cos(x[0]); };
        const auto x = nft_parameter_update(std::vector<double>{0.0}, f, 0);
        CHECK(std::abs(std::abs(x[0]) - pi) < 1e-12);
        CHECK(f(x) == doctest::Approx(-1.0));
    }

    TEST_CASE("fit reproduces an arbitrary sinusoid") {
        const double A = 0.7, B = -1.3, phi = 0.4;
        auto e = [&](double t) { return A + B * std::cos(t - phi); };
        const double t0 = 2.1;
        const auto fit = fit_sinusoid(t0, e(t0), e(t0 + pi / 2), e(t0 - pi / 2));
        for (double t = -3; t < 3; t += 0.25)
            CHECK(fit(t) == doctest::Approx(e(t)).epsilon(1e-12));
        CHECK(fit(fit.minimizer()) == doctest::Approx(A - std::abs(B)).epsilon(1e-12));
    }

    TEST_CASE("constant landscape leaves the parameter alone") {
        const Objective f = [](std::span<const double>) { return 2.5; };
        const std::vector<double> x0{0.3, -1.2};
        CHECK(nft_parameter_update(x0, f, 1) == x0);
    }

    TEST_CASE("only parameter k changes") {
        const Objective f = [](std::span<const double> x) {
            return std::cos(x[0]) + 0.5 * std::sin(x[1] + 0.3) * std::cos(x[2]);
        };
        const std::vector<double> x0{0.1, 0.2, 0.3};
        const auto x = nft_parameter_update(x0, f, 1);
        CHECK(x[0] == x0[0]);
        CHECK(x[2] == x0[2]);
        CHECK(x[1] != x0[1]);
        CHECK(f(x) <= f(x0));
        CHECK_THROWS_AS(nft_parameter_update(x0, f, 3), DomainError);
    }

    TEST_CASE("single-qubit field reaches the ground energy after one sweep") {
        for (double field : {1.0, -0.6, 2.5}) {
            const IsingHamiltonian h({field}, {});
            const auto spec = AnsatzSpec::linear(1);
            const Objective f = [&](std::span<const double> x) {
                return expectation(prepare_state(spec, x), h);
            };
            std::vector<double> x{0.4, -0.9, 1.3, 0.2};
            for (std::size_t k = 0; k < x.size(); ++k)
                x = nft_parameter_update(x, f, k);
            CHECK(std::abs(f(x) - (-std::abs(field))) < 1e-6);
        }
    }

    TEST_CASE("loop adapter sweeps indices cyclically") {
        OptimizerConfig cfg;
        cfg.kind = OptimizerKind::nft;
        auto opt = make_optimizer(cfg, 5);
        const Objective f = [](std::span<const double> x) { return std::cos(x[0] - x[3]); };
        std::vector<double> x(5, 0.1);
        for (std::size_t t = 0; t < 17; ++t) {
            auto p = opt->propose(x, f(x), f);
            REQUIRE(p.touched.has_value());
            CHECK(*p.touched == t % 5);
            x = p.params;
        }
        cfg.nft.sweep_order = {2, 0};
        opt = make_optimizer(cfg, 5);
        CHECK(*opt->propose(x, f(x), f).touched == 2);
        CHECK(*opt->propose(x, f(x), f).touched == 0);
        cfg.nft.sweep_order = {7};
        CHECK_THROWS_AS(make_optimizer(cfg, 5), DomainError);
    }
}

TEST_SUITE("simplex") {
    TEST_CASE("2-parameter bowl converges within 1e-4 in at most 200 steps") {
        const Objective f = [](std::span<const double> x) {
            return (x[0] - 1.0) * (x[0] - 1.0) + 3 * (x[1] + 2.0) * (x[1] + 2.0);
        };
        SimplexSettings s;
        auto state = make_simplex(std::vector<double>{0.0, 0.0}, f, s);
        int steps = 0;
        while (steps < 200 &&
               (std::abs(state.best()[0] - 1.0) > 1e-4 || std::abs(state.best()[1] + 2.0) > 1e-4)) {
            state = cobyla_like_step(std::move(state), f, s);
            ++steps;
        }
        CHECK(steps <= 200);
        CHECK(std::abs(state.best()[0] - 1.0) <= 1e-4);
        CHECK(std::abs(state.best()[1] + 2.0) <= 1e-4);
    }

    TEST_CASE("flat simplex only shrinks and never gets worse") {
        const Objective f = [](std::span<const double>) { return -1.0; };
        SimplexSettings s;
        auto state = make_simplex(std::vector<double>{0.2, 0.4, -0.1}, f, s);
        double best = state.best_value();
        for (int i = 0; i < 20 && !state.converged; ++i) {
            state = cobyla_like_step(std::move(state), f, s);
            if (state.converged)
                break;
            CHECK(state.last_move == SimplexMove::shrink);
            CHECK(state.best_value() <= best);
            best = state.best_value();
        }
    }

    TEST_CASE("collapse below tolerance sets the converged flag") {
        const Objective f = [](std::span<const double> x) { return x[0] * x[0]; };
        SimplexSettings s;
        s.tolerance = 1e-3;
        auto state = make_simplex(std::vector<std::vector<double>>{{0.0}, {1e-4}}, f);
        state = cobyla_like_step(std::move(state), f, s);
        CHECK(state.converged);
        CHECK(state.last_move == SimplexMove::converged);
    }

    TEST_CASE("reflection geometry") {
        CHECK(reflect_point(std::vector<double>{1.0}, std::vector<double>{3.0}, 1.0) ==
              std::vector<double>{-1.0});
        // 1-simplex {0, 2} on f(x) = x: worst is 2, centroid 0, reflection -2.
        const Objective f = [](std::span<const double> x) { return x[0]; };
        auto state = make_simplex(std::vector<std::vector<double>>{{0.0}, {2.0}}, f);
        SimplexSettings s;
        s.expansion = 1.5;
        state = cobyla_like_step(std::move(state), f, s);
        CHECK(state.last_move == SimplexMove::expand);
        CHECK(state.best()[0] == doctest::Approx(-3.0));
        CHECK(reflect_point(std::vector<double>{0.0, 0.5}, std::vector<double>{1.0, 1.0}, 1.0) ==
              std::vector<double>{-1.0, 0.0});
    }

    TEST_CASE("bad shapes") {
        const Objective f = [](std::span<const double>) { return 0.0; };
        CHECK_THROWS_AS(make_simplex(std::vector<std::vector<double>>{{0.0, 1.0}, {1.0, 1.0}}, f),
                        DimensionError);
        CHECK_THROWS_AS(make_simplex(std::vector<std::vector<double>>{{0.0}}, f), DomainError);
    }
}

TEST_CASE("configuration validation") {
    CHECK(parse_optimizer_kind("cobyla") == OptimizerKind::cobyla_like);
    CHECK_THROWS_AS(parse_optimizer_kind("adam"), DomainError);
    OptimizerConfig cfg;
    cfg.kind = OptimizerKind::spsa;
    cfg.spsa.c = 0.0;
    CHECK_THROWS_AS(cfg.validate(), DomainError);
    cfg.kind = OptimizerKind::cobyla_like;
    cfg.simplex.shrink = 1.0;
    CHECK_THROWS_AS(cfg.validate(), DomainError);
}
