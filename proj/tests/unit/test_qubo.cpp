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

#include <random>

#include "oracles.hpp"
#include "test_data.hpp"
#include "vqh/error.hpp"
#include "vqh/qubo.hpp"

using namespace vqh;

namespace {

const auto kCmaj = Configuration::from_string("100010010000");
const auto kAntiCmaj = Configuration::from_string("011101101111");

oracle::Qubo to_oracle(const QuboProblem &q) {
    oracle::Qubo o;
    o.a = q.linear();
    for (const auto &[k, v] : q.quadratic())
        o.b[{static_cast<int>(k.first), static_cast<int>(k.second)}] = v;
    return o;
}

QuboProblem random_qubo(std::size_t n, std::mt19937_64 &rng) {
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    std::bernoulli_distribution keep(0.6);
    std::vector<double> a(n);
    for (auto &x : a)
        x = u(rng);
    CouplingMap b;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (keep(rng))
                b[{i, j}] = u(rng);
    return QuboProblem(chromatic_names(n), a, b);
}

std::vector<int> as_ints(const Configuration &c) {
    return {c.bits().begin(), c.bits().end()};
}

} // namespace

TEST_SUITE("csv") {
    TEST_CASE("diagonal-only matrix") {
        const auto q = parse_qubo_csv("C,E\n-1,0\n0,-1\n");
        CHECK(q.labels() == std::vector<std::string>{"C", "E"});
        CHECK(q.linear() == std::vector<double>{-1, -1});
        CHECK(q.quadratic().empty());
    }

    TEST_CASE("example 1 file is the linear C major problem") {
        const auto q = load_qubo_csv(test_data("example1_cmaj_linear.csv"));
        CHECK(q == chord_qubo({{0, 4, 7}, ChordEncoding::linear}, 12));
    }

    TEST_CASE("symmetric cells are summed") {
        const auto q = parse_qubo_csv("A,B\n0,0.5\n0.5,0\n");
        CHECK(q.coupling(0, 1) == 1.0);
        // Both conventions of the double sum agree on all four assignments.
        for (std::uint64_t k = 0; k < 4; ++k) {
            const auto c = Configuration::from_index(k, 2);
            const double ordered = 0.5 * c[0] * c[1] + 0.5 * c[1] * c[0];
            CHECK(qubo_cost(q, c) == doctest::Approx(ordered).epsilon(1e-15));
        }
    }

    TEST_CASE("comments, blank lines and a BOM are ignored") {
        const auto q = parse_qubo_csv("\xEF\xBB\xBF# note row\nX,Y\n\n1,2\n# mid\n0,3\n");
        CHECK(q.linear() == std::vector<double>{1, 3});
        CHECK(q.coupling(0, 1) == 2.0);
    }

    TEST_CASE("errors carry positions") {
        auto fails = [](std::string_view text, std::size_t row, std::size_t col) {
            try {
                parse_qubo_csv(text);
                FAIL("expected a parse error for: " << text);
            } catch (const ParseError &e) {
                CHECK(e.row() == row);
                CHECK(e.column() == col);
            }
        };
        fails("A,B\n1,x\n0,1\n", 2, 2);
        fails("A,A\n1,0\n0,1\n", 1, 2);
        CHECK_THROWS_AS(parse_qubo_csv("A,B\n1,0\n"), ParseError);
        fails("A,B\n1,0,3\n0,1\n", 2, 0);
        CHECK_THROWS_AS(parse_qubo_csv("A,B\n1,nan\n0,1\n"), ParseError);
        CHECK_THROWS_AS(parse_qubo_csv(""), ParseError);
    }

    TEST_CASE("serialize then parse is the identity") {
        std::mt19937_64 rng(3);
        for (int i = 0; i < 20; ++i) {
            const auto q = random_qubo(1 + i % 9, rng);
            CHECK(parse_qubo_csv(serialize_qubo_csv(q)) == q);
        }
    }
}

TEST_SUITE("cost and transform") {
    TEST_CASE("cost examples") {
        const auto q = chord_qubo({{0, 4, 7}, ChordEncoding::linear}, 12);
        CHECK(qubo_cost(q, kCmaj) == -3.0);
        CHECK(qubo_cost(q, Configuration::from_index(0, 12)) == 0.0);
        CHECK_THROWS_AS(qubo_cost(q, Configuration::from_index(0, 3)),
                        DimensionError);
    }

    TEST_CASE("random 4-variable problems match term-by-term evaluation") {
        std::mt19937_64 rng(99);
        for (int t = 0; t < 50; ++t) {
            const auto q = random_qubo(4, rng);
            const auto o = to_oracle(q);
            for (std::uint64_t k = 0; k < 16; ++k) {
                const auto c = Configuration::from_index(k, 4);
                CHECK(qubo_cost(q, c) ==
                      doctest::Approx(oracle::qubo_cost(o, as_ints(c))).epsilon(1e-12));
            }
        }
    }

    TEST_CASE("transform examples") {
        const auto h1 = qubo_to_ising(QuboProblem({"A"}, {1.0}, {}));
        CHECK(h1.fields() == std::vector<double>{-2});
        const auto h2 = qubo_to_ising(QuboProblem({"A", "B"}, {0, 0}, {{{0, 1}, 1.0}}));
        CHECK(h2.fields() == std::vector<double>{-1, -1});
        CHECK(h2.couplings().at({0, 1}) == 1.0);
    }

    TEST_CASE("coupled and balanced C major reproduce the published energies") {
        const auto coupled = qubo_to_ising(
            chord_qubo({{0, 4, 7}, ChordEncoding::coupled, Boundary::periodic}, 12));
        CHECK(ising_energy(coupled, kAntiCmaj) == -24.0);
        CHECK(ising_energy(coupled, kCmaj) == 0.0);
        const auto balanced = qubo_to_ising(
            chord_qubo({{0, 4, 7}, ChordEncoding::balanced, Boundary::periodic}, 12));
        CHECK(ising_energy(balanced, kCmaj) == -12.0);
        CHECK(ising_energy(balanced, kAntiCmaj) == -12.0);
    }

    TEST_CASE("all-zeros configuration sums fields and couplings") {
        std::mt19937_64 rng(5);
        const auto h = qubo_to_ising(random_qubo(6, rng));
        double sum = 0;
        for (double f : h.fields())
            sum += f;
        for (const auto &[_, v] : h.couplings())
            sum += v;
        CHECK(ising_energy(h, Configuration::from_index(0, 6)) ==
              doctest::Approx(sum).epsilon(1e-12));
    }

    TEST_CASE("affine relation on every configuration, n <= 12") {
        std::mt19937_64 rng(2024);
        for (std::size_t n = 1; n <= 12; ++n) {
            const int trials = n <= 8 ? 10 : 2;
            for (int t = 0; t < trials; ++t) {
                const auto q = random_qubo(n, rng);
                const auto h = qubo_to_ising(q);
                const auto spins = oracle::expand_to_spins(to_oracle(q));
                CHECK(h.offset() == doctest::Approx(spins.constant).epsilon(1e-12));
                const auto diag = h.basis_energies();
                for (std::uint64_t k = 0; k < (1u << n); ++k) {
                    const auto c = Configuration::from_index(k, n);
                    const double e = ising_energy(h, c);
                    REQUIRE(std::abs(e - (4 * qubo_cost(q, c) - h.offset())) < 1e-9);
                    REQUIRE(std::abs(e - oracle::spin_energy(spins, as_ints(c))) < 1e-9);
                    REQUIRE(std::abs(diag[k] - e) < 1e-9);
                }
                const auto bq = brute_force_solve(q);
                const auto bh = brute_force_solve(h);
                CHECK(bq.argmin == bh.argmin);
            }
        }
    }
}

TEST_SUITE("brute force") {
    TEST_CASE("example 1 has a unique C major minimizer") {
        const auto r = brute_force_solve(load_qubo_csv(test_data("example1_cmaj_linear.csv")));
        CHECK(r.minimum == -3.0);
        REQUIRE(r.argmin.size() == 1);
        CHECK(r.argmin[0] == kCmaj);
    }

    TEST_CASE("balanced encoding is degenerate between the two patterns") {
        const auto q = load_qubo_csv(test_data("example4_cmaj_balanced.csv"));
        const auto r = brute_force_solve(q);
        CHECK(r.argmin == std::vector<Configuration>{kAntiCmaj, kCmaj});
        const auto h = qubo_to_ising(q);
        for (const auto &c : r.argmin)
            CHECK(ising_energy(h, c) == -12.0);
    }

    TEST_CASE("all-zero problem is fully degenerate") {
        const auto r = brute_force_solve(QuboProblem::zeros(5));
        CHECK(r.minimum == 0.0);
        CHECK(r.argmin.size() == 32);
        CHECK(std::is_sorted(r.argmin.begin(), r.argmin.end(),
                             [](const auto &a, const auto &b) {
                                 return a.to_string() < b.to_string();
                             }));
    }

    TEST_CASE("minimum agrees with an independent scan") {
        std::mt19937_64 rng(8);
        for (int t = 0; t < 30; ++t) {
            const std::size_t n = 1 + t % 10;
            const auto q = random_qubo(n, rng);
            const auto o = to_oracle(q);
            double best = 1e300;
            for (std::uint64_t k = 0; k < (1u << n); ++k)
                best = std::min(best, oracle::qubo_cost(o, oracle::bits_of(k, n)));
            CHECK(brute_force_solve(q).minimum == doctest::Approx(best).epsilon(1e-12));
        }
    }

    TEST_CASE("size bound") {
        CHECK_THROWS_AS(brute_force_solve(QuboProblem::zeros(kMaxEnumerationSize + 1)),
                        DomainError);
    }
}

TEST_SUITE("chords") {
    TEST_CASE("linear chords have the indicator as unique minimizer") {
        std::mt19937_64 rng(12);
        for (int t = 0; t < 20; ++t) {
            std::set<std::size_t> notes;
            for (std::size_t i = 0; i < 12; ++i)
                if (rng() % 3 == 0)
                    notes.insert(i);
            const auto r = brute_force_solve(chord_qubo({notes, ChordEncoding::linear}, 12));
            REQUIRE(r.argmin.size() == 1);
            for (std::size_t i = 0; i < 12; ++i)
                CHECK(r.argmin[0][i] == (notes.contains(i) ? 1 : 0));
        }
    }

    TEST_CASE("coupled ring signs") {
        const auto q = chord_qubo({{0, 4, 7}, ChordEncoding::coupled, Boundary::periodic}, 12);
        const std::vector<double> chain{1, -1, -1, 1, 1, -1, 1, 1, -1, -1, -1};
        for (std::size_t k = 0; k < 11; ++k)
            CHECK(q.coupling(k, k + 1) == chain[k]);
        CHECK(q.coupling(11, 0) == 1.0);
        CHECK(q.quadratic().size() == 12);
        const auto open = chord_qubo({{0, 4, 7}, ChordEncoding::coupled, Boundary::open}, 12);
        CHECK(open.quadratic().size() == 11);
    }

    TEST_CASE("balanced linear row") {
        const auto q = chord_qubo({{0, 4, 7}, ChordEncoding::balanced, Boundary::periodic}, 12);
        CHECK(q.linear() == std::vector<double>{-1, 0, 1, 0, -1, 0, 0, -1, 0, 1, 1, 0});
        CHECK(q == load_qubo_csv(test_data("example4_cmaj_balanced.csv")));
    }

    TEST_CASE("empty coupled chord is allowed with a warning") {
        const ChordSpec spec{{}, ChordEncoding::coupled};
        CHECK(chord_warning(spec).has_value());
        const auto q = chord_qubo(spec, 12);
        for (const auto &[_, v] : q.quadratic())
            CHECK(v == -1.0);
        CHECK_FALSE(chord_warning({{0}, ChordEncoding::coupled}).has_value());
    }

    TEST_CASE("invalid chords") {
        CHECK_THROWS_AS(chord_qubo({{12}, ChordEncoding::linear}, 12), DomainError);
        CHECK_THROWS_AS(chord_qubo({{0}, ChordEncoding::coupled}, 1), DomainError);
        CHECK_THROWS_AS(chord_notes({"H"}, chromatic_names(12)), DomainError);
    }
}

TEST_CASE("interpolation") {
    const IsingHamiltonian h0({2.0}, {}, 1.0), h1({4.0}, {}, 3.0);
    CHECK(interpolate_ising(h0, h1, 0.0) == h0);
    CHECK(interpolate_ising(h0, h1, 1.0) == h1);
    const auto mid = interpolate_ising(h0, h1, 0.5);
    CHECK(mid.fields() == std::vector<double>{3.0});
    CHECK(mid.offset() == 2.0);
    CHECK_THROWS_AS(interpolate_ising(h0, h1, 1.5), DomainError);
    CHECK_THROWS_AS(interpolate_ising(h0, IsingHamiltonian({1.0, 1.0}, {}), 0.5),
                    DimensionError);
}

TEST_CASE("configuration text") {
    CHECK(kCmaj.to_string() == "100010010000");
    CHECK(kCmaj.to_index() == (1u | 1u << 4 | 1u << 7));
    CHECK(Configuration::from_index(kCmaj.to_index(), 12) == kCmaj);
    CHECK_THROWS(Configuration::from_string("102"));
}
