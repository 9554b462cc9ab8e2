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

// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits non-zero if any fails.

#include <array>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>

#include "oracles.hpp"
#include "test_data.hpp"
#include "vqh/cli.hpp"
#include "vqh/run_config.hpp"
#include "vqh/sonification.hpp"

using namespace vqh;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass;
    std::string detail;
};

int failures = 0;

void criterion(const std::string &name, double budget_s, const std::function<Outcome()> &body) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
        o = body();
    } catch (const std::exception &e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (budget_s > 0 && secs >= budget_s) {
        o.pass = false;
        o.detail += " (over the " + std::to_string(static_cast<int>(budget_s)) + " s budget)";
    }
    if (!o.pass)
        ++failures;
    std::printf("%s  %-28s %7.2f s  %s\n", o.pass ? "PASS" : "FAIL", name.c_str(), secs,
                o.detail.c_str());
    std::fflush(stdout);
}

oracle::Qubo to_oracle(const QuboProblem &q) {
    oracle::Qubo o;
    o.a = q.linear();
    for (const auto &[k, v] : q.quadratic())
        o.b[{static_cast<int>(k.first), static_cast<int>(k.second)}] = v;
    return o;
}

// Ground energy in the Ising scale from the term-by-term oracle.
double oracle_ground(const QuboProblem &q) {
    const auto spins = oracle::expand_to_spins(to_oracle(q));
    double best = 1e300;
    for (std::uint64_t k = 0; k < (std::uint64_t{1} << q.size()); ++k)
        best = std::min(best, oracle::spin_energy(spins, oracle::bits_of(k, q.size())));
    return best;
}

// Smallest (expectation - ground) over every record of every run checked.
double bound_slack = 1e300;
std::size_t bound_records = 0;

void track_bound(const RunResult &r, const std::vector<QuboProblem> &problems) {
    std::vector<double> ground;
    for (const auto &q : problems)
        ground.push_back(oracle_ground(q));
    for (const auto &rec : r.records) {
        bound_slack = std::min(bound_slack, rec.expectation - ground.at(rec.segment));
        ++bound_records;
    }
}

PreparedRun prepared(const std::string &config, std::uint64_t seed) {
    std::ifstream in(test_data(config));
    auto cfg = parse_run_config(nlohmann::json::parse(in));
    cfg.optimizer.seed = seed;
    return prepare_run(load_qubo_csv(test_data("example1_cmaj_linear.csv")), cfg, VQH_TEST_DATA_DIR);
}

std::string slurp(const fs::path &p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string fmt(double v) {
    std::ostringstream s;
    s << v;
    return s.str();
}

} // namespace

int main() {
    const auto cmaj = Configuration::from_string("100010010000");
    const auto anti = Configuration::from_string("011101101111");

    criterion("reference energies", 1.0, [&]() -> Outcome {
        const auto coupled = qubo_to_ising(load_qubo_csv(test_data("example3_cmaj_coupled.csv")));
        const auto balanced = qubo_to_ising(load_qubo_csv(test_data("example4_cmaj_balanced.csv")));
        const double e1 = ising_energy(coupled, anti), e2 = ising_energy(coupled, cmaj);
        const double e3 = ising_energy(balanced, cmaj), e4 = ising_energy(balanced, anti);
        return {e1 == -24 && e2 == 0 && e3 == -12 && e4 == -12,
                "coupled " + fmt(e1) + "/" + fmt(e2) + ", balanced " + fmt(e3) + "/" + fmt(e4)};
    });

    criterion("transform equivalence", 30.0, [&]() -> Outcome {
        std::mt19937_64 rng(20240611);
        std::uniform_real_distribution<double> u(-4, 4);
        double worst = 0;
        int argmin_mismatch = 0;
        for (int t = 0; t < 200; ++t) {
            const std::size_t n = 1 + static_cast<std::size_t>(t % 10);
            std::vector<double> a(n);
            for (auto &x : a)
                x = u(rng);
            CouplingMap b;
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = i + 1; j < n; ++j)
                    if (rng() % 2)
                        b[{i, j}] = u(rng);
            const QuboProblem q(chromatic_names(n), a, b);
            const auto h = qubo_to_ising(q);
            const auto o = to_oracle(q);
            for (std::uint64_t k = 0; k < (std::uint64_t{1} << n); ++k) {
                const auto c = Configuration::from_index(k, n);
                const double expect = 4 * oracle::qubo_cost(o, oracle::bits_of(k, n)) - h.offset();
                worst = std::max(worst, std::abs(ising_energy(h, c) - expect));
            }
            if (brute_force_solve(q).argmin != brute_force_solve(h).argmin)
                ++argmin_mismatch;
        }
        return {worst <= 1e-9 && argmin_mismatch == 0,
                "max deviation " + fmt(worst) + ", argmin mismatches " + std::to_string(argmin_mismatch)};
    });

    criterion("example 1 convergence", 60.0, [&]() -> Outcome {
        const std::vector<double> target{1, 0, 0, 0, 1, 0, 0, 1, 0, 0, 0, 0};
        int ok = 0;
        double worst_gap = 0;
        for (std::uint64_t seed = 0; seed < 10; ++seed) {
            const auto run = prepared("example1_nft.json", seed);
            const auto r = execute(run);
            track_bound(r, run.problems);
            const double ground = oracle_ground(run.problems[0]);
            bool pass = run.initial == ParameterVector::zeros(48) && !run.shots &&
                        run.ansatz.reps == 1 && r.records.size() == 150 &&
                        std::abs(r.final_expectation - ground) < 0.1;
            for (std::size_t i = 0; i < 12; ++i)
                pass = pass && std::abs(r.records.back().marginals[i] - target[i]) < 0.1;
            worst_gap = std::max(worst_gap, r.final_expectation - ground);
            ok += pass;
        }
        return {ok >= 8, std::to_string(ok) + "/10 seeds, worst gap " + fmt(worst_gap)};
    });

    criterion("progression structure", 90.0, [&]() -> Outcome {
        const auto run = prepared("example2_progression.json", 1);
        const auto r = execute(run);
        track_bound(r, run.problems);
        bool carry = true;
        for (std::size_t s = 1; s < 4; ++s) {
            const std::size_t first = 150 * s;
            carry = carry && r.records[first].segment == s && r.records[first - 1].segment == s - 1 &&
                    r.records[first].params == r.records[first - 1].params;
        }
        const bool same_h = run.schedule.segments[0].hamiltonian == run.schedule.segments[3].hamiltonian;
        const bool diff_start = !(r.records[0].params == r.records[450].params);
        return {r.records.size() == 600 && carry && same_h && diff_start,
                std::to_string(r.records.size()) + " records, carry-over " + (carry ? "ok" : "broken") +
                    ", I/I' same H " + (same_h ? "yes" : "no") + ", different start " +
                    (diff_start ? "yes" : "no")};
    });

    criterion("nft touch period", 0, [&]() -> Outcome {
        const auto run = prepared("example1_nft.json", 0);
        const auto r = execute(run);
        track_bound(r, run.problems);
        std::size_t bad = 0;
        for (std::size_t t = 0; t < r.records.size(); ++t) {
            if (!r.records[t].touched || *r.records[t].touched != t % 48)
                ++bad;
            // Only the touched parameter may differ between neighbours.
            if (t > 0)
                for (std::size_t p = 0; p < 48; ++p)
                    if (p != *r.records[t - 1].touched &&
                        r.records[t].params[p] != r.records[t - 1].params[p])
                        ++bad;
        }
        return {bad == 0 && run.ansatz.parameter_count() == 48,
                "period " + std::to_string(run.ansatz.parameter_count()) + ", " +
                    std::to_string(bad) + " violations over " + std::to_string(r.records.size()) + " records"};
    });

    criterion("simulator correctness", 0, [&]() -> Outcome {
        std::mt19937_64 rng(99);
        std::uniform_real_distribution<double> ang(-2 * oracle::pi, 2 * oracle::pi);
        double worst_amp = 0, worst_norm = 0;
        for (int t = 0; t < 100; ++t) {
            const std::size_t n = 1 + static_cast<std::size_t>(t % 4);
            const std::size_t reps = 1 + static_cast<std::size_t>((t / 4) % 2);
            const auto spec = AnsatzSpec::linear(n, reps);
            std::vector<double> theta(spec.parameter_count());
            for (auto &x : theta)
                x = ang(rng);
            std::vector<std::pair<int, int>> ent;
            for (const auto &[c, tg] : spec.entanglement)
                ent.emplace_back(static_cast<int>(c), static_cast<int>(tg));
            const auto ref = oracle::first_column(oracle::ansatz_unitary(n, reps, ent, theta));
            const auto psi = prepare_state(spec, theta);
            for (std::size_t k = 0; k < ref.size(); ++k)
                worst_amp = std::max(worst_amp, std::abs(psi.amplitudes()[k] - ref[k]));
            // Gate-by-gate norm tracking on the same circuit.
            StateVector s(n);
            std::size_t p = 0;
            for (std::size_t layer = 0; layer <= reps; ++layer) {
                if (layer > 0)
                    for (const auto &[c, tg] : spec.entanglement) {
                        s.cnot(c, tg);
                        worst_norm = std::max(worst_norm, std::abs(s.norm_squared() - 1));
                    }
                for (std::size_t q = 0; q < n; ++q) {
                    s.rotate_y(q, theta[p++]);
                    worst_norm = std::max(worst_norm, std::abs(s.norm_squared() - 1));
                }
                for (std::size_t q = 0; q < n; ++q) {
                    s.rotate_z(q, theta[p++]);
                    worst_norm = std::max(worst_norm, std::abs(s.norm_squared() - 1));
                }
            }
        }
        return {worst_amp < 1e-9 && worst_norm <= 1e-12,
                "max amplitude deviation " + fmt(worst_amp) + ", max norm drift " + fmt(worst_norm)};
    });

    criterion("sonification spectra", 30.0, [&]() -> Outcome {
        std::vector<double> m(12, 0.0);
        m[0] = m[4] = m[7] = 1.0;
        SonificationStream held{chromatic_names(12), 1.0, {{0, 0.0, 0, m, -24.0, 1.0}}};
        MappingConfig cfg;
        const auto buf = map_additive(held, cfg);
        const std::size_t n = 32768;
        const auto p = oracle::power_spectrum(buf.samples, 0, n);
        auto bin = [&](double hz) { return static_cast<std::size_t>(std::llround(hz * n / cfg.sample_rate)); };
        bool peaks = true;
        double weakest = 1e300;
        for (double hz : {261.63, 329.63, 392.00}) {
            const auto c = bin(hz);
            std::size_t best = c - 2;
            for (std::size_t k = c - 2; k <= c + 2; ++k)
                if (p[k] > p[best])
                    best = k;
            // The maximum must be a local peak, not the edge of a slope.
            peaks = peaks && p[best] >= p[best - 1] && p[best] >= p[best + 1];
            weakest = std::min(weakest, p[best]);
        }
        double dominance = 1e300;
        for (std::size_t i : {1, 2, 3, 5, 6, 8, 9, 10, 11})
            dominance = std::min(dominance, oracle::to_db(weakest / p[bin(cfg.tuning.frequency(i))]));

        // Arpeggio ordering on a real run.
        const auto run = prepared("example1_nft.json", 0);
        const auto r = execute(run);
        const auto stream = build_stream(r, run.frame_duration, run.labels);
        cfg.strategy = Strategy::arpeggio;
        const auto arp = map_arpeggio(stream, cfg);
        std::size_t disorder = 0;
        for (std::size_t i = 1; i < arp.events.size(); ++i)
            if (arp.events[i].frame == arp.events[i - 1].frame &&
                arp.events[i].amplitude < arp.events[i - 1].amplitude)
                ++disorder;

        // WAV round trip.
        const auto path = fs::temp_directory_path() / "vqh_acceptance.wav";
        render_wav(buf, path.string());
        const auto back = read_wav(path.string());
        fs::remove(path);
        double lsb = 0;
        for (std::size_t i = 0; i < buf.samples.size(); ++i)
            lsb = std::max(lsb, std::abs(back.samples[i] - buf.samples[i]) * 32767);

        return {peaks && dominance >= 40 && disorder == 0 && !arp.events.empty() &&
                    back.samples.size() == buf.samples.size() && lsb <= 1.0,
                "dominance " + fmt(dominance) + " dB, " + std::to_string(arp.events.size()) +
                    " onsets / " + std::to_string(disorder) + " out of order, round trip " +
                    fmt(lsb) + " LSB"};
    });

    criterion("determinism", 0, [&]() -> Outcome {
        const auto base = fs::temp_directory_path() / ("vqh_acceptance_" + std::to_string(std::random_device{}()));
        std::vector<std::string> mismatched;
        std::array<fs::path, 2> dirs{base / "a", base / "b"};
        for (const auto &dir : dirs) {
            std::ostringstream out, err;
            Cli cli(out, err, dir);
            for (std::string opt : {"nft", "spsa", "cobyla_like"}) {
                if (cli.execute({"runvqe", test_data("example1_cmaj_linear.csv"),
                                 test_data("example1_nft.json"), "--optimizer", opt, "--seed", "3"}) != 0)
                    throw std::runtime_error("runvqe failed: " + err.str());
                fs::copy_file(dir / "last_run.jsonl", dir / (opt + ".jsonl"));
                for (std::string s : {"additive", "inharmonic", "subtractive", "arpeggio"})
                    if (cli.execute({"play", s, "--out", (dir / (opt + "_" + s + ".wav")).string()}) != 0)
                        throw std::runtime_error("play failed: " + err.str());
            }
        }
        std::size_t files = 0;
        for (const auto &entry : fs::directory_iterator(dirs[0])) {
            const auto name = entry.path().filename();
            ++files;
            if (slurp(entry.path()) != slurp(dirs[1] / name))
                mismatched.push_back(name.string());
        }
        fs::remove_all(base);
        std::string detail = std::to_string(files) + " files compared";
        for (const auto &m : mismatched)
            detail += ", differs: " + m;
        return {mismatched.empty() && files >= 15, detail};
    });

    criterion("variational bound", 0, [&]() -> Outcome {
        return {bound_records > 0 && bound_slack >= -1e-9,
                std::to_string(bound_records) + " records, min(E - ground) = " + fmt(bound_slack)};
    });

    return failures == 0 ? 0 : 1;
}
