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

#pragma once

/**
 * @file
 * Gradient-free optimizers driving the VQE loop.
 *
 * All three work on a plain objective over a flat parameter vector so they
 * can be tested against closed-form surrogates as well as real energies.
 * The VQE loop talks to them through Optimizer::propose, one call per
 * recorded iteration.
 */

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <random>
#include <span>
#include <string_view>
#include <vector>

namespace vqh {

using Objective = std::function<double(std::span<const double>)>;

enum class OptimizerKind { spsa, nft, cobyla_like };

std::string_view to_string(OptimizerKind kind);
/// Throws DomainError listing the valid names.
OptimizerKind parse_optimizer_kind(std::string_view name);

/// Gains a_k = a / (k + 1 + A)^alpha, c_k = c / (k + 1)^gamma.
struct SpsaSettings {
    double a = 0.2;
    double c = 0.1;
    double stability = 10.0; // A
    double alpha = 0.602;
    double gamma = 0.101;
};

struct NftSettings {
    /// Parameter visiting order; empty means 0, 1, ..., P-1.
    std::vector<std::size_t> sweep_order;
    /// Fits with amplitude below this leave the parameter unchanged.
    double degenerate_tolerance = 1e-10;
};

/// Nelder-Mead coefficients; stands in for COBYLA.
struct SimplexSettings {
    double initial_step = 0.5;
    double reflection = 1.0;
    double expansion = 2.0;
    double contraction = 0.5;
    double shrink = 0.5;
    /// Converged once every vertex value and coordinate lies within this
    /// distance of the best vertex.
    double tolerance = 1e-8;
};

struct OptimizerConfig {
    OptimizerKind kind = OptimizerKind::nft;
    SpsaSettings spsa;
    NftSettings nft;
    SimplexSettings simplex;
    std::uint64_t seed = 0;

    /// Throws DomainError on non-positive step sizes and similar.
    void validate() const;
};

// --- SPSA ------------------------------------------------------------------

double spsa_gain_a(const SpsaSettings &s, std::size_t step);
double spsa_gain_c(const SpsaSettings &s, std::size_t step);

/// One simultaneous-perturbation step: evaluates f at params +- c_k Delta
/// (Delta a random +-1 vector) and moves every parameter at once.
std::vector<double> spsa_iteration(std::span<const double> params,
                                   const Objective &f, const SpsaSettings &s,
                                   std::size_t step, std::mt19937_64 &rng);

// --- NFT -------------------------------------------------------------------

/// E(theta) = mean + amplitude * cos(theta - phase), amplitude >= 0.
struct SinusoidFit {
    double mean;
    double amplitude;
    double phase;

    [[nodiscard]] double minimizer() const;
    [[nodiscard]] double operator()(double theta) const;
};

/// Reconstructs the sinusoid from E(theta0), E(theta0 + pi/2),
/// E(theta0 - pi/2).
SinusoidFit fit_sinusoid(double theta0, double e0, double e_plus,
                         double e_minus);

/// Sets parameter k to the exact minimiser of the fitted sinusoid. When
/// `energy_at_params` is given it is used as E(theta_k) instead of a fresh
/// evaluation.
std::vector<double>
nft_parameter_update(std::span<const double> params, const Objective &f,
                     std::size_t k, std::optional<double> energy_at_params = {},
                     double degenerate_tolerance = 1e-10);

// --- simplex ---------------------------------------------------------------

enum class SimplexMove {
    initialize,
    reflect,
    expand,
    contract_outside,
    contract_inside,
    shrink,
    converged,
};

std::string_view to_string(SimplexMove move);

struct SimplexState {
    /// dim + 1 vertices, kept sorted by ascending value.
    std::vector<std::vector<double>> vertices;
    std::vector<double> values;
    SimplexMove last_move = SimplexMove::initialize;
    bool converged = false;

    [[nodiscard]] const std::vector<double> &best() const {
        return vertices.front();
    }
    [[nodiscard]] double best_value() const { return values.front(); }
};

/// centroid + coeff * (centroid - worst).
std::vector<double> reflect_point(std::span<const double> centroid,
                                  std::span<const double> worst,
                                  double coeff);

/// Axis-aligned start simplex around `start`.
SimplexState make_simplex(std::span<const double> start, const Objective &f,
                          const SimplexSettings &s);
/// Start simplex from explicit vertices (evaluated and sorted here).
SimplexState make_simplex(std::vector<std::vector<double>> vertices,
                          const Objective &f);

/// One reflect / expand / contract / shrink update. A collapsed simplex
/// only sets `converged`.
SimplexState cobyla_like_step(SimplexState state, const Objective &f,
                              const SimplexSettings &s);

// --- loop interface --------------------------------------------------------

struct Proposal {
    std::vector<double> params;
    /// The single parameter changed, when the method changes only one.
    std::optional<std::size_t> touched;
};

class Optimizer {
  public:
    virtual ~Optimizer() = default;
    /// Next iterate from `current` (whose energy is `current_energy`).
    virtual Proposal propose(std::span<const double> current,
                             double current_energy, const Objective &f) = 0;
};

/// `stream` decorrelates the random sequence of independent runs sharing
/// the same configured seed (e.g. schedule stages).
std::unique_ptr<Optimizer> make_optimizer(const OptimizerConfig &config,
                                          std::size_t parameter_count,
                                          std::uint64_t stream = 0);

} // namespace vqh
