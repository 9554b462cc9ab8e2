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

#include "vqh/optimizers.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "vqh/error.hpp"
#include "vqh/statevector.hpp"

namespace vqh {

std::string_view to_string(OptimizerKind kind) {
    switch (kind) {
    case OptimizerKind::spsa:
        return "spsa";
    case OptimizerKind::nft:
        return "nft";
    case OptimizerKind::cobyla_like:
        return "cobyla_like";
    }
    return "?";
}

OptimizerKind parse_optimizer_kind(std::string_view name) {
    if (name == "spsa")
        return OptimizerKind::spsa;
    if (name == "nft")
        return OptimizerKind::nft;
    if (name == "cobyla_like" || name == "cobyla")
        return OptimizerKind::cobyla_like;
    throw DomainError("unknown optimizer '" + std::string(name) +
                      "' (valid: spsa, nft, cobyla_like)");
}

void OptimizerConfig::validate() const {
    auto positive = [](double v, const char *what) {
        if (!(v > 0.0) || !std::isfinite(v))
            throw DomainError(std::string(what) + " must be positive");
    };
    switch (kind) {
    case OptimizerKind::spsa:
        if (!(spsa.a >= 0.0))
            throw DomainError("spsa.a must be non-negative");
        positive(spsa.c, "spsa.c");
        if (!(spsa.stability >= 0.0))
            throw DomainError("spsa.stability must be non-negative");
        positive(spsa.alpha, "spsa.alpha");
        positive(spsa.gamma, "spsa.gamma");
        break;
    case OptimizerKind::nft:
        if (!(nft.degenerate_tolerance >= 0.0))
            throw DomainError("nft.degenerate_tolerance must be non-negative");
        break;
    case OptimizerKind::cobyla_like:
        positive(simplex.initial_step, "cobyla_like.initial_step");
        positive(simplex.reflection, "cobyla_like.reflection");
        if (!(simplex.expansion > 1.0))
            throw DomainError("cobyla_like.expansion must exceed 1");
        if (!(simplex.contraction > 0.0 && simplex.contraction < 1.0))
            throw DomainError("cobyla_like.contraction must lie in (0, 1)");
        if (!(simplex.shrink > 0.0 && simplex.shrink < 1.0))
            throw DomainError("cobyla_like.shrink must lie in (0, 1)");
        positive(simplex.tolerance, "cobyla_like.tolerance");
        break;
    }
}

// --- SPSA ------------------------------------------------------------------

double spsa_gain_a(const SpsaSettings &s, std::size_t step) {
    return s.a / std::pow(static_cast<double>(step) + 1.0 + s.stability,
                          s.alpha);
}

double spsa_gain_c(const SpsaSettings &s, std::size_t step) {
    return s.c / std::pow(static_cast<double>(step) + 1.0, s.gamma);
}

std::vector<double> spsa_iteration(std::span<const double> params,
                                   const Objective &f, const SpsaSettings &s,
                                   std::size_t step, std::mt19937_64 &rng) {
    const std::size_t dim = params.size();
    const double ak = spsa_gain_a(s, step);
    const double ck = spsa_gain_c(s, step);

    std::vector<double> delta(dim);
    for (auto &d : delta)
        d = (rng() & 1U) ? 1.0 : -1.0;

    std::vector<double> plus(params.begin(), params.end());
    std::vector<double> minus(params.begin(), params.end());
    for (std::size_t i = 0; i < dim; ++i) {
        plus[i] += ck * delta[i];
        minus[i] -= ck * delta[i];
    }
    const double diff = f(plus) - f(minus);

    std::vector<double> next(params.begin(), params.end());
    if (ak == 0.0)
        return next;
    for (std::size_t i = 0; i < dim; ++i)
        next[i] -= ak * diff / (2.0 * ck * delta[i]);
    return next;
}

// --- NFT -------------------------------------------------------------------

double SinusoidFit::minimizer() const {
    // Keep angles in (-pi, pi]; a 2*pi shift only changes the global phase.
    double m = std::remainder(phase + std::numbers::pi, 2 * std::numbers::pi);
    if (m <= -std::numbers::pi)
        m += 2 * std::numbers::pi;
    return m;
}

double SinusoidFit::operator()(double theta) const {
    return mean + amplitude * std::cos(theta - phase);
}

SinusoidFit fit_sinusoid(double theta0, double e0, double e_plus,
                         double e_minus) {
    const double mean = 0.5 * (e_plus + e_minus);
    const double x = e0 - mean;               // A cos(theta0 - phase)
    const double y = 0.5 * (e_minus - e_plus); // A sin(theta0 - phase)
    const double amplitude = std::hypot(x, y);
    const double phase = theta0 - std::atan2(y, x);
    return {mean, amplitude, phase};
}

std::vector<double> nft_parameter_update(std::span<const double> params,
                                         const Objective &f, std::size_t k,
                                         std::optional<double> energy_at_params,
                                         double degenerate_tolerance) {
    if (k >= params.size())
        throw DomainError("parameter index out of range");
    std::vector<double> probe(params.begin(), params.end());
    const double theta0 = params[k];
    const double e0 = energy_at_params ? *energy_at_params : f(probe);
    probe[k] = theta0 + std::numbers::pi / 2;
    const double e_plus = f(probe);
    probe[k] = theta0 - std::numbers::pi / 2;
    const double e_minus = f(probe);

    const auto fit = fit_sinusoid(theta0, e0, e_plus, e_minus);
    probe[k] = fit.amplitude <= degenerate_tolerance ? theta0 : fit.minimizer();
    return probe;
}

// --- simplex ---------------------------------------------------------------

std::string_view to_string(SimplexMove move) {
    switch (move) {
    case SimplexMove::initialize:
        return "initialize";
    case SimplexMove::reflect:
        return "reflect";
    case SimplexMove::expand:
        return "expand";
    case SimplexMove::contract_outside:
        return "contract_outside";
    case SimplexMove::contract_inside:
        return "contract_inside";
    case SimplexMove::shrink:
        return "shrink";
    case SimplexMove::converged:
        return "converged";
    }
    return "?";
}

std::vector<double> reflect_point(std::span<const double> centroid,
                                  std::span<const double> worst,
                                  double coeff) {
    std::vector<double> out(centroid.size());
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = centroid[i] + coeff * (centroid[i] - worst[i]);
    return out;
}

namespace {

void sort_simplex(SimplexState &s) {
    std::vector<std::size_t> order(s.values.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) {
        return s.values[a] < s.values[b];
    });
    SimplexState sorted;
    for (auto i : order) {
        sorted.vertices.push_back(std::move(s.vertices[i]));
        sorted.values.push_back(s.values[i]);
    }
    s.vertices = std::move(sorted.vertices);
    s.values = std::move(sorted.values);
}

bool collapsed(const SimplexState &s, double tolerance) {
    const auto &best = s.vertices.front();
    for (std::size_t v = 1; v < s.vertices.size(); ++v) {
        if (std::abs(s.values[v] - s.values[0]) > tolerance)
            return false;
        for (std::size_t i = 0; i < best.size(); ++i)
            if (std::abs(s.vertices[v][i] - best[i]) > tolerance)
                return false;
    }
    return true;
}

// Point on the ray from the centroid through `toward`.
std::vector<double> along(std::span<const double> centroid,
                          std::span<const double> toward, double coeff) {
    std::vector<double> out(centroid.size());
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = centroid[i] + coeff * (toward[i] - centroid[i]);
    return out;
}

} // namespace

SimplexState make_simplex(std::vector<std::vector<double>> vertices,
                          const Objective &f) {
    if (vertices.size() < 2)
        throw DomainError("simplex needs at least two vertices");
    const std::size_t dim = vertices.front().size();
    if (vertices.size() != dim + 1)
        throw DimensionError("simplex needs dim + 1 vertices");
    SimplexState s;
    s.vertices = std::move(vertices);
    for (const auto &v : s.vertices) {
        if (v.size() != dim)
            throw DimensionError("simplex vertices differ in dimension");
        s.values.push_back(f(v));
    }
    sort_simplex(s);
    return s;
}

SimplexState make_simplex(std::span<const double> start, const Objective &f,
                          const SimplexSettings &settings) {
    std::vector<std::vector<double>> vertices;
    vertices.emplace_back(start.begin(), start.end());
    for (std::size_t i = 0; i < start.size(); ++i) {
        std::vector<double> v(start.begin(), start.end());
        v[i] += settings.initial_step;
        vertices.push_back(std::move(v));
    }
    return make_simplex(std::move(vertices), f);
}

SimplexState cobyla_like_step(SimplexState s, const Objective &f,
                              const SimplexSettings &settings) {
    if (s.vertices.size() < 2)
        throw DomainError("simplex needs at least two vertices");
    if (s.converged || collapsed(s, settings.tolerance)) {
        s.converged = true;
        s.last_move = SimplexMove::converged;
        return s;
    }
    const std::size_t last = s.vertices.size() - 1;
    const std::size_t dim = s.vertices.front().size();

    std::vector<double> centroid(dim, 0.0);
    for (std::size_t v = 0; v < last; ++v)
        for (std::size_t i = 0; i < dim; ++i)
            centroid[i] += s.vertices[v][i];
    for (auto &c : centroid)
        c /= static_cast<double>(last);

    const auto &worst = s.vertices[last];
    const double f_best = s.values.front();
    const double f_second = s.values[last - 1];
    const double f_worst = s.values[last];

    auto accept = [&](std::vector<double> point, double value,
                      SimplexMove move) {
        s.vertices[last] = std::move(point);
        s.values[last] = value;
        s.last_move = move;
        sort_simplex(s);
        return s;
    };

    auto reflected = reflect_point(centroid, worst, settings.reflection);
    const double f_r = f(reflected);

    if (f_r < f_best) {
        auto expanded = along(centroid, reflected, settings.expansion);
        const double f_e = f(expanded);
        if (f_e < f_r)
            return accept(std::move(expanded), f_e, SimplexMove::expand);
        return accept(std::move(reflected), f_r, SimplexMove::reflect);
    }
    if (f_r < f_second)
        return accept(std::move(reflected), f_r, SimplexMove::reflect);

    if (f_r < f_worst) {
        auto contracted = along(centroid, reflected, settings.contraction);
        const double f_c = f(contracted);
        if (f_c <= f_r)
            return accept(std::move(contracted), f_c,
                          SimplexMove::contract_outside);
    } else {
        auto contracted = along(centroid, worst, settings.contraction);
        const double f_c = f(contracted);
        if (f_c < f_worst)
            return accept(std::move(contracted), f_c,
                          SimplexMove::contract_inside);
    }

    const auto best = s.vertices.front();
    for (std::size_t v = 1; v <= last; ++v) {
        for (std::size_t i = 0; i < dim; ++i)
            s.vertices[v][i] =
                best[i] + settings.shrink * (s.vertices[v][i] - best[i]);
        s.values[v] = f(s.vertices[v]);
    }
    s.last_move = SimplexMove::shrink;
    sort_simplex(s);
    return s;
}

// --- loop adapters ---------------------------------------------------------

namespace {

class SpsaOptimizer final : public Optimizer {
  public:
    SpsaOptimizer(SpsaSettings settings, std::uint64_t seed)
        : settings_(settings), rng_(seed) {}

    Proposal propose(std::span<const double> current, double,
                     const Objective &f) override {
        return {spsa_iteration(current, f, settings_, step_++, rng_),
                std::nullopt};
    }

  private:
    SpsaSettings settings_;
    std::mt19937_64 rng_;
    std::size_t step_ = 0;
};

class NftOptimizer final : public Optimizer {
  public:
    NftOptimizer(NftSettings settings, std::size_t parameter_count)
        : settings_(std::move(settings)) {
        if (settings_.sweep_order.empty()) {
            settings_.sweep_order.resize(parameter_count);
            std::iota(settings_.sweep_order.begin(),
                      settings_.sweep_order.end(), 0);
        }
        for (auto k : settings_.sweep_order)
            if (k >= parameter_count)
                throw DomainError("nft sweep order index out of range");
    }

    Proposal propose(std::span<const double> current, double current_energy,
                     const Objective &f) override {
        const auto &order = settings_.sweep_order;
        const std::size_t k = order[step_++ % order.size()];
        return {nft_parameter_update(current, f, k, current_energy,
                                     settings_.degenerate_tolerance),
                k};
    }

  private:
    NftSettings settings_;
    std::size_t step_ = 0;
};

class SimplexOptimizer final : public Optimizer {
  public:
    explicit SimplexOptimizer(SimplexSettings settings)
        : settings_(settings) {}

    Proposal propose(std::span<const double> current, double current_energy,
                     const Objective &f) override {
        if (state_.vertices.empty()) {
            // Reuse the known energy of the start point.
            bool first = true;
            const Objective cached = [&](std::span<const double> x) {
                if (first) {
                    first = false;
                    return current_energy;
                }
                return f(x);
            };
            state_ = make_simplex(current, cached, settings_);
        }
        state_ = cobyla_like_step(std::move(state_), f, settings_);
        return {state_.best(), std::nullopt};
    }

  private:
    SimplexSettings settings_;
    SimplexState state_;
};

} // namespace

std::unique_ptr<Optimizer> make_optimizer(const OptimizerConfig &config,
                                          std::size_t parameter_count,
                                          std::uint64_t stream) {
    config.validate();
    switch (config.kind) {
    case OptimizerKind::spsa:
        return std::make_unique<SpsaOptimizer>(config.spsa,
                                               mix_seed(config.seed, stream));
    case OptimizerKind::nft:
        return std::make_unique<NftOptimizer>(config.nft, parameter_count);
    case OptimizerKind::cobyla_like:
        return std::make_unique<SimplexOptimizer>(config.simplex);
    }
    throw DomainError("unknown optimizer kind");
}

} // namespace vqh
