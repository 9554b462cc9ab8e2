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

#include "vqh/qubo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_set>

#include "vqh/error.hpp"

namespace vqh {

namespace {

void validate_couplings(const CouplingMap &pairs, std::size_t n,
                        const char *what) {
    for (const auto &[key, value] : pairs) {
        if (key.first >= key.second || key.second >= n)
            throw DimensionError(std::string(what) + " key (" +
                                 std::to_string(key.first) + "," +
                                 std::to_string(key.second) +
                                 ") violates 0 <= i < j < n");
        if (!std::isfinite(value))
            throw DomainError(std::string(what) + " coefficient not finite");
    }
}

void check_size(std::size_t expected, std::size_t actual) {
    if (expected != actual)
        throw DimensionError("configuration has " + std::to_string(actual) +
                             " entries, problem has " +
                             std::to_string(expected));
}

// Lexicographic order of the printed bitstring (index 0 leftmost).
bool text_order(const Configuration &a, const Configuration &b) {
    return a.bits() < b.bits();
}

template <class Cost>
BruteForceResult enumerate(std::size_t n, double tolerance, Cost &&cost) {
    if (n > kMaxEnumerationSize)
        throw DomainError("enumeration bound exceeded: n = " +
                          std::to_string(n) + " > " +
                          std::to_string(kMaxEnumerationSize));
    const std::uint64_t count = std::uint64_t{1} << n;
    std::vector<double> values(count);
    double best = std::numeric_limits<double>::infinity();
    for (std::uint64_t k = 0; k < count; ++k) {
        values[k] = cost(k);
        best = std::min(best, values[k]);
    }
    BruteForceResult result{best, {}};
    for (std::uint64_t k = 0; k < count; ++k) {
        if (values[k] <= best + tolerance)
            result.argmin.push_back(Configuration::from_index(k, n));
    }
    std::sort(result.argmin.begin(), result.argmin.end(), text_order);
    return result;
}

} // namespace

std::vector<std::string> chromatic_names(std::size_t n) {
    static constexpr const char *kNames[12] = {
        "C", "C#", "D", "D#", "E", "F", "F#", "G", "G#", "A", "A#", "B"};
    std::vector<std::string> names;
    names.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::string name = kNames[i % 12];
        if (i >= 12)
            name += std::to_string(i / 12);
        names.push_back(std::move(name));
    }
    return names;
}

// --- Configuration ---------------------------------------------------------

Configuration::Configuration(std::vector<std::uint8_t> bits)
    : bits_(std::move(bits)) {
    for (auto b : bits_)
        if (b > 1)
            throw DomainError("configuration entries must be 0 or 1");
}

Configuration Configuration::from_string(std::string_view text) {
    std::vector<std::uint8_t> bits;
    bits.reserve(text.size());
    for (char ch : text) {
        if (ch != '0' && ch != '1')
            throw ParseError("bitstring may only contain 0 and 1");
        bits.push_back(static_cast<std::uint8_t>(ch - '0'));
    }
    return Configuration(std::move(bits));
}

Configuration Configuration::from_index(std::uint64_t index, std::size_t n) {
    std::vector<std::uint8_t> bits(n);
    for (std::size_t i = 0; i < n; ++i)
        bits[i] = static_cast<std::uint8_t>((index >> i) & 1U);
    return Configuration(std::move(bits));
}

std::uint64_t Configuration::to_index() const {
    std::uint64_t k = 0;
    for (std::size_t i = 0; i < bits_.size(); ++i)
        k |= std::uint64_t{bits_[i]} << i;
    return k;
}

std::string Configuration::to_string() const {
    std::string s;
    s.reserve(bits_.size());
    for (auto b : bits_)
        s.push_back(static_cast<char>('0' + b));
    return s;
}

// --- QuboProblem -----------------------------------------------------------

QuboProblem::QuboProblem(std::vector<std::string> labels,
                         std::vector<double> linear, CouplingMap quadratic)
    : labels_(std::move(labels)), linear_(std::move(linear)),
      quadratic_(std::move(quadratic)) {
    if (labels_.size() != linear_.size())
        throw DimensionError("label count " + std::to_string(labels_.size()) +
                             " != linear term count " +
                             std::to_string(linear_.size()));
    std::unordered_set<std::string> seen;
    for (const auto &name : labels_)
        if (!seen.insert(name).second)
            throw DomainError("duplicate note label '" + name + "'");
    for (double a : linear_)
        if (!std::isfinite(a))
            throw DomainError("linear coefficient not finite");
    validate_couplings(quadratic_, linear_.size(), "quadratic");
}

QuboProblem QuboProblem::zeros(std::size_t n) {
    return QuboProblem(chromatic_names(n), std::vector<double>(n, 0.0), {});
}

std::vector<NoteLabel> QuboProblem::note_labels() const {
    std::vector<NoteLabel> out;
    out.reserve(labels_.size());
    for (std::size_t i = 0; i < labels_.size(); ++i)
        out.push_back({i, labels_[i]});
    return out;
}

double QuboProblem::coupling(std::size_t i, std::size_t j) const {
    if (i > j)
        std::swap(i, j);
    auto it = quadratic_.find({i, j});
    return it == quadratic_.end() ? 0.0 : it->second;
}

std::optional<std::size_t> QuboProblem::label_index(std::string_view name) const {
    for (std::size_t i = 0; i < labels_.size(); ++i)
        if (labels_[i] == name)
            return i;
    return std::nullopt;
}

// --- IsingHamiltonian ------------------------------------------------------

IsingHamiltonian::IsingHamiltonian(std::vector<double> fields,
                                   CouplingMap couplings, double offset)
    : fields_(std::move(fields)), couplings_(std::move(couplings)),
      offset_(offset) {
    for (double h : fields_)
        if (!std::isfinite(h))
            throw DomainError("field coefficient not finite");
    if (!std::isfinite(offset_))
        throw DomainError("offset not finite");
    validate_couplings(couplings_, fields_.size(), "coupling");
}

std::vector<double> IsingHamiltonian::basis_energies() const {
    const std::size_t n = size();
    if (n > kMaxEnumerationSize)
        throw DomainError("basis enumeration bound exceeded");
    const std::uint64_t count = std::uint64_t{1} << n;
    std::vector<double> energies(count);
    for (std::uint64_t k = 0; k < count; ++k) {
        double e = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            e += ((k >> i) & 1U) ? -fields_[i] : fields_[i];
        for (const auto &[key, value] : couplings_) {
            const auto parity = ((k >> key.first) ^ (k >> key.second)) & 1U;
            e += parity ? -value : value;
        }
        energies[k] = e;
    }
    return energies;
}

// --- operations ------------------------------------------------------------

double qubo_cost(const QuboProblem &q, const Configuration &c) {
    check_size(q.size(), c.size());
    double cost = 0.0;
    for (std::size_t i = 0; i < q.size(); ++i)
        if (c[i])
            cost += q.linear()[i];
    for (const auto &[key, value] : q.quadratic())
        if (c[key.first] && c[key.second])
            cost += value;
    return cost;
}

IsingHamiltonian qubo_to_ising(const QuboProblem &q) {
    const std::size_t n = q.size();
    std::vector<double> fields(n);
    double offset = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        fields[i] = -2.0 * q.linear()[i];
        offset += 2.0 * q.linear()[i];
    }
    CouplingMap couplings;
    for (const auto &[key, value] : q.quadratic()) {
        fields[key.first] -= value;
        fields[key.second] -= value;
        offset += value;
        if (value != 0.0)
            couplings[key] = value;
    }
    return IsingHamiltonian(std::move(fields), std::move(couplings), offset);
}

double ising_energy(const IsingHamiltonian &h, const Configuration &c) {
    check_size(h.size(), c.size());
    double e = 0.0;
    for (std::size_t i = 0; i < h.size(); ++i)
        e += h.fields()[i] * c.spin(i);
    for (const auto &[key, value] : h.couplings())
        e += value * c.spin(key.first) * c.spin(key.second);
    return e;
}

BruteForceResult brute_force_solve(const QuboProblem &q, double tolerance) {
    const std::size_t n = q.size();
    return enumerate(n, tolerance, [&](std::uint64_t k) {
        double cost = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            if ((k >> i) & 1U)
                cost += q.linear()[i];
        for (const auto &[key, value] : q.quadratic())
            if (((k >> key.first) & (k >> key.second)) & 1U)
                cost += value;
        return cost;
    });
}

BruteForceResult brute_force_solve(const IsingHamiltonian &h,
                                   double tolerance) {
    const std::size_t n = h.size();
    if (n > kMaxEnumerationSize)
        throw DomainError("enumeration bound exceeded");
    const auto energies = h.basis_energies();
    return enumerate(n, tolerance,
                     [&](std::uint64_t k) { return energies[k]; });
}

IsingHamiltonian interpolate_ising(const IsingHamiltonian &h0,
                                   const IsingHamiltonian &h1, double t) {
    if (h0.size() != h1.size())
        throw DimensionError("interpolated Hamiltonians differ in spin count");
    if (!(t >= 0.0 && t <= 1.0))
        throw DomainError("interpolation parameter must lie in [0, 1]");
    if (t == 0.0)
        return h0;
    if (t == 1.0)
        return h1;
    const double s = 1.0 - t;
    std::vector<double> fields(h0.size());
    for (std::size_t i = 0; i < fields.size(); ++i)
        fields[i] = s * h0.fields()[i] + t * h1.fields()[i];
    CouplingMap couplings;
    for (const auto &[key, value] : h0.couplings())
        couplings[key] += s * value;
    for (const auto &[key, value] : h1.couplings())
        couplings[key] += t * value;
    return IsingHamiltonian(std::move(fields), std::move(couplings),
                            s * h0.offset() + t * h1.offset());
}

} // namespace vqh
