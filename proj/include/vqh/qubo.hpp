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
 * QUBO problems, their Ising form, and the exhaustive oracles used to check
 * everything built on top of them.
 *
 * Bit ordering: note index i is bit i of a basis-state integer, i.e.
 * `(k >> i) & 1`. Text bitstrings print index 0 leftmost.
 */

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace vqh {

/// Canonical key of a pairwise term, always `first < second`.
using PairKey = std::pair<std::size_t, std::size_t>;
using CouplingMap = std::map<PairKey, double>;

/// Upper bound for exhaustive enumeration.
inline constexpr std::size_t kMaxEnumerationSize = 24;

struct NoteLabel {
    std::size_t index;
    std::string name;
};

/// Default note names: C, C#, ..., B, then C1, C#1, ... for larger sizes.
std::vector<std::string> chromatic_names(std::size_t n);

/// A binary assignment n_i in {0,1}.
class Configuration {
  public:
    Configuration() = default;
    explicit Configuration(std::vector<std::uint8_t> bits);

    /// Parses "100010010000" (index 0 leftmost).
    static Configuration from_string(std::string_view bits);
    /// Bit i of `index` becomes entry i.
    static Configuration from_index(std::uint64_t index, std::size_t n);

    [[nodiscard]] std::size_t size() const noexcept { return bits_.size(); }
    [[nodiscard]] std::uint8_t operator[](std::size_t i) const {
        return bits_[i];
    }
    /// Z eigenvalue of entry i: 1 - 2 n_i.
    [[nodiscard]] int spin(std::size_t i) const { return 1 - 2 * bits_[i]; }
    [[nodiscard]] std::uint64_t to_index() const;
    [[nodiscard]] std::string to_string() const;
    [[nodiscard]] const std::vector<std::uint8_t> &bits() const noexcept {
        return bits_;
    }

    friend bool operator==(const Configuration &,
                           const Configuration &) = default;
    friend auto operator<=>(const Configuration &,
                            const Configuration &) = default;

  private:
    std::vector<std::uint8_t> bits_;
};

/// Q(n) = sum_i a_i n_i + sum_{i<j} b_ij n_i n_j.
class QuboProblem {
  public:
    /// Validates shapes and finiteness; throws DomainError / DimensionError.
    QuboProblem(std::vector<std::string> labels, std::vector<double> linear,
                CouplingMap quadratic);

    /// All-zero problem with chromatic labels.
    static QuboProblem zeros(std::size_t n);

    [[nodiscard]] std::size_t size() const noexcept { return linear_.size(); }
    [[nodiscard]] const std::vector<std::string> &labels() const noexcept {
        return labels_;
    }
    [[nodiscard]] std::vector<NoteLabel> note_labels() const;
    [[nodiscard]] const std::vector<double> &linear() const noexcept {
        return linear_;
    }
    [[nodiscard]] const CouplingMap &quadratic() const noexcept {
        return quadratic_;
    }
    /// b_ij for either index order, zero when absent.
    [[nodiscard]] double coupling(std::size_t i, std::size_t j) const;
    [[nodiscard]] std::optional<std::size_t>
    label_index(std::string_view name) const;

    friend bool operator==(const QuboProblem &, const QuboProblem &) = default;

  private:
    std::vector<std::string> labels_;
    std::vector<double> linear_;
    CouplingMap quadratic_;
};

/// E(z) = sum_i h_i z_i + sum_{i<j} J_ij z_i z_j, z_i = 1 - 2 n_i.
///
/// `offset` ties it to the QUBO it came from:
/// E(z(c)) = 4 Q(c) - offset.
class IsingHamiltonian {
  public:
    IsingHamiltonian(std::vector<double> fields, CouplingMap couplings,
                     double offset = 0.0);

    [[nodiscard]] std::size_t size() const noexcept { return fields_.size(); }
    [[nodiscard]] const std::vector<double> &fields() const noexcept {
        return fields_;
    }
    [[nodiscard]] const CouplingMap &couplings() const noexcept {
        return couplings_;
    }
    [[nodiscard]] double offset() const noexcept { return offset_; }

    /// Diagonal of H: entry k is the energy of basis state k. n <= 24.
    [[nodiscard]] std::vector<double> basis_energies() const;

    /// Maps an Ising energy back to the QUBO scale: (E + offset) / 4.
    [[nodiscard]] double to_qubo_scale(double energy) const noexcept {
        return (energy + offset_) / 4.0;
    }

    friend bool operator==(const IsingHamiltonian &,
                           const IsingHamiltonian &) = default;

  private:
    std::vector<double> fields_;
    CouplingMap couplings_;
    double offset_;
};

double qubo_cost(const QuboProblem &q, const Configuration &c);
IsingHamiltonian qubo_to_ising(const QuboProblem &q);
double ising_energy(const IsingHamiltonian &h, const Configuration &c);

struct BruteForceResult {
    double minimum;
    /// All minimizers, ascending by bitstring text.
    std::vector<Configuration> argmin;
};

/// Exhaustive scan of all 2^n assignments; n <= kMaxEnumerationSize.
/// Costs within `tolerance` of the minimum count as degenerate.
BruteForceResult brute_force_solve(const QuboProblem &q,
                                   double tolerance = 1e-9);
/// Same scan on the Ising side.
BruteForceResult brute_force_solve(const IsingHamiltonian &h,
                                   double tolerance = 1e-9);

/// (1 - t) h0 + t h1, coefficient-wise including offsets.
IsingHamiltonian interpolate_ising(const IsingHamiltonian &h0,
                                   const IsingHamiltonian &h1, double t);

enum class ChordEncoding { linear, coupled, balanced };
enum class Boundary { open, periodic };

struct ChordSpec {
    std::set<std::size_t> notes;
    ChordEncoding encoding = ChordEncoding::linear;
    Boundary boundary = Boundary::periodic;
};

/// Builds the chord-favouring QUBO on `n` notes.
///
/// - linear: a = -1 on chord notes, +1 elsewhere, no couplings.
/// - coupled: a = 0; nearest neighbours couple with +1 when exactly one
///   endpoint is a chord note, -1 otherwise. Periodic closes the ring.
/// - balanced: coupled plus a_k = -1/2 sum_l b_kl, which zeroes the Ising
///   fields so the chord and its complement are degenerate.
QuboProblem chord_qubo(const ChordSpec &spec, std::size_t n);
QuboProblem chord_qubo(const ChordSpec &spec,
                       std::vector<std::string> labels);

/// Non-fatal issue with a chord spec (empty chord under coupled encodings).
std::optional<std::string> chord_warning(const ChordSpec &spec);

/// Resolves note names ("C", "E", "G") against `labels`.
std::set<std::size_t> chord_notes(const std::vector<std::string> &names,
                                  const std::vector<std::string> &labels);

ChordEncoding parse_chord_encoding(std::string_view name);
Boundary parse_boundary(std::string_view name);

// CSV matrix form: first row labels, then N rows of N cells.

/// Throws ParseError carrying row/column (1-based, counted on the physical
/// line, comment lines included).
QuboProblem parse_qubo_csv(std::string_view text);
QuboProblem load_qubo_csv(const std::string &path);
/// Canonical form: upper triangle plus diagonal, zeros elsewhere.
std::string serialize_qubo_csv(const QuboProblem &q);

} // namespace vqh
