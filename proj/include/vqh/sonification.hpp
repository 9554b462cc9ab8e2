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
 * Turning iteration records into sound.
 *
 * A SonificationStream is one frame per IterationRecord: the marginals
 * (per-note loudness) and a normalised energy u in [0, 1] where 1 means
 * "at the ground energy". Mapping strategies render a stream to a mono
 * AudioBuffer.
 */

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "vqh/vqe.hpp"

namespace vqh {

enum class TuningMode { equal_temperament, harmonic_series };

struct Tuning {
    double base_hz = 261.63; // C4
    TuningMode mode = TuningMode::equal_temperament;
    std::size_t notes = 12;

    /// f_1 * 2^(i/12) or (i + 1) * f_1.
    [[nodiscard]] double frequency(std::size_t index) const;
    void validate() const;
};

struct Frame {
    std::size_t step = 0;
    double time = 0.0;
    std::size_t segment = 0;
    std::vector<double> marginals;
    double expectation = 0.0;
    double u = 0.0;

    friend bool operator==(const Frame &, const Frame &) = default;
};

struct SonificationStream {
    std::vector<std::string> labels;
    double frame_duration = 0.25;
    std::vector<Frame> frames;

    [[nodiscard]] double duration() const {
        return static_cast<double>(frames.size()) * frame_duration;
    }
    friend bool operator==(const SonificationStream &,
                           const SonificationStream &) = default;
};

/// Offline stream: u_t = (M_t - E_t) / (M_t - m) with M_t the running
/// maximum and m the minimum over the whole run; u = 0 when M_t == m.
/// Labels default to chromatic names.
SonificationStream build_stream(const RunResult &run, double frame_duration,
                                std::vector<std::string> labels = {});

/// Live variant: u from running maximum and running minimum, so it only
/// depends on frames already seen.
class RunningNormalizer {
  public:
    double push(double energy);

  private:
    std::optional<double> min_;
    std::optional<double> max_;
};

enum class Strategy { additive, inharmonic, subtractive, arpeggio };

std::string_view to_string(Strategy s);
/// Throws DomainError listing the valid names.
Strategy parse_strategy(std::string_view name);

struct MappingConfig {
    Strategy strategy = Strategy::additive;
    Tuning tuning;
    double sample_rate = 44100.0;
    /// c_n(t) = shift_scale * marginal_n(t) (inharmonic).
    double shift_scale = 0.5;
    /// Bandpass quality factor range (subtractive); Q = q_min + u (q_max - q_min).
    double q_min = 4.0;
    double q_max = 200.0;
    std::uint64_t noise_seed = 1;
    /// Notes below this marginal are not arpeggiated.
    double arp_threshold = 0.1;
    /// Onsets per second at u = 1; the floor is one onset per frame.
    double arp_max_rate = 16.0;
    /// Exponential decay time of an arpeggio tone, seconds.
    double arp_decay = 0.12;

    void validate() const;
};

struct AudioBuffer {
    double sample_rate = 44100.0;
    std::vector<double> samples;

    [[nodiscard]] double duration() const {
        return static_cast<double>(samples.size()) / sample_rate;
    }
    [[nodiscard]] double peak() const;
};

struct ArpeggioEvent {
    double onset = 0.0;
    std::size_t note = 0;
    double amplitude = 0.0;
    std::size_t frame = 0;

    friend bool operator==(const ArpeggioEvent &,
                           const ArpeggioEvent &) = default;
};

struct ArpeggioResult {
    std::vector<ArpeggioEvent> events;
    AudioBuffer buffer;
};

/// round(frames * frame_duration * sample_rate).
std::size_t buffer_length(const SonificationStream &stream, double sample_rate);

/// Marginal of `note` at time t: linear between frame centres, held
/// before the first and after the last.
double interpolated_marginal(const SonificationStream &stream,
                             std::size_t note, double t);

AudioBuffer map_additive(const SonificationStream &stream,
                         const MappingConfig &config);
/// f_n(t) = (n - c_n(t)) f_1 with n = note index + 1, partial amplitude 1/n.
AudioBuffer map_inharmonic(const SonificationStream &stream,
                           const MappingConfig &config);
/// The static harmonic series the inharmonic mapping starts from.
AudioBuffer render_harmonic_series(const MappingConfig &config,
                                   std::size_t length);
AudioBuffer map_subtractive(const SonificationStream &stream,
                            const MappingConfig &config);
ArpeggioResult map_arpeggio(const SonificationStream &stream,
                            const MappingConfig &config);

/// Onsets of one frame: notes at or above the threshold, ascending by
/// amplitude (ties by note index), at most one per slot of the current
/// rate; when slots run short the quietest notes are dropped.
std::vector<ArpeggioEvent> arpeggiate_frame(const Frame &frame,
                                            std::size_t frame_index,
                                            double frame_duration,
                                            const MappingConfig &config);

struct RenderResult {
    AudioBuffer buffer;
    std::optional<std::vector<ArpeggioEvent>> events;
};

RenderResult render(const SonificationStream &stream,
                    const MappingConfig &config);

// --- second-order bandpass -------------------------------------------------

/// Constant 0 dB peak-gain bandpass biquad (RBJ cookbook), direct form I.
class Bandpass {
  public:
    /// Throws DomainError when centre or Q give an unstable/invalid filter.
    void set(double centre_hz, double q, double sample_rate);
    double process(double x);
    /// |H(e^{j 2 pi f / fs})|.
    [[nodiscard]] double magnitude(double hz, double sample_rate) const;

  private:
    double b0_ = 0, b2_ = 0, a1_ = 0, a2_ = 0;
    double x1_ = 0, x2_ = 0, y1_ = 0, y2_ = 0;
};

// --- files -----------------------------------------------------------------

/// 16-bit PCM mono RIFF/WAVE. Samples are clipped to [-1, 1] and
/// quantised as round(x * 32767).
std::string encode_wav(const AudioBuffer &buffer);
void render_wav(const AudioBuffer &buffer, const std::string &path);
AudioBuffer decode_wav(std::string_view bytes);
AudioBuffer read_wav(const std::string &path);

enum class ExportFormat { jsonl, csv };

/// JSONL: one object per frame. CSV: header row then one row per frame.
/// Column order: step, time, segment, one column per label, expectation, u.
std::string encode_stream(const SonificationStream &stream,
                          ExportFormat format);
/// Returns a warning message for degenerate input (empty stream), if any.
std::optional<std::string> export_stream(const SonificationStream &stream,
                                         ExportFormat format,
                                         const std::string &path);
SonificationStream decode_stream(std::string_view text, ExportFormat format,
                                 double frame_duration = 0.25);
SonificationStream import_stream(const std::string &path, ExportFormat format,
                                 double frame_duration = 0.25);

/// One JSON object (no newline) in the JSONL frame format.
std::string encode_frame_json(const Frame &frame,
                              const std::vector<std::string> &labels);

std::string encode_events(const std::vector<ArpeggioEvent> &events,
                          const std::vector<std::string> &labels);

} // namespace vqh
