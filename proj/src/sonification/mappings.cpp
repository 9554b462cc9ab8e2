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

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <numeric>
#include <random>

#include "../random_util.hpp"
#include "vqh/error.hpp"
#include "vqh/kernels.hpp"
#include "vqh/sonification.hpp"

namespace vqh {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void check_stream(const SonificationStream &stream,
                  const MappingConfig &config) {
    config.validate();
    if (!(stream.frame_duration > 0.0))
        throw DomainError("frame duration must be positive");
    for (const auto &f : stream.frames)
        if (f.marginals.size() != config.tuning.notes)
            throw DimensionError("tuning has " +
                                 std::to_string(config.tuning.notes) +
                                 " notes, frame has " +
                                 std::to_string(f.marginals.size()));
}

bool note_is_silent(const SonificationStream &stream, std::size_t note) {
    return std::all_of(stream.frames.begin(), stream.frames.end(),
                       [&](const Frame &f) { return f.marginals[note] == 0.0; });
}

// Amplitude envelope of one note, sampled per output sample.
std::vector<double> envelope(const SonificationStream &stream,
                             std::size_t note, std::size_t length,
                             double sample_rate) {
    std::vector<double> env(length);
    for (std::size_t s = 0; s < length; ++s)
        env[s] = interpolated_marginal(stream, note,
                                       static_cast<double>(s) / sample_rate);
    return env;
}

void limit_peak(AudioBuffer &buffer) {
    const double p = buffer.peak();
    if (p > 1.0)
        for (auto &s : buffer.samples)
            s /= p;
}

// Phase-accumulating oscillator: sample = sin(phase), then advance by the
// instantaneous frequency. Shared by the harmonic and inharmonic paths.
template <class Frequency>
void accumulate_partial(std::vector<double> &scratch, std::size_t length,
                        double sample_rate, Frequency &&freq) {
    scratch.resize(length);
    double phase = 0.0;
    for (std::size_t s = 0; s < length; ++s) {
        scratch[s] = std::sin(phase);
        phase += kTwoPi * freq(s) / sample_rate;
        if (phase >= kTwoPi)
            phase -= kTwoPi;
    }
}

double harmonic_norm(std::size_t partials) {
    double h = 0.0;
    for (std::size_t n = 1; n <= partials; ++n)
        h += 1.0 / static_cast<double>(n);
    return h;
}

} // namespace

// --- additive --------------------------------------------------------------

AudioBuffer map_additive(const SonificationStream &stream,
                         const MappingConfig &config) {
    check_stream(stream, config);
    const std::size_t n = config.tuning.notes;
    const double sr = config.sample_rate;
    AudioBuffer out{sr, std::vector<double>(buffer_length(stream, sr), 0.0)};
    const std::size_t length = out.samples.size();
    const auto &k = kernels::active();

    std::vector<double> partial(length);
    for (std::size_t note = 0; note < n; ++note) {
        if (note_is_silent(stream, note))
            continue;
        const auto env = envelope(stream, note, length, sr);
        const double omega = kTwoPi * config.tuning.frequency(note) / sr;
        for (std::size_t s = 0; s < length; ++s)
            partial[s] = env[s] * std::sin(omega * static_cast<double>(s));
        k.multiply_accumulate(out.samples, partial,
                              1.0 / static_cast<double>(n));
    }
    return out;
}

// --- inharmonic ------------------------------------------------------------

AudioBuffer render_harmonic_series(const MappingConfig &config,
                                   std::size_t length) {
    config.validate();
    const std::size_t n = config.tuning.notes;
    const double sr = config.sample_rate;
    AudioBuffer out{sr, std::vector<double>(length, 0.0)};
    const double norm = harmonic_norm(n);
    std::vector<double> scratch;
    for (std::size_t i = 0; i < n; ++i) {
        const double f = static_cast<double>(i + 1) * config.tuning.base_hz;
        accumulate_partial(scratch, length, sr, [&](std::size_t) { return f; });
        kernels::active().multiply_accumulate(
            out.samples, scratch, 1.0 / (static_cast<double>(i + 1) * norm));
    }
    return out;
}

AudioBuffer map_inharmonic(const SonificationStream &stream,
                           const MappingConfig &config) {
    check_stream(stream, config);
    if (config.tuning.mode != TuningMode::harmonic_series)
        throw DomainError("inharmonic mapping needs a harmonic-series tuning");
    const std::size_t n = config.tuning.notes;
    const double f1 = config.tuning.base_hz;
    const double sr = config.sample_rate;

    for (std::size_t i = 0; i < n; ++i) {
        double max_marginal = 0.0;
        for (const auto &f : stream.frames)
            max_marginal = std::max(max_marginal, f.marginals[i]);
        if (static_cast<double>(i + 1) - config.shift_scale * max_marginal <= 0.0)
            throw DomainError("shift scale drives partial " +
                              std::to_string(i + 1) +
                              " to a non-positive frequency");
    }

    AudioBuffer out{sr, std::vector<double>(buffer_length(stream, sr), 0.0)};
    const std::size_t length = out.samples.size();
    const double norm = harmonic_norm(n);
    std::vector<double> scratch;
    for (std::size_t i = 0; i < n; ++i) {
        const double harmonic = static_cast<double>(i + 1);
        if (config.shift_scale == 0.0 || note_is_silent(stream, i)) {
            accumulate_partial(scratch, length, sr,
                               [&](std::size_t) { return harmonic * f1; });
        } else {
            const auto env = envelope(stream, i, length, sr);
            accumulate_partial(scratch, length, sr, [&](std::size_t s) {
                return (harmonic - config.shift_scale * env[s]) * f1;
            });
        }
        kernels::active().multiply_accumulate(out.samples, scratch,
                                              1.0 / (harmonic * norm));
    }
    return out;
}

// --- subtractive -----------------------------------------------------------

void Bandpass::set(double centre_hz, double q, double sample_rate) {
    if (!(centre_hz > 0.0 && centre_hz < 0.5 * sample_rate))
        throw DomainError("bandpass centre " + std::to_string(centre_hz) +
                          " Hz outside (0, Nyquist)");
    if (!(q > 0.0) || !std::isfinite(q))
        throw DomainError("bandpass Q must be positive and finite");
    const double w0 = kTwoPi * centre_hz / sample_rate;
    const double alpha = std::sin(w0) / (2.0 * q);
    const double a0 = 1.0 + alpha;
    b0_ = alpha / a0;
    b2_ = -alpha / a0;
    a1_ = -2.0 * std::cos(w0) / a0;
    a2_ = (1.0 - alpha) / a0;
}

double Bandpass::process(double x) {
    const double y = b0_ * x + b2_ * x2_ - a1_ * y1_ - a2_ * y2_;
    x2_ = x1_;
    x1_ = x;
    y2_ = y1_;
    y1_ = y;
    return y;
}

double Bandpass::magnitude(double hz, double sample_rate) const {
    const std::complex<double> z1 = std::polar(1.0, -kTwoPi * hz / sample_rate);
    const std::complex<double> z2 = z1 * z1;
    return std::abs((b0_ + b2_ * z2) / (1.0 + a1_ * z1 + a2_ * z2));
}

AudioBuffer map_subtractive(const SonificationStream &stream,
                            const MappingConfig &config) {
    check_stream(stream, config);
    const std::size_t n = config.tuning.notes;
    const double sr = config.sample_rate;
    AudioBuffer out{sr, std::vector<double>(buffer_length(stream, sr), 0.0)};
    const std::size_t length = out.samples.size();

    // Validate every band up front so a bad config fails before rendering.
    for (std::size_t i = 0; i < n; ++i) {
        Bandpass probe;
        probe.set(config.tuning.frequency(i), config.q_min, sr);
    }

    std::mt19937_64 rng(config.noise_seed);
    std::vector<double> noise(length);
    for (auto &x : noise)
        x = detail::uniform(rng, -1.0, 1.0);

    const auto frame_of = [&](std::size_t s) {
        const auto f = static_cast<std::size_t>(static_cast<double>(s) / sr /
                                                stream.frame_duration);
        return std::min(f, stream.frames.size() - 1);
    };

    std::vector<double> band(length);
    for (std::size_t i = 0; i < n; ++i) {
        if (note_is_silent(stream, i))
            continue;
        const double centre = config.tuning.frequency(i);
        const auto env = envelope(stream, i, length, sr);
        Bandpass filter;
        std::size_t current = static_cast<std::size_t>(-1);
        for (std::size_t s = 0; s < length; ++s) {
            const std::size_t f = frame_of(s);
            if (f != current) {
                current = f;
                const double u = stream.frames[f].u;
                filter.set(centre, config.q_min + u * (config.q_max - config.q_min),
                           sr);
            }
            band[s] = env[s] * filter.process(noise[s]);
        }
        kernels::active().multiply_accumulate(out.samples, band,
                                              1.0 / static_cast<double>(n));
    }
    limit_peak(out);
    return out;
}

// --- arpeggio --------------------------------------------------------------

std::vector<ArpeggioEvent> arpeggiate_frame(const Frame &frame,
                                            std::size_t frame_index,
                                            double frame_duration,
                                            const MappingConfig &config) {
    std::vector<std::size_t> notes;
    for (std::size_t i = 0; i < frame.marginals.size(); ++i)
        if (frame.marginals[i] >= config.arp_threshold && frame.marginals[i] > 0.0)
            notes.push_back(i);
    std::stable_sort(notes.begin(), notes.end(), [&](auto a, auto b) {
        return frame.marginals[a] < frame.marginals[b];
    });
    if (notes.empty())
        return {};

    const double rate =
        std::max(1.0 / frame_duration, config.arp_max_rate * frame.u);
    const auto slots = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::floor(rate * frame_duration + 1e-9)));
    const std::size_t count = std::min(slots, notes.size());
    const std::size_t skip = notes.size() - count;

    std::vector<ArpeggioEvent> events;
    events.reserve(count);
    for (std::size_t j = 0; j < count; ++j) {
        const std::size_t note = notes[skip + j];
        events.push_back({frame.time + static_cast<double>(j) / rate, note,
                          frame.marginals[note], frame_index});
    }
    return events;
}

ArpeggioResult map_arpeggio(const SonificationStream &stream,
                            const MappingConfig &config) {
    check_stream(stream, config);
    const double sr = config.sample_rate;
    ArpeggioResult result;
    result.buffer = {sr, std::vector<double>(buffer_length(stream, sr), 0.0)};
    auto &samples = result.buffer.samples;

    for (std::size_t f = 0; f < stream.frames.size(); ++f) {
        auto events =
            arpeggiate_frame(stream.frames[f], f, stream.frame_duration, config);
        result.events.insert(result.events.end(), events.begin(), events.end());
    }

    const double attack = 0.005;
    const double tail = 5.0 * config.arp_decay;
    for (const auto &e : result.events) {
        const auto start = static_cast<std::size_t>(std::llround(e.onset * sr));
        const auto len = static_cast<std::size_t>((attack + tail) * sr);
        const double omega = kTwoPi * config.tuning.frequency(e.note) / sr;
        for (std::size_t s = 0; s < len && start + s < samples.size(); ++s) {
            const double t = static_cast<double>(s) / sr;
            const double env = t < attack
                                   ? t / attack
                                   : std::exp(-(t - attack) / config.arp_decay);
            samples[start + s] +=
                e.amplitude * env * std::sin(omega * static_cast<double>(s));
        }
    }
    limit_peak(result.buffer);
    return result;
}

RenderResult render(const SonificationStream &stream,
                    const MappingConfig &config) {
    switch (config.strategy) {
    case Strategy::additive:
        return {map_additive(stream, config), std::nullopt};
    case Strategy::inharmonic:
        return {map_inharmonic(stream, config), std::nullopt};
    case Strategy::subtractive:
        return {map_subtractive(stream, config), std::nullopt};
    case Strategy::arpeggio: {
        auto r = map_arpeggio(stream, config);
        return {std::move(r.buffer), std::move(r.events)};
    }
    }
    throw DomainError("unknown strategy");
}

} // namespace vqh
