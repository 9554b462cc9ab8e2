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

#include "vqh/error.hpp"
#include "vqh/sonification.hpp"

namespace vqh {

double Tuning::frequency(std::size_t index) const {
    if (mode == TuningMode::equal_temperament)
        return base_hz * std::exp2(static_cast<double>(index) / 12.0);
    return static_cast<double>(index + 1) * base_hz;
}

void Tuning::validate() const {
    if (!(base_hz > 0.0) || !std::isfinite(base_hz))
        throw DomainError("tuning base frequency must be positive");
    if (notes == 0)
        throw DomainError("tuning needs at least one note");
}

void MappingConfig::validate() const {
    tuning.validate();
    if (!(sample_rate > 0.0))
        throw DomainError("sample rate must be positive");
    if (!(shift_scale >= 0.0))
        throw DomainError("shift scale must be non-negative");
    if (!(q_min > 0.0) || !(q_min < q_max))
        throw DomainError("Q range must satisfy 0 < q_min < q_max");
    if (!(arp_threshold >= 0.0 && arp_threshold <= 1.0))
        throw DomainError("arpeggio threshold must lie in [0, 1]");
    if (!(arp_max_rate > 0.0))
        throw DomainError("arpeggio max rate must be positive");
    if (!(arp_decay > 0.0))
        throw DomainError("arpeggio decay must be positive");
}

std::string_view to_string(Strategy s) {
    switch (s) {
    case Strategy::additive:
        return "additive";
    case Strategy::inharmonic:
        return "inharmonic";
    case Strategy::subtractive:
        return "subtractive";
    case Strategy::arpeggio:
        return "arpeggio";
    }
    return "?";
}

Strategy parse_strategy(std::string_view name) {
    if (name == "additive")
        return Strategy::additive;
    if (name == "inharmonic")
        return Strategy::inharmonic;
    if (name == "subtractive")
        return Strategy::subtractive;
    if (name == "arpeggio")
        return Strategy::arpeggio;
    throw DomainError("unknown strategy '" + std::string(name) +
                      "' (valid: additive, inharmonic, subtractive, arpeggio)");
}

double AudioBuffer::peak() const {
    double p = 0.0;
    for (double s : samples)
        p = std::max(p, std::abs(s));
    return p;
}

SonificationStream build_stream(const RunResult &run, double frame_duration,
                                std::vector<std::string> labels) {
    if (run.records.empty())
        throw DomainError("cannot build a stream from an empty run");
    if (!(frame_duration > 0.0))
        throw DomainError("frame duration must be positive");
    const std::size_t n = run.records.front().marginals.size();
    if (labels.empty())
        labels = chromatic_names(n);
    if (labels.size() != n)
        throw DimensionError("label count does not match marginal length");

    double global_min = run.records.front().expectation;
    for (const auto &r : run.records)
        global_min = std::min(global_min, r.expectation);

    SonificationStream stream{std::move(labels), frame_duration, {}};
    stream.frames.reserve(run.records.size());
    double running_max = run.records.front().expectation;
    for (std::size_t i = 0; i < run.records.size(); ++i) {
        const auto &r = run.records[i];
        running_max = std::max(running_max, r.expectation);
        const double range = running_max - global_min;
        const double u =
            range > 0.0
                ? std::clamp((running_max - r.expectation) / range, 0.0, 1.0)
                : 0.0;
        stream.frames.push_back({r.step, static_cast<double>(i) * frame_duration,
                                 r.segment, r.marginals, r.expectation, u});
    }
    return stream;
}

double RunningNormalizer::push(double energy) {
    min_ = min_ ? std::min(*min_, energy) : energy;
    max_ = max_ ? std::max(*max_, energy) : energy;
    const double range = *max_ - *min_;
    return range > 0.0 ? std::clamp((*max_ - energy) / range, 0.0, 1.0) : 0.0;
}

std::size_t buffer_length(const SonificationStream &stream,
                          double sample_rate) {
    return static_cast<std::size_t>(std::llround(
        static_cast<double>(stream.frames.size()) * stream.frame_duration *
        sample_rate));
}

double interpolated_marginal(const SonificationStream &stream,
                             std::size_t note, double t) {
    const auto &frames = stream.frames;
    if (frames.empty())
        return 0.0;
    const double x = t / stream.frame_duration - 0.5;
    if (x <= 0.0)
        return frames.front().marginals[note];
    const auto i = static_cast<std::size_t>(std::floor(x));
    if (i + 1 >= frames.size())
        return frames.back().marginals[note];
    const double w = x - static_cast<double>(i);
    return (1.0 - w) * frames[i].marginals[note] +
           w * frames[i + 1].marginals[note];
}

} // namespace vqh
