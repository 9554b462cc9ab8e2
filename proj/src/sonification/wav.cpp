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
#include <cstring>
#include <fstream>
#include <sstream>

#include "vqh/error.hpp"
#include "vqh/sonification.hpp"

namespace vqh {

namespace {

void put_u32(std::string &out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i)
        out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

void put_u16(std::string &out, std::uint16_t v) {
    out.push_back(static_cast<char>(v & 0xFF));
    out.push_back(static_cast<char>((v >> 8) & 0xFF));
}

std::uint32_t get_u32(std::string_view b, std::size_t at) {
    std::uint32_t v = 0;
    for (int i = 3; i >= 0; --i)
        v = (v << 8) | static_cast<unsigned char>(b[at + i]);
    return v;
}

std::uint16_t get_u16(std::string_view b, std::size_t at) {
    return static_cast<std::uint16_t>(static_cast<unsigned char>(b[at]) |
                                      (static_cast<unsigned char>(b[at + 1]) << 8));
}

} // namespace

std::string encode_wav(const AudioBuffer &buffer) {
    if (!(buffer.sample_rate > 0.0) || buffer.sample_rate > 4294967295.0)
        throw DomainError("invalid sample rate for WAV");
    const auto rate = static_cast<std::uint32_t>(std::llround(buffer.sample_rate));
    const auto data_bytes = static_cast<std::uint32_t>(buffer.samples.size() * 2);

    std::string out;
    out.reserve(44 + data_bytes);
    out += "RIFF";
    put_u32(out, 36 + data_bytes);
    out += "WAVEfmt ";
    put_u32(out, 16);
    put_u16(out, 1); // PCM
    put_u16(out, 1); // mono
    put_u32(out, rate);
    put_u32(out, rate * 2);
    put_u16(out, 2);
    put_u16(out, 16);
    out += "data";
    put_u32(out, data_bytes);
    for (double x : buffer.samples) {
        const double c = std::isfinite(x) ? std::clamp(x, -1.0, 1.0) : 0.0;
        const auto q = static_cast<std::int16_t>(std::lround(c * 32767.0));
        put_u16(out, static_cast<std::uint16_t>(q));
    }
    return out;
}

void render_wav(const AudioBuffer &buffer, const std::string &path) {
    const auto bytes = encode_wav(buffer);
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f)
        throw Error("cannot open '" + path + "' for writing");
    f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!f)
        throw Error("failed writing '" + path + "'");
}

AudioBuffer decode_wav(std::string_view bytes) {
    if (bytes.size() < 12 || bytes.substr(0, 4) != "RIFF" ||
        bytes.substr(8, 4) != "WAVE")
        throw ParseError("not a RIFF/WAVE file");
    std::size_t pos = 12;
    std::optional<std::uint32_t> rate;
    while (pos + 8 <= bytes.size()) {
        const auto id = bytes.substr(pos, 4);
        const std::uint32_t size = get_u32(bytes, pos + 4);
        const std::size_t body = pos + 8;
        if (body + size > bytes.size())
            throw ParseError("truncated WAV chunk");
        if (id == "fmt ") {
            if (size < 16 || get_u16(bytes, body) != 1 ||
                get_u16(bytes, body + 2) != 1 || get_u16(bytes, body + 14) != 16)
                throw ParseError("only 16-bit PCM mono WAV is supported");
            rate = get_u32(bytes, body + 4);
        } else if (id == "data") {
            if (!rate)
                throw ParseError("WAV data chunk before fmt chunk");
            AudioBuffer out{static_cast<double>(*rate), {}};
            out.samples.resize(size / 2);
            for (std::size_t i = 0; i < out.samples.size(); ++i)
                out.samples[i] =
                    static_cast<std::int16_t>(get_u16(bytes, body + 2 * i)) /
                    32767.0;
            return out;
        }
        pos = body + size + (size & 1);
    }
    throw ParseError("WAV has no data chunk");
}

AudioBuffer read_wav(const std::string &path) {
    std::ifstream f(path, std::ios::binary);
    if (!f)
        throw Error("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << f.rdbuf();
    return decode_wav(ss.str());
}

} // namespace vqh
