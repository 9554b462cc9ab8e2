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

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "vqh/error.hpp"
#include "vqh/format.hpp"
#include "vqh/sonification.hpp"

namespace vqh {

namespace {

std::string json_string(const std::string &s) { return nlohmann::json(s).dump(); }

void check_csv_label(const std::string &label) {
    if (label.find_first_of(",\"\r\n") != std::string::npos)
        throw DomainError("label '" + label + "' cannot be written to CSV");
}

std::vector<std::string> split_csv(std::string_view line) {
    std::vector<std::string> cells;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        cells.emplace_back(line.substr(start, comma - start));
        if (comma == std::string_view::npos)
            break;
        start = comma + 1;
    }
    return cells;
}

double number_cell(const std::string &cell, std::size_t row, std::size_t col) {
    const auto v = parse_double(cell);
    if (!v)
        throw ParseError("not a number: '" + cell + "'", row, col);
    return *v;
}

std::size_t index_cell(const std::string &cell, std::size_t row,
                       std::size_t col) {
    const double v = number_cell(cell, row, col);
    if (v < 0 || v != static_cast<double>(static_cast<std::size_t>(v)))
        throw ParseError("not a non-negative integer: '" + cell + "'", row, col);
    return static_cast<std::size_t>(v);
}

void infer_duration(SonificationStream &stream) {
    if (stream.frames.size() >= 2) {
        const double d = stream.frames[1].time - stream.frames[0].time;
        if (d > 0.0)
            stream.frame_duration = d;
    }
}

std::vector<std::string> lines_of(std::string_view text) {
    std::vector<std::string> lines;
    std::size_t start = 0;
    while (start < text.size()) {
        auto end = text.find('\n', start);
        if (end == std::string_view::npos)
            end = text.size();
        std::string line(text.substr(start, end - start));
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        lines.push_back(std::move(line));
        start = end + 1;
    }
    return lines;
}

} // namespace

std::string encode_frame_json(const Frame &frame,
                              const std::vector<std::string> &labels) {
    if (frame.marginals.size() != labels.size())
        throw DimensionError("frame marginals do not match labels");
    std::string out = "{\"step\":" + std::to_string(frame.step) +
                      ",\"time\":" + format_double(frame.time) +
                      ",\"segment\":" + std::to_string(frame.segment) +
                      ",\"marginals\":{";
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (i)
            out += ',';
        out += json_string(labels[i]) + ':' + format_double(frame.marginals[i]);
    }
    out += "},\"expectation\":" + format_double(frame.expectation) +
           ",\"u\":" + format_double(frame.u) + '}';
    return out;
}

std::string encode_stream(const SonificationStream &stream,
                          ExportFormat format) {
    std::string out;
    if (format == ExportFormat::jsonl) {
        for (const auto &f : stream.frames)
            out += encode_frame_json(f, stream.labels) + '\n';
        return out;
    }
    out = "step,time,segment";
    for (const auto &l : stream.labels) {
        check_csv_label(l);
        out += ',' + l;
    }
    out += ",expectation,u\n";
    for (const auto &f : stream.frames) {
        if (f.marginals.size() != stream.labels.size())
            throw DimensionError("frame marginals do not match labels");
        out += std::to_string(f.step) + ',' + format_double(f.time) + ',' +
               std::to_string(f.segment);
        for (double m : f.marginals)
            out += ',' + format_double(m);
        out += ',' + format_double(f.expectation) + ',' + format_double(f.u) +
               '\n';
    }
    return out;
}

std::optional<std::string> export_stream(const SonificationStream &stream,
                                         ExportFormat format,
                                         const std::string &path) {
    const auto text = encode_stream(stream, format);
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f)
        throw Error("cannot open '" + path + "' for writing");
    f << text;
    if (!f)
        throw Error("failed writing '" + path + "'");
    if (stream.frames.empty())
        return std::string("stream has no frames; wrote an empty export to ") +
               path;
    return std::nullopt;
}

SonificationStream decode_stream(std::string_view text, ExportFormat format,
                                 double frame_duration) {
    SonificationStream stream;
    stream.frame_duration = frame_duration;
    const auto lines = lines_of(text);

    if (format == ExportFormat::jsonl) {
        std::size_t row = 0;
        for (const auto &line : lines) {
            ++row;
            if (line.find_first_not_of(" \t") == std::string::npos)
                continue;
            nlohmann::ordered_json j;
            try {
                j = nlohmann::ordered_json::parse(line);
            } catch (const nlohmann::json::exception &e) {
                throw ParseError(std::string("invalid JSON: ") + e.what(), row);
            }
            try {
                Frame f;
                f.step = j.at("step").get<std::size_t>();
                f.time = j.at("time").get<double>();
                f.segment = j.at("segment").get<std::size_t>();
                f.expectation = j.at("expectation").get<double>();
                f.u = j.at("u").get<double>();
                std::vector<std::string> labels;
                for (const auto &[k, v] : j.at("marginals").items()) {
                    labels.push_back(k);
                    f.marginals.push_back(v.get<double>());
                }
                if (stream.frames.empty() && stream.labels.empty())
                    stream.labels = std::move(labels);
                else if (labels != stream.labels)
                    throw ParseError("marginal labels differ from first line",
                                     row);
                stream.frames.push_back(std::move(f));
            } catch (const nlohmann::json::exception &e) {
                throw ParseError(std::string("bad frame: ") + e.what(), row);
            }
        }
        infer_duration(stream);
        return stream;
    }

    if (lines.empty())
        throw ParseError("CSV export has no header");
    const auto header = split_csv(lines[0]);
    if (header.size() < 5 || header[0] != "step" || header[1] != "time" ||
        header[2] != "segment" || header[header.size() - 2] != "expectation" ||
        header.back() != "u")
        throw ParseError("unexpected CSV header", 1);
    stream.labels.assign(header.begin() + 3, header.end() - 2);
    for (std::size_t r = 1; r < lines.size(); ++r) {
        if (lines[r].empty())
            continue;
        const auto cells = split_csv(lines[r]);
        if (cells.size() != header.size())
            throw ParseError("expected " + std::to_string(header.size()) +
                                 " cells, found " + std::to_string(cells.size()),
                             r + 1);
        Frame f;
        f.step = index_cell(cells[0], r + 1, 1);
        f.time = number_cell(cells[1], r + 1, 2);
        f.segment = index_cell(cells[2], r + 1, 3);
        for (std::size_t c = 3; c + 2 < cells.size(); ++c)
            f.marginals.push_back(number_cell(cells[c], r + 1, c + 1));
        f.expectation = number_cell(cells[cells.size() - 2], r + 1, cells.size() - 1);
        f.u = number_cell(cells.back(), r + 1, cells.size());
        stream.frames.push_back(std::move(f));
    }
    infer_duration(stream);
    return stream;
}

SonificationStream import_stream(const std::string &path, ExportFormat format,
                                 double frame_duration) {
    std::ifstream f(path, std::ios::binary);
    if (!f)
        throw Error("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << f.rdbuf();
    return decode_stream(ss.str(), format, frame_duration);
}

std::string encode_events(const std::vector<ArpeggioEvent> &events,
                          const std::vector<std::string> &labels) {
    std::string out;
    for (const auto &e : events) {
        const std::string name =
            e.note < labels.size() ? labels[e.note] : std::to_string(e.note);
        out += "{\"onset\":" + format_double(e.onset) +
               ",\"note\":" + json_string(name) +
               ",\"index\":" + std::to_string(e.note) +
               ",\"amplitude\":" + format_double(e.amplitude) +
               ",\"frame\":" + std::to_string(e.frame) + "}\n";
    }
    return out;
}

} // namespace vqh
