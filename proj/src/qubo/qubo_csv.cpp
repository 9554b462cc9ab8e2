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
#include <fstream>
#include <sstream>
#include <unordered_map>

#include "vqh/error.hpp"
#include "vqh/format.hpp"
#include "vqh/qubo.hpp"

namespace vqh {

ParseError::ParseError(const std::string &what, std::size_t row,
                       std::size_t column)
    : Error([&] {
          std::string msg = what;
          if (row != 0) {
              msg += " (row " + std::to_string(row);
              if (column != 0)
                  msg += ", column " + std::to_string(column);
              msg += ")";
          }
          return msg;
      }()),
      row_(row), column_(column) {}

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t'))
        s.remove_prefix(1);
    while (!s.empty() &&
           (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
        s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split_cells(std::string_view line) {
    std::vector<std::string_view> cells;
    std::size_t start = 0;
    while (true) {
        auto pos = line.find(',', start);
        cells.push_back(trim(line.substr(start, pos - start)));
        if (pos == std::string_view::npos)
            break;
        start = pos + 1;
    }
    return cells;
}

struct Line {
    std::size_t number;
    std::string_view text;
};

std::vector<Line> content_lines(std::string_view text) {
    std::vector<Line> lines;
    std::size_t number = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
        auto end = text.find('\n', start);
        if (end == std::string_view::npos)
            end = text.size();
        ++number;
        auto line = trim(text.substr(start, end - start));
        if (number == 1 && line.starts_with("\xEF\xBB\xBF"))
            line.remove_prefix(3);
        if (!line.empty() && line.front() != '#')
            lines.push_back({number, line});
        if (end == text.size())
            break;
        start = end + 1;
    }
    return lines;
}

} // namespace

QuboProblem parse_qubo_csv(std::string_view text) {
    const auto lines = content_lines(text);
    if (lines.empty())
        throw ParseError("empty QUBO document");

    std::vector<std::string> labels;
    std::unordered_map<std::string_view, std::size_t> label_columns;
    const auto header = split_cells(lines[0].text);
    for (std::size_t c = 0; c < header.size(); ++c) {
        if (header[c].empty())
            throw ParseError("empty note label", lines[0].number, c + 1);
        auto [it, inserted] = label_columns.emplace(header[c], c);
        if (!inserted)
            throw ParseError("duplicate label '" + std::string(header[c]) +
                                 "' (first seen in column " +
                                 std::to_string(it->second + 1) + ")",
                             lines[0].number, c + 1);
        labels.emplace_back(header[c]);
    }

    const std::size_t n = labels.size();
    if (lines.size() - 1 != n)
        throw ParseError("matrix is not square: " + std::to_string(n) +
                             " labels but " +
                             std::to_string(lines.size() - 1) + " rows",
                         lines.back().number);

    std::vector<double> linear(n, 0.0);
    CouplingMap quadratic;
    for (std::size_t r = 0; r < n; ++r) {
        const auto &line = lines[r + 1];
        const auto cells = split_cells(line.text);
        if (cells.size() != n)
            throw ParseError("matrix is not square: row has " +
                                 std::to_string(cells.size()) +
                                 " cells, expected " + std::to_string(n),
                             line.number);
        for (std::size_t c = 0; c < n; ++c) {
            auto value = parse_double(cells[c]);
            if (!value)
                throw ParseError("non-numeric cell '" +
                                     std::string(cells[c]) + "'",
                                 line.number, c + 1);
            if (!std::isfinite(*value))
                throw ParseError("non-finite cell", line.number, c + 1);
            if (r == c)
                linear[r] = *value;
            else if (*value != 0.0)
                quadratic[{std::min(r, c), std::max(r, c)}] += *value;
        }
    }
    std::erase_if(quadratic, [](const auto &kv) { return kv.second == 0.0; });
    return QuboProblem(std::move(labels), std::move(linear),
                       std::move(quadratic));
}

QuboProblem load_qubo_csv(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error("cannot open QUBO file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    try {
        return parse_qubo_csv(buf.str());
    } catch (const ParseError &e) {
        throw ParseError(path + ": " + e.what());
    }
}

std::string serialize_qubo_csv(const QuboProblem &q) {
    const std::size_t n = q.size();
    std::string out;
    for (std::size_t i = 0; i < n; ++i) {
        if (i)
            out += ',';
        out += q.labels()[i];
    }
    out += '\n';
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t c = 0; c < n; ++c) {
            if (c)
                out += ',';
            double v = 0.0;
            if (r == c)
                v = q.linear()[r];
            else if (r < c)
                v = q.coupling(r, c);
            out += format_double(v);
        }
        out += '\n';
    }
    return out;
}

} // namespace vqh
