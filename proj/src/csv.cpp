/*
 * Copyright 2026 The infolab Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "infolab/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "infolab/error.hpp"

namespace infolab {

namespace {

// One record of RFC 4180 fields. Quoted fields may hold commas, doubled
// quotes and line breaks, so the record can span several physical lines.
bool read_record(std::istream& in, std::vector<std::string>& cells)
{
    cells.clear();
    std::string line;
    if (!std::getline(in, line)) return false;
    std::string cell;
    bool quoted = false;
    for (;;) {
        if (!quoted && !line.empty() && line.back() == '\r') line.pop_back();
        for (std::size_t i = 0; i < line.size(); ++i) {
            const char c = line[i];
            if (quoted) {
                if (c != '"') {
                    cell.push_back(c);
                } else if (i + 1 < line.size() && line[i + 1] == '"') {
                    cell.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else if (c == '"') {
                quoted = true;
            } else if (c == ',') {
                cells.push_back(std::move(cell));
                cell.clear();
            } else {
                cell.push_back(c);
            }
        }
        if (!quoted) break;
        if (!std::getline(in, line)) throw InvalidArgument("csv ends inside a quoted field");
        cell.push_back('\n');
    }
    cells.push_back(std::move(cell));
    return true;
}

std::string quote_if_needed(const std::string& cell)
{
    if (cell.find_first_of(",\"\r\n") == std::string::npos) return cell;
    std::string out = "\"";
    for (char c : cell) {
        if (c == '"') out.push_back('"');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

double parse_number(const std::string& s)
{
    double v = 0.0;
    const char* b = s.data();
    const char* e = s.data() + s.size();
    while (b < e && *b == ' ') ++b;
    auto [p, ec] = std::from_chars(b, e, v);
    if (ec != std::errc() || p != e) throw InvalidArgument("not a number: '" + s + "'");
    return v;
}

} // namespace

std::size_t CsvTable::column(const std::string& name) const
{
    for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] == name) return i;
    throw InvalidArgument("csv has no column '" + name + "'");
}

CsvTable parse_csv(std::istream& in)
{
    CsvTable t;
    std::vector<std::string> cells;
    bool first = true;
    while (read_record(in, cells)) {
        if (cells.size() == 1 && cells[0].empty()) continue; // blank line
        if (first) {
            t.header = std::move(cells);
            first = false;
            continue;
        }
        if (cells.size() != t.header.size())
            throw InvalidArgument("csv row " + std::to_string(t.rows.size() + 1) + " has " + std::to_string(cells.size()) +
                                  " cells, header has " + std::to_string(t.header.size()));
        t.rows.push_back(std::move(cells));
    }
    if (first) throw InvalidArgument("csv is empty (missing header)");
    return t;
}

CsvTable read_csv(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw InvalidArgument("cannot open '" + path + "'");
    return parse_csv(in);
}

std::string to_csv_string(const CsvTable& table)
{
    std::ostringstream out;
    auto emit = [&](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) out << (i ? "," : "") << quote_if_needed(cells[i]);
        out << '\n';
    };
    emit(table.header);
    for (const auto& r : table.rows) emit(r);
    return out.str();
}

void write_csv(const std::string& path, const CsvTable& table)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InvalidArgument("cannot write '" + path + "'");
    out << to_csv_string(table);
}

std::string format_double(double v)
{
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    (void)ec;
    return std::string(buf, p);
}

Eigen::MatrixXd numeric_matrix(const CsvTable& table)
{
    Eigen::MatrixXd m(static_cast<Eigen::Index>(table.rows.size()), static_cast<Eigen::Index>(table.header.size()));
    for (std::size_t r = 0; r < table.rows.size(); ++r)
        for (std::size_t c = 0; c < table.header.size(); ++c)
            m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = parse_number(table.rows[r][c]);
    return m;
}

LabeledPoints read_labeled_csv(const std::string& path)
{
    const CsvTable t = read_csv(path);
    if (t.header.size() < 2) throw InvalidArgument("labeled csv needs at least one feature and a label column");
    const Eigen::MatrixXd m = numeric_matrix(t);
    LabeledPoints out;
    out.x = m.leftCols(m.cols() - 1);
    out.labels.reserve(static_cast<std::size_t>(m.rows()));
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        const double l = m(i, m.cols() - 1);
        if (l != std::round(l) || l < 0) throw InvalidArgument("label in row " + std::to_string(i + 1) + " is not a non-negative integer");
        out.labels.push_back(static_cast<int>(l));
    }
    return out;
}

void write_labeled_csv(const std::string& path, const LabeledPoints& data)
{
    CsvTable t;
    for (Eigen::Index c = 0; c < data.x.cols(); ++c) t.header.push_back("x" + std::to_string(c));
    t.header.push_back("label");
    for (Eigen::Index i = 0; i < data.x.rows(); ++i) {
        std::vector<std::string> row;
        for (Eigen::Index c = 0; c < data.x.cols(); ++c) row.push_back(format_double(data.x(i, c)));
        row.push_back(std::to_string(data.labels[static_cast<std::size_t>(i)]));
        t.rows.push_back(std::move(row));
    }
    write_csv(path, t);
}

} // namespace infolab
