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

#ifndef INFOLAB_CSV_HPP_
#define INFOLAB_CSV_HPP_

#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace infolab {

/// Header plus rows of string cells. Cells holding commas, quotes or line
/// breaks are written as RFC 4180 quoted fields.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::size_t column(const std::string& name) const;
};

CsvTable read_csv(const std::string& path);
CsvTable parse_csv(std::istream& in);
void write_csv(const std::string& path, const CsvTable& table);
std::string to_csv_string(const CsvTable& table);

/// Shortest decimal form that round-trips a double ("%.17g" trimmed).
std::string format_double(double v);

/// Points with integer labels; on disk the label is the last column.
struct LabeledPoints {
    Eigen::MatrixXd x;
    std::vector<int> labels;
};

LabeledPoints read_labeled_csv(const std::string& path);
void write_labeled_csv(const std::string& path, const LabeledPoints& data);

/// All-numeric table as a matrix (header ignored).
Eigen::MatrixXd numeric_matrix(const CsvTable& table);

} // namespace infolab

#endif // INFOLAB_CSV_HPP_
