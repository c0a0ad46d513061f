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

#ifndef INFOLAB_ERROR_HPP_
#define INFOLAB_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace infolab {

/// Base class of every error raised by the library. `kind()` is a stable
/// machine-readable tag used by the CLI error JSON.
class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& message)
        : std::runtime_error(message), kind_(std::move(kind)) {}
    const std::string& kind() const noexcept { return kind_; }

private:
    std::string kind_;
};

class DimensionMismatch : public Error {
public:
    explicit DimensionMismatch(const std::string& what) : Error("dimension_mismatch", what) {}
};

class RankDeficientCovariance : public Error {
public:
    explicit RankDeficientCovariance(const std::string& what)
        : Error("rank_deficient_covariance", "rank-deficient covariance: " + what) {}
};

class BoundaryInput : public Error {
public:
    explicit BoundaryInput(const std::string& what) : Error("boundary_input", "boundary input: " + what) {}
};

class InsufficientSamples : public Error {
public:
    explicit InsufficientSamples(const std::string& what)
        : Error("insufficient_samples", "insufficient samples: " + what) {}
};

class InvalidArgument : public Error {
public:
    explicit InvalidArgument(const std::string& what) : Error("invalid_argument", what) {}
};

class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& what) : Error("config_error", what) {}
};

class NumericalFailure : public Error {
public:
    explicit NumericalFailure(const std::string& what) : Error("numerical_failure", what) {}
};

} // namespace infolab

#endif // INFOLAB_ERROR_HPP_
