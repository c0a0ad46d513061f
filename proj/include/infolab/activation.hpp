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

#ifndef INFOLAB_ACTIVATION_HPP_
#define INFOLAB_ACTIVATION_HPP_

#include <string>

namespace infolab {

enum class ActivationKind { ReLU, LeakyReLU, Abs };

/// Continuous piecewise-affine scalar nonlinearity. The non-negative side
/// (pre-activation >= 0) owns the kink, so exact zeros get slope 1.
struct Activation {
    ActivationKind kind = ActivationKind::ReLU;
    double slope = 0.01; // LeakyReLU only

    static Activation relu() { return {ActivationKind::ReLU, 0.0}; }
    static Activation leaky(double s) { return {ActivationKind::LeakyReLU, s}; }
    static Activation abs() { return {ActivationKind::Abs, 0.0}; }

    double apply(double pre) const
    {
        if (pre >= 0.0) return pre;
        switch (kind) {
        case ActivationKind::ReLU: return 0.0;
        case ActivationKind::LeakyReLU: return slope * pre;
        case ActivationKind::Abs: return -pre;
        }
        return 0.0;
    }

    double derivative(double pre) const
    {
        if (pre >= 0.0) return 1.0;
        switch (kind) {
        case ActivationKind::ReLU: return 0.0;
        case ActivationKind::LeakyReLU: return slope;
        case ActivationKind::Abs: return -1.0;
        }
        return 0.0;
    }

    /// LeakyReLU with slope 1 has no kink: one region covers the whole space,
    /// so every pattern bit reads 1 and no input is a boundary input.
    bool kinkless() const { return kind == ActivationKind::LeakyReLU && slope == 1.0; }

    std::string tag() const;
    static Activation from_tag(const std::string& tag, double slope = 0.01);

    friend bool operator==(const Activation&, const Activation&) = default;
};

} // namespace infolab

#endif // INFOLAB_ACTIVATION_HPP_
