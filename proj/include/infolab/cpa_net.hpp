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

#ifndef INFOLAB_CPA_NET_HPP_
#define INFOLAB_CPA_NET_HPP_

#include <cstdint>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "infolab/activation.hpp"
#include "infolab/autodiff.hpp"
#include "infolab/gaussian.hpp"

namespace infolab {

/// One affine layer z = W·x + b; W is (out × in).
struct Layer {
    Eigen::MatrixXd weight;
    Eigen::VectorXd bias;
};

/**
 * Continuous piecewise-affine MLP. The activation is applied after every
 * layer except the last, which stays affine.
 */
class PwaNetwork {
public:
    PwaNetwork() = default;
    PwaNetwork(std::vector<Layer> layers, Activation act, std::uint64_t seed = 0);

    /// dims = {D, h1, ..., K}; weights and biases ~ U(±1/√fan_in).
    static PwaNetwork random(const std::vector<int>& dims, Activation act, std::uint64_t seed);

    Eigen::Index input_dim() const { return layers_.front().weight.cols(); }
    Eigen::Index output_dim() const { return layers_.back().weight.rows(); }
    std::size_t depth() const { return layers_.size(); }
    /// Total number of hidden units (length of an activation pattern).
    Eigen::Index hidden_units() const;

    const std::vector<Layer>& layers() const { return layers_; }
    std::vector<Layer>& mutable_layers() { return layers_; }
    const Activation& activation() const { return act_; }
    std::uint64_t seed() const { return seed_; }

    Eigen::VectorXd forward(const Eigen::VectorXd& x) const;
    /// Row-wise forward of an n×D batch.
    Eigen::MatrixXd forward_batch(const Eigen::MatrixXd& x) const;

    std::size_t parameter_count() const;

private:
    std::vector<Layer> layers_;
    Activation act_;
    std::uint64_t seed_ = 0;
};

/// Per-region affine map A·x + b valid on the region containing the probe input.
struct RegionAffine {
    Eigen::MatrixXd a_matrix;
    Eigen::VectorXd b_offset;
    std::vector<bool> activation_pattern;
};

enum class BoundaryPolicy {
    Throw,   ///< |pre-activation| < 1e-12 raises BoundaryInput
    Resolve, ///< accept the non-negative side and bump boundary_warning_count()
};

/// Sign pattern (pre >= 0) of every hidden unit at x.
std::vector<bool> activation_pattern(const PwaNetwork& net, const Eigen::VectorXd& x);

RegionAffine affine_extract(const PwaNetwork& net, const Eigen::VectorXd& x,
                            BoundaryPolicy policy = BoundaryPolicy::Throw);

/// Number of boundary inputs resolved so far under BoundaryPolicy::Resolve.
std::uint64_t boundary_warning_count();

struct Pushforward {
    Gaussian image;
    double purity = 1.0;
};

/// Image N(A·μ + b, A·Σ·Aᵀ) under the region at μ; purity is the fraction of
/// n_purity seeded draws from g sharing μ's activation pattern.
Pushforward pushforward_gaussian(const PwaNetwork& net, const Gaussian& g, Eigen::Index n_purity = 4096,
                                 std::uint64_t seed = 0);

nlohmann::json to_json(const PwaNetwork& net);
PwaNetwork network_from_json(const nlohmann::json& doc);

namespace ad {

/// Network parameters placed on a tape as differentiable leaves.
struct NetVars {
    std::vector<Var> weights;
    std::vector<Var> biases;

    std::vector<Var> all() const;
};

NetVars bind(Tape& tape, const PwaNetwork& net);

/// Batch forward (n×D → n×K) on the tape.
Var forward(const PwaNetwork& net, const NetVars& vars, Var x);

/// Input–output Jacobian at x as a K×D node, differentiable in the weights;
/// the activation pattern is frozen at x.
Var jacobian(const PwaNetwork& net, const NetVars& vars, const Eigen::VectorXd& x);

} // namespace ad

/// Adds deltas ordered as NetVars::all() (W₀, b₀, W₁, b₁, ...; biases 1×out) to the parameters.
void apply_update(PwaNetwork& net, const std::vector<Eigen::MatrixXd>& deltas);

} // namespace infolab

#endif // INFOLAB_CPA_NET_HPP_
