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

#ifndef INFOLAB_ENTROPY_HPP_
#define INFOLAB_ENTROPY_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "infolab/autodiff.hpp"
#include "infolab/gaussian.hpp"

namespace infolab {

enum class EntropyKind { MonteCarlo, MomentUpper, PairwiseLower, PairwiseUpper, LogDet, ClosedFormGaussian };

std::string kind_name(EntropyKind kind);

/// Entropy in nats. std_error is set only for MonteCarlo estimates.
struct EntropyEstimate {
    double value = 0.0;
    EntropyKind kind = EntropyKind::ClosedFormGaussian;
    std::optional<double> std_error;
    std::optional<long> n_samples;
};

/// ½·log det(2πe·Σ). Rank-deficient covariances are jittered by `jitter` first.
EntropyEstimate gaussian_entropy(const Gaussian& g, double jitter = kDefaultJitter);

/// Plain Monte-Carlo estimate −mean(log p(xᵢ)). Samples are drawn in a fixed
/// number of seeded shards and combined in shard order, so the result does
/// not depend on the thread count. Requires n >= 100.
EntropyEstimate mc_entropy(const GaussianMixture& m, long n, std::uint64_t seed);

/// Entropy of the moment-matched Gaussian; an upper bound on the mixture entropy.
EntropyEstimate moment_upper_bound(const GaussianMixture& m, double jitter = kDefaultJitter);

enum class PairwiseSide { Lower, Upper };

/// Pairwise-distance estimate Σwᵢ H(pᵢ) − Σwᵢ log Σⱼ wⱼ exp(−D(pᵢ,pⱼ)).
/// Lower uses the Bhattacharyya distance, Upper uses KL.
EntropyEstimate pairwise_bound(const GaussianMixture& m, PairwiseSide side, double jitter = kDefaultJitter);

/// Gradient of pairwise_bound with respect to every component mean.
std::vector<Eigen::VectorXd> pairwise_bound_mean_gradient(const GaussianMixture& m, PairwiseSide side,
                                                          double jitter = kDefaultJitter);

/// ½·log det(I + K/(N·β)·ZcᵀZc) + (K/2)·log(2πe·β/K) over the column-centered batch.
EntropyEstimate logdet_batch_entropy(const Eigen::MatrixXd& z, double beta = 1.0);

namespace ad {

/// Differentiable logdet_batch_entropy.
Var logdet_batch_entropy(Var z, double beta);
/// Pairwise lower estimate of the batch viewed as an equal-weight mixture of
/// N(zᵢ, σ²I): (K/2)·log(2πeσ²) − (1/N)·Σᵢ log((1/N)·Σⱼ exp(−‖zᵢ−zⱼ‖²/(8σ²))).
Var pairwise_kernel_entropy(Var z, double sigma);
/// Gaussian entropy of the batch moments: ½·log det(2πe·(C + λI)), C with 1/N.
Var moment_entropy(Var z, double lambda);

} // namespace ad

/// Plain-value wrappers of the batch estimators above.
double pairwise_kernel_entropy(const Eigen::MatrixXd& z, double sigma);
double moment_entropy(const Eigen::MatrixXd& z, double lambda);

} // namespace infolab

#endif // INFOLAB_ENTROPY_HPP_
