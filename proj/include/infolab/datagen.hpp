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

#ifndef INFOLAB_DATAGEN_HPP_
#define INFOLAB_DATAGEN_HPP_

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "infolab/csv.hpp"
#include "infolab/gaussian.hpp"

namespace infolab {

/**
 * Prototype-Gaussian data model: prototype n draws views x*ₙ + s·Fₙ·ε where
 * s is the global noise scale and Fₙ (D × r) a tangent factor (Σₙ = Fₙ·Fₙᵀ).
 * Construction checks that every prototype is its own nearest prototype.
 */
class PrototypeDataset {
public:
    PrototypeDataset(Eigen::MatrixXd prototypes, std::vector<Eigen::MatrixXd> tangent_factors, std::vector<int> labels,
                     double noise_scale, double separation_floor = 0.0);

    Eigen::Index size() const { return prototypes_.rows(); }
    Eigen::Index dim() const { return prototypes_.cols(); }
    const Eigen::MatrixXd& prototypes() const { return prototypes_; }
    const std::vector<Eigen::MatrixXd>& tangent_factors() const { return factors_; }
    const std::vector<int>& labels() const { return labels_; }
    double noise_scale() const { return noise_scale_; }
    int n_classes() const;

    /// Σₙ = Fₙ·Fₙᵀ (before the noise scale).
    Eigen::MatrixXd tangent_cov(Eigen::Index n) const;
    /// View distribution of prototype n: N(x*ₙ, s²·Σₙ).
    Gaussian view_gaussian(Eigen::Index n) const;
    /// Equal-weight mixture of all view distributions.
    GaussianMixture mixture() const;

    PrototypeDataset with_noise_scale(double s) const;

private:
    Eigen::MatrixXd prototypes_;
    std::vector<Eigen::MatrixXd> factors_;
    std::vector<int> labels_;
    double noise_scale_;
};

struct ViewPairs {
    Eigen::MatrixXd x;
    Eigen::MatrixXd x_prime;
    std::vector<int> labels;
    std::vector<int> prototype;
};

/// Uniform prototype per pair, then two independent draws from its Gaussian.
ViewPairs sample_pairs(const PrototypeDataset& ds, Eigen::Index n_pairs, std::uint64_t seed);

/// Single labeled draws (one view per sample).
LabeledPoints sample_labeled(const PrototypeDataset& ds, Eigen::Index n, std::uint64_t seed);

/// argminₙ (x − x*ₙ)ᵀ Σₙ (x − x*ₙ), lowest index on ties.
Eigen::Index nearest_prototype(const PrototypeDataset& ds, const Eigen::VectorXd& x);

/// Two interleaved half circles of radius 1: the upper arc is centred at the
/// origin, the lower arc at (1, 0.5) (the usual "1 − sin − 0.5" construction).
/// The first n/2 rows carry label 0.
LabeledPoints two_moons(Eigen::Index n, double noise, std::uint64_t seed);

struct RandomPrototypeSpec {
    Eigen::Index n_prototypes = 8;
    Eigen::Index dim = 4;
    Eigen::Index rank = 2;
    int n_classes = 2;
    double spread = 3.0;        ///< prototype coordinates ~ N(0, spread²)
    double tangent_scale = 1.0; ///< eigenvalues of Σₙ drawn in tangent_scale·[0.5, 1.5]
    double noise_scale = 0.1;
    double separation_floor = 1.0;
    std::uint64_t seed = 0;

    bool operator==(const RandomPrototypeSpec&) const = default;
};

/// Prototypes with low-rank tangent covariances U·diag(s)·Uᵀ, redrawn until the
/// separation floor holds (throws after 1000 attempts).
PrototypeDataset random_prototypes(const RandomPrototypeSpec& spec);

/// Every point becomes a prototype with isotropic unit tangent factor.
PrototypeDataset isotropic_dataset(const LabeledPoints& points, double noise_scale);

/// Minimum pairwise Euclidean distance between rows (infinity for fewer than two rows).
double min_pairwise_distance(const Eigen::MatrixXd& points);

} // namespace infolab

#endif // INFOLAB_DATAGEN_HPP_
