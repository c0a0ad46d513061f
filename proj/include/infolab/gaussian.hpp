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

#ifndef INFOLAB_GAUSSIAN_HPP_
#define INFOLAB_GAUSSIAN_HPP_

#include <cstdint>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

namespace infolab {

/// Default ridge added to rank-deficient covariances before any log-det or solve.
inline constexpr double kDefaultJitter = 1e-6;

/**
 * Multivariate normal stored as mean and lower Cholesky factor L (Σ = L·Lᵀ).
 * Rank-deficient covariances are stored exactly; call jittered() before
 * evaluating densities or divergences on them.
 */
class Gaussian {
public:
    Gaussian() = default;

    /// From an arbitrary lower-triangular factor. Throws on shape errors or a
    /// non-lower-triangular / negative-diagonal factor.
    Gaussian(Eigen::VectorXd mean, Eigen::MatrixXd cov_factor);

    static Gaussian from_covariance(Eigen::VectorXd mean, const Eigen::MatrixXd& cov);
    /// Covariance F·Fᵀ for any d×r factor F (e.g. A·L for an affine image).
    static Gaussian from_factor(Eigen::VectorXd mean, const Eigen::MatrixXd& factor);
    static Gaussian isotropic(Eigen::VectorXd mean, double sigma);

    Eigen::Index dim() const { return mean_.size(); }
    const Eigen::VectorXd& mean() const { return mean_; }
    const Eigen::MatrixXd& cov_factor() const { return factor_; }
    Eigen::MatrixXd covariance() const { return factor_ * factor_.transpose(); }
    int rank_hint() const { return rank_; }
    bool full_rank() const { return rank_ == static_cast<int>(dim()); }

    /// Same mean, covariance Σ + λ·I.
    Gaussian jittered(double lambda = kDefaultJitter) const;
    /// jittered(lambda) when rank-deficient, otherwise a copy.
    Gaussian regularized(double lambda = kDefaultJitter) const;

    /// log det Σ; throws RankDeficientCovariance when singular.
    double log_det() const;

private:
    Eigen::VectorXd mean_;
    Eigen::MatrixXd factor_;
    int rank_ = 0;
};

/// Weighted Gaussian mixture; weights are non-negative and sum to 1.
class GaussianMixture {
public:
    GaussianMixture() = default;
    GaussianMixture(std::vector<Gaussian> components, Eigen::VectorXd weights);
    /// Equal weights.
    explicit GaussianMixture(std::vector<Gaussian> components);

    std::size_t size() const { return components_.size(); }
    Eigen::Index dim() const { return components_.empty() ? 0 : components_.front().dim(); }
    const std::vector<Gaussian>& components() const { return components_; }
    const Eigen::VectorXd& weights() const { return weights_; }

    GaussianMixture regularized(double lambda = kDefaultJitter) const;

private:
    std::vector<Gaussian> components_;
    Eigen::VectorXd weights_;
};

double log_density(const Gaussian& g, const Eigen::VectorXd& x);
double log_density(const GaussianMixture& m, const Eigen::VectorXd& x);
/// Mixture log-density of every row of x (n×d), one triangular solve per component.
Eigen::VectorXd log_density_rows(const GaussianMixture& m, const Eigen::MatrixXd& x);

/// n×d matrix of i.i.d. draws μ + L·ε.
Eigen::MatrixXd sample(const Gaussian& g, Eigen::Index n, std::uint64_t seed);
/// Draws from the mixture; component of each row optionally reported.
Eigen::MatrixXd sample(const GaussianMixture& m, Eigen::Index n, std::uint64_t seed,
                       std::vector<int>* component = nullptr);

struct Moments {
    Eigen::VectorXd mean;
    Eigen::MatrixXd cov;
};

Moments mixture_moments(const GaussianMixture& m);

double kl_divergence(const Gaussian& p, const Gaussian& q);
double bhattacharyya_distance(const Gaussian& p, const Gaussian& q);

/// True when p(x) > eps, i.e. x lies in the effective support {x : p(x) > eps}.
/// The threshold is a caller choice; nothing in the library fixes it.
bool in_effective_support(const Gaussian& g, const Eigen::VectorXd& x, double eps);

/// Fraction of n seeded mixture draws lying in the effective support of two or
/// more components; 0 means the supports do not overlap on the sample.
double effective_support_overlap(const GaussianMixture& m, double eps, Eigen::Index n, std::uint64_t seed);

/// JSON document {weights: [...], components: [{mean: [...], cov: [[...]]}]}.
nlohmann::json to_json(const GaussianMixture& m);
GaussianMixture mixture_from_json(const nlohmann::json& doc);

} // namespace infolab

#endif // INFOLAB_GAUSSIAN_HPP_
