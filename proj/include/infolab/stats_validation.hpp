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

#ifndef INFOLAB_STATS_VALIDATION_HPP_
#define INFOLAB_STATS_VALIDATION_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "infolab/cpa_net.hpp"
#include "infolab/datagen.hpp"

namespace infolab {

struct NormalityTest {
    double z_skew = 0.0;
    double z_kurtosis = 0.0;
    double k2 = 0.0;
    double p_value = 1.0;
};

/// D'Agostino–Pearson omnibus test: skewness and Anscombe–Glynn kurtosis
/// transforms, K² = Z₁² + Z₂² against χ²(2). Requires n >= 20 and a
/// non-constant sample.
NormalityTest dagostino_pearson_test(const Eigen::VectorXd& samples);
double dagostino_pearson(const Eigen::VectorXd& samples);

/// Per-dimension test of one n×K output sample with Bonferroni correction.
struct NormalityReport {
    double noise_scale = 0.0;
    Eigen::Index prototype = 0;
    Eigen::Index n_samples = 0;
    std::vector<double> p_values; ///< per dimension; NaN for constant dimensions
    double omnibus_p = 1.0;       ///< min(1, K·min p)
    bool reject_at_99 = false;
    bool degenerate = false;      ///< every dimension constant; not tested
};

NormalityReport test_output_gaussianity(const Eigen::MatrixXd& outputs, double alpha = 0.01);

struct SweepPoint {
    double noise_scale = 0.0;
    std::vector<NormalityReport> reports;
    double rejection_fraction = 0.0; ///< over non-degenerate reports
    Eigen::Index n_tested = 0;
    bool degenerate = false;         ///< nothing testable at this σ ("degenerate, skipped")
};

/// For each σ on the grid, pushes n_per_point draws of every prototype's view
/// Gaussian (noise scale σ) through the net and tests the outputs.
std::vector<SweepPoint> gaussianity_sweep(const PwaNetwork& net, const PrototypeDataset& ds,
                                          const std::vector<double>& noise_grid, Eigen::Index n_per_point,
                                          std::uint64_t seed);

/// Spearman rank correlation with average ranks for ties.
double spearman_rho(const std::vector<double>& a, const std::vector<double>& b);

struct DistanceHistogram {
    std::vector<double> edges; ///< n_bins + 1 edges from 0 to the max distance
    std::vector<long> counts;
    long total = 0;
    double min = 0.0;
    double median = 0.0;
    double max = 0.0;
};

/// All n(n−1)/2 Euclidean distances binned on [0, max]; the last bin is closed.
DistanceHistogram pairwise_distance_histogram(const Eigen::MatrixXd& points, int n_bins);

enum class GmmCovMode { Full, FixedSmall };

/**
 * Gaussian-mixture fitting laboratory. Centroids (and in Full mode Cholesky
 * factors with log-parameterized diagonals) follow gradient ascent on the mean
 * log-likelihood; the data points can be trainable too.
 */
struct GmmLabState {
    Eigen::MatrixXd centroids;             ///< K×d
    std::vector<Eigen::MatrixXd> factors;  ///< Full mode: lower factors, Σₖ = LₖLₖᵀ
    GmmCovMode mode = GmmCovMode::Full;
    double sigma = 0.01;                   ///< FixedSmall: Σₖ = σ²I
    double init_scale = 1.0;               ///< Full: factors start at init_scale·I
    double entropy_bandwidth = 0.2;        ///< kernel covariance entropy_bandwidth·I used by centroid_entropy
    Eigen::MatrixXd inputs;                ///< N×d
    double lr_inputs = 0.0;
    double lr_params = 0.05;
    bool adam = true;                      ///< Adam-normalized steps; plain ascent otherwise
    Eigen::Index n_components = 8;         ///< used when centroids are left empty

    /// K centroids at distinct seeded input points; Full factors start at identity.
    static GmmLabState init(const Eigen::MatrixXd& inputs, Eigen::Index k, GmmCovMode mode, double sigma, double lr_params,
                            double lr_inputs, std::uint64_t seed);

    std::vector<Eigen::MatrixXd> covariances() const;
    void validate() const;
};

/// Pairwise (Bhattacharyya) entropy of the equal-weight centroid mixture with
/// kernel covariance entropy_bandwidth·I, so the value tracks centroid spread; in [0, log K].
double centroid_entropy(const GmmLabState& lab);
double mean_log_likelihood(const GmmLabState& lab);

struct GmmGradient {
    Eigen::MatrixXd centroids;
    std::vector<Eigen::MatrixXd> factors; ///< w.r.t. the factor entries, diagonal in log space
    Eigen::MatrixXd inputs;
    double value = 0.0;
};

/// Gradient of mean_log_likelihood. The input block is scaled by N, i.e. it is
/// the gradient of each point's own log-likelihood.
GmmGradient gmm_gradient(const GmmLabState& lab);

struct GmmTracePoint {
    long step = 0;
    double centroid_entropy = 0.0;
    double mean_log_likelihood = 0.0;
};

struct GmmRun {
    std::vector<GmmTracePoint> trace;
    GmmLabState final_state;
    bool aborted = false; ///< non-finite likelihood; trace holds the steps before it
};

/// `steps` gradient-ascent updates; trace at every `log_every` step plus the
/// first and last. Empty centroids are initialized from the inputs with `seed`.
GmmRun gmm_collapse_run(GmmLabState lab, long steps, std::uint64_t seed, long log_every = 1);

} // namespace infolab

#endif // INFOLAB_STATS_VALIDATION_HPP_
