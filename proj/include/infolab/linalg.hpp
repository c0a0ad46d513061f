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

#ifndef INFOLAB_LINALG_HPP_
#define INFOLAB_LINALG_HPP_

#include <Eigen/Dense>

namespace infolab::linalg {

/// Lower-triangular L with non-negative diagonal such that L·Lᵀ = F·Fᵀ.
/// F may be any d×r matrix (rank-deficient allowed).
Eigen::MatrixXd lower_factor(const Eigen::MatrixXd& factor);

/// Lower-triangular factor of a symmetric PSD matrix. Throws InvalidArgument
/// when the matrix has a clearly negative eigen-direction.
Eigen::MatrixXd psd_factor(const Eigen::MatrixXd& cov);

/// log det of an SPD matrix by Cholesky. Throws RankDeficientCovariance.
double logdet_spd(const Eigen::MatrixXd& spd);

/// Moore–Penrose pseudoinverse by SVD; singular values below rtol·σ_max are zeroed.
Eigen::MatrixXd pinv(const Eigen::MatrixXd& a, double rtol = 1e-10);

/// Largest singular value by power iteration on AᵀA.
double spectral_norm(const Eigen::MatrixXd& a, int max_iter = 100, double tol = 1e-10);

} // namespace infolab::linalg

#endif // INFOLAB_LINALG_HPP_
