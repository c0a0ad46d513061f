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

#include "infolab/linalg.hpp"

#include <cmath>

#include "infolab/error.hpp"

namespace infolab::linalg {

Eigen::MatrixXd lower_factor(const Eigen::MatrixXd& factor)
{
    const Eigen::Index d = factor.rows();
    const Eigen::Index r = factor.cols();
    Eigen::MatrixXd lower = Eigen::MatrixXd::Zero(d, d);
    if (d == 0 || r == 0) return lower;
    // Fᵀ = Q·R  =>  F·Fᵀ = Rᵀ·R, and Rᵀ is lower-trapezoidal.
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(factor.transpose());
    const Eigen::Index k = std::min(d, r);
    Eigen::MatrixXd upper = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
    for (Eigen::Index i = 0; i < k; ++i)
        if (upper(i, i) < 0.0) upper.row(i) *= -1.0;
    lower.leftCols(k) = upper.transpose();
    return lower;
}

Eigen::MatrixXd psd_factor(const Eigen::MatrixXd& cov)
{
    if (cov.rows() != cov.cols()) throw DimensionMismatch("covariance must be square");
    const Eigen::Index d = cov.rows();
    if (d == 0) return cov;
    const Eigen::MatrixXd sym = 0.5 * (cov + cov.transpose());
    Eigen::LLT<Eigen::MatrixXd> llt(sym);
    if (llt.info() == Eigen::Success) {
        Eigen::MatrixXd l = llt.matrixL();
        return l;
    }
    Eigen::LDLT<Eigen::MatrixXd> ldlt(sym);
    Eigen::VectorXd diag = ldlt.vectorD();
    const double scale = std::max(1.0, sym.diagonal().cwiseAbs().maxCoeff());
    for (Eigen::Index i = 0; i < d; ++i) {
        if (diag(i) < -1e-10 * scale) throw InvalidArgument("covariance is not positive semi-definite");
        diag(i) = std::sqrt(std::max(diag(i), 0.0));
    }
    Eigen::MatrixXd l = ldlt.matrixL();
    Eigen::MatrixXd f = ldlt.transpositionsP().transpose() * (l * diag.asDiagonal());
    return lower_factor(f);
}

double logdet_spd(const Eigen::MatrixXd& spd)
{
    Eigen::LLT<Eigen::MatrixXd> llt(spd);
    if (llt.info() != Eigen::Success) throw RankDeficientCovariance("Cholesky failed");
    const Eigen::MatrixXd& l = llt.matrixLLT();
    double s = 0.0;
    for (Eigen::Index i = 0; i < l.rows(); ++i) {
        if (!(l(i, i) > 0.0)) throw RankDeficientCovariance("zero pivot");
        s += std::log(l(i, i));
    }
    return 2.0 * s;
}

Eigen::MatrixXd pinv(const Eigen::MatrixXd& a, double rtol)
{
    if (a.size() == 0) return Eigen::MatrixXd::Zero(a.cols(), a.rows());
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Eigen::VectorXd& s = svd.singularValues();
    const double cutoff = rtol * (s.size() > 0 ? s(0) : 0.0);
    Eigen::VectorXd inv = Eigen::VectorXd::Zero(s.size());
    for (Eigen::Index i = 0; i < s.size(); ++i)
        if (s(i) > cutoff && s(i) > 0.0) inv(i) = 1.0 / s(i);
    return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

double spectral_norm(const Eigen::MatrixXd& a, int max_iter, double tol)
{
    if (a.size() == 0) return 0.0;
    const Eigen::MatrixXd gram = a.transpose() * a;
    // Deterministic start with all components populated.
    Eigen::VectorXd v = Eigen::VectorXd::LinSpaced(gram.rows(), 1.0, 2.0).normalized();
    double lambda = 0.0;
    for (int it = 0; it < max_iter; ++it) {
        Eigen::VectorXd w = gram * v;
        const double norm = w.norm();
        if (norm == 0.0) return 0.0;
        const double next = v.dot(w);
        v = w / norm;
        if (std::abs(next - lambda) <= tol * std::max(1.0, std::abs(next))) {
            lambda = next;
            break;
        }
        lambda = next;
    }
    return std::sqrt(std::max(lambda, 0.0));
}

} // namespace infolab::linalg
