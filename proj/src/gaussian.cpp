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

#include "infolab/gaussian.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "infolab/error.hpp"
#include "infolab/linalg.hpp"
#include "infolab/rng.hpp"

namespace infolab {

namespace {

constexpr double kLog2Pi = 1.8378770664093454835606594728112;

int factor_rank(const Eigen::MatrixXd& lower)
{
    if (lower.size() == 0) return 0;
    const double top = lower.diagonal().cwiseAbs().maxCoeff();
    if (top == 0.0) return 0;
    int r = 0;
    for (Eigen::Index i = 0; i < lower.rows(); ++i)
        if (lower(i, i) > 1e-10 * top) ++r;
    return r;
}

void require_full_rank(const Gaussian& g, const char* where)
{
    if (!g.full_rank())
        throw RankDeficientCovariance(std::string(where) + ": rank " + std::to_string(g.rank_hint()) +
                                      " < dimension " + std::to_string(g.dim()) + " (apply a jitter first)");
}

void require_same_dim(const Gaussian& p, const Gaussian& q)
{
    if (p.dim() != q.dim())
        throw DimensionMismatch("Gaussians of dimension " + std::to_string(p.dim()) + " and " +
                                std::to_string(q.dim()));
}

} // namespace

Gaussian::Gaussian(Eigen::VectorXd mean, Eigen::MatrixXd cov_factor)
    : mean_(std::move(mean)), factor_(std::move(cov_factor))
{
    const Eigen::Index d = mean_.size();
    if (factor_.rows() != d || factor_.cols() != d)
        throw DimensionMismatch("covariance factor must be " + std::to_string(d) + "x" + std::to_string(d));
    for (Eigen::Index i = 0; i < d; ++i) {
        if (factor_(i, i) < 0.0) throw InvalidArgument("covariance factor has a negative diagonal entry");
        for (Eigen::Index j = i + 1; j < d; ++j)
            if (factor_(i, j) != 0.0) throw InvalidArgument("covariance factor must be lower-triangular");
    }
    rank_ = factor_rank(factor_);
}

Gaussian Gaussian::from_covariance(Eigen::VectorXd mean, const Eigen::MatrixXd& cov)
{
    if (cov.rows() != mean.size() || cov.cols() != mean.size())
        throw DimensionMismatch("covariance shape does not match mean");
    return Gaussian(std::move(mean), linalg::psd_factor(cov));
}

Gaussian Gaussian::from_factor(Eigen::VectorXd mean, const Eigen::MatrixXd& factor)
{
    if (factor.rows() != mean.size()) throw DimensionMismatch("factor rows do not match mean");
    return Gaussian(std::move(mean), linalg::lower_factor(factor));
}

Gaussian Gaussian::isotropic(Eigen::VectorXd mean, double sigma)
{
    if (sigma < 0.0) throw InvalidArgument("sigma must be non-negative");
    const Eigen::Index d = mean.size();
    return Gaussian(std::move(mean), sigma * Eigen::MatrixXd::Identity(d, d));
}

Gaussian Gaussian::jittered(double lambda) const
{
    if (lambda < 0.0) throw InvalidArgument("jitter must be non-negative");
    Eigen::MatrixXd cov = covariance();
    cov.diagonal().array() += lambda;
    return Gaussian(mean_, linalg::psd_factor(cov));
}

Gaussian Gaussian::regularized(double lambda) const
{
    return full_rank() ? *this : jittered(lambda);
}

double Gaussian::log_det() const
{
    require_full_rank(*this, "log_det");
    return 2.0 * factor_.diagonal().array().log().sum();
}

GaussianMixture::GaussianMixture(std::vector<Gaussian> components, Eigen::VectorXd weights)
    : components_(std::move(components)), weights_(std::move(weights))
{
    if (components_.empty()) throw InvalidArgument("mixture needs at least one component");
    if (weights_.size() != static_cast<Eigen::Index>(components_.size()))
        throw DimensionMismatch("mixture has " + std::to_string(components_.size()) + " components but " +
                                std::to_string(weights_.size()) + " weights");
    for (const auto& c : components_)
        if (c.dim() != components_.front().dim()) throw DimensionMismatch("mixture components differ in dimension");
    if ((weights_.array() < 0.0).any()) throw InvalidArgument("mixture weights must be non-negative");
    if (std::abs(weights_.sum() - 1.0) > 1e-12) throw InvalidArgument("mixture weights must sum to 1");
}

GaussianMixture::GaussianMixture(std::vector<Gaussian> components)
    : GaussianMixture(components,
                      Eigen::VectorXd::Constant(static_cast<Eigen::Index>(components.size()),
                                                components.empty() ? 0.0 : 1.0 / components.size()))
{
}

GaussianMixture GaussianMixture::regularized(double lambda) const
{
    std::vector<Gaussian> out;
    out.reserve(components_.size());
    for (const auto& c : components_) out.push_back(c.regularized(lambda));
    return GaussianMixture(std::move(out), weights_);
}

double log_density(const Gaussian& g, const Eigen::VectorXd& x)
{
    if (x.size() != g.dim()) throw DimensionMismatch("point dimension does not match Gaussian");
    require_full_rank(g, "log_density");
    const Eigen::VectorXd y = g.cov_factor().triangularView<Eigen::Lower>().solve(x - g.mean());
    return -0.5 * y.squaredNorm() - g.cov_factor().diagonal().array().log().sum() -
           0.5 * static_cast<double>(g.dim()) * kLog2Pi;
}

double log_density(const GaussianMixture& m, const Eigen::VectorXd& x)
{
    const auto& comps = m.components();
    Eigen::VectorXd terms(static_cast<Eigen::Index>(comps.size()));
    for (std::size_t k = 0; k < comps.size(); ++k) {
        const double w = m.weights()(static_cast<Eigen::Index>(k));
        terms(static_cast<Eigen::Index>(k)) =
            w > 0.0 ? std::log(w) + log_density(comps[k], x) : -std::numeric_limits<double>::infinity();
    }
    const double top = terms.maxCoeff();
    return top + std::log((terms.array() - top).exp().sum());
}

Eigen::VectorXd log_density_rows(const GaussianMixture& m, const Eigen::MatrixXd& x)
{
    if (x.cols() != m.dim()) throw DimensionMismatch("point dimension does not match mixture");
    const auto& comps = m.components();
    const Eigen::Index n = x.rows();
    const double d = static_cast<double>(m.dim());
    Eigen::MatrixXd terms(n, static_cast<Eigen::Index>(comps.size()));
    for (std::size_t k = 0; k < comps.size(); ++k) {
        const Gaussian& g = comps[k];
        const double w = m.weights()(static_cast<Eigen::Index>(k));
        const auto col = static_cast<Eigen::Index>(k);
        if (!(w > 0.0)) {
            terms.col(col).setConstant(-std::numeric_limits<double>::infinity());
            continue;
        }
        require_full_rank(g, "log_density_rows");
        Eigen::MatrixXd centered = x.transpose();
        centered.colwise() -= g.mean();
        g.cov_factor().triangularView<Eigen::Lower>().solveInPlace(centered);
        const double c = std::log(w) - g.cov_factor().diagonal().array().log().sum() - 0.5 * d * kLog2Pi;
        terms.col(col) = (-0.5 * centered.colwise().squaredNorm().transpose()).array() + c;
    }
    Eigen::VectorXd out(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double top = terms.row(i).maxCoeff();
        out(i) = top + std::log((terms.row(i).array() - top).exp().sum());
    }
    return out;
}

Eigen::MatrixXd sample(const Gaussian& g, Eigen::Index n, std::uint64_t seed)
{
    if (n < 1) throw InvalidArgument("sample count must be >= 1");
    Engine rng = make_engine(seed);
    Eigen::MatrixXd eps = standard_normal(rng, n, g.dim());
    Eigen::MatrixXd out = eps * g.cov_factor().transpose();
    out.rowwise() += g.mean().transpose();
    return out;
}

Eigen::MatrixXd sample(const GaussianMixture& m, Eigen::Index n, std::uint64_t seed, std::vector<int>* component)
{
    if (n < 1) throw InvalidArgument("sample count must be >= 1");
    Engine rng = make_engine(seed);
    const Eigen::VectorXd& w = m.weights();
    std::discrete_distribution<int> pick(w.data(), w.data() + w.size());
    std::normal_distribution<double> normal(0.0, 1.0);
    const Eigen::Index d = m.dim();
    Eigen::MatrixXd out(n, d);
    Eigen::VectorXd eps(d);
    if (component) component->assign(static_cast<std::size_t>(n), 0);
    for (Eigen::Index i = 0; i < n; ++i) {
        const int k = pick(rng);
        for (Eigen::Index j = 0; j < d; ++j) eps(j) = normal(rng);
        const Gaussian& g = m.components()[static_cast<std::size_t>(k)];
        out.row(i) = (g.mean() + g.cov_factor() * eps).transpose();
        if (component) (*component)[static_cast<std::size_t>(i)] = k;
    }
    return out;
}

Moments mixture_moments(const GaussianMixture& m)
{
    const Eigen::Index d = m.dim();
    Moments out{Eigen::VectorXd::Zero(d), Eigen::MatrixXd::Zero(d, d)};
    if (m.size() == 1) {
        out.mean = m.components().front().mean();
        out.cov = m.components().front().covariance();
        return out;
    }
    for (std::size_t k = 0; k < m.size(); ++k) {
        const double w = m.weights()(static_cast<Eigen::Index>(k));
        const Gaussian& g = m.components()[k];
        out.mean += w * g.mean();
        out.cov += w * (g.covariance() + g.mean() * g.mean().transpose());
    }
    out.cov -= out.mean * out.mean.transpose();
    out.cov = 0.5 * (out.cov + out.cov.transpose());
    return out;
}

double kl_divergence(const Gaussian& p, const Gaussian& q)
{
    require_same_dim(p, q);
    require_full_rank(p, "kl_divergence");
    require_full_rank(q, "kl_divergence");
    const auto lq = q.cov_factor().triangularView<Eigen::Lower>();
    const double trace_term = lq.solve(p.cov_factor()).squaredNorm();
    const double mahal = lq.solve(q.mean() - p.mean()).squaredNorm();
    const double d = static_cast<double>(p.dim());
    const double kl = 0.5 * (trace_term + mahal - d + q.log_det() - p.log_det());
    return std::max(kl, 0.0);
}

double bhattacharyya_distance(const Gaussian& p, const Gaussian& q)
{
    require_same_dim(p, q);
    require_full_rank(p, "bhattacharyya_distance");
    require_full_rank(q, "bhattacharyya_distance");
    const Eigen::MatrixXd avg = 0.5 * (p.covariance() + q.covariance());
    Eigen::LLT<Eigen::MatrixXd> llt(avg);
    if (llt.info() != Eigen::Success) throw RankDeficientCovariance("bhattacharyya_distance: averaged covariance");
    const Eigen::VectorXd delta = p.mean() - q.mean();
    const double mahal = llt.matrixL().solve(delta).squaredNorm();
    const double logdet_avg = 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
    const double dist = mahal / 8.0 + 0.5 * (logdet_avg - 0.5 * p.log_det() - 0.5 * q.log_det());
    return std::max(dist, 0.0);
}

bool in_effective_support(const Gaussian& g, const Eigen::VectorXd& x, double eps)
{
    if (!(eps > 0.0)) throw InvalidArgument("effective-support threshold must be positive");
    return log_density(g.regularized(), x) > std::log(eps);
}

double effective_support_overlap(const GaussianMixture& m, double eps, Eigen::Index n, std::uint64_t seed)
{
    if (!(eps > 0.0)) throw InvalidArgument("effective-support threshold must be positive");
    if (n < 1) throw InvalidArgument("effective_support_overlap needs n >= 1");
    const Eigen::MatrixXd x = sample(m, n, seed);
    const double log_eps = std::log(eps);
    std::vector<Gaussian> comps;
    for (const auto& c : m.components()) comps.push_back(c.regularized());
    long shared = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
        const Eigen::VectorXd xi = x.row(i).transpose();
        int inside = 0;
        for (const auto& c : comps)
            if (log_density(c, xi) > log_eps && ++inside >= 2) break;
        if (inside >= 2) ++shared;
    }
    return static_cast<double>(shared) / static_cast<double>(n);
}

nlohmann::json to_json(const GaussianMixture& m)
{
    nlohmann::json doc;
    doc["weights"] = std::vector<double>(m.weights().data(), m.weights().data() + m.weights().size());
    nlohmann::json comps = nlohmann::json::array();
    for (const auto& g : m.components()) {
        nlohmann::json c;
        c["mean"] = std::vector<double>(g.mean().data(), g.mean().data() + g.mean().size());
        const Eigen::MatrixXd cov = g.covariance();
        nlohmann::json rows = nlohmann::json::array();
        for (Eigen::Index i = 0; i < cov.rows(); ++i) {
            std::vector<double> row(static_cast<std::size_t>(cov.cols()));
            for (Eigen::Index j = 0; j < cov.cols(); ++j) row[static_cast<std::size_t>(j)] = cov(i, j);
            rows.push_back(row);
        }
        c["cov"] = rows;
        comps.push_back(c);
    }
    doc["components"] = comps;
    return doc;
}

GaussianMixture mixture_from_json(const nlohmann::json& doc)
{
    try {
        const auto weights = doc.at("weights").get<std::vector<double>>();
        std::vector<Gaussian> comps;
        for (const auto& c : doc.at("components")) {
            const auto mean = c.at("mean").get<std::vector<double>>();
            const auto rows = c.at("cov").get<std::vector<std::vector<double>>>();
            const Eigen::Index d = static_cast<Eigen::Index>(mean.size());
            if (static_cast<Eigen::Index>(rows.size()) != d) throw DimensionMismatch("cov rows != mean size");
            Eigen::MatrixXd cov(d, d);
            for (Eigen::Index i = 0; i < d; ++i) {
                if (static_cast<Eigen::Index>(rows[static_cast<std::size_t>(i)].size()) != d)
                    throw DimensionMismatch("cov is not square");
                for (Eigen::Index j = 0; j < d; ++j) cov(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
            }
            comps.push_back(Gaussian::from_covariance(Eigen::Map<const Eigen::VectorXd>(mean.data(), d), cov));
        }
        return GaussianMixture(std::move(comps),
                               Eigen::Map<const Eigen::VectorXd>(weights.data(), static_cast<Eigen::Index>(weights.size())));
    } catch (const nlohmann::json::exception& e) {
        throw InvalidArgument(std::string("malformed mixture JSON: ") + e.what());
    }
}

} // namespace infolab
