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

#include "infolab/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <string>

#include "infolab/error.hpp"
#include "infolab/rng.hpp"

namespace infolab {

PrototypeDataset::PrototypeDataset(Eigen::MatrixXd prototypes, std::vector<Eigen::MatrixXd> tangent_factors,
                                   std::vector<int> labels, double noise_scale, double separation_floor)
    : prototypes_(std::move(prototypes)), factors_(std::move(tangent_factors)), labels_(std::move(labels)),
      noise_scale_(noise_scale)
{
    const auto n = static_cast<std::size_t>(prototypes_.rows());
    if (n == 0) throw InvalidArgument("dataset needs at least one prototype");
    if (factors_.size() != n || labels_.size() != n)
        throw DimensionMismatch("one tangent factor and one label per prototype required");
    for (const auto& f : factors_)
        if (f.rows() != prototypes_.cols()) throw DimensionMismatch("tangent factor rows != data dimension");
    for (int l : labels_)
        if (l < 0) throw InvalidArgument("labels must be non-negative");
    if (!(noise_scale_ >= 0.0)) throw InvalidArgument("noise_scale must be >= 0");
    const double sep = min_pairwise_distance(prototypes_);
    if (sep < separation_floor)
        throw InvalidArgument("prototype separation " + std::to_string(sep) + " below floor " +
                              std::to_string(separation_floor));
    for (Eigen::Index i = 0; i < prototypes_.rows(); ++i)
        if (nearest_prototype(*this, prototypes_.row(i).transpose()) != i)
            throw InvalidArgument("prototype " + std::to_string(i) + " is not its own nearest prototype");
}

int PrototypeDataset::n_classes() const { return *std::max_element(labels_.begin(), labels_.end()) + 1; }

Eigen::MatrixXd PrototypeDataset::tangent_cov(Eigen::Index n) const
{
    const auto& f = factors_[static_cast<std::size_t>(n)];
    return f * f.transpose();
}

Gaussian PrototypeDataset::view_gaussian(Eigen::Index n) const
{
    return Gaussian::from_factor(prototypes_.row(n).transpose(), noise_scale_ * factors_[static_cast<std::size_t>(n)]);
}

GaussianMixture PrototypeDataset::mixture() const
{
    std::vector<Gaussian> comps;
    for (Eigen::Index n = 0; n < size(); ++n) comps.push_back(view_gaussian(n));
    return GaussianMixture(std::move(comps));
}

PrototypeDataset PrototypeDataset::with_noise_scale(double s) const
{
    PrototypeDataset copy = *this;
    if (!(s >= 0.0)) throw InvalidArgument("noise_scale must be >= 0");
    copy.noise_scale_ = s;
    return copy;
}

ViewPairs sample_pairs(const PrototypeDataset& ds, Eigen::Index n_pairs, std::uint64_t seed)
{
    if (n_pairs < 1) throw InvalidArgument("n_pairs must be >= 1");
    Engine rng = make_engine(seed);
    std::uniform_int_distribution<Eigen::Index> pick(0, ds.size() - 1);
    std::normal_distribution<double> normal(0.0, 1.0);
    ViewPairs out;
    out.x.resize(n_pairs, ds.dim());
    out.x_prime.resize(n_pairs, ds.dim());
    out.labels.resize(static_cast<std::size_t>(n_pairs));
    out.prototype.resize(static_cast<std::size_t>(n_pairs));
    for (Eigen::Index i = 0; i < n_pairs; ++i) {
        const Eigen::Index p = pick(rng);
        const Eigen::MatrixXd& f = ds.tangent_factors()[static_cast<std::size_t>(p)];
        Eigen::VectorXd e1(f.cols()), e2(f.cols());
        for (Eigen::Index j = 0; j < f.cols(); ++j) e1(j) = normal(rng);
        for (Eigen::Index j = 0; j < f.cols(); ++j) e2(j) = normal(rng);
        out.x.row(i) = ds.prototypes().row(p) + ds.noise_scale() * (f * e1).transpose();
        out.x_prime.row(i) = ds.prototypes().row(p) + ds.noise_scale() * (f * e2).transpose();
        out.labels[static_cast<std::size_t>(i)] = ds.labels()[static_cast<std::size_t>(p)];
        out.prototype[static_cast<std::size_t>(i)] = static_cast<int>(p);
    }
    return out;
}

LabeledPoints sample_labeled(const PrototypeDataset& ds, Eigen::Index n, std::uint64_t seed)
{
    ViewPairs p = sample_pairs(ds, n, seed);
    return LabeledPoints{std::move(p.x), std::move(p.labels)};
}

Eigen::Index nearest_prototype(const PrototypeDataset& ds, const Eigen::VectorXd& x)
{
    if (x.size() != ds.dim()) throw DimensionMismatch("nearest_prototype: point dimension");
    Eigen::Index best = 0;
    double best_q = std::numeric_limits<double>::infinity();
    for (Eigen::Index n = 0; n < ds.size(); ++n) {
        const Eigen::VectorXd diff = x - ds.prototypes().row(n).transpose();
        const double q = (ds.tangent_factors()[static_cast<std::size_t>(n)].transpose() * diff).squaredNorm();
        if (q < best_q) {
            best_q = q;
            best = n;
        }
    }
    return best;
}

LabeledPoints two_moons(Eigen::Index n, double noise, std::uint64_t seed)
{
    if (n < 2 || n % 2 != 0) throw InvalidArgument("two_moons needs an even n >= 2");
    if (!(noise >= 0.0)) throw InvalidArgument("two_moons noise must be >= 0");
    const Eigen::Index half = n / 2;
    LabeledPoints out;
    out.x.resize(n, 2);
    out.labels.assign(static_cast<std::size_t>(n), 0);
    for (Eigen::Index i = 0; i < half; ++i) {
        const double t = half > 1 ? std::numbers::pi * static_cast<double>(i) / static_cast<double>(half - 1) : 0.0;
        out.x(i, 0) = std::cos(t);
        out.x(i, 1) = std::sin(t);
        out.x(half + i, 0) = 1.0 - std::cos(t);
        out.x(half + i, 1) = 0.5 - std::sin(t);
        out.labels[static_cast<std::size_t>(half + i)] = 1;
    }
    if (noise > 0.0) {
        Engine rng = make_engine(seed);
        out.x += noise * standard_normal(rng, n, 2);
    }
    return out;
}

PrototypeDataset random_prototypes(const RandomPrototypeSpec& spec)
{
    if (spec.rank < 1 || spec.rank > spec.dim) throw InvalidArgument("tangent rank must be in [1, dim]");
    if (spec.n_classes < 1) throw InvalidArgument("n_classes must be >= 1");
    Engine rng = make_engine(spec.seed);
    std::uniform_real_distribution<double> eig(0.5, 1.5);
    for (int attempt = 0; attempt < 1000; ++attempt) {
        Eigen::MatrixXd protos = spec.spread * standard_normal(rng, spec.n_prototypes, spec.dim);
        if (min_pairwise_distance(protos) < spec.separation_floor) continue;
        std::vector<Eigen::MatrixXd> factors;
        for (Eigen::Index p = 0; p < spec.n_prototypes; ++p) {
            const Eigen::MatrixXd g = standard_normal(rng, spec.dim, spec.rank);
            Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
            const Eigen::MatrixXd u = qr.householderQ() * Eigen::MatrixXd::Identity(spec.dim, spec.rank);
            Eigen::VectorXd s(spec.rank);
            for (Eigen::Index j = 0; j < spec.rank; ++j) s(j) = std::sqrt(spec.tangent_scale * eig(rng));
            factors.push_back(u * s.asDiagonal());
        }
        std::vector<int> labels;
        for (Eigen::Index p = 0; p < spec.n_prototypes; ++p) labels.push_back(static_cast<int>(p % spec.n_classes));
        try {
            return PrototypeDataset(std::move(protos), std::move(factors), std::move(labels), spec.noise_scale,
                                    spec.separation_floor);
        } catch (const InvalidArgument&) {
            continue; // self-assignment failed for this draw
        }
    }
    throw InvalidArgument("could not place prototypes above the separation floor");
}

PrototypeDataset isotropic_dataset(const LabeledPoints& points, double noise_scale)
{
    const Eigen::Index d = points.x.cols();
    std::vector<Eigen::MatrixXd> factors(static_cast<std::size_t>(points.x.rows()), Eigen::MatrixXd::Identity(d, d));
    return PrototypeDataset(points.x, std::move(factors), points.labels, noise_scale);
}

double min_pairwise_distance(const Eigen::MatrixXd& points)
{
    double best = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < points.rows(); ++i)
        for (Eigen::Index j = i + 1; j < points.rows(); ++j) best = std::min(best, (points.row(i) - points.row(j)).norm());
    return best;
}

} // namespace infolab
