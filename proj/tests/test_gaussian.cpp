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


#include <doctest.h>

#include <cmath>
#include <numbers>

#include "infolab/error.hpp"
#include "infolab/gaussian.hpp"
#include "test_support.hpp"

using namespace infolab;
using infolab::testing::randn;
using infolab::testing::randn_vec;
using infolab::testing::random_spd;

namespace {

const double kLog2Pi = std::log(2.0 * std::numbers::pi);

// Dense-inverse log density, written without the Cholesky path.
double dense_log_density(const Eigen::VectorXd& mu, const Eigen::MatrixXd& cov, const Eigen::VectorXd& x)
{
    const Eigen::VectorXd r = x - mu;
    const double quad = r.dot(cov.inverse() * r);
    return -0.5 * (static_cast<double>(mu.size()) * kLog2Pi + std::log(cov.determinant()) + quad);
}

Gaussian random_gaussian(Eigen::Index d, std::uint64_t seed)
{
    return Gaussian::from_covariance(randn_vec(d, seed), random_spd(d, seed + 1000));
}

} // namespace

TEST_CASE("log density at the mode of standard normals")
{
    CHECK(log_density(Gaussian::isotropic(Eigen::VectorXd::Zero(1), 1.0), Eigen::VectorXd::Zero(1)) ==
          doctest::Approx(-0.9189385332046727).epsilon(1e-14));
    for (int d = 1; d <= 6; ++d) {
        const Eigen::VectorXd mu = randn_vec(d, static_cast<std::uint64_t>(d));
        CHECK(log_density(Gaussian::isotropic(mu, 1.0), mu) == doctest::Approx(-0.5 * d * kLog2Pi).epsilon(1e-13));
    }
}

TEST_CASE("log density agrees with a dense inverse")
{
    for (std::uint64_t s = 0; s < 10; ++s) {
        const Eigen::MatrixXd cov = random_spd(3, s);
        const Eigen::VectorXd mu = randn_vec(3, s + 50);
        const Eigen::VectorXd x = randn_vec(3, s + 90);
        const Gaussian g = Gaussian::from_covariance(mu, cov);
        CHECK(log_density(g, x) == doctest::Approx(dense_log_density(mu, cov, x)).epsilon(1e-10));
    }
}

TEST_CASE("singular covariance is refused until jittered")
{
    Eigen::MatrixXd f(2, 1);
    f << 1.0, 2.0;
    const Gaussian g = Gaussian::from_factor(Eigen::VectorXd::Zero(2), f);
    CHECK(g.rank_hint() == 1);
    CHECK_FALSE(g.full_rank());
    CHECK_THROWS_AS(log_density(g, Eigen::VectorXd::Zero(2)), RankDeficientCovariance);
    CHECK_THROWS_AS(g.log_det(), RankDeficientCovariance);
    CHECK(std::isfinite(log_density(g.jittered(), Eigen::VectorXd::Zero(2))));
    CHECK(g.regularized().full_rank());
}

TEST_CASE("factor invariants")
{
    for (std::uint64_t s = 0; s < 10; ++s) {
        const Eigen::MatrixXd cov = random_spd(5, s);
        const Gaussian g = Gaussian::from_covariance(Eigen::VectorXd::Zero(5), cov);
        const Eigen::MatrixXd& l = g.cov_factor();
        CHECK(l.isLowerTriangular());
        CHECK((l.diagonal().array() >= 0.0).all());
        CHECK((g.covariance() - cov).norm() <= 1e-10 * cov.norm());
        CHECK((g.covariance() - g.covariance().transpose()).norm() == 0.0);
    }
    // Low-rank factors keep a lower-triangular, non-negative-diagonal form.
    const Eigen::MatrixXd f = randn(4, 2, 7);
    const Gaussian g = Gaussian::from_factor(Eigen::VectorXd::Zero(4), f);
    CHECK(g.cov_factor().isLowerTriangular());
    CHECK((g.cov_factor().diagonal().array() >= 0.0).all());
    CHECK((g.covariance() - f * f.transpose()).norm() <= 1e-10 * (f * f.transpose()).norm());
    CHECK(g.rank_hint() == 2);

    Eigen::MatrixXd upper = Eigen::MatrixXd::Identity(2, 2);
    upper(0, 1) = 0.5;
    CHECK_THROWS_AS(Gaussian(Eigen::VectorXd::Zero(2), upper), InvalidArgument);
    CHECK_THROWS_AS(Gaussian(Eigen::VectorXd::Zero(2), -Eigen::MatrixXd::Identity(2, 2)), InvalidArgument);
    CHECK_THROWS_AS(Gaussian(Eigen::VectorXd::Zero(3), Eigen::MatrixXd::Identity(2, 2)), DimensionMismatch);
}

TEST_CASE("mixture weights are validated")
{
    std::vector<Gaussian> comps{Gaussian::isotropic(Eigen::VectorXd::Zero(2), 1.0),
                                Gaussian::isotropic(Eigen::VectorXd::Ones(2), 1.0)};
    CHECK_THROWS_AS(GaussianMixture(comps, Eigen::Vector2d(0.5, 0.6)), InvalidArgument);
    CHECK_THROWS_AS(GaussianMixture(comps, Eigen::Vector2d(1.5, -0.5)), InvalidArgument);
    CHECK_THROWS_AS(GaussianMixture(comps, Eigen::Vector3d(0.2, 0.3, 0.5)), DimensionMismatch);
    const GaussianMixture m(comps);
    CHECK(std::abs(m.weights().sum() - 1.0) <= 1e-12);
}

TEST_CASE("sampling")
{
    const Eigen::VectorXd mu = randn_vec(3, 1);
    const Eigen::MatrixXd x = sample(Gaussian::isotropic(mu, 0.0), 100, 3);
    for (Eigen::Index i = 0; i < x.rows(); ++i) CHECK(x.row(i).transpose() == mu);

    const Eigen::MatrixXd z = sample(Gaussian::isotropic(Eigen::VectorXd::Zero(2), 1.0), 100000, 11);
    CHECK(z.colwise().mean().cwiseAbs().maxCoeff() < 0.02);

    const Gaussian g = random_gaussian(4, 5);
    CHECK(sample(g, 257, 99) == sample(g, 257, 99));
    CHECK(sample(g, 257, 99) != sample(g, 257, 100));
    CHECK_THROWS_AS(sample(g, 0, 1), InvalidArgument);
}

TEST_CASE("mixture moments")
{
    const Gaussian g = random_gaussian(3, 2);
    const Moments one = mixture_moments(GaussianMixture({g}));
    CHECK(one.mean == g.mean());
    CHECK(one.cov == g.covariance());

    const GaussianMixture pm({Gaussian::isotropic(Eigen::VectorXd::Constant(1, 1.0), 0.0),
                              Gaussian::isotropic(Eigen::VectorXd::Constant(1, -1.0), 0.0)});
    const Moments two = mixture_moments(pm);
    CHECK(two.mean(0) == doctest::Approx(0.0));
    CHECK(two.cov(0, 0) == doctest::Approx(1.0));
}

TEST_CASE("mixture moments match a million samples")
{
    std::vector<Gaussian> comps;
    for (std::uint64_t k = 0; k < 4; ++k) comps.push_back(random_gaussian(3, 10 + k));
    const GaussianMixture m(comps, Eigen::Vector4d(0.1, 0.2, 0.3, 0.4));
    const Moments mom = mixture_moments(m);
    CHECK((mom.cov - mom.cov.transpose()).norm() == doctest::Approx(0.0));
    CHECK(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(mom.cov).eigenvalues().minCoeff() > 0.0);

    const long n = 1000000;
    const Eigen::MatrixXd x = sample(m, n, 2024);
    const Eigen::RowVectorXd mean = x.colwise().mean();
    const Eigen::MatrixXd xc = x.rowwise() - mean;
    for (Eigen::Index i = 0; i < 3; ++i) {
        const double se = std::sqrt(xc.col(i).squaredNorm() / (n - 1) / n);
        CHECK(std::abs(mean(i) - mom.mean(i)) <= 3.0 * se);
        for (Eigen::Index j = 0; j <= i; ++j) {
            const Eigen::ArrayXd prod = xc.col(i).array() * xc.col(j).array();
            const double c = prod.mean();
            const double se_c = std::sqrt((prod - c).square().sum() / (n - 1) / n);
            CHECK(std::abs(c - mom.cov(i, j)) <= 3.0 * se_c);
        }
    }
}

TEST_CASE("sample moments converge at the square-root rate")
{
    const Gaussian g = random_gaussian(3, 31);
    const GaussianMixture m({g, random_gaussian(3, 32)});
    const Moments mom = mixture_moments(m);
    const double sd = std::sqrt(mom.cov.trace());
    for (long n : {1000L, 100000L}) {
        const Eigen::MatrixXd x = sample(m, n, 77);
        const double err = (x.colwise().mean().transpose() - mom.mean).norm();
        CHECK(err <= 4.0 * sd / std::sqrt(static_cast<double>(n)));
    }
}

TEST_CASE("KL divergence")
{
    const Gaussian g = random_gaussian(4, 3);
    CHECK(kl_divergence(g, g) == doctest::Approx(0.0));
    CHECK(kl_divergence(Gaussian::isotropic(Eigen::VectorXd::Zero(1), 1.0),
                        Gaussian::isotropic(Eigen::VectorXd::Ones(1), 1.0)) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK_THROWS_AS(kl_divergence(g, random_gaussian(3, 1)), DimensionMismatch);

    const Gaussian p = random_gaussian(4, 40);
    const Gaussian q = Gaussian::from_covariance(randn_vec(4, 41) * 0.5, random_spd(4, 42, 1.0));
    const long n = 1000000;
    const Eigen::MatrixXd x = sample(p, n, 43);
    const Eigen::VectorXd lp = log_density_rows(GaussianMixture({p}), x);
    const Eigen::VectorXd lq = log_density_rows(GaussianMixture({q}), x);
    const Eigen::ArrayXd diff = (lp - lq).array();
    const double est = diff.mean();
    const double se = std::sqrt((diff - est).square().sum() / (n - 1) / n);
    const double kl = kl_divergence(p, q);
    CHECK(kl > 0.0);
    CHECK(std::abs(est - kl) <= 3.0 * se);
}

TEST_CASE("Bhattacharyya distance")
{
    const Gaussian p = random_gaussian(4, 8);
    const Gaussian q = random_gaussian(4, 9);
    CHECK(bhattacharyya_distance(p, p) == doctest::Approx(0.0));
    CHECK(bhattacharyya_distance(p, q) == doctest::Approx(bhattacharyya_distance(q, p)).epsilon(1e-12));
    CHECK(bhattacharyya_distance(p, q) > 0.0);
    CHECK(bhattacharyya_distance(Gaussian::isotropic(Eigen::VectorXd::Zero(1), 1.0),
                                 Gaussian::isotropic(Eigen::VectorXd::Constant(1, 2.0), 1.0)) ==
          doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("divergences are rotation invariant")
{
    for (std::uint64_t s = 0; s < 10; ++s) {
        const Eigen::MatrixXd rot = Eigen::HouseholderQR<Eigen::MatrixXd>(randn(4, 4, s + 200)).householderQ();
        const Eigen::MatrixXd cp = random_spd(4, s), cq = random_spd(4, s + 1);
        const Eigen::VectorXd mp = randn_vec(4, s + 2), mq = randn_vec(4, s + 3);
        const Gaussian p = Gaussian::from_covariance(mp, cp), q = Gaussian::from_covariance(mq, cq);
        const Gaussian rp = Gaussian::from_covariance(rot * mp, rot * cp * rot.transpose());
        const Gaussian rq = Gaussian::from_covariance(rot * mq, rot * cq * rot.transpose());
        CHECK(testing::rel_error(kl_divergence(p, q), kl_divergence(rp, rq)) <= 1e-8);
        CHECK(testing::rel_error(bhattacharyya_distance(p, q), bhattacharyya_distance(rp, rq)) <= 1e-8);
    }
}

TEST_CASE("densities integrate to one on a grid")
{
    {
        const Gaussian g = Gaussian::isotropic(Eigen::VectorXd::Constant(1, 0.3), 0.7);
        const double h = 1e-3;
        double total = 0.0;
        for (double x = -8.0; x <= 8.0; x += h) total += std::exp(log_density(g, Eigen::VectorXd::Constant(1, x))) * h;
        CHECK(total == doctest::Approx(1.0).epsilon(1e-3));
    }
    {
        Eigen::Matrix2d cov;
        cov << 1.0, 0.4, 0.4, 0.5;
        const Gaussian g = Gaussian::from_covariance(Eigen::Vector2d(0.2, -0.1), cov);
        const double h = 0.02;
        double total = 0.0;
        for (double x = -7.0; x <= 7.0; x += h)
            for (double y = -7.0; y <= 7.0; y += h) total += std::exp(log_density(g, Eigen::Vector2d(x, y))) * h * h;
        CHECK(total == doctest::Approx(1.0).epsilon(1e-3));
    }
}

TEST_CASE("mixture density and JSON round trip")
{
    std::vector<Gaussian> comps{random_gaussian(2, 1), random_gaussian(2, 2), random_gaussian(2, 3)};
    const GaussianMixture m(comps, Eigen::Vector3d(0.2, 0.5, 0.3));
    const Eigen::MatrixXd x = randn(20, 2, 4);
    const Eigen::VectorXd rows = log_density_rows(m, x);
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        double p = 0.0;
        for (std::size_t k = 0; k < comps.size(); ++k)
            p += m.weights()(static_cast<Eigen::Index>(k)) * std::exp(log_density(comps[k], x.row(i).transpose()));
        CHECK(rows(i) == doctest::Approx(std::log(p)).epsilon(1e-12));
        CHECK(log_density(m, x.row(i).transpose()) == doctest::Approx(rows(i)).epsilon(1e-12));
    }
    const GaussianMixture back = mixture_from_json(to_json(m));
    REQUIRE(back.size() == 3);
    CHECK((back.weights() - m.weights()).norm() == 0.0);
    for (std::size_t k = 0; k < 3; ++k) {
        CHECK(back.components()[k].mean() == m.components()[k].mean());
        CHECK((back.components()[k].covariance() - m.components()[k].covariance()).norm() <= 1e-12);
    }
    CHECK_THROWS_AS(mixture_from_json(nlohmann::json::parse(R"({"weights":[1]})")), InvalidArgument);
}

TEST_CASE("effective support threshold is a parameter")
{
    const Gaussian g = Gaussian::isotropic(Eigen::VectorXd::Zero(2), 1.0);
    CHECK(in_effective_support(g, Eigen::VectorXd::Zero(2), 1e-3));
    CHECK_FALSE(in_effective_support(g, Eigen::Vector2d(10.0, 0.0), 1e-3));
    // Peak density is 1/(2π) ≈ 0.159, so a larger threshold empties the support.
    CHECK_FALSE(in_effective_support(g, Eigen::VectorXd::Zero(2), 0.2));
    CHECK_THROWS_AS(in_effective_support(g, Eigen::VectorXd::Zero(2), 0.0), InvalidArgument);

    const GaussianMixture far({Gaussian::isotropic(Eigen::Vector2d(-50.0, 0.0), 1.0),
                               Gaussian::isotropic(Eigen::Vector2d(50.0, 0.0), 1.0)});
    const GaussianMixture near({Gaussian::isotropic(Eigen::Vector2d(-0.5, 0.0), 1.0),
                                Gaussian::isotropic(Eigen::Vector2d(0.5, 0.0), 1.0)});
    CHECK(effective_support_overlap(far, 1e-6, 2000, 1) == 0.0);
    CHECK(effective_support_overlap(near, 1e-6, 2000, 1) > 0.9);
    CHECK(effective_support_overlap(near, 1e-6, 2000, 1) == effective_support_overlap(near, 1e-6, 2000, 1));
}
