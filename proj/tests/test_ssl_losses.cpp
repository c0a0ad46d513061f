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
#include <functional>
#include <numeric>

#include "infolab/error.hpp"
#include "infolab/ssl_losses.hpp"
#include "test_support.hpp"

using namespace infolab;
using infolab::testing::randn;
using ad::Matrix;
using ad::Tape;
using ad::Var;

namespace {

using PairLoss = std::function<Var(Var, Var)>;

double eval(const PairLoss& f, const Matrix& z, const Matrix& zp)
{
    Tape t;
    return f(t.variable(z), t.variable(zp)).scalar();
}

std::pair<Matrix, Matrix> grads(const PairLoss& f, const Matrix& z, const Matrix& zp)
{
    Tape t;
    const Var a = t.variable(z), b = t.variable(zp);
    const auto g = ad::grad(t, f(a, b), {a, b});
    return {g[0], g[1]};
}

// Naive per-entry covariance with the 1/(N−1) normalization.
Matrix loop_cov(const Matrix& z)
{
    const Eigen::Index n = z.rows(), k = z.cols();
    Matrix c = Matrix::Zero(k, k);
    for (Eigen::Index a = 0; a < k; ++a)
        for (Eigen::Index b = 0; b < k; ++b) {
            double ma = 0.0, mb = 0.0;
            for (Eigen::Index i = 0; i < n; ++i) {
                ma += z(i, a);
                mb += z(i, b);
            }
            ma /= static_cast<double>(n);
            mb /= static_cast<double>(n);
            for (Eigen::Index i = 0; i < n; ++i) c(a, b) += (z(i, a) - ma) * (z(i, b) - mb);
            c(a, b) /= static_cast<double>(n - 1);
        }
    return c;
}

double loop_variance(const Matrix& z, double gamma, double eps)
{
    const Matrix c = loop_cov(z);
    double s = 0.0;
    for (Eigen::Index k = 0; k < z.cols(); ++k) s += std::max(0.0, gamma - std::sqrt(c(k, k) + eps));
    return s / static_cast<double>(z.cols());
}

double loop_covariance(const Matrix& z)
{
    const Matrix c = loop_cov(z);
    double s = 0.0;
    for (Eigen::Index a = 0; a < z.cols(); ++a)
        for (Eigen::Index b = 0; b < z.cols(); ++b)
            if (a != b) s += c(a, b) * c(a, b);
    return s / static_cast<double>(z.cols());
}

double loop_invariance(const Matrix& z, const Matrix& zp)
{
    double s = 0.0;
    for (Eigen::Index i = 0; i < z.rows(); ++i)
        for (Eigen::Index k = 0; k < z.cols(); ++k) s += (z(i, k) - zp(i, k)) * (z(i, k) - zp(i, k));
    return s / static_cast<double>(z.rows());
}

double loop_infonce(const Matrix& z, const Matrix& zp, double eta)
{
    const Eigen::Index n = z.rows();
    double total = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        const Eigen::VectorXd zi = z.row(i).normalized();
        std::vector<double> logits;
        for (Eigen::Index k = 0; k < n; ++k) logits.push_back(zi.dot(zp.row(k).normalized()) / eta);
        const double top = *std::max_element(logits.begin(), logits.end());
        double s = 0.0;
        for (double l : logits) s += std::exp(l - top);
        total += -(logits[static_cast<std::size_t>(i)] - top - std::log(s));
    }
    return total / static_cast<double>(n);
}

Matrix permute_rows(const Matrix& m, const std::vector<int>& perm)
{
    Matrix out(m.rows(), m.cols());
    for (std::size_t i = 0; i < perm.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = m.row(perm[i]);
    return out;
}

SslObjectiveConfig named(ObjectiveName n)
{
    SslObjectiveConfig c;
    c.name = n;
    return c;
}

} // namespace

TEST_CASE("variance hinge")
{
    SslObjectiveConfig cfg;
    const Matrix wide = 3.0 * randn(64, 5, 1);
    CHECK(eval([&](Var z, Var) { return ad::vicreg_variance(z, cfg); }, wide, wide) == 0.0);

    const Matrix constant = Matrix::Constant(16, 4, 2.5);
    CHECK(eval([&](Var z, Var) { return ad::vicreg_variance(z, cfg); }, constant, constant) ==
          doctest::Approx(0.99).epsilon(1e-14));

    for (std::uint64_t s = 0; s < 10; ++s) {
        const Matrix z = 0.6 * randn(20, 6, s);
        CHECK(eval([&](Var a, Var) { return ad::vicreg_variance(a, cfg); }, z, z) ==
              doctest::Approx(loop_variance(z, cfg.gamma_target, cfg.epsilon)).epsilon(1e-12));
    }
}

TEST_CASE("hinge boundary is evaluated on the inactive side")
{
    SslObjectiveConfig cfg;
    cfg.gamma_target = 1.0;
    cfg.epsilon = 0.5;
    Matrix z(2, 3);
    z << 0.5, -0.5, 0.5, -0.5, 0.5, -0.5; // C_kk = 0.5, so √(C_kk + ε) = γ exactly
    Tape t;
    const Var v = t.variable(z);
    const Var loss = ad::vicreg_variance(v, cfg);
    CHECK(loss.scalar() == 0.0);
    CHECK(ad::grad(t, loss, {v})[0].norm() == 0.0);
}

TEST_CASE("covariance penalty")
{
    Matrix diag(4, 2);
    diag << 1, 1, 1, -1, -1, 1, -1, -1; // uncorrelated columns
    CHECK(eval([](Var z, Var) { return ad::vicreg_covariance(z); }, diag, diag) == doctest::Approx(0.0));

    const Matrix z = randn(30, 2, 5);
    const double c01 = loop_cov(z)(0, 1);
    CHECK(eval([](Var a, Var) { return ad::vicreg_covariance(a); }, z, z) == doctest::Approx(c01 * c01).epsilon(1e-12));

    for (std::uint64_t s = 0; s < 10; ++s) {
        const Matrix r = randn(25, 5, 20 + s);
        CHECK(std::abs(eval([](Var a, Var) { return ad::vicreg_covariance(a); }, r, r) - loop_covariance(r)) <= 1e-10);
    }
}

TEST_CASE("invariance term")
{
    const Matrix z = randn(12, 4, 3);
    CHECK(eval([](Var a, Var b) { return ad::vicreg_invariance(a, b); }, z, z) == 0.0);
    const Eigen::RowVectorXd c = randn(1, 4, 4);
    const Matrix shifted = z.rowwise() + c;
    CHECK(eval([](Var a, Var b) { return ad::vicreg_invariance(a, b); }, z, shifted) ==
          doctest::Approx(c.squaredNorm()).epsilon(1e-12));
    for (std::uint64_t s = 0; s < 10; ++s) {
        const Matrix a = randn(15, 3, 40 + s), b = randn(15, 3, 60 + s);
        CHECK(eval([](Var x, Var y) { return ad::vicreg_invariance(x, y); }, a, b) ==
              doctest::Approx(loop_invariance(a, b)).epsilon(1e-12));
    }
    Tape t;
    CHECK_THROWS_AS(ad::vicreg_invariance(t.variable(randn(3, 2, 1)), t.variable(randn(4, 2, 1))), DimensionMismatch);
}

TEST_CASE("VICReg total")
{
    SslObjectiveConfig zero;
    zero.alpha = zero.beta_cov = zero.gamma_inv = 0.0;
    const Matrix z = randn(20, 4, 1), zp = randn(20, 4, 2);
    CHECK(eval([&](Var a, Var b) { return ad::vicreg_total(a, b, zero); }, z, zp) == 0.0);

    SslObjectiveConfig inv_only = zero;
    inv_only.gamma_inv = 1.0;
    CHECK(eval([&](Var a, Var b) { return ad::vicreg_total(a, b, inv_only); }, z, z) == 0.0);

    const SslObjectiveConfig d;
    CHECK(d.alpha == 25.0);
    CHECK(d.beta_cov == 1.0);
    CHECK(d.gamma_inv == 25.0);
    const double expected = d.alpha * (loop_variance(z, 1.0, 1e-4) + loop_variance(zp, 1.0, 1e-4)) +
                            d.beta_cov * (loop_covariance(z) + loop_covariance(zp)) + d.gamma_inv * loop_invariance(z, zp);
    CHECK(eval([&](Var a, Var b) { return ad::vicreg_total(a, b, d); }, z, zp) == doctest::Approx(expected).epsilon(1e-12));
    CHECK(eval([&](Var a, Var b) { return ad::ssl_loss(a, b, d).total; }, z, zp) ==
          doctest::Approx(expected).epsilon(1e-12));

    SslObjectiveConfig cat = d;
    cat.cov_mode = CovMode::Concatenated;
    Matrix both(40, 4);
    both << z, zp;
    const double expected_cat = 2.0 * d.alpha * loop_variance(both, 1.0, 1e-4) + 2.0 * d.beta_cov * loop_covariance(both) +
                                d.gamma_inv * loop_invariance(z, zp);
    CHECK(eval([&](Var a, Var b) { return ad::vicreg_total(a, b, cat); }, z, zp) ==
          doctest::Approx(expected_cat).epsilon(1e-12));
}

TEST_CASE("InfoNCE")
{
    SslObjectiveConfig cfg;
    cfg.temperature = 1.0;
    const Matrix orth = Matrix::Identity(2, 2);
    CHECK(eval([&](Var a, Var b) { return ad::simclr_infonce(a, b, cfg); }, orth, orth) ==
          doctest::Approx(-std::log(std::exp(1.0) / (std::exp(1.0) + 1.0))).epsilon(1e-14));
    CHECK(-std::log(std::exp(1.0) / (std::exp(1.0) + 1.0)) == doctest::Approx(0.3133).epsilon(1e-4));

    const Matrix z = randn(10, 4, 7), zp = randn(10, 4, 8);
    cfg.temperature = 1e9;
    CHECK(eval([&](Var a, Var b) { return ad::simclr_infonce(a, b, cfg); }, z, zp) ==
          doctest::Approx(std::log(10.0)).epsilon(1e-8));

    cfg.temperature = 0.5;
    for (std::uint64_t s = 0; s < 10; ++s) {
        const Matrix a = randn(9, 3, 70 + s), b = randn(9, 3, 90 + s);
        CHECK(std::abs(eval([&](Var x, Var y) { return ad::simclr_infonce(x, y, cfg); }, a, b) - loop_infonce(a, b, 0.5)) <=
              1e-8);
    }
    Matrix zero_row = randn(4, 3, 1);
    zero_row.row(2).setZero();
    CHECK_THROWS_AS(eval([&](Var x, Var y) { return ad::simclr_infonce(x, y, cfg); }, zero_row, randn(4, 3, 2)),
                    InvalidArgument);
}

TEST_CASE("information objective")
{
    SslObjectiveConfig cfg;
    const Eigen::Index n = 6, k = 3;
    const Matrix z = randn(n, k, 1);
    const double h_const = 4.2;
    auto run = [&](const Matrix& zz, const Matrix& zp, const std::vector<Matrix>& sx, const std::vector<Matrix>& sxp,
                   double h) {
        Tape t;
        std::vector<Var> a, b;
        for (const auto& m : sx) a.push_back(t.constant(m));
        for (const auto& m : sxp) b.push_back(t.constant(m));
        return ad::info_objective(t.variable(zz), t.variable(zp), a, b, t.constant(Matrix::Constant(1, 1, h)), cfg).scalar();
    };
    const std::vector<Matrix> eye(static_cast<std::size_t>(n), Matrix::Identity(k, k));
    CHECK(run(z, z, eye, eye, h_const) == doctest::Approx(-h_const).epsilon(1e-14));

    std::vector<Matrix> doubled = eye;
    doubled[2] *= 2.0;
    CHECK(run(z, z, doubled, eye, h_const) - run(z, z, eye, eye, h_const) ==
          doctest::Approx(static_cast<double>(k) * std::log(2.0) / static_cast<double>(n)).epsilon(1e-12));

    // Term-by-term recomputation on random inputs.
    std::vector<Matrix> sx, sxp;
    for (Eigen::Index i = 0; i < n; ++i) {
        sx.push_back(testing::random_spd(k, 100 + static_cast<std::uint64_t>(i)));
        sxp.push_back(testing::random_spd(k, 200 + static_cast<std::uint64_t>(i)));
    }
    const Matrix zp = randn(n, k, 2);
    double acc = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto si = static_cast<std::size_t>(i);
        acc += h_const - std::log(sx[si].determinant() * sxp[si].determinant()) - 0.5 * (z.row(i) - zp.row(i)).squaredNorm();
    }
    CHECK(run(z, zp, sx, sxp, h_const) == doctest::Approx(-acc / static_cast<double>(n)).epsilon(1e-12));

    Tape t;
    CHECK_THROWS_AS(ad::info_objective(t.variable(z), t.variable(zp), {}, {}, t.constant(Matrix::Zero(1, 1)), cfg),
                    DimensionMismatch);
}

TEST_CASE("losses are invariant to a shared row permutation")
{
    const Matrix z = randn(16, 4, 31), zp = randn(16, 4, 32);
    std::vector<int> perm(16);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), make_engine(3));
    const Matrix pz = permute_rows(z, perm), pzp = permute_rows(zp, perm);
    for (auto name : {ObjectiveName::VICReg, ObjectiveName::VICRegPairwise, ObjectiveName::VICRegLogDet,
                      ObjectiveName::InfoNCE, ObjectiveName::InvarianceOnly}) {
        const SslObjectiveConfig cfg = named(name);
        const PairLoss f = [&](Var a, Var b) { return ad::ssl_loss(a, b, cfg).total; };
        CHECK(std::abs(eval(f, z, zp) - eval(f, pz, pzp)) <= 1e-10);
    }
}

TEST_CASE("loss gradients match finite differences")
{
    std::vector<std::pair<const char*, std::function<PairLoss(const SslObjectiveConfig&)>>> losses{
        {"variance", [](const SslObjectiveConfig& c) { return PairLoss([c](Var a, Var) { return ad::vicreg_variance(a, c); }); }},
        {"covariance", [](const SslObjectiveConfig&) { return PairLoss([](Var a, Var) { return ad::vicreg_covariance(a); }); }},
        {"invariance", [](const SslObjectiveConfig&) { return PairLoss([](Var a, Var b) { return ad::vicreg_invariance(a, b); }); }},
        {"total", [](const SslObjectiveConfig& c) { return PairLoss([c](Var a, Var b) { return ad::vicreg_total(a, b, c); }); }},
        {"infonce", [](const SslObjectiveConfig& c) { return PairLoss([c](Var a, Var b) { return ad::simclr_infonce(a, b, c); }); }},
    };
    const std::pair<const char*, ObjectiveName> objectives[] = {{"vicreg+pairwise", ObjectiveName::VICRegPairwise},
                                                                {"vicreg+logdet", ObjectiveName::VICRegLogDet},
                                                                {"invariance_only", ObjectiveName::InvarianceOnly}};
    for (const auto& [tag, name] : objectives)
        losses.emplace_back(tag, [name](const SslObjectiveConfig& c) {
            SslObjectiveConfig cc = c;
            cc.name = name;
            return PairLoss([cc](Var a, Var b) { return ad::ssl_loss(a, b, cc).total; });
        });

    for (const auto& [label, make] : losses) {
        for (std::uint64_t s = 0; s < 20; ++s) {
            SslObjectiveConfig cfg;
            cfg.cov_mode = s % 2 ? CovMode::Concatenated : CovMode::PerView;
            const Matrix z = 0.7 * randn(10, 4, 1000 + s), zp = 0.7 * randn(10, 4, 2000 + s);
            const PairLoss f = make(cfg);
            const auto [gz, gzp] = grads(f, z, zp);
            const Matrix fdz = testing::fd_gradient([&](const Matrix& m) { return eval(f, m, zp); }, z, 1e-5);
            const Matrix fdzp = testing::fd_gradient([&](const Matrix& m) { return eval(f, z, m); }, zp, 1e-5);
            CAPTURE(label);
            CAPTURE(s);
            CHECK(testing::rel_error(gz, fdz) <= 1e-4);
            CHECK(testing::rel_error(gzp, fdzp) <= 1e-4);
        }
    }

    // The information objective, differentiated through z, z′ and the covariances.
    for (std::uint64_t s = 0; s < 20; ++s) {
        SslObjectiveConfig cfg;
        const Eigen::Index n = 5, k = 3;
        const Matrix z = randn(n, k, 3000 + s), zp = randn(n, k, 4000 + s);
        const Matrix b0 = randn(k, k, 5000 + s);
        auto f = [&](const Matrix& zz, const Matrix& zzp, const Matrix& b) {
            Tape t;
            const Var vz = t.variable(zz), vzp = t.variable(zzp), vb = t.variable(b);
            const Var sig = ad::add_const(ad::matmul(vb, ad::transpose(vb)), Matrix::Identity(k, k));
            std::vector<Var> sx(static_cast<std::size_t>(n), sig), sxp(static_cast<std::size_t>(n), sig);
            const Var h = ad::plugin_entropy(vz, EntropyPlugin::LogDet, cfg);
            const Var loss = ad::info_objective(vz, vzp, sx, sxp, h, cfg);
            return std::make_pair(loss.scalar(), ad::grad(t, loss, {vz, vzp, vb}));
        };
        const auto [value, g] = f(z, zp, b0);
        (void)value;
        CHECK(testing::rel_error(g[0], testing::fd_gradient([&](const Matrix& m) { return f(m, zp, b0).first; }, z)) <= 1e-4);
        CHECK(testing::rel_error(g[1], testing::fd_gradient([&](const Matrix& m) { return f(z, m, b0).first; }, zp)) <= 1e-4);
        CHECK(testing::rel_error(g[2], testing::fd_gradient([&](const Matrix& m) { return f(z, zp, m).first; }, b0)) <= 1e-4);
    }
}

TEST_CASE("objective names and validation")
{
    for (auto n : {ObjectiveName::VICReg, ObjectiveName::VICRegPairwise, ObjectiveName::VICRegLogDet, ObjectiveName::InfoNCE,
                   ObjectiveName::InfoObjective, ObjectiveName::InvarianceOnly})
        CHECK(objective_from_string(to_string(n)) == n);
    CHECK(to_string(ObjectiveName::VICRegPairwise) == "vicreg+pairwise");
    CHECK_THROWS_AS(objective_from_string("barlow"), ConfigError);
    CHECK(named(ObjectiveName::VICRegPairwise).effective_plugin() == EntropyPlugin::PairwiseLower);
    CHECK(named(ObjectiveName::VICRegLogDet).effective_plugin() == EntropyPlugin::LogDet);
    CHECK(named(ObjectiveName::VICReg).effective_plugin() == EntropyPlugin::None);

    SslObjectiveConfig bad;
    bad.temperature = 0.0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = SslObjectiveConfig{};
    bad.alpha = -1.0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    CHECK_NOTHROW(SslObjectiveConfig{}.validate());

    Tape t;
    CHECK_THROWS_AS(ad::ssl_loss(t.variable(randn(4, 2, 1)), t.variable(randn(4, 2, 2)), named(ObjectiveName::InfoObjective)),
                    InvalidArgument);
}
