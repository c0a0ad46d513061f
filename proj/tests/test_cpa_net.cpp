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

#include "infolab/cpa_net.hpp"
#include "infolab/error.hpp"
#include "test_support.hpp"

using namespace infolab;
using infolab::testing::randn;
using infolab::testing::randn_vec;

namespace {

// Hidden pre-activations of every layer, recomputed without the library.
std::vector<Eigen::VectorXd> hidden_preactivations(const PwaNetwork& net, const Eigen::VectorXd& x)
{
    std::vector<Eigen::VectorXd> out;
    Eigen::VectorXd h = x;
    const auto& layers = net.layers();
    for (std::size_t l = 0; l + 1 < layers.size(); ++l) {
        const Eigen::VectorXd pre = layers[l].weight * h + layers[l].bias;
        out.push_back(pre);
        h = pre.unaryExpr([&](double v) { return net.activation().apply(v); });
    }
    return out;
}

double boundary_margin(const PwaNetwork& net, const Eigen::VectorXd& x)
{
    double m = std::numeric_limits<double>::infinity();
    for (const auto& pre : hidden_preactivations(net, x)) m = std::min(m, pre.cwiseAbs().minCoeff());
    return m;
}

} // namespace

TEST_CASE("single affine layer")
{
    const Layer ly{randn(3, 2, 1), randn_vec(3, 2)};
    const PwaNetwork net({ly}, Activation::relu());
    const Eigen::VectorXd x = randn_vec(2, 3);
    CHECK((net.forward(x) - (ly.weight * x + ly.bias)).norm() <= 1e-14);
    const RegionAffine r = affine_extract(net, x);
    CHECK(r.a_matrix == ly.weight);
    CHECK((r.b_offset - ly.bias).norm() <= 1e-14);
    CHECK(r.activation_pattern.empty());
    CHECK(net.hidden_units() == 0);
}

TEST_CASE("ReLU network without biases maps zero to zero")
{
    PwaNetwork net = PwaNetwork::random({3, 8, 8, 2}, Activation::relu(), 4);
    for (auto& ly : net.mutable_layers()) ly.bias.setZero();
    CHECK(net.forward(Eigen::VectorXd::Zero(3)).norm() == 0.0);
}

TEST_CASE("forward agrees with the extracted region map")
{
    for (std::uint64_t s = 0; s < 20; ++s) {
        const PwaNetwork net = PwaNetwork::random({4, 16, 16, 5}, Activation::relu(), s);
        const Eigen::VectorXd x = randn_vec(4, s + 100);
        const RegionAffine r = affine_extract(net, x);
        const Eigen::VectorXd y = net.forward(x);
        CHECK((r.a_matrix * x + r.b_offset - y).norm() <= 1e-10 * std::max(1.0, y.norm()));
        CHECK(static_cast<Eigen::Index>(r.activation_pattern.size()) == net.hidden_units());
        CHECK(r.activation_pattern == activation_pattern(net, x));
    }
}

TEST_CASE("slope-one leaky network is the product of its weights")
{
    const PwaNetwork net = PwaNetwork::random({3, 5, 6, 2}, Activation::leaky(1.0), 9);
    Eigen::MatrixXd prod = Eigen::MatrixXd::Identity(3, 3);
    for (const auto& ly : net.layers()) prod = ly.weight * prod;
    const RegionAffine r = affine_extract(net, randn_vec(3, 10));
    CHECK((r.a_matrix - prod).norm() <= 1e-12);
}

TEST_CASE("region Jacobian matches finite differences")
{
    for (std::uint64_t s = 0; s < 20; ++s) {
        const PwaNetwork net = PwaNetwork::random({5, 12, 12, 7}, Activation::relu(), 40 + s);
        // Central differences need both probes inside one region.
        std::uint64_t draw = 60 + s;
        Eigen::VectorXd x = randn_vec(5, draw);
        while (boundary_margin(net, x) <= 1e-4) x = randn_vec(5, draw += 1000);
        const RegionAffine r = affine_extract(net, x);
        Eigen::MatrixXd fd(7, 5);
        const double h = 1e-6;
        for (Eigen::Index j = 0; j < 5; ++j) {
            Eigen::VectorXd up = x, down = x;
            up(j) += h;
            down(j) -= h;
            fd.col(j) = (net.forward(up) - net.forward(down)) / (2.0 * h);
        }
        CHECK(testing::rel_error(r.a_matrix, fd) <= 1e-5);
    }
}

TEST_CASE("boundary inputs")
{
    // One hidden unit whose pre-activation is exactly zero at x = 0.
    const Layer l0{Eigen::MatrixXd::Ones(1, 2), Eigen::VectorXd::Zero(1)};
    const Layer l1{Eigen::MatrixXd::Constant(1, 1, 2.0), Eigen::VectorXd::Zero(1)};
    const PwaNetwork net({l0, l1}, Activation::relu());
    CHECK_THROWS_AS(affine_extract(net, Eigen::VectorXd::Zero(2)), BoundaryInput);
    const std::uint64_t before = boundary_warning_count();
    const RegionAffine r = affine_extract(net, Eigen::VectorXd::Zero(2), BoundaryPolicy::Resolve);
    CHECK(boundary_warning_count() == before + 1);
    REQUIRE(r.activation_pattern.size() == 1);
    CHECK(r.activation_pattern[0]);
    CHECK(r.a_matrix(0, 0) == 2.0);
    CHECK(activation_pattern(net, Eigen::VectorXd::Zero(2))[0]);
}

TEST_CASE("points within the margin share the region and its affine map")
{
    for (std::uint64_t s = 0; s < 20; ++s) {
        const PwaNetwork net = PwaNetwork::random({3, 10, 10, 4}, Activation::leaky(0.2), 200 + s);
        const Eigen::VectorXd x = randn_vec(3, 300 + s);
        const double margin = boundary_margin(net, x);
        REQUIRE(margin > 1e-6);
        double lip = 1.0;
        for (const auto& ly : net.layers()) lip *= std::max(1.0, Eigen::JacobiSVD<Eigen::MatrixXd>(ly.weight).singularValues()(0));
        const RegionAffine r = affine_extract(net, x);
        for (std::uint64_t k = 0; k < 20; ++k) {
            Eigen::VectorXd dir = randn_vec(3, 1000 * s + k);
            dir *= 0.999 * margin / lip / dir.norm();
            const Eigen::VectorXd xp = x + dir;
            CHECK(activation_pattern(net, xp) == r.activation_pattern);
            const Eigen::VectorXd y = net.forward(xp);
            CHECK((r.a_matrix * xp + r.b_offset - y).norm() <= 1e-9 * std::max(1.0, y.norm()));
        }
    }
}

TEST_CASE("pushforward of trivial cases")
{
    const PwaNetwork ident({Layer{Eigen::MatrixXd::Identity(3, 3), Eigen::VectorXd::Zero(3)},
                            Layer{Eigen::MatrixXd::Identity(3, 3), Eigen::VectorXd::Zero(3)}},
                           Activation::leaky(1.0));
    const Gaussian g = Gaussian::from_covariance(randn_vec(3, 1), testing::random_spd(3, 2));
    const Pushforward pi = pushforward_gaussian(ident, g);
    CHECK(pi.purity == 1.0);
    CHECK((pi.image.mean() - g.mean()).norm() <= 1e-14);
    CHECK((pi.image.covariance() - g.covariance()).norm() <= 1e-12);

    const PwaNetwork net = PwaNetwork::random({3, 8, 4}, Activation::relu(), 5);
    const Gaussian point = Gaussian::isotropic(randn_vec(3, 6), 0.0);
    const Pushforward pp = pushforward_gaussian(net, point);
    CHECK(pp.purity == 1.0);
    CHECK(pp.image.covariance().norm() == 0.0);
    CHECK((pp.image.mean() - net.forward(point.mean())).norm() <= 1e-12);
}

TEST_CASE("pushforward moments match sampled outputs")
{
    for (std::uint64_t s = 0; s < 5; ++s) {
        const PwaNetwork net = PwaNetwork::random({4, 16, 16, 6}, Activation::leaky(0.1), 500 + s);
        const Eigen::VectorXd mu = randn_vec(4, 600 + s);
        const long n = 10000;
        // Shrink σ until every evaluation draw shares μ's region; the outputs are
        // then exact affine images of the inputs.
        double sigma = 0.1;
        Pushforward pf;
        while (true) {
            pf = pushforward_gaussian(net, Gaussian::isotropic(mu, sigma), n, s + 7);
            if (pf.purity == 1.0) break;
            sigma *= 0.5;
        }
        const Eigen::MatrixXd x = sample(Gaussian::isotropic(mu, sigma), n, s + 7);
        const Eigen::MatrixXd z = net.forward_batch(x);
        const RegionAffine r = affine_extract(net, mu);
        const Eigen::RowVectorXd m = z.colwise().mean();
        const Eigen::MatrixXd zc = z.rowwise() - m;
        const Eigen::MatrixXd xc = x.rowwise() - x.colwise().mean();
        const Eigen::MatrixXd cov = pf.image.covariance();

        const Eigen::VectorXd mapped_mean = r.a_matrix * x.colwise().mean().transpose() + r.b_offset;
        CHECK((m.transpose() - mapped_mean).norm() <= 1e-9 * std::max(1.0, m.norm()));
        const Eigen::MatrixXd mapped_cov = r.a_matrix * (xc.transpose() * xc) * r.a_matrix.transpose();
        CHECK((zc.transpose() * zc - mapped_cov).norm() <= 1e-9 * mapped_cov.norm());

        // With the outputs an exact affine image, the closed-form image moments
        // are the population moments of the mapped sample.
        const Eigen::MatrixXd sx = Eigen::MatrixXd::Identity(4, 4) * sigma * sigma;
        CHECK((cov - r.a_matrix * sx * r.a_matrix.transpose()).norm() <= 1e-12 * std::max(1e-300, cov.norm()));
        CHECK((pf.image.mean() - net.forward(mu)).norm() <= 1e-12 * std::max(1.0, m.norm()));
    }
}

TEST_CASE("purity does not increase with input noise")
{
    for (std::uint64_t s = 0; s < 5; ++s) {
        const PwaNetwork net = PwaNetwork::random({3, 16, 16, 4}, Activation::relu(), 700 + s);
        const Eigen::VectorXd mu = randn_vec(3, 800 + s);
        double last = 1.0;
        for (double sigma : {0.001, 0.01, 0.03, 0.1, 0.3, 1.0, 3.0}) {
            const double p = pushforward_gaussian(net, Gaussian::isotropic(mu, sigma), 2048, 13).purity;
            CHECK(p <= last);
            last = p;
        }
        CHECK(last < 1.0);
    }
}

TEST_CASE("batch forward, checkpoints and parameter updates")
{
    const PwaNetwork net = PwaNetwork::random({3, 7, 5, 2}, Activation::leaky(0.05), 21);
    const Eigen::MatrixXd x = randn(9, 3, 22);
    const Eigen::MatrixXd y = net.forward_batch(x);
    for (Eigen::Index i = 0; i < x.rows(); ++i) CHECK((y.row(i).transpose() - net.forward(x.row(i).transpose())).norm() <= 1e-14);
    CHECK_THROWS_AS(net.forward(Eigen::VectorXd::Zero(4)), DimensionMismatch);
    CHECK(net.parameter_count() == 3 * 7 + 7 + 7 * 5 + 5 + 5 * 2 + 2);

    const PwaNetwork back = network_from_json(nlohmann::json::parse(to_json(net).dump()));
    CHECK(back.forward_batch(x) == y);
    CHECK(back.activation() == net.activation());
    CHECK(back.seed() == net.seed());

    std::vector<Eigen::MatrixXd> deltas;
    for (const auto& ly : net.layers()) {
        deltas.push_back(Eigen::MatrixXd::Constant(ly.weight.rows(), ly.weight.cols(), 0.5));
        deltas.push_back(Eigen::MatrixXd::Constant(1, ly.bias.size(), -0.25));
    }
    PwaNetwork moved = net;
    apply_update(moved, deltas);
    CHECK((moved.layers()[1].weight - net.layers()[1].weight).cwiseAbs().minCoeff() == doctest::Approx(0.5));
    CHECK((moved.layers()[2].bias - net.layers()[2].bias).cwiseAbs().maxCoeff() == doctest::Approx(0.25));
    deltas.pop_back();
    CHECK_THROWS_AS(apply_update(moved, deltas), DimensionMismatch);

    // Same seed, same weights.
    CHECK(PwaNetwork::random({3, 7, 5, 2}, Activation::leaky(0.05), 21).forward_batch(x) == y);
}

TEST_CASE("tape forward and Jacobian")
{
    for (std::uint64_t s = 0; s < 5; ++s) {
        const PwaNetwork net = PwaNetwork::random({3, 9, 9, 4}, Activation::leaky(0.1), 900 + s);
        const Eigen::MatrixXd x = randn(6, 3, 950 + s);
        ad::Tape t;
        const ad::NetVars vars = ad::bind(t, net);
        const ad::Var out = ad::forward(net, vars, t.constant(x));
        CHECK((out.value() - net.forward_batch(x)).norm() <= 1e-12);

        const Eigen::VectorXd x0 = randn_vec(3, 990 + s);
        const ad::Var jac = ad::jacobian(net, vars, x0);
        CHECK((jac.value() - affine_extract(net, x0).a_matrix).norm() <= 1e-12);

        // Weight gradients of a scalar of the outputs versus central differences.
        const Eigen::MatrixXd w = randn(6, 4, 7 + s);
        const ad::Var loss = ad::sum(ad::hadamard_const(out, w));
        const auto grads = ad::grad(t, loss, vars.all());
        for (std::size_t l = 0; l < net.depth(); ++l) {
            auto f = [&](const Eigen::MatrixXd& wl) {
                PwaNetwork copy = net;
                copy.mutable_layers()[l].weight = wl;
                return (copy.forward_batch(x).array() * w.array()).sum();
            };
            const Eigen::MatrixXd fd = testing::fd_gradient(f, net.layers()[l].weight, 1e-6);
            CHECK(testing::rel_error(grads[2 * l], fd) <= 1e-6);
        }
    }
}
