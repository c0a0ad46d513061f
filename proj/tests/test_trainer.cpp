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
#include <sstream>

#include "infolab/csv.hpp"
#include "infolab/entropy.hpp"
#include "infolab/error.hpp"
#include "infolab/trainer.hpp"
#include "test_support.hpp"

using namespace infolab;
using infolab::testing::randn;

namespace {

// The standard two-moons pre-training setup: 512 base points, view noise
// 0.1·scale, a {2, 64, 64, 8} ReLU encoder and 200 epochs of 4 Adam steps.
struct MoonsSetup {
    PrototypeDataset ds;
    PwaNetwork net;
    TrainConfig train;
};

MoonsSetup moons(std::uint64_t seed, double scale = 1.0)
{
    LabeledPoints pts = two_moons(512, 0.05, seed);
    pts.x *= scale;
    TrainConfig tc;
    tc.seed = seed;
    return {isotropic_dataset(pts, 0.1 * scale), PwaNetwork::random({2, 64, 64, 8}, Activation::relu(), seed), tc};
}

SslObjectiveConfig objective(ObjectiveName n)
{
    SslObjectiveConfig c;
    c.name = n;
    return c;
}

} // namespace

TEST_CASE("zero epochs return the initial network")
{
    MoonsSetup s = moons(1);
    s.train.epochs = 0;
    const TrainResult r = train_ssl(s.net, s.ds, objective(ObjectiveName::VICReg), s.train);
    const Eigen::MatrixXd x = randn(10, 2, 3);
    CHECK(r.net.forward_batch(x) == s.net.forward_batch(x));
    REQUIRE(r.trace.records.size() == 1);
    CHECK(r.trace.records[0].step == 0);
}

TEST_CASE("invariance-only training collapses")
{
    MoonsSetup s = moons(0);
    const TrainResult r = train_ssl(s.net, s.ds, objective(ObjectiveName::InvarianceOnly), s.train);
    CHECK(r.trace.records.back().step == 800);
    CHECK(r.trace.records.back().embedding_std.maxCoeff() < 0.01);

    // VICReg with its variance and covariance weights switched off is the same collapse.
    SslObjectiveConfig off = objective(ObjectiveName::VICReg);
    off.alpha = 0.0;
    off.beta_cov = 0.0;
    const TrainResult r2 = train_ssl(s.net, s.ds, off, s.train);
    CHECK(r2.trace.records.back().embedding_std.maxCoeff() < r2.trace.records.front().embedding_std.maxCoeff());
    CHECK(r2.trace.records.back().embedding_std.maxCoeff() < 0.01);
}

TEST_CASE("default VICReg keeps the embedding spread")
{
    MoonsSetup s = moons(0);
    const TrainResult r = train_ssl(s.net, s.ds, objective(ObjectiveName::VICReg), s.train);
    CHECK(r.trace.records.back().embedding_std.minCoeff() >= 0.1);
}

TEST_CASE("VICReg lowers the LogDet entropy on the scaled moons run")
{
    MoonsSetup s = moons(0, 30.0);
    const TrainResult r = train_ssl(s.net, s.ds, objective(ObjectiveName::VICReg), s.train);
    CHECK(r.trace.records.back().logdet_entropy < r.trace.records.front().logdet_entropy);
    CHECK(r.trace.records.back().embedding_std.minCoeff() >= 0.1);
}

TEST_CASE("training is bitwise reproducible and the trace is well formed")
{
    MoonsSetup s = moons(4);
    s.train.epochs = 20;
    s.train.diagnostics_every = 7;
    const SslObjectiveConfig obj = objective(ObjectiveName::VICRegPairwise);
    const TrainResult a = train_ssl(s.net, s.ds, obj, s.train);
    const TrainResult b = train_ssl(s.net, s.ds, obj, s.train);
    CHECK(to_csv_string(a.trace.to_csv()) == to_csv_string(b.trace.to_csv()));
    CHECK(to_json(a.net).dump() == to_json(b.net).dump());

    for (std::size_t i = 1; i < a.trace.records.size(); ++i) CHECK(a.trace.records[i].step > a.trace.records[i - 1].step);
    CHECK(a.trace.records.back().step == 80);

    const CsvTable t = a.trace.to_csv();
    CHECK(t.header.front() == "step");
    CHECK(t.column("logdet_entropy") < t.header.size());
    CHECK(t.column("pairwise_entropy") < t.header.size());
    CHECK(t.column("wall_time") < t.header.size());
    CHECK(t.column("std_7") < t.header.size());
    CHECK(t.column("term_entropy") < t.header.size());
    std::istringstream in(to_csv_string(t));
    const CsvTable back = parse_csv(in);
    CHECK(back.header == t.header);
    CHECK(back.rows == t.rows);

    s.train.max_steps = 5;
    const TrainResult c = train_ssl(s.net, s.ds, obj, s.train);
    CHECK(c.trace.records.back().step == 5);
}

TEST_CASE("one small SGD step lowers the batch loss")
{
    for (auto name : {ObjectiveName::VICReg, ObjectiveName::VICRegPairwise, ObjectiveName::VICRegLogDet,
                      ObjectiveName::InfoNCE, ObjectiveName::InvarianceOnly, ObjectiveName::InfoObjective}) {
        const MoonsSetup s = moons(2);
        const SslObjectiveConfig obj = objective(name);
        const ViewPairs batch = sample_pairs(s.ds, 64, 9);
        const double before = batch_loss(s.net, batch.x, batch.x_prime, obj);
        bool decreased = false;
        for (double lr : {1e-3, 1e-4}) {
            ad::Tape tape;
            const ad::NetVars vars = ad::bind(tape, s.net);
            const ad::LossTerms lt = build_loss(tape, s.net, vars, batch.x, batch.x_prime, obj);
            CHECK(lt.total.scalar() == doctest::Approx(before).epsilon(1e-12));
            const auto g = ad::grad(tape, lt.total, vars.all());
            TrainConfig tc;
            tc.optimizer = OptimizerKind::SGD;
            tc.learning_rate = lr;
            PwaNetwork stepped = s.net;
            apply_update(stepped, Optimizer(tc).step(g));
            decreased = decreased || batch_loss(stepped, batch.x, batch.x_prime, obj) < before;
        }
        CAPTURE(to_string(name));
        CHECK(decreased);
    }
}

TEST_CASE("optimizers")
{
    const std::vector<Eigen::MatrixXd> g{Eigen::MatrixXd::Constant(2, 2, 0.5), Eigen::MatrixXd::Constant(1, 3, -2.0)};
    TrainConfig tc;
    tc.learning_rate = 0.1;
    tc.optimizer = OptimizerKind::SGD;
    CHECK(Optimizer(tc).step(g)[1](0, 0) == doctest::Approx(0.2));

    tc.optimizer = OptimizerKind::SGDMomentum;
    Optimizer mom(tc);
    mom.step(g);
    CHECK(mom.step(g)[0](0, 0) == doctest::Approx(-0.1 * 0.5 * 1.9));

    tc.optimizer = OptimizerKind::Adam;
    Optimizer adam(tc);
    const auto d = adam.step(g);
    CHECK(d[0](0, 0) == doctest::Approx(-0.1).epsilon(1e-6));
    CHECK(d[1](0, 2) == doctest::Approx(0.1).epsilon(1e-6));

    for (auto k : {OptimizerKind::SGD, OptimizerKind::SGDMomentum, OptimizerKind::Adam})
        CHECK(optimizer_from_string(to_string(k)) == k);
    TrainConfig bad;
    bad.batch_size = 1;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = TrainConfig{};
    bad.learning_rate = 0.0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("non-finite losses abort with the last good parameters")
{
    MoonsSetup s = moons(3);
    s.train.optimizer = OptimizerKind::SGD;
    s.train.learning_rate = 1e300;
    s.train.epochs = 5;
    try {
        train_ssl(s.net, s.ds, objective(ObjectiveName::VICReg), s.train);
        FAIL("training should have aborted");
    } catch (const TrainingAborted& e) {
        CHECK(e.step() >= 1);
        for (const auto& ly : e.last_good().layers()) CHECK(ly.weight.allFinite());
        CHECK(!e.trace().records.empty());
        CHECK(e.kind() == "numerical_failure");
    }
}

TEST_CASE("linear probe")
{
    const Eigen::MatrixXd train = randn(200, 4, 1), test = randn(100, 4, 2);
    CHECK(linear_probe(train, std::vector<int>(200, 0), test, std::vector<int>(100, 0), 0.0) == 1.0);

    // Random embeddings carry no label information.
    const long n_test = 20000;
    const Eigen::MatrixXd rtrain = randn(400, 8, 3), rtest = randn(n_test, 8, 4);
    std::vector<int> ytrain(400), ytest(static_cast<std::size_t>(n_test));
    for (std::size_t i = 0; i < ytrain.size(); ++i) ytrain[i] = static_cast<int>(i % 2);
    for (std::size_t i = 0; i < ytest.size(); ++i) ytest[i] = static_cast<int>((i * 7 + i / 3) % 2);
    CHECK(std::abs(linear_probe(rtrain, ytrain, rtest, ytest, 1e-3) - 0.5) <= 3.0 * std::sqrt(0.25 / n_test));

    // Separable embeddings are classified perfectly at ridge 0.
    Eigen::MatrixXd sep = randn(300, 3, 5);
    std::vector<int> ysep(300);
    for (Eigen::Index i = 0; i < 300; ++i) {
        ysep[static_cast<std::size_t>(i)] = sep(i, 0) > 0.0 ? 1 : 0;
        sep(i, 0) += sep(i, 0) > 0.0 ? 1.0 : -1.0;
    }
    CHECK(linear_probe(sep.topRows(150), {ysep.begin(), ysep.begin() + 150}, sep.bottomRows(150),
                       {ysep.begin() + 150, ysep.end()}, 0.0) == 1.0);

    // Huge ridge falls back to the majority class.
    std::vector<int> skew(300);
    long ones = 0;
    for (std::size_t i = 0; i < skew.size(); ++i) {
        skew[i] = i % 3 == 0 ? 0 : 1;
        ones += skew[i];
    }
    const double acc = linear_probe(sep.topRows(150), {skew.begin(), skew.begin() + 150}, sep.bottomRows(150),
                                    {skew.begin() + 150, skew.end()}, 1e12);
    long test_ones = 0;
    for (std::size_t i = 150; i < 300; ++i) test_ones += skew[i];
    CHECK(acc == doctest::Approx(static_cast<double>(test_ones) / 150.0));
    (void)ones;
    CHECK_THROWS_AS(linear_probe(train, std::vector<int>(10, 0), test, std::vector<int>(100, 0), 0.0), DimensionMismatch);
}

TEST_CASE("embedding std uses the population normalization")
{
    Eigen::MatrixXd z(4, 2);
    z << 1, 0, -1, 0, 1, 2, -1, 2;
    const Eigen::VectorXd s = embedding_std(z);
    CHECK(s(0) == doctest::Approx(1.0));
    CHECK(s(1) == doctest::Approx(1.0));
}
