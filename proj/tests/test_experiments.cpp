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

#include "infolab/error.hpp"
#include "infolab/experiments.hpp"
#include "infolab/golden.hpp"

using namespace infolab;

TEST_CASE("dataset and network builders")
{
    ExperimentConfig cfg;
    cfg.data.input_scale = 3.0;
    const LabeledPoints p1 = build_points(cfg.data, 2);
    cfg.data.input_scale = 1.0;
    const LabeledPoints p0 = build_points(cfg.data, 2);
    CHECK((p1.x - 3.0 * p0.x).norm() <= 1e-12);

    cfg.data.input_scale = 3.0;
    const PrototypeDataset ds = build_dataset(cfg.data, 2);
    CHECK(ds.noise_scale() == doctest::Approx(0.3));
    CHECK(ds.size() == 512);

    cfg.data.kind = DataKind::Prototypes;
    const PrototypeDataset pr = build_dataset(cfg.data, 5);
    CHECK(pr.dim() == cfg.data.prototypes.dim);
    CHECK(pr.prototypes().rows() == cfg.data.prototypes.n_prototypes);

    const PwaNetwork net = build_network(cfg.network, 2, 1);
    CHECK(net.layers().size() == 3);
    CHECK(net.output_dim() == 8);

    cfg.output_dir = "runs";
    cfg.experiment = "exp";
    CHECK(run_directory(cfg, 4) == std::filesystem::path("runs") / "exp" / "4");
}

TEST_CASE("comparison table")
{
    const ExperimentConfig cfg;
    const ComparisonTable t = run_comparison(cfg, {"invariance_only", "vicreg+pairwise", "vicreg", "vicreg"}, 3, 4);
    REQUIRE(t.rows.size() == 4);

    // The collapsed encoder carries no label information.
    const ComparisonRow& inv = t.row("invariance_only");
    CHECK(inv.n_seeds == 3);
    CHECK(std::abs(inv.mean_accuracy - 0.5) <= 0.05);
    CHECK(t.row("vicreg+pairwise").mean_accuracy >= inv.mean_accuracy);

    // Listing a method twice repeats the same procedure.
    const ComparisonRow& a = t.rows[2];
    const ComparisonRow& b = t.rows[3];
    CHECK(std::abs(a.mean_accuracy - b.mean_accuracy) <= 3.0 * (a.std_accuracy + b.std_accuracy) + 1e-12);
    CHECK(a.accuracies == b.accuracies);

    const CsvTable csv = t.to_csv();
    CHECK(csv.header == std::vector<std::string>{"method", "mean_accuracy", "std_accuracy", "n_seeds", "status"});
    std::istringstream in(to_csv_string(csv));
    CHECK(parse_csv(in).rows == csv.rows);
    CHECK(t.to_text().find("±") != std::string::npos);
    CHECK(t.to_json().at("rows").size() == 4);
    CHECK_THROWS(t.row("nope"));

    // Single-threaded runs join to the same table.
    const ComparisonTable serial = run_comparison(cfg, {"invariance_only"}, 3, 1);
    CHECK(serial.rows[0].accuracies == inv.accuracies);

    CHECK_THROWS_AS(run_comparison(cfg, {"vicreg"}, 2), ConfigError);
    CHECK_THROWS_AS(run_comparison(cfg, {"info_objective"}, 3), ConfigError);
    CHECK_THROWS_AS(run_comparison(cfg, {"nope"}, 3), ConfigError);
}

TEST_CASE("aborted runs mark their row failed")
{
    ExperimentConfig cfg;
    cfg.train.optimizer = OptimizerKind::SGD;
    cfg.train.learning_rate = 1e300;
    cfg.train.epochs = 3;
    const ComparisonTable t = run_comparison(cfg, {"vicreg"}, 3, 2);
    REQUIRE(t.rows.size() == 1);
    CHECK(t.rows[0].failed);
    CHECK(t.rows[0].n_seeds == 0);
    CHECK(!t.rows[0].failure.empty());
    CHECK(t.to_csv().rows[0].back() == "failed");
}

TEST_CASE("entropy tracking")
{
    ExperimentConfig cfg;
    const auto empty = run_entropy_tracking(cfg, {"vicreg", "infonce"}, 0);
    REQUIRE(empty.size() == 2);
    for (const auto& t : empty) CHECK(t.trace.records.size() == 1);

    const auto a = run_entropy_tracking(cfg, {"vicreg+logdet"}, 30);
    const auto b = run_entropy_tracking(cfg, {"vicreg+logdet"}, 30);
    CHECK(a[0].trace.records.back().step == 30);
    CHECK(to_csv_string(a[0].trace.to_csv()) == to_csv_string(b[0].trace.to_csv()));
    CHECK_THROWS_AS(run_entropy_tracking(cfg, {"vicreg"}, -1), ConfigError);

    // The standard tracking run: VICReg on scaled two moons, golden seed 0.
    cfg.data.input_scale = golden::track_entropy_input_scale;
    const auto v = run_entropy_tracking(cfg, {"vicreg"}, 800);
    CHECK(v[0].trace.records.back().logdet_entropy < v[0].trace.records.front().logdet_entropy);
}

TEST_CASE("bound holds on two moons")
{
    const ExperimentConfig cfg;
    int held = 0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const PrototypeDataset ds = build_dataset(cfg.data, seed);
        const MethodRun run = run_method(cfg, "vicreg", seed);
        REQUIRE(!run.failed);
        const BoundInputs in = make_bound_inputs(cfg, ds, *run.net, seed);
        CHECK(in.labeled.x.rows() == 200);
        CHECK(in.x_plus.rows() == 200);
        CHECK(in.ensemble.size() == 8);
        const BoundReport r = evaluate_bound(in);
        REQUIRE(r.measured_test_loss.has_value());
        held += *r.measured_test_loss <= r.total_bound ? 1 : 0;
    }
    CHECK(held >= 18);
}
