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

#ifndef INFOLAB_EXPERIMENTS_HPP_
#define INFOLAB_EXPERIMENTS_HPP_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "infolab/config.hpp"
#include "infolab/cpa_net.hpp"
#include "infolab/csv.hpp"
#include "infolab/datagen.hpp"
#include "infolab/genbound.hpp"
#include "infolab/stats_validation.hpp"
#include "infolab/trainer.hpp"

namespace infolab {

/// Base points of the data section (before view noise), scaled by input_scale.
LabeledPoints build_points(const DataConfig& d, std::uint64_t seed);
/// View-pair generator of the data section. two_moons and csv points become
/// isotropic prototypes with noise view_noise·input_scale.
PrototypeDataset build_dataset(const DataConfig& d, std::uint64_t seed);
PwaNetwork build_network(const NetworkConfig& n, Eigen::Index input_dim, std::uint64_t seed);

/// <output_dir>/<experiment>/<seed>
std::filesystem::path run_directory(const ExperimentConfig& cfg, std::uint64_t seed);

/// Linear-probe accuracy of `net` on fresh seeded draws from `ds`.
double probe_accuracy(const ExperimentConfig& cfg, const PrototypeDataset& ds, const PwaNetwork& net, std::uint64_t seed);

/// One training run of `method` followed by a linear probe.
struct MethodRun {
    std::string method;
    std::uint64_t seed = 0;
    bool failed = false;
    std::string failure;
    double accuracy = 0.0;
    TrainTrace trace;
    std::optional<PwaNetwork> net;
};

MethodRun run_method(const ExperimentConfig& cfg, const std::string& method, std::uint64_t seed);

struct ComparisonRow {
    std::string method;
    double mean_accuracy = 0.0;
    double std_accuracy = 0.0; ///< sample standard deviation over seeds
    long n_seeds = 0;          ///< successful seeds
    std::vector<double> accuracies;
    bool failed = false;
    std::string failure;
};

struct ComparisonTable {
    std::vector<ComparisonRow> rows;

    /// method,mean_accuracy,std_accuracy,n_seeds,status
    CsvTable to_csv() const;
    /// Aligned "method  mean ± std" text.
    std::string to_text() const;
    nlohmann::json to_json() const;
    const ComparisonRow& row(const std::string& method) const;
};

/// Seeds cfg.seed … cfg.seed + n_seeds − 1 per method; aborted runs mark the
/// row failed. Work spreads over `threads` workers and is joined in seed order.
ComparisonTable run_comparison(const ExperimentConfig& cfg, const std::vector<std::string>& methods, long n_seeds,
                               int threads = 1);

struct TrackedTrace {
    std::string method;
    TrainTrace trace;
};

/// One trace per method on identical data and seed, stopped after n_steps
/// optimizer steps (n_steps = 0 keeps only the initial point).
std::vector<TrackedTrace> run_entropy_tracking(const ExperimentConfig& cfg, const std::vector<std::string>& methods,
                                               long n_steps);

/// Labeled set, unlabeled pairs and test set drawn from `ds` for the bound.
BoundInputs make_bound_inputs(const ExperimentConfig& cfg, const PrototypeDataset& ds, const PwaNetwork& encoder,
                              std::uint64_t seed);

/// Random deep ReLU network used by the Gaussianity sweep.
PwaNetwork gaussianity_network(const GaussianityConfig& g, Eigen::Index input_dim, std::uint64_t seed);

GmmLabState make_gmm_lab(const GmmConfig& g, std::uint64_t seed);

} // namespace infolab

#endif // INFOLAB_EXPERIMENTS_HPP_
