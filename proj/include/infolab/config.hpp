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

#ifndef INFOLAB_CONFIG_HPP_
#define INFOLAB_CONFIG_HPP_

#include <cstdint>
#include <map>
#include <string>
#include <variant>
#include <vector>

#include "infolab/datagen.hpp"
#include "infolab/ssl_losses.hpp"
#include "infolab/trainer.hpp"

namespace infolab {

inline constexpr int kSchemaVersion = 1;

enum class DataKind { Prototypes, TwoMoons, Csv };
std::string to_string(DataKind k);
DataKind data_kind_from_string(const std::string& s);

struct DataConfig {
    DataKind kind = DataKind::TwoMoons;
    long n_points = 512;        ///< two_moons only
    double moons_noise = 0.05;  ///< two_moons only
    double input_scale = 1.0;   ///< multiplies every coordinate (and the view noise)
    double view_noise = 0.1;    ///< view noise scale s before input_scale
    std::string csv_path;       ///< csv only; label in the last column
    RandomPrototypeSpec prototypes; ///< prototypes only (its seed/noise are overwritten)

    bool operator==(const DataConfig&) const = default;
};

struct NetworkConfig {
    std::vector<long> hidden{64, 64};
    long embedding_dim = 8;
    std::string activation = "relu";
    double slope = 0.01;

    bool operator==(const NetworkConfig&) const = default;
};

struct EvalConfig {
    long n_probe_train = 500;
    long n_probe_test = 2000;
    double ridge = 1.0; ///< absolute, so near-constant embeddings cannot be rescaled into a classifier

    bool operator==(const EvalConfig&) const = default;
};

struct BoundConfig {
    long n_labeled = 200;
    long n_unlabeled = 200;
    long n_test = 2000;
    double delta = 0.1;
    long n_sign_draws = 1000;
    long n_reinit = 3;
    long n_perturbed = 4;
    double perturb_scale = 0.05;
    std::vector<double> class_marginals; ///< empty: use the empirical p̂(y)

    bool operator==(const BoundConfig&) const = default;
};

struct CompareConfig {
    std::vector<std::string> methods{"vicreg", "vicreg+pairwise", "vicreg+logdet", "infonce", "invariance_only"};
    long n_seeds = 5;
    long track_steps = -1; ///< track-entropy step budget; −1 uses the train section

    bool operator==(const CompareConfig&) const = default;
};

struct GaussianityConfig {
    std::vector<double> noise_grid{0.0, 0.05, 0.1, 0.2, 0.4, 0.8};
    long n_per_point = 512;
    long depth = 6;   ///< hidden layers of the random probe network
    long width = 32;
    long out_dim = 4;

    bool operator==(const GaussianityConfig&) const = default;
};

struct GmmConfig {
    long n_points = 200;
    double noise = 0.05;
    long n_components = 8;
    std::string mode = "full"; ///< "full" | "fixed_small"
    double sigma = 0.01;
    double init_scale = 1.0;
    double entropy_bandwidth = 0.2;
    double lr_params = 0.01;
    double lr_inputs = 0.01;
    long steps = 1000;
    long log_every = 10;

    bool operator==(const GmmConfig&) const = default;
};

struct HistogramConfig {
    long n_bins = 50;

    bool operator==(const HistogramConfig&) const = default;
};

/// Every knob of every subcommand. Text form: `key = value` lines under
/// `[section]` headers; values are numbers, true/false, "strings" or
/// one-line [arrays]; `#` starts a comment.
struct ExperimentConfig {
    int schema_version = kSchemaVersion;
    std::uint64_t seed = 0;
    std::string output_dir = "out";
    std::string experiment = "default";
    DataConfig data;
    NetworkConfig network;
    SslObjectiveConfig objective;
    TrainConfig train;
    EvalConfig eval;
    BoundConfig bound;
    CompareConfig compare;
    GaussianityConfig gaussianity;
    GmmConfig gmm;
    HistogramConfig histogram;

    /// Range checks across sections; throws ConfigError.
    void validate() const;
    /// `train` with the global seed applied.
    TrainConfig train_config() const;
    bool operator==(const ExperimentConfig&) const = default;
};

using ConfigValue = std::variant<bool, double, std::string, std::vector<double>, std::vector<std::string>>;
/// section → key → value; top-level keys live under "".
using ConfigDocument = std::map<std::string, std::map<std::string, ConfigValue>>;

ConfigDocument parse_config_document(const std::string& text);
/// "section.key=value" (or "key=value" for top-level keys); the value uses the
/// file grammar, and a bare word is taken as a string.
void apply_override(ConfigDocument& doc, const std::string& assignment);
/// Unknown sections or keys, wrong types and a schema_version other than
/// kSchemaVersion raise ConfigError.
ExperimentConfig config_from_document(const ConfigDocument& doc);

ExperimentConfig parse_config(const std::string& text, const std::vector<std::string>& overrides = {});
ExperimentConfig load_config(const std::string& path, const std::vector<std::string>& overrides = {});
std::string serialize_config(const ExperimentConfig& cfg);

} // namespace infolab

#endif // INFOLAB_CONFIG_HPP_
