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

#ifndef INFOLAB_TRAINER_HPP_
#define INFOLAB_TRAINER_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "infolab/cpa_net.hpp"
#include "infolab/csv.hpp"
#include "infolab/datagen.hpp"
#include "infolab/error.hpp"
#include "infolab/ssl_losses.hpp"

namespace infolab {

enum class OptimizerKind { SGD, SGDMomentum, Adam };

std::string to_string(OptimizerKind k);
OptimizerKind optimizer_from_string(const std::string& s);

struct TrainConfig {
    int epochs = 200;
    int batch_size = 128;
    double learning_rate = 1e-3;
    OptimizerKind optimizer = OptimizerKind::Adam;
    double momentum = 0.9;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps_adam = 1e-8;
    std::uint64_t seed = 0;
    int diagnostics_every = 50; ///< steps
    int pairs_per_epoch = 512;
    int probe_batch = 1024;
    /// Off by default so traces are byte-reproducible; the column then holds 0.
    bool record_wall_time = false;
    /// Stops after this many optimizer steps when ≥ 0; −1 runs every epoch.
    long max_steps = -1;

    void validate() const;
    bool operator==(const TrainConfig&) const = default;
};

struct TraceRecord {
    long step = 0;
    double loss = 0.0;
    std::vector<double> terms; ///< aligned with TrainTrace::term_names
    Eigen::VectorXd embedding_std;
    double logdet_entropy = 0.0;
    double pairwise_entropy = 0.0;
    double wall_time = 0.0;
};

struct TrainTrace {
    std::vector<std::string> term_names;
    std::vector<TraceRecord> records;

    CsvTable to_csv() const;
};

struct TrainResult {
    PwaNetwork net;
    TrainTrace trace;
};

/// Raised when a loss or gradient turns non-finite; carries the step and the
/// parameters from before that step.
class TrainingAborted : public NumericalFailure {
public:
    TrainingAborted(long step, PwaNetwork last_good, TrainTrace trace_so_far);
    long step() const { return step_; }
    const PwaNetwork& last_good() const { return last_good_; }
    const TrainTrace& trace() const { return trace_; }

private:
    long step_;
    PwaNetwork last_good_;
    TrainTrace trace_;
};

/// Stateful first-order optimizer; returns the parameter deltas for one step.
class Optimizer {
public:
    explicit Optimizer(const TrainConfig& cfg) : cfg_(cfg) {}
    std::vector<Eigen::MatrixXd> step(const std::vector<Eigen::MatrixXd>& grads);

private:
    TrainConfig cfg_;
    long t_ = 0;
    std::vector<Eigen::MatrixXd> m_, v_;
};

/// Objective on one pair batch, recorded on `tape` with the parameters in `vars`.
ad::LossTerms build_loss(ad::Tape& tape, const PwaNetwork& net, const ad::NetVars& vars, const Eigen::MatrixXd& x,
                         const Eigen::MatrixXd& x_prime, const SslObjectiveConfig& cfg);

/// Plain loss value of a pair batch.
double batch_loss(const PwaNetwork& net, const Eigen::MatrixXd& x, const Eigen::MatrixXd& x_prime,
                  const SslObjectiveConfig& cfg);

/// Per-column standard deviation (1/N normalization).
Eigen::VectorXd embedding_std(const Eigen::MatrixXd& z);

/// Minibatch training on freshly sampled view pairs each epoch. Diagnostics
/// (std, LogDet and pairwise entropies) are computed on a fixed probe batch at
/// step 0, every diagnostics_every steps and at the final step.
TrainResult train_ssl(PwaNetwork net, const PrototypeDataset& ds, const SslObjectiveConfig& obj, const TrainConfig& cfg);

/// Ridge probe with an unpenalized intercept on frozen embeddings; returns test
/// accuracy of the argmax prediction (ties go to the lowest class).
double linear_probe(const Eigen::MatrixXd& train_embeddings, const std::vector<int>& train_labels,
                    const Eigen::MatrixXd& test_embeddings, const std::vector<int>& test_labels, double ridge);
double linear_probe(const PwaNetwork& net, const LabeledPoints& train, const LabeledPoints& test, double ridge);

} // namespace infolab

#endif // INFOLAB_TRAINER_HPP_
