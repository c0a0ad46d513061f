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

#ifndef INFOLAB_GENBOUND_HPP_
#define INFOLAB_GENBOUND_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "infolab/cpa_net.hpp"
#include "infolab/csv.hpp"

namespace infolab {

/// Mean Euclidean (not squared) distance between paired rows.
double invariance_loss(const Eigen::MatrixXd& z_plus, const Eigen::MatrixXd& z_plus_plus);
double invariance_loss(const PwaNetwork& f, const Eigen::MatrixXd& x_plus, const Eigen::MatrixXd& x_plus_plus);

/// P_Z = I − Zᵀ(Z·Zᵀ)†Z for a d×n embedding matrix (n×n result).
Eigen::MatrixXd projector(const Eigen::MatrixXd& z, double rtol = 1e-10);

/// ‖P_Z·Y‖_F for Z (d×n) and Y (n×r).
double projection_residual(const Eigen::MatrixXd& z, const Eigen::MatrixXd& y, double rtol = 1e-10);

/// Yᵀ·Zᵀ·(Z·Zᵀ + ridge·I)† (r×d); ridge = 0 gives the minimum-norm least-squares solution.
Eigen::MatrixXd min_norm_probe(const Eigen::MatrixXd& z, const Eigen::MatrixXd& y, double ridge = 0.0,
                               double rtol = 1e-10);

/// (1/√m)·mean over seeded sign draws of max over rows of Σᵢ ξᵢ·values(f, i).
/// `values` holds one row per hypothesis and one column per sample.
double empirical_rademacher(const Eigen::MatrixXd& values, int n_sign_draws, std::uint64_t seed);

/// values(f, i) = ‖f(x⁺ᵢ) − f(x⁺⁺ᵢ)‖ for each encoder in the ensemble.
double empirical_rademacher(const std::vector<PwaNetwork>& ensemble, const Eigen::MatrixXd& x_plus,
                            const Eigen::MatrixXd& x_plus_plus, int n_sign_draws, std::uint64_t seed);

/// Rows of one-hot codes for labels in [0, n_classes).
Eigen::MatrixXd one_hot(const std::vector<int>& labels, int n_classes);

struct EnsembleMember {
    PwaNetwork net;
    std::string provenance; ///< "trained", "reinit:<seed>" or "perturbed:<seed>"
};

/// Trained encoder, n_reinit fresh initializations of the same architecture and
/// n_perturbed copies with weights jittered by rel_noise·rms(layer weights).
std::vector<EnsembleMember> make_ensemble(const PwaNetwork& trained, int n_reinit, int n_perturbed, double rel_noise,
                                          std::uint64_t seed);

struct BoundInputs {
    LabeledPoints labeled;        ///< S, size n
    Eigen::MatrixXd x_plus;       ///< S̄ first views, m×D
    Eigen::MatrixXd x_plus_plus;  ///< S̄ second views
    std::vector<int> unlabeled_labels; ///< labels of S̄, known to the harness only
    PwaNetwork encoder;
    std::vector<EnsembleMember> ensemble; ///< empty: make_ensemble(encoder, 3, 4, 0.05, seed)
    double delta = 0.1;
    int n_sign_draws = 1000;
    std::uint64_t seed = 0;
    std::optional<Eigen::VectorXd> class_marginals; ///< p(y); defaults to p̂(y)
    std::optional<LabeledPoints> test;              ///< held-out data for measured_test_loss
};

/// Data-dependent constants of the complete bound, frozen so Q can be
/// re-evaluated at other sample sizes.
struct BoundConstants {
    double c = 0.0;
    double kappa_s = 0.0;
    double kappa_sbar = 0.0;
    double kappa = 0.0;
    double tau = 0.0;
    double tau_sbar = 0.0;
    double zeta = 0.0;
    double rademacher_f = 0.0;   ///< clamped at 0
    double rademacher_wf = 0.0;  ///< clamped at 0
    Eigen::VectorXd p_hat;
    Eigen::VectorXd p;
};

double q_mn(const BoundConstants& k, double m, double n, double delta);

struct BoundReport {
    double m = 0, n = 0, delta = 0;
    int n_classes = 0;
    double invariance_loss = 0.0;
    double proj_unlabeled_norm = 0.0; ///< ‖P_{Z_S̄} Y_S̄‖_F
    double proj_labeled_norm = 0.0;   ///< ‖P_{Z_S} Y_S‖_F
    double invariance_term = 0.0;     ///< c·I_S̄
    double proj_unlabeled_term = 0.0;
    double proj_labeled_term = 0.0;
    double rademacher_f_raw = 0.0;
    double rademacher_wf_raw = 0.0;
    BoundConstants constants;
    double q = 0.0;
    double total_bound = 0.0;
    std::optional<double> measured_test_loss;
    double train_loss = 0.0;     ///< L_S(w_S), mean per-sample norm
    double train_loss_rms = 0.0; ///< (1/√n)‖W_S·Z_S − Yᵀ‖_F, equal to the labeled projection norm over √n
    double log2_ensemble = 0.0;
    std::vector<std::string> ensemble_provenance;
    std::vector<std::string> flags;

    /// Total with every constant and projection norm frozen at sizes (m, n).
    double total_at(double m_new, double n_new) const;
    nlohmann::json to_json() const;
};

/// Evaluates every term of the complete bound. Non-finite constants raise
/// NumericalFailure naming the term.
BoundReport evaluate_bound(const BoundInputs& in);

} // namespace infolab

#endif // INFOLAB_GENBOUND_HPP_
