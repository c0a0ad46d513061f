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

#ifndef INFOLAB_SSL_LOSSES_HPP_
#define INFOLAB_SSL_LOSSES_HPP_

#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "infolab/autodiff.hpp"

namespace infolab {

enum class EntropyPlugin { None, Moment, PairwiseLower, LogDet };
enum class CovMode { PerView, Concatenated };
enum class ObjectiveName { VICReg, VICRegPairwise, VICRegLogDet, InfoNCE, InfoObjective, InvarianceOnly };

std::string to_string(EntropyPlugin p);
std::string to_string(CovMode m);
std::string to_string(ObjectiveName n);
EntropyPlugin entropy_plugin_from_string(const std::string& s);
CovMode cov_mode_from_string(const std::string& s);
ObjectiveName objective_from_string(const std::string& s);

struct SslObjectiveConfig {
    ObjectiveName name = ObjectiveName::VICReg;
    double alpha = 25.0;
    double beta_cov = 1.0;
    double gamma_inv = 25.0;
    double gamma_target = 1.0;
    double epsilon = 1e-4;
    /// Only consulted by InfoObjective; the vicreg+* names fix their own plugin.
    EntropyPlugin entropy_plugin = EntropyPlugin::Moment;
    double temperature = 0.5;
    double logdet_beta = 1.0;
    /// Kernel width of the batch pairwise estimator.
    double pairwise_sigma = 1.0;
    double entropy_weight = 1.0;
    CovMode cov_mode = CovMode::PerView;
    /// Isotropic view-noise std σ_v entering Σ(x) = A·(σ_v² I)·Aᵀ + jitter·I.
    double view_sigma = 0.1;
    double jitter = 1e-6;

    /// Throws ConfigError naming the first out-of-range field.
    void validate() const;
    /// Plugin actually used by this objective.
    EntropyPlugin effective_plugin() const;
    bool operator==(const SslObjectiveConfig&) const = default;
};

namespace ad {

/// Column covariance with the unbiased 1/(N−1) normalization (K×K).
Var empirical_covariance(Var z);

/// (1/K)·Σₖ max(0, γ − √(Cₖₖ + ε)); the hinge passes gradient only when strictly active.
Var vicreg_variance(Var z, const SslObjectiveConfig& cfg);
/// (1/K)·Σ_{k≠k′} C²ₖₖ′.
Var vicreg_covariance(Var z);
/// (1/N)·Σᵢ ‖zᵢ − z′ᵢ‖².
Var vicreg_invariance(Var z, Var z_prime);
Var vicreg_total(Var z, Var z_prime, const SslObjectiveConfig& cfg);

/// Mean over rows of logsumexp_k(⟨ẑᵢ, ẑ′ₖ⟩/η) − ⟨ẑᵢ, ẑ′ᵢ⟩/η on L2-normalized rows.
Var simclr_infonce(Var z, Var z_prime, const SslObjectiveConfig& cfg);

/// Differentiable batch entropy selected by `plugin` (None gives a constant 0).
Var plugin_entropy(Var z, EntropyPlugin plugin, const SslObjectiveConfig& cfg);

/// −(1/N)·Σᵢ [w·H(Z) − log(|Σ(xᵢ)|·|Σ(x′ᵢ)|) − ½‖zᵢ − z′ᵢ‖²] with w = cfg.entropy_weight.
Var info_objective(Var z, Var z_prime, const std::vector<Var>& sigma_x, const std::vector<Var>& sigma_x_prime,
                   Var entropy_of_z, const SslObjectiveConfig& cfg);

/// Loss plus named components for logging.
struct LossTerms {
    Var total;
    std::vector<std::pair<std::string, Var>> parts;
};

/// Any objective except InfoObjective, which needs per-row covariances (see trainer).
LossTerms ssl_loss(Var z, Var z_prime, const SslObjectiveConfig& cfg);

} // namespace ad

} // namespace infolab

#endif // INFOLAB_SSL_LOSSES_HPP_
