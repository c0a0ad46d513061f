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

#include "infolab/ssl_losses.hpp"

#include <cmath>

#include "infolab/entropy.hpp"
#include "infolab/error.hpp"

namespace infolab {

std::string to_string(EntropyPlugin p)
{
    switch (p) {
    case EntropyPlugin::None: return "none";
    case EntropyPlugin::Moment: return "moment";
    case EntropyPlugin::PairwiseLower: return "pairwise_lower";
    case EntropyPlugin::LogDet: return "logdet";
    }
    return "none";
}

std::string to_string(CovMode m) { return m == CovMode::PerView ? "per_view" : "concatenated"; }

std::string to_string(ObjectiveName n)
{
    switch (n) {
    case ObjectiveName::VICReg: return "vicreg";
    case ObjectiveName::VICRegPairwise: return "vicreg+pairwise";
    case ObjectiveName::VICRegLogDet: return "vicreg+logdet";
    case ObjectiveName::InfoNCE: return "infonce";
    case ObjectiveName::InfoObjective: return "info_objective";
    case ObjectiveName::InvarianceOnly: return "invariance_only";
    }
    return "vicreg";
}

EntropyPlugin entropy_plugin_from_string(const std::string& s)
{
    for (auto p : {EntropyPlugin::None, EntropyPlugin::Moment, EntropyPlugin::PairwiseLower, EntropyPlugin::LogDet})
        if (to_string(p) == s) return p;
    throw ConfigError("unknown entropy_plugin '" + s + "'");
}

CovMode cov_mode_from_string(const std::string& s)
{
    if (s == "per_view") return CovMode::PerView;
    if (s == "concatenated") return CovMode::Concatenated;
    throw ConfigError("unknown cov_mode '" + s + "'");
}

ObjectiveName objective_from_string(const std::string& s)
{
    for (auto n : {ObjectiveName::VICReg, ObjectiveName::VICRegPairwise, ObjectiveName::VICRegLogDet,
                   ObjectiveName::InfoNCE, ObjectiveName::InfoObjective, ObjectiveName::InvarianceOnly})
        if (to_string(n) == s) return n;
    throw ConfigError("unknown objective '" + s + "'");
}

void SslObjectiveConfig::validate() const
{
    auto need = [](bool ok, const char* what) {
        if (!ok) throw ConfigError(std::string("objective.") + what + " out of range");
    };
    need(alpha >= 0.0, "alpha");
    need(beta_cov >= 0.0, "beta_cov");
    need(gamma_inv >= 0.0, "gamma_inv");
    need(gamma_target > 0.0, "gamma_target");
    need(epsilon > 0.0, "epsilon");
    need(temperature > 0.0, "temperature");
    need(logdet_beta > 0.0, "logdet_beta");
    need(pairwise_sigma > 0.0, "pairwise_sigma");
    need(entropy_weight >= 0.0, "entropy_weight");
    need(view_sigma > 0.0, "view_sigma");
    need(jitter > 0.0, "jitter");
}

EntropyPlugin SslObjectiveConfig::effective_plugin() const
{
    switch (name) {
    case ObjectiveName::VICRegPairwise: return EntropyPlugin::PairwiseLower;
    case ObjectiveName::VICRegLogDet: return EntropyPlugin::LogDet;
    case ObjectiveName::InfoObjective: return entropy_plugin;
    default: return EntropyPlugin::None;
    }
}

namespace ad {

namespace {

void require_batch(Var z, const char* op)
{
    if (z.rows() < 2) throw InsufficientSamples(std::string(op) + " needs N >= 2");
}

void require_pair(Var z, Var z_prime, const char* op)
{
    require_batch(z, op);
    if (z.rows() != z_prime.rows() || z.cols() != z_prime.cols())
        throw DimensionMismatch(std::string(op) + ": views have different shapes");
}

} // namespace

Var empirical_covariance(Var z)
{
    require_batch(z, "empirical_covariance");
    Var zc = center_cols(z);
    return scale(matmul(transpose(zc), zc), 1.0 / static_cast<double>(z.rows() - 1));
}

Var vicreg_variance(Var z, const SslObjectiveConfig& cfg)
{
    Var std_dev = sqrt(add_scalar(diag(empirical_covariance(z)), cfg.epsilon));
    Var gap = add_scalar(scale(std_dev, -1.0), cfg.gamma_target);
    return mean(max_const(gap, 0.0));
}

Var vicreg_covariance(Var z)
{
    Var c = empirical_covariance(z);
    Var off = sub(sum(square(c)), sum(square(diag(c))));
    return scale(off, 1.0 / static_cast<double>(z.cols()));
}

Var vicreg_invariance(Var z, Var z_prime)
{
    require_pair(z, z_prime, "vicreg_invariance");
    return scale(sum(square(sub(z, z_prime))), 1.0 / static_cast<double>(z.rows()));
}

Var vicreg_total(Var z, Var z_prime, const SslObjectiveConfig& cfg)
{
    require_pair(z, z_prime, "vicreg_total");
    Var inv = scale(vicreg_invariance(z, z_prime), cfg.gamma_inv);
    if (cfg.cov_mode == CovMode::Concatenated) {
        Var both = vstack(z, z_prime);
        return add(add(scale(vicreg_variance(both, cfg), 2.0 * cfg.alpha), scale(vicreg_covariance(both), 2.0 * cfg.beta_cov)),
                   inv);
    }
    Var var = add(vicreg_variance(z, cfg), vicreg_variance(z_prime, cfg));
    Var cov = add(vicreg_covariance(z), vicreg_covariance(z_prime));
    return add(add(scale(var, cfg.alpha), scale(cov, cfg.beta_cov)), inv);
}

Var simclr_infonce(Var z, Var z_prime, const SslObjectiveConfig& cfg)
{
    require_pair(z, z_prime, "simclr_infonce");
    Var s = scale(matmul(normalize_rows(z), transpose(normalize_rows(z_prime))), 1.0 / cfg.temperature);
    return mean(sub(row_logsumexp(s), diag(s)));
}

Var plugin_entropy(Var z, EntropyPlugin plugin, const SslObjectiveConfig& cfg)
{
    switch (plugin) {
    case EntropyPlugin::None: return z.tape()->constant(Matrix::Zero(1, 1));
    case EntropyPlugin::Moment: return moment_entropy(z, cfg.jitter);
    case EntropyPlugin::PairwiseLower: return pairwise_kernel_entropy(z, cfg.pairwise_sigma);
    case EntropyPlugin::LogDet: return logdet_batch_entropy(z, cfg.logdet_beta);
    }
    throw InvalidArgument("unknown entropy plugin");
}

Var info_objective(Var z, Var z_prime, const std::vector<Var>& sigma_x, const std::vector<Var>& sigma_x_prime,
                   Var entropy_of_z, const SslObjectiveConfig& cfg)
{
    require_pair(z, z_prime, "info_objective");
    const auto n = static_cast<std::size_t>(z.rows());
    if (sigma_x.size() != n || sigma_x_prime.size() != n)
        throw DimensionMismatch("info_objective: one covariance per row and view is required");
    Var logdets = z.tape()->constant(Matrix::Zero(1, 1));
    for (std::size_t i = 0; i < n; ++i) logdets = add(logdets, add(logdet(sigma_x[i]), logdet(sigma_x_prime[i])));
    const double inv_n = 1.0 / static_cast<double>(n);
    Var reg = sub(scale(entropy_of_z, cfg.entropy_weight), scale(logdets, inv_n));
    Var invariance = scale(sum(square(sub(z, z_prime))), 0.5 * inv_n);
    return scale(sub(reg, invariance), -1.0);
}

LossTerms ssl_loss(Var z, Var z_prime, const SslObjectiveConfig& cfg)
{
    LossTerms out;
    switch (cfg.name) {
    case ObjectiveName::InfoNCE: {
        out.total = simclr_infonce(z, z_prime, cfg);
        out.parts.emplace_back("infonce", out.total);
        return out;
    }
    case ObjectiveName::InfoObjective:
        throw InvalidArgument("info_objective needs per-row covariances; use the trainer");
    case ObjectiveName::InvarianceOnly: {
        Var inv = vicreg_invariance(z, z_prime);
        out.total = scale(inv, cfg.gamma_inv);
        out.parts.emplace_back("invariance", inv);
        return out;
    }
    default: break;
    }
    Var inv = vicreg_invariance(z, z_prime);
    if (cfg.cov_mode == CovMode::Concatenated) {
        Var both = vstack(z, z_prime);
        Var var = vicreg_variance(both, cfg);
        Var cov = vicreg_covariance(both);
        out.total = add(add(scale(var, 2.0 * cfg.alpha), scale(cov, 2.0 * cfg.beta_cov)), scale(inv, cfg.gamma_inv));
        out.parts.emplace_back("variance", var);
        out.parts.emplace_back("covariance", cov);
    } else {
        Var var = add(vicreg_variance(z, cfg), vicreg_variance(z_prime, cfg));
        Var cov = add(vicreg_covariance(z), vicreg_covariance(z_prime));
        out.total = add(add(scale(var, cfg.alpha), scale(cov, cfg.beta_cov)), scale(inv, cfg.gamma_inv));
        out.parts.emplace_back("variance", var);
        out.parts.emplace_back("covariance", cov);
    }
    out.parts.emplace_back("invariance", inv);
    const EntropyPlugin plugin = cfg.effective_plugin();
    if (plugin != EntropyPlugin::None) {
        Var h = scale(add(plugin_entropy(z, plugin, cfg), plugin_entropy(z_prime, plugin, cfg)), 0.5);
        out.total = sub(out.total, scale(h, cfg.entropy_weight));
        out.parts.emplace_back("entropy", h);
    }
    return out;
}

} // namespace ad

} // namespace infolab
