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

#include "infolab/genbound.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "infolab/error.hpp"
#include "infolab/linalg.hpp"
#include "infolab/rng.hpp"

namespace infolab {

namespace {

// Right singular vectors of Z spanning its row space (n × rank).
Eigen::MatrixXd row_space_basis(const Eigen::MatrixXd& z, double rtol)
{
    if (z.size() == 0) return Eigen::MatrixXd::Zero(z.cols(), 0);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(z, Eigen::ComputeThinV);
    const Eigen::VectorXd& s = svd.singularValues();
    const double cut = s.size() > 0 ? rtol * s(0) : 0.0;
    Eigen::Index rank = 0;
    while (rank < s.size() && s(rank) > cut) ++rank;
    return svd.matrixV().leftCols(rank);
}

double max_row_error(const Eigen::MatrixXd& w, const Eigen::MatrixXd& emb, const Eigen::MatrixXd& y)
{
    // rows of emb are f(x); rows of y are labels
    const Eigen::MatrixXd pred = emb * w.transpose();
    return (pred - y).rowwise().norm().maxCoeff();
}

double max_same_label_distance(const Eigen::MatrixXd& emb, const std::vector<int>& labels)
{
    double best = 0.0;
    for (Eigen::Index i = 0; i < emb.rows(); ++i)
        for (Eigen::Index j = i + 1; j < emb.rows(); ++j)
            if (labels[static_cast<std::size_t>(i)] == labels[static_cast<std::size_t>(j)])
                best = std::max(best, (emb.row(i) - emb.row(j)).squaredNorm());
    return std::sqrt(best);
}

void require_finite(double v, const char* term)
{
    if (!std::isfinite(v)) throw NumericalFailure(std::string("bound term '") + term + "' is not finite");
}

} // namespace

double invariance_loss(const Eigen::MatrixXd& z_plus, const Eigen::MatrixXd& z_plus_plus)
{
    if (z_plus.rows() != z_plus_plus.rows() || z_plus.cols() != z_plus_plus.cols())
        throw DimensionMismatch("invariance_loss: view shapes differ");
    if (z_plus.rows() < 1) throw InsufficientSamples("invariance_loss needs m >= 1");
    return (z_plus - z_plus_plus).rowwise().norm().mean();
}

double invariance_loss(const PwaNetwork& f, const Eigen::MatrixXd& x_plus, const Eigen::MatrixXd& x_plus_plus)
{
    return invariance_loss(f.forward_batch(x_plus), f.forward_batch(x_plus_plus));
}

Eigen::MatrixXd projector(const Eigen::MatrixXd& z, double rtol)
{
    const Eigen::MatrixXd v = row_space_basis(z, rtol);
    return Eigen::MatrixXd::Identity(z.cols(), z.cols()) - v * v.transpose();
}

double projection_residual(const Eigen::MatrixXd& z, const Eigen::MatrixXd& y, double rtol)
{
    if (y.rows() != z.cols()) throw DimensionMismatch("projection_residual: Y rows must equal Z columns");
    const Eigen::MatrixXd v = row_space_basis(z, rtol);
    return (y - v * (v.transpose() * y)).norm();
}

Eigen::MatrixXd min_norm_probe(const Eigen::MatrixXd& z, const Eigen::MatrixXd& y, double ridge, double rtol)
{
    if (y.rows() != z.cols()) throw DimensionMismatch("min_norm_probe: Y rows must equal Z columns");
    if (!(ridge >= 0.0)) throw InvalidArgument("ridge must be >= 0");
    if (ridge == 0.0) return y.transpose() * linalg::pinv(z, rtol); // Zᵀ(ZZᵀ)† = Z†
    const Eigen::MatrixXd gram = z * z.transpose() + ridge * Eigen::MatrixXd::Identity(z.rows(), z.rows());
    return gram.llt().solve(z * y).transpose();
}

double empirical_rademacher(const Eigen::MatrixXd& values, int n_sign_draws, std::uint64_t seed)
{
    if (values.rows() < 1) throw InvalidArgument("empirical_rademacher: empty hypothesis ensemble");
    if (n_sign_draws < 1) throw InvalidArgument("n_sign_draws must be >= 1");
    const Eigen::Index m = values.cols();
    if (m < 1) throw InsufficientSamples("empirical_rademacher needs m >= 1");
    Engine rng = make_engine(seed);
    std::bernoulli_distribution coin(0.5);
    Eigen::VectorXd xi(m);
    double acc = 0.0;
    for (int d = 0; d < n_sign_draws; ++d) {
        for (Eigen::Index i = 0; i < m; ++i) xi(i) = coin(rng) ? 1.0 : -1.0;
        acc += (values * xi).maxCoeff();
    }
    return acc / static_cast<double>(n_sign_draws) / std::sqrt(static_cast<double>(m));
}

double empirical_rademacher(const std::vector<PwaNetwork>& ensemble, const Eigen::MatrixXd& x_plus,
                            const Eigen::MatrixXd& x_plus_plus, int n_sign_draws, std::uint64_t seed)
{
    Eigen::MatrixXd values(static_cast<Eigen::Index>(ensemble.size()), x_plus.rows());
    for (std::size_t f = 0; f < ensemble.size(); ++f)
        values.row(static_cast<Eigen::Index>(f)) =
            (ensemble[f].forward_batch(x_plus) - ensemble[f].forward_batch(x_plus_plus)).rowwise().norm().transpose();
    return empirical_rademacher(values, n_sign_draws, seed);
}

Eigen::MatrixXd one_hot(const std::vector<int>& labels, int n_classes)
{
    Eigen::MatrixXd y = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(labels.size()), n_classes);
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] < 0 || labels[i] >= n_classes) throw InvalidArgument("label out of range for one_hot");
        y(static_cast<Eigen::Index>(i), labels[i]) = 1.0;
    }
    return y;
}

std::vector<EnsembleMember> make_ensemble(const PwaNetwork& trained, int n_reinit, int n_perturbed, double rel_noise,
                                          std::uint64_t seed)
{
    std::vector<EnsembleMember> out;
    out.push_back({trained, "trained"});
    std::vector<int> dims{static_cast<int>(trained.input_dim())};
    for (const auto& ly : trained.layers()) dims.push_back(static_cast<int>(ly.weight.rows()));
    for (int r = 0; r < n_reinit; ++r) {
        const std::uint64_t s = mix_seed(seed, 0x1000u + static_cast<std::uint64_t>(r));
        out.push_back({PwaNetwork::random(dims, trained.activation(), s), "reinit:" + std::to_string(s)});
    }
    for (int p = 0; p < n_perturbed; ++p) {
        const std::uint64_t s = mix_seed(seed, 0x2000u + static_cast<std::uint64_t>(p));
        Engine rng = make_engine(s);
        PwaNetwork net = trained;
        for (auto& ly : net.mutable_layers()) {
            const double rms = std::sqrt(ly.weight.squaredNorm() / static_cast<double>(ly.weight.size()));
            ly.weight += rel_noise * rms * standard_normal(rng, ly.weight.rows(), ly.weight.cols());
            ly.bias += rel_noise * rms * standard_normal(rng, ly.bias.size(), 1);
        }
        out.push_back({std::move(net), "perturbed:" + std::to_string(s)});
    }
    return out;
}

double q_mn(const BoundConstants& k, double m, double n, double delta)
{
    const double n_classes = static_cast<double>(k.p_hat.size());
    const double mass = k.p_hat.array().sqrt().sum() + k.p.array().sqrt().sum();
    const double first = k.c * (2.0 * k.rademacher_f / std::sqrt(m) + k.tau * std::sqrt(std::log(3.0 / delta) / (2.0 * m)) +
                                k.tau_sbar * std::sqrt(std::log(3.0 / delta) / (2.0 * n)));
    const double second = k.kappa_s * std::sqrt(2.0 * std::log(6.0 * n_classes / delta) / (2.0 * n)) * mass;
    const double third = 4.0 * k.rademacher_wf / std::sqrt(m) + 2.0 * k.kappa * std::sqrt(std::log(4.0 / delta) / (2.0 * m)) +
                         2.0 * k.kappa_sbar * std::sqrt(std::log(4.0 / delta) / (2.0 * n));
    return first + second + third;
}

double BoundReport::total_at(double m_new, double n_new) const
{
    return constants.c * invariance_loss + 2.0 / std::sqrt(m_new) * proj_unlabeled_norm +
           1.0 / std::sqrt(n_new) * proj_labeled_norm + q_mn(constants, m_new, n_new, delta);
}

nlohmann::json BoundReport::to_json() const
{
    nlohmann::json j;
    j["m"] = m;
    j["n"] = n;
    j["delta"] = delta;
    j["n_classes"] = n_classes;
    j["invariance_loss"] = invariance_loss;
    j["invariance_term"] = invariance_term;
    j["proj_unlabeled_norm"] = proj_unlabeled_norm;
    j["proj_unlabeled_term"] = proj_unlabeled_term;
    j["proj_labeled_norm"] = proj_labeled_norm;
    j["proj_labeled_term"] = proj_labeled_term;
    j["rademacher_f_raw"] = rademacher_f_raw;
    j["rademacher_wf_raw"] = rademacher_wf_raw;
    j["rademacher_term"] = 2.0 * constants.rademacher_f / std::sqrt(m);
    nlohmann::json k;
    k["c"] = constants.c;
    k["kappa_s"] = constants.kappa_s;
    k["kappa_sbar"] = constants.kappa_sbar;
    k["kappa"] = constants.kappa;
    k["tau"] = constants.tau;
    k["tau_sbar"] = constants.tau_sbar;
    k["zeta"] = constants.zeta;
    k["rademacher_f"] = constants.rademacher_f;
    k["rademacher_wf"] = constants.rademacher_wf;
    k["p_hat"] = std::vector<double>(constants.p_hat.data(), constants.p_hat.data() + constants.p_hat.size());
    k["p"] = std::vector<double>(constants.p.data(), constants.p.data() + constants.p.size());
    j["constants"] = k;
    j["q_mn"] = q;
    j["total_bound"] = total_bound;
    j["train_loss"] = train_loss;
    j["train_loss_rms"] = train_loss_rms;
    j["measured_test_loss"] = measured_test_loss ? nlohmann::json(*measured_test_loss) : nlohmann::json(nullptr);
    nlohmann::json informal;
    informal["invariance"] = invariance_loss;
    informal["rademacher"] = 2.0 * constants.rademacher_f / std::sqrt(m);
    informal["projection"] = proj_unlabeled_term + proj_labeled_term;
    informal["remainder"] = total_bound - invariance_term - proj_unlabeled_term - proj_labeled_term -
                            constants.c * 2.0 * constants.rademacher_f / std::sqrt(m);
    j["informal_decomposition"] = informal;
    j["log2_ensemble"] = log2_ensemble;
    j["ensemble"] = ensemble_provenance;
    j["flags"] = flags;
    return j;
}

BoundReport evaluate_bound(const BoundInputs& in)
{
    if (!(in.delta > 0.0 && in.delta < 1.0)) throw InvalidArgument("delta must lie in (0, 1)");
    const Eigen::Index n = in.labeled.x.rows();
    const Eigen::Index m = in.x_plus.rows();
    if (n < 1 || m < 1) throw InsufficientSamples("bound needs n >= 1 and m >= 1");
    if (in.x_plus_plus.rows() != m || static_cast<Eigen::Index>(in.unlabeled_labels.size()) != m)
        throw DimensionMismatch("unlabeled views and labels must have m rows");
    if (static_cast<Eigen::Index>(in.labeled.labels.size()) != n) throw DimensionMismatch("one label per labeled row");

    int n_classes = 0;
    auto grow = [&](const std::vector<int>& ls) {
        for (int l : ls) n_classes = std::max(n_classes, l + 1);
    };
    grow(in.labeled.labels);
    grow(in.unlabeled_labels);
    if (in.test) grow(in.test->labels);
    if (in.class_marginals) n_classes = std::max(n_classes, static_cast<int>(in.class_marginals->size()));

    const std::vector<EnsembleMember> ensemble =
        in.ensemble.empty() ? make_ensemble(in.encoder, 3, 4, 0.05, in.seed) : in.ensemble;

    BoundReport r;
    r.m = static_cast<double>(m);
    r.n = static_cast<double>(n);
    r.delta = in.delta;
    r.n_classes = n_classes;

    const Eigen::MatrixXd y_s = one_hot(in.labeled.labels, n_classes);
    const Eigen::MatrixXd y_sbar = one_hot(in.unlabeled_labels, n_classes);
    const Eigen::MatrixXd e_s = in.encoder.forward_batch(in.labeled.x);
    const Eigen::MatrixXd e_plus = in.encoder.forward_batch(in.x_plus);
    const Eigen::MatrixXd e_plus_plus = in.encoder.forward_batch(in.x_plus_plus);

    const Eigen::MatrixXd w_s = min_norm_probe(e_s.transpose(), y_s);
    const Eigen::MatrixXd w_sbar = min_norm_probe(e_plus.transpose(), y_sbar);

    r.invariance_loss = invariance_loss(e_plus, e_plus_plus);
    r.proj_unlabeled_norm = projection_residual(e_plus.transpose(), y_sbar);
    r.proj_labeled_norm = projection_residual(e_s.transpose(), y_s);

    BoundConstants& k = r.constants;
    k.c = linalg::spectral_norm(w_s - w_sbar, 100, 1e-10);

    // Evaluation set: labeled points and both unlabeled views with their labels.
    Eigen::MatrixXd x_eval(n + 2 * m, in.labeled.x.cols());
    x_eval << in.labeled.x, in.x_plus, in.x_plus_plus;
    std::vector<int> l_eval = in.labeled.labels;
    l_eval.insert(l_eval.end(), in.unlabeled_labels.begin(), in.unlabeled_labels.end());
    l_eval.insert(l_eval.end(), in.unlabeled_labels.begin(), in.unlabeled_labels.end());
    const Eigen::MatrixXd y_eval = one_hot(l_eval, n_classes);
    const Eigen::MatrixXd e_eval = in.encoder.forward_batch(x_eval);

    k.kappa_s = max_row_error(w_s, e_eval, y_eval);
    k.kappa_sbar = max_row_error(w_sbar, e_eval, y_eval);
    k.tau_sbar = max_same_label_distance(e_eval, l_eval);
    k.zeta = y_eval.rowwise().norm().maxCoeff();
    k.kappa = std::max(k.kappa_s, k.kappa_sbar);
    k.tau = k.tau_sbar;

    Eigen::MatrixXd inv_values(static_cast<Eigen::Index>(ensemble.size()), m);
    Eigen::MatrixXd fit_values(static_cast<Eigen::Index>(ensemble.size()), m);
    for (std::size_t f = 0; f < ensemble.size(); ++f) {
        const PwaNetwork& net = ensemble[f].net;
        const Eigen::MatrixXd ep = net.forward_batch(in.x_plus);
        const Eigen::MatrixXd epp = net.forward_batch(in.x_plus_plus);
        const Eigen::MatrixXd w_f = min_norm_probe(ep.transpose(), y_sbar);
        const auto row = static_cast<Eigen::Index>(f);
        inv_values.row(row) = (ep - epp).rowwise().norm().transpose();
        fit_values.row(row) = (y_sbar - ep * w_f.transpose()).rowwise().norm().transpose();
        const Eigen::MatrixXd ee = net.forward_batch(x_eval);
        k.kappa = std::max(k.kappa, max_row_error(w_f, ee, y_eval));
        k.tau = std::max(k.tau, max_same_label_distance(ee, l_eval));
        r.ensemble_provenance.push_back(ensemble[f].provenance);
    }
    r.rademacher_f_raw = empirical_rademacher(inv_values, in.n_sign_draws, mix_seed(in.seed, 0xf));
    r.rademacher_wf_raw = empirical_rademacher(fit_values, in.n_sign_draws, mix_seed(in.seed, 0xaf));
    k.rademacher_f = std::max(0.0, r.rademacher_f_raw);
    k.rademacher_wf = std::max(0.0, r.rademacher_wf_raw);

    k.p_hat = y_s.colwise().mean().transpose();
    if (in.class_marginals) {
        const Eigen::VectorXd& p = *in.class_marginals;
        if (p.size() != n_classes || (p.array() < 0.0).any() || std::abs(p.sum() - 1.0) > 1e-9)
            throw InvalidArgument("class_marginals must be a probability vector over every class");
        k.p = p;
    } else {
        k.p = k.p_hat;
        r.flags.emplace_back("p_defaults_to_p_hat");
    }
    r.flags.emplace_back("rademacher_is_finite_ensemble_lower_estimate");
    r.flags.emplace_back("tau_is_ensemble_max");

    require_finite(k.c, "c");
    require_finite(k.kappa_s, "kappa_s");
    require_finite(k.kappa_sbar, "kappa_sbar");
    require_finite(k.kappa, "kappa");
    require_finite(k.tau, "tau");
    require_finite(k.tau_sbar, "tau_sbar");
    require_finite(r.rademacher_f_raw, "rademacher_f");
    require_finite(r.rademacher_wf_raw, "rademacher_wf");
    require_finite(r.invariance_loss, "invariance_loss");
    require_finite(r.proj_unlabeled_norm, "proj_unlabeled");
    require_finite(r.proj_labeled_norm, "proj_labeled");

    r.invariance_term = k.c * r.invariance_loss;
    r.proj_unlabeled_term = 2.0 / std::sqrt(r.m) * r.proj_unlabeled_norm;
    r.proj_labeled_term = 1.0 / std::sqrt(r.n) * r.proj_labeled_norm;
    r.q = q_mn(k, r.m, r.n, in.delta);
    r.total_bound = r.invariance_term + r.proj_unlabeled_term + r.proj_labeled_term + r.q;
    require_finite(r.total_bound, "total_bound");

    const Eigen::MatrixXd fit_s = e_s * w_s.transpose() - y_s;
    r.train_loss = fit_s.rowwise().norm().mean();
    r.train_loss_rms = fit_s.norm() / std::sqrt(r.n); // Jensen: train_loss <= train_loss_rms
    if (in.test) {
        const Eigen::MatrixXd e_t = in.encoder.forward_batch(in.test->x);
        r.measured_test_loss = (e_t * w_s.transpose() - one_hot(in.test->labels, n_classes)).rowwise().norm().mean();
    }
    r.log2_ensemble = std::log2(static_cast<double>(ensemble.size()));
    return r;
}

} // namespace infolab
