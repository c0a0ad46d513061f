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

#include "infolab/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "infolab/entropy.hpp"
#include "infolab/genbound.hpp"
#include "infolab/rng.hpp"

namespace infolab {

std::string to_string(OptimizerKind k)
{
    switch (k) {
    case OptimizerKind::SGD: return "sgd";
    case OptimizerKind::SGDMomentum: return "sgd_momentum";
    case OptimizerKind::Adam: return "adam";
    }
    return "adam";
}

OptimizerKind optimizer_from_string(const std::string& s)
{
    if (s == "sgd") return OptimizerKind::SGD;
    if (s == "sgd_momentum") return OptimizerKind::SGDMomentum;
    if (s == "adam") return OptimizerKind::Adam;
    throw ConfigError("unknown optimizer '" + s + "'");
}

void TrainConfig::validate() const
{
    auto need = [](bool ok, const char* what) {
        if (!ok) throw ConfigError(std::string("train.") + what + " out of range");
    };
    need(epochs >= 0, "epochs");
    need(batch_size >= 2, "batch_size");
    need(learning_rate > 0.0, "learning_rate");
    need(momentum >= 0.0 && momentum < 1.0, "momentum");
    need(beta1 >= 0.0 && beta1 < 1.0, "beta1");
    need(beta2 >= 0.0 && beta2 < 1.0, "beta2");
    need(eps_adam > 0.0, "eps_adam");
    need(diagnostics_every >= 1, "diagnostics_every");
    need(pairs_per_epoch >= batch_size, "pairs_per_epoch");
    need(probe_batch >= 2, "probe_batch");
    need(max_steps >= -1, "max_steps");
}

TrainingAborted::TrainingAborted(long step, PwaNetwork last_good, TrainTrace trace_so_far)
    : NumericalFailure("non-finite loss or gradient at step " + std::to_string(step)), step_(step),
      last_good_(std::move(last_good)), trace_(std::move(trace_so_far))
{
}

CsvTable TrainTrace::to_csv() const
{
    CsvTable t;
    t.header = {"step", "loss"};
    for (const auto& n : term_names) t.header.push_back("term_" + n);
    const Eigen::Index k = records.empty() ? 0 : records.front().embedding_std.size();
    for (Eigen::Index i = 0; i < k; ++i) t.header.push_back("std_" + std::to_string(i));
    t.header.insert(t.header.end(), {"logdet_entropy", "pairwise_entropy", "wall_time"});
    for (const auto& r : records) {
        std::vector<std::string> row{std::to_string(r.step), format_double(r.loss)};
        for (double v : r.terms) row.push_back(format_double(v));
        for (Eigen::Index i = 0; i < r.embedding_std.size(); ++i) row.push_back(format_double(r.embedding_std(i)));
        row.push_back(format_double(r.logdet_entropy));
        row.push_back(format_double(r.pairwise_entropy));
        row.push_back(format_double(r.wall_time));
        t.rows.push_back(std::move(row));
    }
    return t;
}

std::vector<Eigen::MatrixXd> Optimizer::step(const std::vector<Eigen::MatrixXd>& grads)
{
    ++t_;
    std::vector<Eigen::MatrixXd> deltas(grads.size());
    if (m_.empty()) {
        for (const auto& g : grads) {
            m_.push_back(Eigen::MatrixXd::Zero(g.rows(), g.cols()));
            v_.push_back(Eigen::MatrixXd::Zero(g.rows(), g.cols()));
        }
    }
    for (std::size_t i = 0; i < grads.size(); ++i) {
        const Eigen::MatrixXd& g = grads[i];
        switch (cfg_.optimizer) {
        case OptimizerKind::SGD: deltas[i] = -cfg_.learning_rate * g; break;
        case OptimizerKind::SGDMomentum:
            m_[i] = cfg_.momentum * m_[i] + g;
            deltas[i] = -cfg_.learning_rate * m_[i];
            break;
        case OptimizerKind::Adam: {
            m_[i] = cfg_.beta1 * m_[i] + (1.0 - cfg_.beta1) * g;
            v_[i] = cfg_.beta2 * v_[i] + (1.0 - cfg_.beta2) * g.cwiseAbs2();
            const double c1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
            const double c2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
            deltas[i] = (-cfg_.learning_rate * (m_[i] / c1).array() / ((v_[i] / c2).array().sqrt() + cfg_.eps_adam)).matrix();
            break;
        }
        }
    }
    return deltas;
}

ad::LossTerms build_loss(ad::Tape& tape, const PwaNetwork& net, const ad::NetVars& vars, const Eigen::MatrixXd& x,
                         const Eigen::MatrixXd& x_prime, const SslObjectiveConfig& cfg)
{
    ad::Var z = ad::forward(net, vars, tape.constant(x));
    ad::Var zp = ad::forward(net, vars, tape.constant(x_prime));
    if (cfg.name != ObjectiveName::InfoObjective) return ad::ssl_loss(z, zp, cfg);

    const Eigen::Index k = net.output_dim();
    const Eigen::MatrixXd ridge = cfg.jitter * Eigen::MatrixXd::Identity(k, k);
    const double var_v = cfg.view_sigma * cfg.view_sigma;
    auto sigma_of = [&](const Eigen::VectorXd& row) {
        ad::Var a = ad::jacobian(net, vars, row);
        return ad::add_const(ad::scale(ad::matmul(a, ad::transpose(a)), var_v), ridge);
    };
    std::vector<ad::Var> sx, sxp;
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        sx.push_back(sigma_of(x.row(i).transpose()));
        sxp.push_back(sigma_of(x_prime.row(i).transpose()));
    }
    ad::Var h = ad::plugin_entropy(z, cfg.entropy_plugin, cfg);
    ad::LossTerms out;
    out.total = ad::info_objective(z, zp, sx, sxp, h, cfg);
    out.parts.emplace_back("entropy", h);
    out.parts.emplace_back("invariance", ad::vicreg_invariance(z, zp));
    return out;
}

double batch_loss(const PwaNetwork& net, const Eigen::MatrixXd& x, const Eigen::MatrixXd& x_prime,
                  const SslObjectiveConfig& cfg)
{
    ad::Tape tape;
    const ad::NetVars vars = ad::bind(tape, net);
    return build_loss(tape, net, vars, x, x_prime, cfg).total.scalar();
}

Eigen::VectorXd embedding_std(const Eigen::MatrixXd& z)
{
    const Eigen::RowVectorXd mu = z.colwise().mean();
    return ((z.rowwise() - mu).colwise().squaredNorm() / static_cast<double>(z.rows())).array().sqrt().transpose();
}

namespace {

std::vector<std::string> term_names_for(const SslObjectiveConfig& cfg)
{
    // Mirrors the parts emitted by ssl_loss / build_loss.
    switch (cfg.name) {
    case ObjectiveName::InfoNCE: return {"infonce"};
    case ObjectiveName::InvarianceOnly: return {"invariance"};
    case ObjectiveName::InfoObjective: return {"entropy", "invariance"};
    default: break;
    }
    std::vector<std::string> names{"variance", "covariance", "invariance"};
    if (cfg.effective_plugin() != EntropyPlugin::None) names.emplace_back("entropy");
    return names;
}

bool all_finite(const std::vector<Eigen::MatrixXd>& grads)
{
    return std::all_of(grads.begin(), grads.end(), [](const Eigen::MatrixXd& g) { return g.allFinite(); });
}

} // namespace

TrainResult train_ssl(PwaNetwork net, const PrototypeDataset& ds, const SslObjectiveConfig& obj, const TrainConfig& cfg)
{
    obj.validate();
    cfg.validate();
    if (net.input_dim() != ds.dim()) throw DimensionMismatch("network input dim does not match the dataset");

    TrainTrace trace;
    trace.term_names = term_names_for(obj);
    const ViewPairs probe = sample_pairs(ds, cfg.probe_batch, mix_seed(cfg.seed, 0xd1a9));
    const Eigen::Index loss_rows = std::min<Eigen::Index>(cfg.batch_size, probe.x.rows());
    const Eigen::MatrixXd probe_x = probe.x.topRows(loss_rows);
    const Eigen::MatrixXd probe_xp = probe.x_prime.topRows(loss_rows);
    const auto t0 = std::chrono::steady_clock::now();

    auto log_point = [&](long step) {
        TraceRecord r;
        r.step = step;
        ad::Tape tape;
        const ad::NetVars vars = ad::bind(tape, net);
        const ad::LossTerms lt = build_loss(tape, net, vars, probe_x, probe_xp, obj);
        r.loss = lt.total.scalar();
        for (const auto& p : lt.parts) r.terms.push_back(p.second.scalar());
        const Eigen::MatrixXd z = net.forward_batch(probe.x);
        r.embedding_std = embedding_std(z);
        r.logdet_entropy = logdet_batch_entropy(z, obj.logdet_beta).value;
        r.pairwise_entropy = pairwise_kernel_entropy(z, obj.pairwise_sigma);
        if (cfg.record_wall_time)
            r.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        trace.records.push_back(std::move(r));
    };

    log_point(0);
    Optimizer opt(cfg);
    long step = 0;
    auto done = [&] { return cfg.max_steps >= 0 && step >= cfg.max_steps; };
    for (int epoch = 0; epoch < cfg.epochs && !done(); ++epoch) {
        const ViewPairs pairs = sample_pairs(ds, cfg.pairs_per_epoch, mix_seed(cfg.seed, static_cast<std::uint64_t>(epoch)));
        for (Eigen::Index start = 0; start + cfg.batch_size <= pairs.x.rows() && !done(); start += cfg.batch_size) {
            ad::Tape tape;
            const ad::NetVars vars = ad::bind(tape, net);
            const ad::LossTerms lt = build_loss(tape, net, vars, pairs.x.middleRows(start, cfg.batch_size),
                                                pairs.x_prime.middleRows(start, cfg.batch_size), obj);
            const std::vector<ad::Var> params = vars.all();
            const std::vector<Eigen::MatrixXd> grads = ad::grad(tape, lt.total, params);
            if (!std::isfinite(lt.total.scalar()) || !all_finite(grads)) throw TrainingAborted(step + 1, net, trace);
            PwaNetwork before = net;
            apply_update(net, opt.step(grads));
            ++step;
            bool finite = true;
            for (const auto& ly : net.layers()) finite = finite && ly.weight.allFinite() && ly.bias.allFinite();
            if (!finite) throw TrainingAborted(step, std::move(before), trace);
            if (step % cfg.diagnostics_every == 0) log_point(step);
        }
    }
    if (trace.records.back().step != step) log_point(step);
    return TrainResult{std::move(net), std::move(trace)};
}

double linear_probe(const Eigen::MatrixXd& train_embeddings, const std::vector<int>& train_labels,
                    const Eigen::MatrixXd& test_embeddings, const std::vector<int>& test_labels, double ridge)
{
    if (train_embeddings.rows() != static_cast<Eigen::Index>(train_labels.size()) ||
        test_embeddings.rows() != static_cast<Eigen::Index>(test_labels.size()))
        throw DimensionMismatch("linear_probe: one label per embedding row");
    if (train_embeddings.cols() != test_embeddings.cols()) throw DimensionMismatch("linear_probe: embedding widths differ");
    if (test_labels.empty()) throw InsufficientSamples("linear_probe needs a non-empty test set");
    int n_classes = 0;
    for (int l : train_labels) n_classes = std::max(n_classes, l + 1);
    for (int l : test_labels) n_classes = std::max(n_classes, l + 1);

    const Eigen::RowVectorXd mu = train_embeddings.colwise().mean();
    const Eigen::MatrixXd y = one_hot(train_labels, n_classes);
    const Eigen::RowVectorXd y_bar = y.colwise().mean();
    const Eigen::MatrixXd zc = (train_embeddings.rowwise() - mu).transpose();
    const Eigen::MatrixXd w = min_norm_probe(zc, y.rowwise() - y_bar, ridge);

    const Eigen::MatrixXd scores = ((test_embeddings.rowwise() - mu) * w.transpose()).rowwise() + y_bar;
    Eigen::Index correct = 0;
    for (Eigen::Index i = 0; i < scores.rows(); ++i) {
        Eigen::Index best = 0;
        for (Eigen::Index c = 1; c < scores.cols(); ++c)
            if (scores(i, c) > scores(i, best)) best = c;
        if (best == test_labels[static_cast<std::size_t>(i)]) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(scores.rows());
}

double linear_probe(const PwaNetwork& net, const LabeledPoints& train, const LabeledPoints& test, double ridge)
{
    return linear_probe(net.forward_batch(train.x), train.labels, net.forward_batch(test.x), test.labels, ridge);
}

} // namespace infolab
