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

#include "infolab/entropy.hpp"

#include <cmath>
#include <numbers>
#include <thread>

#include "infolab/error.hpp"
#include "infolab/rng.hpp"

namespace infolab {

namespace {

constexpr double kLog2PiE = 2.8378770664093453; // log(2πe)
constexpr int kShards = 16;

std::vector<Gaussian> regularized_components(const GaussianMixture& m, double jitter)
{
    std::vector<Gaussian> out;
    out.reserve(m.size());
    for (const auto& g : m.components()) out.push_back(g.regularized(jitter));
    return out;
}

double entropy_of(const Gaussian& full_rank)
{
    return 0.5 * (static_cast<double>(full_rank.dim()) * kLog2PiE + full_rank.log_det());
}

struct ShardStats {
    long n = 0;
    double mean = 0.0;
    double m2 = 0.0;
};

} // namespace

std::string kind_name(EntropyKind kind)
{
    switch (kind) {
    case EntropyKind::MonteCarlo: return "mc";
    case EntropyKind::MomentUpper: return "moment_upper";
    case EntropyKind::PairwiseLower: return "pairwise_lower";
    case EntropyKind::PairwiseUpper: return "pairwise_upper";
    case EntropyKind::LogDet: return "logdet";
    case EntropyKind::ClosedFormGaussian: return "gaussian";
    }
    return "unknown";
}

EntropyEstimate gaussian_entropy(const Gaussian& g, double jitter)
{
    EntropyEstimate e;
    e.kind = EntropyKind::ClosedFormGaussian;
    e.value = entropy_of(g.regularized(jitter));
    return e;
}

EntropyEstimate mc_entropy(const GaussianMixture& m, long n, std::uint64_t seed)
{
    if (n < 100) throw InsufficientSamples("mc_entropy needs n >= 100, got " + std::to_string(n));
    if (m.size() == 0) throw InvalidArgument("empty mixture");
    for (const auto& g : m.components())
        if (!g.full_rank()) throw RankDeficientCovariance("mc_entropy component; jitter the mixture first");

    std::vector<ShardStats> stats(kShards);
    auto run_shard = [&](int s) {
        const long base = n / kShards;
        const long count = base + (s < n % kShards ? 1 : 0);
        ShardStats st;
        st.n = count;
        if (count == 0) {
            stats[static_cast<std::size_t>(s)] = st;
            return;
        }
        const Eigen::MatrixXd x = sample(m, count, mix_seed(seed, static_cast<std::uint64_t>(s)));
        const Eigen::VectorXd nll = -log_density_rows(m, x);
        st.mean = nll.mean();
        st.m2 = (nll.array() - st.mean).square().sum();
        stats[static_cast<std::size_t>(s)] = st;
    };

    const unsigned workers = std::min<unsigned>(worker_threads(), kShards);
    if (workers <= 1) {
        for (int s = 0; s < kShards; ++s) run_shard(s);
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < workers; ++t)
            pool.emplace_back([&, t] {
                for (int s = static_cast<int>(t); s < kShards; s += static_cast<int>(workers)) run_shard(s);
            });
        for (auto& th : pool) th.join();
    }

    // Chan's parallel combination, always in shard order.
    ShardStats total;
    for (const auto& st : stats) {
        if (st.n == 0) continue;
        const double na = static_cast<double>(total.n), nb = static_cast<double>(st.n);
        const double delta = st.mean - total.mean;
        const double nt = na + nb;
        total.mean += delta * nb / nt;
        total.m2 += st.m2 + delta * delta * na * nb / nt;
        total.n += st.n;
    }
    EntropyEstimate e;
    e.kind = EntropyKind::MonteCarlo;
    e.value = total.mean;
    const double var = total.m2 / static_cast<double>(total.n - 1);
    e.std_error = std::sqrt(var / static_cast<double>(total.n));
    e.n_samples = total.n;
    return e;
}

EntropyEstimate moment_upper_bound(const GaussianMixture& m, double jitter)
{
    const Moments mo = mixture_moments(m);
    EntropyEstimate e = gaussian_entropy(Gaussian::from_covariance(mo.mean, mo.cov), jitter);
    e.kind = EntropyKind::MomentUpper;
    return e;
}

namespace {

double pairwise_distance(const Gaussian& p, const Gaussian& q, PairwiseSide side)
{
    return side == PairwiseSide::Lower ? bhattacharyya_distance(p, q) : kl_divergence(p, q);
}

// D matrix, component entropies and the row sums S_i = Σ_j w_j exp(−D_ij), computed stably.
struct PairwiseTerms {
    Eigen::MatrixXd dist;
    Eigen::VectorXd log_s;
    double value = 0.0;
};

PairwiseTerms pairwise_terms(const std::vector<Gaussian>& comps, const Eigen::VectorXd& w, PairwiseSide side)
{
    const auto k = static_cast<Eigen::Index>(comps.size());
    PairwiseTerms t;
    t.dist = Eigen::MatrixXd::Zero(k, k);
    for (Eigen::Index i = 0; i < k; ++i)
        for (Eigen::Index j = 0; j < k; ++j)
            if (i != j)
                t.dist(i, j) =
                    pairwise_distance(comps[static_cast<std::size_t>(i)], comps[static_cast<std::size_t>(j)], side);
    t.log_s.resize(k);
    double value = 0.0;
    for (Eigen::Index i = 0; i < k; ++i) {
        double top = -std::numeric_limits<double>::infinity();
        for (Eigen::Index j = 0; j < k; ++j)
            if (w(j) > 0.0) top = std::max(top, std::log(w(j)) - t.dist(i, j));
        double acc = 0.0;
        for (Eigen::Index j = 0; j < k; ++j)
            if (w(j) > 0.0) acc += std::exp(std::log(w(j)) - t.dist(i, j) - top);
        t.log_s(i) = top + std::log(acc);
        if (w(i) > 0.0) value += w(i) * (entropy_of(comps[static_cast<std::size_t>(i)]) - t.log_s(i));
    }
    t.value = value;
    return t;
}

} // namespace

EntropyEstimate pairwise_bound(const GaussianMixture& m, PairwiseSide side, double jitter)
{
    if (m.size() == 0) throw InvalidArgument("empty mixture");
    const auto comps = regularized_components(m, jitter);
    EntropyEstimate e;
    e.kind = side == PairwiseSide::Lower ? EntropyKind::PairwiseLower : EntropyKind::PairwiseUpper;
    e.value = pairwise_terms(comps, m.weights(), side).value;
    return e;
}

std::vector<Eigen::VectorXd> pairwise_bound_mean_gradient(const GaussianMixture& m, PairwiseSide side, double jitter)
{
    const auto comps = regularized_components(m, jitter);
    const Eigen::VectorXd& w = m.weights();
    const PairwiseTerms t = pairwise_terms(comps, w, side);
    const auto k = static_cast<Eigen::Index>(comps.size());
    std::vector<Eigen::VectorXd> grad(comps.size(), Eigen::VectorXd::Zero(m.dim()));
    for (Eigen::Index i = 0; i < k; ++i) {
        if (!(w(i) > 0.0)) continue;
        const Gaussian& pi = comps[static_cast<std::size_t>(i)];
        for (Eigen::Index j = 0; j < k; ++j) {
            if (i == j || !(w(j) > 0.0)) continue;
            const Gaussian& pj = comps[static_cast<std::size_t>(j)];
            const double r = std::exp(std::log(w(j)) - t.dist(i, j) - t.log_s(i));
            const Eigen::VectorXd delta = pi.mean() - pj.mean();
            Eigen::VectorXd d_mu_i;
            if (side == PairwiseSide::Upper) {
                const auto l = pj.cov_factor().triangularView<Eigen::Lower>();
                d_mu_i = l.transpose().solve(l.solve(delta));
            } else {
                const Eigen::MatrixXd avg = 0.5 * (pi.covariance() + pj.covariance());
                d_mu_i = 0.25 * avg.llt().solve(delta);
            }
            grad[static_cast<std::size_t>(i)] += w(i) * r * d_mu_i;
            grad[static_cast<std::size_t>(j)] -= w(i) * r * d_mu_i;
        }
    }
    return grad;
}

EntropyEstimate logdet_batch_entropy(const Eigen::MatrixXd& z, double beta)
{
    ad::Tape tape;
    EntropyEstimate e;
    e.kind = EntropyKind::LogDet;
    e.value = ad::logdet_batch_entropy(tape.constant(z), beta).scalar();
    return e;
}

double pairwise_kernel_entropy(const Eigen::MatrixXd& z, double sigma)
{
    ad::Tape tape;
    return ad::pairwise_kernel_entropy(tape.constant(z), sigma).scalar();
}

double moment_entropy(const Eigen::MatrixXd& z, double lambda)
{
    ad::Tape tape;
    return ad::moment_entropy(tape.constant(z), lambda).scalar();
}

namespace ad {

Var logdet_batch_entropy(Var z, double beta)
{
    if (z.rows() < 2) throw InsufficientSamples("logdet_batch_entropy needs N >= 2");
    if (!(beta > 0.0)) throw InvalidArgument("logdet beta must be > 0");
    const double n = static_cast<double>(z.rows());
    const double k = static_cast<double>(z.cols());
    Var zc = center_cols(z);
    Var gram = matmul(transpose(zc), zc);
    Var m = add_const(scale(gram, k / (n * beta)), Matrix::Identity(z.cols(), z.cols()));
    return add_scalar(scale(logdet(m), 0.5), 0.5 * k * std::log(2.0 * std::numbers::pi * std::numbers::e * beta / k));
}

Var pairwise_kernel_entropy(Var z, double sigma)
{
    if (z.rows() < 1) throw InsufficientSamples("pairwise_kernel_entropy needs N >= 1");
    if (!(sigma > 0.0)) throw InvalidArgument("pairwise sigma must be > 0");
    const double n = static_cast<double>(z.rows());
    const double k = static_cast<double>(z.cols());
    Var d = scale(pairwise_sq_dists(z), -1.0 / (8.0 * sigma * sigma));
    Var lse = row_logsumexp(d);
    // −(1/N)Σᵢ [lseᵢ − log N]
    Var mixing = add_scalar(scale(mean(lse), -1.0), std::log(n));
    return add_scalar(mixing, 0.5 * k * (kLog2PiE + 2.0 * std::log(sigma)));
}

Var moment_entropy(Var z, double lambda)
{
    if (z.rows() < 2) throw InsufficientSamples("moment_entropy needs N >= 2");
    const double n = static_cast<double>(z.rows());
    const double k = static_cast<double>(z.cols());
    Var zc = center_cols(z);
    Var c = add_const(scale(matmul(transpose(zc), zc), 1.0 / n),
                      lambda * Matrix::Identity(z.cols(), z.cols()));
    return add_scalar(scale(logdet(c), 0.5), 0.5 * k * kLog2PiE);
}

} // namespace ad

} // namespace infolab
