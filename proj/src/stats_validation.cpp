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

#include "infolab/stats_validation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include "infolab/error.hpp"
#include "infolab/gaussian.hpp"
#include "infolab/rng.hpp"

namespace infolab {

NormalityTest dagostino_pearson_test(const Eigen::VectorXd& samples)
{
    const double n = static_cast<double>(samples.size());
    if (samples.size() < 20) throw InsufficientSamples("D'Agostino-Pearson needs n >= 20, got " + std::to_string(samples.size()));
    const double mu = samples.mean();
    const Eigen::ArrayXd c = samples.array() - mu;
    const double m2 = c.square().mean();
    const double m3 = c.cube().mean();
    const double m4 = c.square().square().mean();
    if (!(m2 > 0.0) || m2 <= 1e-28 * mu * mu) throw InvalidArgument("degenerate sample (zero variance)");

    NormalityTest t;
    // Skewness transform.
    const double b1 = m3 / std::pow(m2, 1.5);
    double y = b1 * std::sqrt((n + 1.0) * (n + 3.0) / (6.0 * (n - 2.0)));
    const double beta2 = 3.0 * (n * n + 27.0 * n - 70.0) * (n + 1.0) * (n + 3.0) /
                         ((n - 2.0) * (n + 5.0) * (n + 7.0) * (n + 9.0));
    const double w2 = -1.0 + std::sqrt(2.0 * (beta2 - 1.0));
    const double delta = 1.0 / std::sqrt(0.5 * std::log(w2));
    const double alpha = std::sqrt(2.0 / (w2 - 1.0));
    if (y == 0.0) y = 1.0;
    t.z_skew = delta * std::log(y / alpha + std::sqrt((y / alpha) * (y / alpha) + 1.0));
    if (b1 == 0.0) t.z_skew = delta * std::log(1.0 / alpha + std::sqrt(1.0 / (alpha * alpha) + 1.0));

    // Anscombe-Glynn kurtosis transform.
    const double b2 = m4 / (m2 * m2);
    const double e = 3.0 * (n - 1.0) / (n + 1.0);
    const double var_b2 = 24.0 * n * (n - 2.0) * (n - 3.0) / ((n + 1.0) * (n + 1.0) * (n + 3.0) * (n + 5.0));
    const double x = (b2 - e) / std::sqrt(var_b2);
    const double sqrt_beta1 = 6.0 * (n * n - 5.0 * n + 2.0) / ((n + 7.0) * (n + 9.0)) *
                              std::sqrt(6.0 * (n + 3.0) * (n + 5.0) / (n * (n - 2.0) * (n - 3.0)));
    const double a = 6.0 + 8.0 / sqrt_beta1 * (2.0 / sqrt_beta1 + std::sqrt(1.0 + 4.0 / (sqrt_beta1 * sqrt_beta1)));
    const double term1 = 1.0 - 2.0 / (9.0 * a);
    const double denom = 1.0 + x * std::sqrt(2.0 / (a - 4.0));
    if (denom == 0.0) throw NumericalFailure("kurtosis transform undefined (zero denominator)");
    const double term2 = (denom > 0.0 ? 1.0 : -1.0) * std::cbrt((1.0 - 2.0 / a) / std::abs(denom));
    t.z_kurtosis = (term1 - term2) / std::sqrt(2.0 / (9.0 * a));

    t.k2 = t.z_skew * t.z_skew + t.z_kurtosis * t.z_kurtosis;
    t.p_value = std::exp(-0.5 * t.k2); // χ²(2) survival function
    return t;
}

double dagostino_pearson(const Eigen::VectorXd& samples) { return dagostino_pearson_test(samples).p_value; }

NormalityReport test_output_gaussianity(const Eigen::MatrixXd& outputs, double alpha)
{
    NormalityReport r;
    r.n_samples = outputs.rows();
    Eigen::Index tested = 0;
    double min_p = 1.0;
    for (Eigen::Index k = 0; k < outputs.cols(); ++k) {
        const Eigen::VectorXd col = outputs.col(k);
        const double spread = col.maxCoeff() - col.minCoeff();
        const double scale = std::max(col.cwiseAbs().maxCoeff(), 1e-300);
        if (!(spread > 1e-12 * scale)) {
            r.p_values.push_back(std::numeric_limits<double>::quiet_NaN());
            continue;
        }
        const double p = dagostino_pearson(col);
        r.p_values.push_back(p);
        min_p = std::min(min_p, p);
        ++tested;
    }
    if (tested == 0) {
        r.degenerate = true;
        return r;
    }
    r.omnibus_p = std::min(1.0, static_cast<double>(tested) * min_p);
    r.reject_at_99 = r.omnibus_p < alpha;
    return r;
}

std::vector<SweepPoint> gaussianity_sweep(const PwaNetwork& net, const PrototypeDataset& ds,
                                          const std::vector<double>& noise_grid, Eigen::Index n_per_point,
                                          std::uint64_t seed)
{
    if (noise_grid.empty()) throw InvalidArgument("noise grid must not be empty");
    if (ds.dim() != net.input_dim()) throw DimensionMismatch("dataset dim does not match network input");
    std::vector<SweepPoint> out;
    for (std::size_t g = 0; g < noise_grid.size(); ++g) {
        SweepPoint pt;
        pt.noise_scale = noise_grid[g];
        const PrototypeDataset scaled = ds.with_noise_scale(noise_grid[g]);
        Eigen::Index rejected = 0;
        for (Eigen::Index p = 0; p < ds.size(); ++p) {
            const Gaussian gp = scaled.view_gaussian(p);
            const Eigen::MatrixXd xs = sample(gp, n_per_point, mix_seed(seed, static_cast<std::uint64_t>(p)));
            NormalityReport r = test_output_gaussianity(net.forward_batch(xs));
            r.noise_scale = noise_grid[g];
            r.prototype = p;
            if (!r.degenerate) {
                ++pt.n_tested;
                if (r.reject_at_99) ++rejected;
            }
            pt.reports.push_back(std::move(r));
        }
        pt.degenerate = pt.n_tested == 0;
        pt.rejection_fraction = pt.degenerate ? 0.0 : static_cast<double>(rejected) / static_cast<double>(pt.n_tested);
        out.push_back(std::move(pt));
    }
    return out;
}

namespace {

std::vector<double> average_ranks(const std::vector<double>& v)
{
    std::vector<std::size_t> idx(v.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<double> ranks(v.size());
    for (std::size_t i = 0; i < idx.size();) {
        std::size_t j = i;
        while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
        const double r = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t k = i; k <= j; ++k) ranks[idx[k]] = r;
        i = j + 1;
    }
    return ranks;
}

} // namespace

double spearman_rho(const std::vector<double>& a, const std::vector<double>& b)
{
    if (a.size() != b.size()) throw DimensionMismatch("spearman_rho needs two equal-length series");
    if (a.size() < 2) throw InsufficientSamples("spearman_rho needs n >= 2");
    const auto ra = average_ranks(a);
    const auto rb = average_ranks(b);
    const Eigen::Map<const Eigen::VectorXd> x(ra.data(), static_cast<Eigen::Index>(ra.size()));
    const Eigen::Map<const Eigen::VectorXd> y(rb.data(), static_cast<Eigen::Index>(rb.size()));
    const Eigen::VectorXd xc = x.array() - x.mean();
    const Eigen::VectorXd yc = y.array() - y.mean();
    const double den = xc.norm() * yc.norm();
    return den > 0.0 ? xc.dot(yc) / den : 0.0;
}

DistanceHistogram pairwise_distance_histogram(const Eigen::MatrixXd& points, int n_bins)
{
    if (points.rows() < 2) throw InsufficientSamples("pairwise_distance_histogram needs n >= 2");
    if (n_bins < 1) throw InvalidArgument("n_bins must be >= 1");
    std::vector<double> dist;
    dist.reserve(static_cast<std::size_t>(points.rows() * (points.rows() - 1) / 2));
    for (Eigen::Index i = 0; i < points.rows(); ++i)
        for (Eigen::Index j = i + 1; j < points.rows(); ++j) dist.push_back((points.row(i) - points.row(j)).norm());
    DistanceHistogram h;
    h.total = static_cast<long>(dist.size());
    h.min = *std::min_element(dist.begin(), dist.end());
    h.max = *std::max_element(dist.begin(), dist.end());
    const double width = h.max > 0.0 ? h.max / n_bins : 1.0;
    for (int b = 0; b <= n_bins; ++b) h.edges.push_back(b == n_bins && h.max > 0.0 ? h.max : b * width);
    h.counts.assign(static_cast<std::size_t>(n_bins), 0);
    for (double d : dist) {
        auto b = static_cast<long>(std::floor(d / width));
        b = std::clamp<long>(b, 0, n_bins - 1);
        ++h.counts[static_cast<std::size_t>(b)];
    }
    std::vector<double> sorted = dist;
    const std::size_t mid = sorted.size() / 2;
    std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(mid), sorted.end());
    if (sorted.size() % 2 == 1) {
        h.median = sorted[mid];
    } else {
        const double upper = sorted[mid];
        const double lower = *std::max_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(mid));
        h.median = 0.5 * (lower + upper);
    }
    return h;
}

GmmLabState GmmLabState::init(const Eigen::MatrixXd& inputs, Eigen::Index k, GmmCovMode mode, double sigma,
                              double lr_params, double lr_inputs, std::uint64_t seed)
{
    if (k < 1 || k > inputs.rows()) throw InvalidArgument("need 1 <= K <= number of inputs");
    GmmLabState s;
    s.inputs = inputs;
    s.mode = mode;
    s.sigma = sigma;
    s.lr_params = lr_params;
    s.lr_inputs = lr_inputs;
    s.n_components = k;
    std::vector<Eigen::Index> idx(static_cast<std::size_t>(inputs.rows()));
    std::iota(idx.begin(), idx.end(), 0);
    Engine rng = make_engine(seed);
    std::shuffle(idx.begin(), idx.end(), rng);
    s.centroids.resize(k, inputs.cols());
    for (Eigen::Index c = 0; c < k; ++c) s.centroids.row(c) = inputs.row(idx[static_cast<std::size_t>(c)]);
    if (mode == GmmCovMode::Full)
        s.factors.assign(static_cast<std::size_t>(k), s.init_scale * Eigen::MatrixXd::Identity(inputs.cols(), inputs.cols()));
    s.validate();
    return s;
}

void GmmLabState::validate() const
{
    if (mode == GmmCovMode::FixedSmall && !(sigma > 0.0)) throw InvalidArgument("FixedSmall mode needs sigma > 0");
    if (!(entropy_bandwidth > 0.0) || !(init_scale > 0.0)) throw InvalidArgument("entropy_bandwidth and init_scale must be > 0");
    if (!(lr_inputs >= 0.0) || !(lr_params >= 0.0)) throw InvalidArgument("learning rates must be >= 0");
    if (inputs.rows() < 1) throw InvalidArgument("GMM lab needs inputs");
    if (centroids.cols() != inputs.cols()) throw DimensionMismatch("centroid and input dimensions differ");
    if (mode == GmmCovMode::Full && factors.size() != static_cast<std::size_t>(centroids.rows()))
        throw DimensionMismatch("one factor per centroid in Full mode");
}

std::vector<Eigen::MatrixXd> GmmLabState::covariances() const
{
    std::vector<Eigen::MatrixXd> out;
    const Eigen::Index d = centroids.cols();
    for (Eigen::Index k = 0; k < centroids.rows(); ++k) {
        if (mode == GmmCovMode::Full) {
            const auto& l = factors[static_cast<std::size_t>(k)];
            out.push_back(l * l.transpose());
        } else {
            out.push_back(sigma * sigma * Eigen::MatrixXd::Identity(d, d));
        }
    }
    return out;
}

namespace {

Eigen::MatrixXd factor_of(const GmmLabState& lab, Eigen::Index k)
{
    if (lab.mode == GmmCovMode::Full) return lab.factors[static_cast<std::size_t>(k)];
    return lab.sigma * Eigen::MatrixXd::Identity(lab.centroids.cols(), lab.centroids.cols());
}

} // namespace

double centroid_entropy(const GmmLabState& lab)
{
    const Eigen::Index k = lab.centroids.rows();
    const Eigen::MatrixXd kernel = lab.entropy_bandwidth * Eigen::MatrixXd::Identity(lab.centroids.cols(), lab.centroids.cols());
    std::vector<Gaussian> comps;
    for (Eigen::Index c = 0; c < k; ++c) comps.emplace_back(lab.centroids.row(c).transpose(), kernel);
    const double log_k = std::log(static_cast<double>(k));
    double acc = 0.0;
    for (Eigen::Index i = 0; i < k; ++i) {
        Eigen::VectorXd t(k);
        for (Eigen::Index j = 0; j < k; ++j)
            t(j) = i == j ? 0.0 : -bhattacharyya_distance(comps[static_cast<std::size_t>(i)], comps[static_cast<std::size_t>(j)]);
        const double top = t.maxCoeff();
        acc += top + std::log((t.array() - top).exp().sum()) - log_k;
    }
    return std::max(0.0, -acc / static_cast<double>(k));
}

GmmGradient gmm_gradient(const GmmLabState& lab)
{
    const Eigen::Index n = lab.inputs.rows();
    const Eigen::Index k = lab.centroids.rows();
    const Eigen::Index d = lab.inputs.cols();
    const double log_k = std::log(static_cast<double>(k));
    const double c0 = 0.5 * static_cast<double>(d) * std::log(2.0 * std::numbers::pi);

    std::vector<Eigen::MatrixXd> l(static_cast<std::size_t>(k));
    std::vector<Eigen::MatrixXd> y(static_cast<std::size_t>(k)); // d×n whitened residuals
    Eigen::MatrixXd logn(n, k);
    for (Eigen::Index c = 0; c < k; ++c) {
        l[static_cast<std::size_t>(c)] = factor_of(lab, c);
        const auto& lc = l[static_cast<std::size_t>(c)];
        Eigen::MatrixXd r = lab.inputs.transpose();
        r.colwise() -= lab.centroids.row(c).transpose();
        lc.triangularView<Eigen::Lower>().solveInPlace(r);
        logn.col(c) = (-0.5 * r.colwise().squaredNorm().transpose()).array() - lc.diagonal().array().log().sum() - c0 - log_k;
        y[static_cast<std::size_t>(c)] = std::move(r);
    }
    Eigen::VectorXd logp(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double top = logn.row(i).maxCoeff();
        logp(i) = top + std::log((logn.row(i).array() - top).exp().sum());
    }
    const Eigen::MatrixXd resp = (logn.colwise() - logp).array().exp();

    GmmGradient g;
    g.value = logp.mean();
    g.centroids = Eigen::MatrixXd::Zero(k, d);
    g.inputs = Eigen::MatrixXd::Zero(n, d);
    const double inv_n = 1.0 / static_cast<double>(n);
    for (Eigen::Index c = 0; c < k; ++c) {
        const auto& lc = l[static_cast<std::size_t>(c)];
        const Eigen::MatrixXd& yc = y[static_cast<std::size_t>(c)];
        // Σ⁻¹(x − μ) = L⁻ᵀ y
        const Eigen::MatrixXd sinv_d = lc.transpose().triangularView<Eigen::Upper>().solve(yc);
        const Eigen::VectorXd r = resp.col(c);
        g.centroids.row(c) = inv_n * (sinv_d * r).transpose();
        g.inputs -= (sinv_d * r.asDiagonal()).transpose(); // per-point: ∂ log p(xᵢ)/∂xᵢ
        if (lab.mode == GmmCovMode::Full) {
            // ∂/∂L of Σᵢ rᵢ(−½‖L⁻¹dᵢ‖² − log|L|) = L⁻ᵀ(Σ rᵢ yᵢyᵢᵀ) − (Σ rᵢ)·diag(1/Lⱼⱼ)
            const Eigen::MatrixXd yy = yc * r.asDiagonal() * yc.transpose();
            Eigen::MatrixXd gl = lc.transpose().triangularView<Eigen::Upper>().solve(yy);
            gl.diagonal() -= r.sum() * lc.diagonal().cwiseInverse();
            gl *= inv_n;
            Eigen::MatrixXd lower = gl.triangularView<Eigen::Lower>();
            lower.diagonal() = lower.diagonal().cwiseProduct(lc.diagonal()); // log-diagonal chain rule
            g.factors.push_back(std::move(lower));
        }
    }
    return g;
}

double mean_log_likelihood(const GmmLabState& lab) { return gmm_gradient(lab).value; }

namespace {

struct AdamSlot {
    Eigen::MatrixXd m, v;
    void step(Eigen::MatrixXd& param_delta, const Eigen::MatrixXd& grad, double lr, long t)
    {
        if (m.size() == 0) {
            m = Eigen::MatrixXd::Zero(grad.rows(), grad.cols());
            v = Eigen::MatrixXd::Zero(grad.rows(), grad.cols());
        }
        m = 0.9 * m + 0.1 * grad;
        v = 0.999 * v + 0.001 * grad.cwiseAbs2();
        const double c1 = 1.0 - std::pow(0.9, static_cast<double>(t));
        const double c2 = 1.0 - std::pow(0.999, static_cast<double>(t));
        param_delta = (lr * (m / c1).array() / ((v / c2).array().sqrt() + 1e-8)).matrix();
    }
};

} // namespace

GmmRun gmm_collapse_run(GmmLabState lab, long steps, std::uint64_t seed, long log_every)
{
    if (steps < 1) throw InvalidArgument("gmm_collapse_run needs steps >= 1");
    if (log_every < 1) throw InvalidArgument("log_every must be >= 1");
    if (lab.centroids.size() == 0)
        lab = GmmLabState::init(lab.inputs, lab.n_components, lab.mode, lab.sigma, lab.lr_params, lab.lr_inputs, seed);
    lab.validate();

    GmmRun run;
    auto record = [&](long step, double ll) { run.trace.push_back({step, centroid_entropy(lab), ll}); };
    std::vector<AdamSlot> slots(lab.factors.size() + 2);
    for (long s = 1; s <= steps; ++s) {
        const GmmGradient g = gmm_gradient(lab);
        if (!std::isfinite(g.value)) {
            run.aborted = true;
            break;
        }
        if (s == 1) record(0, g.value);
        Eigen::MatrixXd delta;
        auto ascend = [&](AdamSlot& slot, Eigen::MatrixXd& param, const Eigen::MatrixXd& grad, double lr) {
            if (lr == 0.0) return;
            if (lab.adam) {
                slot.step(delta, grad, lr, s);
                param += delta;
            } else {
                param += lr * grad;
            }
        };
        ascend(slots[0], lab.centroids, g.centroids, lab.lr_params);
        ascend(slots[1], lab.inputs, g.inputs, lab.lr_inputs);
        for (std::size_t c = 0; c < lab.factors.size(); ++c) {
            if (lab.lr_params == 0.0) break;
            // Update the log-diagonal and the strict lower part, then map back.
            Eigen::MatrixXd& l = lab.factors[c];
            Eigen::MatrixXd p = l;
            p.diagonal() = l.diagonal().array().log();
            ascend(slots[c + 2], p, g.factors[c], lab.lr_params);
            p.diagonal() = p.diagonal().array().exp();
            l = p.triangularView<Eigen::Lower>();
        }
        if (s % log_every == 0 || s == steps) {
            const double ll = mean_log_likelihood(lab);
            if (!std::isfinite(ll)) {
                run.aborted = true;
                break;
            }
            record(s, ll);
        }
    }
    run.final_state = std::move(lab);
    return run;
}

} // namespace infolab
