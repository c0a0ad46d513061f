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


// Acceptance runner: evaluates the ten release criteria and prints one
// PASS/FAIL line per criterion. Criteria that exercise the command-line
// harness shell out to the binary given by --cli.

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "infolab/autodiff.hpp"
#include "infolab/cpa_net.hpp"
#include "infolab/csv.hpp"
#include "infolab/entropy.hpp"
#include "infolab/experiments.hpp"
#include "infolab/genbound.hpp"
#include "infolab/golden.hpp"
#include "infolab/rng.hpp"
#include "infolab/ssl_losses.hpp"
#include "infolab/stats_validation.hpp"

namespace fs = std::filesystem;
using namespace infolab;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

struct Context {
    std::string cli;
    fs::path workdir;
};

// ------------------------------------------------------------------ helpers

MatrixXd randn(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed)
{
    Engine rng = make_engine(seed);
    return standard_normal(rng, rows, cols);
}

MatrixXd central_difference(const std::function<double(const MatrixXd&)>& f, MatrixXd x, double h)
{
    MatrixXd g(x.rows(), x.cols());
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        const double keep = x.data()[i];
        x.data()[i] = keep + h;
        const double up = f(x);
        x.data()[i] = keep - h;
        const double down = f(x);
        x.data()[i] = keep;
        g.data()[i] = (up - down) / (2.0 * h);
    }
    return g;
}

double rel_error(const MatrixXd& a, const MatrixXd& b, double floor = 1e-8)
{
    return (a - b).norm() / std::max({a.norm(), b.norm(), floor});
}

std::string fmt(double v, int digits = 4)
{
    std::ostringstream s;
    s << std::setprecision(digits) << v;
    return s.str();
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::map<std::string, std::string> file_tree(const fs::path& root)
{
    std::map<std::string, std::string> files;
    for (const auto& e : fs::recursive_directory_iterator(root))
        if (e.is_regular_file()) files[fs::relative(e.path(), root).string()] = slurp(e.path());
    return files;
}

// Runs the CLI under <workdir>/<name>; stdout and stderr go to log files.
int run_cli(const Context& ctx, const std::string& name, const std::string& args)
{
    const fs::path root = ctx.workdir / name;
    fs::create_directories(root);
    const std::string cmd = "\"" + ctx.cli + "\" -o \"" + root.string() + "\" --experiment run " + args + " >\"" +
                            (root / "stdout.log").string() + "\" 2>\"" + (root / "stderr.log").string() + "\"";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

fs::path run_dir(const Context& ctx, const std::string& name, int seed = 0)
{
    return ctx.workdir / name / "run" / std::to_string(seed);
}

CsvTable load_table(const fs::path& p)
{
    std::ifstream in(p);
    if (!in) throw std::runtime_error("missing output " + p.string());
    return parse_csv(in);
}

std::string cli_failure(const Context& ctx, const std::string& name, int code)
{
    return name + " exited " + std::to_string(code) + ": " + slurp(ctx.workdir / name / "stderr.log");
}

// ------------------------------------------------------------- criterion 1

GaussianMixture random_mixture(std::uint64_t seed)
{
    Engine rng = make_engine(seed);
    std::uniform_int_distribution<int> dim(1, 8), comps(1, 16);
    std::uniform_real_distribution<double> weight(0.2, 1.0);
    const int d = dim(rng), k = comps(rng);
    std::vector<Gaussian> cs;
    VectorXd w(k);
    for (int i = 0; i < k; ++i) {
        const MatrixXd mean = 2.0 * standard_normal(rng, d, 1);
        const MatrixXd b = standard_normal(rng, d, d);
        cs.push_back(Gaussian::from_covariance(mean.col(0), (b * b.transpose()) / d + 0.05 * MatrixXd::Identity(d, d)));
        w(i) = weight(rng);
    }
    return GaussianMixture(cs, w / w.sum());
}

Outcome entropy_sandwich()
{
    const auto t0 = std::chrono::steady_clock::now();
    int ok = 0;
    std::string first_bad;
    for (std::uint64_t s = 0; s < 200; ++s) {
        const GaussianMixture m = random_mixture(1000 + s);
        const EntropyEstimate mc = mc_entropy(m, 100000, 5000 + s);
        const double se = *mc.std_error;
        const double lo = pairwise_bound(m, PairwiseSide::Lower).value;
        const double hi = pairwise_bound(m, PairwiseSide::Upper).value;
        const double mom = moment_upper_bound(m).value;
        const bool good = lo <= mc.value + 3.0 * se && hi >= mc.value - 3.0 * se && mom >= mc.value - 3.0 * se;
        ok += good;
        if (!good && first_bad.empty())
            first_bad = "; first violation seed " + std::to_string(s) + " (lower " + fmt(lo) + ", mc " + fmt(mc.value) +
                        " ± " + fmt(se) + ", upper " + fmt(hi) + ", moment " + fmt(mom) + ")";
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return {ok == 200 && secs < 120.0,
            std::to_string(ok) + "/200 mixtures sandwiched, " + fmt(secs, 3) + " s (limit 120 s)" + first_bad};
}

// ------------------------------------------------------------- criterion 2

Outcome well_separated()
{
    double worst = 0.0;
    for (std::uint64_t s = 0; s < 20; ++s) {
        Engine rng = make_engine(77 + s);
        std::uniform_int_distribution<int> dim(1, 8), comps(2, 16);
        std::uniform_real_distribution<double> weight(0.2, 1.0), scale(0.3, 1.0);
        const int d = dim(rng), k = comps(rng);
        std::vector<Gaussian> cs;
        VectorXd w(k);
        double reference = 0.0;
        for (int i = 0; i < k; ++i) {
            // σ ≤ 1 and centres 60 apart along the first axis.
            VectorXd mean = VectorXd::Zero(d);
            mean(0) = 60.0 * i;
            const MatrixXd b = standard_normal(rng, d, d);
            MatrixXd cov = b * b.transpose() + MatrixXd::Identity(d, d);
            cov *= scale(rng) / cov.diagonal().maxCoeff();
            cs.push_back(Gaussian::from_covariance(mean, cov));
            w(i) = weight(rng);
        }
        w /= w.sum();
        for (int i = 0; i < k; ++i) reference += w(i) * gaussian_entropy(cs[static_cast<std::size_t>(i)]).value - w(i) * std::log(w(i));
        const GaussianMixture m(cs, w);
        worst = std::max({worst, std::abs(pairwise_bound(m, PairwiseSide::Lower).value - reference),
                          std::abs(pairwise_bound(m, PairwiseSide::Upper).value - reference)});
    }
    return {worst <= 1e-3, "max |bound − (Σ w H + H(w))| = " + fmt(worst, 3) + " nat over 20 mixtures (limit 1e-3)"};
}

// ------------------------------------------------------------- criterion 3

std::vector<Eigen::VectorXd> hidden_preactivations(const PwaNetwork& net, const VectorXd& x)
{
    std::vector<VectorXd> out;
    VectorXd h = x;
    const auto& layers = net.layers();
    for (std::size_t l = 0; l + 1 < layers.size(); ++l) {
        const VectorXd pre = layers[l].weight * h + layers[l].bias;
        out.push_back(pre);
        h = pre.unaryExpr([&](double v) { return net.activation().apply(v); });
    }
    return out;
}

Outcome pushforward()
{
    long entries = 0, failed_entries = 0;
    int nets_ok = 0;
    double worst_jac = 0.0, min_purity = 1.0;
    std::vector<std::string> bad_nets;
    for (std::uint64_t s = 0; s < 50; ++s) {
        Engine rng = make_engine(9000 + s);
        std::uniform_int_distribution<int> in_dim(1, 8), out_dim(1, 16), width(4, 32), depth(1, 3);
        std::vector<int> dims{in_dim(rng)};
        const int n_hidden = depth(rng);
        for (int l = 0; l < n_hidden; ++l) dims.push_back(width(rng));
        dims.push_back(out_dim(rng));
        const PwaNetwork net = PwaNetwork::random(dims, Activation::leaky(0.1), 9100 + s);
        const VectorXd mu = standard_normal(rng, dims.front(), 1).col(0);

        // Shrink σ until the evaluation draws are at least 99% pure.
        const Eigen::Index n = 10000;
        const std::uint64_t eval_seed = 9200 + s;
        double sigma = 0.1;
        Pushforward pf = pushforward_gaussian(net, Gaussian::isotropic(mu, sigma), n, eval_seed);
        while (pf.purity < 0.99) {
            sigma *= 0.5;
            pf = pushforward_gaussian(net, Gaussian::isotropic(mu, sigma), n, eval_seed);
        }
        min_purity = std::min(min_purity, pf.purity);
        const MatrixXd y = net.forward_batch(sample(Gaussian::isotropic(mu, sigma), n, eval_seed));
        const VectorXd mean = y.colwise().mean().transpose();
        const MatrixXd centred = y.rowwise() - mean.transpose();
        const MatrixXd cov = centred.transpose() * centred / static_cast<double>(n - 1);
        const VectorXd pred_mean = pf.image.mean();
        const MatrixXd pred_cov = pf.image.covariance();
        long bad = 0, total = 0;
        const double rn = std::sqrt(static_cast<double>(n));
        for (Eigen::Index a = 0; a < y.cols(); ++a) {
            const double se = std::sqrt(cov(a, a)) / rn;
            ++total;
            bad += std::abs(mean(a) - pred_mean(a)) > 3.0 * se + 1e-12;
            for (Eigen::Index b = a; b < y.cols(); ++b) {
                const VectorXd prod = centred.col(a).cwiseProduct(centred.col(b));
                const double sd = std::sqrt((prod.array() - prod.mean()).square().sum() / static_cast<double>(n - 1));
                ++total;
                bad += std::abs(cov(a, b) - pred_cov(a, b)) > 3.0 * sd / rn + 1e-12;
            }
        }
        entries += total;
        failed_entries += bad;

        // Jacobian of the region map against central differences at μ.
        double margin = std::numeric_limits<double>::infinity();
        for (const auto& pre : hidden_preactivations(net, mu)) margin = std::min(margin, pre.cwiseAbs().minCoeff());
        const RegionAffine r = affine_extract(net, mu);
        double h = 1e-6;
        double gain = 1.0;
        for (const auto& ly : net.layers()) gain *= std::max(1.0, ly.weight.norm());
        h = std::min(h, 0.1 * margin / gain);
        MatrixXd fd(r.a_matrix.rows(), r.a_matrix.cols());
        for (Eigen::Index j = 0; j < mu.size(); ++j) {
            VectorXd up = mu, down = mu;
            up(j) += h;
            down(j) -= h;
            fd.col(j) = (net.forward(up) - net.forward(down)) / (2.0 * h);
        }
        const double jac = rel_error(r.a_matrix, fd);
        worst_jac = std::max(worst_jac, jac);

        if (bad == 0 && jac <= 1e-5) {
            ++nets_ok;
        } else {
            bad_nets.push_back("net " + std::to_string(s) + " (D=" + std::to_string(dims.front()) +
                               ", K=" + std::to_string(dims.back()) + ", purity " + fmt(pf.purity, 4) + ", " +
                               std::to_string(bad) + "/" + std::to_string(total) + " entries)");
        }
    }
    std::string detail = std::to_string(nets_ok) + "/50 nets match every entry within 3 SE; " +
                         std::to_string(failed_entries) + "/" + std::to_string(entries) +
                         " entries outside 3 SE (a two-sided 3 SE test flags ~0.27% of entries by chance); min purity " +
                         fmt(min_purity, 4) + "; max Jacobian rel. error " + fmt(worst_jac, 3) + " (limit 1e-5)";
    if (!bad_nets.empty()) {
        detail += "; failing:";
        for (const auto& b : bad_nets) detail += " " + b + ";";
    }
    return {nets_ok == 50, detail};
}

// ------------------------------------------------------------- criterion 4

using Loss = std::function<ad::Var(ad::Var, ad::Var)>;

double eval_loss(const Loss& f, const MatrixXd& z, const MatrixXd& zp)
{
    ad::Tape t;
    return f(t.variable(z), t.variable(zp)).scalar();
}

Outcome gradients()
{
    std::vector<std::pair<std::string, std::function<Loss(const SslObjectiveConfig&)>>> losses{
        {"variance", [](const SslObjectiveConfig& c) { return Loss([c](ad::Var a, ad::Var) { return ad::vicreg_variance(a, c); }); }},
        {"covariance", [](const SslObjectiveConfig&) { return Loss([](ad::Var a, ad::Var) { return ad::vicreg_covariance(a); }); }},
        {"invariance", [](const SslObjectiveConfig&) { return Loss([](ad::Var a, ad::Var b) { return ad::vicreg_invariance(a, b); }); }},
        {"vicreg", [](const SslObjectiveConfig& c) { return Loss([c](ad::Var a, ad::Var b) { return ad::vicreg_total(a, b, c); }); }},
        {"infonce", [](const SslObjectiveConfig& c) { return Loss([c](ad::Var a, ad::Var b) { return ad::simclr_infonce(a, b, c); }); }},
        {"logdet_entropy", [](const SslObjectiveConfig&) { return Loss([](ad::Var a, ad::Var) { return ad::logdet_batch_entropy(a, 0.8); }); }},
        {"pairwise_kernel_entropy", [](const SslObjectiveConfig&) { return Loss([](ad::Var a, ad::Var) { return ad::pairwise_kernel_entropy(a, 0.9); }); }},
        {"moment_entropy", [](const SslObjectiveConfig&) { return Loss([](ad::Var a, ad::Var) { return ad::moment_entropy(a, 1e-3); }); }},
    };
    for (auto [tag, name] : {std::pair{"vicreg+pairwise", ObjectiveName::VICRegPairwise},
                             std::pair{"vicreg+logdet", ObjectiveName::VICRegLogDet},
                             std::pair{"invariance_only", ObjectiveName::InvarianceOnly}})
        losses.emplace_back(tag, [name](const SslObjectiveConfig& c) {
            SslObjectiveConfig cc = c;
            cc.name = name;
            return Loss([cc](ad::Var a, ad::Var b) { return ad::ssl_loss(a, b, cc).total; });
        });

    const double h = 1e-5;
    double worst = 0.0;
    std::string worst_name;
    long checked = 0;
    auto note = [&](const std::string& name, double err) {
        ++checked;
        if (err > worst) {
            worst = err;
            worst_name = name;
        }
    };
    for (const auto& [name, make] : losses) {
        for (std::uint64_t s = 0; s < 20; ++s) {
            SslObjectiveConfig cfg;
            cfg.cov_mode = s % 2 ? CovMode::Concatenated : CovMode::PerView;
            const MatrixXd z = 0.7 * randn(10, 4, 1000 + s), zp = 0.7 * randn(10, 4, 2000 + s);
            const Loss f = make(cfg);
            ad::Tape t;
            const ad::Var a = t.variable(z), b = t.variable(zp);
            const auto g = ad::grad(t, f(a, b), {a, b});
            note(name, rel_error(g[0], central_difference([&](const MatrixXd& m) { return eval_loss(f, m, zp); }, z, h)));
            note(name, rel_error(g[1], central_difference([&](const MatrixXd& m) { return eval_loss(f, z, m); }, zp, h)));
        }
    }

    // Information objective through both views and a covariance factor.
    for (std::uint64_t s = 0; s < 20; ++s) {
        SslObjectiveConfig cfg;
        const Eigen::Index n = 5, k = 3;
        const MatrixXd z = randn(n, k, 3000 + s), zp = randn(n, k, 4000 + s), b0 = randn(k, k, 5000 + s);
        auto f = [&](const MatrixXd& zz, const MatrixXd& zzp, const MatrixXd& b) {
            ad::Tape t;
            const ad::Var vz = t.variable(zz), vzp = t.variable(zzp), vb = t.variable(b);
            const ad::Var sig = ad::add_const(ad::matmul(vb, ad::transpose(vb)), MatrixXd::Identity(k, k));
            std::vector<ad::Var> sx(static_cast<std::size_t>(n), sig);
            const ad::Var loss = ad::info_objective(vz, vzp, sx, sx, ad::plugin_entropy(vz, EntropyPlugin::LogDet, cfg), cfg);
            return std::make_pair(loss.scalar(), ad::grad(t, loss, {vz, vzp, vb}));
        };
        const auto g = f(z, zp, b0).second;
        note("info_objective", rel_error(g[0], central_difference([&](const MatrixXd& m) { return f(m, zp, b0).first; }, z, h)));
        note("info_objective", rel_error(g[1], central_difference([&](const MatrixXd& m) { return f(z, m, b0).first; }, zp, h)));
        note("info_objective", rel_error(g[2], central_difference([&](const MatrixXd& m) { return f(z, zp, m).first; }, b0, h)));
    }

    // Pairwise mixture bounds with respect to the component means.
    for (auto side : {PairwiseSide::Lower, PairwiseSide::Upper}) {
        for (std::uint64_t s = 0; s < 20; ++s) {
            std::vector<Gaussian> comps;
            for (int i = 0; i < 4; ++i) {
                const MatrixXd b = randn(3, 3, 7000 + 10 * s + static_cast<std::uint64_t>(i));
                comps.push_back(Gaussian::from_covariance(0.5 * randn(3, 1, 6000 + 10 * s + static_cast<std::uint64_t>(i)).col(0),
                                                          0.5 * MatrixXd::Identity(3, 3) + 0.1 * b * b.transpose()));
            }
            const GaussianMixture m(comps);
            const auto grads = pairwise_bound_mean_gradient(m, side);
            for (std::size_t i = 0; i < m.size(); ++i) {
                auto f = [&](const MatrixXd& mu) {
                    std::vector<Gaussian> cs = m.components();
                    cs[i] = Gaussian(mu.col(0), cs[i].cov_factor());
                    return pairwise_bound(GaussianMixture(cs, m.weights()), side).value;
                };
                note(side == PairwiseSide::Lower ? "pairwise_lower" : "pairwise_upper",
                     rel_error(grads[i], central_difference(f, m.components()[i].mean(), h)));
            }
        }
    }
    return {worst <= 1e-4, std::to_string(checked) + " gradient checks over 20 instances per estimator; max rel. error " +
                               fmt(worst, 3) + " (" + worst_name + ", limit 1e-4)"};
}

// ------------------------------------------------------------- criterion 5

Eigen::VectorXd final_std(const CsvTable& trace)
{
    std::vector<double> v;
    for (std::size_t c = 0; c < trace.header.size(); ++c)
        if (trace.header[c].rfind("std_", 0) == 0) v.push_back(std::stod(trace.rows.back()[c]));
    return Eigen::Map<VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

Outcome collapse(const Context& ctx)
{
    std::string detail;
    bool pass = true;
    const int inv = run_cli(ctx, "c5_invariance_only", "--seed 0 train --set objective.name=invariance_only");
    const int vic = run_cli(ctx, "c5_vicreg", "--seed 0 train");
    if (inv != 0) return {false, cli_failure(ctx, "c5_invariance_only", inv)};
    if (vic != 0) return {false, cli_failure(ctx, "c5_vicreg", vic)};
    const VectorXd s_inv = final_std(load_table(run_dir(ctx, "c5_invariance_only") / "trace.csv"));
    const VectorXd s_vic = final_std(load_table(run_dir(ctx, "c5_vicreg") / "trace.csv"));
    pass = pass && s_inv.maxCoeff() < golden::collapsed_std_max && s_vic.minCoeff() >= golden::spread_std_min;
    detail = "two moons: invariance-only max std " + fmt(s_inv.maxCoeff(), 3) + " (< 0.01), VICReg min std " +
             fmt(s_vic.minCoeff(), 3) + " (>= 0.1)";

    GmmConfig base;
    auto gmm = [&](double lr_params, double lr_inputs, const char* mode, std::uint64_t seed) {
        GmmConfig g = base;
        g.lr_params = lr_params;
        g.lr_inputs = lr_inputs;
        g.mode = mode;
        return gmm_collapse_run(make_gmm_lab(g, seed), g.steps, seed, g.log_every);
    };
    int fixed = 0, coll = 0, small = 0, ratio = 0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const GmmRun f = gmm(golden::gmm_lr, 0.0, "full", seed);
        fixed += !f.aborted && f.trace.back().centroid_entropy >= golden::gmm_fixed_inputs_floor;
        const GmmRun c = gmm(golden::gmm_lr, golden::gmm_lr, "full", seed);
        const double h0 = c.trace.front().centroid_entropy;
        const double drop = h0 - c.trace.back().centroid_entropy;
        coll += !c.aborted && drop >= golden::gmm_collapse_min_relative_drop * h0;
        const GmmRun sm = gmm(golden::gmm_lr, golden::gmm_lr, "fixed_small", seed);
        small += !sm.aborted &&
                 sm.trace.back().centroid_entropy >= golden::gmm_fixed_small_min_retained * sm.trace.front().centroid_entropy;
        const GmmRun fast = gmm(golden::gmm_fast_param_lr, golden::gmm_lr, "full", seed);
        ratio += !fast.aborted && fast.trace.front().centroid_entropy - fast.trace.back().centroid_entropy < drop;
    }
    pass = pass && fixed >= 15 && coll >= 15 && small >= 15 && ratio >= 15;
    detail += "; GMM lab over 20 seeds: fixed inputs " + std::to_string(fixed) + ", collapse " + std::to_string(coll) +
              ", fixed-small " + std::to_string(small) + ", lr ratio " + std::to_string(ratio) + " (each >= 15)";
    return {pass, detail};
}

// ------------------------------------------------------------- criterion 6

Outcome bound_validity()
{
    const ExperimentConfig cfg;
    int held = 0;
    double worst_ratio = 0.0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const PrototypeDataset ds = build_dataset(cfg.data, seed);
        const MethodRun run = run_method(cfg, "vicreg", seed);
        if (run.failed) return {false, "training aborted on seed " + std::to_string(seed) + ": " + run.failure};
        const BoundReport r = evaluate_bound(make_bound_inputs(cfg, ds, *run.net, seed));
        held += *r.measured_test_loss <= r.total_bound;
        worst_ratio = std::max(worst_ratio, *r.measured_test_loss / r.total_bound);
    }

    double proj = 0.0, ident = 0.0;
    for (std::uint64_t s = 0; s < 50; ++s) {
        const Eigen::Index d = 2 + static_cast<Eigen::Index>(s % 6), n = 40;
        MatrixXd z = randn(d, n, 100 + s);
        if (s % 2) z = randn(d, 2, 200 + s) * randn(2, n, 300 + s); // rank deficient
        const MatrixXd p = projector(z);
        proj = std::max({proj, (p * p - p).norm(), (p - p.transpose()).norm(), (p * z.transpose()).norm()});
        std::vector<int> labels(static_cast<std::size_t>(n));
        for (std::size_t i = 0; i < labels.size(); ++i) labels[i] = static_cast<int>((i * 7 + s) % 3);
        const MatrixXd y = one_hot(labels, 3);
        const MatrixXd w = min_norm_probe(z, y);
        const double rms = (w * z - y.transpose()).norm() / std::sqrt(static_cast<double>(n));
        ident = std::max(ident, std::abs(rms - projection_residual(z, y) / std::sqrt(static_cast<double>(n))));
    }
    return {held >= 18 && proj <= 1e-8 && ident <= 1e-8,
            "test loss <= bound in " + std::to_string(held) + "/20 seeds (need 18; max loss/bound " + fmt(worst_ratio, 3) +
                "); projector identities max error " + fmt(proj, 3) + "; training-loss identity max error " +
                fmt(ident, 3) + " (limits 1e-8)"};
}

// ------------------------------------------------------------- criterion 7

Outcome comparison_form(const Context& ctx)
{
    const int code = run_cli(ctx, "c7_compare", "compare --seeds 5");
    if (code != 0) return {false, cli_failure(ctx, "c7_compare", code)};
    const CsvTable t = load_table(run_dir(ctx, "c7_compare") / "comparison.csv");
    double pairwise = NAN, inv = NAN;
    long seeds = 0;
    for (const auto& r : t.rows) {
        if (r[0] == "vicreg+pairwise") {
            pairwise = std::stod(r[1]);
            seeds = std::stol(r[3]);
        }
        if (r[0] == "invariance_only") inv = std::stod(r[1]);
    }
    std::cout << slurp(ctx.workdir / "c7_compare" / "stdout.log");
    return {pairwise >= inv && seeds >= 5, "table with " + std::to_string(t.rows.size()) + " methods; vicreg+pairwise " +
                                               fmt(100 * pairwise) + "% vs invariance_only " + fmt(100 * inv) + "% over " +
                                               std::to_string(seeds) + " seeds"};
}

// ------------------------------------------------------------- criterion 8

Outcome gaussianity_trends(const Context& ctx)
{
    const int code = run_cli(ctx, "c8_gaussianity", "--seed 0 validate-gaussianity --check");
    if (code != 0) return {false, cli_failure(ctx, "c8_gaussianity", code)};
    const auto report = nlohmann::json::parse(slurp(run_dir(ctx, "c8_gaussianity") / "report.json"));
    const double rho = report.at("spearman_rho").get<double>();
    long grid = 0;
    for (const auto& r : load_table(run_dir(ctx, "c8_gaussianity") / "sweep.csv").rows) grid += r.back() == "tested";

    // Affine networks: outputs stay exactly Gaussian.
    const ExperimentConfig cfg;
    const PrototypeDataset ds = build_dataset(cfg.data, 0);
    bool linear_ok = true;
    double worst_excess = -1.0;
    for (std::uint64_t s = 0; s < 3; ++s) {
        const PwaNetwork lin = PwaNetwork::random({2, 32, 32, 4}, Activation::leaky(1.0), 400 + s);
        for (const SweepPoint& p : gaussianity_sweep(lin, ds, cfg.gaussianity.noise_grid, cfg.gaussianity.n_per_point, s)) {
            if (p.degenerate) continue;
            const double limit = 0.01 + 3.0 * std::sqrt(0.01 * 0.99 / static_cast<double>(p.n_tested));
            worst_excess = std::max(worst_excess, p.rejection_fraction - limit);
            linear_ok = linear_ok && p.rejection_fraction <= limit;
        }
    }

    // Histogram against a brute-force recount.
    const MatrixXd x = two_moons(1000, 0.05, 7).x;
    const int bins = 50;
    const DistanceHistogram h = pairwise_distance_histogram(x, bins);
    std::vector<long> brute(bins, 0);
    for (Eigen::Index i = 0; i < x.rows(); ++i)
        for (Eigen::Index j = i + 1; j < x.rows(); ++j) {
            const double d = (x.row(i) - x.row(j)).norm();
            int b = 0;
            while (b < bins - 1 && d >= h.edges[static_cast<std::size_t>(b + 1)]) ++b;
            ++brute[static_cast<std::size_t>(b)];
        }
    const bool hist_ok = h.counts == brute && h.total == 1000L * 999L / 2L;
    return {rho > 0.0 && grid >= 5 && linear_ok && hist_ok,
            "deep ReLU Spearman rho " + fmt(rho, 3) + " over " + std::to_string(grid) +
                " grid points; affine nets within nominal + 3 SE: " + (linear_ok ? "yes" : "no") + " (max excess " +
                fmt(worst_excess, 3) + "); histogram matches brute force: " + (hist_ok ? "yes" : "no")};
}

// ------------------------------------------------------------- criterion 9

Outcome entropy_trend(const Context& ctx)
{
    const std::string args = "--seed 0 track-entropy --methods vicreg --set data.input_scale=" +
                             fmt(golden::track_entropy_input_scale, 6);
    const int code = run_cli(ctx, "c9_track", args);
    if (code != 0) return {false, cli_failure(ctx, "c9_track", code)};
    const CsvTable t = load_table(run_dir(ctx, "c9_track") / "trace_vicreg.csv");
    const std::size_t col = t.column("logdet_entropy");
    const double first = std::stod(t.rows.front()[col]), last = std::stod(t.rows.back()[col]);
    return {last < first, "VICReg LogDet entropy " + fmt(first) + " -> " + fmt(last) + " over " + t.rows.back()[0] +
                              " steps (input scale " + fmt(golden::track_entropy_input_scale) + ")"};
}

// ------------------------------------------------------------ criterion 10

Outcome determinism(const Context& ctx)
{
    const std::string quick = "--set train.epochs=3 --set eval.n_probe_test=300 ";
    const std::vector<std::pair<std::string, std::string>> commands{
        {"entropy", "--seed 4 entropy --mc-samples 5000 --set data.n_points=32"},
        {"train", quick + "train"},
        {"bound", quick + "--set bound.n_sign_draws=100 bound"},
        {"validate-gaussianity", "--set gaussianity.n_per_point=128 --set data.n_points=16 validate-gaussianity"},
        {"pairwise-dist", "pairwise-dist"},
        {"gmm-collapse", "--set gmm.steps=100 gmm-collapse"},
        {"compare", quick + "compare --seeds 3"},
        {"track-entropy", "track-entropy --steps 20"},
    };
    std::vector<std::string> differing;
    for (const auto& [name, args] : commands) {
        const std::string dir = "c10_" + name;
        int code = run_cli(ctx, dir, args);
        if (code != 0) return {false, cli_failure(ctx, dir, code)};
        auto first = file_tree(ctx.workdir / dir / "run");
        code = run_cli(ctx, dir, args);
        if (code != 0) return {false, cli_failure(ctx, dir, code)};
        if (file_tree(ctx.workdir / dir / "run") != first || first.empty()) differing.push_back(name);
    }
    std::string detail = std::to_string(commands.size() - differing.size()) + "/" + std::to_string(commands.size()) +
                         " subcommands byte-identical on rerun";
    for (const auto& d : differing) detail += "; differs: " + d;
    return {differing.empty(), detail};
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Evaluates the infolab acceptance criteria"};
    Context ctx;
    std::vector<int> only;
    app.add_option("--cli", ctx.cli, "Path to the infolab command-line binary")->required();
    std::string workdir = "acceptance_runs";
    app.add_option("--workdir", workdir, "Scratch directory for CLI outputs");
    app.add_option("--only", only, "Evaluate only these criteria");
    CLI11_PARSE(app, argc, argv);
    ctx.workdir = fs::absolute(workdir);
    fs::remove_all(ctx.workdir);
    fs::create_directories(ctx.workdir);

    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"entropy sandwich", entropy_sandwich},
        {"well-separated limit", well_separated},
        {"pushforward moments", pushforward},
        {"gradient correctness", gradients},
        {"collapse dichotomy", [&] { return collapse(ctx); }},
        {"bound validity", bound_validity},
        {"comparison table form", [&] { return comparison_form(ctx); }},
        {"gaussianity trends", [&] { return gaussianity_trends(ctx); }},
        {"entropy trend", [&] { return entropy_trend(ctx); }},
        {"determinism", [&] { return determinism(ctx); }},
    };
    int failures = 0, evaluated = 0;
    std::ofstream summary(ctx.workdir / "summary.txt");
    auto emit = [&](const std::string& line) {
        std::cout << line << std::endl;
        summary << line << '\n' << std::flush;
    };
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const int id = static_cast<int>(i) + 1;
        if (!only.empty() && std::find(only.begin(), only.end(), id) == only.end()) continue;
        Outcome o;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("error: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        ++evaluated;
        failures += !o.pass;
        emit("criterion " + std::to_string(id) + " [" + criteria[i].first + "]: " + (o.pass ? "PASS" : "FAIL") +
             " -- " + o.detail + " (" + fmt(secs, 3) + " s)");
    }
    emit("acceptance: " + std::to_string(evaluated - failures) + "/" + std::to_string(evaluated) + " criteria passed");
    return failures == 0 ? 0 : 4;
}
