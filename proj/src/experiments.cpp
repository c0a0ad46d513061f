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

#include "infolab/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <iomanip>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

#include "infolab/error.hpp"
#include "infolab/rng.hpp"

namespace infolab {

LabeledPoints build_points(const DataConfig& d, std::uint64_t seed)
{
    LabeledPoints pts;
    switch (d.kind) {
    case DataKind::TwoMoons: pts = two_moons(d.n_points, d.moons_noise, seed); break;
    case DataKind::Csv: pts = read_labeled_csv(d.csv_path); break;
    case DataKind::Prototypes: {
        RandomPrototypeSpec spec = d.prototypes;
        spec.seed = seed;
        spec.noise_scale = d.view_noise;
        const PrototypeDataset ds = random_prototypes(spec);
        pts.x = ds.prototypes();
        pts.labels = ds.labels();
        break;
    }
    }
    pts.x *= d.input_scale;
    return pts;
}

PrototypeDataset build_dataset(const DataConfig& d, std::uint64_t seed)
{
    if (d.kind != DataKind::Prototypes) return isotropic_dataset(build_points(d, seed), d.view_noise * d.input_scale);
    RandomPrototypeSpec spec = d.prototypes;
    spec.seed = seed;
    spec.noise_scale = d.view_noise;
    const PrototypeDataset ds = random_prototypes(spec);
    if (d.input_scale == 1.0) return ds;
    std::vector<Eigen::MatrixXd> factors = ds.tangent_factors();
    for (auto& f : factors) f *= d.input_scale;
    return PrototypeDataset(ds.prototypes() * d.input_scale, std::move(factors), ds.labels(), ds.noise_scale(),
                            spec.separation_floor * d.input_scale);
}

PwaNetwork build_network(const NetworkConfig& n, Eigen::Index input_dim, std::uint64_t seed)
{
    std::vector<int> dims{static_cast<int>(input_dim)};
    for (long h : n.hidden) dims.push_back(static_cast<int>(h));
    dims.push_back(static_cast<int>(n.embedding_dim));
    return PwaNetwork::random(dims, Activation::from_tag(n.activation, n.slope), seed);
}

std::filesystem::path run_directory(const ExperimentConfig& cfg, std::uint64_t seed)
{
    return std::filesystem::path(cfg.output_dir) / cfg.experiment / std::to_string(seed);
}

double probe_accuracy(const ExperimentConfig& cfg, const PrototypeDataset& ds, const PwaNetwork& net, std::uint64_t seed)
{
    const LabeledPoints train = sample_labeled(ds, cfg.eval.n_probe_train, mix_seed(seed, 0xe7a1));
    const LabeledPoints test = sample_labeled(ds, cfg.eval.n_probe_test, mix_seed(seed, 0xe7a2));
    return linear_probe(net, train, test, cfg.eval.ridge);
}

MethodRun run_method(const ExperimentConfig& cfg, const std::string& method, std::uint64_t seed)
{
    MethodRun run;
    run.method = method;
    run.seed = seed;
    ExperimentConfig local = cfg;
    local.seed = seed;
    local.objective.name = objective_from_string(method);
    const PrototypeDataset ds = build_dataset(local.data, seed);
    try {
        TrainResult r = train_ssl(build_network(local.network, ds.dim(), seed), ds, local.objective, local.train_config());
        run.accuracy = probe_accuracy(local, ds, r.net, seed);
        run.trace = std::move(r.trace);
        run.net = std::move(r.net);
    } catch (const TrainingAborted& e) {
        run.failed = true;
        run.failure = e.what();
        run.trace = e.trace();
    }
    return run;
}

namespace {

int worker_count(int threads, std::size_t jobs)
{
    return static_cast<int>(std::clamp<std::size_t>(static_cast<std::size_t>(std::max(threads, 1)), 1, std::max<std::size_t>(jobs, 1)));
}

} // namespace

ComparisonTable run_comparison(const ExperimentConfig& cfg, const std::vector<std::string>& methods, long n_seeds,
                               int threads)
{
    if (n_seeds < 3) throw ConfigError("a comparison needs n_seeds >= 3");
    if (methods.empty()) throw ConfigError("a comparison needs at least one method");
    for (const auto& m : methods) {
        const ObjectiveName name = objective_from_string(m);
        if (name == ObjectiveName::InfoObjective) throw ConfigError("info_objective is not a comparison method");
    }

    const std::size_t per = static_cast<std::size_t>(n_seeds);
    std::vector<MethodRun> runs(methods.size() * per);
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto worker = [&] {
        for (std::size_t j = next++; j < runs.size(); j = next++) {
            try {
                runs[j] = run_method(cfg, methods[j / per], cfg.seed + j % per);
                runs[j].net.reset(); // the table keeps accuracies only
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) error = std::current_exception();
            }
        }
    };
    const int n_workers = worker_count(threads, runs.size());
    if (n_workers == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < n_workers; ++w) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    if (error) std::rethrow_exception(error);

    ComparisonTable table;
    for (std::size_t m = 0; m < methods.size(); ++m) {
        ComparisonRow row;
        row.method = methods[m];
        for (std::size_t s = 0; s < per; ++s) {
            const MethodRun& r = runs[m * per + s];
            if (r.failed) {
                if (!row.failed) row.failure = "seed " + std::to_string(r.seed) + ": " + r.failure;
                row.failed = true;
                continue;
            }
            row.accuracies.push_back(r.accuracy);
        }
        row.n_seeds = static_cast<long>(row.accuracies.size());
        if (row.n_seeds > 0) {
            const Eigen::Map<const Eigen::VectorXd> a(row.accuracies.data(), row.n_seeds);
            row.mean_accuracy = a.mean();
            row.std_accuracy = row.n_seeds > 1 ? std::sqrt((a.array() - row.mean_accuracy).square().sum() / (row.n_seeds - 1)) : 0.0;
        } else {
            row.mean_accuracy = std::numeric_limits<double>::quiet_NaN();
            row.std_accuracy = std::numeric_limits<double>::quiet_NaN();
        }
        table.rows.push_back(std::move(row));
    }
    return table;
}

CsvTable ComparisonTable::to_csv() const
{
    CsvTable t;
    t.header = {"method", "mean_accuracy", "std_accuracy", "n_seeds", "status"};
    for (const auto& r : rows)
        t.rows.push_back({r.method, format_double(r.mean_accuracy), format_double(r.std_accuracy), std::to_string(r.n_seeds),
                          r.failed ? "failed" : "ok"});
    return t;
}

std::string ComparisonTable::to_text() const
{
    std::size_t width = 6;
    for (const auto& r : rows) width = std::max(width, r.method.size());
    std::ostringstream out;
    out << std::left << std::setw(static_cast<int>(width)) << "method" << "  accuracy (mean ± std)  seeds\n";
    for (const auto& r : rows) {
        out << std::left << std::setw(static_cast<int>(width)) << r.method << "  ";
        if (r.failed) {
            out << "failed (" << r.failure << ")\n";
            continue;
        }
        std::ostringstream cell;
        cell << std::fixed << std::setprecision(2) << 100.0 * r.mean_accuracy << " ± " << 100.0 * r.std_accuracy;
        out << std::setw(22) << cell.str() << "  " << r.n_seeds << "\n";
    }
    return out.str();
}

nlohmann::json ComparisonTable::to_json() const
{
    nlohmann::json rows_json = nlohmann::json::array();
    for (const auto& r : rows) {
        nlohmann::json j{{"method", r.method}, {"n_seeds", r.n_seeds}, {"accuracies", r.accuracies}, {"failed", r.failed}};
        if (r.n_seeds > 0) {
            j["mean_accuracy"] = r.mean_accuracy;
            j["std_accuracy"] = r.std_accuracy;
        }
        if (r.failed) j["failure"] = r.failure;
        rows_json.push_back(std::move(j));
    }
    return nlohmann::json{{"rows", rows_json}};
}

const ComparisonRow& ComparisonTable::row(const std::string& method) const
{
    for (const auto& r : rows)
        if (r.method == method) return r;
    throw InvalidArgument("no comparison row for '" + method + "'");
}

std::vector<TrackedTrace> run_entropy_tracking(const ExperimentConfig& cfg, const std::vector<std::string>& methods,
                                               long n_steps)
{
    if (n_steps < 0) throw ConfigError("track-entropy needs n_steps >= 0");
    const PrototypeDataset ds = build_dataset(cfg.data, cfg.seed);
    TrainConfig tc = cfg.train_config();
    const long per_epoch = tc.pairs_per_epoch / tc.batch_size;
    tc.max_steps = n_steps;
    tc.epochs = static_cast<int>((n_steps + per_epoch - 1) / per_epoch);
    const PwaNetwork init = build_network(cfg.network, ds.dim(), cfg.seed);
    std::vector<TrackedTrace> out;
    for (const auto& m : methods) {
        SslObjectiveConfig obj = cfg.objective;
        obj.name = objective_from_string(m);
        out.push_back({m, train_ssl(init, ds, obj, tc).trace});
    }
    return out;
}

BoundInputs make_bound_inputs(const ExperimentConfig& cfg, const PrototypeDataset& ds, const PwaNetwork& encoder,
                              std::uint64_t seed)
{
    const ViewPairs pairs = sample_pairs(ds, cfg.bound.n_unlabeled, mix_seed(seed, 0xb0d2));
    BoundInputs in{sample_labeled(ds, cfg.bound.n_labeled, mix_seed(seed, 0xb0d1)),
                   pairs.x,
                   pairs.x_prime,
                   pairs.labels,
                   encoder,
                   make_ensemble(encoder, static_cast<int>(cfg.bound.n_reinit), static_cast<int>(cfg.bound.n_perturbed),
                                 cfg.bound.perturb_scale, seed),
                   cfg.bound.delta,
                   static_cast<int>(cfg.bound.n_sign_draws),
                   seed,
                   std::nullopt,
                   sample_labeled(ds, cfg.bound.n_test, mix_seed(seed, 0xb0d3))};
    if (!cfg.bound.class_marginals.empty())
        in.class_marginals = Eigen::Map<const Eigen::VectorXd>(cfg.bound.class_marginals.data(),
                                                               static_cast<Eigen::Index>(cfg.bound.class_marginals.size()));
    return in;
}

PwaNetwork gaussianity_network(const GaussianityConfig& g, Eigen::Index input_dim, std::uint64_t seed)
{
    std::vector<int> dims{static_cast<int>(input_dim)};
    for (long l = 0; l < g.depth; ++l) dims.push_back(static_cast<int>(g.width));
    dims.push_back(static_cast<int>(g.out_dim));
    return PwaNetwork::random(dims, Activation::relu(), seed);
}

GmmLabState make_gmm_lab(const GmmConfig& g, std::uint64_t seed)
{
    const LabeledPoints pts = two_moons(g.n_points, g.noise, seed);
    const GmmCovMode mode = g.mode == "fixed_small" ? GmmCovMode::FixedSmall : GmmCovMode::Full;
    GmmLabState lab = GmmLabState::init(pts.x, g.n_components, mode, g.sigma, g.lr_params, g.lr_inputs, seed);
    lab.init_scale = g.init_scale;
    lab.entropy_bandwidth = g.entropy_bandwidth;
    for (auto& f : lab.factors) f *= g.init_scale;
    lab.validate();
    return lab;
}

} // namespace infolab
