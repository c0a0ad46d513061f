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

// infolab command-line harness. Every subcommand writes its outputs under
// <output_dir>/<experiment>/<seed>/ and exits 0 on success, 2 on bad
// configuration or input, 3 on numerical failure and 4 when a requested
// --check does not hold. Failures print one JSON object on stderr.

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "infolab/config.hpp"
#include "infolab/cpa_net.hpp"
#include "infolab/csv.hpp"
#include "infolab/entropy.hpp"
#include "infolab/error.hpp"
#include "infolab/experiments.hpp"
#include "infolab/golden.hpp"
#include "infolab/genbound.hpp"
#include "infolab/rng.hpp"
#include "infolab/stats_validation.hpp"
#include "infolab/trainer.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace infolab;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitCheck = 4;

/// Raised when a --check expectation fails.
class CheckFailed : public std::runtime_error {
public:
    CheckFailed(std::string check, const std::string& what) : std::runtime_error(what), check_(std::move(check)) {}
    const std::string& check() const { return check_; }

private:
    std::string check_;
};

struct GlobalOptions {
    std::string config_path;
    std::vector<std::string> sets;
    std::string out;
    std::string experiment;
    long long seed = -1;
};

ExperimentConfig resolve_config(const GlobalOptions& g, const std::string& default_experiment,
                                std::vector<std::string> extra = {})
{
    std::vector<std::string> overrides;
    if (!default_experiment.empty() && g.experiment.empty()) overrides.push_back("experiment=" + default_experiment);
    overrides.insert(overrides.end(), g.sets.begin(), g.sets.end());
    overrides.insert(overrides.end(), extra.begin(), extra.end());
    if (!g.out.empty()) overrides.push_back("output_dir=\"" + g.out + "\"");
    if (!g.experiment.empty()) overrides.push_back("experiment=\"" + g.experiment + "\"");
    if (g.seed >= 0) overrides.push_back("seed=" + std::to_string(g.seed));
    if (g.config_path.empty()) return parse_config("", overrides);
    // A config file that names its own experiment keeps it unless overridden.
    if (!default_experiment.empty() && g.experiment.empty()) {
        ConfigDocument doc;
        {
            std::ifstream in(g.config_path);
            if (!in) throw ConfigError("cannot read config file '" + g.config_path + "'");
            std::stringstream ss;
            ss << in.rdbuf();
            doc = parse_config_document(ss.str());
        }
        if (doc[""].count("experiment")) overrides.erase(overrides.begin());
    }
    return load_config(g.config_path, overrides);
}

fs::path prepare_run_dir(const ExperimentConfig& cfg)
{
    const fs::path dir = run_directory(cfg, cfg.seed);
    fs::create_directories(dir);
    std::ofstream(dir / "config.cfg") << serialize_config(cfg);
    return dir;
}

void write_json(const fs::path& path, const json& doc)
{
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write '" + path.string() + "'");
    out << doc.dump(2) << "\n";
}

void write_table(const fs::path& path, const CsvTable& t) { write_csv(path.string(), t); }

json trace_summary(const TrainTrace& trace)
{
    if (trace.records.empty()) return json::object();
    const auto& a = trace.records.front();
    const auto& b = trace.records.back();
    return json{{"first_step", a.step},
                {"last_step", b.step},
                {"loss_initial", a.loss},
                {"loss_final", b.loss},
                {"min_std_initial", a.embedding_std.minCoeff()},
                {"min_std_final", b.embedding_std.minCoeff()},
                {"logdet_entropy_initial", a.logdet_entropy},
                {"logdet_entropy_final", b.logdet_entropy},
                {"pairwise_entropy_initial", a.pairwise_entropy},
                {"pairwise_entropy_final", b.pairwise_entropy}};
}

std::vector<std::string> split_methods(const std::string& s)
{
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) out.push_back(item);
    return out;
}

std::string file_stem(const std::string& method)
{
    std::string out;
    for (char c : method) out.push_back(std::isalnum(static_cast<unsigned char>(c)) ? c : '_');
    return out;
}

PwaNetwork load_checkpoint(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read checkpoint '" + path + "'");
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw ConfigError("checkpoint '" + path + "' is not valid JSON: " + e.what());
    }
    return network_from_json(doc);
}

// ----------------------------------------------------------------- entropy

struct EntropyOptions {
    std::string mixture;
    long mc_samples = 100000;
};

int cmd_entropy(const GlobalOptions& g, const EntropyOptions& o)
{
    const ExperimentConfig cfg = resolve_config(g, "entropy");
    GaussianMixture m;
    if (!o.mixture.empty()) {
        std::ifstream in(o.mixture);
        if (!in) throw ConfigError("cannot read mixture '" + o.mixture + "'");
        json doc;
        try {
            in >> doc;
        } catch (const json::exception& e) {
            throw ConfigError("mixture '" + o.mixture + "' is not valid JSON: " + e.what());
        }
        m = mixture_from_json(doc);
    } else {
        m = build_dataset(cfg.data, cfg.seed).mixture();
    }
    std::vector<EntropyEstimate> est;
    if (m.size() == 1) est.push_back(gaussian_entropy(m.components().front()));
    est.push_back(mc_entropy(m, o.mc_samples, cfg.seed));
    est.push_back(pairwise_bound(m, PairwiseSide::Lower));
    est.push_back(pairwise_bound(m, PairwiseSide::Upper));
    est.push_back(moment_upper_bound(m));

    CsvTable t;
    t.header = {"estimator", "value_nats", "std_error", "n_samples"};
    json rows = json::array();
    for (const auto& e : est) {
        t.rows.push_back({kind_name(e.kind), format_double(e.value), e.std_error ? format_double(*e.std_error) : "",
                          e.n_samples ? std::to_string(*e.n_samples) : ""});
        json r{{"estimator", kind_name(e.kind)}, {"value_nats", e.value}};
        if (e.std_error) r["std_error"] = *e.std_error;
        if (e.n_samples) r["n_samples"] = *e.n_samples;
        rows.push_back(std::move(r));
    }
    const fs::path dir = prepare_run_dir(cfg);
    write_table(dir / "entropy.csv", t);
    write_json(dir / "report.json", json{{"command", "entropy"},
                                         {"seed", cfg.seed},
                                         {"n_components", m.size()},
                                         {"dim", m.dim()},
                                         {"estimates", rows}});
    std::cout << to_csv_string(t);
    return kExitOk;
}

// ------------------------------------------------------------------- train

int cmd_train(const GlobalOptions& g)
{
    const ExperimentConfig cfg = resolve_config(g, "train");
    const fs::path dir = prepare_run_dir(cfg);
    const PrototypeDataset ds = build_dataset(cfg.data, cfg.seed);
    try {
        TrainResult r = train_ssl(build_network(cfg.network, ds.dim(), cfg.seed), ds, cfg.objective, cfg.train_config());
        const double acc = probe_accuracy(cfg, ds, r.net, cfg.seed);
        write_table(dir / "trace.csv", r.trace.to_csv());
        write_json(dir / "checkpoint.json", to_json(r.net));
        json report{{"command", "train"},
                    {"status", "ok"},
                    {"objective", to_string(cfg.objective.name)},
                    {"seed", cfg.seed},
                    {"probe_accuracy", acc},
                    {"trace", trace_summary(r.trace)}};
        write_json(dir / "report.json", report);
        std::cout << report.dump() << "\n";
    } catch (const TrainingAborted& e) {
        write_table(dir / "trace.csv", e.trace().to_csv());
        write_json(dir / "checkpoint.json", to_json(e.last_good()));
        write_json(dir / "report.json", json{{"command", "train"},
                                             {"status", "aborted"},
                                             {"objective", to_string(cfg.objective.name)},
                                             {"seed", cfg.seed},
                                             {"aborted_at_step", e.step()},
                                             {"message", e.what()}});
        throw;
    }
    return kExitOk;
}

// ------------------------------------------------------------------- bound

struct BoundOptions {
    std::string labeled;
    std::string pairs;
    std::string test;
    std::string checkpoint;
    double delta = -1.0;
    bool check = false;
};

/// Pairs file: first half of the feature columns is x⁺, second half x⁺⁺,
/// last column the (harness-only) label.
void read_pairs(const std::string& path, Eigen::MatrixXd& xp, Eigen::MatrixXd& xpp, std::vector<int>& labels)
{
    const Eigen::MatrixXd all = numeric_matrix(read_csv(path));
    if (all.cols() < 3 || (all.cols() - 1) % 2 != 0)
        throw ConfigError("pairs CSV '" + path + "' needs 2·D feature columns plus a label column");
    const Eigen::Index d = (all.cols() - 1) / 2;
    xp = all.leftCols(d);
    xpp = all.middleCols(d, d);
    labels.clear();
    for (Eigen::Index i = 0; i < all.rows(); ++i) {
        const double l = all(i, all.cols() - 1);
        if (l < 0 || l != std::floor(l)) throw ConfigError("pairs CSV '" + path + "' has a non-integer label");
        labels.push_back(static_cast<int>(l));
    }
}

int cmd_bound(const GlobalOptions& g, const BoundOptions& o)
{
    std::vector<std::string> extra;
    if (o.delta >= 0.0) extra.push_back("bound.delta=" + format_double(o.delta));
    const ExperimentConfig cfg = resolve_config(g, "bound", extra);
    const fs::path dir = prepare_run_dir(cfg);
    const PrototypeDataset ds = build_dataset(cfg.data, cfg.seed);

    PwaNetwork encoder = o.checkpoint.empty()
                             ? train_ssl(build_network(cfg.network, ds.dim(), cfg.seed), ds, cfg.objective, cfg.train_config()).net
                             : load_checkpoint(o.checkpoint);
    BoundInputs in = make_bound_inputs(cfg, ds, encoder, cfg.seed);
    if (!o.labeled.empty()) in.labeled = read_labeled_csv(o.labeled);
    if (!o.pairs.empty()) read_pairs(o.pairs, in.x_plus, in.x_plus_plus, in.unlabeled_labels);
    if (!o.test.empty()) in.test = read_labeled_csv(o.test);
    if (o.checkpoint.empty()) write_json(dir / "checkpoint.json", to_json(encoder));

    const BoundReport rep = evaluate_bound(in);
    json report = rep.to_json();
    report["command"] = "bound";
    report["seed"] = cfg.seed;
    write_json(dir / "report.json", report);

    CsvTable t;
    t.header = {"m", "n", "delta", "total_bound", "measured_test_loss", "train_loss", "q_mn"};
    t.rows.push_back({format_double(rep.m), format_double(rep.n), format_double(rep.delta), format_double(rep.total_bound),
                      rep.measured_test_loss ? format_double(*rep.measured_test_loss) : "", format_double(rep.train_loss),
                      format_double(rep.q)});
    write_table(dir / "bound.csv", t);
    std::cout << to_csv_string(t);
    if (o.check) {
        if (!rep.measured_test_loss) throw CheckFailed("bound", "--check needs a test set");
        if (!(*rep.measured_test_loss <= rep.total_bound))
            throw CheckFailed("bound", "measured test loss " + format_double(*rep.measured_test_loss) +
                                           " exceeds the bound " + format_double(rep.total_bound));
    }
    return kExitOk;
}

// ---------------------------------------------------- validate-gaussianity

struct GaussianityOptions {
    std::string checkpoint;
    bool check = false;
};

int cmd_gaussianity(const GlobalOptions& g, const GaussianityOptions& o)
{
    const ExperimentConfig cfg = resolve_config(g, "gaussianity");
    const fs::path dir = prepare_run_dir(cfg);
    const PrototypeDataset ds = build_dataset(cfg.data, cfg.seed);
    const PwaNetwork net = o.checkpoint.empty() ? gaussianity_network(cfg.gaussianity, ds.dim(), cfg.seed)
                                                : load_checkpoint(o.checkpoint);
    const auto sweep = gaussianity_sweep(net, ds, cfg.gaussianity.noise_grid, cfg.gaussianity.n_per_point, cfg.seed);

    CsvTable detail;
    detail.header = {"noise_scale", "prototype", "p_value", "reject_at_99", "status"};
    CsvTable summary;
    summary.header = {"noise_scale", "rejection_fraction", "n_tested", "status"};
    std::vector<double> sig, frac;
    json points = json::array();
    for (const auto& pt : sweep) {
        for (const auto& r : pt.reports)
            detail.rows.push_back({format_double(r.noise_scale), std::to_string(r.prototype),
                                   r.degenerate ? "" : format_double(r.omnibus_p), r.reject_at_99 ? "1" : "0",
                                   r.degenerate ? "degenerate, skipped" : "tested"});
        summary.rows.push_back({format_double(pt.noise_scale), pt.degenerate ? "" : format_double(pt.rejection_fraction),
                                std::to_string(pt.n_tested), pt.degenerate ? "degenerate, skipped" : "tested"});
        json p{{"noise_scale", pt.noise_scale}, {"n_tested", pt.n_tested}, {"degenerate", pt.degenerate}};
        if (!pt.degenerate) {
            p["rejection_fraction"] = pt.rejection_fraction;
            sig.push_back(pt.noise_scale);
            frac.push_back(pt.rejection_fraction);
        }
        points.push_back(std::move(p));
    }
    json report{{"command", "validate-gaussianity"}, {"seed", cfg.seed}, {"points", points}};
    std::optional<double> rho;
    if (sig.size() >= 2) {
        rho = spearman_rho(sig, frac);
        report["spearman_rho"] = *rho;
    }
    write_table(dir / "gaussianity.csv", detail);
    write_table(dir / "sweep.csv", summary);
    write_json(dir / "report.json", report);
    std::cout << to_csv_string(summary);
    if (o.check) {
        if (sig.size() < 5) throw CheckFailed("gaussianity", "trend check needs >= 5 non-degenerate grid points");
        if (!(*rho > 0.0))
            throw CheckFailed("gaussianity", "rejection fraction does not increase with noise (rho = " + format_double(*rho) + ")");
    }
    return kExitOk;
}

// ----------------------------------------------------------- pairwise-dist

struct PairwiseOptions {
    std::string points;
    bool labeled = false;
};

int cmd_pairwise(const GlobalOptions& g, const PairwiseOptions& o)
{
    const ExperimentConfig cfg = resolve_config(g, "pairwise_dist");
    const fs::path dir = prepare_run_dir(cfg);
    Eigen::MatrixXd pts;
    if (o.points.empty()) {
        pts = build_points(cfg.data, cfg.seed).x;
    } else {
        pts = numeric_matrix(read_csv(o.points));
        if (o.labeled) {
            if (pts.cols() < 2) throw ConfigError("--labeled needs at least one feature column");
            pts = Eigen::MatrixXd(pts.leftCols(pts.cols() - 1));
        }
    }
    const DistanceHistogram h = pairwise_distance_histogram(pts, static_cast<int>(cfg.histogram.n_bins));
    CsvTable t;
    t.header = {"bin_left", "bin_right", "count"};
    for (std::size_t b = 0; b < h.counts.size(); ++b)
        t.rows.push_back({format_double(h.edges[b]), format_double(h.edges[b + 1]), std::to_string(h.counts[b])});
    write_table(dir / "histogram.csv", t);
    json report{{"command", "pairwise-dist"}, {"seed", cfg.seed}, {"n_points", pts.rows()}, {"total_pairs", h.total},
                {"min", h.min},           {"median", h.median}, {"max", h.max}};
    write_json(dir / "report.json", report);
    std::cout << report.dump() << "\n";
    return kExitOk;
}

// ------------------------------------------------------------ gmm-collapse

struct GmmOptions {
    std::string expect;
};

int cmd_gmm(const GlobalOptions& g, const GmmOptions& o)
{
    const ExperimentConfig cfg = resolve_config(g, "gmm_collapse");
    const fs::path dir = prepare_run_dir(cfg);
    const GmmRun run = gmm_collapse_run(make_gmm_lab(cfg.gmm, cfg.seed), cfg.gmm.steps, cfg.seed, cfg.gmm.log_every);
    CsvTable t;
    t.header = {"step", "entropy", "mean_log_likelihood"};
    for (const auto& p : run.trace)
        t.rows.push_back({std::to_string(p.step), format_double(p.centroid_entropy), format_double(p.mean_log_likelihood)});
    write_table(dir / "trace.csv", t);
    const double h0 = run.trace.empty() ? 0.0 : run.trace.front().centroid_entropy;
    const double h1 = run.trace.empty() ? 0.0 : run.trace.back().centroid_entropy;
    const double decline = h0 > 0.0 ? (h0 - h1) / h0 : 0.0;
    json report{{"command", "gmm-collapse"},
                {"seed", cfg.seed},
                {"aborted", run.aborted},
                {"entropy_initial", h0},
                {"entropy_final", h1},
                {"entropy_decline", decline},
                {"steps", cfg.gmm.steps}};
    write_json(dir / "report.json", report);
    std::cout << report.dump() << "\n";
    if (run.aborted) throw NumericalFailure("GMM log-likelihood became non-finite; trace kept up to the last finite step");
    const double drop = golden::gmm_collapse_min_relative_drop;
    if (o.expect == "collapse" && !(decline >= drop))
        throw CheckFailed("gmm", "expected >= 50% entropy decline, got " + format_double(decline));
    if (o.expect == "no-collapse" && !(decline < drop))
        throw CheckFailed("gmm", "expected no collapse, got entropy decline " + format_double(decline));
    return kExitOk;
}

// ----------------------------------------------------------------- compare

struct CompareOptions {
    std::string methods;
    long seeds = -1;
    bool check = false;
};

int cmd_compare(const GlobalOptions& g, const CompareOptions& o)
{
    const ExperimentConfig cfg = resolve_config(g, "compare");
    const fs::path dir = prepare_run_dir(cfg);
    const std::vector<std::string> methods = o.methods.empty() ? cfg.compare.methods : split_methods(o.methods);
    const long n_seeds = o.seeds > 0 ? o.seeds : cfg.compare.n_seeds;
    const ComparisonTable table = run_comparison(cfg, methods, n_seeds, static_cast<int>(worker_threads()));
    write_table(dir / "comparison.csv", table.to_csv());
    json report = table.to_json();
    report["command"] = "compare";
    report["seed"] = cfg.seed;
    write_json(dir / "report.json", report);
    std::cout << table.to_text();
    if (o.check) {
        const ComparisonRow& a = table.row("vicreg+pairwise");
        const ComparisonRow& b = table.row("invariance_only");
        if (a.failed || !(a.mean_accuracy >= b.mean_accuracy))
            throw CheckFailed("compare", "vicreg+pairwise does not reach invariance_only accuracy");
    }
    return kExitOk;
}

// ----------------------------------------------------------- track-entropy

struct TrackOptions {
    std::string methods;
    long steps = -2;
    bool check = false;
};

int cmd_track(const GlobalOptions& g, const TrackOptions& o)
{
    const ExperimentConfig cfg = resolve_config(g, "track_entropy");
    const fs::path dir = prepare_run_dir(cfg);
    const std::vector<std::string> methods = o.methods.empty() ? cfg.compare.methods : split_methods(o.methods);
    long steps = o.steps >= -1 ? o.steps : cfg.compare.track_steps;
    if (steps < 0) steps = static_cast<long>(cfg.train.epochs) * (cfg.train.pairs_per_epoch / cfg.train.batch_size);
    const auto traces = run_entropy_tracking(cfg, methods, steps);
    json rows = json::array();
    for (const auto& t : traces) {
        write_table(dir / ("trace_" + file_stem(t.method) + ".csv"), t.trace.to_csv());
        json s = trace_summary(t.trace);
        s["method"] = t.method;
        rows.push_back(std::move(s));
    }
    json report{{"command", "track-entropy"}, {"seed", cfg.seed}, {"n_steps", steps}, {"methods", rows}};
    write_json(dir / "report.json", report);
    std::cout << report.dump() << "\n";
    if (o.check) {
        for (const auto& t : traces) {
            if (t.method != "vicreg") continue;
            const auto& r = t.trace.records;
            if (!(r.back().logdet_entropy < r.front().logdet_entropy))
                throw CheckFailed("track-entropy", "VICReg LogDet entropy did not decrease");
            return kExitOk;
        }
        throw CheckFailed("track-entropy", "--check needs vicreg among the methods");
    }
    return kExitOk;
}

int report_failure(int code, const std::string& kind, const std::string& message)
{
    std::cerr << json{{"status", "error"}, {"exit_code", code}, {"kind", kind}, {"message", message}}.dump() << "\n";
    return code;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"infolab: entropy estimators, SSL training and generalization diagnostics"};
    app.require_subcommand(1);
    GlobalOptions g;
    app.add_option("-c,--config", g.config_path, "Config file (sections of key = value lines)");
    app.add_option("--set", g.sets, "Override a config key: section.key=value (repeatable)");
    app.add_option("-o,--out", g.out, "Output root directory (overrides output_dir)");
    app.add_option("--experiment", g.experiment, "Experiment name (overrides experiment)");
    app.add_option("--seed", g.seed, "Global seed (overrides seed)")->check(CLI::NonNegativeNumber);

    EntropyOptions eo;
    auto* entropy = app.add_subcommand("entropy", "Entropy estimates of a Gaussian mixture");
    entropy->add_option("--mixture", eo.mixture, "Mixture JSON; defaults to the configured dataset's view mixture");
    entropy->add_option("--mc-samples", eo.mc_samples, "Monte Carlo sample count")->check(CLI::Range(100L, 100000000L));

    auto* train = app.add_subcommand("train", "Train an encoder with the configured objective");

    BoundOptions bo;
    auto* bound = app.add_subcommand("bound", "Evaluate the generalization bound");
    bound->add_option("--labeled", bo.labeled, "Labeled CSV (features..., label)");
    bound->add_option("--unlabeled-pairs", bo.pairs, "Pairs CSV (x+ features..., x++ features..., label)");
    bound->add_option("--test", bo.test, "Held-out labeled CSV");
    bound->add_option("--checkpoint", bo.checkpoint, "Encoder checkpoint JSON; trains one when omitted");
    bound->add_option("--delta", bo.delta, "Confidence parameter")->check(CLI::Range(0.0, 1.0));
    bound->add_flag("--check", bo.check, "Exit 4 if the measured test loss exceeds the bound");

    GaussianityOptions go;
    auto* gauss = app.add_subcommand("validate-gaussianity", "Normality sweep of network outputs over input noise");
    gauss->add_option("--checkpoint", go.checkpoint, "Network checkpoint; a random deep ReLU net when omitted");
    gauss->add_flag("--check", go.check, "Exit 4 unless rejection rises with noise (Spearman rho > 0)");

    PairwiseOptions po;
    auto* pairwise = app.add_subcommand("pairwise-dist", "Histogram of pairwise distances");
    pairwise->add_option("--points", po.points, "Points CSV; the configured base points when omitted");
    pairwise->add_flag("--labeled", po.labeled, "Drop the last CSV column (labels)");

    GmmOptions mo;
    auto* gmm = app.add_subcommand("gmm-collapse", "GMM fitting with optionally trainable inputs");
    gmm->add_option("--expect", mo.expect, "Exit 4 unless the run shows this behavior")
        ->check(CLI::IsMember({"collapse", "no-collapse"}));

    CompareOptions co;
    auto* compare = app.add_subcommand("compare", "Linear-probe comparison of SSL objectives over seeds");
    compare->add_option("--methods", co.methods, "Comma-separated objective names");
    compare->add_option("--seeds", co.seeds, "Seeds per method (>= 3)");
    compare->add_flag("--check", co.check, "Exit 4 unless vicreg+pairwise >= invariance_only");

    TrackOptions to;
    auto* track = app.add_subcommand("track-entropy", "Entropy diagnostics along training for several objectives");
    track->add_option("--methods", to.methods, "Comma-separated objective names");
    track->add_option("--steps", to.steps, "Optimizer steps (0 keeps only the initial point)")->check(CLI::NonNegativeNumber);
    track->add_flag("--check", to.check, "Exit 4 unless the VICReg LogDet entropy decreases");

    for (auto* sub : app.get_subcommands({})) sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        return report_failure(kExitConfig, "usage_error", e.what());
    }

    try {
        if (*entropy) return cmd_entropy(g, eo);
        if (*train) return cmd_train(g);
        if (*bound) return cmd_bound(g, bo);
        if (*gauss) return cmd_gaussianity(g, go);
        if (*pairwise) return cmd_pairwise(g, po);
        if (*gmm) return cmd_gmm(g, mo);
        if (*compare) return cmd_compare(g, co);
        if (*track) return cmd_track(g, to);
    } catch (const CheckFailed& e) {
        return report_failure(kExitCheck, "check_failed:" + e.check(), e.what());
    } catch (const NumericalFailure& e) {
        return report_failure(kExitNumerical, e.kind(), e.what());
    } catch (const RankDeficientCovariance& e) {
        return report_failure(kExitNumerical, e.kind(), e.what());
    } catch (const Error& e) {
        return report_failure(kExitConfig, e.kind(), e.what());
    } catch (const fs::filesystem_error& e) {
        return report_failure(kExitConfig, "io_error", e.what());
    } catch (const std::exception& e) {
        return report_failure(kExitNumerical, "internal_error", e.what());
    }
    return report_failure(kExitConfig, "usage_error", "no subcommand");
}
