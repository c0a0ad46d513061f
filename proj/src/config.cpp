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

#include "infolab/config.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <sstream>

#include "infolab/csv.hpp"
#include "infolab/error.hpp"

namespace infolab {

std::string to_string(DataKind k)
{
    switch (k) {
    case DataKind::Prototypes: return "prototypes";
    case DataKind::TwoMoons: return "two_moons";
    case DataKind::Csv: return "csv";
    }
    return "two_moons";
}

DataKind data_kind_from_string(const std::string& s)
{
    if (s == "prototypes") return DataKind::Prototypes;
    if (s == "two_moons") return DataKind::TwoMoons;
    if (s == "csv") return DataKind::Csv;
    throw ConfigError("unknown data.kind '" + s + "'");
}

namespace {

// ---------------------------------------------------------------- parsing

class Cursor {
public:
    Cursor(const std::string& s, std::string where) : s_(s), where_(std::move(where)) {}

    void skip_ws()
    {
        while (i_ < s_.size() && (s_[i_] == ' ' || s_[i_] == '\t' || s_[i_] == '\r')) ++i_;
    }
    bool at_end_or_comment()
    {
        skip_ws();
        return i_ >= s_.size() || s_[i_] == '#';
    }
    char peek() const { return i_ < s_.size() ? s_[i_] : '\0'; }
    [[noreturn]] void fail(const std::string& what) const { throw ConfigError(where_ + ": " + what); }

    std::string quoted()
    {
        ++i_; // opening quote
        std::string out;
        while (i_ < s_.size() && s_[i_] != '"') {
            char c = s_[i_++];
            if (c == '\\') {
                if (i_ >= s_.size()) fail("dangling escape");
                const char e = s_[i_++];
                switch (e) {
                case 'n': c = '\n'; break;
                case 't': c = '\t'; break;
                case '"': c = '"'; break;
                case '\\': c = '\\'; break;
                default: fail(std::string("unknown escape \\") + e);
                }
            }
            out.push_back(c);
        }
        if (i_ >= s_.size()) fail("unterminated string");
        ++i_;
        return out;
    }

    std::string word()
    {
        const std::size_t start = i_;
        while (i_ < s_.size() && s_[i_] != ',' && s_[i_] != ']' && s_[i_] != '#' && s_[i_] != ' ' && s_[i_] != '\t' &&
               s_[i_] != '\r')
            ++i_;
        return s_.substr(start, i_ - start);
    }

    static bool to_number(const std::string& w, double& out)
    {
        if (w.empty()) return false;
        char* end = nullptr;
        out = std::strtod(w.c_str(), &end);
        return end == w.c_str() + w.size() && std::isfinite(out);
    }

    ConfigValue value(bool bare_strings)
    {
        skip_ws();
        if (peek() == '"') return quoted();
        if (peek() == '[') {
            ++i_;
            std::vector<double> nums;
            std::vector<std::string> strs;
            for (;;) {
                skip_ws();
                if (peek() == ']') {
                    ++i_;
                    break;
                }
                if (peek() == '"') {
                    strs.push_back(quoted());
                } else {
                    const std::string w = word();
                    double d = 0.0;
                    if (to_number(w, d)) nums.push_back(d);
                    else if (bare_strings && !w.empty()) strs.push_back(w);
                    else fail("bad array element '" + w + "'");
                }
                skip_ws();
                if (peek() == ',') ++i_;
                else if (peek() != ']') fail("expected ',' or ']' in array");
            }
            if (!nums.empty() && !strs.empty()) fail("mixed array element types");
            if (!strs.empty()) return strs;
            return nums;
        }
        const std::string w = word();
        if (w == "true") return true;
        if (w == "false") return false;
        double d = 0.0;
        if (to_number(w, d)) return d;
        if (bare_strings && !w.empty()) {
            // The remainder of an override is taken verbatim.
            std::string rest = w + s_.substr(i_);
            i_ = s_.size();
            while (!rest.empty() && (rest.back() == ' ' || rest.back() == '\r')) rest.pop_back();
            return rest;
        }
        fail("bad value '" + w + "'");
    }

private:
    const std::string& s_;
    std::string where_;
    std::size_t i_ = 0;
};

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

bool valid_key(const std::string& k)
{
    if (k.empty()) return false;
    for (char c : k)
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) return false;
    return true;
}

// ------------------------------------------------------------- field table

struct Field {
    std::string section;
    std::string key;
    std::function<ConfigValue()> get;
    std::function<void(const ConfigValue&)> set;
};

std::string where(const Field& f) { return f.section.empty() ? f.key : f.section + "." + f.key; }

double as_number(const Field& f, const ConfigValue& v)
{
    if (const double* d = std::get_if<double>(&v)) return *d;
    throw ConfigError(where(f) + " must be a number");
}

long as_integer(const Field& f, const ConfigValue& v)
{
    const double d = as_number(f, v);
    if (d != std::floor(d) || std::abs(d) > 9007199254740992.0) throw ConfigError(where(f) + " must be an integer");
    return static_cast<long>(d);
}

template <class Int>
Field integer(std::string sec, std::string key, Int& ref)
{
    Field f{std::move(sec), std::move(key), nullptr, nullptr};
    f.get = [&ref] { return ConfigValue(static_cast<double>(ref)); };
    f.set = [&ref, f](const ConfigValue& v) {
        const long x = as_integer(f, v);
        if constexpr (std::is_unsigned_v<Int>)
            if (x < 0) throw ConfigError(where(f) + " must be non-negative");
        ref = static_cast<Int>(x);
    };
    return f;
}

Field number(std::string sec, std::string key, double& ref)
{
    Field f{std::move(sec), std::move(key), nullptr, nullptr};
    f.get = [&ref] { return ConfigValue(ref); };
    f.set = [&ref, f](const ConfigValue& v) { ref = as_number(f, v); };
    return f;
}

Field boolean(std::string sec, std::string key, bool& ref)
{
    Field f{std::move(sec), std::move(key), nullptr, nullptr};
    f.get = [&ref] { return ConfigValue(ref); };
    f.set = [&ref, f](const ConfigValue& v) {
        const bool* b = std::get_if<bool>(&v);
        if (!b) throw ConfigError(where(f) + " must be true or false");
        ref = *b;
    };
    return f;
}

Field text(std::string sec, std::string key, std::function<std::string()> get, std::function<void(const std::string&)> set)
{
    Field f{std::move(sec), std::move(key), nullptr, nullptr};
    f.get = [get] { return ConfigValue(get()); };
    f.set = [set, f](const ConfigValue& v) {
        const std::string* s = std::get_if<std::string>(&v);
        if (!s) throw ConfigError(where(f) + " must be a string");
        set(*s);
    };
    return f;
}

Field text(std::string sec, std::string key, std::string& ref)
{
    return text(std::move(sec), std::move(key), [&ref] { return ref; }, [&ref](const std::string& s) { ref = s; });
}

Field numbers(std::string sec, std::string key, std::vector<double>& ref)
{
    Field f{std::move(sec), std::move(key), nullptr, nullptr};
    f.get = [&ref] { return ConfigValue(ref); };
    f.set = [&ref, f](const ConfigValue& v) {
        const auto* a = std::get_if<std::vector<double>>(&v);
        if (a) {
            ref = *a;
            return;
        }
        const auto* s = std::get_if<std::vector<std::string>>(&v);
        if (s && s->empty()) {
            ref.clear();
            return;
        }
        throw ConfigError(where(f) + " must be an array of numbers");
    };
    return f;
}

Field integers(std::string sec, std::string key, std::vector<long>& ref)
{
    Field f{std::move(sec), std::move(key), nullptr, nullptr};
    f.get = [&ref] { return ConfigValue(std::vector<double>(ref.begin(), ref.end())); };
    f.set = [&ref, f](const ConfigValue& v) {
        const auto* a = std::get_if<std::vector<double>>(&v);
        if (!a) throw ConfigError(where(f) + " must be an array of integers");
        ref.clear();
        for (double d : *a) ref.push_back(as_integer(f, d));
    };
    return f;
}

Field strings(std::string sec, std::string key, std::vector<std::string>& ref)
{
    Field f{std::move(sec), std::move(key), nullptr, nullptr};
    f.get = [&ref] { return ConfigValue(ref); };
    f.set = [&ref, f](const ConfigValue& v) {
        if (const auto* a = std::get_if<std::vector<std::string>>(&v)) {
            ref = *a;
            return;
        }
        const auto* n = std::get_if<std::vector<double>>(&v);
        if (n && n->empty()) {
            ref.clear();
            return;
        }
        throw ConfigError(where(f) + " must be an array of strings");
    };
    return f;
}

/// Every serialized field in canonical order; references point into `c`.
std::vector<Field> fields(ExperimentConfig& c)
{
    std::vector<Field> f;
    f.push_back(integer("", "schema_version", c.schema_version));
    f.push_back(integer("", "seed", c.seed));
    f.push_back(text("", "output_dir", c.output_dir));
    f.push_back(text("", "experiment", c.experiment));

    auto& d = c.data;
    f.push_back(text("data", "kind", [&d] { return to_string(d.kind); },
                     [&d](const std::string& s) { d.kind = data_kind_from_string(s); }));
    f.push_back(integer("data", "n_points", d.n_points));
    f.push_back(number("data", "moons_noise", d.moons_noise));
    f.push_back(number("data", "input_scale", d.input_scale));
    f.push_back(number("data", "view_noise", d.view_noise));
    f.push_back(text("data", "csv_path", d.csv_path));
    auto& p = d.prototypes;
    f.push_back(integer("data", "n_prototypes", p.n_prototypes));
    f.push_back(integer("data", "dim", p.dim));
    f.push_back(integer("data", "rank", p.rank));
    f.push_back(integer("data", "n_classes", p.n_classes));
    f.push_back(number("data", "spread", p.spread));
    f.push_back(number("data", "tangent_scale", p.tangent_scale));
    f.push_back(number("data", "separation_floor", p.separation_floor));

    auto& n = c.network;
    f.push_back(integers("network", "hidden", n.hidden));
    f.push_back(integer("network", "embedding_dim", n.embedding_dim));
    f.push_back(text("network", "activation", n.activation));
    f.push_back(number("network", "slope", n.slope));

    auto& o = c.objective;
    f.push_back(text("objective", "name", [&o] { return to_string(o.name); },
                     [&o](const std::string& s) { o.name = objective_from_string(s); }));
    f.push_back(number("objective", "alpha", o.alpha));
    f.push_back(number("objective", "beta_cov", o.beta_cov));
    f.push_back(number("objective", "gamma_inv", o.gamma_inv));
    f.push_back(number("objective", "gamma_target", o.gamma_target));
    f.push_back(number("objective", "epsilon", o.epsilon));
    f.push_back(text("objective", "entropy_plugin", [&o] { return to_string(o.entropy_plugin); },
                     [&o](const std::string& s) { o.entropy_plugin = entropy_plugin_from_string(s); }));
    f.push_back(number("objective", "temperature", o.temperature));
    f.push_back(number("objective", "logdet_beta", o.logdet_beta));
    f.push_back(number("objective", "pairwise_sigma", o.pairwise_sigma));
    f.push_back(number("objective", "entropy_weight", o.entropy_weight));
    f.push_back(text("objective", "cov_mode", [&o] { return to_string(o.cov_mode); },
                     [&o](const std::string& s) { o.cov_mode = cov_mode_from_string(s); }));
    f.push_back(number("objective", "view_sigma", o.view_sigma));
    f.push_back(number("objective", "jitter", o.jitter));

    auto& t = c.train;
    f.push_back(integer("train", "epochs", t.epochs));
    f.push_back(integer("train", "batch_size", t.batch_size));
    f.push_back(number("train", "learning_rate", t.learning_rate));
    f.push_back(text("train", "optimizer", [&t] { return to_string(t.optimizer); },
                     [&t](const std::string& s) { t.optimizer = optimizer_from_string(s); }));
    f.push_back(number("train", "momentum", t.momentum));
    f.push_back(number("train", "beta1", t.beta1));
    f.push_back(number("train", "beta2", t.beta2));
    f.push_back(number("train", "eps_adam", t.eps_adam));
    f.push_back(integer("train", "diagnostics_every", t.diagnostics_every));
    f.push_back(integer("train", "pairs_per_epoch", t.pairs_per_epoch));
    f.push_back(integer("train", "probe_batch", t.probe_batch));
    f.push_back(boolean("train", "record_wall_time", t.record_wall_time));
    f.push_back(integer("train", "max_steps", t.max_steps));

    auto& e = c.eval;
    f.push_back(integer("eval", "n_probe_train", e.n_probe_train));
    f.push_back(integer("eval", "n_probe_test", e.n_probe_test));
    f.push_back(number("eval", "ridge", e.ridge));

    auto& b = c.bound;
    f.push_back(integer("bound", "n_labeled", b.n_labeled));
    f.push_back(integer("bound", "n_unlabeled", b.n_unlabeled));
    f.push_back(integer("bound", "n_test", b.n_test));
    f.push_back(number("bound", "delta", b.delta));
    f.push_back(integer("bound", "n_sign_draws", b.n_sign_draws));
    f.push_back(integer("bound", "n_reinit", b.n_reinit));
    f.push_back(integer("bound", "n_perturbed", b.n_perturbed));
    f.push_back(number("bound", "perturb_scale", b.perturb_scale));
    f.push_back(numbers("bound", "class_marginals", b.class_marginals));

    auto& cm = c.compare;
    f.push_back(strings("compare", "methods", cm.methods));
    f.push_back(integer("compare", "n_seeds", cm.n_seeds));
    f.push_back(integer("compare", "track_steps", cm.track_steps));

    auto& g = c.gaussianity;
    f.push_back(numbers("gaussianity", "noise_grid", g.noise_grid));
    f.push_back(integer("gaussianity", "n_per_point", g.n_per_point));
    f.push_back(integer("gaussianity", "depth", g.depth));
    f.push_back(integer("gaussianity", "width", g.width));
    f.push_back(integer("gaussianity", "out_dim", g.out_dim));

    auto& m = c.gmm;
    f.push_back(integer("gmm", "n_points", m.n_points));
    f.push_back(number("gmm", "noise", m.noise));
    f.push_back(integer("gmm", "n_components", m.n_components));
    f.push_back(text("gmm", "mode", m.mode));
    f.push_back(number("gmm", "sigma", m.sigma));
    f.push_back(number("gmm", "init_scale", m.init_scale));
    f.push_back(number("gmm", "entropy_bandwidth", m.entropy_bandwidth));
    f.push_back(number("gmm", "lr_params", m.lr_params));
    f.push_back(number("gmm", "lr_inputs", m.lr_inputs));
    f.push_back(integer("gmm", "steps", m.steps));
    f.push_back(integer("gmm", "log_every", m.log_every));

    f.push_back(integer("histogram", "n_bins", c.histogram.n_bins));
    return f;
}

std::string quote(const std::string& s)
{
    std::string out = "\"";
    for (char ch : s) {
        switch (ch) {
        case '"': out += "\\\""; break;
        case '\\': out += "\\\\"; break;
        case '\n': out += "\\n"; break;
        case '\t': out += "\\t"; break;
        default: out.push_back(ch);
        }
    }
    return out + "\"";
}

std::string render(const ConfigValue& v)
{
    struct Visitor {
        std::string operator()(bool b) const { return b ? "true" : "false"; }
        std::string operator()(double d) const { return format_double(d); }
        std::string operator()(const std::string& s) const { return quote(s); }
        std::string operator()(const std::vector<double>& a) const
        {
            std::string out = "[";
            for (std::size_t i = 0; i < a.size(); ++i) out += (i ? ", " : "") + format_double(a[i]);
            return out + "]";
        }
        std::string operator()(const std::vector<std::string>& a) const
        {
            std::string out = "[";
            for (std::size_t i = 0; i < a.size(); ++i) out += (i ? ", " : "") + quote(a[i]);
            return out + "]";
        }
    };
    return std::visit(Visitor{}, v);
}

} // namespace

ConfigDocument parse_config_document(const std::string& text)
{
    ConfigDocument doc;
    doc[""];
    std::string section;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string where = "config line " + std::to_string(lineno);
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        if (t[0] == '[') {
            const auto close = t.find(']');
            if (close == std::string::npos) throw ConfigError(where + ": unterminated section header");
            const std::string rest = trim(t.substr(close + 1));
            if (!rest.empty() && rest[0] != '#') throw ConfigError(where + ": text after section header");
            section = trim(t.substr(1, close - 1));
            if (!valid_key(section)) throw ConfigError(where + ": bad section name '" + section + "'");
            if (doc.count(section) && !doc[section].empty()) throw ConfigError(where + ": duplicate section [" + section + "]");
            doc[section];
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError(where + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        if (!valid_key(key)) throw ConfigError(where + ": bad key '" + key + "'");
        const std::string rhs = line.substr(eq + 1);
        Cursor cur(rhs, where);
        ConfigValue v = cur.value(false);
        if (!cur.at_end_or_comment()) cur.fail("trailing text after value");
        if (doc[section].count(key)) throw ConfigError(where + ": duplicate key '" + key + "'");
        doc[section][key] = std::move(v);
    }
    return doc;
}

void apply_override(ConfigDocument& doc, const std::string& assignment)
{
    const auto eq = assignment.find('=');
    if (eq == std::string::npos) throw ConfigError("override '" + assignment + "' must look like section.key=value");
    const std::string path = trim(assignment.substr(0, eq));
    const auto dot = path.find('.');
    const std::string section = dot == std::string::npos ? "" : path.substr(0, dot);
    const std::string key = dot == std::string::npos ? path : path.substr(dot + 1);
    if (!valid_key(key) || (!section.empty() && !valid_key(section)))
        throw ConfigError("override '" + assignment + "' has a malformed key");
    const std::string rhs = assignment.substr(eq + 1);
    Cursor cur(rhs, "override '" + assignment + "'");
    ConfigValue v = cur.value(true);
    cur.skip_ws();
    if (cur.peek() != '\0') cur.fail("trailing text after value");
    doc[section][key] = std::move(v);
}

ExperimentConfig config_from_document(const ConfigDocument& doc)
{
    ExperimentConfig cfg;
    std::vector<Field> table = fields(cfg);
    for (const auto& [section, entries] : doc) {
        for (const auto& [key, value] : entries) {
            bool found = false;
            for (auto& f : table) {
                if (f.section == section && f.key == key) {
                    try {
                        f.set(value);
                    } catch (const ConfigError&) {
                        throw;
                    } catch (const Error& e) {
                        throw ConfigError(where(f) + ": " + e.what());
                    }
                    found = true;
                    break;
                }
            }
            if (!found) {
                bool known_section = section.empty();
                for (const auto& f : table) known_section = known_section || f.section == section;
                if (!known_section) throw ConfigError("unknown config section [" + section + "]");
                throw ConfigError("unknown config key '" + (section.empty() ? key : section + "." + key) + "'");
            }
        }
    }
    if (cfg.schema_version != kSchemaVersion)
        throw ConfigError("schema_version " + std::to_string(cfg.schema_version) + " is not supported (expected " +
                          std::to_string(kSchemaVersion) + ")");
    cfg.validate();
    return cfg;
}

ExperimentConfig parse_config(const std::string& text, const std::vector<std::string>& overrides)
{
    ConfigDocument doc = parse_config_document(text);
    for (const auto& o : overrides) apply_override(doc, o);
    return config_from_document(doc);
}

ExperimentConfig load_config(const std::string& path, const std::vector<std::string>& overrides)
{
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), overrides);
}

std::string serialize_config(const ExperimentConfig& cfg)
{
    ExperimentConfig copy = cfg;
    std::string out;
    std::string section;
    for (const auto& f : fields(copy)) {
        if (f.section != section) {
            section = f.section;
            out += "\n[" + section + "]\n";
        }
        out += f.key + " = " + render(f.get()) + "\n";
    }
    return out;
}

TrainConfig ExperimentConfig::train_config() const
{
    TrainConfig t = train;
    t.seed = seed;
    return t;
}

void ExperimentConfig::validate() const
{
    auto need = [](bool ok, const std::string& what) {
        if (!ok) throw ConfigError(what + " out of range");
    };
    need(!experiment.empty() && experiment.find('/') == std::string::npos, "experiment (non-empty, no '/')");
    need(data.n_points >= 4, "data.n_points");
    need(data.moons_noise >= 0.0, "data.moons_noise");
    need(data.input_scale > 0.0, "data.input_scale");
    need(data.view_noise >= 0.0, "data.view_noise");
    need(data.kind != DataKind::Csv || !data.csv_path.empty(), "data.csv_path (required for kind = csv)");
    need(data.prototypes.n_prototypes >= 2, "data.n_prototypes");
    need(data.prototypes.dim >= 1, "data.dim");
    need(data.prototypes.rank >= 1 && data.prototypes.rank <= data.prototypes.dim, "data.rank");
    need(data.prototypes.n_classes >= 2, "data.n_classes");
    need(data.prototypes.separation_floor >= 0.0, "data.separation_floor");
    need(network.embedding_dim >= 1, "network.embedding_dim");
    for (long h : network.hidden) need(h >= 1, "network.hidden");
    try {
        (void)Activation::from_tag(network.activation, network.slope);
    } catch (const Error& e) {
        throw ConfigError(std::string("network.activation: ") + e.what());
    }
    objective.validate();
    train_config().validate();
    need(eval.n_probe_train >= 2 && eval.n_probe_test >= 1, "eval sample counts");
    need(eval.ridge >= 0.0, "eval.ridge");
    need(bound.n_labeled >= 2 && bound.n_unlabeled >= 2 && bound.n_test >= 1, "bound sample counts");
    need(bound.delta > 0.0 && bound.delta < 1.0, "bound.delta");
    need(bound.n_sign_draws >= 1, "bound.n_sign_draws");
    need(bound.n_reinit >= 0 && bound.n_perturbed >= 0, "bound ensemble sizes");
    need(bound.perturb_scale >= 0.0, "bound.perturb_scale");
    for (double p : bound.class_marginals) need(p > 0.0 && p <= 1.0, "bound.class_marginals");
    need(compare.n_seeds >= 3, "compare.n_seeds (published rows need >= 3 seeds)");
    need(!compare.methods.empty(), "compare.methods");
    for (const auto& m : compare.methods) {
        const ObjectiveName name = objective_from_string(m);
        need(name != ObjectiveName::InfoObjective, "compare.methods (info_objective is not a comparison method)");
    }
    need(compare.track_steps >= -1, "compare.track_steps");
    need(!gaussianity.noise_grid.empty(), "gaussianity.noise_grid");
    for (double s : gaussianity.noise_grid) need(s >= 0.0, "gaussianity.noise_grid");
    need(gaussianity.n_per_point >= 20, "gaussianity.n_per_point");
    need(gaussianity.depth >= 0 && gaussianity.width >= 1 && gaussianity.out_dim >= 1, "gaussianity network shape");
    need(gmm.n_points >= 2 && gmm.n_components >= 1 && gmm.n_components <= gmm.n_points, "gmm sizes");
    need(gmm.mode == "full" || gmm.mode == "fixed_small", "gmm.mode");
    need(gmm.sigma > 0.0 && gmm.init_scale > 0.0 && gmm.entropy_bandwidth > 0.0, "gmm scales");
    need(gmm.lr_params >= 0.0 && gmm.lr_inputs >= 0.0, "gmm learning rates");
    need(gmm.steps >= 1 && gmm.log_every >= 1, "gmm.steps / gmm.log_every");
    need(histogram.n_bins >= 1, "histogram.n_bins");
}

} // namespace infolab
