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

#include "infolab/cpa_net.hpp"

#include <atomic>
#include <cmath>
#include <random>
#include <string>

#include "infolab/error.hpp"
#include "infolab/rng.hpp"

namespace infolab {

namespace {

constexpr double kBoundaryTol = 1e-12;
std::atomic<std::uint64_t> g_boundary_warnings{0};

} // namespace

std::string Activation::tag() const
{
    switch (kind) {
    case ActivationKind::ReLU: return "relu";
    case ActivationKind::LeakyReLU: return "leaky_relu";
    case ActivationKind::Abs: return "abs";
    }
    return "relu";
}

Activation Activation::from_tag(const std::string& tag, double slope)
{
    if (tag == "relu") return relu();
    if (tag == "leaky_relu") return leaky(slope);
    if (tag == "abs") return abs();
    throw InvalidArgument("unknown activation '" + tag + "'");
}

PwaNetwork::PwaNetwork(std::vector<Layer> layers, Activation act, std::uint64_t seed)
    : layers_(std::move(layers)), act_(act), seed_(seed)
{
    if (layers_.empty()) throw InvalidArgument("network needs at least one layer");
    for (std::size_t l = 0; l < layers_.size(); ++l) {
        const Layer& ly = layers_[l];
        if (ly.bias.size() != ly.weight.rows())
            throw DimensionMismatch("layer " + std::to_string(l) + ": bias length != weight rows");
        if (l > 0 && ly.weight.cols() != layers_[l - 1].weight.rows())
            throw DimensionMismatch("layer " + std::to_string(l) + ": input width does not compose");
    }
}

PwaNetwork PwaNetwork::random(const std::vector<int>& dims, Activation act, std::uint64_t seed)
{
    if (dims.size() < 2) throw InvalidArgument("dims needs an input and an output width");
    Engine rng = make_engine(seed);
    std::vector<Layer> layers;
    for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
        if (dims[l] < 1 || dims[l + 1] < 1) throw InvalidArgument("layer widths must be >= 1");
        const double bound = 1.0 / std::sqrt(static_cast<double>(dims[l]));
        std::uniform_real_distribution<double> u(-bound, bound);
        Layer ly{Eigen::MatrixXd(dims[l + 1], dims[l]), Eigen::VectorXd(dims[l + 1])};
        for (Eigen::Index r = 0; r < ly.weight.rows(); ++r)
            for (Eigen::Index c = 0; c < ly.weight.cols(); ++c) ly.weight(r, c) = u(rng);
        for (Eigen::Index r = 0; r < ly.bias.size(); ++r) ly.bias(r) = u(rng);
        layers.push_back(std::move(ly));
    }
    return PwaNetwork(std::move(layers), act, seed);
}

Eigen::Index PwaNetwork::hidden_units() const
{
    Eigen::Index n = 0;
    for (std::size_t l = 0; l + 1 < layers_.size(); ++l) n += layers_[l].weight.rows();
    return n;
}

std::size_t PwaNetwork::parameter_count() const
{
    std::size_t n = 0;
    for (const auto& ly : layers_) n += static_cast<std::size_t>(ly.weight.size() + ly.bias.size());
    return n;
}

Eigen::VectorXd PwaNetwork::forward(const Eigen::VectorXd& x) const
{
    if (x.size() != input_dim())
        throw DimensionMismatch("forward: input has " + std::to_string(x.size()) + " entries, expected " +
                                std::to_string(input_dim()));
    Eigen::VectorXd h = x;
    for (std::size_t l = 0; l < layers_.size(); ++l) {
        h = layers_[l].weight * h + layers_[l].bias;
        if (l + 1 < layers_.size()) h = h.unaryExpr([this](double v) { return act_.apply(v); });
    }
    return h;
}

Eigen::MatrixXd PwaNetwork::forward_batch(const Eigen::MatrixXd& x) const
{
    if (x.cols() != input_dim()) throw DimensionMismatch("forward_batch: column count != input dim");
    Eigen::MatrixXd h = x;
    for (std::size_t l = 0; l < layers_.size(); ++l) {
        Eigen::MatrixXd pre = h * layers_[l].weight.transpose();
        pre.rowwise() += layers_[l].bias.transpose();
        if (l + 1 < layers_.size())
            h = pre.unaryExpr([this](double v) { return act_.apply(v); });
        else
            h = std::move(pre);
    }
    return h;
}

std::vector<bool> activation_pattern(const PwaNetwork& net, const Eigen::VectorXd& x)
{
    if (x.size() != net.input_dim()) throw DimensionMismatch("activation_pattern: input dimension");
    std::vector<bool> bits;
    bits.reserve(static_cast<std::size_t>(net.hidden_units()));
    Eigen::VectorXd h = x;
    const auto& layers = net.layers();
    for (std::size_t l = 0; l + 1 < layers.size(); ++l) {
        const Eigen::VectorXd pre = layers[l].weight * h + layers[l].bias;
        const bool kinkless = net.activation().kinkless();
        for (Eigen::Index i = 0; i < pre.size(); ++i) bits.push_back(kinkless || pre(i) >= 0.0);
        h = pre.unaryExpr([&](double v) { return net.activation().apply(v); });
    }
    return bits;
}

RegionAffine affine_extract(const PwaNetwork& net, const Eigen::VectorXd& x, BoundaryPolicy policy)
{
    if (x.size() != net.input_dim()) throw DimensionMismatch("affine_extract: input dimension");
    const auto& layers = net.layers();
    RegionAffine r;
    Eigen::MatrixXd a = Eigen::MatrixXd::Identity(x.size(), x.size());
    Eigen::VectorXd h = x;
    for (std::size_t l = 0; l < layers.size(); ++l) {
        const Eigen::VectorXd pre = layers[l].weight * h + layers[l].bias;
        a = layers[l].weight * a;
        if (l + 1 == layers.size()) {
            h = pre;
            break;
        }
        Eigen::VectorXd slope(pre.size());
        const bool kinkless = net.activation().kinkless();
        for (Eigen::Index i = 0; i < pre.size(); ++i) {
            if (!kinkless && std::abs(pre(i)) < kBoundaryTol) {
                if (policy == BoundaryPolicy::Throw)
                    throw BoundaryInput("layer " + std::to_string(l) + " unit " + std::to_string(i) +
                                        " pre-activation " + std::to_string(pre(i)));
                g_boundary_warnings.fetch_add(1, std::memory_order_relaxed);
            }
            r.activation_pattern.push_back(kinkless || pre(i) >= 0.0);
            slope(i) = net.activation().derivative(pre(i));
        }
        a = slope.asDiagonal() * a;
        h = pre.unaryExpr([&](double v) { return net.activation().apply(v); });
    }
    r.a_matrix = std::move(a);
    r.b_offset = h - r.a_matrix * x;
    return r;
}

std::uint64_t boundary_warning_count() { return g_boundary_warnings.load(std::memory_order_relaxed); }

Pushforward pushforward_gaussian(const PwaNetwork& net, const Gaussian& g, Eigen::Index n_purity, std::uint64_t seed)
{
    if (g.dim() != net.input_dim()) throw DimensionMismatch("pushforward: Gaussian dim != network input dim");
    if (n_purity < 1) throw InvalidArgument("n_purity must be >= 1");
    const RegionAffine r = affine_extract(net, g.mean());
    Pushforward out;
    out.image = Gaussian::from_factor(r.a_matrix * g.mean() + r.b_offset, r.a_matrix * g.cov_factor());
    const Eigen::MatrixXd xs = sample(g, n_purity, seed);
    Eigen::Index same = 0;
    for (Eigen::Index i = 0; i < n_purity; ++i)
        if (activation_pattern(net, xs.row(i).transpose()) == r.activation_pattern) ++same;
    out.purity = static_cast<double>(same) / static_cast<double>(n_purity);
    return out;
}

nlohmann::json to_json(const PwaNetwork& net)
{
    nlohmann::json doc;
    doc["activation"] = net.activation().tag();
    doc["slope"] = net.activation().slope;
    doc["seed"] = net.seed();
    nlohmann::json layers = nlohmann::json::array();
    for (const auto& ly : net.layers()) {
        nlohmann::json j;
        j["rows"] = ly.weight.rows();
        j["cols"] = ly.weight.cols();
        std::vector<double> w;
        w.reserve(static_cast<std::size_t>(ly.weight.size()));
        for (Eigen::Index r = 0; r < ly.weight.rows(); ++r)
            for (Eigen::Index c = 0; c < ly.weight.cols(); ++c) w.push_back(ly.weight(r, c));
        j["weight"] = w;
        j["bias"] = std::vector<double>(ly.bias.data(), ly.bias.data() + ly.bias.size());
        layers.push_back(j);
    }
    doc["layers"] = layers;
    return doc;
}

PwaNetwork network_from_json(const nlohmann::json& doc)
{
    try {
        std::vector<Layer> layers;
        for (const auto& j : doc.at("layers")) {
            const auto rows = j.at("rows").get<Eigen::Index>();
            const auto cols = j.at("cols").get<Eigen::Index>();
            const auto w = j.at("weight").get<std::vector<double>>();
            const auto b = j.at("bias").get<std::vector<double>>();
            if (static_cast<Eigen::Index>(w.size()) != rows * cols || static_cast<Eigen::Index>(b.size()) != rows)
                throw InvalidArgument("checkpoint layer array sizes do not match its shape");
            Layer ly{Eigen::MatrixXd(rows, cols), Eigen::VectorXd(rows)};
            for (Eigen::Index r = 0; r < rows; ++r)
                for (Eigen::Index c = 0; c < cols; ++c) ly.weight(r, c) = w[static_cast<std::size_t>(r * cols + c)];
            for (Eigen::Index r = 0; r < rows; ++r) ly.bias(r) = b[static_cast<std::size_t>(r)];
            layers.push_back(std::move(ly));
        }
        const Activation act = Activation::from_tag(doc.at("activation").get<std::string>(), doc.value("slope", 0.01));
        return PwaNetwork(std::move(layers), act, doc.value("seed", std::uint64_t{0}));
    } catch (const nlohmann::json::exception& e) {
        throw InvalidArgument(std::string("malformed network checkpoint: ") + e.what());
    }
}

void apply_update(PwaNetwork& net, const std::vector<Eigen::MatrixXd>& deltas)
{
    auto& layers = net.mutable_layers();
    if (deltas.size() != 2 * layers.size()) throw DimensionMismatch("apply_update: wrong number of deltas");
    for (std::size_t l = 0; l < layers.size(); ++l) {
        const Eigen::MatrixXd& dw = deltas[2 * l];
        const Eigen::MatrixXd& db = deltas[2 * l + 1];
        if (dw.rows() != layers[l].weight.rows() || dw.cols() != layers[l].weight.cols() || db.size() != layers[l].bias.size())
            throw DimensionMismatch("apply_update: delta shape for layer " + std::to_string(l));
        layers[l].weight += dw;
        layers[l].bias += db.reshaped();
    }
}

namespace ad {

std::vector<Var> NetVars::all() const
{
    std::vector<Var> out;
    for (std::size_t l = 0; l < weights.size(); ++l) {
        out.push_back(weights[l]);
        out.push_back(biases[l]);
    }
    return out;
}

NetVars bind(Tape& tape, const PwaNetwork& net)
{
    NetVars v;
    for (const auto& ly : net.layers()) {
        v.weights.push_back(tape.variable(ly.weight));
        v.biases.push_back(tape.variable(ly.bias.transpose()));
    }
    return v;
}

Var forward(const PwaNetwork& net, const NetVars& vars, Var x)
{
    if (x.cols() != net.input_dim()) throw DimensionMismatch("tape forward: column count != input dim");
    Var h = x;
    const std::size_t depth = net.depth();
    for (std::size_t l = 0; l < depth; ++l) {
        h = add_row(matmul(h, transpose(vars.weights[l])), vars.biases[l]);
        if (l + 1 < depth) h = activation(h, net.activation());
    }
    return h;
}

Var jacobian(const PwaNetwork& net, const NetVars& vars, const Eigen::VectorXd& x)
{
    if (x.size() != net.input_dim()) throw DimensionMismatch("tape jacobian: input dimension");
    const auto& layers = net.layers();
    Var a = vars.weights[0];
    Eigen::VectorXd h = x;
    for (std::size_t l = 0; l + 1 < layers.size(); ++l) {
        const Eigen::Index width = layers[l].weight.rows();
        const Eigen::VectorXd pre = layers[l].weight * h + layers[l].bias;
        Eigen::VectorXd slope(width);
        for (Eigen::Index i = 0; i < width; ++i) slope(i) = net.activation().derivative(pre(i));
        h = pre.unaryExpr([&](double v) { return net.activation().apply(v); });
        // diag(slope)·A, then the next weight.
        a = hadamard_const(a, slope.replicate(1, a.cols()));
        a = matmul(vars.weights[l + 1], a);
    }
    return a;
}

} // namespace ad

} // namespace infolab
