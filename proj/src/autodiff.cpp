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

#include "infolab/autodiff.hpp"

#include <cmath>
#include <cstring>
#include <string>

#include "infolab/error.hpp"

namespace infolab::ad {

namespace {

void same_shape(const Matrix& a, const Matrix& b, const char* op)
{
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw DimensionMismatch(std::string(op) + ": " + std::to_string(a.rows()) + "x" + std::to_string(a.cols()) +
                                " vs " + std::to_string(b.rows()) + "x" + std::to_string(b.cols()));
}

Tape& tape_of(Var a)
{
    if (!a.valid()) throw InvalidArgument("operation on an unbound Var");
    return *a.tape();
}

Tape& tape_of(Var a, Var b)
{
    if (a.tape() != b.tape()) throw InvalidArgument("operands live on different tapes");
    return tape_of(a);
}

} // namespace

const Matrix& Var::value() const { return tape_->value(id_); }

double Var::scalar() const
{
    const Matrix& v = value();
    if (v.rows() != 1 || v.cols() != 1) throw DimensionMismatch("Var is not a scalar");
    return v(0, 0);
}

Var Tape::variable(Matrix value)
{
    Node n;
    n.value = std::move(value);
    n.leaf = true;
    nodes_.push_back(std::move(n));
    return Var(this, static_cast<int>(nodes_.size()) - 1);
}

Var Tape::constant(Matrix value)
{
    Var v = variable(std::move(value));
    nodes_.back().differentiable = false;
    return v;
}

Tape::Inputs Tape::inputs_of(const Node& n) const
{
    Inputs in;
    in.reserve(n.parents.size());
    for (int p : n.parents) in.push_back(&nodes_[static_cast<std::size_t>(p)].value);
    return in;
}

Var Tape::record(std::vector<Var> parents, ForwardRule forward, AdjointRule adjoint)
{
    Node n;
    n.parents.reserve(parents.size());
    bool any_diff = false;
    for (const Var& p : parents) {
        if (p.tape() != this) throw InvalidArgument("parent belongs to another tape");
        n.parents.push_back(p.id());
        any_diff = any_diff || nodes_[static_cast<std::size_t>(p.id())].differentiable;
    }
    n.differentiable = any_diff;
    n.value = forward(inputs_of(n));
    n.forward = std::move(forward);
    n.adjoint_rule = std::move(adjoint);
    nodes_.push_back(std::move(n));
    return Var(this, static_cast<int>(nodes_.size()) - 1);
}

void Tape::backward(Var root)
{
    if (root.tape() != this) throw InvalidArgument("root belongs to another tape");
    const Matrix& rv = value(root.id());
    if (rv.rows() != 1 || rv.cols() != 1)
        throw DimensionMismatch("backward needs a scalar root, got " + std::to_string(rv.rows()) + "x" +
                                std::to_string(rv.cols()));
    for (auto& n : nodes_) {
        n.has_adjoint = false;
        n.adjoint.resize(0, 0);
    }
    Node& r = nodes_[static_cast<std::size_t>(root.id())];
    r.adjoint = Matrix::Ones(1, 1);
    r.has_adjoint = true;
    for (int id = root.id(); id >= 0; --id) {
        Node& n = nodes_[static_cast<std::size_t>(id)];
        if (!n.has_adjoint || n.leaf || !n.differentiable) continue;
        std::vector<Matrix> contrib = n.adjoint_rule(n.adjoint, inputs_of(n), n.value);
        for (std::size_t k = 0; k < n.parents.size(); ++k) {
            if (k >= contrib.size() || contrib[k].size() == 0) continue;
            Node& p = nodes_[static_cast<std::size_t>(n.parents[k])];
            if (!p.differentiable) continue;
            if (p.has_adjoint) {
                p.adjoint += contrib[k];
            } else {
                p.adjoint = std::move(contrib[k]);
                p.has_adjoint = true;
            }
        }
    }
}

Matrix Tape::grad(Var v) const
{
    const Node& n = nodes_[static_cast<std::size_t>(v.id())];
    if (!n.has_adjoint) return Matrix::Zero(n.value.rows(), n.value.cols());
    return n.adjoint;
}

void Tape::set_leaf(Var leaf, Matrix value)
{
    Node& n = nodes_[static_cast<std::size_t>(leaf.id())];
    if (!n.leaf) throw InvalidArgument("set_leaf on a recorded node");
    same_shape(n.value, value, "set_leaf");
    n.value = std::move(value);
}

bool Tape::replay()
{
    bool identical = true;
    for (auto& n : nodes_) {
        if (n.leaf) continue;
        Matrix fresh = n.forward(inputs_of(n));
        if (fresh.rows() != n.value.rows() || fresh.cols() != n.value.cols() ||
            std::memcmp(fresh.data(), n.value.data(), sizeof(double) * static_cast<std::size_t>(fresh.size())) != 0)
            identical = false;
        n.value = std::move(fresh);
    }
    return identical;
}

std::vector<Matrix> grad(Tape& tape, Var root, const std::vector<Var>& wrt)
{
    tape.backward(root);
    std::vector<Matrix> out;
    out.reserve(wrt.size());
    for (const Var& v : wrt) out.push_back(tape.grad(v));
    return out;
}

Var add(Var a, Var b)
{
    same_shape(a.value(), b.value(), "add");
    return tape_of(a, b).record(
        {a, b}, [](const Tape::Inputs& in) -> Matrix { return *in[0] + *in[1]; },
        [](const Matrix& g, const Tape::Inputs&, const Matrix&) { return std::vector<Matrix>{g, g}; });
}

Var sub(Var a, Var b)
{
    same_shape(a.value(), b.value(), "sub");
    return tape_of(a, b).record(
        {a, b}, [](const Tape::Inputs& in) -> Matrix { return *in[0] - *in[1]; },
        [](const Matrix& g, const Tape::Inputs&, const Matrix&) { return std::vector<Matrix>{g, -g}; });
}

Var hadamard(Var a, Var b)
{
    same_shape(a.value(), b.value(), "hadamard");
    return tape_of(a, b).record(
        {a, b}, [](const Tape::Inputs& in) -> Matrix { return in[0]->cwiseProduct(*in[1]); },
        [](const Matrix& g, const Tape::Inputs& in, const Matrix&) {
            return std::vector<Matrix>{g.cwiseProduct(*in[1]), g.cwiseProduct(*in[0])};
        });
}

Var scale(Var a, double s)
{
    return tape_of(a).record(
        {a}, [s](const Tape::Inputs& in) -> Matrix { return s * *in[0]; },
        [s](const Matrix& g, const Tape::Inputs&, const Matrix&) { return std::vector<Matrix>{s * g}; });
}

Var add_scalar(Var a, double s)
{
    return tape_of(a).record(
        {a}, [s](const Tape::Inputs& in) -> Matrix { return in[0]->array() + s; },
        [](const Matrix& g, const Tape::Inputs&, const Matrix&) { return std::vector<Matrix>{g}; });
}

Var add_const(Var a, const Matrix& c)
{
    same_shape(a.value(), c, "add_const");
    return tape_of(a).record(
        {a}, [c](const Tape::Inputs& in) -> Matrix { return *in[0] + c; },
        [](const Matrix& g, const Tape::Inputs&, const Matrix&) { return std::vector<Matrix>{g}; });
}

Var hadamard_const(Var a, const Matrix& c)
{
    same_shape(a.value(), c, "hadamard_const");
    return tape_of(a).record(
        {a}, [c](const Tape::Inputs& in) -> Matrix { return in[0]->cwiseProduct(c); },
        [c](const Matrix& g, const Tape::Inputs&, const Matrix&) { return std::vector<Matrix>{g.cwiseProduct(c)}; });
}

Var matmul(Var a, Var b)
{
    if (a.cols() != b.rows())
        throw DimensionMismatch("matmul: inner dimensions " + std::to_string(a.cols()) + " vs " +
                                std::to_string(b.rows()));
    return tape_of(a, b).record(
        {a, b}, [](const Tape::Inputs& in) -> Matrix { return *in[0] * *in[1]; },
        [](const Matrix& g, const Tape::Inputs& in, const Matrix&) {
            return std::vector<Matrix>{g * in[1]->transpose(), in[0]->transpose() * g};
        });
}

Var transpose(Var a)
{
    return tape_of(a).record(
        {a}, [](const Tape::Inputs& in) -> Matrix { return in[0]->transpose(); },
        [](const Matrix& g, const Tape::Inputs&, const Matrix&) { return std::vector<Matrix>{g.transpose()}; });
}

Var add_row(Var a, Var r)
{
    if (r.rows() != 1 || r.cols() != a.cols()) throw DimensionMismatch("add_row: row vector shape");
    return tape_of(a, r).record(
        {a, r},
        [](const Tape::Inputs& in) -> Matrix {
            Matrix out = *in[0];
            out.rowwise() += in[1]->row(0);
            return out;
        },
        [](const Matrix& g, const Tape::Inputs&, const Matrix&) {
            return std::vector<Matrix>{g, g.colwise().sum()};
        });
}

Var col_mean(Var a)
{
    if (a.rows() < 1) throw DimensionMismatch("col_mean of empty matrix");
    return tape_of(a).record(
        {a}, [](const Tape::Inputs& in) -> Matrix { return in[0]->colwise().mean(); },
        [](const Matrix& g, const Tape::Inputs& in, const Matrix&) {
            const double n = static_cast<double>(in[0]->rows());
            Matrix da = (g / n).replicate(in[0]->rows(), 1);
            return std::vector<Matrix>{da};
        });
}

Var center_cols(Var a)
{
    return tape_of(a).record(
        {a},
        [](const Tape::Inputs& in) -> Matrix {
            Matrix out = *in[0];
            out.rowwise() -= in[0]->colwise().mean();
            return out;
        },
        [](const Matrix& g, const Tape::Inputs&, const Matrix&) {
            Matrix da = g;
            da.rowwise() -= g.colwise().mean();
            return std::vector<Matrix>{da};
        });
}

Var vstack(Var a, Var b)
{
    if (a.cols() != b.cols()) throw DimensionMismatch("vstack: column counts differ");
    return tape_of(a, b).record(
        {a, b},
        [](const Tape::Inputs& in) -> Matrix {
            Matrix out(in[0]->rows() + in[1]->rows(), in[0]->cols());
            out << *in[0], *in[1];
            return out;
        },
        [](const Matrix& g, const Tape::Inputs& in, const Matrix&) {
            return std::vector<Matrix>{g.topRows(in[0]->rows()), g.bottomRows(in[1]->rows())};
        });
}

Var sum(Var a)
{
    return tape_of(a).record(
        {a}, [](const Tape::Inputs& in) -> Matrix { return Matrix::Constant(1, 1, in[0]->sum()); },
        [](const Matrix& g, const Tape::Inputs& in, const Matrix&) {
            return std::vector<Matrix>{Matrix::Constant(in[0]->rows(), in[0]->cols(), g(0, 0))};
        });
}

Var mean(Var a)
{
    if (a.value().size() == 0) throw DimensionMismatch("mean of empty matrix");
    return scale(sum(a), 1.0 / static_cast<double>(a.value().size()));
}

Var square(Var a)
{
    return tape_of(a).record(
        {a}, [](const Tape::Inputs& in) -> Matrix { return in[0]->array().square(); },
        [](const Matrix& g, const Tape::Inputs& in, const Matrix&) {
            return std::vector<Matrix>{2.0 * g.cwiseProduct(*in[0])};
        });
}

Var sqrt(Var a)
{
    return tape_of(a).record(
        {a}, [](const Tape::Inputs& in) -> Matrix { return in[0]->array().sqrt(); },
        [](const Matrix& g, const Tape::Inputs&, const Matrix& out) {
            return std::vector<Matrix>{(g.array() / (2.0 * out.array())).matrix()};
        });
}

Var log(Var a)
{
    return tape_of(a).record(
        {a}, [](const Tape::Inputs& in) -> Matrix { return in[0]->array().log(); },
        [](const Matrix& g, const Tape::Inputs& in, const Matrix&) {
            return std::vector<Matrix>{(g.array() / in[0]->array()).matrix()};
        });
}

Var exp(Var a)
{
    return tape_of(a).record(
        {a}, [](const Tape::Inputs& in) -> Matrix { return in[0]->array().exp(); },
        [](const Matrix& g, const Tape::Inputs&, const Matrix& out) {
            return std::vector<Matrix>{g.cwiseProduct(out)};
        });
}

Var max_const(Var a, double c)
{
    return tape_of(a).record(
        {a}, [c](const Tape::Inputs& in) -> Matrix { return in[0]->array().max(c); },
        [c](const Matrix& g, const Tape::Inputs& in, const Matrix&) {
            Matrix da = (in[0]->array() > c).select(g, 0.0);
            return std::vector<Matrix>{da};
        });
}

Var activation(Var a, const Activation& act)
{
    return tape_of(a).record(
        {a}, [act](const Tape::Inputs& in) -> Matrix { return in[0]->unaryExpr([act](double v) { return act.apply(v); }); },
        [act](const Matrix& g, const Tape::Inputs& in, const Matrix&) {
            Matrix d = in[0]->unaryExpr([act](double v) { return act.derivative(v); });
            return std::vector<Matrix>{g.cwiseProduct(d)};
        });
}

Var logdet(Var a)
{
    if (a.rows() != a.cols()) throw DimensionMismatch("logdet of non-square matrix");
    return tape_of(a).record(
        {a},
        [](const Tape::Inputs& in) -> Matrix {
            Eigen::LLT<Matrix> llt(*in[0]);
            if (llt.info() != Eigen::Success) throw RankDeficientCovariance("logdet: Cholesky failed");
            const Matrix& l = llt.matrixLLT();
            double s = 0.0;
            for (Eigen::Index i = 0; i < l.rows(); ++i) s += std::log(l(i, i));
            return Matrix::Constant(1, 1, 2.0 * s);
        },
        [](const Matrix& g, const Tape::Inputs& in, const Matrix&) {
            Eigen::LLT<Matrix> llt(*in[0]);
            Matrix inv = llt.solve(Matrix::Identity(in[0]->rows(), in[0]->cols()));
            inv = 0.5 * (inv + inv.transpose());
            return std::vector<Matrix>{g(0, 0) * inv};
        });
}

Var row_logsumexp(Var a)
{
    return tape_of(a).record(
        {a},
        [](const Tape::Inputs& in) -> Matrix {
            const Matrix& x = *in[0];
            const Eigen::VectorXd top = x.rowwise().maxCoeff();
            const Eigen::VectorXd s = (x.colwise() - top).array().exp().rowwise().sum();
            return Matrix(top + s.array().log().matrix());
        },
        [](const Matrix& g, const Tape::Inputs& in, const Matrix& out) {
            const Matrix& x = *in[0];
            Matrix da = (x.colwise() - out.col(0)).array().exp();
            da = g.col(0).asDiagonal() * da;
            return std::vector<Matrix>{da};
        });
}

Var diag(Var a)
{
    if (a.rows() != a.cols()) throw DimensionMismatch("diag of non-square matrix");
    return tape_of(a).record(
        {a}, [](const Tape::Inputs& in) -> Matrix { return in[0]->diagonal(); },
        [](const Matrix& g, const Tape::Inputs& in, const Matrix&) {
            Matrix da = Matrix::Zero(in[0]->rows(), in[0]->cols());
            da.diagonal() = g.col(0);
            return std::vector<Matrix>{da};
        });
}

Var row_norms(Var a)
{
    return tape_of(a).record(
        {a}, [](const Tape::Inputs& in) -> Matrix { return in[0]->rowwise().norm(); },
        [](const Matrix& g, const Tape::Inputs& in, const Matrix& out) {
            const Matrix& x = *in[0];
            Matrix da = Matrix::Zero(x.rows(), x.cols());
            for (Eigen::Index i = 0; i < x.rows(); ++i)
                if (out(i, 0) > 0.0) da.row(i) = (g(i, 0) / out(i, 0)) * x.row(i);
            return std::vector<Matrix>{da};
        });
}

Var normalize_rows(Var a)
{
    const Eigen::VectorXd norms = a.value().rowwise().norm();
    for (Eigen::Index i = 0; i < norms.size(); ++i)
        if (!(norms(i) > 0.0)) throw InvalidArgument("normalize_rows: row " + std::to_string(i) + " has zero norm");
    return tape_of(a).record(
        {a},
        [](const Tape::Inputs& in) -> Matrix {
            Matrix out = *in[0];
            for (Eigen::Index i = 0; i < out.rows(); ++i) out.row(i) /= in[0]->row(i).norm();
            return out;
        },
        [](const Matrix& g, const Tape::Inputs& in, const Matrix& out) {
            const Matrix& x = *in[0];
            Matrix da(x.rows(), x.cols());
            for (Eigen::Index i = 0; i < x.rows(); ++i) {
                const double n = x.row(i).norm();
                da.row(i) = (g.row(i) - out.row(i).dot(g.row(i)) * out.row(i)) / n;
            }
            return std::vector<Matrix>{da};
        });
}

Var pairwise_sq_dists(Var a)
{
    return tape_of(a).record(
        {a},
        [](const Tape::Inputs& in) -> Matrix {
            // ‖xᵢ‖² + ‖xⱼ‖² − 2⟨xᵢ, xⱼ⟩, clamped at 0 with an exact zero diagonal.
            const Matrix& x = *in[0];
            const Eigen::VectorXd sq = x.rowwise().squaredNorm();
            Matrix d = -2.0 * (x * x.transpose());
            d.colwise() += sq;
            d.rowwise() += sq.transpose();
            d = d.cwiseMax(0.0);
            d.diagonal().setZero();
            return d;
        },
        [](const Matrix& g, const Tape::Inputs& in, const Matrix&) {
            const Matrix& x = *in[0];
            const Matrix s = g + g.transpose();
            Matrix da = 2.0 * (s.rowwise().sum().asDiagonal() * x - s * x);
            return std::vector<Matrix>{da};
        });
}

} // namespace infolab::ad
