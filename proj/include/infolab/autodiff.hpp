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

#ifndef INFOLAB_AUTODIFF_HPP_
#define INFOLAB_AUTODIFF_HPP_

#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "infolab/activation.hpp"

/**
 * Minimal reverse-mode automatic differentiation over dense matrices.
 *
 * A Tape records every primitive in evaluation order. Each node keeps its
 * value, its parents, a forward rule (used by replay) and an adjoint rule.
 * Scalars are 1×1 matrices. Tapes are single-use per loss evaluation and are
 * not shared across threads.
 */
namespace infolab::ad {

using Matrix = Eigen::MatrixXd;

class Tape;

/// Handle to a node on a tape. Cheap to copy; valid while the tape lives.
class Var {
public:
    Var() = default;
    Var(Tape* tape, int id) : tape_(tape), id_(id) {}

    Tape* tape() const { return tape_; }
    int id() const { return id_; }
    bool valid() const { return tape_ != nullptr && id_ >= 0; }

    const Matrix& value() const;
    double scalar() const;
    Eigen::Index rows() const { return value().rows(); }
    Eigen::Index cols() const { return value().cols(); }

private:
    Tape* tape_ = nullptr;
    int id_ = -1;
};

class Tape {
public:
    using Inputs = std::vector<const Matrix*>;
    using ForwardRule = std::function<Matrix(const Inputs&)>;
    /// Returns one adjoint contribution per parent (empty matrix = none).
    using AdjointRule = std::function<std::vector<Matrix>(const Matrix& adjoint, const Inputs&, const Matrix& out)>;

    Tape() = default;
    Tape(const Tape&) = delete;
    Tape& operator=(const Tape&) = delete;

    /// Differentiable leaf.
    Var variable(Matrix value);
    /// Leaf excluded from differentiation.
    Var constant(Matrix value);
    Var record(std::vector<Var> parents, ForwardRule forward, AdjointRule adjoint);

    const Matrix& value(int id) const { return nodes_[static_cast<std::size_t>(id)].value; }
    std::size_t size() const { return nodes_.size(); }

    /// Reverse sweep from a scalar root. Clears adjoints from any earlier sweep.
    void backward(Var root);
    /// Adjoint of v after backward(); zeros when v did not influence the root.
    Matrix grad(Var v) const;

    /// Overwrite a leaf value (shape must match); call replay() to propagate.
    void set_leaf(Var leaf, Matrix value);
    /// Re-evaluates every recorded node from its parents. Returns true when
    /// each recomputed value is bitwise identical to the stored one; stored
    /// values are then refreshed.
    bool replay();

private:
    struct Node {
        Matrix value;
        Matrix adjoint;
        bool has_adjoint = false;
        bool leaf = false;
        bool differentiable = true;
        std::vector<int> parents;
        ForwardRule forward;
        AdjointRule adjoint_rule;
    };

    Inputs inputs_of(const Node& n) const;

    std::vector<Node> nodes_;
};

/// Runs the reverse sweep and returns gradients of `root` for each of `wrt`.
std::vector<Matrix> grad(Tape& tape, Var root, const std::vector<Var>& wrt);

// Elementwise / structural primitives. Shapes are checked; mismatches throw DimensionMismatch.
Var add(Var a, Var b);
Var sub(Var a, Var b);
Var hadamard(Var a, Var b);
Var scale(Var a, double s);
Var add_scalar(Var a, double s);
Var add_const(Var a, const Matrix& c);
Var hadamard_const(Var a, const Matrix& c);
Var matmul(Var a, Var b);
Var transpose(Var a);
/// a (n×k) plus row vector r (1×k) broadcast down the rows.
Var add_row(Var a, Var r);
Var col_mean(Var a);
/// a minus its column means.
Var center_cols(Var a);
Var vstack(Var a, Var b);
Var sum(Var a);
Var mean(Var a);
Var square(Var a);
Var sqrt(Var a);
Var log(Var a);
Var exp(Var a);
/// Elementwise max(a, c); the adjoint flows only where a > c strictly.
Var max_const(Var a, double c);
Var activation(Var a, const Activation& act);
/// log det of an SPD matrix through its Cholesky factor.
Var logdet(Var a);
/// Column vector of per-row log-sum-exp.
Var row_logsumexp(Var a);
/// Column vector holding the diagonal of a square matrix.
Var diag(Var a);
/// Column vector of per-row Euclidean norms.
Var row_norms(Var a);
/// Rows scaled to unit Euclidean norm; zero rows throw InvalidArgument.
Var normalize_rows(Var a);
/// n×n matrix of squared Euclidean distances between rows.
Var pairwise_sq_dists(Var a);

inline Var operator+(Var a, Var b) { return add(a, b); }
inline Var operator-(Var a, Var b) { return sub(a, b); }
inline Var operator*(double s, Var a) { return scale(a, s); }
inline Var operator*(Var a, double s) { return scale(a, s); }

} // namespace infolab::ad

#endif // INFOLAB_AUTODIFF_HPP_
