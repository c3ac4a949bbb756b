// Copyright 2026 The trajbench Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef TRAJBENCH__AUTODIFF_HPP_
#define TRAJBENCH__AUTODIFF_HPP_

#include <Eigen/Core>

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

/// Minimal matrix-valued reverse-mode differentiation.
///
/// Every node holds a dense matrix; columns index batch samples. Nodes are
/// appended in evaluation order and `Tape::backward` walks them in reverse.
namespace trajbench::ad
{

using Matrix = Eigen::MatrixXd;

struct Var
{
  std::int32_t index{-1};
};

/// Named trainable tensors.
struct ParameterSet
{
  std::vector<std::string> names;
  std::vector<Matrix> values;

  std::size_t size() const { return values.size(); }
  std::size_t scalar_count() const;
  std::size_t index_of(const std::string & name) const;
  const Matrix & operator[](const std::string & name) const { return values[index_of(name)]; }
  std::size_t add(std::string name, Matrix value);
};

class Tape
{
public:
  using BackwardFn = std::function<void(Tape &, std::int32_t)>;

  explicit Tape(bool record_gradients = true) : record_(record_gradients) {}

  bool recording() const { return record_; }

  Var constant(Matrix value);
  // Leaf bound to slot `slot` of a ParameterSet.
  Var parameter(std::size_t slot, const Matrix & value);
  // Leaves for every tensor of the set, in slot order.
  std::vector<Var> parameters(const ParameterSet & params);

  const Matrix & value(Var v) const { return nodes_[v.index].value; }
  bool needs_grad(Var v) const { return nodes_[v.index].needs_grad; }

  // Appends an op node. `backward` receives the tape and the node index; it
  // reads `grad(node)` and calls `accumulate` on its inputs.
  Var push(Matrix value, bool needs_grad, BackwardFn backward);

  const Matrix & grad(std::int32_t node) const { return nodes_[node].grad; }
  void accumulate(Var target, const Matrix & g);

  // Seeds d(root)/d(root) = 1 for a 1x1 root and propagates to all leaves.
  void backward(Var root);

  // Gradients of parameter leaves after backward(), zero-filled when unused.
  std::vector<Matrix> parameter_gradients(const ParameterSet & params) const;

  // Discrete choices (argmax/argmin) made during evaluation, in order. Used to
  // detect non-differentiable switching points.
  std::vector<std::int32_t> & decisions() { return decisions_; }
  const std::vector<std::int32_t> & decisions() const { return decisions_; }

  // Set by ops that hit a non-differentiable tie (e.g. equal WTA modes).
  void mark_ambiguous() { ambiguous_ = true; }
  bool ambiguous() const { return ambiguous_; }

  std::size_t size() const { return nodes_.size(); }

private:
  struct Node
  {
    Matrix value;
    Matrix grad;
    bool needs_grad{false};
    std::int64_t slot{-1};
    BackwardFn backward;
  };

  bool record_;
  std::vector<Node> nodes_;
  std::vector<std::int32_t> decisions_;
  bool ambiguous_{false};
};

Var matmul(Tape & tape, Var a, Var b);
// w * x + b with b broadcast over columns.
Var linear(Tape & tape, Var w, Var x, Var b);
Var add(Tape & tape, Var a, Var b);
// a + s * b
Var add_scaled(Tape & tape, Var a, Var b, double s);
Var scale(Tape & tape, Var a, double s);
Var mul(Tape & tape, Var a, Var b);
Var tanh(Tape & tape, Var a);
Var sigmoid(Tape & tape, Var a);
Var concat_rows(Tape & tape, std::span<const Var> parts);
Var slice_rows(Tape & tape, Var a, Eigen::Index start, Eigen::Index count);
Var slice_cols(Tape & tape, Var a, Eigen::Index start, Eigen::Index count);
// Sum of all entries as a 1x1 node.
Var sum(Tape & tape, Var a);

// w1 * x1 + w2 * x2 + b with b broadcast over columns.
Var affine2(Tape & tape, Var w1, Var x1, Var w2, Var x2, Var b);

struct LstmState
{
  Var h;
  Var c;
};

// LSTM cell. `gates` stacks the input, forget, candidate and output
// pre-activations (4H x B); `cell` is the previous memory cell (H x B).
LstmState lstm_cell(Tape & tape, Var gates, Var cell);

// Column-group max pooling: output column g is the row-wise max over input
// columns j with group[j] == g. Groups with no member produce zeros.
Var group_max(Tape & tape, Var x, std::span<const std::int32_t> group, Eigen::Index groups);

}  // namespace trajbench::ad

#endif  // TRAJBENCH__AUTODIFF_HPP_
