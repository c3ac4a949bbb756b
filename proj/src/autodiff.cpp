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

#include "trajbench/autodiff.hpp"

#include <cassert>
#include <stdexcept>

namespace trajbench::ad
{

std::size_t ParameterSet::scalar_count() const
{
  std::size_t n = 0;
  for (const auto & v : values) {
    n += static_cast<std::size_t>(v.size());
  }
  return n;
}

std::size_t ParameterSet::index_of(const std::string & name) const
{
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (names[i] == name) {
      return i;
    }
  }
  throw std::out_of_range("no parameter named '" + name + "'");
}

std::size_t ParameterSet::add(std::string name, Matrix value)
{
  names.push_back(std::move(name));
  values.push_back(std::move(value));
  return values.size() - 1;
}

Var Tape::constant(Matrix value)
{
  nodes_.push_back(Node{std::move(value), {}, false, -1, {}});
  return Var{static_cast<std::int32_t>(nodes_.size() - 1)};
}

Var Tape::parameter(std::size_t slot, const Matrix & value)
{
  nodes_.push_back(Node{value, {}, record_, static_cast<std::int64_t>(slot), {}});
  return Var{static_cast<std::int32_t>(nodes_.size() - 1)};
}

std::vector<Var> Tape::parameters(const ParameterSet & params)
{
  std::vector<Var> vars;
  vars.reserve(params.size());
  for (std::size_t i = 0; i < params.size(); ++i) {
    vars.push_back(parameter(i, params.values[i]));
  }
  return vars;
}

Var Tape::push(Matrix value, bool needs_grad, BackwardFn backward)
{
  const bool track = record_ && needs_grad;
  nodes_.push_back(Node{std::move(value), {}, track, -1, track ? std::move(backward) : BackwardFn{}});
  return Var{static_cast<std::int32_t>(nodes_.size() - 1)};
}

void Tape::accumulate(Var target, const Matrix & g)
{
  auto & node = nodes_[target.index];
  if (!node.needs_grad) {
    return;
  }
  if (node.grad.size() == 0) {
    node.grad = g;
  } else {
    node.grad += g;
  }
}

void Tape::backward(Var root)
{
  if (!record_) {
    throw std::logic_error("backward on a tape that does not record gradients");
  }
  auto & r = nodes_[root.index];
  if (r.value.rows() != 1 || r.value.cols() != 1) {
    throw std::logic_error("backward root must be a scalar");
  }
  if (!r.needs_grad) {
    return;
  }
  r.grad = Matrix::Ones(1, 1);
  for (auto i = static_cast<std::int32_t>(nodes_.size()) - 1; i >= 0; --i) {
    auto & node = nodes_[i];
    if (node.grad.size() == 0 || !node.backward) {
      continue;
    }
    node.backward(*this, i);
  }
}

std::vector<Matrix> Tape::parameter_gradients(const ParameterSet & params) const
{
  std::vector<Matrix> grads;
  grads.reserve(params.size());
  for (const auto & v : params.values) {
    grads.push_back(Matrix::Zero(v.rows(), v.cols()));
  }
  for (const auto & node : nodes_) {
    if (node.slot >= 0 && node.grad.size() != 0) {
      grads[static_cast<std::size_t>(node.slot)] += node.grad;
    }
  }
  return grads;
}

Var matmul(Tape & tape, Var a, Var b)
{
  Matrix out = tape.value(a) * tape.value(b);
  return tape.push(
    std::move(out), tape.needs_grad(a) || tape.needs_grad(b), [a, b](Tape & t, std::int32_t self) {
      const auto & g = t.grad(self);
      if (t.needs_grad(a)) {
        t.accumulate(a, g * t.value(b).transpose());
      }
      if (t.needs_grad(b)) {
        t.accumulate(b, t.value(a).transpose() * g);
      }
    });
}

Var linear(Tape & tape, Var w, Var x, Var b)
{
  Matrix out = tape.value(w) * tape.value(x);
  out.colwise() += tape.value(b).col(0);
  const bool ng = tape.needs_grad(w) || tape.needs_grad(x) || tape.needs_grad(b);
  return tape.push(std::move(out), ng, [w, x, b](Tape & t, std::int32_t self) {
    const auto & g = t.grad(self);
    if (t.needs_grad(w)) {
      t.accumulate(w, g * t.value(x).transpose());
    }
    if (t.needs_grad(x)) {
      t.accumulate(x, t.value(w).transpose() * g);
    }
    if (t.needs_grad(b)) {
      t.accumulate(b, g.rowwise().sum());
    }
  });
}

Var add(Tape & tape, Var a, Var b)
{
  Matrix out = tape.value(a) + tape.value(b);
  return tape.push(
    std::move(out), tape.needs_grad(a) || tape.needs_grad(b), [a, b](Tape & t, std::int32_t self) {
      t.accumulate(a, t.grad(self));
      t.accumulate(b, t.grad(self));
    });
}

Var add_scaled(Tape & tape, Var a, Var b, double s)
{
  Matrix out = tape.value(a) + s * tape.value(b);
  return tape.push(
    std::move(out), tape.needs_grad(a) || tape.needs_grad(b), [a, b, s](Tape & t, std::int32_t self) {
      t.accumulate(a, t.grad(self));
      if (t.needs_grad(b)) {
        t.accumulate(b, s * t.grad(self));
      }
    });
}

Var scale(Tape & tape, Var a, double s)
{
  Matrix out = s * tape.value(a);
  return tape.push(std::move(out), tape.needs_grad(a), [a, s](Tape & t, std::int32_t self) {
    t.accumulate(a, s * t.grad(self));
  });
}

Var mul(Tape & tape, Var a, Var b)
{
  Matrix out = tape.value(a).cwiseProduct(tape.value(b));
  return tape.push(
    std::move(out), tape.needs_grad(a) || tape.needs_grad(b), [a, b](Tape & t, std::int32_t self) {
      const auto & g = t.grad(self);
      if (t.needs_grad(a)) {
        t.accumulate(a, g.cwiseProduct(t.value(b)));
      }
      if (t.needs_grad(b)) {
        t.accumulate(b, g.cwiseProduct(t.value(a)));
      }
    });
}

Var tanh(Tape & tape, Var a)
{
  Matrix out = tape.value(a).array().tanh().matrix();
  return tape.push(std::move(out), tape.needs_grad(a), [a](Tape & t, std::int32_t self) {
    const auto & y = t.value(Var{self});
    t.accumulate(a, (t.grad(self).array() * (1.0 - y.array().square())).matrix());
  });
}

namespace
{

Matrix logistic(const Matrix & z) { return (1.0 / (1.0 + (-z.array()).exp())).matrix(); }

}  // namespace

Var sigmoid(Tape & tape, Var a)
{
  Matrix out = logistic(tape.value(a));
  return tape.push(std::move(out), tape.needs_grad(a), [a](Tape & t, std::int32_t self) {
    const auto & y = t.value(Var{self});
    t.accumulate(a, (t.grad(self).array() * y.array() * (1.0 - y.array())).matrix());
  });
}

Var concat_rows(Tape & tape, std::span<const Var> parts)
{
  Eigen::Index rows = 0;
  const Eigen::Index cols = tape.value(parts.front()).cols();
  bool ng = false;
  for (const auto p : parts) {
    rows += tape.value(p).rows();
    ng = ng || tape.needs_grad(p);
  }
  Matrix out(rows, cols);
  Eigen::Index r = 0;
  for (const auto p : parts) {
    const auto & v = tape.value(p);
    out.middleRows(r, v.rows()) = v;
    r += v.rows();
  }
  std::vector<Var> inputs(parts.begin(), parts.end());
  return tape.push(std::move(out), ng, [inputs](Tape & t, std::int32_t self) {
    const auto & g = t.grad(self);
    Eigen::Index offset = 0;
    for (const auto p : inputs) {
      const auto n = t.value(p).rows();
      if (t.needs_grad(p)) {
        t.accumulate(p, g.middleRows(offset, n));
      }
      offset += n;
    }
  });
}

Var slice_rows(Tape & tape, Var a, Eigen::Index start, Eigen::Index count)
{
  Matrix out = tape.value(a).middleRows(start, count);
  return tape.push(std::move(out), tape.needs_grad(a), [a, start, count](Tape & t, std::int32_t self) {
    const auto & v = t.value(a);
    Matrix g = Matrix::Zero(v.rows(), v.cols());
    g.middleRows(start, count) = t.grad(self);
    t.accumulate(a, g);
  });
}

Var slice_cols(Tape & tape, Var a, Eigen::Index start, Eigen::Index count)
{
  Matrix out = tape.value(a).middleCols(start, count);
  return tape.push(std::move(out), tape.needs_grad(a), [a, start, count](Tape & t, std::int32_t self) {
    const auto & v = t.value(a);
    Matrix g = Matrix::Zero(v.rows(), v.cols());
    g.middleCols(start, count) = t.grad(self);
    t.accumulate(a, g);
  });
}

Var sum(Tape & tape, Var a)
{
  Matrix out(1, 1);
  out(0, 0) = tape.value(a).sum();
  return tape.push(std::move(out), tape.needs_grad(a), [a](Tape & t, std::int32_t self) {
    const auto & v = t.value(a);
    t.accumulate(a, Matrix::Constant(v.rows(), v.cols(), t.grad(self)(0, 0)));
  });
}

Var affine2(Tape & tape, Var w1, Var x1, Var w2, Var x2, Var b)
{
  Matrix out = tape.value(w1) * tape.value(x1);
  out.noalias() += tape.value(w2) * tape.value(x2);
  out.colwise() += tape.value(b).col(0);
  const bool ng = tape.needs_grad(w1) || tape.needs_grad(x1) || tape.needs_grad(w2) ||
                  tape.needs_grad(x2) || tape.needs_grad(b);
  return tape.push(std::move(out), ng, [w1, x1, w2, x2, b](Tape & t, std::int32_t self) {
    const auto & g = t.grad(self);
    if (t.needs_grad(w1)) {
      t.accumulate(w1, g * t.value(x1).transpose());
    }
    if (t.needs_grad(x1)) {
      t.accumulate(x1, t.value(w1).transpose() * g);
    }
    if (t.needs_grad(w2)) {
      t.accumulate(w2, g * t.value(x2).transpose());
    }
    if (t.needs_grad(x2)) {
      t.accumulate(x2, t.value(w2).transpose() * g);
    }
    if (t.needs_grad(b)) {
      t.accumulate(b, g.rowwise().sum());
    }
  });
}

LstmState lstm_cell(Tape & tape, Var gates, Var cell)
{
  const Eigen::Index h = tape.value(cell).rows();
  assert(tape.value(gates).rows() == 4 * h);
  const bool ng = tape.needs_grad(gates) || tape.needs_grad(cell);

  // c = f * c_prev + i * g
  Matrix c_value;
  {
    const auto & z = tape.value(gates);
    const Matrix i = logistic(z.middleRows(0, h));
    const Matrix f = logistic(z.middleRows(h, h));
    c_value = f.cwiseProduct(tape.value(cell)) +
              i.cwiseProduct(z.middleRows(2 * h, h).array().tanh().matrix());
  }
  const Var c = tape.push(std::move(c_value), ng, [gates, cell, h](Tape & t, std::int32_t self) {
    const auto & z = t.value(gates);
    const auto & dc = t.grad(self);
    const Matrix i = logistic(z.middleRows(0, h));
    const Matrix f = logistic(z.middleRows(h, h));
    const Matrix g = z.middleRows(2 * h, h).array().tanh().matrix();
    if (t.needs_grad(gates)) {
      Matrix dz = Matrix::Zero(4 * h, z.cols());
      dz.middleRows(0, h) = (dc.array() * g.array() * i.array() * (1.0 - i.array())).matrix();
      dz.middleRows(h, h) =
        (dc.array() * t.value(cell).array() * f.array() * (1.0 - f.array())).matrix();
      dz.middleRows(2 * h, h) = (dc.array() * i.array() * (1.0 - g.array().square())).matrix();
      t.accumulate(gates, dz);
    }
    if (t.needs_grad(cell)) {
      t.accumulate(cell, dc.cwiseProduct(f));
    }
  });

  // h = o * tanh(c)
  Matrix h_value =
    logistic(tape.value(gates).middleRows(3 * h, h)).cwiseProduct(tape.value(c).array().tanh().matrix());
  const Var hv = tape.push(std::move(h_value), ng, [gates, c, h](Tape & t, std::int32_t self) {
    const auto & z = t.value(gates);
    const auto & dh = t.grad(self);
    const Matrix o = logistic(z.middleRows(3 * h, h));
    const Matrix tc = t.value(c).array().tanh().matrix();
    if (t.needs_grad(gates)) {
      Matrix dz = Matrix::Zero(4 * h, z.cols());
      dz.middleRows(3 * h, h) = (dh.array() * tc.array() * o.array() * (1.0 - o.array())).matrix();
      t.accumulate(gates, dz);
    }
    if (t.needs_grad(c)) {
      t.accumulate(c, (dh.array() * o.array() * (1.0 - tc.array().square())).matrix());
    }
  });
  return {hv, c};
}

Var group_max(Tape & tape, Var x, std::span<const std::int32_t> group, Eigen::Index groups)
{
  const auto & v = tape.value(x);
  assert(static_cast<Eigen::Index>(group.size()) == v.cols());
  const Eigen::Index rows = v.rows();
  Matrix out = Matrix::Zero(rows, groups);
  // argmax column per (row, group); -1 when the group is empty
  std::vector<std::int32_t> arg(static_cast<std::size_t>(rows * groups), -1);
  for (Eigen::Index j = 0; j < v.cols(); ++j) {
    const auto g = group[static_cast<std::size_t>(j)];
    if (g < 0) {
      continue;
    }
    for (Eigen::Index r = 0; r < rows; ++r) {
      auto & a = arg[static_cast<std::size_t>(g * rows + r)];
      if (a < 0 || v(r, j) > out(r, g)) {
        out(r, g) = v(r, j);
        a = static_cast<std::int32_t>(j);
      }
    }
  }
  auto & decisions = tape.decisions();
  decisions.insert(decisions.end(), arg.begin(), arg.end());
  const Eigen::Index cols = v.cols();
  return tape.push(
    std::move(out), tape.needs_grad(x),
    [x, arg = std::move(arg), rows, groups, cols](Tape & t, std::int32_t self) {
      const auto & g = t.grad(self);
      Matrix dx = Matrix::Zero(rows, cols);
      for (Eigen::Index gi = 0; gi < groups; ++gi) {
        for (Eigen::Index r = 0; r < rows; ++r) {
          const auto a = arg[static_cast<std::size_t>(gi * rows + r)];
          if (a >= 0) {
            dx(r, a) += g(r, gi);
          }
        }
      }
      t.accumulate(x, dx);
    });
}

}  // namespace trajbench::ad
