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
#include "trajbench/training.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

namespace trajbench
{
namespace
{

using ad::Matrix;
using ad::Tape;
using ad::Var;

Matrix random_matrix(std::mt19937_64 & rng, Eigen::Index rows, Eigen::Index cols)
{
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) {
    m.data()[i] = u(rng);
  }
  return m;
}

// Reduces a node to a scalar through a fixed random weighting so that every
// entry of the gradient is exercised.
Var weighted_sum(Tape & tape, Var x, std::uint64_t seed)
{
  std::mt19937_64 rng(seed);
  const auto & v = tape.value(x);
  const Var w = tape.constant(random_matrix(rng, v.rows(), v.cols()));
  return ad::sum(tape, ad::mul(tape, x, w));
}

class OpGradients : public ::testing::Test
{
protected:
  void SetUp() override
  {
    std::mt19937_64 rng(17);
    params_.add("a", random_matrix(rng, 4, 3));
    params_.add("b", random_matrix(rng, 4, 3));
    params_.add("w", random_matrix(rng, 5, 4));
    params_.add("bias", random_matrix(rng, 5, 1));
    params_.add("gates", random_matrix(rng, 12, 3));
    params_.add("cell", random_matrix(rng, 3, 3));
  }

  void expect_exact_gradients(const LossBuilder & loss, double tol = 1e-7)
  {
    const auto r = grad_check(params_, loss);
    EXPECT_FALSE(r.tie);
    EXPECT_GT(r.checked, 0u);
    EXPECT_LT(r.max_relative_error, tol);
  }

  ad::ParameterSet params_;
};

TEST_F(OpGradients, LinearOps)
{
  expect_exact_gradients([](Tape & t, std::span<const Var> p) {
    const Var l = ad::linear(t, p[2], p[0], p[3]);
    const Var m = ad::matmul(t, p[2], ad::add_scaled(t, p[0], p[1], -0.5));
    const Var s = ad::scale(t, ad::add(t, l, m), 1.5);
    const Var a = ad::affine2(t, p[2], p[0], p[2], p[1], p[3]);
    return ad::add(t, weighted_sum(t, s, 1), weighted_sum(t, a, 2));
  });
}

TEST_F(OpGradients, Nonlinearities)
{
  expect_exact_gradients(
    [](Tape & t, std::span<const Var> p) {
      const Var x = ad::mul(t, ad::tanh(t, p[0]), ad::sigmoid(t, p[1]));
      return weighted_sum(t, x, 3);
    },
    1e-6);
}

TEST_F(OpGradients, SlicingAndConcatenation)
{
  expect_exact_gradients([](Tape & t, std::span<const Var> p) {
    const Var parts[] = {ad::slice_rows(t, p[0], 1, 2), p[1], ad::slice_cols(t, p[3], 0, 1)};
    const Var top = ad::concat_rows(t, {parts, 2});
    const Var col = ad::slice_cols(t, top, 1, 2);
    return ad::add(t, weighted_sum(t, col, 4), weighted_sum(t, parts[2], 5));
  });
}

TEST_F(OpGradients, LstmCell)
{
  expect_exact_gradients(
    [](Tape & t, std::span<const Var> p) {
      const auto s = ad::lstm_cell(t, p[4], p[5]);
      return ad::add(t, weighted_sum(t, s.h, 6), weighted_sum(t, s.c, 7));
    },
    1e-6);
}

TEST_F(OpGradients, GroupMax)
{
  expect_exact_gradients([](Tape & t, std::span<const Var> p) {
    const std::int32_t group[] = {1, 0, 1};
    const Var m = ad::group_max(t, p[0], group, 3);
    EXPECT_TRUE(t.value(m).col(2).isZero());
    return weighted_sum(t, m, 8);
  });
}

TEST(Tape, LstmCellForwardValues)
{
  Tape tape(false);
  Matrix gates(4, 1);
  gates << 0.5, -1.0, 0.25, 2.0;
  const Var g = tape.constant(gates);
  const Var c = tape.constant(Matrix::Constant(1, 1, 0.3));
  const auto s = ad::lstm_cell(tape, g, c);
  const auto sig = [](double x) { return 1.0 / (1.0 + std::exp(-x)); };
  const double cell = sig(-1.0) * 0.3 + sig(0.5) * std::tanh(0.25);
  EXPECT_NEAR(tape.value(s.c)(0, 0), cell, 1e-15);
  EXPECT_NEAR(tape.value(s.h)(0, 0), sig(2.0) * std::tanh(cell), 1e-15);
}

TEST(Tape, UnusedParametersGetZeroGradient)
{
  ad::ParameterSet params;
  params.add("used", Matrix::Constant(2, 2, 1.0));
  params.add("unused", Matrix::Constant(3, 1, 1.0));
  Tape tape;
  const auto leaves = tape.parameters(params);
  tape.backward(ad::sum(tape, ad::scale(tape, leaves[0], 2.0)));
  const auto grads = tape.parameter_gradients(params);
  EXPECT_EQ(grads[0], Matrix::Constant(2, 2, 2.0));
  EXPECT_EQ(grads[1], Matrix::Zero(3, 1));
  EXPECT_EQ(params.scalar_count(), 7u);
  EXPECT_EQ(params.index_of("unused"), 1u);
}

TEST(Tape, SharedNodeAccumulates)
{
  ad::ParameterSet params;
  params.add("x", Matrix::Constant(1, 1, 3.0));
  Tape tape;
  const auto x = tape.parameters(params)[0];
  tape.backward(ad::sum(tape, ad::mul(tape, x, x)));
  EXPECT_EQ(tape.parameter_gradients(params)[0](0, 0), 6.0);
}

}  // namespace
}  // namespace trajbench
