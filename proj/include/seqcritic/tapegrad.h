// seqcritic/tapegrad.h

// Copyright 2026 The seqcritic Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SEQCRITIC_TAPEGRAD_H_
#define SEQCRITIC_TAPEGRAD_H_

// A small reverse-mode differentiation engine: enough dense ops for an LSTM
// decoder with a softmax output. Values are row-major double matrices; a
// row vector is a 1 x n matrix.
//
// Usage:
//   Tape tape(/*training=*/true);
//   Var w = tape.Param(params, params.Index("out.w"));
//   Var loss = tape.SoftmaxXent(tape.MatMul(h, w), targets);
//   tape.Backward(loss);            // += into params' gradient buffers
//
// A tape records one forward pass and supports exactly one backward pass.
// Parameter leaves reference the ParameterSet's weights without copying,
// so weights must not change while a tape that uses them is alive.

#include <cstdint>
#include <memory>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "seqcritic/token.h"

namespace seqcritic {

using Matrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using RowVector = Eigen::Matrix<double, 1, Eigen::Dynamic>;

struct Parameter {
  std::string name;
  Matrix value;
  Matrix grad;
};

// Shadow gradient storage shaped like a ParameterSet, so per-thread tapes
// can accumulate without touching the shared buffers.
struct GradientBuffer {
  std::vector<Matrix> grads;

  void SetZero();
  void Add(const GradientBuffer& other);
  bool AllFinite() const;
};

class ParameterSet {
 public:
  ParameterSet() = default;
  ParameterSet(const ParameterSet& other);
  ParameterSet& operator=(const ParameterSet& other);
  ParameterSet(ParameterSet&&) noexcept = default;
  ParameterSet& operator=(ParameterSet&&) noexcept = default;

  // Registers a zero-initialized weight; names are unique.
  Parameter& Add(const std::string& name, int rows, int cols);

  std::size_t size() const { return params_.size(); }
  std::size_t Index(const std::string& name) const;
  bool Contains(const std::string& name) const;
  Parameter& at(std::size_t i) { return *params_[i]; }
  const Parameter& at(std::size_t i) const { return *params_[i]; }
  Parameter& Get(const std::string& name) { return at(Index(name)); }
  const Parameter& Get(const std::string& name) const { return at(Index(name)); }

  void ZeroGrad();
  GradientBuffer MakeGradientBuffer() const;
  void AccumulateGrad(const GradientBuffer& buffer);
  std::size_t NumWeights() const;
  bool GradFinite() const;

 private:
  // unique_ptr keeps Parameter addresses stable for tapes holding pointers.
  std::vector<std::unique_ptr<Parameter>> params_;
};

class Tape;

// Handle to a node on a tape.
class Var {
 public:
  Var() = default;
  const Matrix& value() const;
  int rows() const { return static_cast<int>(value().rows()); }
  int cols() const { return static_cast<int>(value().cols()); }
  double scalar() const { return value()(0, 0); }
  int id() const { return id_; }

 private:
  friend class Tape;
  Var(Tape* tape, int id) : tape_(tape), id_(id) {}
  Tape* tape_ = nullptr;
  int id_ = -1;
};

class Tape {
 public:
  explicit Tape(bool training = false) : training_(training) {}
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  bool training() const { return training_; }

  Var Constant(Matrix value);
  // Differentiable leaf whose gradient is readable via Grad() after Backward.
  Var Input(Matrix value);
  Var Param(ParameterSet& params, std::size_t index);

  Var MatMul(Var a, Var b);
  // Elementwise sum; `b` may also be a 1 x n row broadcast over a's rows.
  Var Add(Var a, Var b);
  Var Sub(Var a, Var b);
  Var Mul(Var a, Var b);
  Var Scale(Var a, double c);
  Var Sigmoid(Var a);
  Var Tanh(Var a);
  Var SliceCols(Var a, int begin, int count);
  Var ConcatCols(Var a, Var b);
  Var SliceRows(Var a, int begin, int count);
  // Stacks same-width row blocks vertically.
  Var StackRows(std::span<const Var> parts);
  Var SumAll(Var a);
  // Rows `ids` of an embedding table, one output row per id.
  Var Embed(Var table, std::span<const Token> ids);
  // Inverted dropout; identity outside training mode or when p == 0.
  Var Dropout(Var a, double p, std::mt19937_64& rng);
  // sum_i w_i * -log softmax(logits_i)[targets_i], a 1 x 1 result. Empty
  // `weights` means all ones. Column `masked_class` (if >= 0) is excluded
  // from the softmax, i.e. has probability zero.
  Var SoftmaxXent(Var logits, std::span<const Token> targets,
                  std::span<const double> weights = {},
                  int masked_class = -1);

  // Reverse pass from a 1 x 1 node. Parameter gradients are added (+=) to
  // the ParameterSet buffers, or to `sink` when given.
  void Backward(Var loss, GradientBuffer* sink = nullptr);
  // Gradient of an Input() node after Backward.
  const Matrix& Grad(Var v) const;

  std::size_t size() const { return nodes_.size(); }

 private:
  friend class Var;

  enum class Op {
    kLeaf, kParam, kMatMul, kAdd, kAddRow, kSub, kMul, kScale, kSigmoid,
    kTanh, kSlice, kConcat, kSliceRows, kStackRows, kSumAll, kEmbed, kDropout, kSoftmaxXent,
  };

  struct Node {
    Op op = Op::kLeaf;
    int a = -1;
    int b = -1;
    Matrix value;
    const Matrix* external = nullptr;  // parameter value, not copied
    Parameter* param = nullptr;
    std::size_t param_index = 0;
    bool requires_grad = false;
    double scalar = 0.0;
    int begin = 0;
    std::vector<Token> ids;
    std::vector<int> inputs;  // kStackRows operands
    std::vector<double> weights;
    Matrix aux;  // dropout mask or softmax probabilities
    Matrix grad;

    const Matrix& val() const { return external ? *external : value; }
  };

  const Node& node(Var v) const;
  Var Push(Node n);
  bool RequiresGrad(int a, int b = -1) const;

  bool training_;
  bool consumed_ = false;
  std::vector<Node> nodes_;
};

// Adam with bias correction. beta1 = 0.9, beta2 = 0.999, eps = 1e-8.
class AdamState {
 public:
  explicit AdamState(const ParameterSet& params, double beta1 = 0.9,
                     double beta2 = 0.999, double eps = 1e-8);

  // Applies one update from the current gradients, then zeroes them.
  void Step(ParameterSet& params, double lr);
  std::int64_t steps() const { return step_; }

 private:
  double beta1_, beta2_, eps_;
  std::int64_t step_ = 0;
  std::vector<Matrix> m_;
  std::vector<Matrix> v_;
};

}  // namespace seqcritic

#endif  // SEQCRITIC_TAPEGRAD_H_
