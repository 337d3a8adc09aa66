// tapegrad.cc

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

#include "seqcritic/tapegrad.h"

#include <cmath>
#include <sstream>

#include "seqcritic/errors.h"

namespace seqcritic {

namespace {

std::string Shape(const Matrix& m) {
  std::ostringstream ss;
  ss << m.rows() << "x" << m.cols();
  return ss.str();
}

[[noreturn]] void ShapeError(const char* op, const Matrix& a, const Matrix& b) {
  throw DimensionError(std::string(op) + ": incompatible shapes " + Shape(a) +
                       " and " + Shape(b));
}

}  // namespace

void GradientBuffer::SetZero() {
  for (auto& g : grads) g.setZero();
}

void GradientBuffer::Add(const GradientBuffer& other) {
  for (std::size_t i = 0; i < grads.size(); ++i) grads[i] += other.grads[i];
}

bool GradientBuffer::AllFinite() const {
  for (const auto& g : grads)
    if (!g.allFinite()) return false;
  return true;
}

ParameterSet::ParameterSet(const ParameterSet& other) {
  for (const auto& p : other.params_) params_.push_back(std::make_unique<Parameter>(*p));
}

ParameterSet& ParameterSet::operator=(const ParameterSet& other) {
  if (this != &other) {
    params_.clear();
    for (const auto& p : other.params_)
      params_.push_back(std::make_unique<Parameter>(*p));
  }
  return *this;
}

Parameter& ParameterSet::Add(const std::string& name, int rows, int cols) {
  if (Contains(name)) throw UsageError("ParameterSet: duplicate name " + name);
  auto p = std::make_unique<Parameter>();
  p->name = name;
  p->value = Matrix::Zero(rows, cols);
  p->grad = Matrix::Zero(rows, cols);
  params_.push_back(std::move(p));
  return *params_.back();
}

std::size_t ParameterSet::Index(const std::string& name) const {
  for (std::size_t i = 0; i < params_.size(); ++i)
    if (params_[i]->name == name) return i;
  throw UsageError("ParameterSet: no parameter named " + name);
}

bool ParameterSet::Contains(const std::string& name) const {
  for (const auto& p : params_)
    if (p->name == name) return true;
  return false;
}

void ParameterSet::ZeroGrad() {
  for (auto& p : params_) p->grad.setZero();
}

GradientBuffer ParameterSet::MakeGradientBuffer() const {
  GradientBuffer buf;
  for (const auto& p : params_) buf.grads.push_back(Matrix::Zero(p->value.rows(), p->value.cols()));
  return buf;
}

void ParameterSet::AccumulateGrad(const GradientBuffer& buffer) {
  for (std::size_t i = 0; i < params_.size(); ++i) params_[i]->grad += buffer.grads[i];
}

std::size_t ParameterSet::NumWeights() const {
  std::size_t n = 0;
  for (const auto& p : params_) n += p->value.size();
  return n;
}

bool ParameterSet::GradFinite() const {
  for (const auto& p : params_)
    if (!p->grad.allFinite()) return false;
  return true;
}

const Matrix& Var::value() const { return tape_->node(*this).val(); }

const Tape::Node& Tape::node(Var v) const {
  if (v.tape_ != this || v.id_ < 0 || v.id_ >= static_cast<int>(nodes_.size()))
    throw UsageError("Var does not belong to this tape");
  return nodes_[v.id_];
}

Var Tape::Push(Node n) {
  if (consumed_) throw UsageError("tape already consumed by Backward");
  nodes_.push_back(std::move(n));
  return Var(this, static_cast<int>(nodes_.size()) - 1);
}

bool Tape::RequiresGrad(int a, int b) const {
  return (a >= 0 && nodes_[a].requires_grad) || (b >= 0 && nodes_[b].requires_grad);
}

Var Tape::Constant(Matrix value) {
  Node n;
  n.value = std::move(value);
  return Push(std::move(n));
}

Var Tape::Input(Matrix value) {
  Node n;
  n.value = std::move(value);
  n.requires_grad = true;
  return Push(std::move(n));
}

Var Tape::Param(ParameterSet& params, std::size_t index) {
  Node n;
  n.op = Op::kParam;
  n.param = &params.at(index);
  n.param_index = index;
  n.external = &n.param->value;
  n.requires_grad = true;
  return Push(std::move(n));
}

Var Tape::MatMul(Var a, Var b) {
  const Matrix& x = node(a).val();
  const Matrix& y = node(b).val();
  if (x.cols() != y.rows()) ShapeError("matmul", x, y);
  Node n;
  n.op = Op::kMatMul;
  n.a = a.id_;
  n.b = b.id_;
  n.value.noalias() = x * y;
  n.requires_grad = RequiresGrad(n.a, n.b);
  return Push(std::move(n));
}

Var Tape::Add(Var a, Var b) {
  const Matrix& x = node(a).val();
  const Matrix& y = node(b).val();
  Node n;
  n.a = a.id_;
  n.b = b.id_;
  if (x.rows() == y.rows() && x.cols() == y.cols()) {
    n.op = Op::kAdd;
    n.value = x + y;
  } else if (y.rows() == 1 && x.cols() == y.cols()) {
    n.op = Op::kAddRow;
    n.value = x.rowwise() + y.row(0);
  } else {
    ShapeError("add", x, y);
  }
  n.requires_grad = RequiresGrad(n.a, n.b);
  return Push(std::move(n));
}

Var Tape::Sub(Var a, Var b) {
  const Matrix& x = node(a).val();
  const Matrix& y = node(b).val();
  if (x.rows() != y.rows() || x.cols() != y.cols()) ShapeError("sub", x, y);
  Node n;
  n.op = Op::kSub;
  n.a = a.id_;
  n.b = b.id_;
  n.value = x - y;
  n.requires_grad = RequiresGrad(n.a, n.b);
  return Push(std::move(n));
}

Var Tape::Mul(Var a, Var b) {
  const Matrix& x = node(a).val();
  const Matrix& y = node(b).val();
  if (x.rows() != y.rows() || x.cols() != y.cols()) ShapeError("mul", x, y);
  Node n;
  n.op = Op::kMul;
  n.a = a.id_;
  n.b = b.id_;
  n.value = x.cwiseProduct(y);
  n.requires_grad = RequiresGrad(n.a, n.b);
  return Push(std::move(n));
}

Var Tape::Scale(Var a, double c) {
  Node n;
  n.op = Op::kScale;
  n.a = a.id_;
  n.scalar = c;
  n.value = node(a).val() * c;
  n.requires_grad = RequiresGrad(n.a);
  return Push(std::move(n));
}

Var Tape::Sigmoid(Var a) {
  Node n;
  n.op = Op::kSigmoid;
  n.a = a.id_;
  n.value = node(a).val().unaryExpr([](double x) { return 1.0 / (1.0 + std::exp(-x)); });
  n.requires_grad = RequiresGrad(n.a);
  return Push(std::move(n));
}

Var Tape::Tanh(Var a) {
  Node n;
  n.op = Op::kTanh;
  n.a = a.id_;
  n.value = node(a).val().array().tanh().matrix();
  n.requires_grad = RequiresGrad(n.a);
  return Push(std::move(n));
}

Var Tape::SliceCols(Var a, int begin, int count) {
  const Matrix& x = node(a).val();
  if (begin < 0 || count < 0 || begin + count > x.cols())
    throw DimensionError("slice_cols: range [" + std::to_string(begin) + ", " +
                         std::to_string(begin + count) + ") outside " + Shape(x));
  Node n;
  n.op = Op::kSlice;
  n.a = a.id_;
  n.begin = begin;
  n.value = x.middleCols(begin, count);
  n.requires_grad = RequiresGrad(n.a);
  return Push(std::move(n));
}

Var Tape::ConcatCols(Var a, Var b) {
  const Matrix& x = node(a).val();
  const Matrix& y = node(b).val();
  if (x.rows() != y.rows()) ShapeError("concat_cols", x, y);
  Node n;
  n.op = Op::kConcat;
  n.a = a.id_;
  n.b = b.id_;
  n.value.resize(x.rows(), x.cols() + y.cols());
  n.value << x, y;
  n.requires_grad = RequiresGrad(n.a, n.b);
  return Push(std::move(n));
}

Var Tape::SliceRows(Var a, int begin, int count) {
  const Matrix& x = node(a).val();
  if (begin < 0 || count < 0 || begin + count > x.rows())
    throw DimensionError("slice_rows: range [" + std::to_string(begin) + ", " +
                         std::to_string(begin + count) + ") outside " + Shape(x));
  Node n;
  n.op = Op::kSliceRows;
  n.a = a.id_;
  n.begin = begin;
  n.value = x.middleRows(begin, count);
  n.requires_grad = RequiresGrad(n.a);
  return Push(std::move(n));
}

Var Tape::StackRows(std::span<const Var> parts) {
  if (parts.empty()) throw DimensionError("stack_rows: no operands");
  Eigen::Index rows = 0;
  const Eigen::Index cols = node(parts[0]).val().cols();
  Node n;
  n.op = Op::kStackRows;
  for (const Var& v : parts) {
    const Matrix& x = node(v).val();
    if (x.cols() != cols) ShapeError("stack_rows", node(parts[0]).val(), x);
    rows += x.rows();
    n.inputs.push_back(v.id_);
    n.requires_grad = n.requires_grad || nodes_[v.id_].requires_grad;
  }
  n.value.resize(rows, cols);
  Eigen::Index r = 0;
  for (const Var& v : parts) {
    const Matrix& x = node(v).val();
    n.value.middleRows(r, x.rows()) = x;
    r += x.rows();
  }
  return Push(std::move(n));
}

Var Tape::SumAll(Var a) {
  Node n;
  n.op = Op::kSumAll;
  n.a = a.id_;
  n.value = Matrix::Constant(1, 1, node(a).val().sum());
  n.requires_grad = RequiresGrad(n.a);
  return Push(std::move(n));
}

Var Tape::Embed(Var table, std::span<const Token> ids) {
  const Matrix& t = node(table).val();
  Node n;
  n.op = Op::kEmbed;
  n.a = table.id_;
  n.ids.assign(ids.begin(), ids.end());
  n.value.resize(static_cast<Eigen::Index>(ids.size()), t.cols());
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (ids[i] < 0 || ids[i] >= t.rows())
      throw DimensionError("embed: id " + std::to_string(ids[i]) +
                           " outside table of " + std::to_string(t.rows()) + " rows");
    n.value.row(static_cast<Eigen::Index>(i)) = t.row(ids[i]);
  }
  n.requires_grad = RequiresGrad(n.a);
  return Push(std::move(n));
}

Var Tape::Dropout(Var a, double p, std::mt19937_64& rng) {
  if (!training_ || p <= 0.0) return a;
  if (p >= 1.0) throw UsageError("dropout: rate must be < 1");
  const Matrix& x = node(a).val();
  Node n;
  n.op = Op::kDropout;
  n.a = a.id_;
  n.aux.resize(x.rows(), x.cols());
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double keep_scale = 1.0 / (1.0 - p);
  for (Eigen::Index i = 0; i < n.aux.size(); ++i)
    n.aux.data()[i] = u(rng) >= p ? keep_scale : 0.0;
  n.value = x.cwiseProduct(n.aux);
  n.requires_grad = RequiresGrad(n.a);
  return Push(std::move(n));
}

Var Tape::SoftmaxXent(Var logits, std::span<const Token> targets,
                      std::span<const double> weights, int masked_class) {
  const Matrix& x = node(logits).val();
  if (static_cast<Eigen::Index>(targets.size()) != x.rows())
    throw DimensionError("softmax_xent: " + std::to_string(targets.size()) +
                         " targets for logits " + Shape(x));
  if (!weights.empty() && weights.size() != targets.size())
    throw DimensionError("softmax_xent: weights length differs from targets");
  Node n;
  n.op = Op::kSoftmaxXent;
  n.a = logits.id_;
  n.ids.assign(targets.begin(), targets.end());
  n.weights.assign(weights.begin(), weights.end());
  if (n.weights.empty()) n.weights.assign(targets.size(), 1.0);
  n.aux.resize(x.rows(), x.cols());
  double loss = 0.0;
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    const Token t = targets[i];
    if (t < 0 || t >= x.cols() || t == masked_class)
      throw DimensionError("softmax_xent: target " + std::to_string(t) +
                           " invalid for " + std::to_string(x.cols()) + " classes");
    double mx = -std::numeric_limits<double>::infinity();
    for (Eigen::Index j = 0; j < x.cols(); ++j)
      if (j != masked_class) mx = std::max(mx, x(i, j));
    double z = 0.0;
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
      double e = j == masked_class ? 0.0 : std::exp(x(i, j) - mx);
      n.aux(i, j) = e;
      z += e;
    }
    n.aux.row(i) /= z;
    loss += n.weights[i] * (std::log(z) + mx - x(i, t));
  }
  n.value = Matrix::Constant(1, 1, loss);
  n.requires_grad = RequiresGrad(n.a);
  return Push(std::move(n));
}

void Tape::Backward(Var loss, GradientBuffer* sink) {
  if (consumed_) throw UsageError("Backward called twice on one tape");
  const Node& root = node(loss);
  if (root.val().rows() != 1 || root.val().cols() != 1)
    throw UsageError("Backward: loss must be 1x1, got " + Shape(root.val()));
  consumed_ = true;

  for (auto& n : nodes_)
    if (n.requires_grad) n.grad = Matrix::Zero(n.val().rows(), n.val().cols());
  if (!nodes_[loss.id_].requires_grad) return;
  nodes_[loss.id_].grad(0, 0) = 1.0;

  auto wants = [&](int i) { return i >= 0 && nodes_[i].requires_grad; };

  for (int i = loss.id_; i >= 0; --i) {
    Node& n = nodes_[i];
    if (!n.requires_grad) continue;
    const Matrix& g = n.grad;
    switch (n.op) {
      case Op::kLeaf:
        break;
      case Op::kParam:
        if (sink) {
          sink->grads[n.param_index] += g;
        } else {
          n.param->grad += g;
        }
        break;
      case Op::kMatMul:
        if (wants(n.a)) nodes_[n.a].grad.noalias() += g * nodes_[n.b].val().transpose();
        if (wants(n.b)) nodes_[n.b].grad.noalias() += nodes_[n.a].val().transpose() * g;
        break;
      case Op::kAdd:
        if (wants(n.a)) nodes_[n.a].grad += g;
        if (wants(n.b)) nodes_[n.b].grad += g;
        break;
      case Op::kAddRow:
        if (wants(n.a)) nodes_[n.a].grad += g;
        if (wants(n.b)) nodes_[n.b].grad += g.colwise().sum();
        break;
      case Op::kSub:
        if (wants(n.a)) nodes_[n.a].grad += g;
        if (wants(n.b)) nodes_[n.b].grad -= g;
        break;
      case Op::kMul:
        if (wants(n.a)) nodes_[n.a].grad += g.cwiseProduct(nodes_[n.b].val());
        if (wants(n.b)) nodes_[n.b].grad += g.cwiseProduct(nodes_[n.a].val());
        break;
      case Op::kScale:
        nodes_[n.a].grad += g * n.scalar;
        break;
      case Op::kSigmoid:
        nodes_[n.a].grad +=
            g.cwiseProduct(n.value.cwiseProduct((1.0 - n.value.array()).matrix()));
        break;
      case Op::kTanh:
        nodes_[n.a].grad +=
            g.cwiseProduct((1.0 - n.value.array().square()).matrix());
        break;
      case Op::kSlice:
        nodes_[n.a].grad.middleCols(n.begin, g.cols()) += g;
        break;
      case Op::kConcat: {
        const auto ca = nodes_[n.a].val().cols();
        if (wants(n.a)) nodes_[n.a].grad += g.leftCols(ca);
        if (wants(n.b)) nodes_[n.b].grad += g.rightCols(g.cols() - ca);
        break;
      }
      case Op::kSliceRows:
        nodes_[n.a].grad.middleRows(n.begin, g.rows()) += g;
        break;
      case Op::kStackRows: {
        Eigen::Index r = 0;
        for (int in : n.inputs) {
          const Eigen::Index rows = nodes_[in].val().rows();
          if (nodes_[in].requires_grad) nodes_[in].grad += g.middleRows(r, rows);
          r += rows;
        }
        break;
      }
      case Op::kSumAll:
        nodes_[n.a].grad.array() += g(0, 0);
        break;
      case Op::kEmbed:
        for (std::size_t r = 0; r < n.ids.size(); ++r)
          nodes_[n.a].grad.row(n.ids[r]) += g.row(static_cast<Eigen::Index>(r));
        break;
      case Op::kDropout:
        nodes_[n.a].grad += g.cwiseProduct(n.aux);
        break;
      case Op::kSoftmaxXent: {
        Matrix& ga = nodes_[n.a].grad;
        for (Eigen::Index r = 0; r < n.aux.rows(); ++r) {
          const double w = n.weights[r] * g(0, 0);
          ga.row(r) += w * n.aux.row(r);
          ga(r, n.ids[r]) -= w;
        }
        break;
      }
    }
  }
}

const Matrix& Tape::Grad(Var v) const {
  const Node& n = node(v);
  if (!consumed_) throw UsageError("Grad: Backward has not run");
  return n.grad;
}

AdamState::AdamState(const ParameterSet& params, double beta1, double beta2,
                     double eps)
    : beta1_(beta1), beta2_(beta2), eps_(eps) {
  for (std::size_t i = 0; i < params.size(); ++i) {
    const auto& w = params.at(i).value;
    m_.push_back(Matrix::Zero(w.rows(), w.cols()));
    v_.push_back(Matrix::Zero(w.rows(), w.cols()));
  }
}

void AdamState::Step(ParameterSet& params, double lr) {
  if (params.size() != m_.size())
    throw UsageError("AdamState: parameter count changed");
  ++step_;
  const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(step_));
  const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(step_));
  for (std::size_t i = 0; i < params.size(); ++i) {
    Parameter& p = params.at(i);
    m_[i] = beta1_ * m_[i] + (1.0 - beta1_) * p.grad;
    v_[i] = beta2_ * v_[i] + (1.0 - beta2_) * p.grad.cwiseProduct(p.grad);
    p.value.array() -= lr * (m_[i].array() / c1) /
                       ((v_[i].array() / c2).sqrt() + eps_);
    p.grad.setZero();
  }
}

}  // namespace seqcritic
