// scsot/tape.h

// Copyright 2026  The scsot authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef SCSOT_TAPE_H_
#define SCSOT_TAPE_H_

#include <cstdint>
#include <functional>
#include <unordered_map>
#include <utility>
#include <vector>

#include "scsot/tensor.h"

namespace scsot {

class Tape;
class Parameter;

// Lightweight handle to a node on a Tape.  A Value is only valid while its
// tape is alive; model code passes Values around freely.
struct Value {
  Tape* tape = nullptr;
  int32_t id = -1;

  bool Valid() const { return tape != nullptr && id >= 0; }
  const Tensor& Data() const;
  const Tensor& Grad() const;
};

// Reverse-mode computation record.  Node ids are created in topological
// order, so the backward pass is a single reverse sweep that visits each
// reachable node exactly once.  A tape is confined to one thread; distinct
// tapes may run concurrently over shared (read-only) parameters.
class Tape {
 public:
  // grad_enabled=false records only forward data (used by decoding/eval).
  explicit Tape(bool grad_enabled = true) : grad_enabled_(grad_enabled) {}

  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  // --- Leaves ---------------------------------------------------------
  // Tracked leaf: participates in gradients (gradcheck inputs).
  Value Input(Tensor data);
  // Untracked leaf: features, masks, penalties, labels.
  Value Constant(Tensor data);
  // Tracked leaf bound to a Parameter; one node per parameter per tape.
  // Backward() accumulates into the parameter's persistent grad.
  Value Param(Parameter* p);

  // --- Primitives -----------------------------------------------------
  // Rank-2 only.  trans_a/trans_b select A^T / B^T; A^T B^T is unsupported.
  Value MatMul(Value a, Value b, bool trans_a = false, bool trans_b = false);
  // Same shape, or rank-2 [m,n] + rank-1 [n] broadcast over rows.
  Value Add(Value a, Value b);
  Value Sub(Value a, Value b);
  // Hadamard product, same shape.
  Value Mul(Value a, Value b);
  Value Scale(Value a, double alpha);
  Value Concat(const std::vector<Value>& xs, int axis);
  Value Slice(Value a, int axis, int64_t begin, int64_t end);
  // Rank-2: axis 1 normalizes each row, axis 0 each column.  Rank-1: axis 0.
  Value Softmax(Value a, int axis);
  Value Sigmoid(Value a);
  Value Tanh(Value a);
  Value Gelu(Value a);
  // x rank-2 [n,d]; gain/bias rank-1 [d]; normalizes the last axis.
  Value LayerNorm(Value x, Value gain, Value bias, double eps = 1e-5);
  // table rank-2 [v,d]; returns [ids.size(), d].  Repeated ids scatter-add
  // on backward.
  Value EmbeddingLookup(Value table, std::vector<int> ids);
  // x [t,d], kernel [k,d] with odd k, bias [d]; zero-padded "same" output.
  Value DepthwiseConv1d(Value x, Value kernel, Value bias);
  // logits [n,v], targets n ids; mean token cross-entropy (natural log).
  Value CrossEntropyLogits(Value logits, std::vector<int> targets);
  // probs and targets same shape; probabilities clamped to [eps, 1-eps];
  // mean over elements.
  Value BinaryCrossEntropy(Value probs, Tensor targets, double eps = 1e-7);
  Value Sum(Value a);
  Value Mean(Value a);

  // One LSTM cell step, composed from the primitives above.
  // x [1,in], h/c [1,hidden], w_ih [in,4*hidden], w_hh [hidden,4*hidden],
  // b_ih/b_hh [4*hidden].  Gate order: input, forget, cell, output.
  struct LstmState {
    Value h;
    Value c;
  };
  LstmState LstmStep(Value x, LstmState state, Value w_ih, Value w_hh,
                     Value b_ih, Value b_hh);

  // --- Backward -------------------------------------------------------
  // root must be scalar (1 element).  Populates node grads and adds each
  // bound parameter's leaf grad into Parameter::grad.
  void Backward(Value root);

  const Tensor& NodeData(int32_t id) const { return nodes_[id].data; }
  const Tensor& NodeGrad(int32_t id) const { return nodes_[id].grad; }
  int64_t NumNodes() const { return static_cast<int64_t>(nodes_.size()); }
  bool grad_enabled() const { return grad_enabled_; }

 private:
  struct Node {
    Tensor data;
    Tensor grad;  // allocated iff requires_grad
    std::vector<int32_t> parents;
    std::function<void(Tape*, int32_t)> backward;
    Parameter* param = nullptr;
    bool requires_grad = false;
  };

  int32_t NewNode(Tensor data, std::vector<int32_t> parents,
                  std::function<void(Tape*, int32_t)> backward);
  Value Wrap(int32_t id) { return Value{this, id}; }
  bool AnyRequiresGrad(const std::vector<int32_t>& parents) const;
  Tensor& GradRef(int32_t id) { return nodes_[id].grad; }
  Value Unary(Value a, Tensor out,
              std::function<void(Tape*, int32_t)> backward);
  void CheckSameTape(Value v) const;

  std::vector<Node> nodes_;
  std::unordered_map<const Parameter*, int32_t> param_leaves_;
  bool grad_enabled_;

  friend struct Value;
};

inline const Tensor& Value::Data() const { return tape->NodeData(id); }
inline const Tensor& Value::Grad() const { return tape->NodeGrad(id); }

}  // namespace scsot

#endif  // SCSOT_TAPE_H_
