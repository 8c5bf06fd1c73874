// scsot/tape.cc

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

#include "scsot/tape.h"

#include <algorithm>
#include <cmath>

#include "scsot/kernels.h"
#include "scsot/parameters.h"

namespace scsot {

namespace {

constexpr double kSqrt2Inv = 0.70710678118654752440;
constexpr double kInvSqrt2Pi = 0.39894228040143267794;

const kernels::Backend& K() { return kernels::Active(); }

}  // namespace

int32_t Tape::NewNode(Tensor data, std::vector<int32_t> parents,
                      std::function<void(Tape*, int32_t)> backward) {
  Node node;
  node.data = std::move(data);
  node.parents = std::move(parents);
  node.requires_grad = grad_enabled_ && AnyRequiresGrad(node.parents);
  if (node.requires_grad) {
    node.grad = Tensor::Zeros(node.data.Shape());
    node.backward = std::move(backward);
  }
  nodes_.push_back(std::move(node));
  return static_cast<int32_t>(nodes_.size()) - 1;
}

bool Tape::AnyRequiresGrad(const std::vector<int32_t>& parents) const {
  for (int32_t p : parents) {
    if (nodes_[p].requires_grad) return true;
  }
  return false;
}

void Tape::CheckSameTape(Value v) const {
  SCSOT_CHECK(v.tape == this && v.id >= 0 &&
                  v.id < static_cast<int32_t>(nodes_.size()),
              "Value does not belong to this tape");
}

Value Tape::Input(Tensor data) {
  Node node;
  node.data = std::move(data);
  node.requires_grad = grad_enabled_;
  if (node.requires_grad) node.grad = Tensor::Zeros(node.data.Shape());
  nodes_.push_back(std::move(node));
  return Wrap(static_cast<int32_t>(nodes_.size()) - 1);
}

Value Tape::Constant(Tensor data) {
  Node node;
  node.data = std::move(data);
  node.requires_grad = false;
  nodes_.push_back(std::move(node));
  return Wrap(static_cast<int32_t>(nodes_.size()) - 1);
}

Value Tape::Param(Parameter* p) {
  SCSOT_CHECK(p != nullptr, "null parameter");
  auto it = param_leaves_.find(p);
  if (it != param_leaves_.end()) return Wrap(it->second);
  Node node;
  node.data = p->value;
  node.param = p;
  node.requires_grad = grad_enabled_;
  if (node.requires_grad) node.grad = Tensor::Zeros(node.data.Shape());
  nodes_.push_back(std::move(node));
  int32_t id = static_cast<int32_t>(nodes_.size()) - 1;
  param_leaves_[p] = id;
  return Wrap(id);
}

Value Tape::Unary(Value a, Tensor out,
                  std::function<void(Tape*, int32_t)> backward) {
  CheckSameTape(a);
  return Wrap(NewNode(std::move(out), {a.id}, std::move(backward)));
}

// --------------------------------------------------------------------------
// MatMul

Value Tape::MatMul(Value a, Value b, bool trans_a, bool trans_b) {
  CheckSameTape(a);
  CheckSameTape(b);
  SCSOT_CHECK(!(trans_a && trans_b), "MatMul: A^T B^T unsupported");
  const Tensor& ta = nodes_[a.id].data;
  const Tensor& tb = nodes_[b.id].data;
  SCSOT_CHECK(ta.Rank() == 2 && tb.Rank() == 2, "MatMul: rank-2 operands required");
  int64_t m, k, n;
  if (!trans_a && !trans_b) {
    m = ta.Dim(0), k = ta.Dim(1), n = tb.Dim(1);
    SCSOT_CHECK(tb.Dim(0) == k, "MatMul nn: inner dims mismatch " +
                                    ta.ShapeStr() + " * " + tb.ShapeStr());
  } else if (trans_b) {
    m = ta.Dim(0), k = ta.Dim(1), n = tb.Dim(0);
    SCSOT_CHECK(tb.Dim(1) == k, "MatMul nt: inner dims mismatch " +
                                    ta.ShapeStr() + " * " + tb.ShapeStr() + "^T");
  } else {
    k = ta.Dim(0), m = ta.Dim(1), n = tb.Dim(1);
    SCSOT_CHECK(tb.Dim(0) == k, "MatMul tn: inner dims mismatch " +
                                    ta.ShapeStr() + "^T * " + tb.ShapeStr());
  }
  Tensor out({m, n});
  if (!trans_a && !trans_b) {
    K().matmul_nn(ta.Data(), tb.Data(), out.Data(), m, k, n);
  } else if (trans_b) {
    K().matmul_nt(ta.Data(), tb.Data(), out.Data(), m, k, n);
  } else {
    K().matmul_tn(ta.Data(), tb.Data(), out.Data(), m, k, n);
  }
  auto backward = [trans_a, trans_b, m, k, n](Tape* t, int32_t self) {
    const Node& node = t->nodes_[self];
    int32_t ia = node.parents[0], ib = node.parents[1];
    const Tensor& g = node.grad;
    const Tensor& da = t->nodes_[ia].data;
    const Tensor& db = t->nodes_[ib].data;
    if (!trans_a && !trans_b) {
      if (t->nodes_[ia].requires_grad) {
        Tensor tmp({m, k});
        K().matmul_nt(g.Data(), db.Data(), tmp.Data(), m, n, k);
        K().axpy(1.0, tmp.Data(), t->GradRef(ia).Data(), tmp.NumElements());
      }
      if (t->nodes_[ib].requires_grad) {
        Tensor tmp({k, n});
        K().matmul_tn(da.Data(), g.Data(), tmp.Data(), k, m, n);
        K().axpy(1.0, tmp.Data(), t->GradRef(ib).Data(), tmp.NumElements());
      }
    } else if (trans_b) {
      // C = A B^T with B stored [n,k].
      if (t->nodes_[ia].requires_grad) {
        Tensor tmp({m, k});
        K().matmul_nn(g.Data(), db.Data(), tmp.Data(), m, n, k);
        K().axpy(1.0, tmp.Data(), t->GradRef(ia).Data(), tmp.NumElements());
      }
      if (t->nodes_[ib].requires_grad) {
        Tensor tmp({n, k});
        K().matmul_tn(g.Data(), da.Data(), tmp.Data(), n, m, k);
        K().axpy(1.0, tmp.Data(), t->GradRef(ib).Data(), tmp.NumElements());
      }
    } else {
      // C = A^T B with A stored [k,m].
      if (t->nodes_[ia].requires_grad) {
        Tensor tmp({k, m});
        K().matmul_nt(db.Data(), g.Data(), tmp.Data(), k, n, m);
        K().axpy(1.0, tmp.Data(), t->GradRef(ia).Data(), tmp.NumElements());
      }
      if (t->nodes_[ib].requires_grad) {
        Tensor tmp({k, n});
        K().matmul_nn(da.Data(), g.Data(), tmp.Data(), k, m, n);
        K().axpy(1.0, tmp.Data(), t->GradRef(ib).Data(), tmp.NumElements());
      }
    }
  };
  return Wrap(NewNode(std::move(out), {a.id, b.id}, backward));
}

// --------------------------------------------------------------------------
// Elementwise and broadcast

Value Tape::Add(Value a, Value b) {
  CheckSameTape(a);
  CheckSameTape(b);
  const Tensor& ta = nodes_[a.id].data;
  const Tensor& tb = nodes_[b.id].data;
  if (ta.SameShape(tb)) {
    Tensor out(ta.Shape());
    K().add(ta.Data(), tb.Data(), out.Data(), ta.NumElements());
    auto backward = [](Tape* t, int32_t self) {
      const Node& node = t->nodes_[self];
      for (int32_t p : node.parents) {
        if (t->nodes_[p].requires_grad) {
          K().axpy(1.0, node.grad.Data(), t->GradRef(p).Data(),
                   node.grad.NumElements());
        }
      }
    };
    return Wrap(NewNode(std::move(out), {a.id, b.id}, backward));
  }
  // Row broadcast: [m,n] + [n].
  SCSOT_CHECK(ta.Rank() == 2 && tb.Rank() == 1 && ta.Dim(1) == tb.Dim(0),
              "Add: shapes " + ta.ShapeStr() + " and " + tb.ShapeStr() +
                  " are not addable");
  int64_t m = ta.Dim(0), n = ta.Dim(1);
  Tensor out({m, n});
  for (int64_t i = 0; i < m; ++i) {
    K().add(ta.RowPtr(i), tb.Data(), out.RowPtr(i), n);
  }
  auto backward = [m, n](Tape* t, int32_t self) {
    const Node& node = t->nodes_[self];
    int32_t ia = node.parents[0], ib = node.parents[1];
    if (t->nodes_[ia].requires_grad) {
      K().axpy(1.0, node.grad.Data(), t->GradRef(ia).Data(), m * n);
    }
    if (t->nodes_[ib].requires_grad) {
      Tensor& gb = t->GradRef(ib);
      for (int64_t i = 0; i < m; ++i) {
        K().axpy(1.0, node.grad.Data() + i * n, gb.Data(), n);
      }
    }
  };
  return Wrap(NewNode(std::move(out), {a.id, b.id}, backward));
}

Value Tape::Sub(Value a, Value b) {
  CheckSameTape(a);
  CheckSameTape(b);
  const Tensor& ta = nodes_[a.id].data;
  const Tensor& tb = nodes_[b.id].data;
  SCSOT_CHECK(ta.SameShape(tb), "Sub: shape mismatch " + ta.ShapeStr() + " vs " +
                                    tb.ShapeStr());
  Tensor out(ta.Shape());
  K().sub(ta.Data(), tb.Data(), out.Data(), ta.NumElements());
  auto backward = [](Tape* t, int32_t self) {
    const Node& node = t->nodes_[self];
    int32_t ia = node.parents[0], ib = node.parents[1];
    if (t->nodes_[ia].requires_grad) {
      K().axpy(1.0, node.grad.Data(), t->GradRef(ia).Data(),
               node.grad.NumElements());
    }
    if (t->nodes_[ib].requires_grad) {
      K().axpy(-1.0, node.grad.Data(), t->GradRef(ib).Data(),
               node.grad.NumElements());
    }
  };
  return Wrap(NewNode(std::move(out), {a.id, b.id}, backward));
}

Value Tape::Mul(Value a, Value b) {
  CheckSameTape(a);
  CheckSameTape(b);
  const Tensor& ta = nodes_[a.id].data;
  const Tensor& tb = nodes_[b.id].data;
  SCSOT_CHECK(ta.SameShape(tb), "Mul: shape mismatch " + ta.ShapeStr() + " vs " +
                                    tb.ShapeStr());
  Tensor out(ta.Shape());
  K().mul(ta.Data(), tb.Data(), out.Data(), ta.NumElements());
  auto backward = [](Tape* t, int32_t self) {
    const Node& node = t->nodes_[self];
    int32_t ia = node.parents[0], ib = node.parents[1];
    int64_t n = node.grad.NumElements();
    if (t->nodes_[ia].requires_grad) {
      Tensor tmp(node.grad.Shape());
      K().mul(node.grad.Data(), t->nodes_[ib].data.Data(), tmp.Data(), n);
      K().axpy(1.0, tmp.Data(), t->GradRef(ia).Data(), n);
    }
    if (t->nodes_[ib].requires_grad) {
      Tensor tmp(node.grad.Shape());
      K().mul(node.grad.Data(), t->nodes_[ia].data.Data(), tmp.Data(), n);
      K().axpy(1.0, tmp.Data(), t->GradRef(ib).Data(), n);
    }
  };
  return Wrap(NewNode(std::move(out), {a.id, b.id}, backward));
}

Value Tape::Scale(Value a, double alpha) {
  CheckSameTape(a);
  const Tensor& ta = nodes_[a.id].data;
  Tensor out(ta.Shape());
  K().scale(alpha, ta.Data(), out.Data(), ta.NumElements());
  auto backward = [alpha](Tape* t, int32_t self) {
    const Node& node = t->nodes_[self];
    int32_t ia = node.parents[0];
    if (t->nodes_[ia].requires_grad) {
      K().axpy(alpha, node.grad.Data(), t->GradRef(ia).Data(),
               node.grad.NumElements());
    }
  };
  return Unary(a, std::move(out), backward);
}

// --------------------------------------------------------------------------
// Concat / Slice

Value Tape::Concat(const std::vector<Value>& xs, int axis) {
  SCSOT_CHECK(!xs.empty(), "Concat: empty input list");
  for (Value v : xs) CheckSameTape(v);
  const Tensor& first = nodes_[xs[0].id].data;
  int rank = first.Rank();
  SCSOT_CHECK(axis >= 0 && axis < rank, "Concat: bad axis");
  std::vector<int64_t> shape = first.Shape();
  int64_t total = first.Dim(axis);
  for (size_t i = 1; i < xs.size(); ++i) {
    const Tensor& t = nodes_[xs[i].id].data;
    SCSOT_CHECK(t.Rank() == rank, "Concat: rank mismatch");
    for (int d = 0; d < rank; ++d) {
      if (d != axis) {
        SCSOT_CHECK(t.Dim(d) == first.Dim(d), "Concat: shape mismatch");
      }
    }
    total += t.Dim(axis);
  }
  shape[axis] = total;
  Tensor out(shape);
  std::vector<int32_t> parents;
  parents.reserve(xs.size());
  for (Value v : xs) parents.push_back(v.id);

  if (rank == 1 || (rank == 2 && axis == 0)) {
    int64_t offset = 0;
    for (Value v : xs) {
      const Tensor& t = nodes_[v.id].data;
      std::copy(t.Data(), t.Data() + t.NumElements(), out.Data() + offset);
      offset += t.NumElements();
    }
    auto backward = [](Tape* t, int32_t self) {
      const Node& node = t->nodes_[self];
      int64_t offset = 0;
      for (int32_t p : node.parents) {
        int64_t n = t->nodes_[p].data.NumElements();
        if (t->nodes_[p].requires_grad) {
          K().axpy(1.0, node.grad.Data() + offset, t->GradRef(p).Data(), n);
        }
        offset += n;
      }
    };
    return Wrap(NewNode(std::move(out), std::move(parents), backward));
  }

  SCSOT_CHECK(rank == 2 && axis == 1, "Concat: unsupported rank/axis");
  int64_t rows = first.Dim(0);
  int64_t col_offset = 0;
  for (Value v : xs) {
    const Tensor& t = nodes_[v.id].data;
    for (int64_t i = 0; i < rows; ++i) {
      std::copy(t.RowPtr(i), t.RowPtr(i) + t.Dim(1),
                out.RowPtr(i) + col_offset);
    }
    col_offset += t.Dim(1);
  }
  auto backward = [rows](Tape* t, int32_t self) {
    const Node& node = t->nodes_[self];
    int64_t total_cols = node.grad.Dim(1);
    int64_t col_offset = 0;
    for (int32_t p : node.parents) {
      int64_t cols = t->nodes_[p].data.Dim(1);
      if (t->nodes_[p].requires_grad) {
        Tensor& gp = t->GradRef(p);
        for (int64_t i = 0; i < rows; ++i) {
          K().axpy(1.0, node.grad.Data() + i * total_cols + col_offset,
                   gp.RowPtr(i), cols);
        }
      }
      col_offset += cols;
    }
  };
  return Wrap(NewNode(std::move(out), std::move(parents), backward));
}

Value Tape::Slice(Value a, int axis, int64_t begin, int64_t end) {
  CheckSameTape(a);
  const Tensor& ta = nodes_[a.id].data;
  int rank = ta.Rank();
  SCSOT_CHECK(axis >= 0 && axis < rank, "Slice: bad axis");
  SCSOT_CHECK(0 <= begin && begin < end && end <= ta.Dim(axis),
              "Slice: bad range");
  if (rank == 1 || (rank == 2 && axis == 0)) {
    int64_t width = (rank == 2) ? ta.Dim(1) : 1;
    std::vector<int64_t> shape = ta.Shape();
    shape[0] = end - begin;
    Tensor out(shape);
    std::copy(ta.Data() + begin * width, ta.Data() + end * width, out.Data());
    auto backward = [begin, width](Tape* t, int32_t self) {
      const Node& node = t->nodes_[self];
      int32_t ia = node.parents[0];
      if (t->nodes_[ia].requires_grad) {
        K().axpy(1.0, node.grad.Data(),
                 t->GradRef(ia).Data() + begin * width,
                 node.grad.NumElements());
      }
    };
    return Unary(a, std::move(out), backward);
  }
  SCSOT_CHECK(rank == 2 && axis == 1, "Slice: unsupported rank/axis");
  int64_t rows = ta.Dim(0), cols = ta.Dim(1);
  Tensor out({rows, end - begin});
  for (int64_t i = 0; i < rows; ++i) {
    std::copy(ta.RowPtr(i) + begin, ta.RowPtr(i) + end, out.RowPtr(i));
  }
  auto backward = [begin, cols](Tape* t, int32_t self) {
    const Node& node = t->nodes_[self];
    int32_t ia = node.parents[0];
    if (t->nodes_[ia].requires_grad) {
      Tensor& ga = t->GradRef(ia);
      int64_t w = node.grad.Dim(1);
      for (int64_t i = 0; i < node.grad.Dim(0); ++i) {
        K().axpy(1.0, node.grad.RowPtr(i), ga.Data() + i * cols + begin, w);
      }
    }
  };
  return Unary(a, std::move(out), backward);
}

// --------------------------------------------------------------------------
// Nonlinearities

Value Tape::Softmax(Value a, int axis) {
  CheckSameTape(a);
  const Tensor& ta = nodes_[a.id].data;
  int rank = ta.Rank();
  SCSOT_CHECK((rank == 1 && axis == 0) || (rank == 2 && (axis == 0 || axis == 1)),
              "Softmax: unsupported rank/axis");
  Tensor out(ta.Shape());
  int64_t groups, len, stride, step;
  if (rank == 1 || axis == 1) {
    groups = (rank == 1) ? 1 : ta.Dim(0);
    len = (rank == 1) ? ta.Dim(0) : ta.Dim(1);
    stride = len;  // between groups
    step = 1;      // within group
  } else {
    groups = ta.Dim(1);
    len = ta.Dim(0);
    stride = 1;
    step = ta.Dim(1);
  }
  for (int64_t g = 0; g < groups; ++g) {
    const double* src = ta.Data() + g * stride;
    double* dst = out.Data() + g * stride;
    double m = src[0];
    for (int64_t i = 1; i < len; ++i) m = std::max(m, src[i * step]);
    double s = 0.0;
    for (int64_t i = 0; i < len; ++i) {
      double e = std::exp(src[i * step] - m);
      dst[i * step] = e;
      s += e;
    }
    double inv = 1.0 / s;
    for (int64_t i = 0; i < len; ++i) dst[i * step] *= inv;
  }
  auto backward = [groups, len, stride, step](Tape* t, int32_t self) {
    const Node& node = t->nodes_[self];
    int32_t ia = node.parents[0];
    if (!t->nodes_[ia].requires_grad) return;
    Tensor& ga = t->GradRef(ia);
    const Tensor& y = node.data;
    const Tensor& g = node.grad;
    for (int64_t gr = 0; gr < groups; ++gr) {
      const double* yv = y.Data() + gr * stride;
      const double* gv = g.Data() + gr * stride;
      double* out = ga.Data() + gr * stride;
      double dotv = 0.0;
      for (int64_t i = 0; i < len; ++i) dotv += gv[i * step] * yv[i * step];
      for (int64_t i = 0; i < len; ++i) {
        out[i * step] += yv[i * step] * (gv[i * step] - dotv);
      }
    }
  };
  return Unary(a, std::move(out), backward);
}

Value Tape::Sigmoid(Value a) {
  CheckSameTape(a);
  const Tensor& ta = nodes_[a.id].data;
  Tensor out(ta.Shape());
  for (int64_t i = 0; i < ta.NumElements(); ++i) {
    double x = ta.At(i);
    out.At(i) = (x >= 0.0) ? 1.0 / (1.0 + std::exp(-x))
                           : std::exp(x) / (1.0 + std::exp(x));
  }
  auto backward = [](Tape* t, int32_t self) {
    const Node& node = t->nodes_[self];
    int32_t ia = node.parents[0];
    if (!t->nodes_[ia].requires_grad) return;
    Tensor& ga = t->GradRef(ia);
    for (int64_t i = 0; i < node.grad.NumElements(); ++i) {
      double y = node.data.At(i);
      ga.At(i) += node.grad.At(i) * y * (1.0 - y);
    }
  };
  return Unary(a, std::move(out), backward);
}

Value Tape::Tanh(Value a) {
  CheckSameTape(a);
  const Tensor& ta = nodes_[a.id].data;
  Tensor out(ta.Shape());
  for (int64_t i = 0; i < ta.NumElements(); ++i) out.At(i) = std::tanh(ta.At(i));
  auto backward = [](Tape* t, int32_t self) {
    const Node& node = t->nodes_[self];
    int32_t ia = node.parents[0];
    if (!t->nodes_[ia].requires_grad) return;
    Tensor& ga = t->GradRef(ia);
    for (int64_t i = 0; i < node.grad.NumElements(); ++i) {
      double y = node.data.At(i);
      ga.At(i) += node.grad.At(i) * (1.0 - y * y);
    }
  };
  return Unary(a, std::move(out), backward);
}

Value Tape::Gelu(Value a) {
  CheckSameTape(a);
  const Tensor& ta = nodes_[a.id].data;
  Tensor out(ta.Shape());
  for (int64_t i = 0; i < ta.NumElements(); ++i) {
    double x = ta.At(i);
    out.At(i) = 0.5 * x * (1.0 + std::erf(x * kSqrt2Inv));
  }
  // Save the input for backward; gelu(x) is not invertible from its output.
  Tensor saved = ta;
  auto backward = [saved](Tape* t, int32_t self) {
    const Node& node = t->nodes_[self];
    int32_t ia = node.parents[0];
    if (!t->nodes_[ia].requires_grad) return;
    Tensor& ga = t->GradRef(ia);
    for (int64_t i = 0; i < node.grad.NumElements(); ++i) {
      double x = saved.At(i);
      double cdf = 0.5 * (1.0 + std::erf(x * kSqrt2Inv));
      double pdf = kInvSqrt2Pi * std::exp(-0.5 * x * x);
      ga.At(i) += node.grad.At(i) * (cdf + x * pdf);
    }
  };
  return Unary(a, std::move(out), backward);
}

Value Tape::LayerNorm(Value x, Value gain, Value bias, double eps) {
  CheckSameTape(x);
  CheckSameTape(gain);
  CheckSameTape(bias);
  const Tensor& tx = nodes_[x.id].data;
  const Tensor& tg = nodes_[gain.id].data;
  const Tensor& tb = nodes_[bias.id].data;
  SCSOT_CHECK(tx.Rank() == 2, "LayerNorm: rank-2 input required");
  int64_t rows = tx.Dim(0), d = tx.Dim(1);
  SCSOT_CHECK(tg.Rank() == 1 && tg.Dim(0) == d && tb.Rank() == 1 &&
                  tb.Dim(0) == d,
              "LayerNorm: gain/bias must be rank-1 of width " +
                  std::to_string(d));
  Tensor out({rows, d});
  Tensor xhat({rows, d});
  Tensor inv_sigma({rows});
  for (int64_t i = 0; i < rows; ++i) {
    const double* xi = tx.RowPtr(i);
    double mu = K().sum(xi, d) / static_cast<double>(d);
    double var = 0.0;
    for (int64_t j = 0; j < d; ++j) {
      double c = xi[j] - mu;
      var += c * c;
    }
    var /= static_cast<double>(d);
    double inv = 1.0 / std::sqrt(var + eps);
    inv_sigma.At(i) = inv;
    for (int64_t j = 0; j < d; ++j) {
      double h = (xi[j] - mu) * inv;
      xhat.At(i, j) = h;
      out.At(i, j) = h * tg.At(j) + tb.At(j);
    }
  }
  auto backward = [xhat, inv_sigma, rows, d](Tape* t, int32_t self) {
    const Node& node = t->nodes_[self];
    int32_t ix = node.parents[0], ig = node.parents[1], ib = node.parents[2];
    const Tensor& g = node.grad;
    const Tensor& gamma = t->nodes_[ig].data;
    if (t->nodes_[ib].requires_grad) {
      Tensor& gb = t->GradRef(ib);
      for (int64_t i = 0; i < rows; ++i) K().axpy(1.0, g.RowPtr(i), gb.Data(), d);
    }
    if (t->nodes_[ig].requires_grad) {
      Tensor& gg = t->GradRef(ig);
      for (int64_t i = 0; i < rows; ++i) {
        for (int64_t j = 0; j < d; ++j) {
          gg.At(j) += g.At(i, j) * xhat.At(i, j);
        }
      }
    }
    if (t->nodes_[ix].requires_grad) {
      Tensor& gx = t->GradRef(ix);
      std::vector<double> dyg(static_cast<size_t>(d));
      for (int64_t i = 0; i < rows; ++i) {
        double mean_dyg = 0.0, mean_dyg_xhat = 0.0;
        for (int64_t j = 0; j < d; ++j) {
          dyg[j] = g.At(i, j) * gamma.At(j);
          mean_dyg += dyg[j];
          mean_dyg_xhat += dyg[j] * xhat.At(i, j);
        }
        mean_dyg /= static_cast<double>(d);
        mean_dyg_xhat /= static_cast<double>(d);
        double inv = inv_sigma.At(i);
        for (int64_t j = 0; j < d; ++j) {
          gx.At(i, j) +=
              inv * (dyg[j] - mean_dyg - xhat.At(i, j) * mean_dyg_xhat);
        }
      }
    }
  };
  return Wrap(NewNode(std::move(out), {x.id, gain.id, bias.id}, backward));
}

Value Tape::EmbeddingLookup(Value table, std::vector<int> ids) {
  CheckSameTape(table);
  const Tensor& tt = nodes_[table.id].data;
  SCSOT_CHECK(tt.Rank() == 2, "EmbeddingLookup: rank-2 table required");
  int64_t v = tt.Dim(0), d = tt.Dim(1);
  int64_t n = static_cast<int64_t>(ids.size());
  SCSOT_CHECK(n > 0, "EmbeddingLookup: empty id list");
  for (int id : ids) {
    SCSOT_CHECK(id >= 0 && id < v,
                StrPrintf("EmbeddingLookup: id %d out of range [0,%ld)", id, v));
  }
  Tensor out({n, d});
  for (int64_t i = 0; i < n; ++i) {
    std::copy(tt.RowPtr(ids[i]), tt.RowPtr(ids[i]) + d, out.RowPtr(i));
  }
  auto backward = [ids, d](Tape* t, int32_t self) {
    const Node& node = t->nodes_[self];
    int32_t it = node.parents[0];
    if (!t->nodes_[it].requires_grad) return;
    Tensor& gt = t->GradRef(it);
    for (size_t i = 0; i < ids.size(); ++i) {
      K().axpy(1.0, node.grad.RowPtr(static_cast<int64_t>(i)),
               gt.RowPtr(ids[i]), d);
    }
  };
  return Unary(table, std::move(out), backward);
}

Value Tape::DepthwiseConv1d(Value x, Value kernel, Value bias) {
  CheckSameTape(x);
  CheckSameTape(kernel);
  CheckSameTape(bias);
  const Tensor& tx = nodes_[x.id].data;
  const Tensor& tk = nodes_[kernel.id].data;
  const Tensor& tb = nodes_[bias.id].data;
  SCSOT_CHECK(tx.Rank() == 2 && tk.Rank() == 2, "DepthwiseConv1d: rank-2 x/kernel");
  int64_t frames = tx.Dim(0), d = tx.Dim(1), ksize = tk.Dim(0);
  SCSOT_CHECK(tk.Dim(1) == d, "DepthwiseConv1d: kernel channel mismatch");
  SCSOT_CHECK(ksize % 2 == 1, "DepthwiseConv1d: kernel size must be odd");
  SCSOT_CHECK(tb.Rank() == 1 && tb.Dim(0) == d, "DepthwiseConv1d: bad bias");
  int64_t pad = ksize / 2;
  Tensor out({frames, d});
  for (int64_t ti = 0; ti < frames; ++ti) {
    double* orow = out.RowPtr(ti);
    std::copy(tb.Data(), tb.Data() + d, orow);
    for (int64_t j = 0; j < ksize; ++j) {
      int64_t src = ti + j - pad;
      if (src < 0 || src >= frames) continue;
      const double* xrow = tx.RowPtr(src);
      const double* krow = tk.RowPtr(j);
      for (int64_t c = 0; c < d; ++c) orow[c] += xrow[c] * krow[c];
    }
  }
  auto backward = [frames, d, ksize, pad](Tape* t, int32_t self) {
    const Node& node = t->nodes_[self];
    int32_t ix = node.parents[0], ik = node.parents[1], ib = node.parents[2];
    const Tensor& g = node.grad;
    const Tensor& tx = t->nodes_[ix].data;
    const Tensor& tk = t->nodes_[ik].data;
    if (t->nodes_[ib].requires_grad) {
      Tensor& gb = t->GradRef(ib);
      for (int64_t ti = 0; ti < frames; ++ti) K().axpy(1.0, g.RowPtr(ti), gb.Data(), d);
    }
    for (int64_t ti = 0; ti < frames; ++ti) {
      const double* grow = g.RowPtr(ti);
      for (int64_t j = 0; j < ksize; ++j) {
        int64_t src = ti + j - pad;
        if (src < 0 || src >= frames) continue;
        if (t->nodes_[ix].requires_grad) {
          double* gx = t->GradRef(ix).RowPtr(src);
          const double* krow = tk.RowPtr(j);
          for (int64_t c = 0; c < d; ++c) gx[c] += grow[c] * krow[c];
        }
        if (t->nodes_[ik].requires_grad) {
          double* gk = t->GradRef(ik).RowPtr(j);
          const double* xrow = tx.RowPtr(src);
          for (int64_t c = 0; c < d; ++c) gk[c] += grow[c] * xrow[c];
        }
      }
    }
  };
  return Wrap(NewNode(std::move(out), {x.id, kernel.id, bias.id}, backward));
}

Value Tape::CrossEntropyLogits(Value logits, std::vector<int> targets) {
  CheckSameTape(logits);
  const Tensor& tl = nodes_[logits.id].data;
  SCSOT_CHECK(tl.Rank() == 2, "CrossEntropyLogits: rank-2 logits required");
  int64_t n = tl.Dim(0), v = tl.Dim(1);
  SCSOT_CHECK(static_cast<int64_t>(targets.size()) == n,
              "CrossEntropyLogits: target count mismatch");
  for (int tgt : targets) {
    SCSOT_CHECK(tgt >= 0 && tgt < v, "CrossEntropyLogits: target id out of range");
  }
  Tensor probs({n, v});
  double total = 0.0;
  for (int64_t i = 0; i < n; ++i) {
    const double* row = tl.RowPtr(i);
    double m = row[0];
    for (int64_t j = 1; j < v; ++j) m = std::max(m, row[j]);
    double s = 0.0;
    for (int64_t j = 0; j < v; ++j) {
      double e = std::exp(row[j] - m);
      probs.At(i, j) = e;
      s += e;
    }
    double inv = 1.0 / s;
    for (int64_t j = 0; j < v; ++j) probs.At(i, j) *= inv;
    total += (m + std::log(s)) - row[targets[i]];
  }
  Tensor out = Tensor::Scalar(total / static_cast<double>(n));
  auto backward = [probs, targets, n, v](Tape* t, int32_t self) {
    const Node& node = t->nodes_[self];
    int32_t il = node.parents[0];
    if (!t->nodes_[il].requires_grad) return;
    double scale = node.grad.At(0) / static_cast<double>(n);
    Tensor& gl = t->GradRef(il);
    for (int64_t i = 0; i < n; ++i) {
      for (int64_t j = 0; j < v; ++j) {
        double delta = (j == targets[i]) ? 1.0 : 0.0;
        gl.At(i, j) += scale * (probs.At(i, j) - delta);
      }
    }
  };
  return Unary(logits, std::move(out), backward);
}

Value Tape::BinaryCrossEntropy(Value probs, Tensor targets, double eps) {
  CheckSameTape(probs);
  const Tensor& tp = nodes_[probs.id].data;
  SCSOT_CHECK(tp.SameShape(targets), "BinaryCrossEntropy: shape mismatch " +
                                         tp.ShapeStr() + " vs " +
                                         targets.ShapeStr());
  int64_t n = tp.NumElements();
  double total = 0.0;
  for (int64_t i = 0; i < n; ++i) {
    double p = std::min(std::max(tp.At(i), eps), 1.0 - eps);
    double y = targets.At(i);
    total += -(y * std::log(p) + (1.0 - y) * std::log(1.0 - p));
  }
  Tensor out = Tensor::Scalar(total / static_cast<double>(n));
  auto backward = [targets, eps, n](Tape* t, int32_t self) {
    const Node& node = t->nodes_[self];
    int32_t ip = node.parents[0];
    if (!t->nodes_[ip].requires_grad) return;
    const Tensor& tp = t->nodes_[ip].data;
    double scale = node.grad.At(0) / static_cast<double>(n);
    Tensor& gp = t->GradRef(ip);
    for (int64_t i = 0; i < n; ++i) {
      double raw = tp.At(i);
      if (raw <= eps || raw >= 1.0 - eps) continue;  // clamp region: zero slope
      double y = targets.At(i);
      gp.At(i) += scale * (raw - y) / (raw * (1.0 - raw));
    }
  };
  return Unary(probs, std::move(out), backward);
}

Value Tape::Sum(Value a) {
  CheckSameTape(a);
  const Tensor& ta = nodes_[a.id].data;
  Tensor out = Tensor::Scalar(K().sum(ta.Data(), ta.NumElements()));
  auto backward = [](Tape* t, int32_t self) {
    const Node& node = t->nodes_[self];
    int32_t ia = node.parents[0];
    if (!t->nodes_[ia].requires_grad) return;
    double g = node.grad.At(0);
    Tensor& ga = t->GradRef(ia);
    for (int64_t i = 0; i < ga.NumElements(); ++i) ga.At(i) += g;
  };
  return Unary(a, std::move(out), backward);
}

Value Tape::Mean(Value a) {
  CheckSameTape(a);
  int64_t n = nodes_[a.id].data.NumElements();
  return Scale(Sum(a), 1.0 / static_cast<double>(n));
}

Tape::LstmState Tape::LstmStep(Value x, LstmState state, Value w_ih, Value w_hh,
                               Value b_ih, Value b_hh) {
  const Tensor& th = nodes_[state.h.id].data;
  SCSOT_CHECK(th.Rank() == 2 && th.Dim(0) == 1, "LstmStep: h must be [1,hidden]");
  int64_t hidden = th.Dim(1);
  Value gates = Add(Add(MatMul(x, w_ih), b_ih), Add(MatMul(state.h, w_hh), b_hh));
  SCSOT_CHECK(gates.Data().Dim(1) == 4 * hidden, "LstmStep: weight width mismatch");
  Value i_gate = Sigmoid(Slice(gates, 1, 0, hidden));
  Value f_gate = Sigmoid(Slice(gates, 1, hidden, 2 * hidden));
  Value g_gate = Tanh(Slice(gates, 1, 2 * hidden, 3 * hidden));
  Value o_gate = Sigmoid(Slice(gates, 1, 3 * hidden, 4 * hidden));
  Value c_next = Add(Mul(f_gate, state.c), Mul(i_gate, g_gate));
  Value h_next = Mul(o_gate, Tanh(c_next));
  return LstmState{h_next, c_next};
}

void Tape::Backward(Value root) {
  CheckSameTape(root);
  SCSOT_CHECK(nodes_[root.id].data.NumElements() == 1,
              "Backward: root must be scalar, got " +
                  nodes_[root.id].data.ShapeStr());
  if (!grad_enabled_ || !nodes_[root.id].requires_grad) {
    SCSOT_CHECK(grad_enabled_, "Backward: tape recorded without gradients");
  }
  // Mark ancestors of the root.
  std::vector<char> reachable(nodes_.size(), 0);
  std::vector<int32_t> stack = {root.id};
  reachable[root.id] = 1;
  while (!stack.empty()) {
    int32_t id = stack.back();
    stack.pop_back();
    for (int32_t p : nodes_[id].parents) {
      if (!reachable[p] && nodes_[p].requires_grad) {
        reachable[p] = 1;
        stack.push_back(p);
      }
    }
  }
  if (nodes_[root.id].requires_grad) nodes_[root.id].grad.At(0) = 1.0;
  for (int32_t id = root.id; id >= 0; --id) {
    if (!reachable[id] || !nodes_[id].requires_grad) continue;
    if (nodes_[id].backward) nodes_[id].backward(this, id);
  }
  for (const auto& [param, leaf] : param_leaves_) {
    if (!reachable[leaf]) continue;
    Parameter* p = const_cast<Parameter*>(param);
    K().axpy(1.0, nodes_[leaf].grad.Data(), p->grad.Data(),
             p->grad.NumElements());
  }
}

}  // namespace scsot
