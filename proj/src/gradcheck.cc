// scsot/gradcheck.cc

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

#include "scsot/gradcheck.h"

#include <algorithm>
#include <cmath>

#include "scsot/rng.h"

namespace scsot {

namespace {

// Relative error with a unit floor, so tiny gradients are compared on an
// absolute scale instead of blowing up the ratio.
double RelErr(double analytic, double numeric) {
  double denom = std::max({1.0, std::fabs(analytic), std::fabs(numeric)});
  return std::fabs(analytic - numeric) / denom;
}

// Picks which flat indices of a tensor to probe.
std::vector<int64_t> ProbeIndices(int64_t n, const GradCheckOptions& opt,
                                  uint64_t salt) {
  std::vector<int64_t> idx(static_cast<size_t>(n));
  for (int64_t i = 0; i < n; ++i) idx[static_cast<size_t>(i)] = i;
  if (opt.max_elements_per_tensor > 0 && n > opt.max_elements_per_tensor) {
    Rng rng(SplitMix64(opt.seed ^ salt));
    rng.Shuffle(&idx);
    idx.resize(static_cast<size_t>(opt.max_elements_per_tensor));
    std::sort(idx.begin(), idx.end());
  }
  return idx;
}

void RecordProbe(GradCheckReport* report, const std::string& label, int64_t i,
                 double analytic, double numeric, const GradCheckOptions& opt) {
  double err = RelErr(analytic, numeric);
  ++report->checked;
  if (err > report->max_rel_err) {
    report->max_rel_err = err;
    report->worst = StrPrintf("%s[%ld]: analytic=%.10g numeric=%.10g rel_err=%.3g",
                              label.c_str(), i, analytic, numeric, err);
  }
  if (err > opt.tol) report->ok = false;
}

}  // namespace

void GradCheckReport::Merge(const GradCheckReport& other) {
  ok = ok && other.ok;
  checked += other.checked;
  if (other.max_rel_err > max_rel_err) {
    max_rel_err = other.max_rel_err;
    worst = other.worst;
  }
}

GradCheckReport GradCheckInputs(
    const std::function<Value(Tape*, const std::vector<Value>&)>& fn,
    const std::vector<Tensor>& inputs, const GradCheckOptions& opt) {
  GradCheckReport report;

  // Analytic pass.
  std::vector<Tensor> grads;
  {
    Tape tape(true);
    std::vector<Value> leaves;
    leaves.reserve(inputs.size());
    for (const Tensor& t : inputs) leaves.push_back(tape.Input(t));
    Value loss = fn(&tape, leaves);
    tape.Backward(loss);
    for (Value v : leaves) grads.push_back(v.Grad());
  }

  auto eval = [&](const std::vector<Tensor>& probe) {
    Tape tape(false);
    std::vector<Value> leaves;
    leaves.reserve(probe.size());
    for (const Tensor& t : probe) leaves.push_back(tape.Input(t));
    return fn(&tape, leaves).Data().At(0);
  };

  std::vector<Tensor> probe = inputs;
  for (size_t k = 0; k < inputs.size(); ++k) {
    std::string label = StrPrintf("input%zu", k);
    for (int64_t i : ProbeIndices(inputs[k].NumElements(), opt, k + 1)) {
      double orig = probe[k].At(i);
      probe[k].At(i) = orig + opt.step;
      double up = eval(probe);
      probe[k].At(i) = orig - opt.step;
      double down = eval(probe);
      probe[k].At(i) = orig;
      double numeric = (up - down) / (2.0 * opt.step);
      RecordProbe(&report, label, i, grads[k].At(i), numeric, opt);
    }
  }
  return report;
}

GradCheckReport GradCheckParams(ParameterStore* store,
                                const std::function<Value(Tape*)>& fn,
                                const GradCheckOptions& opt) {
  GradCheckReport report;

  store->ZeroGrads();
  {
    Tape tape(true);
    Value loss = fn(&tape);
    tape.Backward(loss);
  }
  std::vector<Tensor> analytic;
  for (const auto& p : store->All()) analytic.push_back(p->grad);

  auto eval = [&]() {
    Tape tape(false);
    return fn(&tape).Data().At(0);
  };

  uint64_t salt = 1;
  for (size_t k = 0; k < store->All().size(); ++k, ++salt) {
    Parameter* p = store->All()[k].get();
    for (int64_t i : ProbeIndices(p->value.NumElements(), opt, salt)) {
      double orig = p->value.At(i);
      p->value.At(i) = orig + opt.step;
      double up = eval();
      p->value.At(i) = orig - opt.step;
      double down = eval();
      p->value.At(i) = orig;
      double numeric = (up - down) / (2.0 * opt.step);
      RecordProbe(&report, p->name, i, analytic[k].At(i), numeric, opt);
    }
  }
  store->ZeroGrads();
  return report;
}

}  // namespace scsot
