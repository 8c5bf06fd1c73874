// scsot/gradcheck.h

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

#ifndef SCSOT_GRADCHECK_H_
#define SCSOT_GRADCHECK_H_

#include <functional>
#include <string>
#include <vector>

#include "scsot/parameters.h"
#include "scsot/tape.h"
#include "scsot/tensor.h"

namespace scsot {

struct GradCheckOptions {
  double step = 1e-5;       // central difference half-width
  double tol = 1e-4;        // max allowed relative error
  int64_t max_elements_per_tensor = 0;  // 0 = check all elements
  uint64_t seed = 0;        // element subsampling seed
};

struct GradCheckReport {
  bool ok = true;
  double max_rel_err = 0.0;
  int64_t checked = 0;
  std::string worst;  // "tensor[i]: analytic=.. numeric=.." for the worst element

  void Merge(const GradCheckReport& other);
};

// Checks d(fn)/d(inputs[i]) against central finite differences.  `fn` must
// build a scalar loss on the given tape from the given input leaves; it is
// re-invoked on a fresh tape for every probe.
GradCheckReport GradCheckInputs(
    const std::function<Value(Tape*, const std::vector<Value>&)>& fn,
    const std::vector<Tensor>& inputs, const GradCheckOptions& opt);

// Checks d(fn)/d(theta) for every parameter in the store.  `fn` builds a
// scalar loss using Tape::Param leaves from this store.
GradCheckReport GradCheckParams(ParameterStore* store,
                                const std::function<Value(Tape*)>& fn,
                                const GradCheckOptions& opt);

}  // namespace scsot

#endif  // SCSOT_GRADCHECK_H_
