// scsot/parameters.h

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

#ifndef SCSOT_PARAMETERS_H_
#define SCSOT_PARAMETERS_H_

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "scsot/rng.h"
#include "scsot/tensor.h"

namespace scsot {

// One trainable tensor.  Gradients accumulate into `grad` across
// Tape::Backward calls until the optimizer consumes and zeroes them.
struct Parameter {
  std::string name;
  Tensor value;
  Tensor grad;

  Parameter(std::string name_in, Tensor value_in)
      : name(std::move(name_in)),
        value(std::move(value_in)),
        grad(Tensor::Zeros(value.Shape())) {}
};

enum class InitScheme {
  kMatrixUniform,  // uniform(-1/sqrt(fan_in), +1/sqrt(fan_in)), fan_in = dim 0
  kZeros,
  kOnes,
};

// Owns all parameters of a model.  Registration order is stable and defines
// both the RNG draw order and the checkpoint record order, so a fixed seed
// yields bit-identical initial weights across runs and kernel backends.
class ParameterStore {
 public:
  explicit ParameterStore(uint64_t seed) : rng_(SplitMix64(seed ^ 0x70617261)) {}

  ParameterStore(const ParameterStore&) = delete;
  ParameterStore& operator=(const ParameterStore&) = delete;

  // Creates and registers a parameter.  Names must be unique.
  Parameter* Create(const std::string& name, const std::vector<int64_t>& shape,
                    InitScheme scheme);

  Parameter* Find(const std::string& name) const;
  const std::vector<std::unique_ptr<Parameter>>& All() const { return params_; }
  int64_t TotalElements() const;

  void ZeroGrads();

  // Global L2 norm over all grads.
  double GradNorm() const;

 private:
  Rng rng_;
  std::vector<std::unique_ptr<Parameter>> params_;
  std::map<std::string, Parameter*> by_name_;
};

// Binary checkpoint of named f64 tensors, little-endian, magic "SCSOTCKP".
// Used both for model weights and for optimizer state records.
void SaveTensorRecords(const std::string& path,
                       const std::vector<std::pair<std::string, const Tensor*>>& records);
std::map<std::string, Tensor> LoadTensorRecords(const std::string& path);

// Writes every parameter value under its registered name.
void SaveCheckpoint(const std::string& path, const ParameterStore& store);

// Loads values into an already-constructed store.  Every parameter must be
// present with a matching shape; extra records are an error.
void LoadCheckpoint(const std::string& path, ParameterStore* store);

}  // namespace scsot

#endif  // SCSOT_PARAMETERS_H_
