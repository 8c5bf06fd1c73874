// scsot/parameters.cc

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

#include "scsot/parameters.h"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>

#include "scsot/common.h"

namespace scsot {

namespace {

constexpr char kMagic[8] = {'S', 'C', 'S', 'O', 'T', 'C', 'K', 'P'};

void WriteU32(std::ostream& os, uint32_t v) {
  unsigned char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  os.write(reinterpret_cast<const char*>(b), 4);
}

void WriteU64(std::ostream& os, uint64_t v) {
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  os.write(reinterpret_cast<const char*>(b), 8);
}

uint32_t ReadU32(std::istream& is) {
  unsigned char b[4];
  is.read(reinterpret_cast<char*>(b), 4);
  SCSOT_CHECK(is.good(), "checkpoint: truncated u32");
  uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<uint32_t>(b[i]) << (8 * i);
  return v;
}

uint64_t ReadU64(std::istream& is) {
  unsigned char b[8];
  is.read(reinterpret_cast<char*>(b), 8);
  SCSOT_CHECK(is.good(), "checkpoint: truncated u64");
  uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<uint64_t>(b[i]) << (8 * i);
  return v;
}

void WriteF64Array(std::ostream& os, const double* data, int64_t n) {
  for (int64_t i = 0; i < n; ++i) {
    uint64_t bits;
    std::memcpy(&bits, &data[i], sizeof(bits));
    WriteU64(os, bits);
  }
}

void ReadF64Array(std::istream& is, double* data, int64_t n) {
  for (int64_t i = 0; i < n; ++i) {
    uint64_t bits = ReadU64(is);
    std::memcpy(&data[i], &bits, sizeof(bits));
  }
}

}  // namespace

Parameter* ParameterStore::Create(const std::string& name,
                                  const std::vector<int64_t>& shape,
                                  InitScheme scheme) {
  SCSOT_CHECK(by_name_.find(name) == by_name_.end(),
              "duplicate parameter name: " + name);
  Tensor value = Tensor::Zeros(shape);
  switch (scheme) {
    case InitScheme::kMatrixUniform: {
      SCSOT_CHECK(shape.size() >= 1, "kMatrixUniform needs a shaped tensor");
      double fan_in = static_cast<double>(shape[0]);
      double bound = 1.0 / std::sqrt(fan_in);
      for (int64_t i = 0; i < value.NumElements(); ++i) {
        value.At(i) = rng_.Uniform(-bound, bound);
      }
      break;
    }
    case InitScheme::kZeros:
      break;
    case InitScheme::kOnes:
      for (int64_t i = 0; i < value.NumElements(); ++i) value.At(i) = 1.0;
      break;
  }
  params_.push_back(std::make_unique<Parameter>(name, std::move(value)));
  Parameter* p = params_.back().get();
  by_name_[name] = p;
  return p;
}

Parameter* ParameterStore::Find(const std::string& name) const {
  auto it = by_name_.find(name);
  return (it == by_name_.end()) ? nullptr : it->second;
}

int64_t ParameterStore::TotalElements() const {
  int64_t total = 0;
  for (const auto& p : params_) total += p->value.NumElements();
  return total;
}

void ParameterStore::ZeroGrads() {
  for (const auto& p : params_) {
    std::fill(p->grad.Data(), p->grad.Data() + p->grad.NumElements(), 0.0);
  }
}

double ParameterStore::GradNorm() const {
  double sq = 0.0;
  for (const auto& p : params_) {
    for (int64_t i = 0; i < p->grad.NumElements(); ++i) {
      sq += p->grad.At(i) * p->grad.At(i);
    }
  }
  return std::sqrt(sq);
}

void SaveTensorRecords(
    const std::string& path,
    const std::vector<std::pair<std::string, const Tensor*>>& records) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  SCSOT_CHECK(os.good(), "cannot open for writing: " + path);
  os.write(kMagic, 8);
  WriteU32(os, static_cast<uint32_t>(records.size()));
  for (const auto& [name, tensor] : records) {
    WriteU32(os, static_cast<uint32_t>(name.size()));
    os.write(name.data(), static_cast<std::streamsize>(name.size()));
    WriteU32(os, static_cast<uint32_t>(tensor->Rank()));
    for (int d = 0; d < tensor->Rank(); ++d) {
      WriteU64(os, static_cast<uint64_t>(tensor->Dim(d)));
    }
    WriteF64Array(os, tensor->Data(), tensor->NumElements());
  }
  SCSOT_CHECK(os.good(), "write failed: " + path);
}

std::map<std::string, Tensor> LoadTensorRecords(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  SCSOT_CHECK(is.good(), "cannot open checkpoint: " + path);
  char magic[8];
  is.read(magic, 8);
  SCSOT_CHECK(is.good() && std::memcmp(magic, kMagic, 8) == 0,
              "bad checkpoint magic in " + path);
  uint32_t count = ReadU32(is);
  std::map<std::string, Tensor> out;
  for (uint32_t r = 0; r < count; ++r) {
    uint32_t name_len = ReadU32(is);
    std::string name(name_len, '\0');
    is.read(name.data(), name_len);
    SCSOT_CHECK(is.good(), "checkpoint: truncated record name");
    uint32_t rank = ReadU32(is);
    SCSOT_CHECK(rank >= 1 && rank <= 3, "checkpoint: bad rank for " + name);
    std::vector<int64_t> shape(rank);
    for (uint32_t d = 0; d < rank; ++d) {
      shape[d] = static_cast<int64_t>(ReadU64(is));
    }
    Tensor t = Tensor::Zeros(shape);
    ReadF64Array(is, t.Data(), t.NumElements());
    SCSOT_CHECK(out.emplace(name, std::move(t)).second,
                "checkpoint: duplicate record " + name);
  }
  return out;
}

void SaveCheckpoint(const std::string& path, const ParameterStore& store) {
  std::vector<std::pair<std::string, const Tensor*>> records;
  records.reserve(store.All().size());
  for (const auto& p : store.All()) records.emplace_back(p->name, &p->value);
  SaveTensorRecords(path, records);
}

void LoadCheckpoint(const std::string& path, ParameterStore* store) {
  std::map<std::string, Tensor> records = LoadTensorRecords(path);
  for (const auto& p : store->All()) {
    auto it = records.find(p->name);
    SCSOT_CHECK(it != records.end(), "checkpoint missing parameter: " + p->name);
    SCSOT_CHECK(it->second.SameShape(p->value),
                "checkpoint shape mismatch for " + p->name + ": " +
                    it->second.ShapeStr() + " vs " + p->value.ShapeStr());
    p->value = std::move(it->second);
    records.erase(it);
  }
  SCSOT_CHECK(records.empty(),
              "checkpoint has unknown record: " + records.begin()->first);
}

}  // namespace scsot
