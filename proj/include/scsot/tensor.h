// scsot/tensor.h

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

#ifndef SCSOT_TENSOR_H_
#define SCSOT_TENSOR_H_

#include <cstdint>
#include <initializer_list>
#include <string>
#include <vector>

#include "scsot/common.h"

namespace scsot {

// Dense row-major tensor of doubles, rank 1..3.  All model math runs in
// 64-bit precision; 32-bit floats appear only in the feature file format.
class Tensor {
 public:
  Tensor() = default;

  explicit Tensor(std::vector<int64_t> shape) : shape_(std::move(shape)) {
    SCSOT_CHECK(!shape_.empty() && shape_.size() <= 3,
                "Tensor rank must be 1..3");
    int64_t n = 1;
    for (int64_t d : shape_) {
      SCSOT_CHECK(d >= 0, "negative dimension");
      n *= d;
    }
    data_.assign(static_cast<size_t>(n), 0.0);
  }

  Tensor(std::vector<int64_t> shape, std::vector<double> data)
      : shape_(std::move(shape)), data_(std::move(data)) {
    SCSOT_CHECK(!shape_.empty() && shape_.size() <= 3,
                "Tensor rank must be 1..3");
    int64_t n = 1;
    for (int64_t d : shape_) n *= d;
    SCSOT_CHECK(static_cast<int64_t>(data_.size()) == n,
                "shape/data size mismatch");
  }

  static Tensor Zeros(std::vector<int64_t> shape) { return Tensor(std::move(shape)); }

  static Tensor Full(std::vector<int64_t> shape, double value) {
    Tensor t(std::move(shape));
    for (double& x : t.data_) x = value;
    return t;
  }

  static Tensor Scalar(double value) { return Tensor({1}, {value}); }

  static Tensor FromRow(const std::vector<double>& row) {
    return Tensor({1, static_cast<int64_t>(row.size())}, row);
  }

  int Rank() const { return static_cast<int>(shape_.size()); }
  const std::vector<int64_t>& Shape() const { return shape_; }
  int64_t Dim(int axis) const { return shape_[static_cast<size_t>(axis)]; }
  int64_t NumElements() const { return static_cast<int64_t>(data_.size()); }

  // Rank-2 convenience.
  int64_t Rows() const { return shape_.size() >= 1 ? shape_[0] : 0; }
  int64_t Cols() const {
    SCSOT_CHECK(shape_.size() == 2, "Cols() requires rank 2");
    return shape_[1];
  }

  double* Data() { return data_.data(); }
  const double* Data() const { return data_.data(); }
  std::vector<double>& Vec() { return data_; }
  const std::vector<double>& Vec() const { return data_; }

  double& At(int64_t i) { return data_[static_cast<size_t>(i)]; }
  double At(int64_t i) const { return data_[static_cast<size_t>(i)]; }
  double& At(int64_t i, int64_t j) {
    return data_[static_cast<size_t>(i * shape_[1] + j)];
  }
  double At(int64_t i, int64_t j) const {
    return data_[static_cast<size_t>(i * shape_[1] + j)];
  }

  double* RowPtr(int64_t i) { return data_.data() + i * shape_[1]; }
  const double* RowPtr(int64_t i) const { return data_.data() + i * shape_[1]; }

  bool SameShape(const Tensor& other) const { return shape_ == other.shape_; }

  bool AllFinite() const;

  std::string ShapeStr() const;

 private:
  std::vector<int64_t> shape_;
  std::vector<double> data_;
};

}  // namespace scsot

#endif  // SCSOT_TENSOR_H_
