// Copyright 2026 The polyvec Authors.
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

#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "polyvec/errors.hpp"

namespace polyvec {

namespace detail {

struct TensorImpl {
  std::vector<std::size_t> shape;
  std::vector<double> values;  // row-major
  bool requires_grad = false;
  std::vector<double> grad;  // empty until touched by backward
};

}  // namespace detail

/// Dense 64-bit real array with an optional gradient slot. Value-semantic
/// handle over shared storage: copies alias the same buffer, which is what
/// the recorded graph closures rely on.
class Tensor {
 public:
  Tensor() : impl_(std::make_shared<detail::TensorImpl>()) {}

  static Tensor zeros(std::vector<std::size_t> shape, bool requires_grad = false);
  static Tensor full(std::vector<std::size_t> shape, double value, bool requires_grad = false);
  static Tensor from_values(std::vector<std::size_t> shape, std::vector<double> values,
                            bool requires_grad = false);
  static Tensor scalar(double value, bool requires_grad = false);

  const std::vector<std::size_t>& shape() const { return impl_->shape; }
  std::size_t size() const { return impl_->values.size(); }
  bool empty() const { return impl_->values.empty(); }

  /// Leading extent, or 1 for rank-0 tensors.
  std::size_t rows() const { return impl_->shape.empty() ? 1 : impl_->shape[0]; }
  /// Trailing extent for matrices, 1 for vectors/scalars.
  std::size_t cols() const {
    return impl_->shape.size() >= 2 ? impl_->shape[1] : (impl_->shape.empty() ? 1 : 1);
  }
  bool is_matrix() const { return impl_->shape.size() == 2; }

  std::vector<double>& values() { return impl_->values; }
  const std::vector<double>& values() const { return impl_->values; }

  double at(std::size_t r, std::size_t c) const { return impl_->values[r * cols() + c]; }
  double& at(std::size_t r, std::size_t c) { return impl_->values[r * cols() + c]; }

  double item() const {
    if (size() != 1) throw contract_error("item(): tensor has " + std::to_string(size()) + " elements");
    return impl_->values[0];
  }

  bool requires_grad() const { return impl_->requires_grad; }
  void set_requires_grad(bool b) { impl_->requires_grad = b; }

  bool has_grad() const { return !impl_->grad.empty(); }
  /// Gradient buffer, zero-initialized on first access.
  std::vector<double>& grad() {
    if (impl_->grad.size() != impl_->values.size()) impl_->grad.assign(impl_->values.size(), 0.0);
    return impl_->grad;
  }
  const std::vector<double>& grad() const { return impl_->grad; }
  void zero_grad() { impl_->grad.assign(impl_->values.size(), 0.0); }

  /// Deep copy (fresh storage, no aliasing).
  Tensor clone() const;

  std::string shape_string() const;

  detail::TensorImpl* impl() const { return impl_.get(); }
  const std::shared_ptr<detail::TensorImpl>& impl_ptr() const { return impl_; }

 private:
  std::shared_ptr<detail::TensorImpl> impl_;
};

/// Ordered record of executed primitives. Forward ops append one entry each;
/// backward replays the adjoints in exact reverse execution order, which
/// makes gradient accumulation deterministic.
class Graph {
 public:
  struct Record {
    std::shared_ptr<detail::TensorImpl> output;
    std::vector<std::shared_ptr<detail::TensorImpl>> inputs;
    std::function<void()> backward;
  };

  void record(const Tensor& output, std::vector<Tensor> inputs, std::function<void()> backward_fn);

  /// Seeds d(loss)/d(loss) = 1 and replays all adjoints. Gradients of every
  /// tensor touched by this graph are zeroed first, so repeated calls yield
  /// identical results.
  void backward(const Tensor& loss);

  std::size_t num_ops() const { return records_.size(); }
  void clear() { records_.clear(); }

 private:
  std::vector<Record> records_;
};

}  // namespace polyvec
