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

#include "polyvec/tensor.hpp"

#include <numeric>
#include <sstream>
#include <unordered_set>
#include <utility>

namespace polyvec {

namespace {

std::size_t shape_product(const std::vector<std::size_t>& shape) {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1},
                         std::multiplies<>());
}

}  // namespace

Tensor Tensor::zeros(std::vector<std::size_t> shape, bool requires_grad) {
  return full(std::move(shape), 0.0, requires_grad);
}

Tensor Tensor::full(std::vector<std::size_t> shape, double value, bool requires_grad) {
  Tensor t;
  const std::size_t n = shape_product(shape);
  t.impl_->shape = std::move(shape);
  t.impl_->values.assign(n, value);
  t.impl_->requires_grad = requires_grad;
  return t;
}

Tensor Tensor::from_values(std::vector<std::size_t> shape, std::vector<double> values,
                           bool requires_grad) {
  if (shape_product(shape) != values.size()) {
    throw dimension_error("from_values: shape holds " + std::to_string(shape_product(shape)) +
                          " elements but " + std::to_string(values.size()) + " were given");
  }
  Tensor t;
  t.impl_->shape = std::move(shape);
  t.impl_->values = std::move(values);
  t.impl_->requires_grad = requires_grad;
  return t;
}

Tensor Tensor::scalar(double value, bool requires_grad) {
  return from_values({1}, {value}, requires_grad);
}

Tensor Tensor::clone() const {
  Tensor t;
  *t.impl_ = *impl_;
  return t;
}

std::string Tensor::shape_string() const {
  std::ostringstream os;
  os << "[";
  for (std::size_t i = 0; i < impl_->shape.size(); ++i) {
    if (i) os << "x";
    os << impl_->shape[i];
  }
  os << "]";
  return os.str();
}

void Graph::record(const Tensor& output, std::vector<Tensor> inputs,
                   std::function<void()> backward_fn) {
  Record r;
  r.output = output.impl_ptr();
  r.inputs.reserve(inputs.size());
  for (const Tensor& t : inputs) r.inputs.push_back(t.impl_ptr());
  r.backward = std::move(backward_fn);
  records_.push_back(std::move(r));
}

void Graph::backward(const Tensor& loss) {
  if (loss.size() != 1) {
    throw contract_error("backward: loss must be scalar, got shape " + loss.shape_string());
  }
  bool reachable = records_.empty();
  for (const Record& r : records_) {
    if (r.output.get() == loss.impl()) {
      reachable = true;
      break;
    }
  }
  if (!reachable) throw contract_error("backward: loss tensor was not produced on this graph");

  // Zero every gradient this graph touches, then seed the loss.
  std::unordered_set<detail::TensorImpl*> seen;
  for (const Record& r : records_) {
    for (const auto& impls : {std::vector<std::shared_ptr<detail::TensorImpl>>{r.output}, r.inputs}) {
      for (const auto& impl : impls) {
        if (seen.insert(impl.get()).second) impl->grad.assign(impl->values.size(), 0.0);
      }
    }
  }
  if (seen.insert(loss.impl()).second) loss.impl()->grad.assign(1, 0.0);
  loss.impl()->grad[0] = 1.0;

  for (auto it = records_.rbegin(); it != records_.rend(); ++it) it->backward();
}

}  // namespace polyvec
