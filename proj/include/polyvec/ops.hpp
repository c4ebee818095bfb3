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
#include <vector>

#include "polyvec/tensor.hpp"

namespace polyvec {

// Reverse-mode primitives. Each op computes its forward result, appends one
// record to the graph, and the recorded closure accumulates the adjoints
// (+=) into the input gradients. Shapes are validated eagerly.

/// a[m x k] times b[k x n].
Tensor matmul(Graph& g, const Tensor& a, const Tensor& b);

/// a[m x k] times b[n x k]^T (used for attention scores).
Tensor matmul_nt(Graph& g, const Tensor& a, const Tensor& b);

/// Elementwise sum of two same-shape tensors.
Tensor add(Graph& g, const Tensor& a, const Tensor& b);

/// x[n x d] with bias[d] added to every row.
Tensor add_row_bias(Graph& g, const Tensor& x, const Tensor& bias);

/// Constant scaling.
Tensor scale(Graph& g, const Tensor& x, double c);

/// max(x, 0); the subgradient at 0 is 0.
Tensor relu(Graph& g, const Tensor& x);

/// Per-row (x - mean) / sqrt(var + eps) * gamma + beta with population
/// variance. gamma/beta have length d.
Tensor layer_norm(Graph& g, const Tensor& x, const Tensor& gamma, const Tensor& beta,
                  double eps = 1e-5);

/// Per-group columnwise maximum. groups[i] in [0, n_groups) assigns row i;
/// every group must be nonempty. Backward routes each output gradient to the
/// single argmax member (ties break to the lowest row index).
Tensor max_pool_groups(Graph& g, const Tensor& x, const std::vector<std::size_t>& groups,
                       std::size_t n_groups);

/// out[i] = x[rows[i]]; backward scatter-adds.
Tensor gather_rows(Graph& g, const Tensor& x, const std::vector<std::size_t>& rows);

/// Rowwise concatenation [a | b].
Tensor concat_cols(Graph& g, const Tensor& a, const Tensor& b);

/// Numerically stable per-row softmax; every output row sums to 1.
Tensor softmax_rows(Graph& g, const Tensor& x);

/// Each row divided by max(row L2 norm, eps).
Tensor l2_normalize_rows(Graph& g, const Tensor& x, double eps = 1e-12);

/// Rows with row_mask[i] == true are zeroed (gradient blocked there).
Tensor zero_rows(Graph& g, const Tensor& x, const std::vector<bool>& row_mask);

/// Same data, new shape (element count preserved).
Tensor reshape(Graph& g, const Tensor& x, std::vector<std::size_t> shape);

/// Scalar sum of all elements.
Tensor sum_all(Graph& g, const Tensor& x);

/// Mean elementwise Huber loss: 0.5 r^2 for |r| <= delta, else
/// delta (|r| - 0.5 delta), r = pred - target. Gradients flow to both sides.
Tensor huber(Graph& g, const Tensor& pred, const Tensor& target, double delta);

/// Negative Gaussian log-likelihood with fixed unit isotropic variance and
/// the constant dropped: 0.5 sum(|pred-gt|^2) / T over T offset rows. Zero iff
/// pred == gt.
Tensor gaussian_nll(Graph& g, const Tensor& pred_offsets, const Tensor& gt_offsets);

}  // namespace polyvec
