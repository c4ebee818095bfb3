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

#include "polyvec/ops.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <utility>

namespace polyvec {

namespace {

void require_matrix(const Tensor& t, const char* op) {
  if (!t.is_matrix()) {
    throw dimension_error(std::string(op) + ": expected a matrix, got shape " + t.shape_string());
  }
}

void require_same_shape(const Tensor& a, const Tensor& b, const char* op) {
  if (a.shape() != b.shape()) {
    throw dimension_error(std::string(op) + ": shape mismatch " + a.shape_string() + " vs " +
                          b.shape_string());
  }
}

bool any_grad(std::initializer_list<const Tensor*> ts) {
  for (const Tensor* t : ts) {
    if (t->requires_grad()) return true;
  }
  return false;
}

// Result tensors carry requires_grad when any input does, so connectivity
// propagates through the tape.
Tensor make_output(std::vector<std::size_t> shape, std::initializer_list<const Tensor*> inputs) {
  return Tensor::zeros(std::move(shape), any_grad(inputs));
}

}  // namespace

Tensor matmul(Graph& g, const Tensor& a, const Tensor& b) {
  require_matrix(a, "matmul");
  require_matrix(b, "matmul");
  if (a.cols() != b.rows()) {
    throw dimension_error("matmul: inner dimensions disagree, " + a.shape_string() + " vs " +
                          b.shape_string());
  }
  const std::size_t m = a.rows(), k = a.cols(), n = b.cols();
  Tensor out = make_output({m, n}, {&a, &b});
  const double* av = a.values().data();
  const double* bv = b.values().data();
  double* ov = out.values().data();
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t p = 0; p < k; ++p) {
      const double aip = av[i * k + p];
      if (aip == 0.0) continue;
      for (std::size_t j = 0; j < n; ++j) ov[i * n + j] += aip * bv[p * n + j];
    }
  }
  g.record(out, {a, b}, [a, b, out, m, k, n]() {
    const double* go = out.impl()->grad.data();
    double* ga = a.impl()->grad.data();
    double* gb = b.impl()->grad.data();
    const double* av2 = a.values().data();
    const double* bv2 = b.values().data();
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        const double gij = go[i * n + j];
        if (gij == 0.0) continue;
        for (std::size_t p = 0; p < k; ++p) {
          ga[i * k + p] += gij * bv2[p * n + j];
          gb[p * n + j] += av2[i * k + p] * gij;
        }
      }
  });
  return out;
}

Tensor matmul_nt(Graph& g, const Tensor& a, const Tensor& b) {
  require_matrix(a, "matmul_nt");
  require_matrix(b, "matmul_nt");
  if (a.cols() != b.cols()) {
    throw dimension_error("matmul_nt: inner dimensions disagree, " + a.shape_string() + " vs " +
                          b.shape_string() + "^T");
  }
  const std::size_t m = a.rows(), k = a.cols(), n = b.rows();
  Tensor out = make_output({m, n}, {&a, &b});
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      double s = 0.0;
      for (std::size_t p = 0; p < k; ++p) s += a.values()[i * k + p] * b.values()[j * k + p];
      out.values()[i * n + j] = s;
    }
  g.record(out, {a, b}, [a, b, out, m, k, n]() {
    const double* go = out.impl()->grad.data();
    double* ga = a.impl()->grad.data();
    double* gb = b.impl()->grad.data();
    const double* av = a.values().data();
    const double* bv = b.values().data();
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        const double gij = go[i * n + j];
        if (gij == 0.0) continue;
        for (std::size_t p = 0; p < k; ++p) {
          ga[i * k + p] += gij * bv[j * k + p];
          gb[j * k + p] += gij * av[i * k + p];
        }
      }
  });
  return out;
}

Tensor add(Graph& g, const Tensor& a, const Tensor& b) {
  require_same_shape(a, b, "add");
  Tensor out = make_output(a.shape(), {&a, &b});
  for (std::size_t i = 0; i < a.size(); ++i) out.values()[i] = a.values()[i] + b.values()[i];
  g.record(out, {a, b}, [a, b, out]() {
    const auto& go = out.impl()->grad;
    auto& ga = a.impl()->grad;
    auto& gb = b.impl()->grad;
    for (std::size_t i = 0; i < go.size(); ++i) {
      ga[i] += go[i];
      gb[i] += go[i];
    }
  });
  return out;
}

Tensor add_row_bias(Graph& g, const Tensor& x, const Tensor& bias) {
  require_matrix(x, "add_row_bias");
  if (bias.size() != x.cols()) {
    throw dimension_error("add_row_bias: bias " + bias.shape_string() + " does not match row width " +
                          std::to_string(x.cols()));
  }
  const std::size_t n = x.rows(), d = x.cols();
  Tensor out = make_output({n, d}, {&x, &bias});
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < d; ++j) out.values()[i * d + j] = x.values()[i * d + j] + bias.values()[j];
  g.record(out, {x, bias}, [x, bias, out, n, d]() {
    const auto& go = out.impl()->grad;
    auto& gx = x.impl()->grad;
    auto& gb = bias.impl()->grad;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < d; ++j) {
        gx[i * d + j] += go[i * d + j];
        gb[j] += go[i * d + j];
      }
  });
  return out;
}

Tensor scale(Graph& g, const Tensor& x, double c) {
  Tensor out = make_output(x.shape(), {&x});
  for (std::size_t i = 0; i < x.size(); ++i) out.values()[i] = c * x.values()[i];
  g.record(out, {x}, [x, out, c]() {
    const auto& go = out.impl()->grad;
    auto& gx = x.impl()->grad;
    for (std::size_t i = 0; i < go.size(); ++i) gx[i] += c * go[i];
  });
  return out;
}

Tensor relu(Graph& g, const Tensor& x) {
  Tensor out = make_output(x.shape(), {&x});
  for (std::size_t i = 0; i < x.size(); ++i) out.values()[i] = std::max(x.values()[i], 0.0);
  g.record(out, {x}, [x, out]() {
    const auto& go = out.impl()->grad;
    auto& gx = x.impl()->grad;
    for (std::size_t i = 0; i < go.size(); ++i) {
      if (x.values()[i] > 0.0) gx[i] += go[i];
    }
  });
  return out;
}

Tensor layer_norm(Graph& g, const Tensor& x, const Tensor& gamma, const Tensor& beta, double eps) {
  require_matrix(x, "layer_norm");
  const std::size_t n = x.rows(), d = x.cols();
  if (d < 1) throw dimension_error("layer_norm: rows must have width >= 1");
  if (gamma.size() != d || beta.size() != d) {
    throw dimension_error("layer_norm: gamma/beta must have length " + std::to_string(d));
  }
  Tensor out = make_output({n, d}, {&x, &gamma, &beta});
  // Cache the per-row normalized values and inverse stddev for the adjoint.
  auto xhat = std::make_shared<std::vector<double>>(n * d);
  auto inv_std = std::make_shared<std::vector<double>>(n);
  for (std::size_t i = 0; i < n; ++i) {
    double mean = 0.0;
    for (std::size_t j = 0; j < d; ++j) mean += x.values()[i * d + j];
    mean /= static_cast<double>(d);
    double var = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      const double c = x.values()[i * d + j] - mean;
      var += c * c;
    }
    var /= static_cast<double>(d);
    const double is = 1.0 / std::sqrt(var + eps);
    (*inv_std)[i] = is;
    for (std::size_t j = 0; j < d; ++j) {
      const double h = (x.values()[i * d + j] - mean) * is;
      (*xhat)[i * d + j] = h;
      out.values()[i * d + j] = h * gamma.values()[j] + beta.values()[j];
    }
  }
  g.record(out, {x, gamma, beta}, [x, gamma, beta, out, xhat, inv_std, n, d]() {
    const auto& go = out.impl()->grad;
    auto& gx = x.impl()->grad;
    auto& gg = gamma.impl()->grad;
    auto& gb = beta.impl()->grad;
    for (std::size_t i = 0; i < n; ++i) {
      double mean_dh = 0.0, mean_dh_h = 0.0;
      for (std::size_t j = 0; j < d; ++j) {
        const double dh = go[i * d + j] * gamma.values()[j];
        mean_dh += dh;
        mean_dh_h += dh * (*xhat)[i * d + j];
      }
      mean_dh /= static_cast<double>(d);
      mean_dh_h /= static_cast<double>(d);
      for (std::size_t j = 0; j < d; ++j) {
        const double h = (*xhat)[i * d + j];
        const double dh = go[i * d + j] * gamma.values()[j];
        gx[i * d + j] += (dh - mean_dh - h * mean_dh_h) * (*inv_std)[i];
        gg[j] += go[i * d + j] * h;
        gb[j] += go[i * d + j];
      }
    }
  });
  return out;
}

Tensor max_pool_groups(Graph& g, const Tensor& x, const std::vector<std::size_t>& groups,
                       std::size_t n_groups) {
  require_matrix(x, "max_pool_groups");
  const std::size_t n = x.rows(), d = x.cols();
  if (groups.size() != n) {
    throw dimension_error("max_pool_groups: " + std::to_string(groups.size()) + " group ids for " +
                          std::to_string(n) + " rows");
  }
  std::vector<std::size_t> members(n_groups, 0);
  for (std::size_t id : groups) {
    if (id >= n_groups) throw data_error("max_pool_groups: group id " + std::to_string(id) + " out of range");
    ++members[id];
  }
  for (std::size_t gi = 0; gi < n_groups; ++gi) {
    if (members[gi] == 0) throw data_error("max_pool_groups: group " + std::to_string(gi) + " is empty");
  }
  Tensor out = make_output({n_groups, d}, {&x});
  // argmax per (group, column); ties resolve to the lowest row index because
  // rows are scanned in order with a strict '>'.
  auto argmax = std::make_shared<std::vector<std::size_t>>(n_groups * d);
  std::vector<bool> seeded(n_groups, false);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t gi = groups[i];
    for (std::size_t j = 0; j < d; ++j) {
      const double v = x.values()[i * d + j];
      if (!seeded[gi] || v > out.values()[gi * d + j]) {
        out.values()[gi * d + j] = v;
        (*argmax)[gi * d + j] = i;
      }
    }
    seeded[gi] = true;
  }
  g.record(out, {x}, [x, out, argmax, n_groups, d]() {
    const auto& go = out.impl()->grad;
    auto& gx = x.impl()->grad;
    for (std::size_t gi = 0; gi < n_groups; ++gi)
      for (std::size_t j = 0; j < d; ++j) gx[(*argmax)[gi * d + j] * d + j] += go[gi * d + j];
  });
  return out;
}

Tensor gather_rows(Graph& g, const Tensor& x, const std::vector<std::size_t>& rows) {
  require_matrix(x, "gather_rows");
  const std::size_t d = x.cols();
  for (std::size_t r : rows) {
    if (r >= x.rows()) throw data_error("gather_rows: row " + std::to_string(r) + " out of range");
  }
  Tensor out = make_output({rows.size(), d}, {&x});
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < d; ++j) out.values()[i * d + j] = x.values()[rows[i] * d + j];
  auto idx = std::make_shared<std::vector<std::size_t>>(rows);
  g.record(out, {x}, [x, out, idx, d]() {
    const auto& go = out.impl()->grad;
    auto& gx = x.impl()->grad;
    for (std::size_t i = 0; i < idx->size(); ++i)
      for (std::size_t j = 0; j < d; ++j) gx[(*idx)[i] * d + j] += go[i * d + j];
  });
  return out;
}

Tensor concat_cols(Graph& g, const Tensor& a, const Tensor& b) {
  require_matrix(a, "concat");
  require_matrix(b, "concat");
  if (a.rows() != b.rows()) {
    throw dimension_error("concat: row counts disagree, " + a.shape_string() + " vs " +
                          b.shape_string());
  }
  const std::size_t n = a.rows(), da = a.cols(), db = b.cols();
  Tensor out = make_output({n, da + db}, {&a, &b});
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < da; ++j) out.values()[i * (da + db) + j] = a.values()[i * da + j];
    for (std::size_t j = 0; j < db; ++j) out.values()[i * (da + db) + da + j] = b.values()[i * db + j];
  }
  g.record(out, {a, b}, [a, b, out, n, da, db]() {
    const auto& go = out.impl()->grad;
    auto& ga = a.impl()->grad;
    auto& gb = b.impl()->grad;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < da; ++j) ga[i * da + j] += go[i * (da + db) + j];
      for (std::size_t j = 0; j < db; ++j) gb[i * db + j] += go[i * (da + db) + da + j];
    }
  });
  return out;
}

Tensor softmax_rows(Graph& g, const Tensor& x) {
  require_matrix(x, "softmax_rows");
  const std::size_t n = x.rows(), d = x.cols();
  Tensor out = make_output({n, d}, {&x});
  for (std::size_t i = 0; i < n; ++i) {
    double mx = x.values()[i * d];
    for (std::size_t j = 1; j < d; ++j) mx = std::max(mx, x.values()[i * d + j]);
    double sum = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      const double e = std::exp(x.values()[i * d + j] - mx);
      out.values()[i * d + j] = e;
      sum += e;
    }
    for (std::size_t j = 0; j < d; ++j) out.values()[i * d + j] /= sum;
  }
  g.record(out, {x}, [x, out, n, d]() {
    const auto& go = out.impl()->grad;
    auto& gx = x.impl()->grad;
    for (std::size_t i = 0; i < n; ++i) {
      double dot = 0.0;
      for (std::size_t j = 0; j < d; ++j) dot += go[i * d + j] * out.values()[i * d + j];
      for (std::size_t j = 0; j < d; ++j) {
        gx[i * d + j] += out.values()[i * d + j] * (go[i * d + j] - dot);
      }
    }
  });
  return out;
}

Tensor l2_normalize_rows(Graph& g, const Tensor& x, double eps) {
  require_matrix(x, "l2_normalize_rows");
  const std::size_t n = x.rows(), d = x.cols();
  Tensor out = make_output({n, d}, {&x});
  auto norms = std::make_shared<std::vector<double>>(n);
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < d; ++j) s += x.values()[i * d + j] * x.values()[i * d + j];
    const double norm = std::max(std::sqrt(s), eps);
    (*norms)[i] = norm;
    for (std::size_t j = 0; j < d; ++j) out.values()[i * d + j] = x.values()[i * d + j] / norm;
  }
  g.record(out, {x}, [x, out, norms, eps, n, d]() {
    const auto& go = out.impl()->grad;
    auto& gx = x.impl()->grad;
    for (std::size_t i = 0; i < n; ++i) {
      const double norm = (*norms)[i];
      // Below the eps floor the map is x/eps, a plain scaling.
      double s = 0.0;
      for (std::size_t j = 0; j < d; ++j) s += x.values()[i * d + j] * x.values()[i * d + j];
      const bool clamped = std::sqrt(s) < eps;
      if (clamped) {
        for (std::size_t j = 0; j < d; ++j) gx[i * d + j] += go[i * d + j] / norm;
      } else {
        double dot = 0.0;
        for (std::size_t j = 0; j < d; ++j) dot += go[i * d + j] * out.values()[i * d + j];
        for (std::size_t j = 0; j < d; ++j) {
          gx[i * d + j] += (go[i * d + j] - out.values()[i * d + j] * dot) / norm;
        }
      }
    }
  });
  return out;
}

Tensor zero_rows(Graph& g, const Tensor& x, const std::vector<bool>& row_mask) {
  require_matrix(x, "zero_rows");
  if (row_mask.size() != x.rows()) {
    throw dimension_error("zero_rows: mask of length " + std::to_string(row_mask.size()) + " for " +
                          std::to_string(x.rows()) + " rows");
  }
  const std::size_t n = x.rows(), d = x.cols();
  Tensor out = make_output({n, d}, {&x});
  for (std::size_t i = 0; i < n; ++i) {
    if (row_mask[i]) continue;
    for (std::size_t j = 0; j < d; ++j) out.values()[i * d + j] = x.values()[i * d + j];
  }
  auto mask = std::make_shared<std::vector<bool>>(row_mask);
  g.record(out, {x}, [x, out, mask, n, d]() {
    const auto& go = out.impl()->grad;
    auto& gx = x.impl()->grad;
    for (std::size_t i = 0; i < n; ++i) {
      if ((*mask)[i]) continue;
      for (std::size_t j = 0; j < d; ++j) gx[i * d + j] += go[i * d + j];
    }
  });
  return out;
}

Tensor reshape(Graph& g, const Tensor& x, std::vector<std::size_t> shape) {
  Tensor out = Tensor::from_values(std::move(shape), x.values(), x.requires_grad());
  g.record(out, {x}, [x, out]() {
    const auto& go = out.impl()->grad;
    auto& gx = x.impl()->grad;
    for (std::size_t i = 0; i < go.size(); ++i) gx[i] += go[i];
  });
  return out;
}

Tensor sum_all(Graph& g, const Tensor& x) {
  Tensor out = make_output({1}, {&x});
  out.values()[0] = std::accumulate(x.values().begin(), x.values().end(), 0.0);
  g.record(out, {x}, [x, out]() {
    const double go = out.impl()->grad[0];
    auto& gx = x.impl()->grad;
    for (std::size_t i = 0; i < gx.size(); ++i) gx[i] += go;
  });
  return out;
}

Tensor huber(Graph& g, const Tensor& pred, const Tensor& target, double delta) {
  require_same_shape(pred, target, "huber");
  if (delta <= 0.0) throw parameter_error("huber: delta must be positive");
  const std::size_t n = pred.size();
  Tensor out = make_output({1}, {&pred, &target});
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = pred.values()[i] - target.values()[i];
    acc += std::abs(r) <= delta ? 0.5 * r * r : delta * (std::abs(r) - 0.5 * delta);
  }
  out.values()[0] = n > 0 ? acc / static_cast<double>(n) : 0.0;
  g.record(out, {pred, target}, [pred, target, out, delta, n]() {
    if (n == 0) return;
    const double go = out.impl()->grad[0] / static_cast<double>(n);
    auto& gp = pred.impl()->grad;
    auto& gt = target.impl()->grad;
    for (std::size_t i = 0; i < n; ++i) {
      const double r = pred.values()[i] - target.values()[i];
      const double w = std::abs(r) <= delta ? r : (r > 0.0 ? delta : -delta);
      gp[i] += go * w;
      gt[i] -= go * w;
    }
  });
  return out;
}

Tensor gaussian_nll(Graph& g, const Tensor& pred_offsets, const Tensor& gt_offsets) {
  require_same_shape(pred_offsets, gt_offsets, "gaussian_nll");
  const std::size_t t_steps = pred_offsets.rows();
  const std::size_t n = pred_offsets.size();
  Tensor out = make_output({1}, {&pred_offsets, &gt_offsets});
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = pred_offsets.values()[i] - gt_offsets.values()[i];
    acc += r * r;
  }
  out.values()[0] = 0.5 * acc / static_cast<double>(t_steps);
  g.record(out, {pred_offsets, gt_offsets}, [pred_offsets, gt_offsets, out, t_steps, n]() {
    const double go = out.impl()->grad[0] / static_cast<double>(t_steps);
    auto& gp = pred_offsets.impl()->grad;
    auto& gt = gt_offsets.impl()->grad;
    for (std::size_t i = 0; i < n; ++i) {
      const double r = pred_offsets.values()[i] - gt_offsets.values()[i];
      gp[i] += go * r;
      gt[i] -= go * r;
    }
  });
  return out;
}

}  // namespace polyvec
