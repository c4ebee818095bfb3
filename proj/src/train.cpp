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

#include "polyvec/train.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <ostream>
#include <sstream>
#include <thread>

#include "polyvec/checkpoint.hpp"
#include "polyvec/errors.hpp"
#include "polyvec/metrics.hpp"

namespace polyvec {

void TrainConfig::validate() const {
  if (decay_factor <= 0.0 || decay_factor > 1.0) {
    throw parameter_error("train: decay_factor must be in (0, 1]");
  }
  if (epochs < 1) throw parameter_error("train: epochs must be >= 1");
  if (batch_size < 1) throw parameter_error("train: batch_size must be >= 1");
  if (decay_every < 1) throw parameter_error("train: decay_every must be >= 1");
}

double lr_at(std::size_t epoch, const TrainConfig& cfg) {
  return cfg.initial_lr * std::pow(cfg.decay_factor, static_cast<double>(epoch / cfg.decay_every));
}

AdamState AdamState::for_params(const ModelParams& params) {
  AdamState s;
  s.m.reserve(params.tensors().size());
  s.v.reserve(params.tensors().size());
  for (const NamedParam& p : params.tensors()) {
    s.m.emplace_back(p.tensor.size(), 0.0);
    s.v.emplace_back(p.tensor.size(), 0.0);
  }
  return s;
}

void adam_step(ModelParams& params, const std::vector<std::vector<double>>& grads,
               AdamState& state, double lr, const TrainConfig& cfg) {
  auto& tensors = params.tensors();
  if (grads.size() != tensors.size() || state.m.size() != tensors.size()) {
    throw dimension_error("adam_step: gradient/state tensor count mismatch");
  }
  state.step += 1;
  const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.step));
  for (std::size_t t = 0; t < tensors.size(); ++t) {
    auto& values = tensors[t].tensor.values();
    const auto& grad = grads[t];
    if (grad.size() != values.size()) {
      throw dimension_error("adam_step: gradient shape mismatch for " + tensors[t].name);
    }
    auto& m = state.m[t];
    auto& v = state.v[t];
    for (std::size_t i = 0; i < values.size(); ++i) {
      m[i] = cfg.beta1 * m[i] + (1.0 - cfg.beta1) * grad[i];
      v[i] = cfg.beta2 * v[i] + (1.0 - cfg.beta2) * grad[i] * grad[i];
      const double mhat = m[i] / bc1;
      const double vhat = v[i] / bc2;
      values[i] -= lr * mhat / (std::sqrt(vhat) + cfg.adam_eps);
    }
  }
}

std::string history_csv_header() {
  return "epoch,lr,train_loss,val_ade,val_de1,val_de2,val_de3,val_node_loss";
}

std::string history_csv_row(const EpochStats& s) {
  std::ostringstream os;
  os << std::setprecision(17) << s.epoch << "," << s.lr << "," << s.train_loss << "," << s.val_ade
     << "," << s.val_de1 << "," << s.val_de2 << "," << s.val_de3 << "," << s.val_node_loss;
  return os.str();
}

namespace {

std::size_t worker_count() {
  const char* env = std::getenv("POLYVEC_THREADS");
  if (env == nullptr) return 1;
  const long n = std::strtol(env, nullptr, 10);
  return n > 1 ? static_cast<std::size_t>(n) : 1;
}

struct ElementResult {
  double loss = 0.0;
  std::vector<double> grads;  // flattened over parameter tensors
};

// Gradients accumulate on the shared parameter tensors during backward, so
// each evaluation starts from zeroed buffers. Gradient buffers are scratch
// state, not part of the logical parameter value.
void params_grad_reset(const ModelParams& params) {
  for (const NamedParam& p : params.tensors()) {
    const_cast<Tensor&>(p.tensor).zero_grad();
  }
}

// One scene: forward with masking, loss, backward, flatten gradients.
ElementResult run_element(const Scene& scene, const Tensor& gt, const ModelParams& params,
                          std::uint64_t mask_seed) {
  Graph g;
  Rng mask_rng(mask_seed);
  params_grad_reset(params);
  const ForwardResult result = forward(g, scene, params, ForwardMode::kTrainWithMask, &mask_rng);
  const Tensor loss = model_loss(g, result, gt, params.config());
  g.backward(loss);
  ElementResult out;
  out.loss = loss.item();
  out.grads = params.collect_grads();
  return out;
}

double vector_l2(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

std::string param_norm_diagnostics(const ModelParams& params) {
  std::ostringstream os;
  os << std::setprecision(6);
  for (const NamedParam& p : params.tensors()) os << " " << p.name << "=" << vector_l2(p.tensor.values());
  return os.str();
}

}  // namespace

TrainResult train(const std::vector<Scene>& train_scenes, const std::vector<Scene>& val_scenes,
                  const ModelConfig& model_cfg, const TrainConfig& train_cfg, const TrainIO* io) {
  Rng init_rng(Rng::derive_seed(train_cfg.seed, 0x1217));
  ModelParams params(model_cfg, init_rng);
  AdamState adam = AdamState::for_params(params);
  return train_resume(std::move(params), std::move(adam), 0, train_scenes, val_scenes, train_cfg,
                      io);
}

TrainResult train_resume(ModelParams params, AdamState adam, std::size_t start_epoch,
                         const std::vector<Scene>& train_scenes,
                         const std::vector<Scene>& val_scenes, const TrainConfig& train_cfg,
                         const TrainIO* io) {
  train_cfg.validate();
  if (train_scenes.empty()) throw data_error("train: empty training dataset");

  // Normalize once; the model always consumes target-centric scenes.
  std::vector<Scene> norm_train;
  std::vector<Tensor> gt;
  norm_train.reserve(train_scenes.size());
  gt.reserve(train_scenes.size());
  for (const Scene& s : train_scenes) {
    norm_train.push_back(s.frame == SceneFrame::kRaw ? normalize_scene(s) : s);
    gt.push_back(gt_offsets(norm_train.back()));
  }
  std::vector<Scene> norm_val;
  std::vector<Tensor> val_gt;
  for (const Scene& s : val_scenes) {
    norm_val.push_back(s.frame == SceneFrame::kRaw ? normalize_scene(s) : s);
    val_gt.push_back(gt_offsets(norm_val.back()));
  }

  const std::size_t n_workers = worker_count();
  std::ofstream csv;
  if (io != nullptr && !io->history_csv.empty()) {
    csv.open(io->history_csv, start_epoch == 0 ? std::ios::trunc : std::ios::app);
    if (!csv) throw file_error("train: cannot write " + io->history_csv);
    if (start_epoch == 0) csv << history_csv_header() << "\n";
  }

  TrainResult result{std::move(params), std::move(adam), {}};
  std::vector<std::size_t> order(norm_train.size());
  std::iota(order.begin(), order.end(), 0);

  for (std::size_t epoch = start_epoch; epoch < train_cfg.epochs; ++epoch) {
    const double lr = lr_at(epoch, train_cfg);
    // The shuffle depends only on (seed, epoch), so a resumed run replays
    // the exact batches of an uninterrupted one.
    Rng shuffle_rng(Rng::derive_seed(train_cfg.seed, 0x0e0c, epoch));
    std::iota(order.begin(), order.end(), 0);
    shuffle_rng.shuffle(order);

    double loss_sum = 0.0;
    for (std::size_t batch_start = 0; batch_start < order.size();
         batch_start += train_cfg.batch_size) {
      const std::size_t batch_end = std::min(batch_start + train_cfg.batch_size, order.size());
      const std::size_t batch_n = batch_end - batch_start;
      std::vector<ElementResult> elements(batch_n);

      auto run_range = [&](const ModelParams& worker_params, std::size_t lo, std::size_t hi) {
        for (std::size_t e = lo; e < hi; ++e) {
          const std::size_t si = order[batch_start + e];
          elements[e] = run_element(norm_train[si], gt[si], worker_params,
                                    Rng::derive_seed(train_cfg.seed, 0x3a5c, epoch, si));
        }
      };

      if (n_workers <= 1 || batch_n <= 1) {
        run_range(result.params, 0, batch_n);
      } else {
        // Workers use private parameter copies so gradient buffers do not
        // race; element order of the reduction below fixes the result.
        const std::size_t use = std::min(n_workers, batch_n);
        std::vector<ModelParams> copies;
        copies.reserve(use);
        for (std::size_t w = 0; w < use; ++w) copies.push_back(result.params.clone());
        std::vector<std::thread> threads;
        const std::size_t chunk = (batch_n + use - 1) / use;
        for (std::size_t w = 0; w < use; ++w) {
          const std::size_t lo = w * chunk, hi = std::min(lo + chunk, batch_n);
          if (lo >= hi) break;
          threads.emplace_back([&, w, lo, hi]() { run_range(copies[w], lo, hi); });
        }
        for (std::thread& t : threads) t.join();
      }

      // Fixed-order reduction, then averaging (gradients are means over the
      // batch, not sums).
      std::vector<double> flat(result.params.scalar_count(), 0.0);
      double batch_loss = 0.0;
      for (const ElementResult& e : elements) {
        batch_loss += e.loss;
        for (std::size_t i = 0; i < flat.size(); ++i) flat[i] += e.grads[i];
      }
      const double inv = 1.0 / static_cast<double>(batch_n);
      for (double& x : flat) x *= inv;
      batch_loss *= inv;
      loss_sum += batch_loss * static_cast<double>(batch_n);

      if (!std::isfinite(batch_loss)) {
        throw data_error("train: non-finite loss at epoch " + std::to_string(epoch) + ", batch " +
                         std::to_string(batch_start / train_cfg.batch_size) +
                         "; parameter norms:" + param_norm_diagnostics(result.params));
      }

      // Unflatten per tensor and step.
      std::vector<std::vector<double>> grads;
      grads.reserve(result.params.tensors().size());
      std::size_t off = 0;
      for (const NamedParam& p : result.params.tensors()) {
        grads.emplace_back(flat.begin() + static_cast<std::ptrdiff_t>(off),
                           flat.begin() + static_cast<std::ptrdiff_t>(off + p.tensor.size()));
        off += p.tensor.size();
      }
      adam_step(result.params, grads, result.adam, lr, train_cfg);
    }

    EpochStats stats;
    stats.epoch = epoch;
    stats.lr = lr;
    stats.train_loss = loss_sum / static_cast<double>(norm_train.size());

    // Validation: inference-mode metrics plus the node-completion loss under
    // a fixed per-scene mask (comparable across epochs).
    if (!norm_val.empty()) {
      double ade_sum = 0.0, de1 = 0.0, de2 = 0.0, de3 = 0.0, node_sum = 0.0;
      std::size_t de_n[3] = {0, 0, 0};
      std::size_t node_n = 0;
      for (std::size_t i = 0; i < norm_val.size(); ++i) {
        Graph g;
        const ForwardResult fr = forward(g, norm_val[i], result.params, ForwardMode::kInference);
        const Prediction pred = to_prediction(fr, norm_val[i]);
        const Scene raw = denormalize_scene(norm_val[i]);
        ade_sum += ade(pred.absolute, raw.future_gt);
        const double des[3] = {1.0, 2.0, 3.0};
        double* outs[3] = {&de1, &de2, &de3};
        for (int k = 0; k < 3; ++k) {
          const auto step = static_cast<std::size_t>((k + 1) * 10);
          if (step <= pred.absolute.size()) {
            *outs[k] += de_at(pred.absolute, raw.future_gt, des[k]);
            ++de_n[k];
          }
        }
        if (result.params.config().mask_prob > 0.0) {
          Graph gm;
          Rng mask_rng(Rng::derive_seed(train_cfg.seed, 0x7a11, i));
          params_grad_reset(result.params);
          const ForwardResult fm =
              forward(gm, norm_val[i], result.params, ForwardMode::kTrainWithMask, &mask_rng);
          if (!fm.masked_polylines.empty()) {
            Graph gl;
            node_sum +=
                huber(gl, fm.node_preds, fm.node_targets, result.params.config().huber_delta)
                    .item();
            ++node_n;
          }
        }
      }
      const auto nv = static_cast<double>(norm_val.size());
      stats.val_ade = ade_sum / nv;
      stats.val_de1 = de_n[0] ? de1 / static_cast<double>(de_n[0]) : std::nan("");
      stats.val_de2 = de_n[1] ? de2 / static_cast<double>(de_n[1]) : std::nan("");
      stats.val_de3 = de_n[2] ? de3 / static_cast<double>(de_n[2]) : std::nan("");
      stats.val_node_loss = node_n ? node_sum / static_cast<double>(node_n) : 0.0;
    }

    result.history.push_back(stats);
    if (csv.is_open()) csv << history_csv_row(stats) << "\n" << std::flush;
    if (io != nullptr && io->log != nullptr) {
      *io->log << "[train] epoch " << epoch << " lr " << lr << " loss " << stats.train_loss
               << " val_ade " << stats.val_ade << "\n";
    }
    if (io != nullptr && !io->checkpoint_dir.empty()) {
      const bool last = epoch + 1 == train_cfg.epochs;
      if (last || (io->checkpoint_every > 0 && (epoch + 1) % io->checkpoint_every == 0)) {
        Checkpoint ck{result.params.config(), train_cfg.seed, epoch + 1};
        save_checkpoint(io->checkpoint_dir + (last ? "/checkpoint.json"
                                                   : "/checkpoint-" + std::to_string(epoch + 1) +
                                                         ".json"),
                        result.params, result.adam, ck);
      }
    }
  }
  return result;
}

}  // namespace polyvec
