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

#include "polyvec/metrics.hpp"

#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>

#include "polyvec/errors.hpp"

namespace polyvec {

double ade(const std::vector<Point2>& pred, const std::vector<Point2>& gt) {
  if (pred.size() != gt.size() || pred.empty()) {
    throw data_error("ade: trajectories must have equal nonzero length, got " +
                     std::to_string(pred.size()) + " vs " + std::to_string(gt.size()));
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) acc += distance(pred[i], gt[i]);
  return acc / static_cast<double>(pred.size());
}

double de_at(const std::vector<Point2>& pred, const std::vector<Point2>& gt, double t_seconds,
             double dt) {
  if (pred.size() != gt.size()) throw data_error("de_at: trajectory length mismatch");
  const double steps = t_seconds / dt;
  const auto step = static_cast<std::size_t>(std::llround(steps));
  if (std::abs(steps - static_cast<double>(step)) > 1e-9 || step < 1 || step > pred.size()) {
    throw parameter_error("de_at: t=" + std::to_string(t_seconds) +
                          " s is not a whole step within the horizon");
  }
  return distance(pred[step - 1], gt[step - 1]);
}

std::vector<Point2> constant_velocity(const std::vector<Point2>& observed,
                                      std::size_t future_steps, double /*dt*/) {
  if (observed.size() < 2) throw data_error("constant_velocity: need at least 2 observed points");
  const Point2 step = observed[observed.size() - 1] - observed[observed.size() - 2];
  std::vector<Point2> out;
  out.reserve(future_steps);
  Point2 pos = observed.back();
  for (std::size_t i = 0; i < future_steps; ++i) {
    pos = pos + step;
    out.push_back(pos);
  }
  return out;
}

namespace {

struct MetricAccumulator {
  double ade_sum = 0.0;
  double de_sum[3] = {0.0, 0.0, 0.0};
  std::size_t de_count[3] = {0, 0, 0};
  std::size_t n = 0;

  void add(const std::vector<Point2>& pred, const std::vector<Point2>& gt) {
    ade_sum += ade(pred, gt);
    for (int k = 0; k < 3; ++k) {
      const auto step = static_cast<std::size_t>((k + 1) * 10);
      if (step <= pred.size()) {
        de_sum[k] += de_at(pred, gt, static_cast<double>(k + 1));
        ++de_count[k];
      }
    }
    ++n;
  }

  EvalReport report() const {
    EvalReport r;
    r.n_scenes = n;
    if (n == 0) return r;
    r.ade = ade_sum / static_cast<double>(n);
    const double* sums = de_sum;
    double* out[3] = {&r.de1, &r.de2, &r.de3};
    for (int k = 0; k < 3; ++k) {
      *out[k] = de_count[k] ? sums[k] / static_cast<double>(de_count[k])
                            : std::numeric_limits<double>::quiet_NaN();
    }
    return r;
  }
};

}  // namespace

EvalReport evaluate_model(const ModelParams& params, const std::vector<Scene>& scenes) {
  MetricAccumulator acc;
  for (const Scene& raw : scenes) {
    const Scene scene = raw.frame == SceneFrame::kRaw ? normalize_scene(raw) : raw;
    Graph g;
    const ForwardResult result = forward(g, scene, params, ForwardMode::kInference);
    const Prediction pred = to_prediction(result, scene);
    const Scene gt_frame = raw.frame == SceneFrame::kRaw ? raw : denormalize_scene(raw);
    acc.add(pred.absolute, gt_frame.future_gt);
  }
  return acc.report();
}

EvalReport evaluate_constant_velocity(const std::vector<Scene>& scenes) {
  MetricAccumulator acc;
  for (const Scene& scene : scenes) {
    const Polyline& target = scene.target();
    const std::size_t n_obs = std::min(scene.observed_steps, target.points.size());
    std::vector<Point2> observed(target.points.begin(),
                                 target.points.begin() + static_cast<std::ptrdiff_t>(n_obs));
    acc.add(constant_velocity(observed, scene.future_gt.size()), scene.future_gt);
  }
  return acc.report();
}

std::string to_string(ContextArm arm) {
  switch (arm) {
    case ContextArm::kTargetOnly: return "none";
    case ContextArm::kMap: return "map";
    case ContextArm::kMapAgents: return "map+agents";
  }
  throw data_error("unknown context arm");
}

ContextArm context_arm_from_string(const std::string& s) {
  if (s == "none") return ContextArm::kTargetOnly;
  if (s == "map") return ContextArm::kMap;
  if (s == "map+agents" || s == "map_agents") return ContextArm::kMapAgents;
  throw parameter_error("unknown context arm: " + s);
}

Scene filter_context(const Scene& scene, ContextArm arm) {
  Scene out = scene;
  out.polylines.clear();
  for (const Polyline& p : scene.polylines) {
    const bool is_target = p.id == scene.target_id;
    const bool is_agent = p.kind == PolylineKind::kAgentTrajectory;
    switch (arm) {
      case ContextArm::kTargetOnly:
        if (is_target) out.polylines.push_back(p);
        break;
      case ContextArm::kMap:
        if (is_target || !is_agent) out.polylines.push_back(p);
        break;
      case ContextArm::kMapAgents:
        out.polylines.push_back(p);
        break;
    }
  }
  return out;
}

std::vector<AblationRow> ablate(const std::vector<Scene>& train_scenes,
                                const std::vector<Scene>& val_scenes,
                                const std::vector<AblationArm>& arms,
                                const ModelConfig& model_cfg, const TrainConfig& train_cfg,
                                std::ostream* log) {
  if (arms.empty()) throw parameter_error("ablate: no arms given");
  std::vector<AblationRow> rows;
  for (const AblationArm& arm : arms) {
    ModelConfig cfg = model_cfg;
    if (!arm.node_completion) {
      cfg.alpha = 0.0;
      cfg.mask_prob = 0.0;
    }
    std::vector<Scene> arm_train, arm_val;
    arm_train.reserve(train_scenes.size());
    arm_val.reserve(val_scenes.size());
    for (const Scene& s : train_scenes) arm_train.push_back(filter_context(s, arm.context));
    for (const Scene& s : val_scenes) arm_val.push_back(filter_context(s, arm.context));

    if (log) {
      *log << "[ablate] arm context=" << to_string(arm.context)
           << " node_completion=" << (arm.node_completion ? "yes" : "no") << "\n";
    }
    TrainIO io;
    io.log = log;
    const TrainResult result = train(arm_train, arm_val, cfg, train_cfg, log ? &io : nullptr);
    rows.push_back({arm, evaluate_model(result.params, arm_val)});
  }
  return rows;
}

std::string format_eval_table(const std::vector<AblationRow>& rows) {
  std::ostringstream os;
  os << std::left << std::setw(12) << "context" << std::setw(12) << "node_compl" << std::right
     << std::setw(9) << "DE@1s" << std::setw(9) << "DE@2s" << std::setw(9) << "DE@3s"
     << std::setw(9) << "ADE" << "\n";
  os << std::string(60, '-') << "\n";
  os << std::fixed << std::setprecision(3);
  for (const AblationRow& r : rows) {
    os << std::left << std::setw(12) << to_string(r.arm.context) << std::setw(12)
       << (r.arm.node_completion ? "yes" : "no") << std::right << std::setw(9) << r.report.de1
       << std::setw(9) << r.report.de2 << std::setw(9) << r.report.de3 << std::setw(9)
       << r.report.ade << "\n";
  }
  return os.str();
}

std::string ablation_csv(const std::vector<AblationRow>& rows) {
  std::ostringstream os;
  os << "context,node_completion,de1,de2,de3,ade,n_scenes\n";
  os << std::setprecision(17);
  for (const AblationRow& r : rows) {
    os << to_string(r.arm.context) << "," << (r.arm.node_completion ? "yes" : "no") << ","
       << r.report.de1 << "," << r.report.de2 << "," << r.report.de3 << "," << r.report.ade << ","
       << r.report.n_scenes << "\n";
  }
  return os.str();
}

}  // namespace polyvec
