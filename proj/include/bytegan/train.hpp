/*
 Copyright 2026 The bytegan Authors.
 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      http://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/

// One-class training: alternating critic / encoder-generator updates on benign
// inputs, EMA weight smoothing, periodic evaluation and best/final checkpoints.
//
// One step is one critic update; every critic_steps_per_eg_step-th step also
// updates E and G. The EMA shadow tracks every parameter (the critic's features
// enter the anomaly score) in double precision, and evaluation always scores
// with the shadow.

#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bytegan/cbigan.hpp"
#include "bytegan/imgcode.hpp"
#include "bytegan/metrics.hpp"
#include "bytegan/pipeline.hpp"

namespace bytegan {

struct TrainConfig {
  ModelConfig model;
  Encoding encoding;
  std::int64_t batch_size = 32;
  std::int64_t total_steps = 5000;
  std::int64_t critic_steps_per_eg_step = 5;
  double lr_critic = 1e-4;
  double lr_eg = 1e-4;
  double beta1 = 0.5;
  double beta2 = 0.9;
  double ema_decay = 0.999;
  std::int64_t eval_every = 250;
  std::uint64_t seed = 42;
  double lambda_c = 1.0;  // consistency weight
  double lambda = 0.5;    // score mix
  double gp_weight = 10.0;
  std::int64_t score_chunk = 64;

  /// Throws Error when a count, rate or weight is out of range.
  void validate() const;
};

/// Resolution 64, batch 32, 5000 steps, evaluation every 250 steps, and narrow
/// networks that train in minutes on one CPU core. Encoder/generator rate 1e-3, score weight 0.99.
TrainConfig desk_preset();

/// Flat `key = value` overrides; '#' starts a comment. Unknown keys throw.
void apply_config_text(TrainConfig& cfg, const std::string& text);
void apply_config_value(TrainConfig& cfg, const std::string& key, const std::string& value);
/// Every key in a fixed order, as a JSON object.
std::string config_to_json(const TrainConfig& cfg);
TrainConfig config_from_json(const std::string& json);

// ---------------------------------------------------------------------------
// EMA

/// shadow <- decay * shadow + (1 - decay) * current, in place.
void ema_update(torch::Tensor& shadow, const torch::Tensor& current, double decay);
/// Same update, returning a new tensor.
torch::Tensor ema_updated(const torch::Tensor& shadow, const torch::Tensor& current, double decay);
void ema_update(std::vector<torch::Tensor>& shadow, std::span<const torch::Tensor> current,
                double decay);

// ---------------------------------------------------------------------------
// Scoring

/// One score per sample, in input order, computed in fixed-size chunks so the
/// arithmetic does not depend on the caller.
std::vector<ScoredSample> score_split(CBiGAN& model, std::span<const LabeledInput> samples,
                                      const ScoreConfig& cfg, std::int64_t chunk = 64);

struct EvalResult {
  double auc = 0.0;
  double balacc = 0.0;
  double threshold = 0.0;
};

EvalResult evaluate_scores(std::span<const ScoredSample> scores);

// ---------------------------------------------------------------------------
// Training

class TrainingDiverged : public Error {
 public:
  using Error::Error;
};

struct TrainLogRecord {
  std::int64_t step = 0;
  // Losses of the most recent updates; the eg_* fields are absent until the first
  // encoder-generator update.
  std::optional<double> critic_loss;
  std::optional<double> critic_penalty;
  std::optional<double> eg_adversarial;
  std::optional<double> consistency_image;
  std::optional<double> consistency_latent;
  std::optional<double> total_eg;
  bool eg_updated = false;
  std::optional<double> eval_auc;
  std::optional<double> eval_balacc;
  std::optional<double> eval_threshold;
};

std::string log_line(const TrainLogRecord& rec);

struct TrainResult {
  Checkpoint best;
  Checkpoint final;
  std::vector<TrainLogRecord> log;
  std::int64_t best_step = 0;
  EvalResult best_eval;
};

struct TrainSinks {
  std::ostream* log = nullptr;     // deterministic JSONL training log
  std::ostream* timing = nullptr;  // wall-clock seconds per logged step, kept apart
  std::ostream* progress = nullptr;  // human-readable eval lines
};

/// Throws InvariantViolation if train_split holds a malicious sample and
/// TrainingDiverged (after logging a diagnostic record) on a non-finite loss.
TrainResult train(const TrainConfig& cfg, std::span<const LabeledInput> train_split,
                  std::span<const LabeledInput> test_split, const TrainSinks& sinks = {});

/// Rebuilds the scoring model stored in a checkpoint (EMA weights).
std::unique_ptr<CBiGAN> model_from_checkpoint(const Checkpoint& ckpt);

}  // namespace bytegan
