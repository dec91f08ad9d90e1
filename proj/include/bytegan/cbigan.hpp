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

// Consistency BiGAN: encoder E (image -> latent), generator G (latent -> image)
// and a joint critic D over (image, latent) pairs.
//
// Losses are written against the small JointNets interface so that hand-built
// toy networks can stand in for the real ones in tests.

#pragma once

#include <torch/torch.h>

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "bytegan/common.hpp"
#include "bytegan/imgcode.hpp"

namespace bytegan {

enum class Backbone : std::uint8_t { base_conv, residual_small, residual_deep, dense_small };

std::string_view to_string(Backbone backbone);
Backbone parse_backbone(std::string_view text);

struct ModelConfig {
  Backbone backbone = Backbone::base_conv;
  std::int64_t latent_dim = 128;
  std::int64_t resolution = 256;  // power of two, >= 8
  std::int64_t width = 8;         // channels after the stem; doubled per stage
  std::int64_t max_channels = 256;
  std::int64_t critic_hidden = 256;
  double dropout = 0.2;  // critic only; off in inference mode
};

struct CriticOutput {
  torch::Tensor score;     // [B]
  torch::Tensor features;  // [B, critic_hidden]
};

class JointNets {
 public:
  virtual ~JointNets() = default;
  virtual torch::Tensor encode(const torch::Tensor& x) = 0;
  virtual torch::Tensor generate(const torch::Tensor& z) = 0;
  virtual CriticOutput discriminate(const torch::Tensor& x, const torch::Tensor& z) = 0;
  virtual std::vector<torch::Tensor> eg_parameters() = 0;
  virtual std::vector<torch::Tensor> critic_parameters() = 0;
};

class CBiGAN final : public JointNets {
 public:
  explicit CBiGAN(const ModelConfig& cfg);
  ~CBiGAN() override;
  CBiGAN(const CBiGAN&) = delete;
  CBiGAN& operator=(const CBiGAN&) = delete;

  /// x: [B, 3, R, R] -> [B, latent_dim]. Throws ShapeError on mismatch.
  torch::Tensor encode(const torch::Tensor& x) override;
  /// z: [B, latent_dim] -> [B, 3, R, R] in [-1, 1].
  torch::Tensor generate(const torch::Tensor& z) override;
  CriticOutput discriminate(const torch::Tensor& x, const torch::Tensor& z) override;
  std::vector<torch::Tensor> eg_parameters() override;
  std::vector<torch::Tensor> critic_parameters() override;

  /// Parameters with stable "E.", "G.", "D." prefixed names, in a fixed order.
  std::vector<std::pair<std::string, torch::Tensor>> named_parameters() const;
  std::int64_t parameter_count() const;

  void set_training(bool on);
  bool training() const;
  void to(torch::Dtype dtype);
  torch::Dtype dtype() const;
  const ModelConfig& config() const { return cfg_; }

 private:
  struct Nets;
  ModelConfig cfg_;
  std::unique_ptr<Nets> nets_;
};

// ---------------------------------------------------------------------------
// Losses

struct ConsistencyTerms {
  torch::Tensor image;   // mean |x - G(E(x))|
  torch::Tensor latent;  // mean |z - E(G(z))|
};

struct CriticLoss {
  torch::Tensor total;        // adversarial + gp_weight * penalty
  torch::Tensor adversarial;  // mean D(G(z), z) - mean D(x, E(x))
  torch::Tensor penalty;      // mean (||grad D(x_hat, z_hat)|| - 1)^2
};

struct LossBreakdown {
  torch::Tensor eg_adversarial;  // mean D(x, E(x)) - mean D(G(z), z)
  torch::Tensor consistency_image;
  torch::Tensor consistency_latent;
  torch::Tensor total_eg;  // eg_adversarial + lambda_c * (image + latent)
};

ConsistencyTerms consistency_loss(JointNets& nets, const torch::Tensor& x, const torch::Tensor& z);

/// E and G run without gradient tracking. alpha: [B] interpolation weights for
/// the penalty points x_hat = a x + (1-a) G(z), z_hat = a E(x) + (1-a) z.
CriticLoss critic_loss(JointNets& nets, const torch::Tensor& x, const torch::Tensor& z,
                       const torch::Tensor& alpha, double gp_weight = 10.0);

/// The critic's parameters are excluded from the graph.
LossBreakdown eg_loss(JointNets& nets, const torch::Tensor& x, const torch::Tensor& z,
                      double lambda_c = 1.0);

// ---------------------------------------------------------------------------
// Scoring

struct ScoreConfig {
  double lambda = 0.5;  // weight of the pixel term; 1 - lambda goes to the feature term
};

struct ScoreTerms {
  torch::Tensor reconstruction;  // [B] mean |x - G(E(x))|
  torch::Tensor features;        // [B] mean |f(x, E(x)) - f(G(E(x)), E(x))|
};

ScoreTerms score_terms(JointNets& nets, const torch::Tensor& x);
/// lambda * reconstruction + (1 - lambda) * features, per sample.
torch::Tensor anomaly_scores(JointNets& nets, const torch::Tensor& x, const ScoreConfig& cfg);

/// [B, 3, R, R] batch from model inputs; every input must have resolution R.
torch::Tensor stack_inputs(std::span<const ModelInput> inputs, std::int64_t resolution);
ModelInput tensor_to_input(const torch::Tensor& image);  // [3, R, R]

std::vector<float> encode(CBiGAN& model, const ModelInput& x);
ModelInput generate(CBiGAN& model, std::span<const float> z);
std::pair<double, std::vector<float>> discriminate(CBiGAN& model, const ModelInput& x,
                                                   std::span<const float> z);
double anomaly_score(CBiGAN& model, const ModelInput& x, const ScoreConfig& cfg);

// ---------------------------------------------------------------------------
// Checkpoints
//
// Layout: 8-byte magic "BYTEGANC", uint32 format version, uint64 header length,
// a JSON header, then the raw little-endian tensor blobs back to back. The
// header records the model config, step, an opaque run config, metrics, and
// for each tensor its name, dtype ("f32" | "f64"), shape, offset and size.

struct NamedTensor {
  std::string name;
  torch::Tensor value;
};

struct Checkpoint {
  static constexpr std::uint32_t kFormatVersion = 1;
  ModelConfig model;
  std::int64_t step = 0;
  std::string run_config_json = "{}";
  std::string metrics_json = "{}";
  std::vector<NamedTensor> tensors;

  const torch::Tensor* find(std::string_view name) const;
};

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path);
Checkpoint load_checkpoint(const std::filesystem::path& path);

/// Appends the model's parameters as "<prefix><name>".
void append_parameters(Checkpoint& ckpt, const CBiGAN& model, std::string_view prefix);
/// Copies "<prefix><name>" tensors into the model, checking every name and shape.
void load_parameters(CBiGAN& model, const Checkpoint& ckpt, std::string_view prefix);

/// SHA-256 over parameter names, shapes and float bytes in order.
std::string parameter_digest(const CBiGAN& model);
std::string tensors_digest(std::span<const NamedTensor> tensors);

}  // namespace bytegan
