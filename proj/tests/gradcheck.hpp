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

// Central finite differences against autograd for the two training losses, on a
// double-precision miniature model.

#pragma once

#include <torch/torch.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "bytegan/cbigan.hpp"

namespace bytegan::testing_oracles {

inline ModelConfig miniature_config() {
  ModelConfig cfg;
  cfg.backbone = Backbone::base_conv;
  cfg.latent_dim = 2;
  cfg.resolution = 8;
  cfg.width = 1;
  cfg.max_channels = 1;
  cfg.critic_hidden = 4;
  cfg.dropout = 0.0;
  return cfg;
}

struct GradCheck {
  double relative_error = 0.0;  // ||analytic - numeric|| / max(||analytic||, ||numeric||)
  double analytic_norm = 0.0;
  std::size_t coordinates = 0;
};

inline GradCheck compare_gradients(std::vector<torch::Tensor> params,
                                   const std::function<torch::Tensor()>& loss, double eps = 1e-6) {
  for (auto& p : params) p.mutable_grad() = torch::Tensor();
  loss().backward();
  std::vector<double> analytic;
  std::vector<double> numeric;
  for (auto& p : params) {
    const auto g = p.grad().defined() ? p.grad().detach().flatten() : torch::zeros({p.numel()}, p.options());
    auto flat = p.detach().view({-1});
    for (std::int64_t i = 0; i < p.numel(); ++i) {
      analytic.push_back(g[i].item<double>());
      const double orig = flat[i].item<double>();
      double up = 0.0;
      double down = 0.0;
      {
        torch::NoGradGuard no_grad;
        flat[i] = orig + eps;
      }
      up = loss().item<double>();
      {
        torch::NoGradGuard no_grad;
        flat[i] = orig - eps;
      }
      down = loss().item<double>();
      {
        torch::NoGradGuard no_grad;
        flat[i] = orig;
      }
      numeric.push_back((up - down) / (2.0 * eps));
    }
  }
  double diff = 0.0, na = 0.0, nn = 0.0;
  for (std::size_t i = 0; i < analytic.size(); ++i) {
    diff += (analytic[i] - numeric[i]) * (analytic[i] - numeric[i]);
    na += analytic[i] * analytic[i];
    nn += numeric[i] * numeric[i];
  }
  GradCheck out;
  out.analytic_norm = std::sqrt(na);
  out.relative_error = std::sqrt(diff) / std::max({std::sqrt(na), std::sqrt(nn), 1e-300});
  out.coordinates = analytic.size();
  return out;
}

struct LossGradChecks {
  GradCheck critic;
  GradCheck eg;
};

/// One random parameter draw: critic_loss against the critic parameters and
/// eg_loss against the encoder/generator parameters.
inline LossGradChecks check_loss_gradients(std::uint64_t draw) {
  torch::manual_seed(draw);
  CBiGAN model(miniature_config());
  model.to(torch::kFloat64);
  const auto opts = torch::TensorOptions().dtype(torch::kFloat64);
  const auto x = torch::rand({3, 3, 8, 8}, opts) * 2 - 1;
  const auto z = torch::randn({3, 2}, opts);
  const auto alpha = torch::rand({3}, opts);
  LossGradChecks out;
  out.critic = compare_gradients(model.critic_parameters(),
                                 [&] { return critic_loss(model, x, z, alpha, 10.0).total; });
  out.eg = compare_gradients(model.eg_parameters(), [&] { return eg_loss(model, x, z, 1.0).total_eg; });
  return out;
}

}  // namespace bytegan::testing_oracles
