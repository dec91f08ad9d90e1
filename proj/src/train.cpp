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

#include "bytegan/train.hpp"

#include <chrono>
#include <cmath>
#include <functional>
#include <nlohmann/json.hpp>
#include <ostream>
#include <sstream>

#include "bytegan/corpus.hpp"

namespace bytegan {

using ordered_json = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Config

void TrainConfig::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw Error(std::string("invalid config: ") + what);
  };
  require(batch_size >= 1, "batch_size must be >= 1");
  require(total_steps >= 0, "total_steps must be >= 0");
  require(critic_steps_per_eg_step >= 1, "critic_steps_per_eg_step must be >= 1");
  require(eval_every >= 1, "eval_every must be >= 1");
  require(score_chunk >= 1, "score_chunk must be >= 1");
  require(lr_critic > 0 && lr_eg > 0, "learning rates must be > 0");
  require(beta1 >= 0 && beta1 < 1 && beta2 >= 0 && beta2 < 1, "betas must be in [0, 1)");
  require(ema_decay > 0 && ema_decay < 1, "ema_decay must be in (0, 1)");
  require(lambda_c >= 0, "lambda_c must be >= 0");
  require(lambda >= 0 && lambda <= 1, "lambda must be in [0, 1]");
  require(gp_weight >= 0, "gp_weight must be >= 0");
  require(model.latent_dim >= 1 && model.width >= 1 && model.critic_hidden >= 1 &&
              model.max_channels >= 1,
          "model dimensions must be >= 1");
  require(model.resolution >= 8 && (model.resolution & (model.resolution - 1)) == 0,
          "resolution must be a power of two >= 8");
  require(model.dropout >= 0 && model.dropout < 1, "dropout must be in [0, 1)");
}

TrainConfig desk_preset() {
  TrainConfig cfg;
  cfg.model.resolution = 64;
  cfg.model.width = 8;
  cfg.model.max_channels = 64;
  cfg.model.critic_hidden = 128;
  cfg.batch_size = 32;
  cfg.total_steps = 5000;
  cfg.eval_every = 250;
  // At this width the encoder/generator needs the faster rate, and the critic
  // features run about 30x the pixel error, so the pixel term gets most weight.
  cfg.lr_eg = 1e-3;
  cfg.lambda = 0.99;
  return cfg;
}

namespace {

template <class T>
T parse_number(const std::string& key, const std::string& text) {
  std::istringstream in(text);
  T value{};
  in >> value;
  if (in.fail() || !(in >> std::ws).eof()) {
    throw Error("config key '" + key + "': cannot parse '" + text + "'");
  }
  return value;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

void apply_config_value(TrainConfig& cfg, const std::string& key, const std::string& value) {
  using Setter = std::function<void(TrainConfig&, const std::string&)>;
  auto i64 = [&](std::int64_t TrainConfig::*m) -> Setter {
    return [m, key](TrainConfig& c, const std::string& v) { c.*m = parse_number<std::int64_t>(key, v); };
  };
  auto f64 = [&](double TrainConfig::*m) -> Setter {
    return [m, key](TrainConfig& c, const std::string& v) { c.*m = parse_number<double>(key, v); };
  };
  auto mi64 = [&](std::int64_t ModelConfig::*m) -> Setter {
    return [m, key](TrainConfig& c, const std::string& v) { c.model.*m = parse_number<std::int64_t>(key, v); };
  };
  const std::map<std::string, Setter> setters = {
      {"backbone", [](TrainConfig& c, const std::string& v) { c.model.backbone = parse_backbone(v); }},
      {"latent_dim", mi64(&ModelConfig::latent_dim)},
      {"resolution", mi64(&ModelConfig::resolution)},
      {"width", mi64(&ModelConfig::width)},
      {"max_channels", mi64(&ModelConfig::max_channels)},
      {"critic_hidden", mi64(&ModelConfig::critic_hidden)},
      {"dropout", [key](TrainConfig& c, const std::string& v) { c.model.dropout = parse_number<double>(key, v); }},
      {"layout", [](TrainConfig& c, const std::string& v) { c.encoding.layout = parse_layout(v); }},
      {"coloring", [](TrainConfig& c, const std::string& v) { c.encoding.coloring = parse_coloring(v); }},
      {"batch_size", i64(&TrainConfig::batch_size)},
      {"total_steps", i64(&TrainConfig::total_steps)},
      {"critic_steps_per_eg_step", i64(&TrainConfig::critic_steps_per_eg_step)},
      {"lr_critic", f64(&TrainConfig::lr_critic)},
      {"lr_eg", f64(&TrainConfig::lr_eg)},
      {"beta1", f64(&TrainConfig::beta1)},
      {"beta2", f64(&TrainConfig::beta2)},
      {"ema_decay", f64(&TrainConfig::ema_decay)},
      {"eval_every", i64(&TrainConfig::eval_every)},
      {"seed", [key](TrainConfig& c, const std::string& v) { c.seed = parse_number<std::uint64_t>(key, v); }},
      {"lambda_c", f64(&TrainConfig::lambda_c)},
      {"lambda", f64(&TrainConfig::lambda)},
      {"gp_weight", f64(&TrainConfig::gp_weight)},
      {"score_chunk", i64(&TrainConfig::score_chunk)},
  };
  const auto it = setters.find(key);
  if (it == setters.end()) throw Error("unknown config key '" + key + "'");
  it->second(cfg, value);
}

void apply_config_text(TrainConfig& cfg, const std::string& text) {
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw Error("config line " + std::to_string(lineno) + ": expected key = value");
    }
    apply_config_value(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
}

std::string config_to_json(const TrainConfig& cfg) {
  ordered_json j;
  j["backbone"] = std::string(to_string(cfg.model.backbone));
  j["latent_dim"] = cfg.model.latent_dim;
  j["resolution"] = cfg.model.resolution;
  j["width"] = cfg.model.width;
  j["max_channels"] = cfg.model.max_channels;
  j["critic_hidden"] = cfg.model.critic_hidden;
  j["dropout"] = cfg.model.dropout;
  j["layout"] = std::string(to_string(cfg.encoding.layout));
  j["coloring"] = std::string(to_string(cfg.encoding.coloring));
  j["batch_size"] = cfg.batch_size;
  j["total_steps"] = cfg.total_steps;
  j["critic_steps_per_eg_step"] = cfg.critic_steps_per_eg_step;
  j["lr_critic"] = cfg.lr_critic;
  j["lr_eg"] = cfg.lr_eg;
  j["beta1"] = cfg.beta1;
  j["beta2"] = cfg.beta2;
  j["ema_decay"] = cfg.ema_decay;
  j["eval_every"] = cfg.eval_every;
  j["seed"] = cfg.seed;
  j["lambda_c"] = cfg.lambda_c;
  j["lambda"] = cfg.lambda;
  j["gp_weight"] = cfg.gp_weight;
  j["score_chunk"] = cfg.score_chunk;
  return j.dump();
}

TrainConfig config_from_json(const std::string& json) {
  TrainConfig cfg;
  const auto j = ordered_json::parse(json);
  for (const auto& [key, value] : j.items()) {
    apply_config_value(cfg, key, value.is_string() ? value.get<std::string>() : value.dump());
  }
  return cfg;
}

// ---------------------------------------------------------------------------
// EMA

void ema_update(torch::Tensor& shadow, const torch::Tensor& current, double decay) {
  if (shadow.sizes() != current.sizes()) throw ShapeError("EMA shadow and parameter shapes differ");
  if (!(decay > 0.0 && decay < 1.0)) throw Error("EMA decay must be in (0, 1)");
  torch::NoGradGuard no_grad;
  shadow.mul_(decay).add_(current.detach().to(shadow.scalar_type()), 1.0 - decay);
}

torch::Tensor ema_updated(const torch::Tensor& shadow, const torch::Tensor& current, double decay) {
  auto out = shadow.detach().clone();
  ema_update(out, current, decay);
  return out;
}

void ema_update(std::vector<torch::Tensor>& shadow, std::span<const torch::Tensor> current,
                double decay) {
  if (shadow.size() != current.size()) throw ShapeError("EMA parameter lists differ in length");
  for (std::size_t i = 0; i < shadow.size(); ++i) ema_update(shadow[i], current[i], decay);
}

// ---------------------------------------------------------------------------
// Scoring

std::vector<ScoredSample> score_split(CBiGAN& model, std::span<const LabeledInput> samples,
                                      const ScoreConfig& cfg, std::int64_t chunk) {
  if (chunk < 1) throw Error("score chunk must be >= 1");
  std::vector<ScoredSample> out;
  out.reserve(samples.size());
  const bool was_training = model.training();
  model.set_training(false);
  torch::NoGradGuard no_grad;
  std::vector<ModelInput> batch;
  for (std::size_t start = 0; start < samples.size(); start += static_cast<std::size_t>(chunk)) {
    const std::size_t end = std::min(samples.size(), start + static_cast<std::size_t>(chunk));
    batch.clear();
    for (std::size_t i = start; i < end; ++i) batch.push_back(samples[i].input);
    const auto x = stack_inputs(batch, model.config().resolution).to(model.dtype());
    const auto s = anomaly_scores(model, x, cfg).to(torch::kFloat64).contiguous();
    const double* p = s.data_ptr<double>();
    for (std::size_t i = start; i < end; ++i) {
      out.push_back({samples[i].id, p[i - start], samples[i].label});
    }
  }
  model.set_training(was_training);
  return out;
}

EvalResult evaluate_scores(std::span<const ScoredSample> scores) {
  EvalResult r;
  r.auc = auc(roc_curve(scores));
  const auto best = best_balanced_accuracy(scores);
  r.balacc = best.value;
  r.threshold = best.threshold;
  return r;
}

// ---------------------------------------------------------------------------
// Training

std::string log_line(const TrainLogRecord& rec) {
  ordered_json j;
  j["step"] = rec.step;
  auto put = [&](const char* key, const std::optional<double>& v) {
    if (v) j[key] = *v;
  };
  put("critic_loss", rec.critic_loss);
  put("critic_penalty", rec.critic_penalty);
  put("eg_adversarial", rec.eg_adversarial);
  put("consistency_image", rec.consistency_image);
  put("consistency_latent", rec.consistency_latent);
  put("total_eg", rec.total_eg);
  j["eg_updated"] = rec.eg_updated;
  put("eval_auc", rec.eval_auc);
  put("eval_balacc", rec.eval_balacc);
  put("eval_threshold", rec.eval_threshold);
  return j.dump();
}

namespace {

void append_adam_state(Checkpoint& ckpt, torch::optim::Adam& opt, const std::string& prefix) {
  const auto& params = opt.param_groups().front().params();
  for (std::size_t i = 0; i < params.size(); ++i) {
    const auto it = opt.state().find(params[i].unsafeGetTensorImpl());
    if (it == opt.state().end()) continue;
    const auto& s = static_cast<const torch::optim::AdamParamState&>(*it->second);
    const std::string base = prefix + std::to_string(i) + ".";
    ckpt.tensors.push_back({base + "step", torch::tensor({s.step()}, torch::kInt64)});
    ckpt.tensors.push_back({base + "exp_avg", s.exp_avg().detach().clone()});
    ckpt.tensors.push_back({base + "exp_avg_sq", s.exp_avg_sq().detach().clone()});
  }
}

std::string metrics_json(std::int64_t step, const EvalResult& r) {
  ordered_json j;
  j["step"] = step;
  j["auc"] = r.auc;
  j["balacc"] = r.balacc;
  j["threshold"] = r.threshold;
  return j.dump();
}

bool finite(const torch::Tensor& t) { return std::isfinite(t.item<double>()); }

}  // namespace

std::unique_ptr<CBiGAN> model_from_checkpoint(const Checkpoint& ckpt) {
  auto model = std::make_unique<CBiGAN>(ckpt.model);
  load_parameters(*model, ckpt, "ema.");
  model->set_training(false);
  return model;
}

TrainResult train(const TrainConfig& cfg, std::span<const LabeledInput> train_split,
                  std::span<const LabeledInput> test_split, const TrainSinks& sinks) {
  cfg.validate();
  for (const auto& s : train_split) {
    if (s.label != Label::benign) {
      throw InvariantViolation("malicious sample '" + s.id + "' in the training split");
    }
  }
  if (train_split.empty() && cfg.total_steps > 0) throw Error("training split is empty");
  bool has_benign = false;
  bool has_malicious = false;
  for (const auto& s : test_split) (s.label == Label::benign ? has_benign : has_malicious) = true;
  if (!has_benign || !has_malicious) throw Error("test split needs benign and malicious samples");

  const auto wall_start = std::chrono::steady_clock::now();
  torch::manual_seed(cfg.seed);
  CBiGAN model(cfg.model);
  CBiGAN eval_model(cfg.model);
  model.set_training(true);

  std::vector<torch::Tensor> params;
  std::vector<std::string> names;
  for (auto& [name, p] : model.named_parameters()) {
    names.push_back(name);
    params.push_back(p);
  }
  std::vector<torch::Tensor> shadow;
  for (const auto& p : params) shadow.push_back(p.detach().to(torch::kFloat64).clone());

  const auto adam = [&](double lr) {
    return torch::optim::AdamOptions(lr).betas({cfg.beta1, cfg.beta2});
  };
  torch::optim::Adam opt_critic(model.critic_parameters(), adam(cfg.lr_critic));
  torch::optim::Adam opt_eg(model.eg_parameters(), adam(cfg.lr_eg));

  std::vector<ModelInput> train_inputs;
  train_inputs.reserve(train_split.size());
  for (const auto& s : train_split) train_inputs.push_back(s.input);
  const auto data = train_inputs.empty() ? torch::Tensor()
                                         : stack_inputs(train_inputs, cfg.model.resolution);
  train_inputs.clear();
  train_inputs.shrink_to_fit();

  // Epoch-wise permutations from a seeded stream, independent of torch's RNG.
  SplitMix64 sampler(cfg.seed ^ 0xD1B54A32D192ED03ull);
  std::vector<std::int64_t> perm(train_split.size());
  std::size_t cursor = perm.size();
  auto next_batch = [&] {
    std::vector<std::int64_t> idx(static_cast<std::size_t>(cfg.batch_size));
    for (auto& v : idx) {
      if (cursor == perm.size()) {
        for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = static_cast<std::int64_t>(i);
        seeded_shuffle(perm, sampler);
        cursor = 0;
      }
      v = perm[cursor++];
    }
    return data.index_select(0, torch::tensor(idx, torch::kInt64));
  };

  const ScoreConfig score_cfg{cfg.lambda};
  const std::string run_config = config_to_json(cfg);
  auto snapshot = [&](std::int64_t step, const EvalResult& r) {
    Checkpoint ckpt;
    ckpt.model = cfg.model;
    ckpt.step = step;
    ckpt.run_config_json = run_config;
    ckpt.metrics_json = metrics_json(step, r);
    for (std::size_t i = 0; i < params.size(); ++i) ckpt.tensors.push_back({"ema." + names[i], shadow[i].clone()});
    for (std::size_t i = 0; i < params.size(); ++i) {
      ckpt.tensors.push_back({"online." + names[i], params[i].detach().clone()});
    }
    append_adam_state(ckpt, opt_critic, "adam.critic.");
    append_adam_state(ckpt, opt_eg, "adam.eg.");
    return ckpt;
  };
  auto run_eval = [&] {
    {
      torch::NoGradGuard no_grad;
      const auto eval_params = eval_model.named_parameters();
      for (std::size_t i = 0; i < shadow.size(); ++i) eval_params[i].second.copy_(shadow[i]);
    }
    const auto scores = score_split(eval_model, test_split, score_cfg, cfg.score_chunk);
    return evaluate_scores(scores);
  };

  TrainResult result;
  bool have_best = false;
  auto emit = [&](const TrainLogRecord& rec) {
    result.log.push_back(rec);
    if (sinks.log != nullptr) *sinks.log << log_line(rec) << '\n';
    if (sinks.timing != nullptr) {
      const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - wall_start).count();
      *sinks.timing << "{\"step\":" << rec.step << ",\"wall_time\":" << secs << "}\n";
    }
  };
  auto maybe_eval = [&](TrainLogRecord& rec) {
    if (rec.step != 0 && rec.step % cfg.eval_every != 0 && rec.step != cfg.total_steps) return;
    const auto r = run_eval();
    rec.eval_auc = r.auc;
    rec.eval_balacc = r.balacc;
    rec.eval_threshold = r.threshold;
    if (!have_best || r.auc > result.best_eval.auc) {
      have_best = true;
      result.best_eval = r;
      result.best_step = rec.step;
      result.best = snapshot(rec.step, r);
    }
    if (sinks.progress != nullptr) {
      *sinks.progress << "step " << rec.step << "/" << cfg.total_steps << "  auc " << r.auc
                      << "  balacc " << r.balacc << std::endl;
    }
    if (rec.step == cfg.total_steps) result.final = snapshot(rec.step, r);
  };
  auto diverged = [&](std::int64_t step, const char* term, const torch::Tensor& value) {
    ordered_json j;
    j["step"] = step;
    j["error"] = "non-finite loss";
    j["term"] = term;
    j["value"] = std::to_string(value.item<double>());
    if (sinks.log != nullptr) *sinks.log << j.dump() << '\n' << std::flush;
    throw TrainingDiverged(std::string("non-finite ") + term + " at step " + std::to_string(step));
  };

  TrainLogRecord rec;
  maybe_eval(rec);
  emit(rec);

  const auto batch = cfg.batch_size;
  const auto latent = cfg.model.latent_dim;
  for (std::int64_t step = 1; step <= cfg.total_steps; ++step) {
    TrainLogRecord next;
    next.step = step;
    // The eg_* fields carry over from the previous encoder-generator update.
    next.eg_adversarial = rec.eg_adversarial;
    next.consistency_image = rec.consistency_image;
    next.consistency_latent = rec.consistency_latent;
    next.total_eg = rec.total_eg;

    const auto x = next_batch();
    {
      const auto z = torch::randn({batch, latent});
      const auto alpha = torch::rand({batch});
      const auto loss = critic_loss(model, x, z, alpha, cfg.gp_weight);
      if (!finite(loss.total)) diverged(step, "critic_loss", loss.total);
      opt_critic.zero_grad();
      loss.total.backward();
      opt_critic.step();
      next.critic_loss = loss.total.item<double>();
      next.critic_penalty = loss.penalty.item<double>();
    }
    if (step % cfg.critic_steps_per_eg_step == 0) {
      const auto z = torch::randn({batch, latent});
      const auto loss = eg_loss(model, x, z, cfg.lambda_c);
      if (!finite(loss.total_eg)) diverged(step, "total_eg", loss.total_eg);
      opt_eg.zero_grad();
      loss.total_eg.backward();
      opt_eg.step();
      next.eg_updated = true;
      next.eg_adversarial = loss.eg_adversarial.item<double>();
      next.consistency_image = loss.consistency_image.item<double>();
      next.consistency_latent = loss.consistency_latent.item<double>();
      next.total_eg = loss.total_eg.item<double>();
    }
    ema_update(shadow, params, cfg.ema_decay);
    maybe_eval(next);
    emit(next);
    rec = std::move(next);
  }
  if (cfg.total_steps == 0) result.final = result.best;
  return result;
}

}  // namespace bytegan
