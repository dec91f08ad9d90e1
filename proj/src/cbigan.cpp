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

#include "bytegan/cbigan.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <nlohmann/json.hpp>

#include "bytegan/corpus.hpp"

namespace bytegan {

namespace nn = torch::nn;
namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

std::string_view to_string(Backbone backbone) {
  switch (backbone) {
    case Backbone::base_conv:
      return "base_conv";
    case Backbone::residual_small:
      return "residual_small";
    case Backbone::residual_deep:
      return "residual_deep";
    case Backbone::dense_small:
      return "dense_small";
  }
  return "base_conv";
}

Backbone parse_backbone(std::string_view text) {
  for (auto b : {Backbone::base_conv, Backbone::residual_small, Backbone::residual_deep,
                 Backbone::dense_small}) {
    if (text == to_string(b)) return b;
  }
  throw Error("unknown backbone '" + std::string(text) + "'");
}

namespace {

constexpr double kSlope = 0.2;

torch::Tensor lrelu(const torch::Tensor& x) { return torch::leaky_relu(x, kSlope); }

nn::Conv2d conv(std::int64_t in, std::int64_t out, std::int64_t k, std::int64_t stride,
                std::int64_t pad) {
  return nn::Conv2d(nn::Conv2dOptions(in, out, k).stride(stride).padding(pad));
}

nn::ConvTranspose2d up(std::int64_t in, std::int64_t out) {
  return nn::ConvTranspose2d(nn::ConvTranspose2dOptions(in, out, 4).stride(2).padding(1));
}

// Channel counts after the stem (index 0) and after each halving stage.
std::vector<std::int64_t> channel_plan(const ModelConfig& cfg) {
  if (cfg.resolution < 8 || !std::has_single_bit(static_cast<std::uint64_t>(cfg.resolution))) {
    throw ShapeError("model resolution must be a power of two >= 8");
  }
  if (cfg.latent_dim < 1 || cfg.width < 1 || cfg.critic_hidden < 1 || cfg.max_channels < 1) {
    throw Error("model dimensions must be positive");
  }
  // Stem halves once, every stage halves once more, down to a 4x4 map.
  const int stages = std::countr_zero(static_cast<std::uint64_t>(cfg.resolution)) - 3;
  std::vector<std::int64_t> plan{std::min(cfg.width, cfg.max_channels)};
  for (int i = 0; i < stages; ++i) plan.push_back(std::min(plan.back() * 2, cfg.max_channels));
  return plan;
}

// Strided conv, the plain encoder/critic stage.
struct PlainDownImpl : nn::Module {
  PlainDownImpl(std::int64_t in, std::int64_t out) : c(register_module("conv", conv(in, out, 4, 2, 1))) {}
  torch::Tensor forward(const torch::Tensor& x) { return lrelu(c->forward(x)); }
  nn::Conv2d c;
};
TORCH_MODULE(PlainDown);

struct ResidualImpl : nn::Module {
  ResidualImpl(std::int64_t in, std::int64_t out, bool down)
      : a(register_module("a", conv(in, out, 3, down ? 2 : 1, 1))),
        b(register_module("b", conv(out, out, 3, 1, 1))) {
    if (down || in != out) skip = register_module("skip", conv(in, out, 1, down ? 2 : 1, 0));
  }
  torch::Tensor forward(const torch::Tensor& x) {
    const auto y = b->forward(lrelu(a->forward(x)));
    return lrelu(y + (skip ? skip->forward(x) : x));
  }
  nn::Conv2d a, b;
  nn::Conv2d skip{nullptr};
};
TORCH_MODULE(Residual);

// Two densely connected conv layers, then a 1x1 transition and 2x2 average pool.
struct DenseDownImpl : nn::Module {
  DenseDownImpl(std::int64_t in, std::int64_t out) {
    const std::int64_t growth = std::max<std::int64_t>(1, in / 2);
    l1 = register_module("l1", conv(in, growth, 3, 1, 1));
    l2 = register_module("l2", conv(in + growth, growth, 3, 1, 1));
    transition = register_module("transition", conv(in + 2 * growth, out, 1, 1, 0));
  }
  torch::Tensor forward(const torch::Tensor& x) {
    auto h = torch::cat({x, lrelu(l1->forward(x))}, 1);
    h = torch::cat({h, lrelu(l2->forward(h))}, 1);
    return torch::avg_pool2d(lrelu(transition->forward(h)), 2);
  }
  nn::Conv2d l1{nullptr}, l2{nullptr}, transition{nullptr};
};
TORCH_MODULE(DenseDown);

// Image -> flattened 4x4 feature map, the trunk shared by E and the critic.
struct TrunkImpl : nn::Module {
  TrunkImpl(const ModelConfig& cfg, Backbone backbone) {
    const auto plan = channel_plan(cfg);
    stages = register_module("stages", nn::Sequential());
    stages->push_back(PlainDown(3, plan[0]));
    for (std::size_t i = 1; i < plan.size(); ++i) {
      const auto in = plan[i - 1];
      const auto out = plan[i];
      switch (backbone) {
        case Backbone::base_conv:
          stages->push_back(PlainDown(in, out));
          break;
        case Backbone::residual_small:
          stages->push_back(Residual(in, out, true));
          break;
        case Backbone::residual_deep:
          stages->push_back(Residual(in, out, true));
          stages->push_back(Residual(out, out, false));
          break;
        case Backbone::dense_small:
          stages->push_back(DenseDown(in, out));
          break;
      }
    }
    flat_dim = plan.back() * 16;
  }
  torch::Tensor forward(const torch::Tensor& x) { return stages->forward(x).flatten(1); }
  nn::Sequential stages{nullptr};
  std::int64_t flat_dim = 0;
};
TORCH_MODULE(Trunk);

struct EncoderImpl : nn::Module {
  explicit EncoderImpl(const ModelConfig& cfg)
      : trunk(register_module("trunk", Trunk(cfg, cfg.backbone))),
        head(register_module("head", nn::Linear(trunk->flat_dim, cfg.latent_dim))) {}
  torch::Tensor forward(const torch::Tensor& x) { return head->forward(trunk->forward(x)); }
  Trunk trunk;
  nn::Linear head;
};
TORCH_MODULE(Encoder);

struct GeneratorImpl : nn::Module {
  explicit GeneratorImpl(const ModelConfig& cfg) : plan(channel_plan(cfg)) {
    fc = register_module("fc", nn::Linear(cfg.latent_dim, plan.back() * 16));
    ups = register_module("ups", nn::ModuleList());
    for (std::size_t i = plan.size() - 1; i > 0; --i) ups->push_back(up(plan[i], plan[i - 1]));
    out = register_module("out", up(plan[0], 3));
  }
  torch::Tensor forward(const torch::Tensor& z) {
    auto h = lrelu(fc->forward(z)).view({z.size(0), plan.back(), 4, 4});
    for (const auto& m : *ups) h = lrelu(m->as<nn::ConvTranspose2d>()->forward(h));
    return torch::tanh(out->forward(h));
  }
  std::vector<std::int64_t> plan;
  nn::Linear fc{nullptr};
  nn::ModuleList ups{nullptr};
  nn::ConvTranspose2d out{nullptr};
};
TORCH_MODULE(Generator);

struct DiscriminatorImpl : nn::Module {
  explicit DiscriminatorImpl(const ModelConfig& cfg)
      : image(register_module("image", Trunk(cfg, Backbone::base_conv))),
        image_fc(register_module("image_fc", nn::Linear(image->flat_dim, cfg.critic_hidden))),
        latent_fc(register_module("latent_fc", nn::Linear(cfg.latent_dim, cfg.critic_hidden))),
        joint(register_module("joint", nn::Linear(2 * cfg.critic_hidden, cfg.critic_hidden))),
        out(register_module("out", nn::Linear(cfg.critic_hidden, 1))),
        drop(register_module("drop", nn::Dropout(cfg.dropout))) {}
  CriticOutput forward(const torch::Tensor& x, const torch::Tensor& z) {
    const auto hx = drop->forward(lrelu(image_fc->forward(image->forward(x))));
    const auto hz = drop->forward(lrelu(latent_fc->forward(z)));
    auto features = lrelu(joint->forward(torch::cat({hx, hz}, 1)));
    auto score = out->forward(drop->forward(features)).squeeze(1);
    return {score, features};
  }
  Trunk image;
  nn::Linear image_fc, latent_fc, joint, out;
  nn::Dropout drop;
};
TORCH_MODULE(Discriminator);

std::vector<torch::Tensor> collect(std::initializer_list<const nn::Module*> modules) {
  std::vector<torch::Tensor> out;
  for (const auto* m : modules) {
    for (const auto& p : m->parameters()) out.push_back(p);
  }
  return out;
}

std::string shape_string(const torch::Tensor& t) {
  std::string s = "[";
  for (std::int64_t i = 0; i < t.dim(); ++i) s += (i ? "," : "") + std::to_string(t.size(i));
  return s + "]";
}

// Turns gradient tracking off for a set of tensors and restores it on exit.
class FreezeGuard {
 public:
  explicit FreezeGuard(std::vector<torch::Tensor> params) : params_(std::move(params)) {
    for (auto& p : params_) {
      was_.push_back(p.requires_grad());
      p.requires_grad_(false);
    }
  }
  ~FreezeGuard() {
    for (std::size_t i = 0; i < params_.size(); ++i) params_[i].requires_grad_(was_[i]);
  }
  FreezeGuard(const FreezeGuard&) = delete;
  FreezeGuard& operator=(const FreezeGuard&) = delete;

 private:
  std::vector<torch::Tensor> params_;
  std::vector<bool> was_;
};

}  // namespace

struct CBiGAN::Nets {
  explicit Nets(const ModelConfig& cfg) : E(cfg), G(cfg), D(cfg) {}
  Encoder E;
  Generator G;
  Discriminator D;
};

CBiGAN::CBiGAN(const ModelConfig& cfg) : cfg_(cfg) {
  if (cfg.dropout < 0.0 || cfg.dropout >= 1.0) throw Error("dropout must be in [0, 1)");
  nets_ = std::make_unique<Nets>(cfg);
  set_training(false);
}

CBiGAN::~CBiGAN() = default;

torch::Tensor CBiGAN::encode(const torch::Tensor& x) {
  if (x.dim() != 4 || x.size(1) != 3 || x.size(2) != cfg_.resolution || x.size(3) != cfg_.resolution) {
    throw ShapeError("encoder expects [B,3," + std::to_string(cfg_.resolution) + "," +
                     std::to_string(cfg_.resolution) + "], got " + shape_string(x));
  }
  return nets_->E->forward(x);
}

torch::Tensor CBiGAN::generate(const torch::Tensor& z) {
  if (z.dim() != 2 || z.size(1) != cfg_.latent_dim) {
    throw ShapeError("generator expects [B," + std::to_string(cfg_.latent_dim) + "], got " +
                     shape_string(z));
  }
  return nets_->G->forward(z);
}

CriticOutput CBiGAN::discriminate(const torch::Tensor& x, const torch::Tensor& z) {
  if (x.dim() != 4 || x.size(1) != 3 || x.size(2) != cfg_.resolution || x.size(3) != cfg_.resolution) {
    throw ShapeError("critic expects images [B,3," + std::to_string(cfg_.resolution) + "," +
                     std::to_string(cfg_.resolution) + "], got " + shape_string(x));
  }
  if (z.dim() != 2 || z.size(1) != cfg_.latent_dim || z.size(0) != x.size(0)) {
    throw ShapeError("critic expects latents [" + std::to_string(x.size(0)) + "," +
                     std::to_string(cfg_.latent_dim) + "], got " + shape_string(z));
  }
  return nets_->D->forward(x, z);
}

std::vector<torch::Tensor> CBiGAN::eg_parameters() {
  return collect({nets_->E.ptr().get(), nets_->G.ptr().get()});
}

std::vector<torch::Tensor> CBiGAN::critic_parameters() { return collect({nets_->D.ptr().get()}); }

std::vector<std::pair<std::string, torch::Tensor>> CBiGAN::named_parameters() const {
  std::vector<std::pair<std::string, torch::Tensor>> out;
  auto add = [&](const char* prefix, const nn::Module& m) {
    for (const auto& item : m.named_parameters(true)) out.emplace_back(prefix + item.key(), item.value());
  };
  add("E.", *nets_->E);
  add("G.", *nets_->G);
  add("D.", *nets_->D);
  return out;
}

std::int64_t CBiGAN::parameter_count() const {
  std::int64_t n = 0;
  for (const auto& [name, p] : named_parameters()) n += p.numel();
  return n;
}

void CBiGAN::set_training(bool on) {
  nets_->E->train(on);
  nets_->G->train(on);
  nets_->D->train(on);
}

bool CBiGAN::training() const { return nets_->D->is_training(); }

void CBiGAN::to(torch::Dtype dtype) {
  nets_->E->to(dtype);
  nets_->G->to(dtype);
  nets_->D->to(dtype);
}

torch::Dtype CBiGAN::dtype() const {
  return nets_->E->parameters().front().scalar_type();
}

// ---------------------------------------------------------------------------
// Losses

ConsistencyTerms consistency_loss(JointNets& nets, const torch::Tensor& x, const torch::Tensor& z) {
  if (x.size(0) != z.size(0)) throw ShapeError("image and latent batches differ in size");
  const auto x_rec = nets.generate(nets.encode(x));
  const auto z_rec = nets.encode(nets.generate(z));
  return {(x - x_rec).abs().mean(), (z - z_rec).abs().mean()};
}

CriticLoss critic_loss(JointNets& nets, const torch::Tensor& x, const torch::Tensor& z,
                       const torch::Tensor& alpha, double gp_weight) {
  const auto b = x.size(0);
  if (z.size(0) != b || alpha.numel() != b) throw ShapeError("critic batch sizes differ");
  torch::Tensor ex;
  torch::Tensor gz;
  {
    torch::NoGradGuard no_grad;
    ex = nets.encode(x);
    gz = nets.generate(z);
  }
  const auto real = nets.discriminate(x, ex).score;
  const auto fake = nets.discriminate(gz, z).score;
  CriticLoss loss;
  loss.adversarial = fake.mean() - real.mean();

  const auto a_img = alpha.reshape({b, 1, 1, 1}).to(x.dtype());
  const auto a_lat = alpha.reshape({b, 1}).to(z.dtype());
  auto x_hat = (a_img * x + (1 - a_img) * gz).detach().requires_grad_(true);
  auto z_hat = (a_lat * ex + (1 - a_lat) * z).detach().requires_grad_(true);
  const auto mixed = nets.discriminate(x_hat, z_hat).score;
  const auto grads = torch::autograd::grad({mixed.sum()}, {x_hat, z_hat},
                                           torch::autograd::variable_list{}, true, true);
  const auto sq = grads[0].pow(2).flatten(1).sum(1) + grads[1].pow(2).flatten(1).sum(1);
  loss.penalty = (torch::sqrt(sq + 1e-12) - 1).pow(2).mean();
  loss.total = loss.adversarial + gp_weight * loss.penalty;
  return loss;
}

LossBreakdown eg_loss(JointNets& nets, const torch::Tensor& x, const torch::Tensor& z,
                      double lambda_c) {
  if (lambda_c < 0) throw Error("consistency weight must be non-negative");
  if (x.size(0) != z.size(0)) throw ShapeError("image and latent batches differ in size");
  FreezeGuard frozen(nets.critic_parameters());
  const auto ex = nets.encode(x);
  const auto gz = nets.generate(z);
  LossBreakdown out;
  out.eg_adversarial = nets.discriminate(x, ex).score.mean() - nets.discriminate(gz, z).score.mean();
  out.consistency_image = (x - nets.generate(ex)).abs().mean();
  out.consistency_latent = (z - nets.encode(gz)).abs().mean();
  out.total_eg = out.eg_adversarial + lambda_c * (out.consistency_image + out.consistency_latent);
  return out;
}

// ---------------------------------------------------------------------------
// Scoring

ScoreTerms score_terms(JointNets& nets, const torch::Tensor& x) {
  const auto ex = nets.encode(x);
  const auto x_rec = nets.generate(ex);
  const auto f_real = nets.discriminate(x, ex).features;
  const auto f_rec = nets.discriminate(x_rec, ex).features;
  return {(x - x_rec).abs().flatten(1).mean(1), (f_real - f_rec).abs().flatten(1).mean(1)};
}

torch::Tensor anomaly_scores(JointNets& nets, const torch::Tensor& x, const ScoreConfig& cfg) {
  if (cfg.lambda < 0.0 || cfg.lambda > 1.0) throw Error("score lambda must be in [0, 1]");
  const auto t = score_terms(nets, x);
  return cfg.lambda * t.reconstruction + (1.0 - cfg.lambda) * t.features;
}

torch::Tensor stack_inputs(std::span<const ModelInput> inputs, std::int64_t resolution) {
  const std::int64_t plane = 3 * resolution * resolution;
  auto out = torch::empty({static_cast<std::int64_t>(inputs.size()), 3, resolution, resolution});
  float* dst = out.data_ptr<float>();
  for (const auto& in : inputs) {
    if (in.resolution != resolution || static_cast<std::int64_t>(in.values.size()) != plane) {
      throw ShapeError("model input has resolution " + std::to_string(in.resolution) + ", expected " +
                       std::to_string(resolution));
    }
    std::memcpy(dst, in.values.data(), sizeof(float) * plane);
    dst += plane;
  }
  return out;
}

ModelInput tensor_to_input(const torch::Tensor& image) {
  if (image.dim() != 3 || image.size(0) != 3 || image.size(1) != image.size(2)) {
    throw ShapeError("expected a [3,R,R] image, got " + shape_string(image));
  }
  const auto t = image.detach().to(torch::kFloat32).contiguous();
  ModelInput out;
  out.resolution = static_cast<std::uint32_t>(t.size(1));
  out.values.assign(t.data_ptr<float>(), t.data_ptr<float>() + t.numel());
  return out;
}

namespace {

torch::Tensor single(CBiGAN& model, const ModelInput& x) {
  return stack_inputs(std::span<const ModelInput>(&x, 1), model.config().resolution)
      .to(model.dtype());
}

torch::Tensor latent_row(CBiGAN& model, std::span<const float> z) {
  if (static_cast<std::int64_t>(z.size()) != model.config().latent_dim) {
    throw ShapeError("latent vector has " + std::to_string(z.size()) + " values, expected " +
                     std::to_string(model.config().latent_dim));
  }
  return torch::from_blob(const_cast<float*>(z.data()), {1, static_cast<std::int64_t>(z.size())},
                          torch::kFloat32)
      .to(model.dtype());
}

std::vector<float> to_floats(const torch::Tensor& t) {
  const auto c = t.detach().to(torch::kFloat32).contiguous();
  return {c.data_ptr<float>(), c.data_ptr<float>() + c.numel()};
}

}  // namespace

std::vector<float> encode(CBiGAN& model, const ModelInput& x) {
  torch::NoGradGuard no_grad;
  return to_floats(model.encode(single(model, x)));
}

ModelInput generate(CBiGAN& model, std::span<const float> z) {
  torch::NoGradGuard no_grad;
  return tensor_to_input(model.generate(latent_row(model, z))[0]);
}

std::pair<double, std::vector<float>> discriminate(CBiGAN& model, const ModelInput& x,
                                                   std::span<const float> z) {
  torch::NoGradGuard no_grad;
  const auto out = model.discriminate(single(model, x), latent_row(model, z));
  return {out.score[0].item<double>(), to_floats(out.features[0])};
}

double anomaly_score(CBiGAN& model, const ModelInput& x, const ScoreConfig& cfg) {
  torch::NoGradGuard no_grad;
  return anomaly_scores(model, single(model, x), cfg)[0].item<double>();
}

// ---------------------------------------------------------------------------
// Checkpoints

namespace {

constexpr char kMagic[8] = {'B', 'Y', 'T', 'E', 'G', 'A', 'N', 'C'};

static_assert(std::endian::native == std::endian::little, "checkpoint blobs are little-endian");

std::string dtype_tag(const torch::Tensor& t) {
  if (t.scalar_type() == torch::kFloat32) return "f32";
  if (t.scalar_type() == torch::kFloat64) return "f64";
  if (t.scalar_type() == torch::kInt64) return "i64";
  throw Error("unsupported checkpoint tensor dtype");
}

torch::Dtype parse_dtype(const std::string& tag) {
  if (tag == "f32") return torch::kFloat32;
  if (tag == "f64") return torch::kFloat64;
  if (tag == "i64") return torch::kInt64;
  throw Error("unknown checkpoint tensor dtype '" + tag + "'");
}

ordered_json model_json(const ModelConfig& m) {
  ordered_json j;
  j["backbone"] = std::string(to_string(m.backbone));
  j["latent_dim"] = m.latent_dim;
  j["resolution"] = m.resolution;
  j["width"] = m.width;
  j["max_channels"] = m.max_channels;
  j["critic_hidden"] = m.critic_hidden;
  j["dropout"] = m.dropout;
  return j;
}

ModelConfig model_from_json(const ordered_json& j) {
  ModelConfig m;
  m.backbone = parse_backbone(j.at("backbone").get<std::string>());
  m.latent_dim = j.at("latent_dim").get<std::int64_t>();
  m.resolution = j.at("resolution").get<std::int64_t>();
  m.width = j.at("width").get<std::int64_t>();
  m.max_channels = j.at("max_channels").get<std::int64_t>();
  m.critic_hidden = j.at("critic_hidden").get<std::int64_t>();
  m.dropout = j.at("dropout").get<double>();
  return m;
}

}  // namespace

const torch::Tensor* Checkpoint::find(std::string_view name) const {
  for (const auto& t : tensors) {
    if (t.name == name) return &t.value;
  }
  return nullptr;
}

void save_checkpoint(const Checkpoint& ckpt, const fs::path& path) {
  ordered_json header;
  header["format_version"] = Checkpoint::kFormatVersion;
  header["model"] = model_json(ckpt.model);
  header["step"] = ckpt.step;
  header["run_config"] = ordered_json::parse(ckpt.run_config_json);
  header["metrics"] = ordered_json::parse(ckpt.metrics_json);
  ordered_json index = ordered_json::array();
  std::vector<torch::Tensor> blobs;
  std::uint64_t offset = 0;
  for (const auto& t : ckpt.tensors) {
    const auto c = t.value.detach().cpu().contiguous();
    const std::uint64_t nbytes = c.numel() * c.element_size();
    ordered_json entry;
    entry["name"] = t.name;
    entry["dtype"] = dtype_tag(c);
    entry["shape"] = c.sizes().vec();
    entry["offset"] = offset;
    entry["nbytes"] = nbytes;
    index.push_back(std::move(entry));
    blobs.push_back(c);
    offset += nbytes;
  }
  header["tensors"] = std::move(index);
  const std::string text = header.dump();

  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write checkpoint " + tmp.string());
    const std::uint32_t version = Checkpoint::kFormatVersion;
    const std::uint64_t header_len = text.size();
    out.write(kMagic, sizeof(kMagic));
    out.write(reinterpret_cast<const char*>(&version), sizeof(version));
    out.write(reinterpret_cast<const char*>(&header_len), sizeof(header_len));
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    for (const auto& c : blobs) {
      out.write(static_cast<const char*>(c.data_ptr()),
                static_cast<std::streamsize>(c.numel() * c.element_size()));
    }
    if (!out.flush()) throw Error("write failed for checkpoint " + tmp.string());
  }
  fs::rename(tmp, path);
}

Checkpoint load_checkpoint(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open checkpoint " + path.string());
  char magic[8];
  std::uint32_t version = 0;
  std::uint64_t header_len = 0;
  in.read(magic, sizeof(magic));
  in.read(reinterpret_cast<char*>(&version), sizeof(version));
  in.read(reinterpret_cast<char*>(&header_len), sizeof(header_len));
  if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw Error(path.string() + " is not a checkpoint");
  }
  if (version != Checkpoint::kFormatVersion) {
    throw Error("unsupported checkpoint version " + std::to_string(version));
  }
  if (header_len > (1ull << 30)) throw Error("checkpoint header is implausibly large");
  std::string text(header_len, '\0');
  in.read(text.data(), static_cast<std::streamsize>(header_len));
  if (!in) throw Error("truncated checkpoint header in " + path.string());

  Checkpoint ckpt;
  try {
    const auto header = ordered_json::parse(text);
    ckpt.model = model_from_json(header.at("model"));
    ckpt.step = header.at("step").get<std::int64_t>();
    ckpt.run_config_json = header.at("run_config").dump();
    ckpt.metrics_json = header.at("metrics").dump();
    const auto data_start = in.tellg();
    for (const auto& entry : header.at("tensors")) {
      const auto shape = entry.at("shape").get<std::vector<std::int64_t>>();
      const auto dtype = parse_dtype(entry.at("dtype").get<std::string>());
      auto t = torch::empty(shape, torch::TensorOptions().dtype(dtype));
      const auto nbytes = entry.at("nbytes").get<std::uint64_t>();
      if (nbytes != static_cast<std::uint64_t>(t.numel() * t.element_size())) {
        throw ShapeError("checkpoint tensor " + entry.at("name").get<std::string>() +
                         " has inconsistent size");
      }
      in.seekg(data_start + static_cast<std::streamoff>(entry.at("offset").get<std::uint64_t>()));
      in.read(static_cast<char*>(t.data_ptr()), static_cast<std::streamsize>(nbytes));
      if (!in) throw Error("truncated checkpoint data in " + path.string());
      ckpt.tensors.push_back({entry.at("name").get<std::string>(), std::move(t)});
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error("malformed checkpoint header in " + path.string() + ": " + e.what());
  }
  return ckpt;
}

void append_parameters(Checkpoint& ckpt, const CBiGAN& model, std::string_view prefix) {
  for (const auto& [name, p] : model.named_parameters()) {
    ckpt.tensors.push_back({std::string(prefix) + name, p.detach().clone()});
  }
}

void load_parameters(CBiGAN& model, const Checkpoint& ckpt, std::string_view prefix) {
  torch::NoGradGuard no_grad;
  for (auto& [name, p] : model.named_parameters()) {
    const auto* t = ckpt.find(std::string(prefix) + name);
    if (t == nullptr) throw ShapeError("checkpoint lacks tensor " + std::string(prefix) + name);
    if (t->sizes() != p.sizes()) {
      throw ShapeError("checkpoint tensor " + std::string(prefix) + name + " has shape " +
                       shape_string(*t) + ", model expects " + shape_string(p));
    }
    p.copy_(*t);
  }
}

std::string tensors_digest(std::span<const NamedTensor> tensors) {
  std::vector<std::uint8_t> buf;
  for (const auto& t : tensors) {
    const auto c = t.value.detach().cpu().contiguous();
    const std::string head = t.name + shape_string(c) + dtype_tag(c);
    buf.insert(buf.end(), head.begin(), head.end());
    const auto* bytes = static_cast<const std::uint8_t*>(c.data_ptr());
    buf.insert(buf.end(), bytes, bytes + c.numel() * c.element_size());
  }
  return sha256_hex(buf);
}

std::string parameter_digest(const CBiGAN& model) {
  std::vector<NamedTensor> named;
  for (const auto& [name, p] : model.named_parameters()) named.push_back({name, p});
  return tensors_digest(named);
}

}  // namespace bytegan
