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

#include "bytegan/cli.hpp"

#include <CLI11.hpp>
#include <fstream>
#include <nlohmann/json.hpp>
#include <optional>
#include <sstream>

#include "bytegan/ablation.hpp"
#include "bytegan/corpus.hpp"
#include "bytegan/extract.hpp"
#include "bytegan/pipeline.hpp"
#include "bytegan/png_io.hpp"
#include "bytegan/synth.hpp"
#include "bytegan/train.hpp"

namespace bytegan {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

namespace {

// Flags shared by the training-style subcommands.
struct RunFlags {
  std::string preset = "default";
  std::string config_file;
  std::vector<std::string> overrides;
  std::optional<std::string> layout;
  std::optional<std::string> coloring;
  std::optional<std::int64_t> resolution;
  std::optional<std::int64_t> steps;
  std::optional<double> lambda;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> backbone;

  void attach(CLI::App* cmd) {
    cmd->add_option("--preset", preset, "Base configuration")
        ->check(CLI::IsMember({"default", "desk"}))
        ->capture_default_str();
    cmd->add_option("--config", config_file, "Flat key = value config file")->check(CLI::ExistingFile);
    cmd->add_option("--set", overrides, "Config override key=value (repeatable)");
    cmd->add_option("--layout", layout, "hilbert | rowmajor")->check(CLI::IsMember({"hilbert", "rowmajor"}));
    cmd->add_option("--coloring", coloring, "rgb | greyscale")->check(CLI::IsMember({"rgb", "greyscale"}));
    cmd->add_option("--resolution", resolution, "Model input side in pixels");
    cmd->add_option("--steps", steps, "Total training steps");
    cmd->add_option("--lambda", lambda, "Score weight of the pixel term");
    cmd->add_option("--seed", seed, "Random seed");
    cmd->add_option("--backbone", backbone, "base_conv | residual_small | residual_deep | dense_small");
  }

  TrainConfig resolve() const {
    TrainConfig cfg = preset == "desk" ? desk_preset() : TrainConfig{};
    if (!config_file.empty()) {
      std::ifstream in(config_file);
      std::stringstream text;
      text << in.rdbuf();
      apply_config_text(cfg, text.str());
    }
    for (const auto& kv : overrides) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) throw CLI::ValidationError("--set", "expected key=value, got " + kv);
      apply_config_value(cfg, kv.substr(0, eq), kv.substr(eq + 1));
    }
    if (layout) apply_config_value(cfg, "layout", *layout);
    if (coloring) apply_config_value(cfg, "coloring", *coloring);
    if (resolution) cfg.model.resolution = *resolution;
    if (steps) cfg.total_steps = *steps;
    if (lambda) cfg.lambda = *lambda;
    if (seed) cfg.seed = *seed;
    if (backbone) cfg.model.backbone = parse_backbone(*backbone);
    cfg.validate();
    return cfg;
  }
};

void log_config(std::ostream& err, const std::string& command, const std::string& json) {
  err << "[" << command << "] config " << json << std::endl;
}

Label label_from_flag(const std::string& s) { return parse_label(s); }

Encoding encoding_from(const std::string& layout, const std::string& coloring) {
  return {parse_layout(layout), parse_coloring(coloring)};
}

std::vector<std::uint8_t> must_read(const fs::path& path) {
  auto data = read_file_bytes(path);
  if (data.empty()) throw Error("empty input: " + path.string());
  return data;
}

// Encodes one file to its archival PNG and returns the sidecar record.
ImageSidecar encode_one(const fs::path& input, const Encoding& enc, const fs::path& out_dir,
                        std::string sha) {
  const auto data = must_read(input);
  if (sha.empty()) sha = sha256_hex(data);
  const fs::path target = out_dir / archival_filename(sha, enc);
  PngMetadata meta{sha};
  ImageSidecar side;
  side.layout = std::string(to_string(enc.layout));
  side.coloring = std::string(to_string(enc.coloring));
  side.source_sha256 = sha;
  side.file = target.filename().string();
  if (enc.coloring == Coloring::palette_rgb) {
    const auto stream = bytes_to_nibbles(data);
    const auto plane = layout_symbols(stream.symbols, enc.layout);
    write_plane_png(plane, target, Palette::standard(), meta);
    side.payload_len = plane.payload_len;
    side.order = plane.order;
  } else {
    const auto img = encode_bytes(data, enc);
    write_png(img, target, Palette::standard(), meta);
    side.payload_len = img.payload_len;
    side.order = img.order;
  }
  return side;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Hilbert byteplot encoding and one-class CBiGAN anomaly scoring", "bytegan"};
  app.require_subcommand(1);
  unsigned workers = 1;
  app.add_option("--workers", workers, "Cap on worker threads for every pool")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();

  // ingest
  auto* ingest = app.add_subcommand("ingest", "Hash a directory tree into a manifest");
  std::string ingest_root, ingest_out, ingest_label = "benign";
  std::optional<std::string> ingest_family;
  std::uint64_t min_size = IngestOptions{}.min_size, max_size = IngestOptions{}.max_size;
  ingest->add_option("--root", ingest_root, "Directory to walk")->required();
  ingest->add_option("--label", ingest_label, "benign | malicious")
      ->check(CLI::IsMember({"benign", "malicious"}))
      ->capture_default_str();
  ingest->add_option("--out", ingest_out, "Manifest to write")->required();
  ingest->add_option("--min-size", min_size, "Minimum file size in bytes")->capture_default_str();
  ingest->add_option("--max-size", max_size, "Maximum file size in bytes")->capture_default_str();
  ingest->add_option("--family", ingest_family, "Family tag for every entry");

  // split
  auto* split = app.add_subcommand("split", "Assign train/test/validation splits");
  std::string split_manifest_path, split_out;
  std::uint64_t split_seed = 42;
  std::vector<double> ratios{0.6, 0.2, 0.2};
  split->add_option("--manifest", split_manifest_path, "Input manifest")->required()->check(CLI::ExistingFile);
  split->add_option("--out", split_out, "Manifest to write (may equal --manifest)")->required();
  split->add_option("--seed", split_seed, "Shuffle seed")->capture_default_str();
  split->add_option("--ratios", ratios, "train,test,validation fractions")
      ->expected(3)
      ->delimiter(',')
      ->capture_default_str();

  // verify
  auto* verify = app.add_subcommand("verify", "Re-hash manifest entries and report changes");
  std::string verify_manifest_path;
  verify->add_option("--manifest", verify_manifest_path, "Manifest to check")->required()->check(CLI::ExistingFile);

  // encode
  auto* encode = app.add_subcommand("encode", "Write archival byteplot PNGs");
  std::string encode_input, encode_manifest, encode_out_dir, encode_out_manifest;
  std::string layout = "hilbert", coloring = "rgb";
  auto* enc_in = encode->add_option("--input", encode_input, "Single file to encode");
  auto* enc_man = encode->add_option("--manifest", encode_manifest, "Encode every manifest entry")
                      ->check(CLI::ExistingFile);
  enc_in->excludes(enc_man);
  encode->add_option("--out-dir", encode_out_dir, "Directory for the PNG files")->required();
  encode->add_option("--out-manifest", encode_out_manifest,
                     "Manifest with image records (default <out-dir>/manifest.jsonl)");
  encode->add_option("--layout", layout, "hilbert | rowmajor")
      ->check(CLI::IsMember({"hilbert", "rowmajor"}))
      ->capture_default_str();
  encode->add_option("--coloring", coloring, "rgb | greyscale")
      ->check(CLI::IsMember({"rgb", "greyscale"}))
      ->capture_default_str();

  // train
  auto* train_cmd = app.add_subcommand("train", "Train on the benign train split");
  std::string train_manifest, train_out;
  RunFlags train_flags;
  train_cmd->add_option("--manifest", train_manifest, "Split manifest")->required()->check(CLI::ExistingFile);
  train_cmd->add_option("--out-dir", train_out, "Checkpoints and logs go here")->required();
  train_flags.attach(train_cmd);

  // score
  auto* score = app.add_subcommand("score", "Print <sha256>\\t<score> per input");
  std::string score_ckpt, score_input, score_manifest, score_split_name = "test";
  std::optional<double> score_lambda;
  score->add_option("--checkpoint", score_ckpt, "Checkpoint file")->required()->check(CLI::ExistingFile);
  auto* sc_in = score->add_option("--input", score_input, "Raw file or archival PNG")->check(CLI::ExistingFile);
  auto* sc_man = score->add_option("--manifest", score_manifest, "Score a manifest split")->check(CLI::ExistingFile);
  sc_in->excludes(sc_man);
  score->add_option("--split", score_split_name, "train | test | validation | all")->capture_default_str();
  score->add_option("--lambda", score_lambda, "Override the score weight");

  // eval
  auto* eval = app.add_subcommand("eval", "AUC and best balanced accuracy of a checkpoint");
  std::string eval_ckpt, eval_manifest, eval_split_name = "test";
  std::optional<double> eval_lambda;
  eval->add_option("--checkpoint", eval_ckpt, "Checkpoint file")->required()->check(CLI::ExistingFile);
  eval->add_option("--manifest", eval_manifest, "Split manifest")->required()->check(CLI::ExistingFile);
  eval->add_option("--split", eval_split_name, "test | validation")->capture_default_str();
  eval->add_option("--lambda", eval_lambda, "Override the score weight");

  // ablate
  auto* ablate = app.add_subcommand("ablate", "Train one model per encoding and report");
  std::string ablate_manifest, ablate_out;
  std::vector<std::string> ablate_encodings;
  RunFlags ablate_flags;
  ablate->add_option("--manifest", ablate_manifest, "Split manifest")->required()->check(CLI::ExistingFile);
  ablate->add_option("--out-dir", ablate_out, "Report, logs and checkpoints go here")->required();
  ablate->add_option("--encodings", ablate_encodings,
                     "layout.coloring list (default rowmajor.greyscale hilbert.greyscale hilbert.rgb)");
  ablate_flags.attach(ablate);

  // synth
  auto* synth = app.add_subcommand("synth", "Generate a synthetic benign/anomalous corpus");
  SynthSpec spec;
  std::string synth_out;
  synth->add_option("--out-dir", synth_out, "Output directory")->required();
  synth->add_option("--benign", spec.benign, "Benign file count")->capture_default_str();
  synth->add_option("--anomalous", spec.anomalous, "Anomalous file count")->capture_default_str();
  synth->add_option("--seed", spec.seed, "Generator seed")->capture_default_str();
  synth->add_option("--min-size", spec.min_size, "Minimum file size in bytes")->capture_default_str();
  synth->add_option("--max-size", spec.max_size, "Maximum file size in bytes")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    torch::set_num_threads(static_cast<int>(workers));
    if (*ingest) {
      IngestOptions opts;
      opts.label = label_from_flag(ingest_label);
      opts.min_size = min_size;
      opts.max_size = max_size;
      opts.family = ingest_family;
      opts.workers = workers;
      log_config(err, "ingest", ordered_json{{"root", ingest_root}, {"label", ingest_label},
                                             {"min_size", min_size}, {"max_size", max_size},
                                             {"workers", workers}}.dump());
      const auto result = ingest_dir(ingest_root, opts);
      for (const auto& w : result.warnings) err << "warning: " << w.path.string() << ": " << w.message << '\n';
      write_manifest(fs::path(ingest_out), result.entries);
      err << "[ingest] " << result.entries.size() << " entries -> " << ingest_out << '\n';
    } else if (*split) {
      if (ratios.size() != 3) throw Error("--ratios needs three values");
      log_config(err, "split", ordered_json{{"manifest", split_manifest_path}, {"seed", split_seed},
                                            {"ratios", ratios}}.dump());
      auto entries = read_manifest(fs::path(split_manifest_path));
      const auto assignment = split_manifest(entries, {ratios[0], ratios[1], ratios[2]}, split_seed);
      apply_splits(entries, assignment);
      check_one_class_purity(entries);
      write_manifest(fs::path(split_out), entries);
      std::size_t counts[3] = {0, 0, 0};
      for (const auto& e : entries) ++counts[static_cast<int>(*e.split)];
      err << "[split] train " << counts[0] << ", test " << counts[1] << ", validation " << counts[2] << '\n';
    } else if (*verify) {
      log_config(err, "verify", ordered_json{{"manifest", verify_manifest_path}}.dump());
      const auto entries = read_manifest(fs::path(verify_manifest_path));
      for (const auto& f : verify_manifest(entries)) {
        out << f.entry_id << '\t' << to_string(f.issue) << '\t' << f.path.string() << '\n';
      }
    } else if (*encode) {
      const Encoding enc = encoding_from(layout, coloring);
      log_config(err, "encode", ordered_json{{"layout", layout}, {"coloring", coloring},
                                             {"out_dir", encode_out_dir}, {"workers", workers}}.dump());
      if (encode_input.empty() && encode_manifest.empty()) {
        err << "encode needs --input or --manifest\n" << encode->help();
        return kExitUsage;
      }
      fs::create_directories(encode_out_dir);
      if (!encode_input.empty()) {
        const auto side = encode_one(encode_input, enc, encode_out_dir, {});
        out << (fs::path(encode_out_dir) / side.file).string() << '\n';
      } else {
        auto entries = read_manifest(fs::path(encode_manifest));
        parallel_for(entries.size(), workers, [&](std::size_t i) {
          entries[i].image = encode_one(entries[i].path, enc, encode_out_dir, entries[i].sha256);
        });
        const fs::path target = encode_out_manifest.empty() ? fs::path(encode_out_dir) / "manifest.jsonl"
                                                            : fs::path(encode_out_manifest);
        write_manifest(target, entries);
        err << "[encode] " << entries.size() << " images -> " << encode_out_dir << '\n';
      }
    } else if (*train_cmd) {
      const TrainConfig cfg = train_flags.resolve();
      log_config(err, "train", config_to_json(cfg));
      const auto entries = read_manifest(fs::path(train_manifest));
      check_one_class_purity(entries);
      const auto res = static_cast<std::uint32_t>(cfg.model.resolution);
      const auto train_set = load_inputs(entries, Split::train, cfg.encoding, res, workers);
      const auto test_set = load_inputs(entries, Split::test, cfg.encoding, res, workers);
      const fs::path dir(train_out);
      fs::create_directories(dir);
      {
        std::ofstream cfg_out(dir / "config.json", std::ios::trunc);
        cfg_out << config_to_json(cfg) << '\n';
      }
      std::ofstream log(dir / "train.log.jsonl", std::ios::trunc);
      std::ofstream timing(dir / "timing.jsonl", std::ios::trunc);
      const auto result = train(cfg, train_set, test_set, {&log, &timing, &err});
      save_checkpoint(result.best, dir / "best.ckpt");
      save_checkpoint(result.final, dir / "final.ckpt");
      err << "[train] best auc " << result.best_eval.auc << " at step " << result.best_step << '\n';
    } else if (*score || *eval) {
      const std::string& ckpt_path = *score ? score_ckpt : eval_ckpt;
      const Checkpoint ckpt = load_checkpoint(ckpt_path);
      const TrainConfig cfg = config_from_json(ckpt.run_config_json);
      ScoreConfig sc{cfg.lambda};
      if (*score && score_lambda) sc.lambda = *score_lambda;
      if (*eval && eval_lambda) sc.lambda = *eval_lambda;
      auto model = model_from_checkpoint(ckpt);
      const auto res = static_cast<std::uint32_t>(ckpt.model.resolution);
      ordered_json logged = ordered_json::parse(ckpt.run_config_json);
      logged["lambda"] = sc.lambda;
      logged["checkpoint"] = ckpt_path;
      log_config(err, *score ? "score" : "eval", logged.dump());
      if (*score && !score_input.empty()) {
        const auto data = read_file_bytes(score_input);
        PngMetadata meta;
        std::string id = sha256_hex(data);
        if (looks_like_png(score_input)) {
          read_png(score_input, &meta);
          if (meta.has_layout && !meta.source_sha256.empty()) id = meta.source_sha256;
        }
        const LabeledInput item{id, Label::benign, prepare_file(score_input, cfg.encoding, res)};
        const auto s = score_split(*model, std::span<const LabeledInput>(&item, 1), sc, cfg.score_chunk);
        out << id << '\t' << nlohmann::json(s[0].score).dump() << '\n';
      } else {
        const std::string& manifest = *score ? score_manifest : eval_manifest;
        const std::string& split_name = *score ? score_split_name : eval_split_name;
        if (manifest.empty()) {
          err << "score needs --input or --manifest\n" << score->help();
          return kExitUsage;
        }
        const auto entries = read_manifest(fs::path(manifest));
        std::optional<Split> which;
        if (split_name != "all") which = parse_split(split_name);
        const auto items = load_inputs(entries, which, cfg.encoding, res, workers);
        const auto scores = score_split(*model, items, sc, cfg.score_chunk);
        if (*score) {
          for (const auto& s : scores) out << s.sample_id << '\t' << nlohmann::json(s.score).dump() << '\n';
        } else {
          const auto r = evaluate_scores(scores);
          ordered_json j;
          j["split"] = split_name;
          j["n"] = scores.size();
          j["auc"] = r.auc;
          j["balacc"] = r.balacc;
          j["threshold"] = r.threshold;
          out << j.dump() << '\n';
        }
      }
    } else if (*ablate) {
      const TrainConfig cfg = ablate_flags.resolve();
      std::vector<Encoding> encodings;
      for (const auto& name : ablate_encodings) {
        const auto dot = name.find('.');
        if (dot == std::string::npos) throw Error("encoding must look like layout.coloring: " + name);
        encodings.push_back(encoding_from(name.substr(0, dot), name.substr(dot + 1)));
      }
      if (encodings.empty()) encodings = standard_encodings();
      log_config(err, "ablate", config_to_json(cfg));
      const auto entries = read_manifest(fs::path(ablate_manifest));
      check_one_class_purity(entries);
      const fs::path dir(ablate_out);
      fs::create_directories(dir);
      AblationOptions opts;
      opts.workers = workers;
      opts.out_dir = dir;
      opts.progress = &err;
      const auto rows = run_ablation(entries, encodings, cfg, opts);
      {
        std::ofstream tsv(dir / "report.tsv", std::ios::trunc);
        write_report_tsv(tsv, rows);
        std::ofstream jsonl(dir / "report.jsonl", std::ios::trunc);
        write_report_jsonl(jsonl, rows);
      }
      write_report_tsv(out, rows);
      for (const auto& r : rows) {
        if (!r.ok) return kExitFailure;
      }
    } else if (*synth) {
      log_config(err, "synth", ordered_json{{"benign", spec.benign}, {"anomalous", spec.anomalous},
                                            {"seed", spec.seed}, {"min_size", spec.min_size},
                                            {"max_size", spec.max_size}, {"out_dir", synth_out}}.dump());
      const auto entries = synth_corpus(spec, synth_out);
      err << "[synth] " << entries.size() << " files -> " << synth_out << '\n';
    }
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitOk;
}

}  // namespace bytegan
