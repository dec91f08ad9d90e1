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

#include "bytegan/ablation.hpp"

#include <fstream>
#include <nlohmann/json.hpp>
#include <ostream>

#include "bytegan/pipeline.hpp"

namespace bytegan {

namespace fs = std::filesystem;

std::vector<Encoding> standard_encodings() {
  return {{Layout::row_major, Coloring::greyscale},
          {Layout::hilbert, Coloring::greyscale},
          {Layout::hilbert, Coloring::palette_rgb}};
}

AblationRow run_ablation_row(std::span<const ManifestEntry> entries, const Encoding& enc,
                             const TrainConfig& base, const AblationOptions& opts) {
  AblationRow row;
  row.encoding = enc;
  row.steps = base.total_steps;
  row.seed = base.seed;
  try {
    TrainConfig cfg = base;
    cfg.encoding = enc;
    const auto res = static_cast<std::uint32_t>(cfg.model.resolution);
    const auto train_set = load_inputs(entries, Split::train, enc, res, opts.workers);
    const auto test_set = load_inputs(entries, Split::test, enc, res, opts.workers);
    if (opts.progress != nullptr) {
      *opts.progress << "[ablate] " << to_string(enc) << ": " << train_set.size() << " train, "
                     << test_set.size() << " test" << std::endl;
    }
    std::ofstream log_file;
    TrainSinks sinks;
    sinks.progress = opts.progress;
    if (opts.out_dir) {
      fs::create_directories(*opts.out_dir);
      log_file.open(*opts.out_dir / (to_string(enc) + ".log.jsonl"), std::ios::trunc);
      sinks.log = &log_file;
    }
    const auto result = train(cfg, train_set, test_set, sinks);
    if (opts.out_dir) {
      save_checkpoint(result.best, *opts.out_dir / (to_string(enc) + ".best.ckpt"));
      save_checkpoint(result.final, *opts.out_dir / (to_string(enc) + ".final.ckpt"));
    }
    row.eval = result.best_eval;
    row.ok = true;
  } catch (const std::exception& e) {
    row.ok = false;
    row.error = e.what();
    if (opts.progress != nullptr) *opts.progress << "[ablate] " << to_string(enc) << " failed: " << e.what() << std::endl;
  }
  return row;
}

std::vector<AblationRow> run_ablation(std::span<const ManifestEntry> entries,
                                      std::span<const Encoding> encodings,
                                      const TrainConfig& base, const AblationOptions& opts) {
  std::vector<AblationRow> rows;
  for (const auto& enc : encodings) rows.push_back(run_ablation_row(entries, enc, base, opts));
  return rows;
}

void write_report_tsv(std::ostream& out, std::span<const AblationRow> rows) {
  out << "layout\tcoloring\tauc\tbalacc\tthreshold\tsteps\tseed\tstatus\n";
  for (const auto& r : rows) {
    out << to_string(r.encoding.layout) << '\t' << to_string(r.encoding.coloring) << '\t';
    if (r.ok) {
      out << nlohmann::json(r.eval.auc).dump() << '\t' << nlohmann::json(r.eval.balacc).dump() << '\t'
          << nlohmann::json(r.eval.threshold).dump();
    } else {
      out << "nan\tnan\tnan";
    }
    out << '\t' << r.steps << '\t' << r.seed << '\t' << (r.ok ? "ok" : "failed") << '\n';
  }
}

void write_report_jsonl(std::ostream& out, std::span<const AblationRow> rows) {
  for (const auto& r : rows) {
    nlohmann::ordered_json j;
    j["layout"] = std::string(to_string(r.encoding.layout));
    j["coloring"] = std::string(to_string(r.encoding.coloring));
    j["auc"] = r.ok ? nlohmann::ordered_json(r.eval.auc) : nlohmann::ordered_json(nullptr);
    j["balacc"] = r.ok ? nlohmann::ordered_json(r.eval.balacc) : nlohmann::ordered_json(nullptr);
    j["threshold"] = r.ok ? nlohmann::ordered_json(r.eval.threshold) : nlohmann::ordered_json(nullptr);
    j["steps"] = r.steps;
    j["seed"] = r.seed;
    j["status"] = r.ok ? "ok" : "failed";
    if (!r.ok) j["error"] = r.error;
    out << j.dump() << '\n';
  }
}

}  // namespace bytegan
