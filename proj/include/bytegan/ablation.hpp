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

// Encoding ablation: one model per {layout, coloring} on the same splits with the
// same seed, reported as a TSV table and as JSONL.

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bytegan/corpus.hpp"
#include "bytegan/train.hpp"

namespace bytegan {

struct AblationRow {
  Encoding encoding;
  bool ok = false;
  std::string error;  // set when the run aborted
  EvalResult eval;    // best-AUC checkpoint, test split
  std::int64_t steps = 0;
  std::uint64_t seed = 0;
};

/// The three rows of the comparison: traditional (row-major greyscale bytes),
/// greyscale + Hilbert, and RGB + Hilbert.
std::vector<Encoding> standard_encodings();

struct AblationOptions {
  unsigned workers = 1;
  std::optional<std::filesystem::path> out_dir;  // per-row logs and checkpoints
  std::ostream* progress = nullptr;
};

/// Trains and scores one encoding. A failure is captured in the row, not thrown.
AblationRow run_ablation_row(std::span<const ManifestEntry> entries, const Encoding& enc,
                             const TrainConfig& base, const AblationOptions& opts);

std::vector<AblationRow> run_ablation(std::span<const ManifestEntry> entries,
                                      std::span<const Encoding> encodings,
                                      const TrainConfig& base, const AblationOptions& opts);

void write_report_tsv(std::ostream& out, std::span<const AblationRow> rows);
void write_report_jsonl(std::ostream& out, std::span<const AblationRow> rows);

}  // namespace bytegan
