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

// Synthetic stand-in corpus. Benign files are runs of records: a fixed header
// followed by a low-entropy payload that repeats with a per-file period of 16 to
// 64 bytes over the bytes 0x0F and 0xF0. Anomalous files share that structure but
// carry one to three uniformly random segments spliced over the payload.

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "bytegan/corpus.hpp"

namespace bytegan {

struct SynthSpec {
  std::size_t benign = 400;
  std::size_t anomalous = 400;
  std::uint64_t seed = 7;
  std::size_t min_size = 6144;  // bytes
  std::size_t max_size = 8192;
};

std::vector<std::uint8_t> synth_file(bool anomalous, std::uint64_t file_seed,
                                     const SynthSpec& spec);

/// Writes benign/NNNN.bin and anomalous/NNNN.bin under out_dir plus
/// out_dir/manifest.jsonl, and returns the manifest (sorted by path).
std::vector<ManifestEntry> synth_corpus(const SynthSpec& spec, const std::filesystem::path& out_dir);

}  // namespace bytegan
