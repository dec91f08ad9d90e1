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

// File -> byteplot -> model input, for single files and whole manifest splits.

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bytegan/corpus.hpp"
#include "bytegan/imgcode.hpp"

namespace bytegan {

struct LabeledInput {
  std::string id;
  Label label = Label::benign;
  ModelInput input;
};

ModelInput prepare_bytes(std::span<const std::uint8_t> data, const Encoding& enc,
                         std::uint32_t resolution);

/// A PNG written by this toolkit (layout metadata present) is resized as-is;
/// anything else is treated as a raw file and encoded first.
ModelInput prepare_file(const std::filesystem::path& path, const Encoding& enc,
                        std::uint32_t resolution);

/// Entries in `split` (all entries when empty), in manifest order.
std::vector<LabeledInput> load_inputs(std::span<const ManifestEntry> entries,
                                      std::optional<Split> split, const Encoding& enc,
                                      std::uint32_t resolution, unsigned workers);

}  // namespace bytegan
