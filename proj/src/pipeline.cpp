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

#include "bytegan/pipeline.hpp"

#include "bytegan/extract.hpp"
#include "bytegan/png_io.hpp"

namespace bytegan {

ModelInput prepare_bytes(std::span<const std::uint8_t> data, const Encoding& enc,
                         std::uint32_t resolution) {
  return resize_normalize(encode_bytes(data, enc), resolution);
}

ModelInput prepare_file(const std::filesystem::path& path, const Encoding& enc,
                        std::uint32_t resolution) {
  if (looks_like_png(path)) {
    PngMetadata meta;
    ByteplotImage img = read_png(path, &meta);
    if (meta.has_layout) return resize_normalize(img, resolution);
  }
  const auto data = read_file_bytes(path);
  return prepare_bytes(data, enc, resolution);
}

std::vector<LabeledInput> load_inputs(std::span<const ManifestEntry> entries,
                                      std::optional<Split> split, const Encoding& enc,
                                      std::uint32_t resolution, unsigned workers) {
  std::vector<const ManifestEntry*> picked;
  for (const auto& e : entries) {
    if (!split || e.split == split) picked.push_back(&e);
  }
  std::vector<LabeledInput> out(picked.size());
  parallel_for(picked.size(), workers, [&](std::size_t i) {
    const auto& e = *picked[i];
    out[i] = {e.sha256, e.label, prepare_bytes(read_file_bytes(e.path), enc, resolution)};
  });
  return out;
}

}  // namespace bytegan
