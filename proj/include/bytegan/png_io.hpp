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

// Archival PNG files.
//
// Palette-colored images are written as 8-bit indexed PNGs whose PLTE chunk is the
// palette, so decoding the file yields the original RGB pixels; greyscale images are
// 8-bit grey. Layout metadata (layout, coloring, order, payload_len, source sha256)
// travels in tEXt chunks so a file can be decoded back to its nibble stream without
// the manifest. Output bytes are deterministic: no timestamps, fixed zlib settings.

#pragma once

#include <filesystem>
#include <string>

#include "bytegan/imgcode.hpp"

namespace bytegan {

struct PngMetadata {
  std::string source_sha256;
  bool has_layout = false;  // set by read_png when the layout tEXt chunk is present
};

/// `<sha256>.<layout>.<coloring>.png`
std::string archival_filename(const std::string& sha256, const Encoding& enc);

/// Writes to a temporary sibling and renames into place.
void write_png(const ByteplotImage& img, const std::filesystem::path& path,
               const Palette& palette = Palette::standard(), const PngMetadata& meta = {});

/// Writes a symbol plane as an indexed PNG without materializing RGB pixels.
void write_plane_png(const SymbolPlane& plane, const std::filesystem::path& path,
                     const Palette& palette = Palette::standard(), const PngMetadata& meta = {});

/// Nibbles -> Hilbert/row-major palette PNG; the fast path for large files.
void write_archival_png(const NibbleStream& stream, Layout layout,
                        const std::filesystem::path& path,
                        const Palette& palette = Palette::standard(), const PngMetadata& meta = {});

ByteplotImage read_png(const std::filesystem::path& path, PngMetadata* meta = nullptr);

bool looks_like_png(const std::filesystem::path& path);

}  // namespace bytegan
