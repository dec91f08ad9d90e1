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

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "bytegan/common.hpp"
#include "bytegan/extract.hpp"
#include "bytegan/hilbert.hpp"

namespace bytegan {

enum class Layout : std::uint8_t { hilbert, row_major };
enum class Coloring : std::uint8_t { palette_rgb, greyscale };

std::string_view to_string(Layout layout);
std::string_view to_string(Coloring coloring);
Layout parse_layout(std::string_view text);      // "hilbert" | "rowmajor"
Coloring parse_coloring(std::string_view text);  // "rgb" | "greyscale"

struct Rgb {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;
  friend bool operator==(const Rgb&, const Rgb&) = default;
};

/// 16 pairwise-distinct colors, one per hexadecimal digit.
class Palette {
 public:
  explicit Palette(const std::array<Rgb, 16>& colors);

  /// The standardized high-contrast hex-digit colors.
  static const Palette& standard();

  const Rgb& operator[](std::uint8_t symbol) const { return colors_[symbol & 0x0F]; }
  const std::array<Rgb, 16>& colors() const { return colors_; }
  std::optional<std::uint8_t> index_of(Rgb color) const;

 private:
  std::array<Rgb, 16> colors_;
};

/// One symbol per grid cell, before coloring. Padding cells hold symbol 0.
struct SymbolPlane {
  std::uint32_t width = 0;
  std::uint32_t height = 0;
  Layout layout = Layout::hilbert;
  unsigned order = 0;  // hilbert order of the square grid
  std::uint64_t payload_len = 0;
  std::vector<std::uint8_t> cells;  // row-major storage, index y * width + x
};

/// Pixel grid produced by a layout and a coloring.
struct ByteplotImage {
  std::uint32_t width = 0;
  std::uint32_t height = 0;
  std::uint8_t channels = 3;
  Layout layout = Layout::hilbert;
  Coloring coloring = Coloring::palette_rgb;
  unsigned order = 0;
  std::uint64_t payload_len = 0;
  std::vector<std::uint8_t> pixels;  // row-major, interleaved channels

  std::uint32_t side() const { return width; }
  const std::uint8_t* pixel(std::uint32_t x, std::uint32_t y) const {
    return pixels.data() + (static_cast<std::size_t>(y) * width + x) * channels;
  }
};

/// Network-facing image: 3 x resolution x resolution floats in [-1, 1], CHW order.
struct ModelInput {
  std::uint32_t resolution = 0;
  std::vector<float> values;
};

/// Places symbols on a square 2^n grid. Hilbert layout follows the curve; row-major
/// fills rows left to right on the same square grid.
SymbolPlane layout_symbols(std::span<const std::uint8_t> symbols, Layout layout);

ByteplotImage colorize(const SymbolPlane& plane, const Palette& palette);

ByteplotImage encode_image(const NibbleStream& stream, Layout layout,
                           const Palette& palette = Palette::standard());

/// Recovers the payload symbols in curve order. Throws CorruptByteplot on
/// any payload pixel outside the palette.
NibbleStream decode_image(const ByteplotImage& img, const Palette& palette = Palette::standard());

/// Recovers the symbol plane of a palette image (every cell, padding included).
SymbolPlane image_to_plane(const ByteplotImage& img, const Palette& palette);

/// Traditional byteplot: one grey pixel per byte, fixed width, rows top to bottom.
ByteplotImage encode_greyscale_rowmajor(std::span<const std::uint8_t> data, std::uint32_t width);

/// Symbol s becomes intensity 17 * s, laid out on the Hilbert curve.
ByteplotImage encode_greyscale_hilbert(const NibbleStream& stream);

/// Row width of the traditional byteplot as a function of file size.
std::uint32_t traditional_width(std::uint64_t file_size);

/// Area-average downsampling (bilinear upsampling on axes that are too small),
/// greyscale replicated to three channels, values mapped from [0, 255] to [-1, 1].
ModelInput resize_normalize(const ByteplotImage& img, std::uint32_t resolution);

struct Encoding {
  Layout layout = Layout::hilbert;
  Coloring coloring = Coloring::palette_rgb;
  friend bool operator==(const Encoding&, const Encoding&) = default;
};

std::string to_string(const Encoding& enc);

/// Raw file bytes -> byteplot under the given encoding. Row-major greyscale is the
/// traditional byte-per-pixel plot; every other combination works on nibbles.
ByteplotImage encode_bytes(std::span<const std::uint8_t> data, const Encoding& enc,
                           const Palette& palette = Palette::standard());

}  // namespace bytegan
