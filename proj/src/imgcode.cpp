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

#include "bytegan/imgcode.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

namespace bytegan {

std::string_view to_string(Layout layout) {
  return layout == Layout::hilbert ? "hilbert" : "rowmajor";
}

std::string_view to_string(Coloring coloring) {
  return coloring == Coloring::palette_rgb ? "rgb" : "greyscale";
}

Layout parse_layout(std::string_view text) {
  if (text == "hilbert") return Layout::hilbert;
  if (text == "rowmajor" || text == "row_major") return Layout::row_major;
  throw Error("unknown layout '" + std::string(text) + "' (expected hilbert|rowmajor)");
}

Coloring parse_coloring(std::string_view text) {
  if (text == "rgb" || text == "palette_rgb") return Coloring::palette_rgb;
  if (text == "greyscale" || text == "grayscale") return Coloring::greyscale;
  throw Error("unknown coloring '" + std::string(text) + "' (expected rgb|greyscale)");
}

std::string to_string(const Encoding& enc) {
  return std::string(to_string(enc.layout)) + "." + std::string(to_string(enc.coloring));
}

Palette::Palette(const std::array<Rgb, 16>& colors) : colors_(colors) {
  for (std::size_t i = 0; i < colors_.size(); ++i) {
    for (std::size_t j = i + 1; j < colors_.size(); ++j) {
      if (colors_[i] == colors_[j]) {
        throw Error("palette colors " + std::to_string(i) + " and " + std::to_string(j) +
                    " coincide; coloring must be injective");
      }
    }
  }
}

const Palette& Palette::standard() {
  static const Palette palette({{
      {0, 0, 0},        // 0
      {128, 0, 0},      // 1
      {154, 99, 36},    // 2
      {128, 128, 0},    // 3
      {70, 153, 144},   // 4
      {0, 0, 117},      // 5
      {230, 25, 75},    // 6
      {245, 130, 49},   // 7
      {255, 225, 25},   // 8
      {191, 239, 69},   // 9
      {60, 180, 75},    // A
      {66, 212, 244},   // B
      {67, 99, 216},    // C
      {145, 30, 180},   // D
      {240, 50, 230},   // E
      {255, 255, 255},  // F
  }});
  return palette;
}

std::optional<std::uint8_t> Palette::index_of(Rgb color) const {
  for (std::size_t i = 0; i < colors_.size(); ++i) {
    if (colors_[i] == color) return static_cast<std::uint8_t>(i);
  }
  return std::nullopt;
}

SymbolPlane layout_symbols(std::span<const std::uint8_t> symbols, Layout layout) {
  if (symbols.empty()) throw Error("empty input: cannot lay out an empty symbol stream");
  const HilbertOrder order = choose_order(symbols.size());
  SymbolPlane plane;
  plane.width = order.side();
  plane.height = order.side();
  plane.layout = layout;
  plane.order = order.n();
  plane.payload_len = symbols.size();
  plane.cells.assign(static_cast<std::size_t>(order.capacity()), 0);

  std::uint8_t* cells = plane.cells.data();
  const std::size_t width = plane.width;
  if (layout == Layout::hilbert) {
    const std::uint8_t* src = symbols.data();
    walk_hilbert(order, symbols.size(), [&](std::uint64_t d, std::uint32_t x, std::uint32_t y) {
      cells[y * width + x] = src[d] & 0x0F;
    });
  } else {
    for (std::size_t i = 0; i < symbols.size(); ++i) cells[i] = symbols[i] & 0x0F;
  }
  return plane;
}

ByteplotImage colorize(const SymbolPlane& plane, const Palette& palette) {
  ByteplotImage img;
  img.width = plane.width;
  img.height = plane.height;
  img.channels = 3;
  img.layout = plane.layout;
  img.coloring = Coloring::palette_rgb;
  img.order = plane.order;
  img.payload_len = plane.payload_len;
  img.pixels.resize(plane.cells.size() * 3);
  std::uint8_t* dst = img.pixels.data();
  for (const std::uint8_t s : plane.cells) {
    const Rgb& c = palette[s];
    *dst++ = c.r;
    *dst++ = c.g;
    *dst++ = c.b;
  }
  return img;
}

ByteplotImage encode_image(const NibbleStream& stream, Layout layout, const Palette& palette) {
  return colorize(layout_symbols(stream.symbols, layout), palette);
}

SymbolPlane image_to_plane(const ByteplotImage& img, const Palette& palette) {
  if (img.coloring != Coloring::palette_rgb || img.channels != 3) {
    throw Error("only palette-colored images can be mapped back to symbols");
  }
  SymbolPlane plane;
  plane.width = img.width;
  plane.height = img.height;
  plane.layout = img.layout;
  plane.order = img.order;
  plane.payload_len = img.payload_len;
  const std::size_t n = static_cast<std::size_t>(img.width) * img.height;
  if (img.pixels.size() != n * 3) throw ShapeError("pixel buffer does not match image size");
  plane.cells.resize(n);
  // Runs of one color are common; remember the last match.
  Rgb last = palette[0];
  std::uint8_t last_idx = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const Rgb c{img.pixels[3 * i], img.pixels[3 * i + 1], img.pixels[3 * i + 2]};
    if (!(c == last)) {
      const auto idx = palette.index_of(c);
      if (!idx) {
        throw CorruptByteplot("pixel (" + std::to_string(i % img.width) + "," +
                              std::to_string(i / img.width) + ") is not a palette color");
      }
      last = c;
      last_idx = *idx;
    }
    plane.cells[i] = last_idx;
  }
  return plane;
}

NibbleStream decode_image(const ByteplotImage& img, const Palette& palette) {
  if (img.coloring != Coloring::palette_rgb) throw Error("decode_image needs a palette-colored image");
  const std::uint64_t cells = static_cast<std::uint64_t>(img.width) * img.height;
  if (img.payload_len > cells) throw CorruptByteplot("payload length exceeds image size");
  if (img.layout == Layout::hilbert && (img.width != img.height || img.order == 0 ||
                                        img.width != (std::uint32_t{1} << img.order))) {
    throw CorruptByteplot("hilbert image must be a 2^order square");
  }

  NibbleStream out;
  out.origin = NibbleOrigin::byte_sequence;
  out.symbols.resize(img.payload_len);
  auto lookup = [&](std::uint32_t x, std::uint32_t y) {
    const std::uint8_t* p = img.pixel(x, y);
    const auto idx = palette.index_of(Rgb{p[0], p[1], p[2]});
    if (!idx) {
      throw CorruptByteplot("pixel (" + std::to_string(x) + "," + std::to_string(y) +
                            ") is not a palette color");
    }
    return *idx;
  };
  if (img.payload_len == 0) return out;
  if (img.layout == Layout::hilbert) {
    walk_hilbert(HilbertOrder(img.order), img.payload_len,
                 [&](std::uint64_t d, std::uint32_t x, std::uint32_t y) { out.symbols[d] = lookup(x, y); });
  } else {
    for (std::uint64_t i = 0; i < img.payload_len; ++i) {
      out.symbols[i] = lookup(static_cast<std::uint32_t>(i % img.width),
                              static_cast<std::uint32_t>(i / img.width));
    }
  }
  return out;
}

ByteplotImage encode_greyscale_rowmajor(std::span<const std::uint8_t> data, std::uint32_t width) {
  if (width == 0) throw Error("row width must be at least 1");
  ByteplotImage img;
  img.width = width;
  img.height = static_cast<std::uint32_t>((data.size() + width - 1) / width);
  img.channels = 1;
  img.layout = Layout::row_major;
  img.coloring = Coloring::greyscale;
  img.payload_len = data.size();
  img.pixels.assign(static_cast<std::size_t>(img.width) * img.height, 0);
  std::copy(data.begin(), data.end(), img.pixels.begin());
  return img;
}

ByteplotImage encode_greyscale_hilbert(const NibbleStream& stream) {
  const SymbolPlane plane = layout_symbols(stream.symbols, Layout::hilbert);
  ByteplotImage img;
  img.width = plane.width;
  img.height = plane.height;
  img.channels = 1;
  img.layout = Layout::hilbert;
  img.coloring = Coloring::greyscale;
  img.order = plane.order;
  img.payload_len = plane.payload_len;
  img.pixels.resize(plane.cells.size());
  std::transform(plane.cells.begin(), plane.cells.end(), img.pixels.begin(),
                 [](std::uint8_t s) { return static_cast<std::uint8_t>(s * 17); });
  return img;
}

std::uint32_t traditional_width(std::uint64_t file_size) {
  constexpr std::uint64_t kB = 1024;
  if (file_size < 10 * kB) return 32;
  if (file_size < 30 * kB) return 64;
  if (file_size < 60 * kB) return 128;
  if (file_size < 100 * kB) return 256;
  if (file_size < 200 * kB) return 384;
  if (file_size < 500 * kB) return 512;
  if (file_size < 1000 * kB) return 768;
  return 1024;
}

namespace {

struct Tap {
  std::uint32_t index;
  double weight;
};

// Per output pixel, the source taps along one axis.
std::vector<std::vector<Tap>> axis_taps(std::uint32_t src, std::uint32_t dst) {
  std::vector<std::vector<Tap>> taps(dst);
  const double scale = static_cast<double>(src) / dst;
  for (std::uint32_t j = 0; j < dst; ++j) {
    auto& t = taps[j];
    if (src >= dst) {
      const double lo = j * scale;
      const double hi = (j + 1) * scale;
      const auto first = static_cast<std::uint32_t>(std::floor(lo));
      const auto last = std::min<std::uint32_t>(src, static_cast<std::uint32_t>(std::ceil(hi)));
      for (std::uint32_t i = first; i < last; ++i) {
        const double overlap = std::min<double>(hi, i + 1) - std::max<double>(lo, i);
        if (overlap > 0) t.push_back({i, overlap / scale});
      }
    } else {
      const double u = std::clamp((j + 0.5) * scale - 0.5, 0.0, static_cast<double>(src - 1));
      const auto i0 = static_cast<std::uint32_t>(std::floor(u));
      const std::uint32_t i1 = std::min(i0 + 1, src - 1);
      const double w = u - i0;
      t.push_back({i0, 1.0 - w});
      if (w > 0) t.push_back({i1, w});
    }
  }
  return taps;
}

}  // namespace

ModelInput resize_normalize(const ByteplotImage& img, std::uint32_t resolution) {
  if (resolution < 8 || (resolution & (resolution - 1)) != 0) {
    throw Error("model resolution must be a power of two >= 8, got " + std::to_string(resolution));
  }
  if (img.width == 0 || img.height == 0) throw ShapeError("cannot resize an empty image");
  if (img.channels != 1 && img.channels != 3) throw ShapeError("images have 1 or 3 channels");
  const std::size_t expected = static_cast<std::size_t>(img.width) * img.height * img.channels;
  if (img.pixels.size() != expected) throw ShapeError("pixel buffer does not match image size");

  const std::uint32_t R = resolution;
  const std::uint32_t C = img.channels;
  const auto xt = axis_taps(img.width, R);
  const auto yt = axis_taps(img.height, R);

  // Horizontal pass into (height x R x C), then vertical pass.
  std::vector<float> rows(static_cast<std::size_t>(img.height) * R * C, 0.0f);
  for (std::uint32_t y = 0; y < img.height; ++y) {
    const std::uint8_t* src = img.pixels.data() + static_cast<std::size_t>(y) * img.width * C;
    float* dst = rows.data() + static_cast<std::size_t>(y) * R * C;
    for (std::uint32_t x = 0; x < R; ++x) {
      double acc[3] = {0, 0, 0};
      for (const Tap& t : xt[x]) {
        for (std::uint32_t c = 0; c < C; ++c) acc[c] += t.weight * src[t.index * C + c];
      }
      for (std::uint32_t c = 0; c < C; ++c) dst[x * C + c] = static_cast<float>(acc[c]);
    }
  }

  ModelInput out;
  out.resolution = R;
  out.values.assign(static_cast<std::size_t>(3) * R * R, 0.0f);
  const std::size_t plane = static_cast<std::size_t>(R) * R;
  for (std::uint32_t y = 0; y < R; ++y) {
    for (std::uint32_t x = 0; x < R; ++x) {
      double acc[3] = {0, 0, 0};
      for (const Tap& t : yt[y]) {
        const float* src = rows.data() + (static_cast<std::size_t>(t.index) * R + x) * C;
        for (std::uint32_t c = 0; c < C; ++c) acc[c] += t.weight * src[c];
      }
      for (std::uint32_t c = 0; c < 3; ++c) {
        const double v = acc[C == 1 ? 0 : c] / 127.5 - 1.0;
        out.values[c * plane + static_cast<std::size_t>(y) * R + x] =
            static_cast<float>(std::clamp(v, -1.0, 1.0));
      }
    }
  }
  return out;
}

ByteplotImage encode_bytes(std::span<const std::uint8_t> data, const Encoding& enc,
                           const Palette& palette) {
  if (data.empty()) throw Error("empty input");
  if (enc.layout == Layout::row_major && enc.coloring == Coloring::greyscale) {
    return encode_greyscale_rowmajor(data, traditional_width(data.size()));
  }
  const NibbleStream stream = bytes_to_nibbles(data);
  if (enc.coloring == Coloring::greyscale) return encode_greyscale_hilbert(stream);
  return encode_image(stream, enc.layout, palette);
}

}  // namespace bytegan
