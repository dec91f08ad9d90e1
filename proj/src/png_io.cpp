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

#include "bytegan/png_io.hpp"

#include <png.h>
#include <unistd.h>
#include <zlib.h>

#include <csetjmp>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>
#include <vector>

namespace bytegan {

namespace fs = std::filesystem;

namespace {

constexpr const char* kKeyLayout = "bytegan:layout";
constexpr const char* kKeyColoring = "bytegan:coloring";
constexpr const char* kKeyOrder = "bytegan:order";
constexpr const char* kKeyPayload = "bytegan:payload_len";
constexpr const char* kKeySha = "bytegan:source_sha256";

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f != nullptr) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

fs::path temp_sibling(const fs::path& path) {
  fs::path tmp = path;
  tmp += ".tmp-" + std::to_string(::getpid());
  return tmp;
}

struct TextEntries {
  std::vector<std::string> keys;
  std::vector<std::string> values;
  std::vector<png_text> text;

  void add(const char* key, std::string value) {
    keys.emplace_back(key);
    values.push_back(std::move(value));
  }
  void finish() {
    text.resize(keys.size());
    for (std::size_t i = 0; i < keys.size(); ++i) {
      std::memset(&text[i], 0, sizeof(png_text));
      text[i].compression = PNG_TEXT_COMPRESSION_NONE;
      text[i].key = keys[i].data();
      text[i].text = values[i].data();
      text[i].text_length = values[i].size();
    }
  }
};

// Rows point into caller-owned storage; color_type is PNG_COLOR_TYPE_PALETTE or _GRAY.
void write_rows(const fs::path& path, std::uint32_t width, std::uint32_t height, int color_type,
                const std::uint8_t* rows, const Palette* palette, TextEntries& text) {
  const fs::path tmp = temp_sibling(path);
  FilePtr file(std::fopen(tmp.c_str(), "wb"));
  if (!file) throw Error("cannot open " + tmp.string() + " for writing");

  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png != nullptr ? png_create_info_struct(png) : nullptr;
  if (png == nullptr || info == nullptr) {
    png_destroy_write_struct(&png, &info);
    throw Error("libpng initialisation failed");
  }
  std::vector<png_color> plte;
  if (palette != nullptr) {
    for (const Rgb& c : palette->colors()) plte.push_back(png_color{c.r, c.g, c.b});
  }
  text.finish();

  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    file.reset();
    std::error_code ec;
    fs::remove(tmp, ec);
    throw Error("libpng failed while writing " + path.string());
  }
  png_init_io(png, file.get());
  png_set_IHDR(png, info, width, height, 8, color_type, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  if (!plte.empty()) png_set_PLTE(png, info, plte.data(), static_cast<int>(plte.size()));
  if (!text.text.empty()) png_set_text(png, info, text.text.data(), static_cast<int>(text.text.size()));
  png_set_compression_level(png, 1);
  png_set_compression_strategy(png, Z_RLE);
  png_set_filter(png, PNG_FILTER_TYPE_BASE, PNG_FILTER_NONE);
  png_write_info(png, info);
  for (std::uint32_t y = 0; y < height; ++y) {
    png_write_row(png, const_cast<png_bytep>(rows + static_cast<std::size_t>(y) * width));
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  if (std::fflush(file.get()) != 0) throw Error("write failed for " + tmp.string());
  file.reset();
  fs::rename(tmp, path);
}

void add_layout_text(TextEntries& text, Layout layout, Coloring coloring, unsigned order,
                     std::uint64_t payload_len, const PngMetadata& meta) {
  text.add(kKeyLayout, std::string(to_string(layout)));
  text.add(kKeyColoring, std::string(to_string(coloring)));
  text.add(kKeyOrder, std::to_string(order));
  text.add(kKeyPayload, std::to_string(payload_len));
  if (!meta.source_sha256.empty()) text.add(kKeySha, meta.source_sha256);
}

}  // namespace

std::string archival_filename(const std::string& sha256, const Encoding& enc) {
  return sha256 + "." + to_string(enc) + ".png";
}

void write_plane_png(const SymbolPlane& plane, const fs::path& path, const Palette& palette,
                     const PngMetadata& meta) {
  TextEntries text;
  add_layout_text(text, plane.layout, Coloring::palette_rgb, plane.order, plane.payload_len, meta);
  write_rows(path, plane.width, plane.height, PNG_COLOR_TYPE_PALETTE, plane.cells.data(), &palette,
             text);
}

void write_png(const ByteplotImage& img, const fs::path& path, const Palette& palette,
               const PngMetadata& meta) {
  if (img.coloring == Coloring::palette_rgb) {
    write_plane_png(image_to_plane(img, palette), path, palette, meta);
    return;
  }
  if (img.channels != 1) throw ShapeError("greyscale images have one channel");
  TextEntries text;
  add_layout_text(text, img.layout, img.coloring, img.order, img.payload_len, meta);
  write_rows(path, img.width, img.height, PNG_COLOR_TYPE_GRAY, img.pixels.data(), nullptr, text);
}

void write_archival_png(const NibbleStream& stream, Layout layout, const fs::path& path,
                        const Palette& palette, const PngMetadata& meta) {
  write_plane_png(layout_symbols(stream.symbols, layout), path, palette, meta);
}

bool looks_like_png(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::uint8_t sig[8] = {};
  if (!in.read(reinterpret_cast<char*>(sig), sizeof(sig))) return false;
  return png_sig_cmp(sig, 0, sizeof(sig)) == 0;
}

ByteplotImage read_png(const fs::path& path, PngMetadata* meta) {
  FilePtr file(std::fopen(path.c_str(), "rb"));
  if (!file) throw Error("cannot open " + path.string());
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png != nullptr ? png_create_info_struct(png) : nullptr;
  if (png == nullptr || info == nullptr) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw Error("libpng initialisation failed");
  }
  ByteplotImage img;
  std::vector<png_bytep> row_ptrs;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw Error("not a readable PNG: " + path.string());
  }
  png_init_io(png, file.get());
  png_read_info(png, info);
  const png_uint_32 width = png_get_image_width(png, info);
  const png_uint_32 height = png_get_image_height(png, info);
  const int color_type = png_get_color_type(png, info);
  const int bit_depth = png_get_bit_depth(png, info);
  if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color_type == PNG_COLOR_TYPE_GRAY && bit_depth < 8) png_set_expand_gray_1_2_4_to_8(png);
  if (bit_depth == 16) png_set_strip_16(png);
  if ((color_type & PNG_COLOR_MASK_ALPHA) != 0) png_set_strip_alpha(png);
  png_read_update_info(png, info);
  const int channels = png_get_channels(png, info);
  if (channels != 1 && channels != 3) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw ShapeError("unsupported PNG channel count " + std::to_string(channels));
  }

  img.width = width;
  img.height = height;
  img.channels = static_cast<std::uint8_t>(channels);
  img.coloring = channels == 3 ? Coloring::palette_rgb : Coloring::greyscale;
  img.layout = Layout::row_major;
  img.payload_len = static_cast<std::uint64_t>(width) * height;
  img.pixels.resize(static_cast<std::size_t>(width) * height * channels);
  row_ptrs.resize(height);
  for (png_uint_32 y = 0; y < height; ++y) {
    row_ptrs[y] = img.pixels.data() + static_cast<std::size_t>(y) * width * channels;
  }
  png_read_image(png, row_ptrs.data());
  png_read_end(png, info);

  png_textp text = nullptr;
  int n_text = 0;
  png_get_text(png, info, &text, &n_text);
  for (int i = 0; i < n_text; ++i) {
    const std::string key = text[i].key;
    const std::string value(text[i].text, text[i].text_length);
    if (key == kKeyLayout) {
      img.layout = parse_layout(value);
      if (meta != nullptr) meta->has_layout = true;
    }
    if (key == kKeyColoring) img.coloring = parse_coloring(value);
    if (key == kKeyOrder) img.order = static_cast<unsigned>(std::stoul(value));
    if (key == kKeyPayload) img.payload_len = std::stoull(value);
    if (key == kKeySha && meta != nullptr) meta->source_sha256 = value;
  }
  png_destroy_read_struct(&png, &info, nullptr);
  return img;
}

}  // namespace bytegan
